//! Relational to RDF data exchange with ShEx target schemas.
//!
//! The pipeline: a relational source schema with functional dependencies, a
//! target ShEx schema compiled into tuple- and equality-generating
//! dependencies, and fully-typed source-to-target rules whose subjects and
//! objects are built by interpreted IRI constructors. On top of that sit
//! two static analyses — key-coveredness (consistency) and weak recursion
//! (chase termination) — and the chase itself, which materializes universal
//! solutions as typed RDF graphs.

pub mod chase;
pub mod completion;
pub mod consistency;
pub mod constructor;
pub mod dependency;
pub mod eval;
pub mod homomorphism;
pub mod mapping;
pub mod relational;
pub mod shex;
pub mod shex2dep;
pub mod typed_graph;
pub mod value;

#[cfg(test)]
pub(crate) mod fixtures;

pub use chase::{
    chase, chase_with_completion, ChaseConfig, ChaseResult, ChaseStep, StepOutcome, TriggerOrder,
};
pub use completion::canonical_completion;
pub use consistency::{
    contentious_pairs, functionally_overlapping, is_key_covered, ContentiousPair, KeyCoverage,
    OverlapVerdict,
};
pub use constructor::{default_interpretation, ConstructorRegistry};
pub use dependency::{Arg, Atom, Dependency, DependencyLabel, Head, Term};
pub use eval::{satisfies, Binding, Satisfaction};
pub use homomorphism::{find_homomorphism, homomorphically_equivalent};
pub use mapping::{
    check_fully_typed, normalize, DataExchangeSetting, FullyTypedReport, NormalizedStTgd, StTgd,
};
pub use relational::{
    check_fds, FdViolation, FunctionalDependency, Instance, RelationalSchema,
};
pub use shex::{Multiplicity, ShexSchema, TargetType, TripleConstraint, LIT_MARKER, TRIPLE};
pub use shex2dep::{compile, dependency_graph, is_weakly_recursive, DependencyGraph};
pub use typed_graph::{
    inst_to_rdf, is_correctly_typed, rdf_to_inst, validate_typed_graph, TypedGraph,
    TypingViolation,
};
pub use value::{Value, ValueKind};
