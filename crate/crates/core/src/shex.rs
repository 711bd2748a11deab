//! ShEx schemas in the triple-constraint fragment.
//!
//! A schema maps each shape name to a set of triple constraints
//! `p :: S^mu`, with at most one constraint per predicate within a shape.

use std::collections::BTreeMap;
use std::fmt;

use crate::value::Value;

/// An interval multiplicity on the number of `p`-successors of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Multiplicity {
    /// Exactly one.
    One,
    /// Zero or one.
    Opt,
    /// Any number.
    Star,
    /// One or more.
    Plus,
}

impl Multiplicity {
    pub fn lower(self) -> usize {
        match self {
            Multiplicity::One | Multiplicity::Plus => 1,
            Multiplicity::Opt | Multiplicity::Star => 0,
        }
    }

    /// Upper bound; `None` means unbounded.
    pub fn upper(self) -> Option<usize> {
        match self {
            Multiplicity::One | Multiplicity::Opt => Some(1),
            Multiplicity::Star | Multiplicity::Plus => None,
        }
    }

    pub fn bounds(self, count: usize) -> bool {
        count >= self.lower() && self.upper().map_or(true, |u| count <= u)
    }

    pub fn marker(self) -> char {
        match self {
            Multiplicity::One => '1',
            Multiplicity::Opt => '?',
            Multiplicity::Star => '*',
            Multiplicity::Plus => '+',
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.marker())
    }
}

/// The target of a triple constraint: a shape name or the literal marker.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TargetType {
    Shape(String),
    Lit,
}

impl TargetType {
    pub fn shape(name: impl Into<String>) -> Self {
        TargetType::Shape(name.into())
    }

    pub fn as_shape(&self) -> Option<&str> {
        match self {
            TargetType::Shape(s) => Some(s),
            TargetType::Lit => None,
        }
    }

    /// The relation symbol this type occupies in the target signature.
    pub fn relation_name(&self) -> &str {
        match self {
            TargetType::Shape(s) => s,
            TargetType::Lit => LIT_MARKER,
        }
    }
}

impl fmt::Display for TargetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.relation_name())
    }
}

/// Reserved relation symbol for literal typing.
pub const LIT_MARKER: &str = "Lit";

/// Reserved relation symbol for triples in the target signature.
pub const TRIPLE: &str = "Triple";

/// A triple constraint `p :: target^mult`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TripleConstraint {
    /// Predicate IRI text.
    pub predicate: String,
    pub target: TargetType,
    pub mult: Multiplicity,
}

impl TripleConstraint {
    pub fn new(predicate: impl Into<String>, target: TargetType, mult: Multiplicity) -> Self {
        TripleConstraint { predicate: predicate.into(), target, mult }
    }

    pub fn predicate_value(&self) -> Value {
        Value::iri(self.predicate.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShexError {
    DuplicateShape(String),
    DuplicatePredicate { shape: String, predicate: String },
    UnknownShapeTarget { shape: String, target: String },
    ReservedShapeName(String),
}

impl fmt::Display for ShexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShexError::DuplicateShape(s) => write!(f, "shape {s} defined twice"),
            ShexError::DuplicatePredicate { shape, predicate } => {
                write!(f, "shape {shape} has two constraints on predicate <{predicate}>")
            }
            ShexError::UnknownShapeTarget { shape, target } => {
                write!(f, "shape {shape} references undeclared shape {target}")
            }
            ShexError::ReservedShapeName(s) => {
                write!(f, "shape name {s} is reserved")
            }
        }
    }
}

impl std::error::Error for ShexError {}

/// A ShEx schema: shape names with their triple-constraint definitions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShexSchema {
    defs: BTreeMap<String, Vec<TripleConstraint>>,
}

impl ShexSchema {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a shape definition; the constraint list is stored sorted by
    /// predicate. Cross-shape references are checked by [`Self::validate`].
    pub fn define(
        &mut self,
        shape: impl Into<String>,
        constraints: Vec<TripleConstraint>,
    ) -> Result<(), ShexError> {
        let shape = shape.into();
        if shape == LIT_MARKER || shape == TRIPLE {
            return Err(ShexError::ReservedShapeName(shape));
        }
        if self.defs.contains_key(&shape) {
            return Err(ShexError::DuplicateShape(shape));
        }
        let mut sorted = constraints;
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0].predicate == pair[1].predicate {
                return Err(ShexError::DuplicatePredicate {
                    shape,
                    predicate: pair[0].predicate.clone(),
                });
            }
        }
        self.defs.insert(shape, sorted);
        Ok(())
    }

    /// Checks that every shape target is declared.
    pub fn validate(&self) -> Result<(), ShexError> {
        for (shape, constraints) in &self.defs {
            for tc in constraints {
                if let TargetType::Shape(target) = &tc.target {
                    if !self.defs.contains_key(target) {
                        return Err(ShexError::UnknownShapeTarget {
                            shape: shape.clone(),
                            target: target.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn shapes(&self) -> impl Iterator<Item = &String> {
        self.defs.keys()
    }

    pub fn has_shape(&self, shape: &str) -> bool {
        self.defs.contains_key(shape)
    }

    pub fn constraints(&self, shape: &str) -> &[TripleConstraint] {
        self.defs.get(shape).map_or(&[], |v| v.as_slice())
    }

    /// The unique constraint of `shape` on `predicate`, if any.
    pub fn constraint(&self, shape: &str, predicate: &str) -> Option<&TripleConstraint> {
        self.constraints(shape).iter().find(|tc| tc.predicate == predicate)
    }

    /// Constraints whose multiplicity requires at least one occurrence.
    pub fn required_constraints(&self, shape: &str) -> impl Iterator<Item = &TripleConstraint> {
        self.constraints(shape).iter().filter(|tc| tc.mult.lower() >= 1)
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}
