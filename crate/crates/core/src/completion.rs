//! Canonical completion: discharging required predicates with canonical
//! nulls instead of chasing the lower bounds.
//!
//! Each (shape, required predicate) pair owns one canonical node, typed by
//! the constraint's target. Nodes missing a required predicate are wired to
//! the pair's canonical node, and canonical nodes recursively receive their
//! own required successors. The canonical skeleton is finite even for
//! schemas whose chase diverges, because it ties required-predicate chains
//! into shared nodes.

use std::collections::BTreeSet;
use std::fmt;

use crate::constructor::ConstructorRegistry;
use crate::dependency::Dependency;
use crate::eval::{self, Binding, EvalError};
use crate::relational::Instance;
use crate::shex::{ShexSchema, TargetType, TRIPLE};
use crate::shex2dep;
use crate::value::Value;

#[derive(Debug, Clone)]
pub enum CompletionError {
    /// The input violates an upper-bound egd and cannot be completed.
    EgdViolated { dependency: Dependency, witness: Binding },
    /// A canonical node name already occurs in the instance.
    NameCollision(Value),
    /// The construction cannot satisfy the schema on this input (for
    /// example, nodes carrying several shapes that constrain one predicate).
    NotCompletable { dependency: Dependency },
    Eval(EvalError),
}

impl fmt::Display for CompletionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompletionError::EgdViolated { dependency, .. } => {
                write!(f, "input violates {dependency}")
            }
            CompletionError::NameCollision(v) => {
                write!(f, "canonical node {v} already occurs in the input")
            }
            CompletionError::NotCompletable { dependency } => {
                write!(f, "completion cannot satisfy {dependency}")
            }
            CompletionError::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CompletionError {}

impl From<EvalError> for CompletionError {
    fn from(e: EvalError) -> Self {
        CompletionError::Eval(e)
    }
}

/// The canonical node owned by a (shape, required predicate) pair: a null
/// literal for `Lit` targets, a blank node otherwise.
pub fn canonical_node(shape: &str, predicate: &str, target: &TargetType) -> Value {
    match target {
        TargetType::Lit => Value::Lit(format!("__null_c!{shape}!{predicate}")),
        TargetType::Shape(_) => Value::Blank(format!("c!{shape}!{predicate}")),
    }
}

/// Completes an egd-satisfying instance over the target signature into one
/// that satisfies the whole compiled schema.
pub fn canonical_completion(
    inst: &Instance,
    schema: &ShexSchema,
) -> Result<Instance, CompletionError> {
    let registry = ConstructorRegistry::new();
    let egds = shex2dep::compile_egds(schema);
    if let eval::Satisfaction::Falsified { dependency, witness } =
        eval::satisfies(inst, &egds, &registry)?
    {
        return Err(CompletionError::EgdViolated { dependency, witness });
    }

    // Close under the typing tgds first; they only add type facts for nodes
    // already present.
    let tc_deps: Vec<Dependency> = shex2dep::compile(schema)
        .into_iter()
        .filter(|d| d.label == crate::dependency::DependencyLabel::Tc)
        .collect();
    let mut state = inst.clone();
    loop {
        let mut added = false;
        for dep in &tc_deps {
            for binding in eval::falsifying_bindings(&state, dep, &registry)? {
                let crate::dependency::Head::Atoms { atoms, .. } = &dep.head else {
                    continue;
                };
                for (rel, tuple) in eval::head_facts(atoms, &binding, &registry)? {
                    if state.insert(rel, tuple).unwrap_or(false) {
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }

    let domain = state.active_domain();

    // Wire nodes missing a required predicate to the pair's canonical node.
    let mut pending: Vec<(String, String, TargetType)> = Vec::new();
    let mut created: BTreeSet<(String, String)> = BTreeSet::new();
    let demand = |shape: &str,
                      predicate: &str,
                      target: &TargetType,
                      pending: &mut Vec<(String, String, TargetType)>,
                      created: &mut BTreeSet<(String, String)>|
     -> Value {
        let key = (shape.to_string(), predicate.to_string());
        if created.insert(key) {
            pending.push((shape.to_string(), predicate.to_string(), target.clone()));
        }
        canonical_node(shape, predicate, target)
    };

    let mut additions = Instance::new();
    for shape in schema.shapes() {
        let subjects: Vec<Value> = state.tuples(shape).map(|t| t[0].clone()).collect();
        for tc in schema.required_constraints(shape) {
            let predicate = tc.predicate_value();
            for subject in &subjects {
                let satisfied = state
                    .tuples(TRIPLE)
                    .any(|t| t[0] == *subject && t[1] == predicate);
                if !satisfied {
                    let node = demand(shape, &tc.predicate, &tc.target, &mut pending, &mut created);
                    additions
                        .insert(TRIPLE, vec![subject.clone(), predicate.clone(), node])
                        .expect("triple width");
                }
            }
        }
    }

    // Type the canonical nodes and recursively satisfy their requirements.
    while let Some((shape, predicate, target)) = pending.pop() {
        let node = canonical_node(&shape, &predicate, &target);
        if domain.contains(&node) {
            return Err(CompletionError::NameCollision(node));
        }
        additions
            .insert(target.relation_name(), vec![node.clone()])
            .expect("type fact width");
        if let TargetType::Shape(target_shape) = &target {
            for tc in schema.required_constraints(target_shape) {
                let child =
                    demand(target_shape, &tc.predicate, &tc.target, &mut pending, &mut created);
                additions
                    .insert(TRIPLE, vec![node.clone(), tc.predicate_value(), child])
                    .expect("triple width");
            }
        }
    }

    let result = state.union(&additions);
    let compiled = shex2dep::compile(schema);
    if let eval::Satisfaction::Falsified { dependency, .. } =
        eval::satisfies(&result, &compiled, &registry)?
    {
        return Err(CompletionError::NotCompletable { dependency });
    }
    Ok(result)
}
