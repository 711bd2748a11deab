//! Entailment of dependencies over instances.
//!
//! Bodies are matched by a deterministic depth-first search over sorted
//! facts; heads are evaluated through the term mapping that resolves
//! function applications via the constructor registry. Existential witnesses
//! are searched over the facts of the instance itself, which covers the
//! active domain since heads are relational atoms over the same instance.

use std::collections::BTreeMap;
use std::fmt;

use crate::constructor::{ConstructorError, ConstructorRegistry};
use crate::dependency::{Arg, Atom, Dependency, Head, Term};
use crate::relational::Instance;
use crate::value::Value;

/// A variable assignment.
pub type Binding = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    /// Function terms may not occur in bodies.
    FunctionInBody(String),
    UnboundVariable(String),
    Constructor(ConstructorError),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::FunctionInBody(atom) => {
                write!(f, "function term in body atom {atom}")
            }
            EvalError::UnboundVariable(v) => write!(f, "unbound variable {v}"),
            EvalError::Constructor(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for EvalError {}

impl From<ConstructorError> for EvalError {
    fn from(e: ConstructorError) -> Self {
        EvalError::Constructor(e)
    }
}

/// The term mapping: variables through the binding, constants to
/// themselves, applications through the registry.
pub fn apply_term(
    binding: &Binding,
    term: &Term,
    registry: &ConstructorRegistry,
) -> Result<Value, EvalError> {
    match term {
        Term::Var(v) => binding
            .get(v)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        Term::Const(c) => Ok(c.clone()),
        Term::App(symbol, args) => {
            let mut resolved = Vec::with_capacity(args.len());
            for arg in args {
                resolved.push(match arg {
                    Arg::Var(v) => binding
                        .get(v)
                        .cloned()
                        .ok_or_else(|| EvalError::UnboundVariable(v.clone()))?,
                    Arg::Const(c) => c.clone(),
                });
            }
            Ok(registry.interpret(symbol, &resolved)?)
        }
    }
}

fn match_atom(inst: &Instance, atom: &Atom, base: &Binding) -> Result<Vec<Binding>, EvalError> {
    for term in &atom.terms {
        if matches!(term, Term::App(_, _)) {
            return Err(EvalError::FunctionInBody(atom.to_string()));
        }
    }
    let mut out = Vec::new();
    'facts: for tuple in inst.tuples(&atom.relation) {
        if tuple.len() != atom.terms.len() {
            continue;
        }
        let mut binding = base.clone();
        for (term, value) in atom.terms.iter().zip(tuple.iter()) {
            match term {
                Term::Const(c) => {
                    if c != value {
                        continue 'facts;
                    }
                }
                Term::Var(v) => match binding.get(v) {
                    Some(bound) if bound != value => continue 'facts,
                    Some(_) => {}
                    None => {
                        binding.insert(v.clone(), value.clone());
                    }
                },
                Term::App(_, _) => unreachable!("checked above"),
            }
        }
        out.push(binding);
    }
    Ok(out)
}

/// All homomorphisms from the conjunction `atoms` into `inst`, in
/// deterministic order (atom order, then sorted-fact order).
pub fn body_matches(inst: &Instance, atoms: &[Atom]) -> Result<Vec<Binding>, EvalError> {
    let mut frontier = vec![Binding::new()];
    for atom in atoms {
        let mut next = Vec::new();
        for binding in &frontier {
            next.extend(match_atom(inst, atom, binding)?);
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(frontier)
}

/// Grounds a head atom under `binding`, leaving existential variables open.
fn ground_head_atom(
    atom: &Atom,
    binding: &Binding,
    registry: &ConstructorRegistry,
) -> Result<Atom, EvalError> {
    let mut terms = Vec::with_capacity(atom.terms.len());
    for term in &atom.terms {
        let grounded = match term {
            Term::Var(v) => match binding.get(v) {
                Some(value) => Term::Const(value.clone()),
                None => Term::Var(v.clone()),
            },
            Term::Const(_) => term.clone(),
            Term::App(_, _) => Term::Const(apply_term(binding, term, registry)?),
        };
        terms.push(grounded);
    }
    Ok(Atom::new(atom.relation.clone(), terms))
}

/// Whether a tgd head holds under `binding`, searching existential
/// witnesses over the instance.
pub fn head_holds(
    inst: &Instance,
    atoms: &[Atom],
    binding: &Binding,
    registry: &ConstructorRegistry,
) -> Result<bool, EvalError> {
    let mut grounded = Vec::with_capacity(atoms.len());
    for atom in atoms {
        grounded.push(ground_head_atom(atom, binding, registry)?);
    }
    Ok(!body_matches(inst, &grounded)?.is_empty())
}

/// Instantiates head atoms to concrete facts; every variable must be bound.
pub fn head_facts(
    atoms: &[Atom],
    binding: &Binding,
    registry: &ConstructorRegistry,
) -> Result<Vec<(String, Vec<Value>)>, EvalError> {
    let mut facts = Vec::with_capacity(atoms.len());
    for atom in atoms {
        let mut tuple = Vec::with_capacity(atom.terms.len());
        for term in &atom.terms {
            tuple.push(apply_term(binding, term, registry)?);
        }
        facts.push((atom.relation.clone(), tuple));
    }
    Ok(facts)
}

/// The result of checking a dependency set against an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfaction {
    Holds,
    Falsified { dependency: Dependency, witness: Binding },
}

impl Satisfaction {
    pub fn holds(&self) -> bool {
        matches!(self, Satisfaction::Holds)
    }
}

/// Triggers of one dependency: body matches under which the head fails.
pub fn falsifying_bindings(
    inst: &Instance,
    dep: &Dependency,
    registry: &ConstructorRegistry,
) -> Result<Vec<Binding>, EvalError> {
    let mut out = Vec::new();
    for binding in body_matches(inst, &dep.body)? {
        match &dep.head {
            Head::Equal(x, y) => {
                let vx = binding
                    .get(x)
                    .ok_or_else(|| EvalError::UnboundVariable(x.clone()))?;
                let vy = binding
                    .get(y)
                    .ok_or_else(|| EvalError::UnboundVariable(y.clone()))?;
                if vx != vy {
                    out.push(binding);
                }
            }
            Head::Atoms { atoms, .. } => {
                if !head_holds(inst, atoms, &binding, registry)? {
                    out.push(binding);
                }
            }
        }
    }
    Ok(out)
}

/// First-order entailment of a dependency set, reporting the first
/// falsified dependency with its witness homomorphism.
pub fn satisfies(
    inst: &Instance,
    deps: &[Dependency],
    registry: &ConstructorRegistry,
) -> Result<Satisfaction, EvalError> {
    for dep in deps {
        let falsifying = falsifying_bindings(inst, dep, registry)?;
        if let Some(witness) = falsifying.into_iter().next() {
            return Ok(Satisfaction::Falsified { dependency: dep.clone(), witness });
        }
    }
    Ok(Satisfaction::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependency::DependencyLabel;

    fn iri(s: &str) -> Value {
        Value::iri(s)
    }

    fn mult_ge1(shape: &str, p: &str) -> Dependency {
        Dependency::tgd(
            vec![Atom::new(shape, vec![Term::var("x")])],
            vec!["y".into()],
            vec![Atom::new(
                "Triple",
                vec![Term::var("x"), Term::constant(iri(p)), Term::var("y")],
            )],
            DependencyLabel::MultGe1,
        )
    }

    fn mult_le1(shape: &str, p: &str) -> Dependency {
        Dependency::egd(
            vec![
                Atom::new(shape, vec![Term::var("x")]),
                Atom::new(
                    "Triple",
                    vec![Term::var("x"), Term::constant(iri(p)), Term::var("y")],
                ),
                Atom::new(
                    "Triple",
                    vec![Term::var("x"), Term::constant(iri(p)), Term::var("z")],
                ),
            ],
            "y",
            "z",
            DependencyLabel::MultLe1,
        )
    }

    #[test]
    fn upper_bound_violation_reports_first_witness() {
        let mut inst = Instance::new();
        inst.insert("T", vec![iri("urn:a")]).unwrap();
        inst.insert("Triple", vec![iri("urn:a"), iri("urn:p"), iri("urn:b")]).unwrap();
        inst.insert("Triple", vec![iri("urn:a"), iri("urn:p"), iri("urn:c")]).unwrap();
        let reg = ConstructorRegistry::new();
        let result = satisfies(&inst, &[mult_le1("T", "urn:p")], &reg).unwrap();
        match result {
            Satisfaction::Falsified { witness, .. } => {
                assert_eq!(witness.get("y"), Some(&iri("urn:b")));
                assert_eq!(witness.get("z"), Some(&iri("urn:c")));
            }
            Satisfaction::Holds => panic!("expected violation"),
        }
    }

    #[test]
    fn missing_required_successor_falsifies() {
        let mut inst = Instance::new();
        inst.insert("T", vec![iri("urn:a")]).unwrap();
        let reg = ConstructorRegistry::new();
        let result = satisfies(&inst, &[mult_ge1("T", "urn:p")], &reg).unwrap();
        assert!(!result.holds());
    }

    #[test]
    fn existing_successor_satisfies_existential() {
        let mut inst = Instance::new();
        inst.insert("T", vec![iri("urn:a")]).unwrap();
        inst.insert("Triple", vec![iri("urn:a"), iri("urn:p"), Value::lit("b")]).unwrap();
        let reg = ConstructorRegistry::new();
        assert!(satisfies(&inst, &[mult_ge1("T", "urn:p")], &reg).unwrap().holds());
    }

    #[test]
    fn body_matching_respects_repeated_variables() {
        let mut inst = Instance::new();
        inst.insert("R", vec![Value::lit("a"), Value::lit("a")]).unwrap();
        inst.insert("R", vec![Value::lit("a"), Value::lit("b")]).unwrap();
        let atoms = [Atom::new("R", vec![Term::var("x"), Term::var("x")])];
        let matches = body_matches(&inst, &atoms).unwrap();
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].get("x"), Some(&Value::lit("a")));
    }

    #[test]
    fn function_terms_rejected_in_bodies() {
        let mut inst = Instance::new();
        inst.insert("R", vec![Value::lit("a")]).unwrap();
        let atoms = [Atom::new("R", vec![Term::app("f", vec![Arg::Var("x".into())])])];
        assert!(matches!(
            body_matches(&inst, &atoms),
            Err(EvalError::FunctionInBody(_))
        ));
    }

    #[test]
    fn apply_term_covers_all_three_cases() {
        let mut reg = ConstructorRegistry::new();
        reg.declare("bug2iri", 1).unwrap();
        let mut binding = Binding::new();
        binding.insert("b".into(), Value::lit("1"));
        let v = apply_term(&binding, &Term::var("b"), &reg).unwrap();
        assert_eq!(v, Value::lit("1"));
        let c = apply_term(&binding, &Term::constant(Value::lit("Boom!")), &reg).unwrap();
        assert_eq!(c, Value::lit("Boom!"));
        let app = Term::app("bug2iri", vec![Arg::Var("b".into())]);
        let iri_val = apply_term(&binding, &app, &reg).unwrap();
        assert_eq!(iri_val, reg.interpret("bug2iri", &[Value::lit("1")]).unwrap());
        assert!(matches!(
            apply_term(&Binding::new(), &Term::var("missing"), &reg),
            Err(EvalError::UnboundVariable(_))
        ));
    }

    #[test]
    fn solution_graph_satisfies_compiled_schema() {
        let inst = crate::typed_graph::rdf_to_inst(&crate::fixtures::fig2_graph());
        let deps = crate::shex2dep::compile(&crate::fixtures::example1_schema());
        let reg = ConstructorRegistry::new();
        assert!(satisfies(&inst, &deps, &reg).unwrap().holds());
    }

    #[test]
    fn unknown_symbol_is_a_configuration_error() {
        let reg = ConstructorRegistry::new();
        let mut binding = Binding::new();
        binding.insert("x".into(), Value::lit("1"));
        let app = Term::app("ghost", vec![Arg::Var("x".into())]);
        assert!(matches!(
            apply_term(&binding, &app, &reg),
            Err(EvalError::Constructor(ConstructorError::UnknownSymbol(_)))
        ));
    }
}
