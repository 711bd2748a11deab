//! Source-to-target rules, their normalization to single-triple heads, and
//! the fully-typed well-formedness check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::constructor::ConstructorRegistry;
use crate::dependency::{Arg, Atom, Dependency, DependencyLabel, Term};
use crate::relational::RelationalSchema;
use crate::shex::{ShexSchema, TargetType, LIT_MARKER, TRIPLE};

/// A raw source-to-target rule: source atoms imply target atoms.
///
/// Target atoms are `Triple(s, p, o)` assertions plus unary type assertions;
/// heads carry no existential quantifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StTgd {
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
}

impl StTgd {
    pub fn new(body: Vec<Atom>, head: Vec<Atom>) -> Self {
        StTgd { body, head }
    }

    /// The rule as a plain dependency with label `st`.
    pub fn to_dependency(&self) -> Dependency {
        Dependency::tgd(self.body.clone(), vec![], self.head.clone(), DependencyLabel::St)
    }
}

/// A normalized rule: one triple atom with both type assertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedStTgd {
    pub body: Vec<Atom>,
    /// Subject term, a constructor application in well-formed rules.
    pub subject: Term,
    pub subject_type: String,
    /// Predicate value, an IRI in well-formed rules.
    pub predicate: crate::value::Value,
    /// Object term: a variable (literal object) or a constructor application.
    pub object: Term,
    pub object_type: TargetType,
}

impl NormalizedStTgd {
    /// The subject constructor symbol, when the subject is an application.
    pub fn subject_symbol(&self) -> Option<&str> {
        match &self.subject {
            Term::App(f, _) => Some(f),
            _ => None,
        }
    }

    pub fn subject_args(&self) -> Option<&[Arg]> {
        match &self.subject {
            Term::App(_, args) => Some(args),
            _ => None,
        }
    }

    /// The rule as a plain dependency with label `st`.
    pub fn to_dependency(&self) -> Dependency {
        Dependency::tgd(
            self.body.clone(),
            vec![],
            vec![
                Atom::new(
                    TRIPLE,
                    vec![
                        self.subject.clone(),
                        Term::Const(self.predicate.clone()),
                        self.object.clone(),
                    ],
                ),
                Atom::new(self.subject_type.clone(), vec![self.subject.clone()]),
                Atom::new(self.object_type.relation_name(), vec![self.object.clone()]),
            ],
            DependencyLabel::St,
        )
    }

    /// Renames every variable by appending `suffix`.
    pub fn rename_vars(&self, suffix: &str) -> NormalizedStTgd {
        let rename = |v: &str| format!("{v}{suffix}");
        NormalizedStTgd {
            body: self.body.iter().map(|a| a.rename_vars(&rename)).collect(),
            subject: self.subject.rename_vars(&rename),
            subject_type: self.subject_type.clone(),
            predicate: self.predicate.clone(),
            object: self.object.rename_vars(&rename),
            object_type: self.object_type.clone(),
        }
    }
}

impl fmt::Display for NormalizedStTgd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{atom}")?;
        }
        write!(
            f,
            " => Triple({}, {}, {}) & {}({}) & {}({})",
            self.subject,
            self.predicate,
            self.object,
            self.subject_type,
            self.subject,
            self.object_type.relation_name(),
            self.object
        )
    }
}

/// Why a rule could not be normalized into the fully-typed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    NoTripleAtom { rule: usize },
    MalformedTriple { rule: usize, atom: Atom },
    MalformedTypeAssertion { rule: usize, atom: Atom },
    PredicateNotIri { rule: usize, atom: Atom },
    NoSubjectType { rule: usize, atom: Atom },
    AmbiguousSubjectType { rule: usize, atom: Atom },
    NoObjectType { rule: usize, atom: Atom },
    AmbiguousObjectType { rule: usize, atom: Atom },
    UnattachedTypeAssertion { rule: usize, atom: Atom },
    HeadVariableNotInBody { rule: usize, variable: String },
}

impl fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (rule, what) = match self {
            NormalizeError::NoTripleAtom { rule } => (rule, "head has no Triple atom".to_string()),
            NormalizeError::MalformedTriple { rule, atom } => {
                (rule, format!("malformed Triple atom {atom}"))
            }
            NormalizeError::MalformedTypeAssertion { rule, atom } => {
                (rule, format!("type assertion {atom} is not unary"))
            }
            NormalizeError::PredicateNotIri { rule, atom } => {
                (rule, format!("predicate of {atom} is not an IRI constant"))
            }
            NormalizeError::NoSubjectType { rule, atom } => {
                (rule, format!("no type assertion on the subject of {atom}"))
            }
            NormalizeError::AmbiguousSubjectType { rule, atom } => {
                (rule, format!("conflicting type assertions on the subject of {atom}"))
            }
            NormalizeError::NoObjectType { rule, atom } => {
                (rule, format!("no type assertion on the object of {atom}"))
            }
            NormalizeError::AmbiguousObjectType { rule, atom } => {
                (rule, format!("conflicting type assertions on the object of {atom}"))
            }
            NormalizeError::UnattachedTypeAssertion { rule, atom } => {
                (rule, format!("type assertion {atom} attaches to no triple"))
            }
            NormalizeError::HeadVariableNotInBody { rule, variable } => {
                (rule, format!("head variable {variable} does not occur in the body"))
            }
        };
        write!(f, "rule {}: not fully typed: {what}", rule + 1)
    }
}

impl std::error::Error for NormalizeError {}

/// Splits each rule into one single-triple rule per head triple, attaching
/// type assertions by syntactic term identity.
pub fn normalize(rules: &[StTgd]) -> Result<Vec<NormalizedStTgd>, NormalizeError> {
    let mut out = Vec::new();
    for (index, rule) in rules.iter().enumerate() {
        let body_vars: BTreeSet<&str> =
            rule.body.iter().flat_map(|a| a.variables()).collect();
        for atom in &rule.head {
            for v in atom.variables() {
                if !body_vars.contains(v) {
                    return Err(NormalizeError::HeadVariableNotInBody {
                        rule: index,
                        variable: v.to_string(),
                    });
                }
            }
        }

        let (triples, assertions): (Vec<&Atom>, Vec<&Atom>) =
            rule.head.iter().partition(|a| a.relation == TRIPLE);
        if triples.is_empty() {
            return Err(NormalizeError::NoTripleAtom { rule: index });
        }
        for assertion in &assertions {
            if assertion.terms.len() != 1 {
                return Err(NormalizeError::MalformedTypeAssertion {
                    rule: index,
                    atom: (*assertion).clone(),
                });
            }
        }

        let mut attached: BTreeSet<usize> = BTreeSet::new();
        let types_of = |term: &Term, attached: &mut BTreeSet<usize>| -> Vec<String> {
            let mut found = Vec::new();
            for (i, assertion) in assertions.iter().enumerate() {
                if &assertion.terms[0] == term {
                    attached.insert(i);
                    if !found.contains(&assertion.relation) {
                        found.push(assertion.relation.clone());
                    }
                }
            }
            found
        };

        for triple in &triples {
            let [subject, predicate, object] = triple.terms.as_slice() else {
                return Err(NormalizeError::MalformedTriple {
                    rule: index,
                    atom: (*triple).clone(),
                });
            };
            let predicate = match predicate {
                Term::Const(v) if v.is_iri() => v.clone(),
                _ => {
                    return Err(NormalizeError::PredicateNotIri {
                        rule: index,
                        atom: (*triple).clone(),
                    })
                }
            };

            let subject_types: Vec<String> = types_of(subject, &mut attached)
                .into_iter()
                .filter(|t| t != LIT_MARKER)
                .collect();
            let subject_type = match subject_types.as_slice() {
                [t] => t.clone(),
                [] => {
                    return Err(NormalizeError::NoSubjectType {
                        rule: index,
                        atom: (*triple).clone(),
                    })
                }
                _ => {
                    return Err(NormalizeError::AmbiguousSubjectType {
                        rule: index,
                        atom: (*triple).clone(),
                    })
                }
            };

            let object_types = types_of(object, &mut attached);
            let object_type = match object_types.as_slice() {
                [t] if t == LIT_MARKER => TargetType::Lit,
                [t] => TargetType::shape(t.clone()),
                [] => {
                    return Err(NormalizeError::NoObjectType {
                        rule: index,
                        atom: (*triple).clone(),
                    })
                }
                _ => {
                    return Err(NormalizeError::AmbiguousObjectType {
                        rule: index,
                        atom: (*triple).clone(),
                    })
                }
            };

            out.push(NormalizedStTgd {
                body: rule.body.clone(),
                subject: subject.clone(),
                subject_type,
                predicate,
                object: object.clone(),
                object_type,
            });
        }

        if let Some(&i) = assertions
            .iter()
            .enumerate()
            .find(|(i, _)| !attached.contains(i))
            .map(|(i, _)| i)
            .as_ref()
        {
            return Err(NormalizeError::UnattachedTypeAssertion {
                rule: index,
                atom: assertions[i].clone(),
            });
        }
    }
    Ok(out)
}

/// One reason the normalized rules are not fully typed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FullyTypedViolation {
    SubjectNotConstructor { rule: usize },
    ConstructorArgNotVariable { rule: usize, term: Term },
    SubjectTypeUndeclared { rule: usize, shape: String },
    ObjectVariableNotLit { rule: usize },
    ObjectConstructorNotShape { rule: usize },
    ObjectNotVariableOrConstructor { rule: usize },
    ObjectTypeUndeclared { rule: usize, shape: String },
    /// No constraint on this predicate in the subject shape, or a
    /// constraint with a different target type.
    PredicateNotInShape { rule: usize, shape: String, predicate: String },
    TargetTypeMismatch { rule: usize, expected: TargetType, got: TargetType },
    /// A constructor used with two different types across the rules.
    ConstructorTypeClash { symbol: String, types: Vec<String> },
    UndeclaredConstructor { rule: usize, symbol: String },
    ConstructorArityMismatch { rule: usize, symbol: String, declared: usize, got: usize },
}

impl fmt::Display for FullyTypedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FullyTypedViolation::SubjectNotConstructor { rule } => {
                write!(f, "rule {}: subject is not a constructor application", rule + 1)
            }
            FullyTypedViolation::ConstructorArgNotVariable { rule, term } => {
                write!(f, "rule {}: constructor argument in {term} is not a variable", rule + 1)
            }
            FullyTypedViolation::SubjectTypeUndeclared { rule, shape } => {
                write!(f, "rule {}: subject type {shape} is not declared", rule + 1)
            }
            FullyTypedViolation::ObjectVariableNotLit { rule } => {
                write!(f, "rule {}: variable object must be typed Lit", rule + 1)
            }
            FullyTypedViolation::ObjectConstructorNotShape { rule } => {
                write!(f, "rule {}: constructed object must be typed with a shape", rule + 1)
            }
            FullyTypedViolation::ObjectNotVariableOrConstructor { rule } => {
                write!(f, "rule {}: object is neither a variable nor a constructor application", rule + 1)
            }
            FullyTypedViolation::ObjectTypeUndeclared { rule, shape } => {
                write!(f, "rule {}: object type {shape} is not declared", rule + 1)
            }
            FullyTypedViolation::PredicateNotInShape { rule, shape, predicate } => {
                write!(f, "rule {}: shape {shape} has no constraint on <{predicate}>", rule + 1)
            }
            FullyTypedViolation::TargetTypeMismatch { rule, expected, got } => {
                write!(f, "rule {}: schema expects object type {expected}, rule uses {got}", rule + 1)
            }
            FullyTypedViolation::ConstructorTypeClash { symbol, types } => {
                write!(f, "constructor {symbol} used with several types: {}", types.join(", "))
            }
            FullyTypedViolation::UndeclaredConstructor { rule, symbol } => {
                write!(f, "rule {}: constructor {symbol} is not declared", rule + 1)
            }
            FullyTypedViolation::ConstructorArityMismatch { rule, symbol, declared, got } => {
                write!(
                    f,
                    "rule {}: constructor {symbol} declared with arity {declared}, used with {got}",
                    rule + 1
                )
            }
        }
    }
}

/// Outcome of the fully-typed check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FullyTypedReport {
    pub violations: Vec<FullyTypedViolation>,
}

impl FullyTypedReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_app(
    rule: usize,
    term: &Term,
    registry: &ConstructorRegistry,
    violations: &mut Vec<FullyTypedViolation>,
) {
    let Term::App(symbol, args) = term else { return };
    for arg in args {
        if let Arg::Const(_) = arg {
            violations.push(FullyTypedViolation::ConstructorArgNotVariable {
                rule,
                term: term.clone(),
            });
            break;
        }
    }
    match registry.arity(symbol) {
        None => violations.push(FullyTypedViolation::UndeclaredConstructor {
            rule,
            symbol: symbol.clone(),
        }),
        Some(declared) if declared != args.len() => {
            violations.push(FullyTypedViolation::ConstructorArityMismatch {
                rule,
                symbol: symbol.clone(),
                declared,
                got: args.len(),
            })
        }
        Some(_) => {}
    }
}

/// Verifies the fully-typed conditions: constructed and typed subjects,
/// the object case split, consistency with the target schema, and a unique
/// type per constructor.
pub fn check_fully_typed(
    rules: &[NormalizedStTgd],
    schema: &ShexSchema,
    registry: &ConstructorRegistry,
) -> FullyTypedReport {
    let mut violations = Vec::new();
    let mut constructor_types: BTreeMap<&str, Vec<String>> = BTreeMap::new();

    for (rule, r) in rules.iter().enumerate() {
        match &r.subject {
            Term::App(symbol, _) => {
                check_app(rule, &r.subject, registry, &mut violations);
                let uses = constructor_types.entry(symbol).or_default();
                if !uses.contains(&r.subject_type) {
                    uses.push(r.subject_type.clone());
                }
            }
            _ => violations.push(FullyTypedViolation::SubjectNotConstructor { rule }),
        }
        if !schema.has_shape(&r.subject_type) {
            violations.push(FullyTypedViolation::SubjectTypeUndeclared {
                rule,
                shape: r.subject_type.clone(),
            });
        }

        match (&r.object, &r.object_type) {
            (Term::Var(_), TargetType::Lit) => {}
            (Term::Var(_), TargetType::Shape(_)) => {
                violations.push(FullyTypedViolation::ObjectVariableNotLit { rule })
            }
            (Term::App(_, _), TargetType::Lit) => {
                violations.push(FullyTypedViolation::ObjectConstructorNotShape { rule })
            }
            (Term::App(symbol, _), TargetType::Shape(shape)) => {
                check_app(rule, &r.object, registry, &mut violations);
                let uses = constructor_types.entry(symbol).or_default();
                if !uses.contains(shape) {
                    uses.push(shape.clone());
                }
                if !schema.has_shape(shape) {
                    violations.push(FullyTypedViolation::ObjectTypeUndeclared {
                        rule,
                        shape: shape.clone(),
                    });
                }
            }
            (Term::Const(_), _) => {
                violations.push(FullyTypedViolation::ObjectNotVariableOrConstructor { rule })
            }
        }

        if schema.has_shape(&r.subject_type) {
            match schema.constraint(&r.subject_type, r.predicate.text()) {
                None => violations.push(FullyTypedViolation::PredicateNotInShape {
                    rule,
                    shape: r.subject_type.clone(),
                    predicate: r.predicate.text().to_string(),
                }),
                Some(tc) if tc.target != r.object_type => {
                    violations.push(FullyTypedViolation::TargetTypeMismatch {
                        rule,
                        expected: tc.target.clone(),
                        got: r.object_type.clone(),
                    })
                }
                Some(_) => {}
            }
        }
    }

    for (symbol, types) in constructor_types {
        if types.len() > 1 {
            violations.push(FullyTypedViolation::ConstructorTypeClash {
                symbol: symbol.to_string(),
                types,
            });
        }
    }

    FullyTypedReport { violations }
}

/// A data exchange setting: source schema, target schema, normalized rules,
/// and interpreted constructors.
#[derive(Debug, Clone)]
pub struct DataExchangeSetting {
    pub source: RelationalSchema,
    pub target: ShexSchema,
    pub rules: Vec<NormalizedStTgd>,
    pub registry: ConstructorRegistry,
}

impl DataExchangeSetting {
    pub fn st_dependencies(&self) -> Vec<Dependency> {
        self.rules.iter().map(|r| r.to_dependency()).collect()
    }

    pub fn target_dependencies(&self) -> Vec<Dependency> {
        crate::shex2dep::compile(&self.target)
    }

    /// The st rules followed by the compiled schema dependencies.
    pub fn all_dependencies(&self) -> Vec<Dependency> {
        let mut deps = self.st_dependencies();
        deps.extend(self.target_dependencies());
        deps
    }

    pub fn check_fully_typed(&self) -> FullyTypedReport {
        check_fully_typed(&self.rules, &self.target, &self.registry)
    }
}
