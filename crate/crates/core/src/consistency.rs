//! Key-coveredness: the decidable consistency criterion for fully-typed
//! settings.
//!
//! Two rules are contentious when they construct subjects with the same
//! constructor and assert the same predicate under an at-most-one
//! multiplicity. Such a pair is harmless exactly when the source fds force
//! their objects to coincide whenever the subject arguments do. That
//! implication is decided by freezing both bodies into a canonical tableau,
//! chasing it with the fds, and comparing the frozen object terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::dependency::{Arg, Atom, Term};
use crate::mapping::{DataExchangeSetting, NormalizedStTgd};
use crate::relational::{Instance, RelationalSchema};
use crate::shex::{Multiplicity, ShexSchema, TargetType};
use crate::value::Value;

/// A pair of rule indices (possibly equal) competing for the same
/// subject/predicate slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentiousPair {
    pub first: usize,
    pub second: usize,
    pub constructor: String,
    pub predicate: Value,
    pub subject_type: String,
    pub object_type: TargetType,
    pub mult: Multiplicity,
}

impl fmt::Display for ContentiousPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rules {} and {} share {}(..) with predicate {} ({}::{}^{})",
            self.first + 1,
            self.second + 1,
            self.constructor,
            self.predicate,
            self.subject_type,
            self.object_type,
            self.mult
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyError {
    SubjectNotConstructor { rule: usize },
    ConstructorArgNotVariable { rule: usize },
    ObjectNotVariableOrConstructor { rule: usize },
    /// Contentious rules whose objects use different constructors cannot be
    /// cast as a single view fd; fully-typedness normally rules this out.
    ObjectSymbolMismatch { first: String, second: String },
}

impl fmt::Display for ConsistencyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConsistencyError::SubjectNotConstructor { rule } => {
                write!(f, "rule {}: subject is not a constructor application", rule + 1)
            }
            ConsistencyError::ConstructorArgNotVariable { rule } => {
                write!(f, "rule {}: constructor arguments must be variables", rule + 1)
            }
            ConsistencyError::ObjectNotVariableOrConstructor { rule } => {
                write!(f, "rule {}: object is neither variable nor constructor", rule + 1)
            }
            ConsistencyError::ObjectSymbolMismatch { first, second } => {
                write!(f, "object constructors differ across the pair: {first} vs {second}")
            }
        }
    }
}

impl std::error::Error for ConsistencyError {}

/// All contentious pairs, self-pairs included, ordered by rule index.
pub fn contentious_pairs(
    rules: &[NormalizedStTgd],
    schema: &ShexSchema,
) -> Vec<ContentiousPair> {
    let mut pairs = Vec::new();
    for (i, a) in rules.iter().enumerate() {
        for (j, b) in rules.iter().enumerate().skip(i) {
            let (Some(fa), Some(fb)) = (a.subject_symbol(), b.subject_symbol()) else {
                continue;
            };
            if fa != fb || a.predicate != b.predicate {
                continue;
            }
            let Some(tc) = schema.constraint(&a.subject_type, a.predicate.text()) else {
                continue;
            };
            if tc.mult.upper() != Some(1) {
                continue;
            }
            pairs.push(ContentiousPair {
                first: i,
                second: j,
                constructor: fa.to_string(),
                predicate: a.predicate.clone(),
                subject_type: a.subject_type.clone(),
                object_type: tc.target.clone(),
                mult: tc.mult,
            });
        }
    }
    pairs
}

/// Disjoint-set forest over variable names; the lexicographically least
/// member represents each class.
#[derive(Debug, Default)]
struct VarUnion {
    parent: BTreeMap<String, String>,
}

impl VarUnion {
    fn find(&self, v: &str) -> String {
        let mut cur = v.to_string();
        while let Some(p) = self.parent.get(&cur) {
            if *p == cur {
                break;
            }
            cur = p.clone();
        }
        cur
    }

    fn union(&mut self, a: &str, b: &str) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(drop, keep);
    }
}

/// Both rules renamed apart with their subject-argument vectors identified.
#[derive(Debug, Clone)]
struct UnifiedPair {
    body1: Vec<Atom>,
    body2: Vec<Atom>,
    /// Canonical subject argument variables (repeats possible).
    subject_vars: Vec<String>,
    object1: Term,
    object2: Term,
}

fn arg_vars(rule: usize, term: &Term) -> Result<Vec<String>, ConsistencyError> {
    match term {
        Term::App(_, args) => args
            .iter()
            .map(|a| match a {
                Arg::Var(v) => Ok(v.clone()),
                Arg::Const(_) => Err(ConsistencyError::ConstructorArgNotVariable { rule }),
            })
            .collect(),
        _ => Err(ConsistencyError::SubjectNotConstructor { rule }),
    }
}

fn unify_pair(
    pair: &ContentiousPair,
    rules: &[NormalizedStTgd],
) -> Result<UnifiedPair, ConsistencyError> {
    let r1 = rules[pair.first].rename_vars("'1");
    let r2 = rules[pair.second].rename_vars("'2");
    let a1 = arg_vars(pair.first, &r1.subject)?;
    let a2 = arg_vars(pair.second, &r2.subject)?;
    let mut union = VarUnion::default();
    for (x1, x2) in a1.iter().zip(a2.iter()) {
        union.union(x1, x2);
    }
    let rep = |v: &str| union.find(v);
    Ok(UnifiedPair {
        body1: r1.body.iter().map(|a| a.rename_vars(&rep)).collect(),
        body2: r2.body.iter().map(|a| a.rename_vars(&rep)).collect(),
        subject_vars: a1.iter().map(|v| rep(v)).collect(),
        object1: r1.object.rename_vars(&rep),
        object2: r2.object.rename_vars(&rep),
    })
}

/// Object argument vector: the variable itself for a literal object, the
/// constructor arguments otherwise.
fn object_vars(rule: usize, term: &Term) -> Result<Vec<String>, ConsistencyError> {
    match term {
        Term::Var(v) => Ok(vec![v.clone()]),
        Term::App(_, _) => arg_vars(rule, term),
        Term::Const(_) => Err(ConsistencyError::ObjectNotVariableOrConstructor { rule }),
    }
}

/// A conjunctive query with distinguished output variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjunctiveQuery {
    pub head_vars: Vec<String>,
    pub body: Vec<Atom>,
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) :- ", self.head_vars.join(", "))?;
        for (i, atom) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

/// The view (a union of two conjunctive queries) and the fd whose
/// propagation decides functional overlap: key positions are the shared
/// subject arguments, dependent positions the object arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewFd {
    pub query1: ConjunctiveQuery,
    pub query2: ConjunctiveQuery,
    /// Number of subject-argument columns.
    pub key_width: usize,
    /// Number of object-argument columns.
    pub dep_width: usize,
}

/// Builds the propagation view for a contentious pair.
pub fn build_view_fd(
    pair: &ContentiousPair,
    rules: &[NormalizedStTgd],
) -> Result<ViewFd, ConsistencyError> {
    if let (Term::App(g1, _), Term::App(g2, _)) =
        (&rules[pair.first].object, &rules[pair.second].object)
    {
        if g1 != g2 {
            return Err(ConsistencyError::ObjectSymbolMismatch {
                first: g1.clone(),
                second: g2.clone(),
            });
        }
    }
    let unified = unify_pair(pair, rules)?;
    let z1 = object_vars(pair.first, &unified.object1)?;
    let z2 = object_vars(pair.second, &unified.object2)?;
    let mut head1 = unified.subject_vars.clone();
    head1.extend(z1.iter().cloned());
    let mut head2 = unified.subject_vars.clone();
    head2.extend(z2.iter().cloned());
    Ok(ViewFd {
        query1: ConjunctiveQuery { head_vars: head1, body: unified.body1 },
        query2: ConjunctiveQuery { head_vars: head2, body: unified.body2 },
        key_width: unified.subject_vars.len(),
        dep_width: z1.len(),
    })
}

/// A frozen tableau: the two bodies instantiated with labeled constants.
#[derive(Debug, Clone)]
struct Tableau {
    instance: Instance,
    /// Canonical variable -> current constant.
    assignment: BTreeMap<String, Value>,
    /// Constants invented by freezing; everything else is rigid.
    frozen: BTreeSet<Value>,
}

fn freeze(unified: &UnifiedPair) -> Tableau {
    let mut vars: BTreeSet<String> = BTreeSet::new();
    let mut rigid: BTreeSet<String> = BTreeSet::new();
    for atom in unified.body1.iter().chain(unified.body2.iter()) {
        for term in &atom.terms {
            match term {
                Term::Var(v) => {
                    vars.insert(v.clone());
                }
                Term::Const(c) => {
                    rigid.insert(c.text().to_string());
                }
                Term::App(_, _) => {}
            }
        }
    }
    let mut assignment = BTreeMap::new();
    let mut frozen = BTreeSet::new();
    let mut counter = 0usize;
    for v in &vars {
        let constant = loop {
            counter += 1;
            let text = format!("c{counter}");
            if !rigid.contains(&text) {
                break Value::lit(text);
            }
        };
        frozen.insert(constant.clone());
        assignment.insert(v.clone(), constant);
    }
    let mut instance = Instance::new();
    for atom in unified.body1.iter().chain(unified.body2.iter()) {
        let tuple: Vec<Value> = atom
            .terms
            .iter()
            .map(|t| match t {
                Term::Var(v) => assignment[v].clone(),
                Term::Const(c) => c.clone(),
                Term::App(_, _) => unreachable!("bodies carry no function terms"),
            })
            .collect();
        instance.insert(atom.relation.clone(), tuple).expect("frozen atoms are width-consistent");
    }
    Tableau { instance, assignment, frozen }
}

enum TableauChase {
    /// Reached an fd fixpoint.
    Fixpoint(Tableau),
    /// Two rigid constants were forced equal: the premise is unsatisfiable
    /// over valid instances.
    Contradiction,
}

/// Chases the tableau with the source fds, merging labeled constants.
/// Terminates because every step removes one constant.
fn chase_tableau(mut tableau: Tableau, schema: &RelationalSchema) -> TableauChase {
    'restart: loop {
        for fd in &schema.fds {
            let tuples: Vec<Vec<Value>> =
                tableau.instance.tuples(&fd.relation).cloned().collect();
            for (i, a) in tuples.iter().enumerate() {
                for b in tuples.iter().skip(i + 1) {
                    if !fd.lhs.iter().all(|&p| a[p - 1] == b[p - 1]) {
                        continue;
                    }
                    for &p in &fd.rhs {
                        let (x, y) = (&a[p - 1], &b[p - 1]);
                        if x == y {
                            continue;
                        }
                        let x_frozen = tableau.frozen.contains(x);
                        let y_frozen = tableau.frozen.contains(y);
                        let (keep, drop) = match (x_frozen, y_frozen) {
                            (false, false) => return TableauChase::Contradiction,
                            (true, false) => (y.clone(), x.clone()),
                            (false, true) => (x.clone(), y.clone()),
                            (true, true) => {
                                if x < y {
                                    (x.clone(), y.clone())
                                } else {
                                    (y.clone(), x.clone())
                                }
                            }
                        };
                        tableau.instance = tableau.instance.replace_value(&drop, &keep);
                        tableau.frozen.remove(&drop);
                        for value in tableau.assignment.values_mut() {
                            if *value == drop {
                                *value = keep.clone();
                            }
                        }
                        continue 'restart;
                    }
                }
            }
        }
        return TableauChase::Fixpoint(tableau);
    }
}

fn frozen_object(term: &Term, assignment: &BTreeMap<String, Value>) -> Vec<Value> {
    match term {
        Term::Var(v) => vec![assignment[v].clone()],
        Term::App(_, args) => args
            .iter()
            .map(|a| match a {
                Arg::Var(v) => assignment[v].clone(),
                Arg::Const(c) => c.clone(),
            })
            .collect(),
        Term::Const(c) => vec![c.clone()],
    }
}

/// Outcome of the overlap test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OverlapVerdict {
    Overlapping,
    /// The chased tableau realizes a valid source instance on which the two
    /// rules produce distinct objects for the same subject.
    NotOverlapping { counterexample: Instance },
}

impl OverlapVerdict {
    pub fn overlapping(&self) -> bool {
        matches!(self, OverlapVerdict::Overlapping)
    }
}

/// Decides whether the source fds force the pair's objects to coincide on
/// every valid instance.
///
/// Freezes both bodies (subject arguments identified) into a tableau of
/// labeled constants, chases it with the fds to a fixpoint, and compares the
/// frozen object terms. The chased tableau is the most general valid
/// instance satisfying the premise, so equality there is equivalent to the
/// universally quantified implication. Objects built by different
/// constructors can never coincide: ranges are disjoint.
pub fn functionally_overlapping(
    pair: &ContentiousPair,
    rules: &[NormalizedStTgd],
    schema: &RelationalSchema,
) -> Result<OverlapVerdict, ConsistencyError> {
    let unified = unify_pair(pair, rules)?;
    object_vars(pair.first, &unified.object1)?;
    object_vars(pair.second, &unified.object2)?;
    let symbol_mismatch = matches!(
        (&unified.object1, &unified.object2),
        (Term::App(g1, _), Term::App(g2, _)) if g1 != g2
    );

    let tableau = freeze(&unified);
    // Objects over subject arguments only are already identified.
    if !symbol_mismatch
        && frozen_object(&unified.object1, &tableau.assignment)
            == frozen_object(&unified.object2, &tableau.assignment)
    {
        return Ok(OverlapVerdict::Overlapping);
    }
    match chase_tableau(tableau, schema) {
        TableauChase::Contradiction => Ok(OverlapVerdict::Overlapping),
        TableauChase::Fixpoint(tableau) => {
            let o1 = frozen_object(&unified.object1, &tableau.assignment);
            let o2 = frozen_object(&unified.object2, &tableau.assignment);
            if !symbol_mismatch && o1 == o2 {
                Ok(OverlapVerdict::Overlapping)
            } else {
                Ok(OverlapVerdict::NotOverlapping { counterexample: tableau.instance })
            }
        }
    }
}

/// The key-coveredness verdict with the first failing pair, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyCoverage {
    pub covered: bool,
    pub witness: Option<(ContentiousPair, Instance)>,
}

/// A setting is key-covered when every contentious pair is functionally
/// overlapping.
pub fn is_key_covered(setting: &DataExchangeSetting) -> Result<KeyCoverage, ConsistencyError> {
    for pair in contentious_pairs(&setting.rules, &setting.target) {
        match functionally_overlapping(&pair, &setting.rules, &setting.source)? {
            OverlapVerdict::Overlapping => {}
            OverlapVerdict::NotOverlapping { counterexample } => {
                return Ok(KeyCoverage { covered: false, witness: Some((pair, counterexample)) })
            }
        }
    }
    Ok(KeyCoverage { covered: true, witness: None })
}
