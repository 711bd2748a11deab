//! Relational schemas, instances, and functional dependency checking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::value::Value;

/// A functional dependency `R: X -> Y` over 1-based attribute positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FunctionalDependency {
    pub relation: String,
    pub lhs: BTreeSet<usize>,
    pub rhs: BTreeSet<usize>,
}

impl FunctionalDependency {
    pub fn new(
        relation: impl Into<String>,
        lhs: impl IntoIterator<Item = usize>,
        rhs: impl IntoIterator<Item = usize>,
    ) -> Self {
        FunctionalDependency {
            relation: relation.into(),
            lhs: lhs.into_iter().collect(),
            rhs: rhs.into_iter().collect(),
        }
    }
}

impl fmt::Display for FunctionalDependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_set = |s: &BTreeSet<usize>| {
            s.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "{}: {{{}}} -> {{{}}}",
            self.relation,
            fmt_set(&self.lhs),
            fmt_set(&self.rhs)
        )
    }
}

/// A relation declaration: arity plus optional attribute names used by the
/// surface syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDecl {
    pub arity: usize,
    pub attributes: Option<Vec<String>>,
}

/// A relational schema: relation symbols with arities and a set of fds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationalSchema {
    pub relations: BTreeMap<String, RelationDecl>,
    pub fds: BTreeSet<FunctionalDependency>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaError {
    DuplicateRelation(String),
    UnknownRelation(String),
    BadFdPosition {
        fd: String,
        position: usize,
        arity: usize,
    },
    EmptyFdSide(String),
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaError::DuplicateRelation(r) => write!(f, "relation {r} declared twice"),
            SchemaError::UnknownRelation(r) => write!(f, "unknown relation {r}"),
            SchemaError::BadFdPosition { fd, position, arity } => {
                write!(f, "fd {fd} uses position {position} beyond arity {arity}")
            }
            SchemaError::EmptyFdSide(fd) => write!(f, "fd {fd} has an empty side"),
        }
    }
}

impl std::error::Error for SchemaError {}

impl RelationalSchema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: impl Into<String>, arity: usize) -> Result<(), SchemaError> {
        self.declare_named(name, arity, None)
    }

    pub fn declare_named(
        &mut self,
        name: impl Into<String>,
        arity: usize,
        attributes: Option<Vec<String>>,
    ) -> Result<(), SchemaError> {
        let name = name.into();
        if self.relations.contains_key(&name) {
            return Err(SchemaError::DuplicateRelation(name));
        }
        self.relations.insert(name, RelationDecl { arity, attributes });
        Ok(())
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.relations.get(relation).map(|d| d.arity)
    }

    pub fn add_fd(&mut self, fd: FunctionalDependency) -> Result<(), SchemaError> {
        let decl = self
            .relations
            .get(&fd.relation)
            .ok_or_else(|| SchemaError::UnknownRelation(fd.relation.clone()))?;
        if fd.lhs.is_empty() || fd.rhs.is_empty() {
            return Err(SchemaError::EmptyFdSide(fd.to_string()));
        }
        for &p in fd.lhs.iter().chain(fd.rhs.iter()) {
            if p == 0 || p > decl.arity {
                return Err(SchemaError::BadFdPosition {
                    fd: fd.to_string(),
                    position: p,
                    arity: decl.arity,
                });
            }
        }
        self.fds.insert(fd);
        Ok(())
    }

    pub fn fds_of(&self, relation: &str) -> impl Iterator<Item = &FunctionalDependency> {
        let relation = relation.to_string();
        self.fds.iter().filter(move |fd| fd.relation == relation)
    }
}

/// A set of facts keyed by relation symbol.
///
/// Tuples of one relation must share a width; the width is fixed by the
/// first inserted tuple.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    facts: BTreeMap<String, BTreeSet<Vec<Value>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    WidthMismatch {
        relation: String,
        expected: usize,
        tuple: Vec<Value>,
    },
    ArityMismatch {
        relation: String,
        declared: usize,
        tuple: Vec<Value>,
    },
    UndeclaredRelation {
        relation: String,
    },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::WidthMismatch { relation, expected, tuple } => write!(
                f,
                "relation {relation} holds tuples of width {expected}, got {}",
                fmt_tuple(tuple)
            ),
            InstanceError::ArityMismatch { relation, declared, tuple } => write!(
                f,
                "relation {relation} is declared with arity {declared}, got {}",
                fmt_tuple(tuple)
            ),
            InstanceError::UndeclaredRelation { relation } => {
                write!(f, "relation {relation} is not declared in the schema")
            }
        }
    }
}

impl std::error::Error for InstanceError {}

pub(crate) fn fmt_tuple(tuple: &[Value]) -> String {
    let mut out = String::from("(");
    for (i, v) in tuple.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&v.to_string());
    }
    out.push(')');
    out
}

impl Instance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        relation: impl Into<String>,
        tuple: Vec<Value>,
    ) -> Result<bool, InstanceError> {
        let relation = relation.into();
        if let Some(existing) = self.facts.get(&relation) {
            if let Some(first) = existing.iter().next() {
                if first.len() != tuple.len() {
                    return Err(InstanceError::WidthMismatch {
                        relation,
                        expected: first.len(),
                        tuple,
                    });
                }
            }
        }
        Ok(self.facts.entry(relation).or_default().insert(tuple))
    }

    pub fn contains(&self, relation: &str, tuple: &[Value]) -> bool {
        self.facts
            .get(relation)
            .map_or(false, |set| set.contains(tuple))
    }

    pub fn tuples(&self, relation: &str) -> impl Iterator<Item = &Vec<Value>> {
        self.facts.get(relation).into_iter().flatten()
    }

    pub fn relations(&self) -> impl Iterator<Item = &String> {
        self.facts.keys()
    }

    /// Iterates all facts as (relation, tuple) pairs in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<Value>)> {
        self.facts
            .iter()
            .flat_map(|(rel, tuples)| tuples.iter().map(move |t| (rel, t)))
    }

    pub fn len(&self) -> usize {
        self.facts.values().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.values().all(|s| s.is_empty())
    }

    /// The active domain: every value occurring in some fact.
    pub fn active_domain(&self) -> BTreeSet<Value> {
        self.iter().flat_map(|(_, t)| t.iter().cloned()).collect()
    }

    /// Replaces every occurrence of `from` by `to` across all facts.
    pub fn replace_value(&self, from: &Value, to: &Value) -> Instance {
        let mut out = Instance::new();
        for (rel, tuple) in self.iter() {
            let rewritten: Vec<Value> = tuple
                .iter()
                .map(|v| if v == from { to.clone() } else { v.clone() })
                .collect();
            out.facts.entry(rel.clone()).or_default().insert(rewritten);
        }
        out
    }

    /// Keeps only the facts of the given relations.
    pub fn restrict_to<'a>(&self, keep: impl IntoIterator<Item = &'a str>) -> Instance {
        let keep: BTreeSet<&str> = keep.into_iter().collect();
        let mut out = Instance::new();
        for (rel, tuples) in &self.facts {
            if keep.contains(rel.as_str()) {
                out.facts.insert(rel.clone(), tuples.clone());
            }
        }
        out
    }

    pub fn union(&self, other: &Instance) -> Instance {
        let mut out = self.clone();
        for (rel, tuple) in other.iter() {
            out.facts.entry(rel.clone()).or_default().insert(tuple.clone());
        }
        out
    }

    /// Checks declared arities, surfacing the first offending fact.
    pub fn check_arities(&self, schema: &RelationalSchema) -> Result<(), InstanceError> {
        for (rel, tuple) in self.iter() {
            match schema.arity(rel) {
                None => {
                    return Err(InstanceError::UndeclaredRelation { relation: rel.clone() })
                }
                Some(a) if a != tuple.len() => {
                    return Err(InstanceError::ArityMismatch {
                        relation: rel.clone(),
                        declared: a,
                        tuple: tuple.clone(),
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl FromIterator<(String, Vec<Value>)> for Instance {
    fn from_iter<T: IntoIterator<Item = (String, Vec<Value>)>>(iter: T) -> Self {
        let mut inst = Instance::new();
        for (rel, tuple) in iter {
            inst.facts.entry(rel).or_default().insert(tuple);
        }
        inst
    }
}

/// One fd violation: two tuples agreeing on the lhs and differing on the rhs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdViolation {
    pub fd: FunctionalDependency,
    pub left: Vec<Value>,
    pub right: Vec<Value>,
}

impl fmt::Display for FdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fd {} violated by {} and {}",
            self.fd,
            fmt_tuple(&self.left),
            fmt_tuple(&self.right)
        )
    }
}

/// Lists every fd violation of `inst`; empty iff the instance is valid.
///
/// Each unordered witness pair is reported once, with the lexicographically
/// smaller tuple first.
pub fn check_fds(
    inst: &Instance,
    schema: &RelationalSchema,
) -> Result<Vec<FdViolation>, InstanceError> {
    inst.check_arities(schema)?;
    let mut violations = Vec::new();
    for fd in &schema.fds {
        let tuples: Vec<&Vec<Value>> = inst.tuples(&fd.relation).collect();
        for (i, a) in tuples.iter().enumerate() {
            for b in tuples.iter().skip(i + 1) {
                let agree_lhs = fd.lhs.iter().all(|&p| a[p - 1] == b[p - 1]);
                let differ_rhs = fd.rhs.iter().any(|&p| a[p - 1] != b[p - 1]);
                if agree_lhs && differ_rhs {
                    violations.push(FdViolation {
                        fd: fd.clone(),
                        left: (*a).clone(),
                        right: (*b).clone(),
                    });
                }
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> Value {
        Value::lit(s)
    }

    fn fig1_schema() -> RelationalSchema {
        let mut s = RelationalSchema::new();
        s.declare("Bug", 3).unwrap();
        s.declare("User", 2).unwrap();
        s.declare("Email", 2).unwrap();
        s.declare("Rel", 2).unwrap();
        s.add_fd(FunctionalDependency::new("Bug", [1], [2, 3])).unwrap();
        s.add_fd(FunctionalDependency::new("User", [1], [2])).unwrap();
        s.add_fd(FunctionalDependency::new("Email", [1], [2])).unwrap();
        s
    }

    fn fig1_instance() -> Instance {
        let rows: [(&str, &[&str]); 12] = [
            ("Bug", &["1", "Boom!", "1"]),
            ("Bug", &["2", "Kaboom!", "2"]),
            ("Bug", &["3", "Kabang!", "1"]),
            ("Bug", &["4", "Bang!", "3"]),
            ("User", &["1", "Jose"]),
            ("User", &["2", "Edith"]),
            ("User", &["3", "Steve89"]),
            ("Email", &["1", "j@ex.com"]),
            ("Email", &["2", "e@o.fr"]),
            ("Rel", &["1", "3"]),
            ("Rel", &["1", "4"]),
            ("Rel", &["2", "4"]),
        ];
        rows.iter()
            .map(|(rel, cells)| (rel.to_string(), cells.iter().map(|c| lit(c)).collect()))
            .collect()
    }

    #[test]
    fn fig1_database_is_valid() {
        let violations = check_fds(&fig1_instance(), &fig1_schema()).unwrap();
        assert!(violations.is_empty());
    }

    #[test]
    fn empty_instance_satisfies_any_fds() {
        let violations = check_fds(&Instance::new(), &fig1_schema()).unwrap();
        assert!(violations.is_empty());
    }

    #[test]
    fn duplicate_key_is_one_violation() {
        let mut schema = RelationalSchema::new();
        schema.declare("Email", 2).unwrap();
        schema.add_fd(FunctionalDependency::new("Email", [1], [2])).unwrap();
        let mut inst = Instance::new();
        inst.insert("Email", vec![lit("1"), lit("a")]).unwrap();
        inst.insert("Email", vec![lit("1"), lit("b")]).unwrap();
        let violations = check_fds(&inst, &schema).unwrap();
        assert_eq!(violations.len(), 1);
        let v = &violations[0];
        assert_eq!(v.left[1], lit("a"));
        assert_eq!(v.right[1], lit("b"));
    }

    #[test]
    fn arity_mismatch_names_relation_and_tuple() {
        let mut inst = Instance::new();
        inst.insert("User", vec![lit("1")]).unwrap();
        let err = check_fds(&inst, &fig1_schema()).unwrap_err();
        match err {
            InstanceError::ArityMismatch { relation, declared, .. } => {
                assert_eq!(relation, "User");
                assert_eq!(declared, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn mixed_width_insert_rejected() {
        let mut inst = Instance::new();
        inst.insert("R", vec![lit("a"), lit("b")]).unwrap();
        assert!(inst.insert("R", vec![lit("a")]).is_err());
    }

    #[test]
    fn fd_positions_validated_against_arity() {
        let mut s = RelationalSchema::new();
        s.declare("R", 2).unwrap();
        assert!(s.add_fd(FunctionalDependency::new("R", [1], [3])).is_err());
        assert!(s.add_fd(FunctionalDependency::new("X", [1], [2])).is_err());
    }
}
