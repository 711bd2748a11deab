//! Tuple- and equality-generating dependencies with function terms in heads.

use std::collections::BTreeSet;
use std::fmt;

use crate::value::Value;

/// An argument of a function term: a variable or a constant.
///
/// Function terms are not nested, so arguments are structurally simple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arg {
    Var(String),
    Const(Value),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Var(v) => write!(f, "{v}"),
            Arg::Const(c) => write!(f, "{c}"),
        }
    }
}

/// A term: a variable, a constant, or a single function application.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Value),
    App(String, Vec<Arg>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(value: Value) -> Self {
        Term::Const(value)
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Arg>) -> Self {
        Term::App(symbol.into(), args)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Variables occurring in the term, in their order of appearance.
    pub fn variables(&self) -> Vec<&str> {
        match self {
            Term::Var(v) => vec![v],
            Term::Const(_) => vec![],
            Term::App(_, args) => args
                .iter()
                .filter_map(|a| match a {
                    Arg::Var(v) => Some(v.as_str()),
                    Arg::Const(_) => None,
                })
                .collect(),
        }
    }

    /// Renames every variable through `rename`.
    pub fn rename_vars(&self, rename: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(rename(v)),
            Term::Const(c) => Term::Const(c.clone()),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter()
                    .map(|a| match a {
                        Arg::Var(v) => Arg::Var(rename(v)),
                        Arg::Const(c) => Arg::Const(c.clone()),
                    })
                    .collect(),
            ),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::App(sym, args) => {
                write!(f, "{sym}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// An atom `R(t1, ..., tn)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Atom {
    pub relation: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(relation: impl Into<String>, terms: Vec<Term>) -> Self {
        Atom { relation: relation.into(), terms }
    }

    pub fn variables(&self) -> Vec<&str> {
        self.terms.iter().flat_map(|t| t.variables()).collect()
    }

    pub fn rename_vars(&self, rename: &impl Fn(&str) -> String) -> Atom {
        Atom {
            relation: self.relation.clone(),
            terms: self.terms.iter().map(|t| t.rename_vars(rename)).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// Provenance of a dependency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DependencyLabel {
    /// Triple-constraint target typing.
    Tc,
    /// Lower multiplicity bound.
    MultGe1,
    /// Upper multiplicity bound.
    MultLe1,
    /// Source-to-target rule.
    St,
    /// Functional dependency expressed as an egd.
    Fd,
}

impl fmt::Display for DependencyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DependencyLabel::Tc => "tc",
            DependencyLabel::MultGe1 => "mult>=1",
            DependencyLabel::MultLe1 => "mult<=1",
            DependencyLabel::St => "st",
            DependencyLabel::Fd => "fd",
        };
        write!(f, "{s}")
    }
}

/// The conclusion of a dependency.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Head {
    /// Tgd head: atoms under the given existential variables.
    Atoms { exists: Vec<String>, atoms: Vec<Atom> },
    /// Egd head: equality of two body variables.
    Equal(String, String),
}

/// A dependency `forall x. body => head`, universal quantifiers implicit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dependency {
    pub body: Vec<Atom>,
    pub head: Head,
    pub label: DependencyLabel,
}

impl Dependency {
    pub fn tgd(
        body: Vec<Atom>,
        exists: Vec<String>,
        atoms: Vec<Atom>,
        label: DependencyLabel,
    ) -> Self {
        Dependency { body, head: Head::Atoms { exists, atoms }, label }
    }

    pub fn egd(body: Vec<Atom>, x: impl Into<String>, y: impl Into<String>, label: DependencyLabel) -> Self {
        Dependency { body, head: Head::Equal(x.into(), y.into()), label }
    }

    pub fn is_egd(&self) -> bool {
        matches!(self.head, Head::Equal(_, _))
    }

    /// Variables of the body, deduplicated.
    pub fn body_variables(&self) -> BTreeSet<&str> {
        self.body.iter().flat_map(|a| a.variables()).collect()
    }

    /// Expresses an fd `R: X -> Y` as one egd per rhs position.
    pub fn from_fd(fd: &crate::relational::FunctionalDependency, arity: usize) -> Vec<Dependency> {
        let var = |prefix: &str, i: usize| format!("{prefix}{i}");
        let left = Atom::new(
            fd.relation.clone(),
            (1..=arity).map(|i| Term::var(var("x", i))).collect(),
        );
        let right = Atom::new(
            fd.relation.clone(),
            (1..=arity)
                .map(|i| {
                    if fd.lhs.contains(&i) {
                        Term::var(var("x", i))
                    } else {
                        Term::var(var("y", i))
                    }
                })
                .collect(),
        );
        fd.rhs
            .iter()
            .filter(|p| !fd.lhs.contains(p))
            .map(|&p| {
                Dependency::egd(
                    vec![left.clone(), right.clone()],
                    var("x", p),
                    var("y", p),
                    DependencyLabel::Fd,
                )
            })
            .collect()
    }
}

impl fmt::Display for Dependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{atom}")?;
        }
        write!(f, " => ")?;
        match &self.head {
            Head::Equal(x, y) => write!(f, "{x} = {y}")?,
            Head::Atoms { exists, atoms } => {
                if !exists.is_empty() {
                    write!(f, "exists {} . ", exists.join(", "))?;
                }
                for (i, atom) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "{atom}")?;
                }
            }
        }
        write!(f, "  [{}]", self.label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::FunctionalDependency;

    #[test]
    fn fd_becomes_one_egd_per_dependent_position() {
        let fd = FunctionalDependency::new("Bug", [1], [2, 3]);
        let egds = Dependency::from_fd(&fd, 3);
        assert_eq!(egds.len(), 2);
        assert!(egds.iter().all(|d| d.is_egd() && d.label == DependencyLabel::Fd));
        let shown = egds[0].to_string();
        assert!(shown.contains("Bug(x1, x2, x3) & Bug(x1, y2, y3) => x2 = y2"), "{shown}");
    }

    #[test]
    fn trivial_fd_produces_no_egd() {
        let fd = FunctionalDependency::new("Rel", [1, 2], [1, 2]);
        assert!(Dependency::from_fd(&fd, 2).is_empty());
    }

    #[test]
    fn display_shows_existentials() {
        let dep = Dependency::tgd(
            vec![Atom::new("T", vec![Term::var("x")])],
            vec!["y".into()],
            vec![Atom::new(
                "Triple",
                vec![Term::var("x"), Term::constant(Value::iri("urn:p")), Term::var("y")],
            )],
            DependencyLabel::MultGe1,
        );
        assert_eq!(
            dep.to_string(),
            "T(x) => exists y . Triple(x, <urn:p>, y)  [mult>=1]"
        );
    }
}
