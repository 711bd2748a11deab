//! Compiling a ShEx schema into target dependencies and analyzing the
//! schema's dependency graph.
//!
//! Every triple constraint `p :: S^mu` of shape `T` contributes a
//! target-typing tgd; required multiplicities add a lower-bound tgd with one
//! existential, and at-most-one multiplicities add an upper-bound egd.

use std::collections::BTreeSet;
use std::fmt;

use crate::dependency::{Atom, Dependency, DependencyLabel, Term};
use crate::shex::{Multiplicity, ShexSchema, TripleConstraint, TRIPLE};

fn tc(shape: &str, constraint: &TripleConstraint) -> Dependency {
    Dependency::tgd(
        vec![
            Atom::new(shape, vec![Term::var("x")]),
            Atom::new(
                TRIPLE,
                vec![
                    Term::var("x"),
                    Term::constant(constraint.predicate_value()),
                    Term::var("y"),
                ],
            ),
        ],
        vec![],
        vec![Atom::new(constraint.target.relation_name(), vec![Term::var("y")])],
        DependencyLabel::Tc,
    )
}

fn mult_ge1(shape: &str, constraint: &TripleConstraint) -> Dependency {
    Dependency::tgd(
        vec![Atom::new(shape, vec![Term::var("x")])],
        vec!["y".into()],
        vec![Atom::new(
            TRIPLE,
            vec![
                Term::var("x"),
                Term::constant(constraint.predicate_value()),
                Term::var("y"),
            ],
        )],
        DependencyLabel::MultGe1,
    )
}

fn mult_le1(shape: &str, constraint: &TripleConstraint) -> Dependency {
    let triple = |obj: &str| {
        Atom::new(
            TRIPLE,
            vec![
                Term::var("x"),
                Term::constant(constraint.predicate_value()),
                Term::var(obj),
            ],
        )
    };
    Dependency::egd(
        vec![Atom::new(shape, vec![Term::var("x")]), triple("y"), triple("z")],
        "y",
        "z",
        DependencyLabel::MultLe1,
    )
}

/// Compiles the schema into its dependency set, ordered by
/// (shape, predicate, label).
pub fn compile(schema: &ShexSchema) -> Vec<Dependency> {
    let mut deps = Vec::new();
    for shape in schema.shapes() {
        for constraint in schema.constraints(shape) {
            deps.push(tc(shape, constraint));
            if constraint.mult.lower() >= 1 {
                deps.push(mult_ge1(shape, constraint));
            }
            if constraint.mult.upper() == Some(1) {
                deps.push(mult_le1(shape, constraint));
            }
        }
    }
    deps
}

/// Compiled dependencies restricted to egds (the upper multiplicity bounds).
pub fn compile_egds(schema: &ShexSchema) -> Vec<Dependency> {
    compile(schema).into_iter().filter(|d| d.is_egd()).collect()
}

/// How hard an edge of the dependency graph is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeStrength {
    Strong,
    Weak,
}

impl EdgeStrength {
    fn of(mult: Multiplicity) -> Self {
        if mult.lower() >= 1 {
            EdgeStrength::Strong
        } else {
            EdgeStrength::Weak
        }
    }
}

impl fmt::Display for EdgeStrength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeStrength::Strong => write!(f, "strong"),
            EdgeStrength::Weak => write!(f, "weak"),
        }
    }
}

/// The dependency graph of a schema: an edge per shape-to-shape constraint.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<(String, String, EdgeStrength)>,
}

impl DependencyGraph {
    fn strong_successors<'a>(&'a self, from: &'a str) -> impl Iterator<Item = &'a String> + 'a {
        self.edges
            .iter()
            .filter(move |(f, _, s)| f == from && *s == EdgeStrength::Strong)
            .map(|(_, t, _)| t)
    }
}

/// Builds the dependency graph; literal-targeted constraints contribute no
/// edge.
pub fn dependency_graph(schema: &ShexSchema) -> DependencyGraph {
    let mut graph = DependencyGraph::default();
    for shape in schema.shapes() {
        graph.nodes.insert(shape.clone());
        for constraint in schema.constraints(shape) {
            if let Some(target) = constraint.target.as_shape() {
                graph.edges.insert((
                    shape.clone(),
                    target.to_string(),
                    EdgeStrength::of(constraint.mult),
                ));
            }
        }
    }
    graph
}

/// Checks for a directed cycle in the strong-edge subgraph.
///
/// Returns `Ok(())` when the schema is weakly recursive, or the shapes of a
/// strong cycle otherwise.
pub fn is_weakly_recursive(schema: &ShexSchema) -> Result<(), Vec<String>> {
    // Depth-first search over strong edges; a cycle is an edge back into the
    // current path. Recursion depth is bounded by the number of shapes.
    fn visit<'a>(
        graph: &'a DependencyGraph,
        node: &'a String,
        path: &mut Vec<&'a String>,
        done: &mut BTreeSet<&'a String>,
    ) -> Result<(), Vec<String>> {
        path.push(node);
        for next in graph.strong_successors(node) {
            if let Some(pos) = path.iter().position(|n| *n == next) {
                return Err(path[pos..].iter().map(|s| s.to_string()).collect());
            }
            if !done.contains(next) {
                visit(graph, next, path, done)?;
            }
        }
        path.pop();
        done.insert(node);
        Ok(())
    }

    let graph = dependency_graph(schema);
    let mut done: BTreeSet<&String> = BTreeSet::new();
    let mut path: Vec<&String> = Vec::new();
    for start in &graph.nodes {
        if !done.contains(start) {
            visit(&graph, start, &mut path, &mut done)?;
        }
    }
    Ok(())
}
