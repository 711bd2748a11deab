//! Typed RDF graphs and their relational counterparts.
//!
//! A typed graph doubles as a relational structure over the signature
//! `{Triple}` plus one unary relation per shape name plus `Lit`. The two
//! conversions here are mutually inverse on typed graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::relational::{fmt_tuple, Instance};
use crate::shex::{Multiplicity, ShexSchema, TargetType, LIT_MARKER, TRIPLE};
use crate::value::Value;

/// An RDF triple set plus a node-to-type-set assignment.
///
/// Typing entries are kept only for nodes of the graph and only when
/// nonempty; absent nodes are typed with the empty set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypedGraph {
    triples: BTreeSet<(Value, Value, Value)>,
    typing: BTreeMap<Value, BTreeSet<TargetType>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphShapeError {
    BadSubject(Value),
    BadPredicate(Value),
    /// A `Lit` fact over a non-literal value.
    BadLitFact(Value),
    /// A shape fact over a literal value.
    BadTypeFact { shape: String, node: Value },
    /// A `Triple` fact of the wrong width, or a non-unary type relation.
    MalformedFact { relation: String, tuple: Vec<Value> },
    /// A typing entry for a value that is not a node of the graph.
    TypedNonNode(Value),
}

impl fmt::Display for GraphShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphShapeError::BadSubject(v) => write!(f, "triple subject {v} is a literal"),
            GraphShapeError::BadPredicate(v) => write!(f, "triple predicate {v} is not an IRI"),
            GraphShapeError::BadLitFact(v) => write!(f, "Lit fact over non-literal {v}"),
            GraphShapeError::BadTypeFact { shape, node } => {
                write!(f, "{shape} fact over literal {node}")
            }
            GraphShapeError::MalformedFact { relation, tuple } => {
                write!(f, "malformed fact {relation}{}", fmt_tuple(tuple))
            }
            GraphShapeError::TypedNonNode(v) => {
                write!(f, "typing assigned to {v}, which is not a node of the graph")
            }
        }
    }
}

impl std::error::Error for GraphShapeError {}

impl TypedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_triple(
        &mut self,
        subject: Value,
        predicate: Value,
        object: Value,
    ) -> Result<bool, GraphShapeError> {
        if subject.is_lit() {
            return Err(GraphShapeError::BadSubject(subject));
        }
        if !predicate.is_iri() {
            return Err(GraphShapeError::BadPredicate(predicate));
        }
        Ok(self.triples.insert((subject, predicate, object)))
    }

    /// Adds a type to a node already present in the graph.
    pub fn add_type(&mut self, node: Value, ty: TargetType) -> Result<(), GraphShapeError> {
        if !self.nodes().contains(&node) {
            return Err(GraphShapeError::TypedNonNode(node));
        }
        self.typing.entry(node).or_default().insert(ty);
        Ok(())
    }

    pub fn triples(&self) -> impl Iterator<Item = &(Value, Value, Value)> {
        self.triples.iter()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty() && self.typing.is_empty()
    }

    /// Values occurring in subject or object position.
    pub fn nodes(&self) -> BTreeSet<Value> {
        self.triples
            .iter()
            .flat_map(|(s, _, o)| [s.clone(), o.clone()])
            .collect()
    }

    pub fn types_of(&self, node: &Value) -> BTreeSet<TargetType> {
        self.typing.get(node).cloned().unwrap_or_default()
    }

    pub fn typing(&self) -> impl Iterator<Item = (&Value, &BTreeSet<TargetType>)> {
        self.typing.iter()
    }

    /// Triples with the given subject and predicate.
    pub fn successors(&self, subject: &Value, predicate: &Value) -> Vec<&Value> {
        self.triples
            .iter()
            .filter(|(s, p, _)| s == subject && p == predicate)
            .map(|(_, _, o)| o)
            .collect()
    }
}

/// Encodes a typed graph as an instance over `{Triple}` plus unary type
/// relations.
pub fn rdf_to_inst(graph: &TypedGraph) -> Instance {
    let mut inst = Instance::new();
    for (s, p, o) in graph.triples() {
        inst.insert(TRIPLE, vec![s.clone(), p.clone(), o.clone()])
            .expect("Triple facts share width 3");
    }
    for (node, types) in graph.typing() {
        for ty in types {
            inst.insert(ty.relation_name(), vec![node.clone()])
                .expect("type facts share width 1");
        }
    }
    inst
}

/// Decodes an instance over the target signature back into a typed graph.
///
/// Inverse of [`rdf_to_inst`]: every `Triple` fact becomes an edge and every
/// unary fact `T(n)` over a node of the graph becomes a type assignment.
/// Shape-typed values may be IRIs or blank nodes.
pub fn inst_to_rdf(inst: &Instance) -> Result<TypedGraph, GraphShapeError> {
    let mut graph = TypedGraph::new();
    for tuple in inst.tuples(TRIPLE) {
        let [s, p, o] = tuple.as_slice() else {
            return Err(GraphShapeError::MalformedFact {
                relation: TRIPLE.to_string(),
                tuple: tuple.clone(),
            });
        };
        graph.insert_triple(s.clone(), p.clone(), o.clone())?;
    }
    let nodes = graph.nodes();
    for rel in inst.relations() {
        if rel == TRIPLE {
            continue;
        }
        for tuple in inst.tuples(rel) {
            let [node] = tuple.as_slice() else {
                return Err(GraphShapeError::MalformedFact {
                    relation: rel.clone(),
                    tuple: tuple.clone(),
                });
            };
            let ty = if rel == LIT_MARKER {
                if !node.is_lit() {
                    return Err(GraphShapeError::BadLitFact(node.clone()));
                }
                TargetType::Lit
            } else {
                if node.is_lit() {
                    return Err(GraphShapeError::BadTypeFact {
                        shape: rel.clone(),
                        node: node.clone(),
                    });
                }
                TargetType::shape(rel.clone())
            };
            if nodes.contains(node) {
                graph.typing.entry(node.clone()).or_default().insert(ty);
            }
        }
    }
    Ok(graph)
}

/// One way a typed graph can violate a schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypingViolation {
    LitTypedNonLiteral { node: Value },
    ShapeTypedLiteral { node: Value, shape: String },
    UnknownShape { node: Value, shape: String },
    /// A `p`-successor of a `T`-typed node misses the constraint's target type.
    TargetTypeMissing {
        node: Value,
        shape: String,
        predicate: String,
        object: Value,
        expected: TargetType,
    },
    Cardinality {
        node: Value,
        shape: String,
        predicate: String,
        count: usize,
        mult: Multiplicity,
    },
}

impl fmt::Display for TypingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypingViolation::LitTypedNonLiteral { node } => {
                write!(f, "node {node} is typed Lit but is not a literal")
            }
            TypingViolation::ShapeTypedLiteral { node, shape } => {
                write!(f, "literal {node} is typed with shape {shape}")
            }
            TypingViolation::UnknownShape { node, shape } => {
                write!(f, "node {node} is typed with undeclared shape {shape}")
            }
            TypingViolation::TargetTypeMissing { node, shape, predicate, object, expected } => {
                write!(
                    f,
                    "{shape}-typed {node} has <{predicate}>-successor {object} lacking type {expected}"
                )
            }
            TypingViolation::Cardinality { node, shape, predicate, count, mult } => {
                write!(
                    f,
                    "{shape}-typed {node} has {count} <{predicate}>-successors, multiplicity {mult}"
                )
            }
        }
    }
}

/// Checks correct typing directly against the semantic definition.
///
/// This is deliberately independent of the dependency encoding so the two
/// can be tested against each other.
pub fn validate_typed_graph(graph: &TypedGraph, schema: &ShexSchema) -> Vec<TypingViolation> {
    let mut violations = Vec::new();
    for (node, types) in graph.typing() {
        for ty in types {
            match ty {
                TargetType::Lit => {
                    if !node.is_lit() {
                        violations.push(TypingViolation::LitTypedNonLiteral { node: node.clone() });
                    }
                }
                TargetType::Shape(shape) => {
                    if node.is_lit() {
                        violations.push(TypingViolation::ShapeTypedLiteral {
                            node: node.clone(),
                            shape: shape.clone(),
                        });
                        continue;
                    }
                    if !schema.has_shape(shape) {
                        violations.push(TypingViolation::UnknownShape {
                            node: node.clone(),
                            shape: shape.clone(),
                        });
                        continue;
                    }
                    for tc in schema.constraints(shape) {
                        let successors = graph.successors(node, &tc.predicate_value());
                        for object in &successors {
                            if !graph.types_of(object).contains(&tc.target) {
                                violations.push(TypingViolation::TargetTypeMissing {
                                    node: node.clone(),
                                    shape: shape.clone(),
                                    predicate: tc.predicate.clone(),
                                    object: (*object).clone(),
                                    expected: tc.target.clone(),
                                });
                            }
                        }
                        if !tc.mult.bounds(successors.len()) {
                            violations.push(TypingViolation::Cardinality {
                                node: node.clone(),
                                shape: shape.clone(),
                                predicate: tc.predicate.clone(),
                                count: successors.len(),
                                mult: tc.mult,
                            });
                        }
                    }
                }
            }
        }
    }
    violations
}

/// True iff the graph is correctly typed w.r.t. the schema.
pub fn is_correctly_typed(graph: &TypedGraph, schema: &ShexSchema) -> bool {
    validate_typed_graph(graph, schema).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn single_triple_with_typing_encodes_as_expected() {
        let a = Value::iri("urn:a");
        let b = Value::iri("urn:b");
        let p = Value::iri("urn:p");
        let mut g = TypedGraph::new();
        g.insert_triple(a.clone(), p.clone(), b.clone()).unwrap();
        g.add_type(a.clone(), TargetType::shape("T")).unwrap();
        let inst = rdf_to_inst(&g);
        assert_eq!(inst.len(), 2);
        assert!(inst.contains(TRIPLE, &[a.clone(), p, b]));
        assert!(inst.contains("T", &[a]));
    }

    #[test]
    fn empty_graph_round_trips() {
        let g = TypedGraph::new();
        assert!(rdf_to_inst(&g).is_empty());
        assert_eq!(inst_to_rdf(&rdf_to_inst(&g)).unwrap(), g);
    }

    #[test]
    fn fig2_graph_round_trips_with_17_triples() {
        let g = fixtures::fig2_graph();
        assert_eq!(g.triple_count(), 17);
        let inst = rdf_to_inst(&g);
        assert_eq!(inst.tuples(TRIPLE).count(), 17);
        assert_eq!(inst_to_rdf(&inst).unwrap(), g);
    }

    #[test]
    fn literal_subject_rejected() {
        let mut inst = Instance::new();
        inst.insert(
            TRIPLE,
            vec![Value::lit("lit-as-subject"), Value::iri("urn:p"), Value::iri("urn:o")],
        )
        .unwrap();
        assert!(matches!(inst_to_rdf(&inst), Err(GraphShapeError::BadSubject(_))));
    }

    #[test]
    fn lit_fact_over_iri_rejected() {
        let mut inst = Instance::new();
        inst.insert(TRIPLE, vec![Value::iri("urn:a"), Value::iri("urn:p"), Value::iri("urn:b")])
            .unwrap();
        inst.insert(LIT_MARKER, vec![Value::iri("urn:b")]).unwrap();
        assert!(matches!(inst_to_rdf(&inst), Err(GraphShapeError::BadLitFact(_))));
    }

    #[test]
    fn fig2_graph_is_correctly_typed() {
        let g = fixtures::fig2_graph();
        let s = fixtures::example1_schema();
        assert_eq!(validate_typed_graph(&g, &s), Vec::new());
    }

    #[test]
    fn deleting_required_email_breaks_typing() {
        let full = fixtures::fig2_graph();
        let victim = (
            Value::iri("emp:jose"),
            fixtures::pred("email"),
            Value::lit("j@ex.com"),
        );
        let mut g = TypedGraph::new();
        for t in full.triples().filter(|t| **t != victim) {
            g.insert_triple(t.0.clone(), t.1.clone(), t.2.clone()).unwrap();
        }
        for (node, types) in full.typing() {
            if g.nodes().contains(node) {
                for ty in types {
                    g.add_type(node.clone(), ty.clone()).unwrap();
                }
            }
        }
        let violations = validate_typed_graph(&g, &fixtures::example1_schema());
        assert!(violations.iter().any(|v| matches!(
            v,
            TypingViolation::Cardinality { count: 0, mult: Multiplicity::One, .. }
        )));
    }

    #[test]
    fn lit_typed_iri_is_invalid() {
        let mut g = TypedGraph::new();
        g.insert_triple(Value::iri("urn:a"), Value::iri("urn:p"), Value::iri("urn:b"))
            .unwrap();
        g.add_type(Value::iri("urn:b"), TargetType::Lit).unwrap();
        let violations = validate_typed_graph(&g, &ShexSchema::new());
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], TypingViolation::LitTypedNonLiteral { .. }));
    }

    #[test]
    fn shape_typed_blank_is_accepted() {
        let mut g = TypedGraph::new();
        g.insert_triple(Value::blank("b1"), fixtures::pred("covers"), Value::iri("urn:x"))
            .unwrap();
        let mut schema = ShexSchema::new();
        schema.define("T", vec![]).unwrap();
        g.add_type(Value::blank("b1"), TargetType::shape("T")).unwrap();
        assert!(is_correctly_typed(&g, &schema));
    }
}
