//! Shared test data: the bug-report database, its target schemas, the
//! fully-typed rules, and the hand-encoded solution graph.

use crate::constructor::ConstructorRegistry;
use crate::dependency::{Arg, Atom, Term};
use crate::mapping::{DataExchangeSetting, NormalizedStTgd, StTgd};
use crate::relational::{FunctionalDependency, Instance, RelationalSchema};
use crate::shex::{Multiplicity, ShexSchema, TargetType, TripleConstraint};
use crate::typed_graph::TypedGraph;
use crate::value::Value;

/// Predicate IRI under the default prefix.
pub fn pred(local: &str) -> Value {
    Value::iri(format!("urn:dx:p:{local}"))
}

pub fn example1_schema() -> ShexSchema {
    let mut s = ShexSchema::new();
    s.define(
        "TBug",
        vec![
            TripleConstraint::new(pred("descr").text(), TargetType::Lit, Multiplicity::One),
            TripleConstraint::new(pred("rep").text(), TargetType::shape("TUser"), Multiplicity::One),
            TripleConstraint::new(pred("related").text(), TargetType::shape("TBug"), Multiplicity::Star),
        ],
    )
    .unwrap();
    s.define(
        "TUser",
        vec![
            TripleConstraint::new(pred("name").text(), TargetType::Lit, Multiplicity::One),
            TripleConstraint::new(pred("email").text(), TargetType::Lit, Multiplicity::One),
            TripleConstraint::new(pred("phone").text(), TargetType::Lit, Multiplicity::Opt),
        ],
    )
    .unwrap();
    s.validate().unwrap();
    s
}

/// The four-shape extension with two cycles, neither strong.
pub fn four_shape_schema() -> ShexSchema {
    let mut s = ShexSchema::new();
    s.define(
        "TUser",
        vec![
            TripleConstraint::new(pred("name").text(), TargetType::Lit, Multiplicity::One),
            TripleConstraint::new(pred("email").text(), TargetType::Lit, Multiplicity::One),
            TripleConstraint::new(pred("phone").text(), TargetType::Lit, Multiplicity::Opt),
        ],
    )
    .unwrap();
    s.define(
        "TBug",
        vec![
            TripleConstraint::new(pred("rep").text(), TargetType::shape("TUser"), Multiplicity::One),
            TripleConstraint::new(pred("descr").text(), TargetType::Lit, Multiplicity::One),
            TripleConstraint::new(pred("related").text(), TargetType::shape("TBug"), Multiplicity::Star),
            TripleConstraint::new(pred("repro").text(), TargetType::shape("TEmp"), Multiplicity::Opt),
        ],
    )
    .unwrap();
    s.define(
        "TEmp",
        vec![
            TripleConstraint::new(pred("name").text(), TargetType::Lit, Multiplicity::One),
            TripleConstraint::new(pred("prepare").text(), TargetType::shape("TTest"), Multiplicity::Plus),
        ],
    )
    .unwrap();
    s.define(
        "TTest",
        vec![TripleConstraint::new(pred("covers").text(), TargetType::shape("TBug"), Multiplicity::Plus)],
    )
    .unwrap();
    s.validate().unwrap();
    s
}

pub fn fig1_schema() -> RelationalSchema {
    let mut s = RelationalSchema::new();
    s.declare("Bug", 3).unwrap();
    s.declare("User", 2).unwrap();
    s.declare("Email", 2).unwrap();
    s.declare("Rel", 2).unwrap();
    s.add_fd(FunctionalDependency::new("Bug", [1], [2, 3])).unwrap();
    s.add_fd(FunctionalDependency::new("User", [1], [2])).unwrap();
    s.add_fd(FunctionalDependency::new("Email", [1], [2])).unwrap();
    s.add_fd(FunctionalDependency::new("Rel", [1, 2], [1, 2])).unwrap();
    s
}

pub fn fig1_instance() -> Instance {
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
        .map(|(rel, cells)| {
            (rel.to_string(), cells.iter().map(|c| Value::lit(*c)).collect())
        })
        .collect()
}

/// The original rules as written in the running example; not fully typed.
pub fn example1_raw_rules() -> Vec<StTgd> {
    let v = |n: &str| Term::var(n);
    let app = |f: &str, args: &[&str]| {
        Term::app(f, args.iter().map(|a| Arg::Var(a.to_string())).collect())
    };
    let p = |n: &str| Term::constant(pred(n));
    vec![
        StTgd::new(
            vec![Atom::new("Bug", vec![v("b"), v("d"), v("u")])],
            vec![
                Atom::new("Triple", vec![app("bug2iri", &["b"]), p("descr"), v("d")]),
                Atom::new("TBug", vec![app("bug2iri", &["b"])]),
                Atom::new("Triple", vec![app("bug2iri", &["b"]), p("rep"), app("pers2iri", &["u"])]),
            ],
        ),
        StTgd::new(
            vec![Atom::new("Rel", vec![v("b1"), v("b2")])],
            vec![Atom::new(
                "Triple",
                vec![app("bug2iri", &["b1"]), p("related"), app("bug2iri", &["b2"])],
            )],
        ),
        StTgd::new(
            vec![Atom::new("User", vec![v("u"), v("n")])],
            vec![
                Atom::new("Triple", vec![app("pers2iri", &["u"]), p("name"), v("n")]),
                Atom::new("TUser", vec![app("pers2iri", &["u"])]),
            ],
        ),
        StTgd::new(
            vec![
                Atom::new("User", vec![v("u"), v("n")]),
                Atom::new("Email", vec![v("u"), v("e")]),
            ],
            vec![
                Atom::new("Triple", vec![app("pers2iri", &["u"]), p("email"), v("e")]),
                Atom::new("Lit", vec![v("e")]),
            ],
        ),
    ]
}

/// The five fully-typed single-triple rules equivalent to the raw set.
pub fn example1_fully_typed_rules() -> Vec<StTgd> {
    let v = |n: &str| Term::var(n);
    let app = |f: &str, args: &[&str]| {
        Term::app(f, args.iter().map(|a| Arg::Var(a.to_string())).collect())
    };
    let p = |n: &str| Term::constant(pred(n));
    vec![
        StTgd::new(
            vec![Atom::new("Bug", vec![v("b"), v("d"), v("u")])],
            vec![
                Atom::new("Triple", vec![app("bug2iri", &["b"]), p("descr"), v("d")]),
                Atom::new("TBug", vec![app("bug2iri", &["b"])]),
                Atom::new("Lit", vec![v("d")]),
            ],
        ),
        StTgd::new(
            vec![Atom::new("Bug", vec![v("b"), v("d"), v("u")])],
            vec![
                Atom::new("Triple", vec![app("bug2iri", &["b"]), p("rep"), app("pers2iri", &["u"])]),
                Atom::new("TBug", vec![app("bug2iri", &["b"])]),
                Atom::new("TUser", vec![app("pers2iri", &["u"])]),
            ],
        ),
        StTgd::new(
            vec![Atom::new("Rel", vec![v("b1"), v("b2")])],
            vec![
                Atom::new("Triple", vec![app("bug2iri", &["b1"]), p("related"), app("bug2iri", &["b2"])]),
                Atom::new("TBug", vec![app("bug2iri", &["b1"])]),
                Atom::new("TBug", vec![app("bug2iri", &["b2"])]),
            ],
        ),
        StTgd::new(
            vec![Atom::new("User", vec![v("u"), v("n")])],
            vec![
                Atom::new("Triple", vec![app("pers2iri", &["u"]), p("name"), v("n")]),
                Atom::new("TUser", vec![app("pers2iri", &["u"])]),
                Atom::new("Lit", vec![v("n")]),
            ],
        ),
        StTgd::new(
            vec![
                Atom::new("User", vec![v("u"), v("n")]),
                Atom::new("Email", vec![v("u"), v("e")]),
            ],
            vec![
                Atom::new("Triple", vec![app("pers2iri", &["u"]), p("email"), v("e")]),
                Atom::new("TUser", vec![app("pers2iri", &["u"])]),
                Atom::new("Lit", vec![v("e")]),
            ],
        ),
    ]
}

pub fn example1_normalized_rules() -> Vec<NormalizedStTgd> {
    crate::mapping::normalize(&example1_fully_typed_rules()).unwrap()
}

/// Constructors with the hand-picked IRIs of the solution figure.
pub fn example1_registry() -> ConstructorRegistry {
    let mut reg = ConstructorRegistry::new();
    reg.declare("bug2iri", 1).unwrap();
    reg.declare("pers2iri", 1).unwrap();
    for (arg, iri) in [("1", "bug:1"), ("2", "bug:2"), ("3", "bug:3"), ("4", "bug:4")] {
        reg.set_mapping("bug2iri", vec![Value::lit(arg)], Value::iri(iri)).unwrap();
    }
    for (arg, iri) in [("1", "emp:jose"), ("2", "user:edith"), ("3", "anon:3")] {
        reg.set_mapping("pers2iri", vec![Value::lit(arg)], Value::iri(iri)).unwrap();
    }
    reg
}

pub fn example1_setting() -> DataExchangeSetting {
    DataExchangeSetting {
        source: fig1_schema(),
        target: example1_schema(),
        rules: example1_normalized_rules(),
        registry: example1_registry(),
    }
}

/// The hand-encoded solution graph: 17 edges and one null-literal email.
pub fn fig2_graph() -> TypedGraph {
    let iri = Value::iri;
    let lit = Value::lit;
    let mut g = TypedGraph::new();
    let triples = [
        (iri("bug:1"), pred("descr"), lit("Boom!")),
        (iri("bug:1"), pred("rep"), iri("emp:jose")),
        (iri("bug:1"), pred("related"), iri("bug:3")),
        (iri("bug:1"), pred("related"), iri("bug:4")),
        (iri("bug:2"), pred("descr"), lit("Kaboom!")),
        (iri("bug:2"), pred("rep"), iri("user:edith")),
        (iri("bug:2"), pred("related"), iri("bug:4")),
        (iri("bug:3"), pred("descr"), lit("Kabang!")),
        (iri("bug:3"), pred("rep"), iri("emp:jose")),
        (iri("bug:4"), pred("descr"), lit("Bang!")),
        (iri("bug:4"), pred("rep"), iri("anon:3")),
        (iri("emp:jose"), pred("name"), lit("Jose")),
        (iri("emp:jose"), pred("email"), lit("j@ex.com")),
        (iri("user:edith"), pred("name"), lit("Edith")),
        (iri("user:edith"), pred("email"), lit("e@o.fr")),
        (iri("anon:3"), pred("name"), lit("Steve89")),
        (iri("anon:3"), pred("email"), Value::null_lit(1)),
    ];
    for (s, p, o) in triples {
        g.insert_triple(s, p, o).unwrap();
    }
    for bug in ["bug:1", "bug:2", "bug:3", "bug:4"] {
        g.add_type(iri(bug), TargetType::shape("TBug")).unwrap();
    }
    for user in ["emp:jose", "user:edith", "anon:3"] {
        g.add_type(iri(user), TargetType::shape("TUser")).unwrap();
    }
    let literals: Vec<Value> = g
        .nodes()
        .into_iter()
        .filter(|n| n.is_lit())
        .collect();
    for l in literals {
        g.add_type(l, TargetType::Lit).unwrap();
    }
    g
}
