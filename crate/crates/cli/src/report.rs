//! JSON reports printed by the subcommands. Field order is fixed by the
//! struct definitions.

use serde::Serialize;

use rel2rdf_core::relational::Instance;

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub fully_typed: bool,
    pub weakly_recursive: bool,
    /// `null` when the rules are not fully typed, since the analysis is
    /// only defined beyond that point.
    pub key_covered: Option<bool>,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Serialize)]
pub struct Witness {
    pub kind: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<String>>,
}

impl Witness {
    pub fn new(kind: &str, detail: impl Into<String>) -> Self {
        Witness { kind: kind.to_string(), detail: detail.into(), counterexample: None }
    }
}

/// Renders an instance as one `Rel(v1, ..., vn)` string per fact.
pub fn render_instance(inst: &Instance) -> Vec<String> {
    inst.iter()
        .map(|(rel, tuple)| {
            let cells: Vec<String> = tuple.iter().map(|v| v.to_string()).collect();
            format!("{rel}({})", cells.join(", "))
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct ExchangeReport {
    pub triples: usize,
    pub nulls: usize,
    pub steps: usize,
}

#[derive(Debug, Serialize)]
pub struct ValidateReport {
    pub valid: bool,
    pub violations: Vec<String>,
}
