//! Front-end pieces shared by the binary and the integration tests:
//! surface-syntax parsers, project loading, graph serialization, and the
//! report types.

pub mod ntriples;
pub mod parse;
pub mod project;
pub mod report;

use rel2rdf_core::shex2dep;
use rel2rdf_core::{is_key_covered, is_weakly_recursive, DataExchangeSetting};

use project::Project;
use report::{render_instance, CheckReport, Witness};

/// Runs the static analyses of a loaded project and assembles the report.
pub fn check_project(project: &Project) -> CheckReport {
    let mut witnesses = Vec::new();

    let weakly_recursive = match is_weakly_recursive(&project.target) {
        Ok(()) => true,
        Err(cycle) => {
            witnesses.push(Witness::new("strong_cycle", cycle.join(" -> ")));
            false
        }
    };

    let setting: Option<DataExchangeSetting> = match &project.normalized {
        Err(e) => {
            witnesses.push(Witness::new("not_fully_typed", e.to_string()));
            None
        }
        Ok(_) => project.setting(),
    };

    let fully_typed = match &setting {
        None => false,
        Some(setting) => {
            let report = setting.check_fully_typed();
            for v in &report.violations {
                witnesses.push(Witness::new("not_fully_typed", v.to_string()));
            }
            report.ok()
        }
    };

    let key_covered = if fully_typed {
        let setting = setting.as_ref().expect("fully typed implies a setting");
        match is_key_covered(setting) {
            Ok(coverage) => {
                if let Some((pair, counterexample)) = &coverage.witness {
                    witnesses.push(Witness {
                        kind: "not_functionally_overlapping".to_string(),
                        detail: pair.to_string(),
                        counterexample: Some(render_instance(counterexample)),
                    });
                }
                Some(coverage.covered)
            }
            Err(e) => {
                witnesses.push(Witness::new("analysis_error", e.to_string()));
                Some(false)
            }
        }
    } else {
        None
    };

    CheckReport { fully_typed, weakly_recursive, key_covered, witnesses }
}

/// The compiled dependency listing for `compile-shex`.
pub fn compiled_listing(schema: &rel2rdf_core::ShexSchema) -> String {
    let mut out = String::new();
    for dep in shex2dep::compile(schema) {
        out.push_str(&dep.to_string());
        out.push('\n');
    }
    out
}
