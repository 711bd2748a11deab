use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rel2rdf_cli::ntriples;
use rel2rdf_cli::project::Project;
use rel2rdf_cli::report::{ExchangeReport, ValidateReport};
use rel2rdf_cli::{check_project, compiled_listing};
use rel2rdf_core::{
    chase, chase_with_completion, validate_typed_graph, ChaseConfig, ChaseResult, TriggerOrder,
};

// Exit codes: 0 success, 1 analysis negative, 2 chase failure,
// 3 budget exceeded, 4 input error.
const EXIT_ANALYSIS: u8 = 1;
const EXIT_FAILURE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "rel2rdf", version, about = "Relational to RDF data exchange with ShEx targets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the dependency set compiled from the project's shape schema.
    #[command(name = "compile-shex")]
    CompileShex { project: PathBuf },
    /// Run the static analyses and print a JSON report.
    Check { project: PathBuf },
    /// Materialize a solution graph for the project's instance.
    Exchange {
        project: PathBuf,
        /// Output directory for solution.nt and typing.tsv.
        #[arg(long)]
        out: PathBuf,
        /// Write one line per chase step to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Maximum number of chase steps.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Discharge required predicates by canonical completion instead of
        /// chasing the lower bounds.
        #[arg(long)]
        complete: bool,
    },
    /// Check a serialized graph against the project's shape schema.
    Validate {
        project: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        typing: PathBuf,
    },
}

fn input_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_INPUT)
}

fn run_compile_shex(project: PathBuf) -> ExitCode {
    match Project::load_shex(&project) {
        Ok(schema) => {
            print!("{}", compiled_listing(&schema));
            ExitCode::SUCCESS
        }
        Err(e) => input_error(e),
    }
}

fn run_check(project: PathBuf) -> ExitCode {
    let project = match Project::load(&project) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let report = check_project(&project);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.fully_typed && report.key_covered == Some(true) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ANALYSIS)
    }
}

fn write_outputs(graph: &rel2rdf_core::TypedGraph, out: &PathBuf) -> Result<(), std::io::Error> {
    fs::create_dir_all(out)?;
    fs::write(out.join("solution.nt"), ntriples::write_ntriples(graph))?;
    fs::write(out.join("typing.tsv"), ntriples::write_typing(graph))?;
    Ok(())
}

fn write_trace(steps: &[rel2rdf_core::ChaseStep], path: &PathBuf) -> Result<(), std::io::Error> {
    let mut text = String::new();
    for step in steps {
        text.push_str(&step.to_string());
        text.push('\n');
    }
    fs::write(path, text)
}

fn run_exchange(
    project: PathBuf,
    out: PathBuf,
    trace: Option<PathBuf>,
    budget: usize,
    complete: bool,
) -> ExitCode {
    let project = match Project::load(&project) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let setting = match project.setting() {
        Some(s) if s.check_fully_typed().ok() => s,
        _ => {
            let report = check_project(&project);
            eprintln!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            return ExitCode::from(EXIT_ANALYSIS);
        }
    };
    let source = match project.load_instance() {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    let config = ChaseConfig { budget, order: TriggerOrder::Forward };
    let run = if complete {
        chase_with_completion(&source, &setting, &config)
    } else {
        chase(&source, &setting, &config)
    };
    let result = match run {
        Ok(r) => r,
        Err(rel2rdf_core::chase::ChaseError::NotFullyTyped(_)) => {
            return ExitCode::from(EXIT_ANALYSIS)
        }
        Err(e) => return input_error(e),
    };
    if let Some(trace_path) = &trace {
        if let Err(e) = write_trace(result.trace(), trace_path) {
            return input_error(e);
        }
    }
    match result {
        ChaseResult::Solution { graph, trace: steps } => {
            if let Err(e) = write_outputs(&graph, &out) {
                return input_error(e);
            }
            let report = ExchangeReport {
                triples: graph.triple_count(),
                nulls: graph.nodes().iter().filter(|v| v.is_null()).count(),
                steps: steps.len(),
            };
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            ExitCode::SUCCESS
        }
        ChaseResult::Failed { failing, .. } => {
            eprintln!("chase failed: {failing}");
            ExitCode::from(EXIT_FAILURE)
        }
        ChaseResult::BudgetExceeded { trace: steps } => {
            eprintln!("budget of {budget} steps exceeded after {} steps", steps.len());
            ExitCode::from(EXIT_BUDGET)
        }
    }
}

fn run_validate(project: PathBuf, graph: PathBuf, typing: PathBuf) -> ExitCode {
    let schema = match Project::load_shex(&project) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let nt = match fs::read_to_string(&graph) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", graph.display())),
    };
    let ty = match fs::read_to_string(&typing) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", typing.display())),
    };
    let typed_graph = match ntriples::graph_from_files(&nt, &ty) {
        Ok(g) => g,
        Err(e) => return input_error(e),
    };
    let violations = validate_typed_graph(&typed_graph, &schema);
    let report = ValidateReport {
        valid: violations.is_empty(),
        violations: violations.iter().map(|v| v.to_string()).collect(),
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ANALYSIS)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::CompileShex { project } => run_compile_shex(project),
        Command::Check { project } => run_check(project),
        Command::Exchange { project, out, trace, budget, complete } => {
            run_exchange(project, out, trace, budget, complete)
        }
        Command::Validate { project, graph, typing } => run_validate(project, graph, typing),
    }
}
