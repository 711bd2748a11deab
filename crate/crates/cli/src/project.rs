//! Project directories: `schema.rel`, `schema.shex`, `mapping.st`, an
//! optional `tables/` directory of constructor tables, and an `instance/`
//! directory of one headerless CSV per relation.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rel2rdf_core::dependency::Term;
use rel2rdf_core::mapping::{normalize, DataExchangeSetting, NormalizeError, StTgd};
use rel2rdf_core::relational::{Instance, RelationalSchema};
use rel2rdf_core::shex::ShexSchema;
use rel2rdf_core::value::{Value, NULL_LIT_PREFIX};
use rel2rdf_core::ConstructorRegistry;

use crate::parse::{self, ParseError};

#[derive(Debug)]
pub enum ProjectError {
    Io { path: PathBuf, error: std::io::Error },
    Parse { path: PathBuf, error: ParseError },
    Csv { path: PathBuf, message: String },
    Table { path: PathBuf, message: String },
    /// A constructor used with inconsistent arities across the rules.
    ConstructorArity { symbol: String },
    UnknownCsvFile { path: PathBuf },
    MissingInstanceDir { path: PathBuf },
}

impl fmt::Display for ProjectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectError::Io { path, error } => write!(f, "{}: {error}", path.display()),
            ProjectError::Parse { path, error } => write!(f, "{}: {error}", path.display()),
            ProjectError::Csv { path, message } => write!(f, "{}: {message}", path.display()),
            ProjectError::Table { path, message } => write!(f, "{}: {message}", path.display()),
            ProjectError::ConstructorArity { symbol } => {
                write!(f, "constructor {symbol} used with inconsistent arities")
            }
            ProjectError::UnknownCsvFile { path } => {
                write!(f, "{}: no relation declared for this file", path.display())
            }
            ProjectError::MissingInstanceDir { path } => {
                write!(f, "{}: instance directory not found", path.display())
            }
        }
    }
}

impl std::error::Error for ProjectError {}

/// A loaded project: parsed schemas, raw and normalized rules, registry.
pub struct Project {
    pub root: PathBuf,
    pub source: RelationalSchema,
    pub target: ShexSchema,
    pub raw_rules: Vec<StTgd>,
    /// `Err` carries the reason the rules resist normalization.
    pub normalized: Result<Vec<rel2rdf_core::NormalizedStTgd>, NormalizeError>,
    pub registry: ConstructorRegistry,
}

fn read(path: &Path) -> Result<String, ProjectError> {
    fs::read_to_string(path).map_err(|error| ProjectError::Io { path: path.to_path_buf(), error })
}

/// Collects constructor symbols with their arities from the rule heads.
fn scan_constructors(rules: &[StTgd]) -> Result<BTreeMap<String, usize>, ProjectError> {
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    for rule in rules {
        for atom in &rule.head {
            for term in &atom.terms {
                if let Term::App(symbol, args) = term {
                    match arities.get(symbol) {
                        Some(&a) if a != args.len() => {
                            return Err(ProjectError::ConstructorArity { symbol: symbol.clone() })
                        }
                        Some(_) => {}
                        None => {
                            arities.insert(symbol.clone(), args.len());
                        }
                    }
                }
            }
        }
    }
    Ok(arities)
}

fn load_tables(registry: &mut ConstructorRegistry, dir: &Path) -> Result<(), ProjectError> {
    if !dir.is_dir() {
        return Ok(());
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|error| ProjectError::Io { path: dir.to_path_buf(), error })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
        .collect();
    paths.sort();
    for path in paths {
        let symbol = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let Some(arity) = registry.arity(&symbol) else {
            return Err(ProjectError::Table {
                path,
                message: format!("constructor {symbol} is not used by the mapping"),
            });
        };
        let text = read(&path)?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != arity + 1 {
                return Err(ProjectError::Table {
                    path,
                    message: format!(
                        "line {}: expected {} tab-separated columns, found {}",
                        i + 1,
                        arity + 1,
                        cells.len()
                    ),
                });
            }
            let args: Vec<Value> = cells[..arity].iter().map(|c| Value::lit(*c)).collect();
            if let Some(bad) = args.iter().find(|v| v.is_null()) {
                return Err(ProjectError::Table {
                    path,
                    message: format!("line {}: reserved null text {}", i + 1, bad),
                });
            }
            registry
                .set_mapping(&symbol, args, Value::iri(cells[arity].to_string()))
                .map_err(|e| ProjectError::Table {
                    path: path.clone(),
                    message: format!("line {}: {e}", i + 1),
                })?;
        }
    }
    Ok(())
}

impl Project {
    pub fn load(root: impl AsRef<Path>) -> Result<Project, ProjectError> {
        let root = root.as_ref().to_path_buf();
        let rel_path = root.join("schema.rel");
        let source = parse::parse_relational_schema(&read(&rel_path)?)
            .map_err(|error| ProjectError::Parse { path: rel_path, error })?;
        let target = Self::load_shex(&root)?;
        let map_path = root.join("mapping.st");
        let raw_rules = parse::parse_mapping(&read(&map_path)?, &source)
            .map_err(|error| ProjectError::Parse { path: map_path, error })?;
        let mut registry = ConstructorRegistry::new();
        for (symbol, arity) in scan_constructors(&raw_rules)? {
            registry.declare(symbol, arity).expect("fresh registry");
        }
        load_tables(&mut registry, &root.join("tables"))?;
        let normalized = normalize(&raw_rules);
        Ok(Project { root, source, target, raw_rules, normalized, registry })
    }

    /// Loads only the shape schema; enough for `compile-shex` and
    /// `validate`.
    pub fn load_shex(root: impl AsRef<Path>) -> Result<ShexSchema, ProjectError> {
        let path = root.as_ref().join("schema.shex");
        parse::parse_shex(&read(&path)?).map_err(|error| ProjectError::Parse { path, error })
    }

    /// The setting, available once the rules normalize.
    pub fn setting(&self) -> Option<DataExchangeSetting> {
        self.normalized.as_ref().ok().map(|rules| DataExchangeSetting {
            source: self.source.clone(),
            target: self.target.clone(),
            rules: rules.clone(),
            registry: self.registry.clone(),
        })
    }

    pub fn load_instance(&self) -> Result<Instance, ProjectError> {
        load_instance(&self.root.join("instance"), &self.source)
    }
}

/// Loads one headerless CSV per relation; cells become literal values.
pub fn load_instance(dir: &Path, schema: &RelationalSchema) -> Result<Instance, ProjectError> {
    if !dir.is_dir() {
        return Err(ProjectError::MissingInstanceDir { path: dir.to_path_buf() });
    }
    let mut inst = Instance::new();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|error| ProjectError::Io { path: dir.to_path_buf(), error })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    for path in paths {
        let relation = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let Some(arity) = schema.arity(&relation) else {
            return Err(ProjectError::UnknownCsvFile { path });
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_path(&path)
            .map_err(|e| ProjectError::Csv { path: path.clone(), message: e.to_string() })?;
        for (i, record) in reader.records().enumerate() {
            let record = record
                .map_err(|e| ProjectError::Csv { path: path.clone(), message: e.to_string() })?;
            if record.len() != arity {
                return Err(ProjectError::Csv {
                    path,
                    message: format!(
                        "row {}: {relation} has arity {arity}, row has {} cells",
                        i + 1,
                        record.len()
                    ),
                });
            }
            let tuple: Vec<Value> = record.iter().map(Value::lit).collect();
            if let Some(bad) = tuple.iter().find(|v| v.is_null()) {
                return Err(ProjectError::Csv {
                    path,
                    message: format!(
                        "row {}: reserved literal prefix {NULL_LIT_PREFIX} in {bad}",
                        i + 1
                    ),
                });
            }
            inst.insert(relation.clone(), tuple)
                .map_err(|e| ProjectError::Csv { path: path.clone(), message: e.to_string() })?;
        }
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_project(dir: &Path) {
        fs::create_dir_all(dir.join("instance")).unwrap();
        fs::write(dir.join("schema.rel"), "Bug(bid, descr, uid);\nkey Bug: bid;\n").unwrap();
        fs::write(dir.join("schema.shex"), "TBug { :descr :: Lit [1] }\n").unwrap();
        fs::write(
            dir.join("mapping.st"),
            "Bug(b, d, u) => Triple(bug2iri(b), :descr, d), TBug(bug2iri(b)), Lit(d);\n",
        )
        .unwrap();
        fs::write(dir.join("instance/Bug.csv"), "1,Boom!,1\n2,\"with, comma\",2\n").unwrap();
    }

    #[test]
    fn loads_a_minimal_project() {
        let dir = tempfile::tempdir().unwrap();
        write_project(dir.path());
        let project = Project::load(dir.path()).unwrap();
        assert!(project.normalized.is_ok());
        assert_eq!(project.registry.arity("bug2iri"), Some(1));
        let inst = project.load_instance().unwrap();
        assert_eq!(inst.tuples("Bug").count(), 2);
        assert!(inst.contains(
            "Bug",
            &[Value::lit("2"), Value::lit("with, comma"), Value::lit("2")]
        ));
    }

    #[test]
    fn extra_column_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_project(dir.path());
        fs::write(dir.path().join("instance/Bug.csv"), "1,Boom!,1,extra\n").unwrap();
        let project = Project::load(dir.path()).unwrap();
        let err = project.load_instance().unwrap_err();
        assert!(matches!(err, ProjectError::Csv { .. }), "{err}");
    }

    #[test]
    fn unknown_csv_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_project(dir.path());
        fs::write(dir.path().join("instance/Ghost.csv"), "1\n").unwrap();
        let project = Project::load(dir.path()).unwrap();
        assert!(matches!(project.load_instance(), Err(ProjectError::UnknownCsvFile { .. })));
    }

    #[test]
    fn empty_instance_dir_is_empty_instance() {
        let dir = tempfile::tempdir().unwrap();
        write_project(dir.path());
        fs::remove_file(dir.path().join("instance/Bug.csv")).unwrap();
        let project = Project::load(dir.path()).unwrap();
        assert!(project.load_instance().unwrap().is_empty());
    }

    #[test]
    fn tables_feed_the_registry() {
        let dir = tempfile::tempdir().unwrap();
        write_project(dir.path());
        fs::create_dir_all(dir.path().join("tables")).unwrap();
        fs::write(dir.path().join("tables/bug2iri.tsv"), "1\tbug:1\n").unwrap();
        let project = Project::load(dir.path()).unwrap();
        assert_eq!(
            project.registry.interpret("bug2iri", &[Value::lit("1")]).unwrap(),
            Value::iri("bug:1")
        );
    }
}
