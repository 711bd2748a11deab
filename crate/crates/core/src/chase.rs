//! The chase: materializing a target graph from a source instance.
//!
//! Source rules are saturated first; their bodies only read source facts,
//! so a single pass reaches their fixpoint. The compiled schema
//! dependencies then run round-robin in a deterministic order: typing tgds
//! copy types along triples, lower-bound tgds invent typed nulls (a null
//! literal when the constraint targets `Lit`, a blank node otherwise), and
//! upper-bound egds merge values, failing when both are non-null.

use std::fmt;

use crate::constructor::ConstructorRegistry;
use crate::dependency::{Dependency, Head, Term};
use crate::eval::{self, Binding, EvalError};
use crate::mapping::{DataExchangeSetting, FullyTypedReport};
use crate::relational::{FdViolation, Instance, InstanceError};
use crate::shex::{ShexSchema, TargetType, LIT_MARKER, TRIPLE};
use crate::typed_graph::{inst_to_rdf, GraphShapeError, TypedGraph};
use crate::value::Value;

/// Hands out fresh nulls with a single monotone counter shared by null
/// literals and blank nodes, seeded above every index already in use.
#[derive(Debug, Clone)]
pub struct NullAllocator {
    next: u64,
}

impl NullAllocator {
    pub fn new() -> Self {
        NullAllocator { next: 1 }
    }

    /// Starts above any allocator-named null occurring in the instance.
    pub fn above(values: impl IntoIterator<Item = Value>) -> Self {
        let max = values
            .into_iter()
            .filter_map(|v| v.null_index())
            .max()
            .unwrap_or(0);
        NullAllocator { next: max + 1 }
    }

    pub fn fresh_null_lit(&mut self) -> Value {
        let v = Value::null_lit(self.next);
        self.next += 1;
        v
    }

    pub fn fresh_blank(&mut self) -> Value {
        let v = Value::blank(format!("b{}", self.next));
        self.next += 1;
        v
    }
}

impl Default for NullAllocator {
    fn default() -> Self {
        Self::new()
    }
}

/// What a single chase step did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    NewFacts(Vec<(String, Vec<Value>)>),
    Merge { kept: Value, replaced: Value },
    Failure { left: Value, right: Value },
}

/// One applied chase step: the dependency, its trigger, and the outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChaseStep {
    pub dependency: Dependency,
    pub trigger: Binding,
    pub outcome: StepOutcome,
}

impl fmt::Display for ChaseStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {{", self.dependency.label)?;
        for (i, (var, value)) in self.trigger.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{var} -> {value}")?;
        }
        write!(f, "}} ")?;
        match &self.outcome {
            StepOutcome::NewFacts(facts) => {
                write!(f, "adds")?;
                for (rel, tuple) in facts {
                    write!(f, " {rel}{}", crate::relational::fmt_tuple(tuple))?;
                }
                Ok(())
            }
            StepOutcome::Merge { kept, replaced } => write!(f, "merges {replaced} into {kept}"),
            StepOutcome::Failure { left, right } => {
                write!(f, "fails: {left} and {right} are distinct non-nulls")
            }
        }
    }
}

/// Outcome of a chase run.
#[derive(Debug, Clone)]
pub enum ChaseResult {
    Solution { graph: TypedGraph, trace: Vec<ChaseStep> },
    Failed { trace: Vec<ChaseStep>, failing: ChaseStep },
    BudgetExceeded { trace: Vec<ChaseStep> },
}

impl ChaseResult {
    pub fn solution(&self) -> Option<&TypedGraph> {
        match self {
            ChaseResult::Solution { graph, .. } => Some(graph),
            _ => None,
        }
    }

    pub fn trace(&self) -> &[ChaseStep] {
        match self {
            ChaseResult::Solution { trace, .. }
            | ChaseResult::Failed { trace, .. }
            | ChaseResult::BudgetExceeded { trace } => trace,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ChaseError {
    Instance(InstanceError),
    InvalidSource(Vec<FdViolation>),
    NullInSource(Value),
    NotFullyTyped(FullyTypedReport),
    /// A lower-bound tgd whose null kind cannot be read off the schema.
    UntypedExistential { shape: String, predicate: String },
    Eval(EvalError),
    Graph(GraphShapeError),
    Completion(crate::completion::CompletionError),
}

impl fmt::Display for ChaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChaseError::Instance(e) => write!(f, "{e}"),
            ChaseError::InvalidSource(violations) => {
                write!(f, "source instance violates its fds: {}", violations[0])
            }
            ChaseError::NullInSource(v) => {
                write!(f, "source instance contains null value {v}")
            }
            ChaseError::NotFullyTyped(report) => {
                write!(f, "setting is not fully typed")?;
                if let Some(v) = report.violations.first() {
                    write!(f, ": {v}")?;
                }
                Ok(())
            }
            ChaseError::UntypedExistential { shape, predicate } => {
                write!(f, "no constraint types the invented value for {shape} / <{predicate}>")
            }
            ChaseError::Eval(e) => write!(f, "{e}"),
            ChaseError::Graph(e) => write!(f, "{e}"),
            ChaseError::Completion(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ChaseError {}

impl From<EvalError> for ChaseError {
    fn from(e: EvalError) -> Self {
        ChaseError::Eval(e)
    }
}

/// Dependency scan order; both are deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TriggerOrder {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug, Clone)]
pub struct ChaseConfig {
    /// Maximum number of applied steps before giving up.
    pub budget: usize,
    pub order: TriggerOrder,
}

impl Default for ChaseConfig {
    fn default() -> Self {
        ChaseConfig { budget: 100_000, order: TriggerOrder::Forward }
    }
}

/// All applicable (dependency, trigger) pairs in deterministic order:
/// dependency order first, then the sorted-fact match order of the bodies.
pub fn applicable_triggers<'d>(
    inst: &Instance,
    deps: &'d [Dependency],
    registry: &ConstructorRegistry,
) -> Result<Vec<(&'d Dependency, Binding)>, EvalError> {
    let mut out = Vec::new();
    for dep in deps {
        for binding in eval::falsifying_bindings(inst, dep, registry)? {
            out.push((dep, binding));
        }
    }
    Ok(out)
}

/// Picks the survivor of an egd merge: non-nulls win; between two nulls the
/// lower allocation index (then the smaller value) is kept.
fn merge_keep(a: &Value, b: &Value) -> (Value, Value) {
    let rank = |v: &Value| (v.is_null(), v.null_index().unwrap_or(u64::MAX), v.clone());
    if rank(a) <= rank(b) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Reads the (shape, predicate) context of a lower-bound tgd and picks the
/// invented value's kind from the schema: a null literal for `Lit` targets,
/// a blank node for shape targets.
fn invent_null(
    dep: &Dependency,
    schema: &ShexSchema,
    allocator: &mut NullAllocator,
) -> Result<Value, ChaseError> {
    let shape = dep.body.first().map(|a| a.relation.clone()).unwrap_or_default();
    let predicate = match &dep.head {
        Head::Atoms { atoms, .. } => atoms
            .iter()
            .find(|a| a.relation == TRIPLE)
            .and_then(|a| match a.terms.get(1) {
                Some(Term::Const(p)) => Some(p.text().to_string()),
                _ => None,
            }),
        Head::Equal(_, _) => None,
    };
    let predicate = predicate.ok_or_else(|| ChaseError::UntypedExistential {
        shape: shape.clone(),
        predicate: String::new(),
    })?;
    match schema.constraint(&shape, &predicate).map(|tc| &tc.target) {
        Some(TargetType::Lit) => Ok(allocator.fresh_null_lit()),
        Some(TargetType::Shape(_)) => Ok(allocator.fresh_blank()),
        None => Err(ChaseError::UntypedExistential { shape, predicate }),
    }
}

/// The result of one chase step: a successor instance or failure.
pub enum StepResult {
    Next(Instance, StepOutcome),
    Bottom { left: Value, right: Value },
}

/// Applies one dependency at one trigger.
///
/// Tgds add the instantiated head facts, inventing fresh typed nulls for
/// existential variables; egds merge a null into the other value, or fail
/// when both sides are distinct non-nulls.
pub fn chase_step(
    inst: &Instance,
    dep: &Dependency,
    trigger: &Binding,
    schema: &ShexSchema,
    registry: &ConstructorRegistry,
    allocator: &mut NullAllocator,
) -> Result<StepResult, ChaseError> {
    match &dep.head {
        Head::Equal(x, y) => {
            let vx = trigger
                .get(x)
                .ok_or_else(|| EvalError::UnboundVariable(x.clone()))?;
            let vy = trigger
                .get(y)
                .ok_or_else(|| EvalError::UnboundVariable(y.clone()))?;
            if !vx.is_null() && !vy.is_null() {
                return Ok(StepResult::Bottom { left: vx.clone(), right: vy.clone() });
            }
            let (kept, replaced) = merge_keep(vx, vy);
            let next = inst.replace_value(&replaced, &kept);
            Ok(StepResult::Next(next, StepOutcome::Merge { kept, replaced }))
        }
        Head::Atoms { exists, atoms } => {
            let mut binding = trigger.clone();
            for var in exists {
                let fresh = invent_null(dep, schema, allocator)?;
                binding.insert(var.clone(), fresh);
            }
            let facts = eval::head_facts(atoms, &binding, registry)?;
            let mut next = inst.clone();
            let mut added = Vec::new();
            for (rel, tuple) in facts {
                if next.insert(rel.clone(), tuple.clone()).map_err(ChaseError::Instance)? {
                    added.push((rel, tuple));
                }
            }
            Ok(StepResult::Next(next, StepOutcome::NewFacts(added)))
        }
    }
}

fn order_deps(deps: Vec<Dependency>, order: TriggerOrder) -> Vec<Dependency> {
    match order {
        TriggerOrder::Forward => deps,
        TriggerOrder::Reverse => deps.into_iter().rev().collect(),
    }
}

fn preflight(source: &Instance, setting: &DataExchangeSetting) -> Result<(), ChaseError> {
    source.check_arities(&setting.source).map_err(ChaseError::Instance)?;
    let fd_violations =
        crate::relational::check_fds(source, &setting.source).map_err(ChaseError::Instance)?;
    if !fd_violations.is_empty() {
        return Err(ChaseError::InvalidSource(fd_violations));
    }
    if let Some(null) = source.active_domain().into_iter().find(Value::is_null) {
        return Err(ChaseError::NullInSource(null));
    }
    let report = setting.check_fully_typed();
    if !report.ok() {
        return Err(ChaseError::NotFullyTyped(report));
    }
    Ok(())
}

/// What a chase phase ended with.
enum PhaseEnd {
    Fixpoint,
    Budget,
    Bottom(ChaseStep),
}

struct Engine<'a> {
    setting: &'a DataExchangeSetting,
    state: Instance,
    trace: Vec<ChaseStep>,
    steps: usize,
    budget: usize,
    allocator: NullAllocator,
}

impl<'a> Engine<'a> {
    fn new(source: &Instance, setting: &'a DataExchangeSetting, config: &ChaseConfig) -> Self {
        let rule_constants = setting.st_dependencies().into_iter().flat_map(|d| {
            let Head::Atoms { atoms, .. } = d.head else { return Vec::new() };
            atoms
                .into_iter()
                .flat_map(|a| a.terms)
                .filter_map(|t| match t {
                    Term::Const(v) => Some(v),
                    _ => None,
                })
                .collect::<Vec<_>>()
        });
        let allocator =
            NullAllocator::above(source.active_domain().into_iter().chain(rule_constants));
        Engine {
            setting,
            state: source.clone(),
            trace: Vec::new(),
            steps: 0,
            budget: config.budget,
            allocator,
        }
    }

    fn apply(&mut self, dep: &Dependency, trigger: Binding) -> Result<Option<PhaseEnd>, ChaseError> {
        if self.steps >= self.budget {
            return Ok(Some(PhaseEnd::Budget));
        }
        match chase_step(
            &self.state,
            dep,
            &trigger,
            &self.setting.target,
            &self.setting.registry,
            &mut self.allocator,
        )? {
            StepResult::Next(next, outcome) => {
                self.state = next;
                self.steps += 1;
                self.trace.push(ChaseStep { dependency: dep.clone(), trigger, outcome });
                Ok(None)
            }
            StepResult::Bottom { left, right } => Ok(Some(PhaseEnd::Bottom(ChaseStep {
                dependency: dep.clone(),
                trigger,
                outcome: StepOutcome::Failure { left, right },
            }))),
        }
    }

    /// Saturates the source rules; their bodies only read source facts, so
    /// one pass per rule reaches the fixpoint.
    fn st_phase(&mut self, order: TriggerOrder) -> Result<PhaseEnd, ChaseError> {
        let deps = order_deps(self.setting.st_dependencies(), order);
        for dep in &deps {
            for trigger in eval::falsifying_bindings(&self.state, dep, &self.setting.registry)? {
                if let Some(end) = self.apply(dep, trigger)? {
                    return Ok(end);
                }
            }
        }
        Ok(PhaseEnd::Fixpoint)
    }

    /// Round-robin fixpoint over the given dependencies: each dependency in
    /// turn applies at most one trigger; the loop ends after a full idle
    /// cycle, a failure, or budget exhaustion.
    fn round_robin(&mut self, deps: &[Dependency]) -> Result<PhaseEnd, ChaseError> {
        if deps.is_empty() {
            return Ok(PhaseEnd::Fixpoint);
        }
        let mut misses = 0usize;
        let mut i = 0usize;
        while misses < deps.len() {
            let dep = &deps[i];
            i = (i + 1) % deps.len();
            let trigger = eval::falsifying_bindings(&self.state, dep, &self.setting.registry)?
                .into_iter()
                .next();
            let Some(trigger) = trigger else {
                misses += 1;
                continue;
            };
            match self.apply(dep, trigger)? {
                None => misses = 0,
                Some(end) => return Ok(end),
            }
        }
        Ok(PhaseEnd::Fixpoint)
    }

    fn solution_graph(&self) -> Result<TypedGraph, ChaseError> {
        inst_to_rdf(&target_restriction(&self.state, &self.setting.target))
            .map_err(ChaseError::Graph)
    }
}

/// Runs the chase of a valid source instance with the setting's rules and
/// compiled schema dependencies.
///
/// Source rules are saturated first, then the target dependencies run
/// round-robin until fixpoint, failure, or budget exhaustion. On success the
/// target restriction of the final state is returned as a typed graph.
pub fn chase(
    source: &Instance,
    setting: &DataExchangeSetting,
    config: &ChaseConfig,
) -> Result<ChaseResult, ChaseError> {
    preflight(source, setting)?;
    let mut engine = Engine::new(source, setting, config);
    match engine.st_phase(config.order)? {
        PhaseEnd::Budget => return Ok(ChaseResult::BudgetExceeded { trace: engine.trace }),
        PhaseEnd::Bottom(_) => unreachable!("source rules have no equality heads"),
        PhaseEnd::Fixpoint => {}
    }
    let target_deps = order_deps(setting.target_dependencies(), config.order);
    match engine.round_robin(&target_deps)? {
        PhaseEnd::Budget => Ok(ChaseResult::BudgetExceeded { trace: engine.trace }),
        PhaseEnd::Bottom(failing) => Ok(ChaseResult::Failed { trace: engine.trace, failing }),
        PhaseEnd::Fixpoint => Ok(ChaseResult::Solution {
            graph: engine.solution_graph()?,
            trace: engine.trace,
        }),
    }
}

/// The completion-backed exchange: saturate the source rules, run only the
/// upper-bound egds (failure here means no solution exists at all), and
/// discharge the lower bounds with the canonical completion instead of
/// chasing them.
pub fn chase_with_completion(
    source: &Instance,
    setting: &DataExchangeSetting,
    config: &ChaseConfig,
) -> Result<ChaseResult, ChaseError> {
    preflight(source, setting)?;
    let mut engine = Engine::new(source, setting, config);
    match engine.st_phase(config.order)? {
        PhaseEnd::Budget => return Ok(ChaseResult::BudgetExceeded { trace: engine.trace }),
        PhaseEnd::Bottom(_) => unreachable!("source rules have no equality heads"),
        PhaseEnd::Fixpoint => {}
    }
    let egds = order_deps(
        crate::shex2dep::compile_egds(&setting.target),
        config.order,
    );
    match engine.round_robin(&egds)? {
        PhaseEnd::Budget => return Ok(ChaseResult::BudgetExceeded { trace: engine.trace }),
        PhaseEnd::Bottom(failing) => {
            return Ok(ChaseResult::Failed { trace: engine.trace, failing })
        }
        PhaseEnd::Fixpoint => {}
    }
    let target = target_restriction(&engine.state, &setting.target);
    let completed = crate::completion::canonical_completion(&target, &setting.target)
        .map_err(ChaseError::Completion)?;
    let graph = inst_to_rdf(&completed).map_err(ChaseError::Graph)?;
    Ok(ChaseResult::Solution { graph, trace: engine.trace })
}

/// The target fragment of a chase state: triples, shape facts, and literal
/// typing.
pub fn target_restriction(state: &Instance, schema: &ShexSchema) -> Instance {
    let mut keep: Vec<&str> = vec![TRIPLE, LIT_MARKER];
    keep.extend(schema.shapes().map(String::as_str));
    state.restrict_to(keep)
}
