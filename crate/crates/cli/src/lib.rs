//! Batch runner: reads a presentation, executes the requested tasks in
//! dependency order and assembles a report.
//!
//! Task dependencies:
//!
//! ```text
//! resolve ── quasi_koszul, koszul
//! ext ── dual ── double_dual, self_injective_dual
//! ext ── as_regular
//! gr, opposite (independent)
//! ```
//!
//! Requesting a task adds its prerequisites to the run. The minimal
//! resolution of `S`, the resolutions of the simples and `E(A)` are each
//! built at most once per run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use koszulkit_core::algebra::{associated_graded, build_algebra, AlgebraDocument, TruncatedAlgebra};
use koszulkit_core::ext::{
    generated_in_degree_one, koszul_dual_double, DimEntry, DualityReport, ExtAlgebra, GenerationReport,
    SimpleResolutions,
};
use koszulkit_core::koszul::{
    classical_cross_check, koszul_certificate, quasi_koszul_certificate, ClassicalCrossCheck, KoszulCertificate,
    Verdict,
};
use koszulkit_core::module::GradedModule;
use koszulkit_core::presentation::{parse_document, Document, Limits, Task};
use koszulkit_core::regularity::{
    as_regular_certificate, gr_regularity_transfer, self_injective_check, RegularityReport, RegularityTransfer,
    SelfInjectivityReport,
};
use koszulkit_core::resolution::{
    resolution_window, BettiTable, LinearityReport, ProjectiveDimension, Resolution, ResolutionCertificate,
};
use koszulkit_core::{Error, Field, FieldSpec, PrimeField, Rationals};

pub const REPORT_SCHEMA: u32 = 1;

/// Execution order; every task comes after its prerequisites.
pub const TASK_ORDER: [Task; 10] = [
    Task::Resolve,
    Task::QuasiKoszul,
    Task::Koszul,
    Task::Gr,
    Task::Opposite,
    Task::Ext,
    Task::Dual,
    Task::DoubleDual,
    Task::AsRegular,
    Task::SelfInjectiveDual,
];

/// Direct prerequisites of a task.
pub fn prerequisites(task: Task) -> &'static [Task] {
    match task {
        Task::QuasiKoszul | Task::Koszul => &[Task::Resolve],
        Task::Dual | Task::AsRegular => &[Task::Ext],
        Task::DoubleDual | Task::SelfInjectiveDual => &[Task::Dual],
        Task::Resolve | Task::Gr | Task::Opposite | Task::Ext => &[],
    }
}

/// Requested tasks plus everything they depend on, in execution order.
pub fn schedule(requested: &[Task]) -> Vec<Task> {
    let mut needed: BTreeSet<Task> = BTreeSet::new();
    let mut stack: Vec<Task> = requested.to_vec();
    while let Some(t) = stack.pop() {
        if needed.insert(t) {
            stack.extend_from_slice(prerequisites(t));
        }
    }
    TASK_ORDER.into_iter().filter(|t| needed.contains(t)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected text or json)")),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Overrides the `[tasks] run` list of the input file.
    pub tasks: Option<Vec<Task>>,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub field: Option<FieldSpec>,
    /// Record wall-clock time per task. Off by default so reports are
    /// reproducible byte for byte.
    pub timings: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            ..RunConfig::default()
        }
    }
}

/// Failures that stop a run before any task executes.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(Error),
    #[error("no tasks requested")]
    NoTasks,
    #[error("cannot start thread pool: {0}")]
    Threads(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Threads(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSummary {
    pub vertices: Vec<String>,
    pub arrows: usize,
    pub relations: usize,
    /// `dim A_t` for `t` up to the truncation window.
    pub dims: Vec<usize>,
    pub window: usize,
    /// Top degree when `A` is finite-dimensional.
    pub finite_top: Option<usize>,
    pub limits: Limits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// The engine failed while computing the task.
    Error,
    /// The task cannot be carried out on this input: a precondition does
    /// not hold, the answer is not decidable in the window, or a
    /// prerequisite failed.
    Impossible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskError {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: Task,
    /// False for tasks added only as prerequisites.
    pub requested: bool,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<TaskResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<TaskError>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_us: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskResult {
    Resolve(ResolveResult),
    QuasiKoszul(QuasiKoszulResult),
    Koszul(KoszulResult),
    Gr(GrResult),
    Opposite(OppositeResult),
    Ext(ExtResult),
    Dual(DualResult),
    DoubleDual(DualityReport),
    AsRegular(AsRegularResult),
    SelfInjectiveDual(SelfInjectiveDualResult),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolveResult {
    pub n_max: usize,
    /// Internal degrees are exact up to this bound.
    pub window: usize,
    pub betti: BettiTable,
    pub certificate: ResolutionCertificate,
    pub projective_dimension: ProjectiveDimension,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiKoszulResult {
    pub certificate: KoszulCertificate,
    /// Independent check: `E(A)` generated in degree one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation: Option<GenerationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulResult {
    pub certificate: KoszulCertificate,
    /// Present when `A_0` is semisimple.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalCrossCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrResult {
    pub dims: Vec<usize>,
    /// Bounds of the resolution of `S` over `Gr_J A`.
    pub n_max: usize,
    pub window: usize,
    pub finite_top: Option<usize>,
    /// `bidegree[i][t] = dim (J^i/J^(i+1))_t`.
    pub bidegree: Vec<Vec<usize>>,
    pub document: AlgebraDocument,
    pub betti: BettiTable,
    /// Linearity of the resolution of `S` over `Gr_J A`.
    pub linearity: LinearityReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OppositeResult {
    pub original: Verdict,
    pub opposite: KoszulCertificate,
    pub agree: bool,
    /// Both sides are finite-dimensional, so the verdicts must agree.
    pub finite: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtEntry {
    pub n: usize,
    pub t: usize,
    pub source: String,
    pub target: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtResult {
    pub n_max: usize,
    pub window: usize,
    pub global_dimension: ProjectiveDimension,
    /// `dim Ext^n(S_source, S_target)_t`, nonzero entries.
    pub entries: Vec<ExtEntry>,
    pub totals: Vec<usize>,
    pub generation: GenerationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualResult {
    pub n_max: usize,
    pub dims: Vec<usize>,
    pub finite_top: Option<usize>,
    /// By homological degree and internal degree over `A`.
    pub bigraded: Vec<DimEntry>,
    pub document: AlgebraDocument,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsRegularResult {
    pub algebra: RegularityReport,
    /// Comparison with `Gr_J A` and self-injectivity of `E(A)`; absent when
    /// the global dimension is not certified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<RegularityTransfer>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfInjectiveDualResult {
    /// `E(A)` is computed from resolutions of length at most `n_max`.
    pub n_max: usize,
    pub report: SelfInjectivityReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineInfo {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub report_schema: u32,
    pub engine: EngineInfo,
    /// SHA-256 of the input file bytes.
    pub input_sha256: String,
    pub field: FieldSpec,
    pub algebra: AlgebraSummary,
    pub tasks: Vec<TaskReport>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn task(&self, task: Task) -> Option<&TaskReport> {
        self.tasks.iter().find(|t| t.task == task)
    }

    /// 0 when every task ran; 3 if any engine error occurred; otherwise 4
    /// if some task was impossible.
    pub fn exit_code(&self) -> i32 {
        if self.tasks.iter().any(|t| t.status == Status::Error) {
            3
        } else if self.tasks.iter().any(|t| t.status == Status::Impossible) {
            4
        } else {
            0
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses the input and builds the algebra, without running any task.
pub fn validate_source(text: &str, field: Option<FieldSpec>) -> Result<AlgebraSummary, RunError> {
    let doc = parse_document(text).map_err(RunError::Invalid)?;
    let p = match field {
        Some(f) => doc.presentation.with_field(f),
        None => doc.presentation,
    };
    match p.field {
        FieldSpec::Rationals => summarize(&p, &build_algebra(&p, &Rationals).map_err(RunError::Invalid)?),
        FieldSpec::Prime(q) => {
            let f = PrimeField::new(q).map_err(RunError::Invalid)?;
            summarize(&p, &build_algebra(&p, &f).map_err(RunError::Invalid)?)
        }
    }
}

fn summarize<F: Field>(
    p: &koszulkit_core::presentation::Presentation,
    a: &TruncatedAlgebra<F>,
) -> Result<AlgebraSummary, RunError> {
    Ok(AlgebraSummary {
        vertices: p.quiver.vertices.clone(),
        arrows: p.quiver.arrows.len(),
        relations: p.relations.len(),
        dims: a.dims(),
        window: a.window(),
        finite_top: a.finite_top(),
        limits: p.limits,
    })
}

/// Reads `config.input` and runs it.
pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let bytes = std::fs::read(&config.input).map_err(|source| RunError::Io {
        path: config.input.clone(),
        source,
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| {
        RunError::Invalid(Error::Presentation("input is not valid UTF-8".into()))
    })?;
    run_bytes(&text, &sha256_hex(&bytes), config)
}

/// Runs an in-memory document; `config.input` is ignored.
pub fn run_source(text: &str, config: &RunConfig) -> Result<Report, RunError> {
    run_bytes(text, &sha256_hex(text.as_bytes()), config)
}

fn run_bytes(text: &str, digest: &str, config: &RunConfig) -> Result<Report, RunError> {
    let doc = parse_document(text).map_err(RunError::Invalid)?;
    let requested = config.tasks.clone().unwrap_or_else(|| doc.tasks.clone());
    if requested.is_empty() {
        return Err(RunError::NoTasks);
    }
    let field = config.field.unwrap_or(doc.presentation.field);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| RunError::Threads(e.to_string()))?;
    pool.install(|| match field {
        FieldSpec::Rationals => execute(&doc, Rationals, field, &requested, digest, config.timings),
        FieldSpec::Prime(p) => {
            let f = PrimeField::new(p).map_err(RunError::Invalid)?;
            execute(&doc, f, field, &requested, digest, config.timings)
        }
    })
}

fn execute<F: Field>(
    doc: &Document,
    field: F,
    spec: FieldSpec,
    requested: &[Task],
    digest: &str,
    timings: bool,
) -> Result<Report, RunError> {
    let p = doc.presentation.clone().with_field(spec);
    let alg = Arc::new(build_algebra(&p, &field).map_err(RunError::Invalid)?);
    let algebra = summarize(&p, &alg)?;
    let mut engine = Engine::new(alg.clone(), p.limits);
    let mut warnings = Vec::new();
    if !alg.is_finite() {
        warnings.push(format!(
            "the algebra is infinite-dimensional; it is truncated at internal degree {} and verdicts hold in the stated windows only",
            alg.window()
        ));
    }

    let mut tasks: Vec<TaskReport> = Vec::new();
    for task in schedule(requested) {
        let start = Instant::now();
        let failed_dep = prerequisites(task)
            .iter()
            .find(|d| tasks.iter().any(|r| r.task == **d && r.status != Status::Ok));
        let (status, result, error) = match failed_dep {
            Some(dep) => (
                Status::Impossible,
                None,
                Some(TaskError {
                    kind: "dependency".into(),
                    message: format!("prerequisite `{dep}` did not complete"),
                }),
            ),
            None => match engine.run(task, &mut warnings) {
                Ok(r) => (Status::Ok, Some(r), None),
                Err(e) => {
                    let status = match e {
                        Error::Precondition(_) | Error::Inconclusive(_) => Status::Impossible,
                        _ => Status::Error,
                    };
                    (status, None, Some(task_error(&e)))
                }
            },
        };
        tasks.push(TaskReport {
            task,
            requested: requested.contains(&task),
            status,
            result,
            error,
            wall_clock_us: timings.then(|| start.elapsed().as_micros() as u64),
        });
    }

    Ok(Report {
        report_schema: REPORT_SCHEMA,
        engine: EngineInfo {
            name: "koszulkit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        input_sha256: digest.to_string(),
        field: spec,
        algebra,
        tasks,
        warnings,
    })
}

fn task_error(e: &Error) -> TaskError {
    let kind = match e {
        Error::Module(_) => "module",
        Error::Window(_) => "window",
        Error::Lifting(_) => "lifting",
        Error::Precondition(_) => "precondition",
        Error::Inconclusive(_) => "inconclusive",
        Error::Explosion(_) => "explosion",
        _ => "engine",
    };
    TaskError {
        kind: kind.into(),
        message: e.to_string(),
    }
}

/// Shared computations for one run.
struct Engine<F: Field> {
    alg: Arc<TruncatedAlgebra<F>>,
    n_max: usize,
    k_max: usize,
    resolution: Option<Result<Arc<Resolution<F>>, Error>>,
    full: Option<Result<KoszulCertificate, Error>>,
    ext: Option<Result<Arc<ExtAlgebra<F>>, Error>>,
}

impl<F: Field> Engine<F> {
    fn new(alg: Arc<TruncatedAlgebra<F>>, limits: Limits) -> Self {
        Engine {
            alg,
            n_max: limits.hom_max,
            k_max: limits.jpower_max,
            resolution: None,
            full: None,
            ext: None,
        }
    }

    fn resolution(&mut self) -> Result<Arc<Resolution<F>>, Error> {
        let (alg, n_max) = (&self.alg, self.n_max);
        self.resolution
            .get_or_insert_with(|| resolve_top(alg, n_max).map(Arc::new))
            .clone()
    }

    fn full_certificate(&mut self) -> Result<KoszulCertificate, Error> {
        if self.full.is_none() {
            let r = self.resolution();
            self.full = Some(r.and_then(|r| koszul_certificate(&r, self.n_max, self.k_max)));
        }
        self.full.clone().unwrap()
    }

    fn ext(&mut self) -> Result<Arc<ExtAlgebra<F>>, Error> {
        let (alg, n_max) = (&self.alg, self.n_max);
        self.ext
            .get_or_insert_with(|| {
                let simples = Arc::new(SimpleResolutions::build(alg.clone(), n_max)?);
                ExtAlgebra::from_resolutions(simples).map(Arc::new)
            })
            .clone()
    }

    fn run(&mut self, task: Task, warnings: &mut Vec<String>) -> Result<TaskResult, Error> {
        match task {
            Task::Resolve => {
                let r = self.resolution()?;
                Ok(TaskResult::Resolve(ResolveResult {
                    n_max: self.n_max,
                    window: r.window(),
                    betti: r.betti_table(),
                    certificate: r.certify(),
                    projective_dimension: r.projective_dimension(),
                }))
            }
            Task::QuasiKoszul => {
                let r = self.resolution()?;
                let certificate = quasi_koszul_certificate(&r, self.n_max)?;
                let generation = match self.ext() {
                    Ok(e) => Some(generated_in_degree_one(&e)),
                    Err(e) => {
                        warnings.push(format!("quasi_koszul: generation cross-check skipped: {e}"));
                        None
                    }
                };
                let agree = generation.as_ref().map(|g| g.pass == certificate.passes());
                if agree == Some(false) {
                    warnings.push(
                        "quasi_koszul: certificate and degree-one generation of E(A) disagree inside the window".into(),
                    );
                }
                Ok(TaskResult::QuasiKoszul(QuasiKoszulResult {
                    certificate,
                    generation,
                    agree,
                }))
            }
            Task::Koszul => {
                let certificate = self.full_certificate()?;
                let classical = if self.alg.dim(0) == self.alg.num_vertices() {
                    Some(classical_cross_check(&self.alg, self.n_max, self.k_max)?)
                } else {
                    None
                };
                Ok(TaskResult::Koszul(KoszulResult { certificate, classical }))
            }
            Task::Gr => {
                let gr = associated_graded(&self.alg)?;
                let ga = Arc::new(gr.algebra.clone());
                let r = resolve_top(&ga, self.n_max)?;
                Ok(TaskResult::Gr(GrResult {
                    dims: ga.dims(),
                    n_max: self.n_max,
                    window: r.window(),
                    finite_top: ga.finite_top(),
                    bidegree: gr.bidegree.clone(),
                    document: ga.to_document(),
                    betti: r.betti_table(),
                    linearity: r.linearity_check()?,
                }))
            }
            Task::Opposite => {
                let original = self.full_certificate()?.verdict;
                let op = Arc::new(self.alg.opposite());
                let r = resolve_top(&op, self.n_max)?;
                let opposite = koszul_certificate(&r, self.n_max, self.k_max)?;
                let agree = opposite.verdict == original;
                let finite = self.alg.is_finite();
                if finite && !agree {
                    warnings.push("opposite: Koszul verdicts of A and A^op differ".into());
                }
                Ok(TaskResult::Opposite(OppositeResult {
                    original,
                    opposite,
                    agree,
                    finite,
                }))
            }
            Task::Ext => {
                let e = self.ext()?;
                let names = self.alg.vertex_names();
                let mut counts: BTreeMap<(usize, usize, usize, usize), usize> = BTreeMap::new();
                let mut totals = Vec::new();
                for n in 0..=e.n_max() {
                    totals.push(e.classes(n).len());
                    for c in e.classes(n) {
                        *counts.entry((n, c.t, c.source.unwrap_or(0), c.target)).or_insert(0) += 1;
                    }
                }
                Ok(TaskResult::Ext(ExtResult {
                    n_max: e.n_max(),
                    window: e.simples().window(),
                    global_dimension: e.simples().global_dimension(),
                    entries: counts
                        .into_iter()
                        .map(|((n, t, s, v), dim)| ExtEntry {
                            n,
                            t,
                            source: names[s].clone(),
                            target: names[v].clone(),
                            dim,
                        })
                        .collect(),
                    totals,
                    generation: generated_in_degree_one(&e),
                }))
            }
            Task::Dual => {
                let e = self.ext()?;
                let ea = e.algebra();
                Ok(TaskResult::Dual(DualResult {
                    n_max: e.n_max(),
                    dims: ea.dims(),
                    finite_top: ea.finite_top(),
                    bigraded: e
                        .bigraded_dims()
                        .into_iter()
                        .filter(|(_, d)| *d > 0)
                        .map(|((degree, weight), dim)| DimEntry { degree, weight, dim })
                        .collect(),
                    document: ea.to_document(),
                }))
            }
            Task::DoubleDual => {
                if let Ok(c) = self.full_certificate() {
                    if !c.passes() {
                        warnings.push(
                            "double_dual: the input is not Koszul in the window; E(E(A)) need not match Gr_J A".into(),
                        );
                    }
                }
                let e = self.ext()?;
                Ok(TaskResult::DoubleDual(koszul_dual_double(&e)?))
            }
            Task::AsRegular => {
                let e = self.ext()?;
                let algebra = as_regular_certificate(e.simples())?;
                let transfer = match gr_regularity_transfer(&e) {
                    Ok(t) => Some(t),
                    Err(Error::Inconclusive(msg)) => {
                        warnings.push(format!("as_regular: transfer not checked: {msg}"));
                        None
                    }
                    Err(e) => return Err(e),
                };
                Ok(TaskResult::AsRegular(AsRegularResult { algebra, transfer }))
            }
            Task::SelfInjectiveDual => {
                let e = self.ext()?;
                Ok(TaskResult::SelfInjectiveDual(SelfInjectiveDualResult {
                    n_max: e.n_max(),
                    report: self_injective_check(e.algebra())?,
                }))
            }
        }
    }
}

fn resolve_top<F: Field>(alg: &Arc<TruncatedAlgebra<F>>, n_max: usize) -> Result<Resolution<F>, Error> {
    let w = resolution_window(alg, 0, n_max);
    let s = GradedModule::semisimple_top(alg.clone(), w)?;
    Resolution::build(Arc::new(s), n_max)
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(report),
    }
}

/// Parses a JSON report.
pub fn parse_report(json: &str) -> serde_json::Result<Report> {
    serde_json::from_str(json)
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let a = &r.algebra;
    let _ = writeln!(out, "koszulkit {} (report schema {})", r.engine.version, r.report_schema);
    let _ = writeln!(out, "input sha256 {}", r.input_sha256);
    let _ = writeln!(out, "field {}", r.field);
    let _ = writeln!(
        out,
        "algebra: {} vertices [{}], {} arrows, {} relations",
        a.vertices.len(),
        a.vertices.join(", "),
        a.arrows,
        a.relations
    );
    let _ = writeln!(
        out,
        "  dims {:?}, window {}, {}",
        a.dims,
        a.window,
        match a.finite_top {
            Some(t) => format!("finite, top degree {t}"),
            None => "infinite (truncated)".into(),
        }
    );
    let _ = writeln!(
        out,
        "  limits: weight_max {}, nilpotency_bound {}, hom_max {}, jpower_max {}",
        a.limits.weight_max, a.limits.nilpotency_bound, a.limits.hom_max, a.limits.jpower_max
    );
    for t in &r.tasks {
        out.push('\n');
        let implied = if t.requested { "" } else { " (prerequisite)" };
        let status = match t.status {
            Status::Ok => "ok",
            Status::Error => "ERROR",
            Status::Impossible => "IMPOSSIBLE",
        };
        let _ = write!(out, "== {}{implied}: {status}", t.task);
        if let Some(us) = t.wall_clock_us {
            let _ = write!(out, " [{:.3} s]", us as f64 / 1e6);
        }
        out.push('\n');
        if let Some(e) = &t.error {
            let _ = writeln!(out, "  {}: {}", e.kind, e.message);
        }
        if let Some(res) = &t.result {
            render_result(&mut out, res);
        }
    }
    if !r.warnings.is_empty() {
        out.push_str("\nwarnings:\n");
        for w in &r.warnings {
            let _ = writeln!(out, "  - {w}");
        }
    }
    out
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

fn yes(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn render_certificate(out: &mut String, c: &KoszulCertificate) {
    let w = &c.window;
    let _ = writeln!(
        out,
        "  {:?} certificate: {} (n <= {}, k <= {}, D = {})",
        c.mode,
        match c.verdict {
            Verdict::PassInWindow => "pass in window",
            Verdict::Fail => "FAIL",
        },
        w.n_max,
        w.k_max,
        w.degree
    );
    let _ = writeln!(out, "  cells lhs/rhs (* marks a gap):");
    let _ = write!(out, "  {:>4} |", "n\\k");
    for k in 1..=w.k_max {
        let _ = write!(out, " {k:>7}");
    }
    out.push('\n');
    for n in 0..=w.n_max {
        let _ = write!(out, "  {n:>4} |");
        for k in 1..=w.k_max {
            let cell = match c.cell(n, k) {
                Some(x) => format!("{}{}/{}", if x.eq { "" } else { "*" }, x.lhs, x.rhs),
                None => "-".into(),
            };
            let _ = write!(out, " {cell:>7}");
        }
        out.push('\n');
    }
    if let Some(wit) = &c.witness {
        let _ = writeln!(
            out,
            "  witness at (n, k) = ({}, {}), degree {}, vertex {}:",
            wit.n, wit.k, wit.t, wit.vertex
        );
        let _ = writeln!(out, "    vector [{}]", wit.vector.join(", "));
        let _ = writeln!(out, "    = {}", wit.expression);
    }
}

fn render_linearity(out: &mut String, what: &str, l: &LinearityReport) {
    let _ = write!(out, "  {what}: {}", yes(l.pass));
    if let Some((n, t)) = l.witness {
        let _ = write!(out, " (Betti entry at homological {n}, internal {t})");
    }
    out.push('\n');
}

fn render_generation(out: &mut String, g: &GenerationReport) {
    let _ = write!(out, "  E(A) generated in degree one (n <= {}): {}", g.n_max, yes(g.pass));
    if let Some(c) = &g.witness {
        let _ = write!(out, " (class in degree {} not reached, internal {})", c.n, c.t);
    }
    out.push('\n');
    for (n, span, dim) in &g.rows {
        let _ = writeln!(out, "    n = {n}: products span {span} of {dim}");
    }
}

fn render_regularity(out: &mut String, name: &str, r: &RegularityReport) {
    let _ = writeln!(
        out,
        "  {name}: {:?}, global dimension {}, internal window {}",
        r.verdict, r.global_dimension, r.internal_window
    );
    for e in &r.ext.entries {
        let _ = writeln!(
            out,
            "    Ext^{}(S_{}, A) at q = {}, vertex {}: {}",
            e.i, e.simple, e.q, e.vertex, e.dim
        );
    }
    if let Some(p) = &r.permutation {
        for e in p {
            let _ = writeln!(out, "    S_{} -> vertex {} shift {}", e.simple, e.vertex, e.shift);
        }
    }
    if let Some((s, i, why)) = &r.failure {
        let _ = writeln!(out, "    fails at S_{s}, degree {i}: {why}");
    }
}

fn render_self_injective(out: &mut String, s: &SelfInjectivityReport) {
    let _ = writeln!(out, "  self-injective: {} (dims of D(Λ) {:?})", yes(s.pass), s.dims);
    for m in &s.summands {
        let top: Vec<String> = m.top.iter().map(|(v, d)| format!("{v}({d})")).collect();
        let _ = writeln!(
            out,
            "    D(e_{} Λ): dims {:?}, top [{}], projective {}",
            m.vertex,
            m.dims,
            top.join(", "),
            m.projective
        );
    }
}

fn render_dims(out: &mut String, title: &str, entries: &[DimEntry]) {
    let cells: Vec<String> = entries
        .iter()
        .map(|e| format!("({},{}):{}", e.degree, e.weight, e.dim))
        .collect();
    let _ = writeln!(out, "  {title}: {}", cells.join(" "));
}

fn render_result(out: &mut String, res: &TaskResult) {
    match res {
        TaskResult::Resolve(r) => {
            let c = &r.certificate;
            let _ = writeln!(
                out,
                "  n <= {}, window {}, projective dimension {}",
                r.n_max, r.window, r.projective_dimension
            );
            let _ = writeln!(
                out,
                "  d^2 = 0: {}, exact: {}, minimal: {}",
                yes(c.d_squared_zero),
                yes(c.exact),
                yes(c.minimal)
            );
            out.push_str("  Betti table (rows internal degree, columns homological degree):\n");
            out.push_str(&indent(&r.betti.to_text()));
        }
        TaskResult::QuasiKoszul(q) => {
            render_certificate(out, &q.certificate);
            if let Some(g) = &q.generation {
                render_generation(out, g);
            }
            if let Some(a) = q.agree {
                let _ = writeln!(out, "  verdicts agree: {a}");
            }
        }
        TaskResult::Koszul(k) => {
            render_certificate(out, &k.certificate);
            if let Some(c) = &k.classical {
                render_linearity(out, "linear resolution of S", &c.linearity);
                let _ = writeln!(out, "  classical cross-check agrees: {}", c.agree);
            }
        }
        TaskResult::Gr(g) => {
            let _ = writeln!(out, "  Gr_J A dims {:?}", g.dims);
            for (i, row) in g.bidegree.iter().enumerate() {
                let _ = writeln!(out, "    J^{i}/J^{}: {:?}", i + 1, row);
            }
            render_linearity(
                out,
                &format!("linear resolution of S over Gr_J A (n <= {}, window {})", g.n_max, g.window),
                &g.linearity,
            );
            out.push_str("  Betti table over Gr_J A:\n");
            out.push_str(&indent(&g.betti.to_text()));
        }
        TaskResult::Opposite(o) => {
            render_certificate(out, &o.opposite);
            let _ = writeln!(
                out,
                "  original verdict {:?}, agree: {}{}",
                o.original,
                o.agree,
                if o.finite { "" } else { " (A infinite; agreement not implied)" }
            );
        }
        TaskResult::Ext(e) => {
            let _ = writeln!(
                out,
                "  n <= {}, window {}, global dimension {}",
                e.n_max, e.window, e.global_dimension
            );
            let _ = writeln!(out, "  dim Ext^n(S, S) by n: {:?}", e.totals);
            for x in &e.entries {
                let _ = writeln!(
                    out,
                    "    Ext^{}(S_{}, S_{})_{} = {}",
                    x.n, x.source, x.target, x.t, x.dim
                );
            }
            render_generation(out, &e.generation);
        }
        TaskResult::Dual(d) => {
            let _ = writeln!(
                out,
                "  E(A) dims {:?} (n <= {}), {}",
                d.dims,
                d.n_max,
                match d.finite_top {
                    Some(t) => format!("finite, top degree {t}"),
                    None => "not finite in the window".into(),
                }
            );
            render_dims(out, "by (degree, weight)", &d.bigraded);
        }
        TaskResult::DoubleDual(d) => {
            let _ = writeln!(
                out,
                "  window: n <= {}, compared degrees <= {}, internal <= {}",
                d.window.n_max, d.window.compared_degrees, d.window.internal
            );
            render_dims(out, "E(E(A))", &d.double_dual);
            render_dims(out, "Gr_J A ", &d.graded);
            let _ = writeln!(out, "  dims match: {}", yes(d.dims_match));
            if let Some((h, t, x, y)) = d.first_mismatch {
                let _ = writeln!(out, "    first mismatch at ({h}, {t}): {x} vs {y}");
            }
            if !d.off_diagonal.is_empty() {
                let _ = writeln!(out, "  off-diagonal Ext over E(A): {:?}", d.off_diagonal);
            }
            for (i, l) in d.dual_linearity.iter().enumerate() {
                render_linearity(out, &format!("linearity of E(A)_0 summand {i}"), l);
            }
            let s = &d.structure;
            let _ = write!(
                out,
                "  products: {} ({} words in degrees {:?}",
                yes(s.matches),
                s.words,
                s.degrees
            );
            if let Some(o) = s.order {
                let _ = write!(out, ", {o:?} order");
            }
            out.push(')');
            if let Some(why) = &s.skipped {
                let _ = write!(out, " skipped: {why}");
            }
            out.push('\n');
        }
        TaskResult::AsRegular(a) => {
            render_regularity(out, "A", &a.algebra);
            if let Some(t) = &a.transfer {
                render_regularity(out, "Gr_J A", &t.graded);
                let _ = writeln!(out, "  A and Gr_J A agree: {}", t.agree);
                if let Some(s) = &t.dual_self_injective {
                    render_self_injective(out, s);
                }
                let _ = writeln!(out, "  A regular <=> Gr regular <=> E(A) self-injective: {}", t.triangle);
            }
        }
        TaskResult::SelfInjectiveDual(s) => {
            let _ = writeln!(out, "  E(A) from resolutions with n <= {}", s.n_max);
            render_self_injective(out, &s.report);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_adds_prerequisites_in_order() {
        assert_eq!(
            schedule(&[Task::DoubleDual, Task::Koszul]),
            vec![Task::Resolve, Task::Koszul, Task::Ext, Task::Dual, Task::DoubleDual]
        );
        assert_eq!(schedule(&[Task::Gr]), vec![Task::Gr]);
    }

    #[test]
    fn order_respects_prerequisites() {
        for (i, t) in TASK_ORDER.iter().enumerate() {
            for d in prerequisites(*t) {
                assert!(TASK_ORDER[..i].contains(d));
            }
        }
    }

    #[test]
    fn exit_codes() {
        let mut r = Report {
            report_schema: 1,
            engine: EngineInfo {
                name: "koszulkit".into(),
                version: "0".into(),
            },
            input_sha256: String::new(),
            field: FieldSpec::Rationals,
            algebra: AlgebraSummary {
                vertices: vec![],
                arrows: 0,
                relations: 0,
                dims: vec![],
                window: 0,
                finite_top: None,
                limits: Limits {
                    weight_max: 0,
                    nilpotency_bound: 1,
                    hom_max: 0,
                    jpower_max: 0,
                },
            },
            tasks: vec![],
            warnings: vec![],
        };
        assert_eq!(r.exit_code(), 0);
        let t = |status| TaskReport {
            task: Task::Gr,
            requested: true,
            status,
            result: None,
            error: None,
            wall_clock_us: None,
        };
        r.tasks.push(t(Status::Impossible));
        assert_eq!(r.exit_code(), 4);
        r.tasks.push(t(Status::Error));
        assert_eq!(r.exit_code(), 3);
    }
}
