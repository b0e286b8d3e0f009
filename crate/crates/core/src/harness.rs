//! Multi-run benchmark harness: problem selectors, per-run solves, summary
//! tables and convergence-history CSVs.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{MethodKind, SolverConfig, ThresholdMode};
use crate::diagnostics::{estimate_eta, factor_report, factor_report_glm_hybrid, EtaEstimate, FactorReport};
use crate::error::{Error, Result};
use crate::numerics::SeededRng;
use crate::problem::Problem;
use crate::problems::{make_glm, parse_libsvm_file, synthetic_dataset, BrownProblem, GlmProblem, LinearProblem};
use crate::solvers::{solve, solve_glm_hybrid};
use crate::trace::{SolveStatus, SolveTrace};

/// Header of every trace CSV without the optional error column.
pub const CSV_HEADER: &str = "k,residual_sq,elapsed_s,selected_size";

/// Which problem instance to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProblemSelector {
    /// `brown:n`
    Brown(usize),
    /// `glm:path` for a LIBSVM file
    GlmFile(PathBuf),
    /// `glm:synthetic:p,d,seed`
    GlmSynthetic { p: usize, d: usize, seed: u64 },
    /// `linear:m,n[,seed]`, a consistent Gaussian system
    Linear { m: usize, n: usize, seed: u64 },
    /// `linear:identity:n`, `A = I` and `b = (1..n)`
    LinearIdentity(usize),
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad {what} `{s}` in problem selector")))
}

impl FromStr for ProblemSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidConfig(format!("problem selector `{s}` needs a `kind:` prefix")))?;
        let sel = match kind {
            "brown" => ProblemSelector::Brown(parse_num(rest, "size")?),
            "glm" => match rest.strip_prefix("synthetic:") {
                Some(args) => {
                    let parts: Vec<&str> = args.split(',').collect();
                    if parts.len() != 3 {
                        return Err(Error::InvalidConfig("expected glm:synthetic:p,d,seed".into()));
                    }
                    ProblemSelector::GlmSynthetic {
                        p: parse_num(parts[0], "p")?,
                        d: parse_num(parts[1], "d")?,
                        seed: parse_num(parts[2], "seed")?,
                    }
                }
                None if rest.is_empty() => return Err(Error::InvalidConfig("glm: needs a path".into())),
                None => ProblemSelector::GlmFile(PathBuf::from(rest)),
            },
            "linear" => match rest.strip_prefix("identity:") {
                Some(n) => ProblemSelector::LinearIdentity(parse_num(n, "size")?),
                None => {
                    let parts: Vec<&str> = rest.split(',').collect();
                    let seed = match parts.len() {
                        2 => 0,
                        3 => parse_num(parts[2], "seed")?,
                        _ => return Err(Error::InvalidConfig("expected linear:m,n[,seed]".into())),
                    };
                    ProblemSelector::Linear {
                        m: parse_num(parts[0], "m")?,
                        n: parse_num(parts[1], "n")?,
                        seed,
                    }
                }
            },
            other => return Err(Error::InvalidConfig(format!("unknown problem kind `{other}`"))),
        };
        match sel {
            ProblemSelector::Brown(0)
            | ProblemSelector::LinearIdentity(0)
            | ProblemSelector::GlmSynthetic { p: 0, .. }
            | ProblemSelector::GlmSynthetic { d: 0, .. }
            | ProblemSelector::Linear { m: 0, .. }
            | ProblemSelector::Linear { n: 0, .. } => {
                Err(Error::InvalidConfig(format!("problem selector `{s}` has a zero dimension")))
            }
            sel => Ok(sel),
        }
    }
}

impl ProblemSelector {
    /// File-name friendly identifier, e.g. `brown50` or `glm-a9a`.
    pub fn slug(&self) -> String {
        match self {
            ProblemSelector::Brown(n) => format!("brown{n}"),
            ProblemSelector::GlmFile(path) => {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
                let clean: String = stem
                    .chars()
                    .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
                    .collect();
                format!("glm-{clean}")
            }
            ProblemSelector::GlmSynthetic { p, d, seed } => format!("glm-synth-{p}x{d}-s{seed}"),
            ProblemSelector::Linear { m, n, seed } => format!("linear{m}x{n}-s{seed}"),
            ProblemSelector::LinearIdentity(n) => format!("identity{n}"),
        }
    }

    pub fn is_glm(&self) -> bool {
        matches!(self, ProblemSelector::GlmFile(_) | ProblemSelector::GlmSynthetic { .. })
    }

    /// Builds the instance. GLM systems use `lambda = 1/p`.
    pub fn build(&self) -> Result<BuiltProblem> {
        Ok(match self {
            ProblemSelector::Brown(n) => BuiltProblem::Brown(BrownProblem::new(*n)),
            ProblemSelector::GlmFile(path) => {
                let ds = parse_libsvm_file(path, None)?;
                BuiltProblem::Glm(make_glm(&ds, 1.0 / ds.p().max(1) as f64)?)
            }
            ProblemSelector::GlmSynthetic { p, d, seed } => {
                let ds = synthetic_dataset(*p, *d, *seed);
                BuiltProblem::Glm(make_glm(&ds, 1.0 / *p as f64)?)
            }
            ProblemSelector::Linear { m, n, seed } => {
                BuiltProblem::Linear(LinearProblem::random_consistent(*m, *n, *seed))
            }
            ProblemSelector::LinearIdentity(n) => BuiltProblem::Linear(LinearProblem::identity(*n)),
        })
    }
}

impl fmt::Display for ProblemSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSelector::Brown(n) => write!(f, "brown:{n}"),
            ProblemSelector::GlmFile(p) => write!(f, "glm:{}", p.display()),
            ProblemSelector::GlmSynthetic { p, d, seed } => write!(f, "glm:synthetic:{p},{d},{seed}"),
            ProblemSelector::Linear { m, n, seed } => write!(f, "linear:{m},{n},{seed}"),
            ProblemSelector::LinearIdentity(n) => write!(f, "linear:identity:{n}"),
        }
    }
}

/// A constructed problem together with its standard starting point.
#[derive(Debug, Clone)]
pub enum BuiltProblem {
    Brown(BrownProblem),
    Glm(GlmProblem),
    Linear(LinearProblem),
}

impl BuiltProblem {
    pub fn as_problem(&self) -> &dyn Problem {
        match self {
            BuiltProblem::Brown(p) => p,
            BuiltProblem::Glm(p) => p,
            BuiltProblem::Linear(p) => p,
        }
    }

    /// `0.5 * ones` for Brown, zero otherwise.
    pub fn initial_point(&self) -> Vec<f64> {
        match self {
            BuiltProblem::Brown(p) => p.initial_point(),
            other => vec![0.0; other.as_problem().cols()],
        }
    }

    /// Dispatches hybrid methods to the GLM scheme.
    pub fn solve(&self, x0: &[f64], config: &SolverConfig) -> Result<SolveTrace> {
        match (self, config.method.is_glm_hybrid()) {
            (BuiltProblem::Glm(g), true) => solve_glm_hybrid(g, x0, config),
            (_, true) => Err(Error::RequiresGlm(config.method.name())),
            (p, false) => solve(p.as_problem(), x0, config),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub problem: ProblemSelector,
    pub methods: Vec<MethodKind>,
    pub runs: usize,
    pub base_seed: u64,
    pub threshold: ThresholdMode,
    pub tol: f64,
    pub max_iter: usize,
    pub track_error: bool,
    pub diagnostics: bool,
    /// Radius of the ball (around the known root, else `x0`) over which
    /// `eta` is estimated for diagnostics.
    pub eta_radius: f64,
    pub eta_pairs: usize,
    /// Worker threads; 1 runs every cell serially.
    pub jobs: usize,
    /// Per-iteration timestamps; when off `elapsed_s` is written as 0 so
    /// traces are byte-reproducible.
    pub timing: bool,
}

impl BenchSpec {
    pub fn new(problem: ProblemSelector, methods: Vec<MethodKind>) -> Self {
        Self {
            problem,
            methods,
            runs: 10,
            base_seed: 0,
            threshold: ThresholdMode::default(),
            tol: 1e-6,
            max_iter: 200_000,
            track_error: false,
            diagnostics: false,
            eta_radius: 0.05,
            eta_pairs: 10_000,
            jobs: 1,
            timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("method list is empty".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        if let Some(m) = self.methods.iter().find(|m| m.is_glm_hybrid()) {
            if !self.problem.is_glm() {
                return Err(Error::RequiresGlm(m.name()));
            }
        }
        if self.diagnostics && !(self.eta_radius > 0.0 && self.eta_pairs > 0) {
            return Err(Error::InvalidConfig("diagnostics need a positive radius and pair count".into()));
        }
        self.config(self.methods[0], self.base_seed).validate()
    }

    fn config(&self, method: MethodKind, seed: u64) -> SolverConfig {
        SolverConfig::new(method)
            .with_threshold(self.threshold)
            .with_tol(self.tol)
            .with_max_iter(self.max_iter)
            .with_seed(seed)
            .with_record_error(self.track_error)
            .with_timing(self.timing)
    }
}

/// Theory diagnostics attached to one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub eta: EtaEstimate,
    /// Absent when the estimated `eta` is not below 1/2.
    pub factors: Option<FactorReport>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub method: MethodKind,
    pub run: usize,
    pub seed: u64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Wall-clock seconds of the solve alone.
    pub seconds: f64,
    pub final_residual_sq: f64,
    /// Size of the capped set at `k = 0`.
    pub initial_set_size: usize,
    pub breakdown: Option<String>,
    #[serde(skip)]
    pub trace: Option<SolveTrace>,
    pub diagnostics: Option<RunDiagnostics>,
}

/// One table row: a method averaged over its runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: MethodKind,
    pub runs: usize,
    pub it_sum: u64,
    pub mean_it: f64,
    pub min_it: usize,
    pub max_it: usize,
    pub mean_seconds: f64,
    pub converged: usize,
    pub capped: usize,
    pub breakdowns: usize,
}

impl MethodSummary {
    fn from_runs(method: MethodKind, runs: &[&RunResult]) -> Self {
        let it_sum: u64 = runs.iter().map(|r| r.iterations as u64).sum();
        let count = |s: SolveStatus| runs.iter().filter(|r| r.status == s).count();
        Self {
            method,
            runs: runs.len(),
            it_sum,
            mean_it: it_sum as f64 / runs.len() as f64,
            min_it: runs.iter().map(|r| r.iterations).min().unwrap_or(0),
            max_it: runs.iter().map(|r| r.iterations).max().unwrap_or(0),
            mean_seconds: runs.iter().map(|r| r.seconds).sum::<f64>() / runs.len() as f64,
            converged: count(SolveStatus::Converged),
            capped: count(SolveStatus::IterationCapReached),
            breakdowns: count(SolveStatus::NumericalBreakdown),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub problem: String,
    pub spec: BenchSpec,
    pub rows: Vec<MethodSummary>,
    pub runs: Vec<RunResult>,
}

impl BenchReport {
    pub fn any_breakdown(&self) -> bool {
        self.rows.iter().any(|r| r.breakdowns > 0)
    }

    pub fn row(&self, method: MethodKind) -> Option<&MethodSummary> {
        self.rows.iter().find(|r| r.method == method)
    }
}

fn run_diagnostics(
    built: &BuiltProblem,
    spec: &BenchSpec,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<RunDiagnostics> {
    let problem = built.as_problem();
    let center = problem.known_root().unwrap_or(x0).to_vec();
    let mut rng = SeededRng::new(config.seed);
    let eta = estimate_eta(problem, &center, spec.eta_radius, spec.eta_pairs, &mut rng)?;
    if !eta.is_valid() {
        let note = format!("estimated eta {} is not below 1/2; factors not computed", eta.eta);
        return Ok(RunDiagnostics {
            eta,
            factors: None,
            note: Some(note),
        });
    }
    let report = match built {
        BuiltProblem::Glm(g) if config.method.is_glm_hybrid() => factor_report_glm_hybrid(g, x0, config, eta.eta),
        _ => factor_report(problem, x0, config, eta.eta),
    };
    Ok(match report {
        Ok((_, factors)) => RunDiagnostics {
            eta,
            factors: Some(factors),
            note: None,
        },
        Err(e) => RunDiagnostics {
            eta,
            factors: None,
            note: Some(e.to_string()),
        },
    })
}

fn run_cell(built: &BuiltProblem, spec: &BenchSpec, method: MethodKind, run: usize) -> Result<RunResult> {
    let seed = spec.base_seed.wrapping_add(run as u64);
    let config = spec.config(method, seed);
    let x0 = built.initial_point();
    let start = Instant::now();
    let trace = built.solve(&x0, &config)?;
    let seconds = start.elapsed().as_secs_f64();
    let diagnostics = if spec.diagnostics {
        Some(run_diagnostics(built, spec, &x0, &config)?)
    } else {
        None
    };
    Ok(RunResult {
        method,
        run,
        seed,
        iterations: trace.total_iterations,
        status: trace.status,
        seconds,
        final_residual_sq: trace.final_residual_sq(),
        initial_set_size: trace.records.first().map_or(0, |r| r.set_size),
        breakdown: trace.breakdown.clone(),
        trace: Some(trace),
        diagnostics,
    })
}

/// Runs every `(method, run)` cell; run `r` uses seed `base_seed + r`.
/// Breakdowns are recorded per run; configuration problems fail the batch.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchReport> {
    spec.validate()?;
    let built = spec.problem.build()?;
    let cells: Vec<(MethodKind, usize)> = spec
        .methods
        .iter()
        .flat_map(|&m| (0..spec.runs).map(move |r| (m, r)))
        .collect();
    let runs: Vec<RunResult> = if spec.jobs == 1 {
        cells
            .iter()
            .map(|&(m, r)| run_cell(&built, spec, m, r))
            .collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| {
            cells
                .par_iter()
                .map(|&(m, r)| run_cell(&built, spec, m, r))
                .collect::<Result<_>>()
        })?
    };
    let rows = spec
        .methods
        .iter()
        .map(|&m| {
            let mine: Vec<&RunResult> = runs.iter().filter(|r| r.method == m).collect();
            MethodSummary::from_runs(m, &mine)
        })
        .collect();
    Ok(BenchReport {
        problem: spec.problem.slug(),
        spec: spec.clone(),
        rows,
        runs,
    })
}

/// Aligned plain-text summary table.
pub fn emit_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "problem: {} ({} runs)", report.spec.problem, report.spec.runs);
    let _ = writeln!(
        out,
        "{:<14} {:>12} {:>9} {:>9} {:>12} {:>5} {:>5} {:>5}",
        "method", "mean IT", "min IT", "max IT", "mean CPU s", "conv", "cap", "fail"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<14} {:>12.1} {:>9} {:>9} {:>12.4e} {:>5} {:>5} {:>5}",
            r.method.name(),
            r.mean_it,
            r.min_it,
            r.max_it,
            r.mean_seconds,
            r.converged,
            r.capped,
            r.breakdowns
        );
    }
    out
}

/// Machine-readable form of the whole report (traces excluded).
pub fn emit_json(report: &BenchReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Trace as CSV: `k,residual_sq,elapsed_s,selected_size` plus `error_sq`
/// when the trace recorded errors. Floats carry 17 significant digits.
///
/// `selected_size` is the size of the row set the step drew from: the
/// capped set for greedy methods, 1 for the classical single-row methods,
/// and 0 on the final record.
pub fn emit_csv(trace: &SolveTrace) -> String {
    let with_error = trace.records.iter().any(|r| r.error_sq.is_some());
    let mut out = String::from(CSV_HEADER);
    if with_error {
        out.push_str(",error_sq");
    }
    out.push('\n');
    for r in &trace.records {
        let _ = write!(out, "{},{},{},{}", r.k, sci(r.residual_sq), sci(r.elapsed), r.set_size);
        if with_error {
            out.push(',');
            out.push_str(&r.error_sq.map_or_else(String::new, sci));
        }
        out.push('\n');
    }
    out
}

/// One parsed CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub k: usize,
    pub residual_sq: f64,
    pub elapsed_s: f64,
    pub selected_size: usize,
    pub error_sq: Option<f64>,
}

/// Reads back what [`emit_csv`] writes.
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, h)| h).unwrap_or("");
    let with_error = match header {
        h if h == CSV_HEADER => false,
        h if h.strip_prefix(CSV_HEADER) == Some(",error_sq") => true,
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unexpected header `{header}`"),
            })
        }
    };
    let mut rows = Vec::new();
    for (i, line) in lines {
        let bad = |msg: &str| Error::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != if with_error { 5 } else { 4 } {
            return Err(bad("wrong column count"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        rows.push(CsvRow {
            k: cols[0].parse().map_err(|_| bad("bad k"))?,
            residual_sq: num(cols[1])?,
            elapsed_s: num(cols[2])?,
            selected_size: cols[3].parse().map_err(|_| bad("bad selected_size"))?,
            error_sq: if with_error && !cols[4].is_empty() {
                Some(num(cols[4])?)
            } else {
                None
            },
        });
    }
    Ok(rows)
}

pub fn trace_file_name(problem_slug: &str, method: MethodKind, run: usize) -> String {
    format!("trace_{problem_slug}_{}_{run}.csv", method.name())
}

/// Writes summary.json, summary.txt, one trace CSV per run and, when
/// present, one diagnostics JSON per run into `dir`. Returns the paths.
pub fn write_outputs(report: &BenchReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let write = |name: String, body: &str| -> Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    };
    let mut written = vec![
        write("summary.json".into(), &emit_json(report)?)?,
        write("summary.txt".into(), &emit_table(report))?,
    ];
    for run in &report.runs {
        if let Some(trace) = &run.trace {
            written.push(write(trace_file_name(&report.problem, run.method, run.run), &emit_csv(trace))?);
        }
        if let Some(diag) = &run.diagnostics {
            let body = serde_json::to_string_pretty(diag).map_err(|e| Error::Io(e.to_string()))?;
            let name = format!("diagnostics_{}_{}_{}.json", report.problem, run.method.name(), run.run);
            written.push(write(name, &body)?);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::IterationRecord;

    #[test]
    fn selectors_parse() {
        assert_eq!("brown:50".parse::<ProblemSelector>().unwrap(), ProblemSelector::Brown(50));
        assert_eq!(
            "glm:synthetic:200,10,3".parse::<ProblemSelector>().unwrap(),
            ProblemSelector::GlmSynthetic { p: 200, d: 10, seed: 3 }
        );
        assert_eq!(
            "linear:100,50".parse::<ProblemSelector>().unwrap(),
            ProblemSelector::Linear { m: 100, n: 50, seed: 0 }
        );
        assert_eq!(
            "linear:identity:10".parse::<ProblemSelector>().unwrap(),
            ProblemSelector::LinearIdentity(10)
        );
        assert_eq!(
            "glm:data/a9a.txt".parse::<ProblemSelector>().unwrap(),
            ProblemSelector::GlmFile("data/a9a.txt".into())
        );
        for bad in ["brown", "brown:x", "brown:0", "cube:3", "linear:3", "glm:", "glm:synthetic:1,2"] {
            assert!(bad.parse::<ProblemSelector>().is_err(), "{bad}");
        }
    }

    #[test]
    fn selector_display_round_trips() {
        for s in ["brown:7", "glm:synthetic:5,2,1", "linear:4,3,9", "linear:identity:3"] {
            let sel: ProblemSelector = s.parse().unwrap();
            assert_eq!(sel.to_string().parse::<ProblemSelector>().unwrap(), sel);
        }
    }

    #[test]
    fn spec_validation() {
        let mut spec = BenchSpec::new(ProblemSelector::Brown(5), vec![]);
        assert!(spec.validate().is_err());
        spec.methods = vec![MethodKind::Nrk];
        spec.runs = 0;
        assert!(spec.validate().is_err());
        spec.runs = 1;
        assert!(spec.validate().is_ok());
        spec.methods = vec![MethodKind::GlmHybridRb];
        assert!(matches!(spec.validate(), Err(Error::RequiresGlm(_))));
    }

    #[test]
    fn single_run_mean_is_the_run() {
        let mut spec = BenchSpec::new(ProblemSelector::Brown(10), vec![MethodKind::RdCnk]);
        spec.runs = 1;
        let rep = run_bench(&spec).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.rows[0].mean_it, rep.runs[0].iterations as f64);
        assert!(emit_table(&rep).lines().count() == 3);
    }

    #[test]
    fn identity_converges_quickly() {
        let mut spec = BenchSpec::new(ProblemSelector::LinearIdentity(10), MethodKind::ALL[..7].to_vec());
        spec.runs = 3;
        let rep = run_bench(&spec).unwrap();
        for row in &rep.rows {
            assert_eq!(row.converged, 3, "{}", row.method);
            if row.method == MethodKind::Nurk {
                // uniform draws with replacement revisit solved rows
                assert!(row.min_it >= 10);
            } else {
                assert!(row.max_it <= 10, "{} took {}", row.method, row.max_it);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let trace = SolveTrace {
            records: vec![
                IterationRecord {
                    k: 0,
                    residual_sq: 0.1 + 0.2,
                    selected: vec![0],
                    set_size: 3,
                    elapsed: 1e-7 / 3.0,
                    error_sq: Some(std::f64::consts::PI),
                    coupling_residual_sq: None,
                },
                IterationRecord {
                    k: 1,
                    residual_sq: 5e-324,
                    selected: vec![],
                    set_size: 0,
                    elapsed: 2.0,
                    error_sq: Some(0.0),
                    coupling_residual_sq: None,
                },
            ],
            status: SolveStatus::Converged,
            final_x: vec![],
            total_iterations: 1,
            total_seconds: 2.0,
            breakdown: None,
        };
        let text = emit_csv(&trace);
        assert!(text.starts_with("k,residual_sq,elapsed_s,selected_size,error_sq\n"));
        assert!(!text.contains('\r'));
        let rows = parse_csv(&text).unwrap();
        for (row, rec) in rows.iter().zip(&trace.records) {
            assert_eq!(row.k, rec.k);
            assert_eq!(row.residual_sq.to_bits(), rec.residual_sq.to_bits());
            assert_eq!(row.elapsed_s.to_bits(), rec.elapsed.to_bits());
            assert_eq!(row.selected_size, rec.set_size);
            assert_eq!(row.error_sq, rec.error_sq);
        }
    }

    #[test]
    fn csv_rejects_foreign_header() {
        assert!(parse_csv("a,b\n").is_err());
        assert!(parse_csv("k,residual_sq,elapsed_s,selected_size\n1,2\n").is_err());
    }
}
