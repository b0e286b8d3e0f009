use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cnk::harness::{emit_table, run_bench, write_outputs, BenchSpec, ProblemSelector};
use cnk::{parse_libsvm_file, MethodKind, ThresholdMode};

#[derive(Parser)]
#[command(name = "bench", version, about = "Benchmark driver for the capped nonlinear Kaczmarz solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every method on one problem and write summaries and traces.
    Run(RunArgs),
    /// Read a LIBSVM file and report its shape.
    ParseLibsvm {
        path: PathBuf,
        /// Print sample count, dimension, density and label balance.
        #[arg(long)]
        info: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// brown:N | glm:PATH | glm:synthetic:P,D,SEED | linear:M,N[,SEED] | linear:identity:N
    #[arg(long)]
    problem: String,
    /// Comma separated, e.g. nrk,dr-cnk,rd-cnk,db-cnk,rb-cnk
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<String>,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iter: usize,
    /// Convex threshold weight.
    #[arg(long, default_value_t = 0.5, conflicts_with = "xi")]
    theta: f64,
    /// Scaled threshold factor; replaces the convex rule.
    #[arg(long)]
    xi: Option<f64>,
    /// Output directory; BENCH_OUT takes precedence.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    track_error: bool,
    #[arg(long)]
    diagnostics: bool,
    /// Radius of the ball used to estimate the cone constant.
    #[arg(long, default_value_t = 0.05)]
    eta_radius: f64,
    #[arg(long, default_value_t = 10_000)]
    eta_pairs: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write zero timestamps so traces are byte reproducible.
    #[arg(long)]
    no_timing: bool,
}

fn build_spec(args: &RunArgs) -> Result<BenchSpec, String> {
    let problem: ProblemSelector = args.problem.parse().map_err(|e| format!("{e}"))?;
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse::<MethodKind>().map_err(|e| format!("{e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut spec = BenchSpec::new(problem, methods);
    spec.runs = args.runs;
    spec.base_seed = args.seed;
    spec.threshold = match args.xi {
        Some(xi) => ThresholdMode::Scaled(xi),
        None => ThresholdMode::Convex(args.theta),
    };
    spec.tol = args.tol;
    spec.max_iter = args.max_iter;
    spec.track_error = args.track_error;
    spec.diagnostics = args.diagnostics;
    spec.eta_radius = args.eta_radius;
    spec.eta_pairs = args.eta_pairs;
    spec.jobs = args.jobs;
    spec.timing = !args.no_timing;
    spec.validate().map_err(|e| format!("{e}"))?;
    Ok(spec)
}

fn run(args: RunArgs) -> ExitCode {
    let spec = match build_spec(&args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out = std::env::var_os("BENCH_OUT").map(PathBuf::from).unwrap_or(args.out);
    let report = match run_bench(&spec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    print!("{}", emit_table(&report));
    if let Err(e) = write_outputs(&report, &out) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    for r in report.runs.iter().filter(|r| r.breakdown.is_some()) {
        eprintln!(
            "breakdown: {} run {}: {}",
            r.method,
            r.run,
            r.breakdown.as_deref().unwrap_or_default()
        );
    }
    if report.any_breakdown() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn parse_info(path: PathBuf, info: bool) -> ExitCode {
    match parse_libsvm_file(&path, None) {
        Ok(ds) => {
            if info {
                let pos = ds.labels.iter().filter(|&&l| l > 0.0).count();
                println!("samples: {}", ds.p());
                println!("features: {}", ds.d);
                println!("nonzeros: {}", ds.nnz());
                println!("density: {:.6}", ds.density());
                println!("labels: +1 x {pos}, -1 x {}", ds.p() - pos);
            } else {
                println!("ok: {} samples, {} features", ds.p(), ds.d);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::ParseLibsvm { path, info } => parse_info(path, info),
    }
}
