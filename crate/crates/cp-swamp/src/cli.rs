//! Command-line front end: decompose tensor files, reproduce the built-in
//! example problems, and run multi-seed method comparisons.
//!
//! Exit codes: 0 when the run converged (by fit or by relative change),
//! 2 when the iteration budget ran out, 1 on usage or I/O errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::diagnostics::{
    compare_methods, detect_swamp, export_comparison_csv, export_trace_csv, DEFAULT_FLAT_TOL,
    DEFAULT_WINDOW,
};
use crate::error::{Error, Result};
use crate::linalg::K_RANK_MAX_COLS;
use crate::model::write_factors;
use crate::problems::by_number;
use crate::solver::{decompose, Method, SolveReport, SolverConfig, Status};
use crate::tensor::{fmt_f64, read_tensor, DenseTensor};

#[derive(Debug, Parser)]
#[command(
    name = "cp-swamp",
    version,
    about = "CP tensor decomposition via ALS and regularized ALS, with swamp diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose a tensor file; writes a factor file and a trace CSV.
    Decompose(DecomposeArgs),
    /// Run a built-in example problem (1, 2, or 3) and report on swamps.
    Example(ExampleArgs),
    /// Compare methods across random initial guesses on one problem.
    Compare(CompareArgs),
}

/// Solver tuning flags shared by all subcommands.
#[derive(Debug, Args)]
struct SolverFlags {
    /// Absolute fit-error threshold for convergence.
    #[arg(long, default_value_t = 1e-5)]
    fit_tol: f64,
    /// Relative per-sweep fit change treated as converged; 0 disables.
    #[arg(long, default_value_t = 0.0)]
    rel_change_tol: f64,
    /// Sweep budget.
    #[arg(long, default_value_t = 50_000)]
    max_iters: usize,
    /// Initial regularization weight (rals and tals only).
    #[arg(long)]
    lambda0: Option<f64>,
    /// Geometric per-sweep decay of the regularization weight, in (0, 1].
    #[arg(long)]
    decay: Option<f64>,
    /// Floor of the regularization schedule.
    #[arg(long)]
    lambda_min: Option<f64>,
    /// Relative rank tolerance for least-squares solves; 0 = automatic.
    #[arg(long, default_value_t = 0.0)]
    rank_tol: f64,
}

impl SolverFlags {
    fn to_config(&self, seed: u64) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            max_iters: self.max_iters,
            fit_tol: self.fit_tol,
            rel_change_tol: self.rel_change_tol,
            lambda0: self.lambda0.unwrap_or(d.lambda0),
            decay: self.decay.unwrap_or(d.decay),
            lambda_min: self.lambda_min.unwrap_or(d.lambda_min),
            rank_tol: self.rank_tol,
            seed,
            init: None,
        }
    }

    /// Plain ALS has no regularization; point that out rather than silently
    /// dropping explicit lambda flags.
    fn warn_if_lambda_ignored(&self, methods: &[Method]) {
        let lambda_given =
            self.lambda0.is_some() || self.decay.is_some() || self.lambda_min.is_some();
        if lambda_given && methods.iter().all(|&m| m == Method::Als) {
            eprintln!("warning: lambda flags are ignored for method als");
        }
    }
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// Tensor file to decompose.
    #[arg(long)]
    input: PathBuf,
    /// Prefix for output files; defaults to the input path minus extension.
    #[arg(long)]
    output_prefix: Option<PathBuf>,
    /// Number of rank-one components.
    #[arg(long)]
    rank: usize,
    /// Update rule: als, rals, or tals.
    #[arg(long, default_value_t = Method::Rals)]
    method: Method,
    /// Seed for the random initial guess.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverFlags,
    /// Trace CSV path; defaults to `<prefix>.trace.csv`.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExampleArgs {
    /// Example number: 1, 2, or 3.
    which: usize,
    /// Rank override; defaults to the example's featured rank.
    #[arg(long)]
    rank: Option<usize>,
    /// Update rule: als, rals, or tals.
    #[arg(long, default_value_t = Method::Rals)]
    method: Method,
    /// Start from a seeded random guess instead of the example's pinned one.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Prefix for output files; defaults to `example<N>-<method>`.
    #[arg(long)]
    output_prefix: Option<PathBuf>,
    /// Trace CSV path; defaults to `<prefix>.trace.csv`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Minimum plateau span (in sweeps) reported as a swamp.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
    /// Relative per-sweep improvement below which progress counts as flat.
    #[arg(long, default_value_t = DEFAULT_FLAT_TOL)]
    flat_tol: f64,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Tensor file to compare on.
    #[arg(long, conflicts_with = "example")]
    input: Option<PathBuf>,
    /// Built-in example number to compare on.
    #[arg(long)]
    example: Option<usize>,
    /// Rank; required with --input, defaults to the example's featured rank.
    #[arg(long)]
    rank: Option<usize>,
    /// Method to include; repeat to compare several. Defaults to als, rals.
    #[arg(long = "method", value_name = "METHOD")]
    methods: Vec<Method>,
    /// Number of random initial guesses (seeds 0 through count-1).
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[command(flatten)]
    solver: SolverFlags,
    /// Prefix for the comparison CSV; defaults to `<name>-compare`.
    #[arg(long)]
    output_prefix: Option<PathBuf>,
    /// Minimum plateau span (in sweeps) reported as a swamp.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
    /// Relative per-sweep improvement below which progress counts as flat.
    #[arg(long, default_value_t = DEFAULT_FLAT_TOL)]
    flat_tol: f64,
}

/// Parses the process arguments, runs the chosen subcommand, and returns
/// the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep clap's rendering but remap usage failures to exit 1;
            // --help and --version still exit 0.
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Decompose(args) => run_decompose(args),
        Command::Example(args) => run_example(args),
        Command::Compare(args) => run_compare(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn exit_code(status: Status) -> i32 {
    match status {
        Status::ConvergedFit | Status::ConvergedChange => 0,
        Status::MaxIters => 2,
    }
}

/// `prefix` + literal suffix, without treating the suffix as an extension
/// (so `t.factors.txt` comes out of prefix `t`, not `t.factors`).
fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn print_report(report: &SolveReport, tensor: &DenseTensor, rank_tol: f64) -> Result<()> {
    println!("method: {}", report.method);
    println!("status: {}", report.status);
    println!("iterations: {}", report.iterations);
    println!("final fit error: {}", fmt_f64(report.fit_error));
    let residual = report.factors.critical_point_residual(tensor)?;
    println!("critical-point residual: {}", fmt_f64(residual));
    if tensor.order() == 3 && report.factors.rank() <= K_RANK_MAX_COLS {
        print!("{}", report.factors.uniqueness_report(rank_tol)?);
    }
    Ok(())
}

fn run_decompose(args: &DecomposeArgs) -> Result<i32> {
    args.solver.warn_if_lambda_ignored(&[args.method]);
    let tensor = read_tensor(&args.input)?;
    let config = args.solver.to_config(args.seed);
    let report = decompose(&tensor, args.rank, args.method, &config)?;

    let prefix = args
        .output_prefix
        .clone()
        .unwrap_or_else(|| args.input.with_extension(""));
    let factors_path = with_suffix(&prefix, ".factors.txt");
    let trace_path = args
        .trace
        .clone()
        .unwrap_or_else(|| with_suffix(&prefix, ".trace.csv"));
    write_factors(&report.factors, &factors_path)?;
    export_trace_csv(&report.trace, &trace_path)?;

    print_report(&report, &tensor, config.rank_tol)?;
    println!("factors: {}", factors_path.display());
    println!("trace: {}", trace_path.display());
    Ok(exit_code(report.status))
}

fn run_example(args: &ExampleArgs) -> Result<i32> {
    args.solver.warn_if_lambda_ignored(&[args.method]);
    let problem = by_number(args.which)?;
    let rank = args.rank.unwrap_or(problem.rank);
    let mut config = args.solver.to_config(args.seed.unwrap_or(0));
    // The pinned initial guess only fits the featured rank; otherwise fall
    // back to a seeded random guess.
    if rank == problem.rank && args.seed.is_none() {
        config.init = Some(problem.init.clone());
    }
    let report = decompose(&problem.tensor, rank, args.method, &config)?;

    let prefix = args
        .output_prefix
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}-{}", problem.name, args.method)));
    let trace_path = args
        .trace
        .clone()
        .unwrap_or_else(|| with_suffix(&prefix, ".trace.csv"));
    export_trace_csv(&report.trace, &trace_path)?;

    println!("example: {} (rank {rank})", problem.name);
    print_report(&report, &problem.tensor, config.rank_tol)?;
    let swamp = detect_swamp(&report.trace, args.window, args.flat_tol)?;
    if swamp.detected {
        println!("swamp: detected");
        for (start, end) in &swamp.intervals {
            println!("  plateau: sweeps {start}..={end}");
        }
        if let Some(depth) = swamp.plateau_depth {
            println!("  plateau fit error: {}", fmt_f64(depth));
        }
    } else {
        println!("swamp: none detected");
    }
    println!("trace: {}", trace_path.display());
    Ok(exit_code(report.status))
}

fn run_compare(args: &CompareArgs) -> Result<i32> {
    let (tensor, rank, name) = match (&args.input, args.example) {
        (Some(path), None) => {
            let tensor = read_tensor(path)?;
            let rank = args.rank.ok_or_else(|| {
                Error::argument("--rank is required when comparing on --input")
            })?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "tensor".into());
            (tensor, rank, name)
        }
        (None, Some(which)) => {
            let problem = by_number(which)?;
            (
                problem.tensor,
                args.rank.unwrap_or(problem.rank),
                problem.name,
            )
        }
        _ => {
            return Err(Error::argument(
                "provide exactly one of --input or --example",
            ))
        }
    };
    if args.seeds == 0 {
        return Err(Error::argument("--seeds must be at least 1"));
    }
    let methods = if args.methods.is_empty() {
        vec![Method::Als, Method::Rals]
    } else {
        args.methods.clone()
    };
    args.solver.warn_if_lambda_ignored(&methods);

    let config = args.solver.to_config(0);
    let seeds: Vec<u64> = (0..args.seeds as u64).collect();
    let summary = compare_methods(
        &tensor,
        rank,
        &methods,
        &seeds,
        &config,
        args.window,
        args.flat_tol,
    )?;
    print!("{summary}");

    let prefix = args
        .output_prefix
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}-compare")));
    let csv_path = with_suffix(&prefix, ".csv");
    export_comparison_csv(&summary, &csv_path)?;
    println!("comparison: {}", csv_path.display());
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(exit_code(Status::ConvergedFit), 0);
        assert_eq!(exit_code(Status::ConvergedChange), 0);
        assert_eq!(exit_code(Status::MaxIters), 2);
    }

    #[test]
    fn suffixes_append_without_replacing_extensions() {
        assert_eq!(
            with_suffix(Path::new("out/t"), ".factors.txt"),
            PathBuf::from("out/t.factors.txt")
        );
        assert_eq!(
            with_suffix(Path::new("a.b"), ".trace.csv"),
            PathBuf::from("a.b.trace.csv")
        );
    }

    #[test]
    fn cli_parses_the_documented_flags() {
        let cli = Cli::try_parse_from([
            "cp-swamp",
            "decompose",
            "--input",
            "t.txt",
            "--rank",
            "2",
            "--method",
            "rals",
            "--fit-tol",
            "1e-5",
            "--lambda0",
            "0.5",
            "--decay",
            "0.9",
            "--lambda-min",
            "1e-10",
            "--max-iters",
            "100",
            "--seed",
            "7",
            "--trace",
            "t.csv",
        ])
        .unwrap();
        match cli.command {
            Command::Decompose(args) => {
                assert_eq!(args.rank, 2);
                assert_eq!(args.method, Method::Rals);
                assert_eq!(args.solver.lambda0, Some(0.5));
                assert_eq!(args.seed, 7);
            }
            _ => panic!("wrong subcommand"),
        }

        let cli = Cli::try_parse_from([
            "cp-swamp", "compare", "--example", "2", "--rank", "2", "--method", "als", "--method",
            "rals", "--seeds", "5",
        ])
        .unwrap();
        match cli.command {
            Command::Compare(args) => {
                assert_eq!(args.methods, vec![Method::Als, Method::Rals]);
                assert_eq!(args.seeds, 5);
            }
            _ => panic!("wrong subcommand"),
        }

        assert!(Cli::try_parse_from(["cp-swamp", "decompose", "--rank", "2"]).is_err());
        assert!(Cli::try_parse_from(["cp-swamp", "example", "--method", "sgd", "1"]).is_err());
    }
}
