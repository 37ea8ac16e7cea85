//! Command-line harness: problem generation, single solves, table and
//! phase-transition sweeps, and restricted-isometry consistency checks.

use std::fs;
use std::path::{Path, PathBuf};

use admira::analysis::{check_proposition_inequalities, snr_recon};
use admira::baseline::{svt_solve, SvtConfig};
use admira::experiment::{
    append_csv, generate_problem, run_phase, run_table1, run_table2, Algorithm, OperatorKind,
    PhaseOptions, ProblemSpec, SweepConfig, TrialRecord,
};
use admira::linalg::io::{read_dense, read_vector, write_dense, write_factored, write_vector};
use admira::linalg::SvdMode;
use admira::operators::io::{read_operator, write_operator};
use admira::operators::{GaussianOperator, Operator, SamplingOperator};
use admira::par::Execution;
use admira::solver::{admira_solve, rank_search, LsMethod, SearchMode, SolverConfig, SolverReport};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "admira", version, about = "Low-rank matrix recovery benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random problem and write its files to a directory.
    Gen(GenArgs),
    /// Solve one problem read from files.
    Solve(SolveArgs),
    /// Square rank-2 completion, noiseless and at 20 dB.
    Table1(Table1Args),
    /// ADMiRA versus SVT over ranks and sampling densities.
    Table2(Table2Args),
    /// Success counts over a (p, r) grid.
    Phase(PhaseArgs),
    /// Monte Carlo restricted-isometry estimates and inequality checks.
    Ripcheck(RipArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Admira,
    Svt,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Admira => Algorithm::Admira,
            AlgoArg::Svt => Algorithm::Svt,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    Gaussian,
    Sampling,
}

impl From<OperatorArg> for OperatorKind {
    fn from(o: OperatorArg) -> Self {
        match o {
            OperatorArg::Gaussian => OperatorKind::Gaussian,
            OperatorArg::Sampling => OperatorKind::Sampling,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LsArg {
    Auto,
    Qr,
    Cg,
    Richardson,
}

impl From<LsArg> for LsMethod {
    fn from(l: LsArg) -> Self {
        match l {
            LsArg::Auto => LsMethod::Auto,
            LsArg::Qr => LsMethod::Qr,
            LsArg::Cg => LsMethod::Cg,
            LsArg::Richardson => LsMethod::Richardson,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SvdArg {
    Auto,
    Dense,
    Lanczos,
}

impl From<SvdArg> for SvdMode {
    fn from(s: SvdArg) -> Self {
        match s {
            SvdArg::Auto => SvdMode::Auto,
            SvdArg::Dense => SvdMode::Dense,
            SvdArg::Lanczos => SvdMode::Lanczos,
        }
    }
}

/// Solver settings. Values given here override the `--config` file.
#[derive(Args, Clone, Default)]
struct SolverArgs {
    /// JSON file with `admira`, `svt`, `trials`, `seed` and `execution` fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, value_enum)]
    ls_method: Option<LsArg>,
    #[arg(long)]
    ls_tol: Option<f64>,
    #[arg(long)]
    ls_max_iter: Option<usize>,
    #[arg(long, value_enum)]
    svd_mode: Option<SvdArg>,
    /// Stop when an iteration lowers the residual by less than this fraction; 0 disables.
    #[arg(long)]
    stall_tol: Option<f64>,
    /// Cap ADMiRA at 6(r+1) iterations.
    #[arg(long)]
    theoretical_cap: bool,
    /// SVT threshold; defaults to 5·sqrt(mn).
    #[arg(long)]
    svt_tau: Option<f64>,
    /// SVT step size; defaults to 1.2·mn/p.
    #[arg(long)]
    svt_step: Option<f64>,
    #[arg(long)]
    svt_residual_tol: Option<f64>,
    #[arg(long)]
    svt_max_iter: Option<usize>,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

impl SolverArgs {
    fn sweep_config(&self) -> Result<SweepConfig> {
        let mut c: SweepConfig = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => SweepConfig::default(),
        };
        let a = &mut c.admira;
        set(&mut a.residual_tol, self.residual_tol);
        set(&mut a.max_iter, self.max_iter);
        set(&mut a.ls_method, self.ls_method.map(Into::into));
        set(&mut a.ls_tol, self.ls_tol);
        set(&mut a.ls_max_iter, self.ls_max_iter);
        set(&mut a.svd_mode, self.svd_mode.map(Into::into));
        set(&mut a.stall_tol, self.stall_tol);
        a.theoretical_cap |= self.theoretical_cap;
        let s = &mut c.svt;
        if self.svt_tau.is_some() {
            s.tau = self.svt_tau;
        }
        if self.svt_step.is_some() {
            s.step = self.svt_step;
        }
        set(&mut s.residual_tol, self.svt_residual_tol);
        set(&mut s.max_iter, self.svt_max_iter);
        set(&mut s.svd_mode, self.svd_mode.map(Into::into));
        if self.sequential {
            c.execution = Execution::Sequential;
        }
        Ok(c)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Summary CSV, appended to if it exists.
    #[arg(long)]
    out: PathBuf,
    /// Optional per-trial CSV log.
    #[arg(long)]
    trials_out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

impl SweepArgs {
    fn config(&self, default_trials: usize) -> Result<SweepConfig> {
        let mut c = self.solver.sweep_config()?;
        if self.solver.config.is_none() {
            c.trials = default_trials;
        }
        set(&mut c.trials, self.trials);
        set(&mut c.seed, self.seed);
        Ok(c)
    }

    fn write<T: Serialize>(&self, rows: &[T], records: &[TrialRecord]) -> Result<()> {
        append_csv(&self.out, rows).with_context(|| format!("writing {}", self.out.display()))?;
        if let Some(path) = &self.trials_out {
            append_csv(path, records).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    /// Defaults to `m`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rank: usize,
    #[arg(long, value_enum, default_value = "sampling")]
    operator: OperatorArg,
    /// Number of measurements.
    #[arg(long, conflicts_with = "density")]
    p: Option<usize>,
    /// Measurements as a fraction of m·n.
    #[arg(long)]
    density: Option<f64>,
    /// Measurement SNR in dB; omit for noiseless data.
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Directory written by `gen`; supplies the operator, measurements and truth.
    #[arg(long, required_unless_present_all = ["operator", "measurements"])]
    problem: Option<PathBuf>,
    #[arg(long)]
    operator: Option<PathBuf>,
    #[arg(long)]
    measurements: Option<PathBuf>,
    /// Ground truth, enabling the error trace and reconstruction SNR.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "admira")]
    algo: AlgoArg,
    /// Target rank; with `--eta` this is the largest rank searched.
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// Pick the smallest rank whose residual is at most eta.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    bisection: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct Table1Args {
    #[arg(long = "n", value_delimiter = ',', default_values_t = [500, 1000])]
    sizes: Vec<usize>,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args)]
struct Table2Args {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long = "rank", value_delimiter = ',', default_values_t = [2, 5, 10])]
    ranks: Vec<usize>,
    #[arg(long = "density", value_delimiter = ',', default_values_t = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30])]
    densities: Vec<f64>,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long = "p", value_delimiter = ',', required = true)]
    p_grid: Vec<usize>,
    #[arg(long = "rank", value_delimiter = ',', required = true)]
    ranks: Vec<usize>,
    #[arg(long = "algo", value_enum, value_delimiter = ',', default_values_t = [AlgoArg::Admira, AlgoArg::Svt])]
    algos: Vec<AlgoArg>,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args)]
struct RipArgs {
    /// Operator file; otherwise one is generated from the flags below.
    #[arg(long)]
    operator_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gaussian")]
    operator: OperatorArg,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 200)]
    p: usize,
    #[arg(long, default_value_t = 2)]
    rank: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sequential: bool,
    /// JSON lines output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    algorithm: Algorithm,
    rank: usize,
    iterations: usize,
    stop_reason: String,
    final_residual: f64,
    snr_recon_db: Option<f64>,
    residual_trace: &'a [f64],
    error_trace: &'a [f64],
}

fn gen(args: GenArgs) -> Result<()> {
    let n = args.n.unwrap_or(args.m);
    let p = match (args.p, args.density) {
        (Some(p), _) => p,
        (None, Some(d)) => (d * (args.m * n) as f64).round() as usize,
        (None, None) => bail!("one of --p or --density is required"),
    };
    let spec = ProblemSpec {
        m: args.m,
        n,
        r_true: args.rank,
        operator: args.operator.into(),
        p,
        snr_meas_db: args.snr_db,
        seed: args.seed,
    };
    let problem = generate_problem(&spec)?;
    let dir = &args.out_dir;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("spec.json"), serde_json::to_string_pretty(&spec)?)?;
    write_operator(dir.join("operator.txt"), &problem.operator)?;
    write_vector(dir.join("b.txt"), &problem.b)?;
    write_dense(dir.join("x0.txt"), &problem.x0)?;
    write_vector(dir.join("noise.txt"), &problem.noise)?;
    println!("{} {}", spec.hash(), dir.display());
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let in_problem = |name: &str| args.problem.as_ref().map(|d| d.join(name));
    let op_path = args.operator.clone().or_else(|| in_problem("operator.txt")).expect("clap");
    let b_path = args.measurements.clone().or_else(|| in_problem("b.txt")).expect("clap");
    let truth_path = args
        .truth
        .clone()
        .or_else(|| in_problem("x0.txt").filter(|p| p.exists()));
    let op = read_operator(&op_path).with_context(|| format!("reading {}", op_path.display()))?;
    let b = read_vector(&b_path).with_context(|| format!("reading {}", b_path.display()))?;
    let truth = truth_path.map(read_dense).transpose()?;

    let config = args.solver.sweep_config()?;
    let admira = SolverConfig {
        target_rank: args.rank,
        seed: args.seed,
        ..config.admira
    };
    let svt = SvtConfig {
        seed: args.seed,
        ..config.svt
    };
    let algorithm: Algorithm = args.algo.into();
    let (rank, report) = run_solver(&op, &b, truth.as_ref(), algorithm, &admira, &svt, &args)?;
    let snr = truth
        .as_ref()
        .map(|x0| snr_recon(x0, &report.solution.to_dense()))
        .transpose()?;

    fs::create_dir_all(&args.out_dir)?;
    write_factored(args.out_dir.join("solution.txt"), &report.solution)?;
    let summary = SolveSummary {
        algorithm,
        rank,
        iterations: report.iterations,
        stop_reason: report.stop_reason.to_string(),
        final_residual: report.final_residual(),
        snr_recon_db: snr,
        residual_trace: &report.residual_trace,
        error_trace: &report.error_trace,
    };
    fs::write(
        args.out_dir.join("report.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    println!(
        "{algorithm}: rank {rank}, {} iterations, stop {}, residual {:.3e}{}",
        report.iterations,
        report.stop_reason,
        report.final_residual(),
        snr.map(|s| format!(", SNR {s:.2} dB")).unwrap_or_default()
    );
    Ok(())
}

fn run_solver(
    op: &Operator,
    b: &[f64],
    truth: Option<&admira::linalg::DenseMatrix>,
    algorithm: Algorithm,
    admira: &SolverConfig,
    svt: &SvtConfig,
    args: &SolveArgs,
) -> Result<(usize, SolverReport)> {
    match algorithm {
        Algorithm::Admira => match args.eta {
            Some(eta) => {
                let mode = if args.bisection {
                    SearchMode::Bisection
                } else {
                    SearchMode::Incremental
                };
                Ok(rank_search(op, b, args.rank, eta, mode, admira, truth)?)
            }
            None => Ok((admira.target_rank, admira_solve(op, b, admira, truth)?)),
        },
        Algorithm::Svt => {
            let Operator::Sampling(sampling) = op else {
                bail!("svt needs a sampling operator");
            };
            let report = svt_solve(sampling, b, svt, truth)?;
            Ok((report.solution.len(), report))
        }
    }
}

fn table1(args: Table1Args) -> Result<()> {
    let config = args.sweep.config(20)?;
    let (rows, records) = run_table1(&args.sizes, &config)?;
    for r in &rows {
        println!(
            "n={} p={} p/n2={:.3} p/dr={:.1} | noiseless {:.1} dB {:.1} it | 20 dB {:.1} dB {:.1} it",
            r.n, r.p, r.p_over_n2, r.p_over_dr, r.snr_noiseless_db, r.iters_noiseless,
            r.snr_noisy_db, r.iters_noisy
        );
    }
    args.sweep.write(&rows, &records)
}

fn table2(args: Table2Args) -> Result<()> {
    let config = args.sweep.config(10)?;
    let (rows, records) = run_table2(args.n, &args.ranks, &args.densities, &config)?;
    for r in &rows {
        println!(
            "r={} p/n2={:.2} | admira {:.1} dB {:.1} it | svt {:.1} dB {:.1} it",
            r.r, r.density, r.admira_snr_db, r.admira_iters, r.svt_snr_db, r.svt_iters
        );
    }
    args.sweep.write(&rows, &records)
}

fn phase(args: PhaseArgs) -> Result<()> {
    let config = args.sweep.config(10)?;
    let options = PhaseOptions {
        algorithms: args.algos.iter().map(|&a| a.into()).collect(),
    };
    let (cells, records) = run_phase(args.n, &args.p_grid, &args.ranks, &options, &config)?;
    for c in &cells {
        println!(
            "{} r={} p={} p/dr={:.2}: {}/{}",
            c.algorithm, c.r, c.p, c.p_over_dr, c.successes, c.trials
        );
    }
    args.sweep.write(&cells, &records)
}

fn ripcheck(args: RipArgs) -> Result<()> {
    let op = match &args.operator_file {
        Some(path) => read_operator(path)?,
        None => {
            let n = args.n.unwrap_or(args.m);
            match args.operator {
                OperatorArg::Gaussian => {
                    Operator::Gaussian(GaussianOperator::new(args.m, n, args.p, args.seed)?)
                }
                OperatorArg::Sampling => {
                    Operator::Sampling(SamplingOperator::random(args.m, n, args.p, args.seed)?)
                }
            }
        }
    };
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let report = check_proposition_inequalities(&op, args.rank, args.trials, args.seed, exec);
    let mut text = String::new();
    for e in &report.delta_estimates {
        text.push_str(&serde_json::to_string(e)?);
        text.push('\n');
    }
    text.push_str(&report.to_json_lines()?);
    match &args.out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "delta_{} >= {:.4}; {} of {} checks inconsistent",
        report.r,
        report.delta_estimates.last().map_or(0.0, |e| e.delta_lower),
        report.inconsistent(),
        report.records.len()
    );
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Table1(a) => table1(a),
        Command::Table2(a) => table2(a),
        Command::Phase(a) => phase(a),
        Command::Ripcheck(a) => ripcheck(a),
    }
}
