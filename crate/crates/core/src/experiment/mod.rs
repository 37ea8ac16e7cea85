//! Problem generation, single trials and CSV plumbing for the benchmark
//! sweeps.
//!
//! Every trial derives its own seed from the sweep seed and its index, so
//! results do not depend on thread count or scheduling.

mod sweeps;

pub use sweeps::{
    run_phase, run_table1, run_table2, table1_measurements, PhaseCell, PhaseOptions, SweepConfig,
    Table1Row, Table2Row,
};

use std::fs::OpenOptions;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::snr_recon;
use crate::baseline::{svt_solve, SvtConfig};
use crate::error::{Error, Result};
use crate::linalg::{norm, DenseMatrix};
use crate::operators::{GaussianOperator, MeasurementOperator, Operator, SamplingOperator};
use crate::rng::{derive_seed, normal_vec, rng_from_seed};
use crate::solver::{admira_solve, SolverConfig, SolverReport};

/// Reconstructions at or above this SNR count as successful.
pub const SUCCESS_SNR_DB: f64 = 70.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Gaussian,
    Sampling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Admira,
    Svt,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Admira => "admira",
            Algorithm::Svt => "svt",
        })
    }
}

/// A random recovery problem: `X₀ = Y_L Y_Rᵀ` with Gaussian factors, a
/// random operator and optional white measurement noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub m: usize,
    pub n: usize,
    pub r_true: usize,
    pub operator: OperatorKind,
    pub p: usize,
    /// `None` means noiseless.
    #[serde(default)]
    pub snr_meas_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.m == 0 || self.n == 0 {
            return bad("matrix dimensions must be positive".into());
        }
        if self.r_true == 0 || self.r_true > self.m.min(self.n) {
            return bad(format!("r_true = {} outside 1..=min(m, n)", self.r_true));
        }
        if self.p == 0 {
            return bad("p must be positive".into());
        }
        if self.operator == OperatorKind::Sampling && self.p > self.m * self.n {
            return bad(format!("p = {} exceeds m·n = {}", self.p, self.m * self.n));
        }
        if let Some(snr) = self.snr_meas_db {
            if !snr.is_finite() {
                return bad("snr_meas_db must be finite".into());
            }
        }
        Ok(())
    }

    /// Degrees of freedom `r(m + n − r)` of a rank-`r_true` matrix.
    pub fn degrees_of_freedom(&self) -> usize {
        degrees_of_freedom(self.m, self.n, self.r_true)
    }

    /// Short hex digest identifying the spec in CSV output.
    pub fn hash(&self) -> String {
        spec_hash(self)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

pub fn degrees_of_freedom(m: usize, n: usize, r: usize) -> usize {
    r * (m + n - r)
}

/// First 16 hex digits of the SHA-256 of the value's JSON encoding.
pub fn spec_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("specs serialize");
    let digest = Sha256::digest(&json);
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub operator: Operator,
    pub b: Vec<f64>,
    pub x0: DenseMatrix,
    pub noise: Vec<f64>,
}

pub fn generate_problem(spec: &ProblemSpec) -> Result<Problem> {
    spec.validate()?;
    let (m, n, r) = (spec.m, spec.n, spec.r_true);
    let op_seed = derive_seed(spec.seed, 0);
    let operator = match spec.operator {
        OperatorKind::Gaussian => Operator::Gaussian(GaussianOperator::new(m, n, spec.p, op_seed)?),
        OperatorKind::Sampling => Operator::Sampling(SamplingOperator::random(m, n, spec.p, op_seed)?),
    };

    let mut rng = rng_from_seed(derive_seed(spec.seed, 1));
    let left = DenseMatrix::random_normal(m, r, &mut rng);
    let right = DenseMatrix::random_normal(n, r, &mut rng);
    let x0 = left.matmul(&right.transpose())?;
    let clean = operator.apply(&x0)?;

    let noise = match spec.snr_meas_db {
        None => vec![0.0; clean.len()],
        Some(db) => {
            let mut rng = rng_from_seed(derive_seed(spec.seed, 2));
            let w = normal_vec(&mut rng, clean.len());
            let scale = norm(&clean) * 10f64.powf(-db / 20.0) / norm(&w);
            w.into_iter().map(|x| x * scale).collect()
        }
    };
    let b = clean.iter().zip(&noise).map(|(c, e)| c + e).collect();
    Ok(Problem {
        operator,
        b,
        x0,
        noise,
    })
}

/// Runs one algorithm on a generated problem with ground truth tracking.
pub fn solve_once(
    problem: &Problem,
    algorithm: Algorithm,
    admira: &SolverConfig,
    svt: &SvtConfig,
) -> Result<SolverReport> {
    let truth = Some(&problem.x0);
    match algorithm {
        Algorithm::Admira => admira_solve(&problem.operator, &problem.b, admira, truth),
        Algorithm::Svt => match &problem.operator {
            Operator::Sampling(op) => svt_solve(op, &problem.b, svt, truth),
            Operator::Gaussian(_) => Err(Error::InvalidArgument(
                "the SVT baseline only supports the sampling operator".into(),
            )),
        },
    }
}

/// One row of a per-trial log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub spec_hash: String,
    pub trial: usize,
    pub algorithm: Algorithm,
    pub snr_recon_db: f64,
    pub iterations: usize,
    pub stop_reason: String,
    pub wall_time_s: f64,
}

impl TrialRecord {
    pub fn succeeded(&self) -> bool {
        self.snr_recon_db >= SUCCESS_SNR_DB
    }
}

/// Generates trial `trial` of `spec` and solves it. Solver failures become
/// records with a `NaN` SNR and an `error:` stop reason; only an invalid
/// spec is an error.
pub fn run_trial(
    spec: &ProblemSpec,
    trial: usize,
    algorithm: Algorithm,
    admira: &SolverConfig,
    svt: &SvtConfig,
) -> Result<(TrialRecord, Option<SolverReport>)> {
    let trial_spec = spec.with_seed(derive_seed(spec.seed, trial as u64));
    let problem = generate_problem(&trial_spec)?;
    let admira = SolverConfig {
        seed: trial_spec.seed,
        ..admira.clone()
    };
    let svt = SvtConfig {
        seed: trial_spec.seed,
        ..svt.clone()
    };
    let start = Instant::now();
    let outcome = solve_once(&problem, algorithm, &admira, &svt);
    let wall_time_s = start.elapsed().as_secs_f64();
    let mut record = TrialRecord {
        spec_hash: spec.hash(),
        trial,
        algorithm,
        snr_recon_db: f64::NAN,
        iterations: 0,
        stop_reason: String::new(),
        wall_time_s,
    };
    match outcome {
        Ok(report) => {
            record.snr_recon_db = snr_recon(&problem.x0, &report.solution.to_dense())?;
            record.iterations = report.iterations;
            record.stop_reason = report.stop_reason.to_string();
            Ok((record, Some(report)))
        }
        Err(e) => {
            if let Error::Divergence { iteration, .. } = e {
                record.iterations = iteration;
            }
            record.stop_reason = format!("error:{}", error_tag(&e));
            Ok((record, None))
        }
    }
}

fn error_tag(e: &Error) -> &'static str {
    match e {
        Error::Divergence { .. } => "divergence",
        Error::LanczosNonConvergence { .. } => "lanczos_nonconvergence",
        Error::LeastSquaresNonConvergence { .. } => "least_squares_nonconvergence",
        Error::NoisyConstraint => "noisy_constraint",
        _ => "other",
    }
}

/// Appends rows to a CSV file, writing the header only when the file is new
/// or empty.
pub fn append_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut writer = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Mean of the finite entries, `NaN` when there are none.
pub(crate) fn finite_mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}
