//! The greedy rank-`r` pursuit and its rank-search wrappers.
//!
//! Each iteration, starting from `X̂ = 0` and an empty atom set:
//! 1. back-project the residual, `M = A*(b − A X̂)`;
//! 2. take the `2r` leading singular atoms of `M`;
//! 3. merge them with the `r` atoms of `X̂`;
//! 4. solve least squares for `b` on the span of the merged atoms;
//! 5. keep the best rank-`r` approximation of that solution as the new `X̂`.
//!
//! Iteration stops when the relative residual `‖b − A X̂‖/‖b‖` falls below
//! the tolerance, when it fails to decrease (the previous iterate is kept),
//! or after `max_iter` rounds.

mod least_squares;
mod rank_search;

pub use least_squares::{least_squares_on_span, LsMethod, LsOptions, LS_DROP_TOL, QR_MAX_ENTRIES};
pub use rank_search::{rank_search, SearchMode};

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::{best_rank_r, norm, truncated_svd, DenseMatrix, FactoredMatrix, LanczosOptions, SvdMode};
use crate::operators::MeasurementOperator;
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub target_rank: usize,
    pub residual_tol: f64,
    pub max_iter: usize,
    pub ls_method: LsMethod,
    pub ls_tol: f64,
    pub ls_max_iter: usize,
    pub svd_mode: SvdMode,
    /// Stop once an iteration lowers the relative residual by less than
    /// this fraction. With noisy data the residual creeps toward the noise
    /// floor by ever smaller amounts and never strictly increases; `0`
    /// disables the test.
    pub stall_tol: f64,
    /// Additionally cap iterations at `6(r + 1)`.
    pub theoretical_cap: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let ls = LsOptions::default();
        SolverConfig {
            target_rank: 1,
            residual_tol: 1e-4,
            max_iter: 500,
            ls_method: ls.method,
            ls_tol: ls.tol,
            ls_max_iter: ls.max_iter,
            svd_mode: SvdMode::Auto,
            stall_tol: 1e-3,
            theoretical_cap: false,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_rank(target_rank: usize) -> Self {
        SolverConfig {
            target_rank,
            ..Default::default()
        }
    }

    pub fn ls_options(&self) -> LsOptions {
        LsOptions {
            method: self.ls_method,
            tol: self.ls_tol,
            max_iter: self.ls_max_iter,
        }
    }

    pub fn iteration_limit(&self) -> usize {
        if self.theoretical_cap {
            self.max_iter.min(6 * (self.target_rank + 1))
        } else {
            self.max_iter
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_rank == 0 {
            return Err(Error::InvalidArgument("target rank must be at least 1".into()));
        }
        if !(self.residual_tol > 0.0 && self.ls_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.stall_tol) {
            return Err(Error::InvalidArgument("stall_tol must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Tol,
    MonotoneBreak,
    Stalled,
    MaxIter,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::Tol => "tol",
            StopReason::MonotoneBreak => "monotone_break",
            StopReason::Stalled => "stalled",
            StopReason::MaxIter => "max_iter",
        })
    }
}

/// Outcome of a solve. The traces have one entry per accepted iteration; an
/// iterate rejected by the monotone-decrease test is not recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub solution: FactoredMatrix,
    pub iterations: usize,
    /// `‖b − A X̂_k‖₂ / ‖b‖₂` after each iteration.
    pub residual_trace: Vec<f64>,
    /// `‖X₀ − X̂_k‖_F` after each iteration, when the ground truth is known.
    pub error_trace: Vec<f64>,
    pub stop_reason: StopReason,
}

impl SolverReport {
    pub(crate) fn zero(rows: usize, cols: usize) -> Self {
        SolverReport {
            solution: FactoredMatrix::zero(rows, cols),
            iterations: 0,
            residual_trace: Vec::new(),
            error_trace: Vec::new(),
            stop_reason: StopReason::Tol,
        }
    }

    /// Relative residual of the returned solution: 0 for zero data, 1 when
    /// no iterate improved on `X̂ = 0`.
    pub fn final_residual(&self) -> f64 {
        match self.residual_trace.last() {
            Some(&r) => r,
            None if self.stop_reason == StopReason::Tol => 0.0,
            None => 1.0,
        }
    }
}

pub(crate) fn check_inputs(
    op: &dyn MeasurementOperator,
    b: &[f64],
    ground_truth: Option<&DenseMatrix>,
) -> Result<()> {
    op.check_measurements(b)?;
    if let Some(index) = b.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if let Some(x0) = ground_truth {
        if x0.shape() != (op.rows(), op.cols()) {
            return Err(mismatch(
                format!("{}x{} ground truth", op.rows(), op.cols()),
                format!("{}x{}", x0.rows(), x0.cols()),
            ));
        }
    }
    Ok(())
}

pub(crate) fn distance_to(x0: &DenseMatrix, x: &FactoredMatrix) -> f64 {
    let mut diff = x.to_dense();
    for (d, t) in diff.as_mut_slice().iter_mut().zip(x0.as_slice()) {
        *d = t - *d;
    }
    diff.frobenius_norm()
}

pub(crate) fn residual(b: &[f64], fitted: &[f64]) -> Vec<f64> {
    b.iter().zip(fitted).map(|(x, y)| x - y).collect()
}

/// Recovers a rank-`config.target_rank` matrix from `b ≈ A(X)`.
pub fn admira_solve(
    op: &dyn MeasurementOperator,
    b: &[f64],
    config: &SolverConfig,
    ground_truth: Option<&DenseMatrix>,
) -> Result<SolverReport> {
    config.validate()?;
    check_inputs(op, b, ground_truth)?;
    let (m, n) = (op.rows(), op.cols());
    let r = config.target_rank;
    let b_norm = norm(b);
    let mut report = SolverReport::zero(m, n);
    if b_norm == 0.0 {
        return Ok(report);
    }

    let ls = config.ls_options();
    let mut current = FactoredMatrix::zero(m, n);
    let mut resid = b.to_vec();
    let mut prev_ratio = 1.0;
    report.stop_reason = StopReason::MaxIter;

    for it in 0..config.iteration_limit() {
        let proxy = op.adjoint(&resid)?;
        let lanczos = LanczosOptions {
            seed: derive_seed(config.seed, it as u64),
            ..Default::default()
        };
        let selected = truncated_svd(&proxy, 2 * r, config.svd_mode, &lanczos)?;
        let merged = selected.atoms().union(&current.atoms());
        let fitted_span = least_squares_on_span(op, b, &merged, &ls)?;
        let candidate = best_rank_r(&fitted_span, r);
        let candidate_resid = residual(b, &op.apply_factored(&candidate)?);
        let ratio = norm(&candidate_resid) / b_norm;

        if ratio > prev_ratio {
            report.stop_reason = StopReason::MonotoneBreak;
            break;
        }
        report.iterations += 1;
        report.residual_trace.push(ratio);
        if let Some(x0) = ground_truth {
            report.error_trace.push(distance_to(x0, &candidate));
        }
        current = candidate;
        resid = candidate_resid;
        let stalled = ratio > (1.0 - config.stall_tol) * prev_ratio;
        prev_ratio = ratio;
        if ratio < config.residual_tol {
            report.stop_reason = StopReason::Tol;
            break;
        }
        if stalled {
            report.stop_reason = StopReason::Stalled;
            break;
        }
    }
    report.solution = current;
    Ok(report)
}
