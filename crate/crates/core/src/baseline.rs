//! Singular value thresholding for noiseless matrix completion.
//!
//! `Y₀ = 0`; at step `k`, `X_k` is `Y_{k−1}` with its singular values
//! soft-thresholded at `τ`, and `Y_k = Y_{k−1} + step · A*(b − A X_k)`. Since
//! `Y` is always a back-projection it lives on the sampled entries only, and
//! only the singular values above `τ` are ever computed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, truncated_svd, DenseMatrix, FactoredMatrix, LanczosOptions, SvdMode, Triplet};
use crate::operators::{MeasurementOperator, SamplingOperator};
use crate::rng::derive_seed;
use crate::solver::{check_inputs, distance_to, residual, SolverReport, StopReason};

/// How many extra singular values to request each time the current guess
/// turns out to be too small.
const RANK_INCREMENT: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvtConfig {
    /// Threshold; `None` means `5·sqrt(m·n)`.
    pub tau: Option<f64>,
    /// Step size; `None` means `1.2·m·n/p`.
    pub step: Option<f64>,
    pub residual_tol: f64,
    pub max_iter: usize,
    pub svd_mode: SvdMode,
    /// Bound on `‖b − A X‖`. Only 0 (the affine constraint) is supported.
    pub noise_bound: f64,
    pub seed: u64,
}

impl Default for SvtConfig {
    fn default() -> Self {
        SvtConfig {
            tau: None,
            step: None,
            residual_tol: 1e-4,
            max_iter: 500,
            svd_mode: SvdMode::Auto,
            noise_bound: 0.0,
            seed: 0,
        }
    }
}

impl SvtConfig {
    pub fn tau_for(&self, rows: usize, cols: usize) -> f64 {
        self.tau.unwrap_or(5.0 * ((rows * cols) as f64).sqrt())
    }

    pub fn step_for(&self, rows: usize, cols: usize, p: usize) -> f64 {
        self.step.unwrap_or(1.2 * (rows * cols) as f64 / p as f64)
    }
}

pub fn svt_solve(
    op: &SamplingOperator,
    b: &[f64],
    config: &SvtConfig,
    ground_truth: Option<&DenseMatrix>,
) -> Result<SolverReport> {
    if config.noise_bound != 0.0 {
        return Err(Error::NoisyConstraint);
    }
    let tau = config.tau_for(op.rows(), op.cols());
    let step = config.step_for(op.rows(), op.cols(), op.len().max(1));
    if !(tau > 0.0 && step > 0.0) {
        return Err(Error::InvalidArgument("tau and step must be positive".into()));
    }
    check_inputs(op, b, ground_truth)?;
    let (m, n) = (op.rows(), op.cols());
    let mut report = SolverReport::zero(m, n);
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(report);
    }
    report.stop_reason = StopReason::MaxIter;

    let full = m.min(n);
    let mut y = vec![0.0; op.len()];
    let mut prev_rank = 0;
    for it in 0..config.max_iter {
        let lanczos = LanczosOptions {
            seed: derive_seed(config.seed, it as u64),
            ..Default::default()
        };
        let x = if y.iter().all(|&v| v == 0.0) {
            FactoredMatrix::zero(m, n)
        } else {
            let ymat = op.adjoint(&y)?;
            let mut want = (prev_rank + 1).min(full);
            let svd = loop {
                let svd = truncated_svd(&ymat, want, config.svd_mode, &lanczos)?;
                let enough = svd.len() < want || svd.triplets()[want - 1].sigma <= tau || want == full;
                if enough {
                    break svd;
                }
                want = (want + RANK_INCREMENT).min(full);
            };
            soft_threshold(&svd, tau)
        };
        prev_rank = x.len();

        let resid = residual(b, &op.apply_factored(&x)?);
        let resid_norm = norm(&resid);
        let ratio = resid_norm / b_norm;
        report.iterations += 1;
        report.residual_trace.push(ratio);
        if let Some(x0) = ground_truth {
            report.error_trace.push(distance_to(x0, &x));
        }
        report.solution = x;
        if ratio < config.residual_tol {
            report.stop_reason = StopReason::Tol;
            break;
        }
        if resid_norm > 1e3 * b_norm {
            return Err(Error::Divergence {
                iteration: it + 1,
                residual: resid_norm,
            });
        }
        for (yk, rk) in y.iter_mut().zip(&resid) {
            *yk += step * rk;
        }
    }
    Ok(report)
}

/// Soft-thresholds the singular values of an SVD at `tau`: every retained
/// value becomes `σ − τ > 0`, singular vectors are kept, so the result is
/// itself an SVD.
pub fn soft_threshold(svd: &FactoredMatrix, tau: f64) -> FactoredMatrix {
    debug_assert!(svd.is_orthonormal());
    let triplets = svd
        .triplets()
        .iter()
        .take_while(|t| t.sigma > tau)
        .map(|t| Triplet {
            sigma: t.sigma - tau,
            u: t.u.clone(),
            v: t.v.clone(),
        })
        .collect();
    FactoredMatrix::from_svd(svd.rows(), svd.cols(), triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::full_svd;
    use crate::rng::rng_from_seed;

    #[test]
    fn thresholding_is_exact() {
        let svd = full_svd(&DenseMatrix::from_diagonal(&[5.0, 3.0, 1.0]));
        let t = soft_threshold(&svd, 2.0);
        let want: Vec<f64> = svd.sigmas()[..2].iter().map(|s| s - 2.0).collect();
        assert_eq!(t.sigmas(), want);
        assert!((want[0] - 3.0).abs() < 1e-14 && (want[1] - 1.0).abs() < 1e-14);
        assert!(t.is_orthonormal());
        assert!(soft_threshold(&svd, 5.0).is_empty());
    }

    #[test]
    fn zero_data_stops_immediately() {
        let op = SamplingOperator::random(6, 6, 12, 1).unwrap();
        let rep = svt_solve(&op, &[0.0; 12], &SvtConfig::default(), None).unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(rep.solution.is_empty());
        assert_eq!(rep.stop_reason, StopReason::Tol);
    }

    #[test]
    fn noisy_constraint_is_rejected() {
        let op = SamplingOperator::random(6, 6, 12, 1).unwrap();
        let config = SvtConfig {
            noise_bound: 0.1,
            ..Default::default()
        };
        assert!(matches!(svt_solve(&op, &[1.0; 12], &config, None), Err(Error::NoisyConstraint)));
    }

    #[test]
    fn oversized_step_diverges_loudly() {
        let mut rng = rng_from_seed(2);
        let x = DenseMatrix::random_normal(10, 10, &mut rng);
        let op = SamplingOperator::random(10, 10, 60, 3).unwrap();
        let b = op.apply(&x).unwrap();
        let config = SvtConfig {
            tau: Some(0.01),
            step: Some(50.0),
            ..Default::default()
        };
        assert!(matches!(svt_solve(&op, &b, &config, None), Err(Error::Divergence { .. })));
    }

    #[test]
    fn recovers_small_low_rank_matrix() {
        let mut rng = rng_from_seed(4);
        let (n, r) = (40, 2);
        let x0 = DenseMatrix::random_normal(n, r, &mut rng)
            .matmul(&DenseMatrix::random_normal(r, n, &mut rng))
            .unwrap();
        let op = SamplingOperator::random(n, n, 900, 5).unwrap();
        let b = op.apply(&x0).unwrap();
        let rep = svt_solve(&op, &b, &SvtConfig::default(), Some(&x0)).unwrap();
        assert_eq!(rep.stop_reason, StopReason::Tol);
        let rel = rep.error_trace.last().unwrap() / x0.frobenius_norm();
        assert!(rel < 1e-3, "relative error {rel}");
    }
}
