//! Monte Carlo lower bounds on the rank-restricted isometry constant
//! `δ_r(A) = max{σ²_{r,max} − 1, 1 − σ²_{r,min}}`.
//!
//! Every trial draws a nested family `X_1 ⊂ X_2 ⊂ …` of unit-Frobenius
//! matrices, `X_s` being `X_{s−1}` extended by one extra orthogonal triplet.
//! The rank-`r` estimate is the largest `|‖A X_s‖² − 1|` over all trials and
//! all `s ≤ r`. Rank-`≤ r` samples are feasible for `δ_r`, so each estimate is
//! a lower bound and the sequence is nondecreasing in `r`.

use serde::{Deserialize, Serialize};

use super::MeasurementOperator;
use crate::linalg::{axpy, dot, norm, scale_in_place, FactoredMatrix};
use crate::par::{map_indexed, Execution};
use crate::rng::{derive_seed, normal, normal_vec, rng_from_seed, Rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipEstimate {
    pub r: usize,
    /// Largest observed deviation; a lower bound on `δ_r`, not a certificate.
    pub delta_lower: f64,
    pub trials: usize,
    pub seed: u64,
}

fn orthonormal_extension(basis: &[Vec<f64>], len: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let mut x = normal_vec(rng, len);
        for _ in 0..2 {
            for b in basis {
                let c = dot(b, &x);
                axpy(-c, b, &mut x);
            }
        }
        let nx = norm(&x);
        if nx > 1e-8 {
            scale_in_place(&mut x, 1.0 / nx);
            return x;
        }
    }
}

/// Deviations `|‖A X_s‖² − 1|` for `s = 1..=r_max` along one nested draw.
fn trial_deviations(op: &dyn MeasurementOperator, r_max: usize, seed: u64) -> Vec<f64> {
    let (m, n) = (op.rows(), op.cols());
    let mut rng = rng_from_seed(seed);
    let (mut us, mut vs, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    let mut out = Vec::with_capacity(r_max);
    for _ in 0..r_max.min(m).min(n) {
        us.push(orthonormal_extension(&us, m, &mut rng));
        vs.push(orthonormal_extension(&vs, n, &mut rng));
        ws.push(normal(&mut rng));
        let wn = norm(&ws);
        let terms = us
            .iter()
            .zip(&vs)
            .zip(&ws)
            .map(|((u, v), w)| (w / wn, u.clone(), v.clone()));
        let x = FactoredMatrix::from_terms(m, n, terms).expect("dimensions match");
        let y = op.apply_factored(&x).expect("dimensions match");
        out.push((dot(&y, &y) - 1.0).abs());
    }
    // Ranks beyond min(m, n) add no new matrices.
    while out.len() < r_max {
        out.push(*out.last().unwrap_or(&0.0));
    }
    out
}

/// Estimates for every rank `1..=r_max` from one shared set of nested draws.
pub fn estimate_delta_profile(
    op: &dyn MeasurementOperator,
    r_max: usize,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Vec<RipEstimate> {
    let per_trial = map_indexed(exec, trials, |t| {
        trial_deviations(op, r_max, derive_seed(seed, t as u64))
    });
    let mut running = 0.0f64;
    (0..r_max)
        .map(|s| {
            for devs in &per_trial {
                running = running.max(devs[s]);
            }
            RipEstimate {
                r: s + 1,
                delta_lower: running,
                trials,
                seed,
            }
        })
        .collect()
}

/// Lower bound on `δ_r(A)` from `trials` random unit-norm rank-`≤ r` samples.
pub fn estimate_delta(op: &dyn MeasurementOperator, r: usize, trials: usize, seed: u64) -> RipEstimate {
    let trials = trials.max(1);
    estimate_delta_profile(op, r.max(1), trials, seed, Execution::default())
        .pop()
        .expect("at least one rank")
}
