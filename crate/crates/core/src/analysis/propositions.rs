//! Monte Carlo consistency checks of restricted-isometry inequalities.
//!
//! Only lower bounds on `δ_r` are computable, so every inequality is
//! evaluated at the estimated constant and the outcome is labeled
//! "consistent" or "inconsistent". An inconsistent record means the estimate
//! is too low for that sample; it never disproves the inequality.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::nuclear_norm;
use crate::linalg::{dot, norm, small_svd, Atom, AtomSet, DenseMatrix, LinearMap};
use crate::operators::{estimate_delta_profile, MeasurementOperator, RipEstimate};
use crate::par::{map_indexed, Execution};
use crate::rng::{derive_seed, normal_vec, rng_from_seed, unit_vec};

/// Relative slack for floating-point comparisons.
const CMP_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `‖P_Ψ A* b‖_F ≤ sqrt(1 + δ_r) ‖b‖₂` for `|Ψ| ≤ r`.
    ProjectedAdjointBound,
    /// `‖A X‖₂ ≤ sqrt(1 + δ_r) (‖X‖_F + ‖X‖_*/√r)` for arbitrary `X`.
    NuclearEnergyBound,
    /// `δ_r` nondecreasing in `r`.
    DeltaMonotone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Consistent,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: CheckKind,
    pub trial: usize,
    pub r: usize,
    pub delta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub r: usize,
    pub trials: usize,
    pub seed: u64,
    pub delta_estimates: Vec<RipEstimate>,
    pub records: Vec<CheckRecord>,
}

impl PropositionReport {
    pub fn inconsistent(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status == CheckStatus::Inconsistent)
            .count()
    }

    /// One JSON object per line, one line per check.
    pub fn to_json_lines(&self) -> serde_json::Result<String> {
        let mut out = String::new();
        for rec in &self.records {
            out.push_str(&serde_json::to_string(rec)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// `‖P_Ψ M‖_F` for the orthogonal projection onto `span{u_k v_kᵀ}`:
/// with `c_k = u_kᵀ M v_k` and Gram matrix `G`, the squared norm is `cᵀ G⁺ c`.
pub fn projection_norm(m: &dyn LinearMap, atoms: &AtomSet) -> f64 {
    if atoms.is_empty() {
        return 0.0;
    }
    let mut tmp = vec![0.0; m.nrows()];
    let c: Vec<f64> = atoms
        .iter()
        .map(|a| {
            m.mul_vec(&a.v, &mut tmp);
            dot(&a.u, &tmp)
        })
        .collect();
    let k = c.len();
    let g = atoms.gram();
    let gram = DMatrix::from_fn(k, k, |i, j| g[i][j]);
    // cᵀ G⁺ c through the eigen-decomposition G = W Σ Wᵀ
    let (sigmas, w, _) = small_svd(gram);
    let cutoff = 1e-12 * sigmas[0];
    sigmas
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s > cutoff)
        .map(|(i, &s)| {
            let proj: f64 = w.column(i).iter().zip(&c).map(|(a, b)| a * b).sum();
            proj * proj / s
        })
        .sum::<f64>()
        .sqrt()
}

fn status(lhs: f64, rhs: f64) -> CheckStatus {
    if lhs <= rhs * (1.0 + CMP_SLACK) {
        CheckStatus::Consistent
    } else {
        CheckStatus::Inconsistent
    }
}

/// Runs `trials` random instances of each bound against `δ_r` estimated
/// from the same number of trials.
pub fn check_proposition_inequalities(
    op: &dyn MeasurementOperator,
    r: usize,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> PropositionReport {
    let r = r.max(1);
    let (m, n) = (op.rows(), op.cols());
    let estimates = estimate_delta_profile(op, r, trials.max(1), seed, exec);
    let delta = estimates.last().expect("r >= 1").delta_lower;
    let factor = (1.0 + delta).sqrt();

    let mut records: Vec<CheckRecord> = map_indexed(exec, trials, |t| {
        let mut rng = rng_from_seed(derive_seed(seed ^ 0xA5A5_A5A5, t as u64));

        let size = 1 + (rng_index(&mut rng, r));
        let atoms = (0..size)
            .map(|_| Atom {
                u: unit_vec(&mut rng, m),
                v: unit_vec(&mut rng, n),
            })
            .collect();
        let atoms = AtomSet::from_atoms(m, n, atoms).expect("unit atoms");
        let b = normal_vec(&mut rng, op.len());
        let back = op.adjoint(&b).expect("length matches");
        let lhs = projection_norm(&back, &atoms);
        let rhs = factor * norm(&b);
        let projected = CheckRecord {
            check: CheckKind::ProjectedAdjointBound,
            trial: t,
            r,
            delta,
            lhs,
            rhs,
            status: status(lhs, rhs),
        };

        let x = DenseMatrix::random_normal(m, n, &mut rng);
        let lhs = norm(&op.apply(&x).expect("shape matches"));
        let rhs = factor * (x.frobenius_norm() + nuclear_norm(&x) / (r as f64).sqrt());
        let energy = CheckRecord {
            check: CheckKind::NuclearEnergyBound,
            trial: t,
            r,
            delta,
            lhs,
            rhs,
            status: status(lhs, rhs),
        };
        [projected, energy]
    })
    .into_iter()
    .flatten()
    .collect();

    for w in estimates.windows(2) {
        records.push(CheckRecord {
            check: CheckKind::DeltaMonotone,
            trial: 0,
            r: w[1].r,
            delta: w[1].delta_lower,
            lhs: w[0].delta_lower,
            rhs: w[1].delta_lower,
            status: status(w[0].delta_lower, w[1].delta_lower),
        });
    }

    PropositionReport {
        r,
        trials,
        seed,
        delta_estimates: estimates,
        records,
    }
}

fn rng_index(rng: &mut crate::rng::Rng, bound: usize) -> usize {
    use rand::Rng as _;
    rng.random_range(0..bound)
}
