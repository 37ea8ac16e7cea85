//! Error budgets, atomic bands, iteration bounds and SNR metrics.

mod propositions;

pub use propositions::{
    check_proposition_inequalities, projection_norm, CheckKind, CheckRecord, CheckStatus,
    PropositionReport,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{full_svd, norm, svd_of_factored, DenseMatrix, FactoredMatrix, RANK_TOL};

/// Exact recovery is reported as this many dB instead of `+∞`.
pub const SNR_CAP_DB: f64 = 300.0;

/// Unrecoverable energy `ε = ‖X₀ − X₀,r‖_F + ‖X₀ − X₀,r‖_*/√r + ‖ν‖₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub frob_tail: f64,
    pub nuc_tail: f64,
    pub noise: f64,
    pub epsilon: f64,
}

pub fn unrecoverable_energy(x0: &DenseMatrix, r: usize, noise_norm: f64) -> Result<ErrorBudget> {
    if r == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    if !(noise_norm >= 0.0) {
        return Err(Error::InvalidArgument("noise norm must be nonnegative".into()));
    }
    let sigmas = full_svd(x0).sigmas();
    let s1 = sigmas.first().copied().unwrap_or(0.0);
    let tail: Vec<f64> = sigmas
        .iter()
        .skip(r)
        .map(|&s| if s > RANK_TOL * s1 { s } else { 0.0 })
        .collect();
    let frob_tail = norm(&tail);
    let nuc_tail: f64 = tail.iter().sum();
    Ok(ErrorBudget {
        frob_tail,
        nuc_tail,
        noise: noise_norm,
        epsilon: frob_tail + nuc_tail / (r as f64).sqrt() + noise_norm,
    })
}

/// Atomic bands of a matrix: atom `k` falls in band `j` when its normalized
/// energy `σ_k²/‖X‖_F²` lies in `(2^{−(j+1)}, 2^{−j}]`. The profile `t` is the
/// number of occupied bands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandProfile {
    pub bands: BTreeMap<u32, usize>,
    pub t: usize,
    pub rank: usize,
}

fn band_index(energy: f64) -> u32 {
    let mut j = (-energy.log2()).floor().max(0.0) as u32;
    // log2 rounding can land one band off at exact octave boundaries
    while j > 0 && energy > 0.5f64.powi(j as i32) {
        j -= 1;
    }
    while energy <= 0.5f64.powi(j as i32 + 1) {
        j += 1;
    }
    j
}

pub fn profile_from_singular_values(sigmas: &[f64]) -> Result<BandProfile> {
    let s1 = sigmas.iter().copied().fold(0.0, f64::max);
    if s1 == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let nonzero: Vec<f64> = sigmas.iter().copied().filter(|&s| s > RANK_TOL * s1).collect();
    let total: f64 = nonzero.iter().map(|s| s * s).sum();
    let mut bands = BTreeMap::new();
    for s in &nonzero {
        *bands.entry(band_index(s * s / total)).or_insert(0) += 1;
    }
    Ok(BandProfile {
        t: bands.len(),
        rank: nonzero.len(),
        bands,
    })
}

pub fn profile(x: &DenseMatrix) -> Result<BandProfile> {
    profile_from_singular_values(&full_svd(x).sigmas())
}

pub fn profile_of_factored(x: &FactoredMatrix) -> Result<BandProfile> {
    let svd = if x.is_orthonormal() { x.clone() } else { svd_of_factored(x) };
    profile_from_singular_values(&svd.sigmas())
}

/// Iteration bound `t·log_{4/3}(1 + 4.3·sqrt(r/t)) + 6` for a rank-`r`
/// target with profile `t`, `1 ≤ t ≤ r`.
pub fn iteration_bound(r: usize, t: usize) -> f64 {
    debug_assert!(1 <= t && t <= r, "profile must satisfy 1 <= t <= r");
    let (r, t) = (r as f64, t as f64);
    t * (1.0 + 4.3 * (r / t).sqrt()).ln() / (4.0f64 / 3.0).ln() + 6.0
}

/// `20·log₁₀(signal/error)`, capped at [`SNR_CAP_DB`].
pub fn snr_db(signal_norm: f64, error_norm: f64) -> f64 {
    if error_norm == 0.0 {
        return SNR_CAP_DB;
    }
    (20.0 * (signal_norm / error_norm).log10()).min(SNR_CAP_DB)
}

/// `20·log₁₀(‖X₀‖_F / ‖X₀ − X̂‖_F)`.
pub fn snr_recon(x0: &DenseMatrix, xhat: &DenseMatrix) -> Result<f64> {
    let signal = x0.frobenius_norm();
    if signal == 0.0 {
        return Err(Error::InvalidArgument("reconstruction SNR needs a nonzero X0".into()));
    }
    Ok(snr_db(signal, x0.sub(xhat)?.frobenius_norm()))
}

pub fn snr_recon_factored(x0: &DenseMatrix, xhat: &FactoredMatrix) -> Result<f64> {
    snr_recon(x0, &xhat.to_dense())
}

/// `20·log₁₀(‖b‖₂ / ‖ν‖₂)`.
pub fn snr_meas(b: &[f64], nu: &[f64]) -> Result<f64> {
    let signal = norm(b);
    if signal == 0.0 {
        return Err(Error::InvalidArgument("measurement SNR needs nonzero b".into()));
    }
    Ok(snr_db(signal, norm(nu)))
}

/// Sum of singular values.
pub fn nuclear_norm(x: &DenseMatrix) -> f64 {
    full_svd(x).sigmas().iter().sum()
}
