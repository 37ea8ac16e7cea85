//! Restarted Golub–Kahan–Lanczos bidiagonalization.
//!
//! Builds orthonormal bases `U` (left) and `V` (right) with full
//! reorthogonalization (classical Gram–Schmidt, applied twice) so that
//! `M V = U B` holds for the small projected matrix `B`. Ritz triplets come
//! from the SVD of `B`; the residual of triplet `i` is `β |P[L-1, i]|`, where
//! `β` is the norm of the last right-vector residual. When the leading
//! triplets have not converged the factorization is thick-restarted from the
//! `k` best Ritz vectors plus the residual direction.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::svd::{small_svd, RANK_TOL};
use super::{axpy, dot, fix_sign, norm, scale_in_place, LinearMap, Triplet};
use crate::error::{Error, Result};
use crate::rng::{normal_vec, rng_from_seed, Rng};

/// A vector whose norm after orthogonalization falls below this fraction of
/// the running matrix scale is treated as an invariant-subspace breakdown.
const BREAKDOWN_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    /// Convergence threshold on Ritz residual norms, relative to `σ₁`.
    pub tol: f64,
    /// Defaults to `10 · k`.
    pub max_restarts: Option<usize>,
    /// Krylov subspace dimension per cycle. Defaults to `2k + 20`.
    pub work_dim: Option<usize>,
    /// Seed of the random starting vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-10,
            max_restarts: None,
            work_dim: None,
            seed: 0x5eed,
        }
    }
}

/// Orthogonalizes `x` against `basis` twice and returns the coefficients of
/// the removed components.
fn orthogonalize(basis: &[Vec<f64>], x: &mut [f64]) -> Vec<f64> {
    let mut coefs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, b) in coefs.iter_mut().zip(basis) {
            let proj = dot(b, x);
            axpy(-proj, b, x);
            *c += proj;
        }
    }
    coefs
}

fn random_orthonormal(basis: &[Vec<f64>], len: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let mut x = normal_vec(rng, len);
        let before = norm(&x);
        orthogonalize(basis, &mut x);
        let after = norm(&x);
        if after > 1e-8 * before {
            scale_in_place(&mut x, 1.0 / after);
            return x;
        }
    }
}

fn combine(basis: &[Vec<f64>], coefs: &DMatrix<f64>, col: usize, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, b) in basis.iter().enumerate() {
        axpy(coefs[(i, col)], b, &mut out);
    }
    out
}

pub(crate) fn lanczos_svd(
    map: &dyn LinearMap,
    k: usize,
    options: &LanczosOptions,
) -> Result<Vec<Triplet>> {
    let (m, n) = (map.nrows(), map.ncols());
    let full = m.min(n);
    let k = k.min(full);
    if k == 0 {
        return Ok(Vec::new());
    }
    let dim = options.work_dim.unwrap_or(2 * k + 20).max(k + 1).min(full);
    let max_restarts = options.max_restarts.unwrap_or(10 * k);
    let mut rng = rng_from_seed(options.seed);

    let mut vs: Vec<Vec<f64>> = vec![random_orthonormal(&[], n, &mut rng)];
    let mut us: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut b = DMatrix::<f64>::zeros(dim, dim);
    let mut scale = 0.0f64;
    let mut start = 0;
    let mut restarts = 0;

    loop {
        let mut beta = 0.0;
        for j in start..dim {
            let mut u = vec![0.0; m];
            map.mul_vec(&vs[j], &mut u);
            scale = scale.max(norm(&u));
            if scale == 0.0 {
                // M v = 0 for a random v: M is the zero matrix.
                return Ok(Vec::new());
            }
            let coefs = orthogonalize(&us, &mut u);
            for (i, c) in coefs.into_iter().enumerate() {
                b[(i, j)] += c;
            }
            let alpha = norm(&u);
            if alpha <= BREAKDOWN_TOL * scale {
                b[(j, j)] = 0.0;
                u = random_orthonormal(&us, m, &mut rng);
            } else {
                b[(j, j)] = alpha;
                scale_in_place(&mut u, 1.0 / alpha);
            }
            us.push(u);

            let mut w = vec![0.0; n];
            map.mul_vec_transpose(&us[j], &mut w);
            scale = scale.max(norm(&w));
            orthogonalize(&vs, &mut w);
            beta = norm(&w);
            let broke_down = beta <= BREAKDOWN_TOL * scale;
            if broke_down {
                beta = 0.0;
            }
            if j + 1 < dim {
                if broke_down {
                    w = random_orthonormal(&vs, n, &mut rng);
                } else {
                    scale_in_place(&mut w, 1.0 / beta);
                }
                vs.push(w);
            } else if !broke_down {
                scale_in_place(&mut w, 1.0 / beta);
                vs.push(w);
            }
        }

        let (sigmas, p, q) = small_svd(b.clone());
        let s1 = sigmas[0];
        if s1 == 0.0 {
            return Ok(Vec::new());
        }
        let wanted = sigmas[..k]
            .iter()
            .take_while(|&&s| s > RANK_TOL * s1)
            .count();
        let converged = (0..wanted)
            .take_while(|&i| beta * p[(dim - 1, i)].abs() <= options.tol * s1)
            .count();

        if converged == wanted || start >= dim {
            return Ok((0..wanted)
                .map(|i| {
                    let mut u = combine(&us, &p, i, m);
                    let mut v = combine(&vs[..dim], &q, i, n);
                    fix_sign(&mut u, &mut v);
                    Triplet {
                        sigma: sigmas[i],
                        u,
                        v,
                    }
                })
                .collect());
        }
        if restarts >= max_restarts {
            return Err(Error::LanczosNonConvergence {
                restarts,
                converged,
                requested: k,
            });
        }
        restarts += 1;

        let residual = vs.pop().expect("residual direction present after a full cycle");
        let new_us: Vec<Vec<f64>> = (0..k).map(|i| combine(&us, &p, i, m)).collect();
        let mut new_vs: Vec<Vec<f64>> = (0..k).map(|i| combine(&vs, &q, i, n)).collect();
        new_vs.push(residual);
        us = new_us;
        vs = new_vs;
        b.fill(0.0);
        for i in 0..k {
            b[(i, i)] = sigmas[i];
        }
        start = k;
    }
}
