//! Least squares restricted to the span of a set of atoms:
//! `min_α ‖b − Σ α_k A(u_k v_kᵀ)‖₂`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, small_svd, AtomSet, FactoredMatrix, LinearMap};
use crate::operators::MeasurementOperator;

/// `Auto` picks QR while the explicit `p × |Ψ|` matrix stays under this many
/// entries, and CG otherwise.
pub const QR_MAX_ENTRIES: usize = 100_000_000;

/// Singular values of the measurement matrix below this fraction of its
/// largest column norm are dropped (minimum-norm solution).
pub const LS_DROP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LsMethod {
    #[default]
    Auto,
    Qr,
    Cg,
    Richardson,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsOptions {
    pub method: LsMethod,
    /// Relative tolerance on the normal-equation residual `‖(AL)ᵀ r‖`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LsOptions {
    fn default() -> Self {
        LsOptions {
            method: LsMethod::Auto,
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

/// Solves for the coefficients on `atoms` and returns `Σ α_k u_k v_kᵀ` in
/// factored (non-orthonormal) form. Dependent atoms are resolved by the
/// minimum-norm solution.
pub fn least_squares_on_span(
    op: &dyn MeasurementOperator,
    b: &[f64],
    atoms: &AtomSet,
    options: &LsOptions,
) -> Result<FactoredMatrix> {
    op.check_measurements(b)?;
    let (m, n) = (op.rows(), op.cols());
    if atoms.is_empty() {
        return Ok(FactoredMatrix::zero(m, n));
    }
    let method = match options.method {
        LsMethod::Auto if op.len().saturating_mul(atoms.len()) <= QR_MAX_ENTRIES => LsMethod::Qr,
        LsMethod::Auto => LsMethod::Cg,
        other => other,
    };
    let span = SpanMap { op, atoms };
    let coefs = match method {
        LsMethod::Qr => solve_qr(&span, b),
        LsMethod::Cg => solve_cgls(&span, b, options)?,
        LsMethod::Richardson => solve_richardson(&span, b, options)?,
        LsMethod::Auto => unreachable!(),
    };
    FactoredMatrix::from_terms(
        m,
        n,
        atoms
            .iter()
            .zip(coefs)
            .map(|(a, c)| (c, a.u.clone(), a.v.clone())),
    )
}

/// `α ↦ A(L α)`, where `L α = Σ α_k u_k v_kᵀ`, and its transpose
/// `y ↦ (u_kᵀ A*(y) v_k)_k`.
struct SpanMap<'a> {
    op: &'a dyn MeasurementOperator,
    atoms: &'a AtomSet,
}

impl SpanMap<'_> {
    fn columns(&self) -> Vec<Vec<f64>> {
        self.atoms.iter().map(|a| self.op.apply_atom(&a.u, &a.v)).collect()
    }

    fn forward(&self, alpha: &[f64]) -> Vec<f64> {
        let x = FactoredMatrix::from_terms(
            self.op.rows(),
            self.op.cols(),
            self.atoms
                .iter()
                .zip(alpha)
                .map(|(a, &c)| (c, a.u.clone(), a.v.clone())),
        )
        .expect("atom shapes match the operator");
        self.op.apply_factored(&x).expect("atom shapes match the operator")
    }

    fn backward(&self, y: &[f64]) -> Vec<f64> {
        let back = self.op.adjoint(y).expect("measurement length checked");
        let mut tmp = vec![0.0; self.op.rows()];
        self.atoms
            .iter()
            .map(|a| {
                back.mul_vec(&a.v, &mut tmp);
                dot(&a.u, &tmp)
            })
            .collect()
    }
}

fn solve_qr(span: &SpanMap<'_>, b: &[f64]) -> Vec<f64> {
    let cols = span.columns();
    let (p, k) = (b.len(), cols.len());
    let max_col = cols.iter().map(|c| norm(c)).fold(0.0, f64::max);
    if max_col == 0.0 {
        return vec![0.0; k];
    }
    let c = DMatrix::from_fn(p, k, |i, j| cols[j][i]);
    let qr = c.qr();
    let mut qtb = DVector::from_column_slice(b);
    qr.q_tr_mul(&mut qtb);
    let r = qr.r();
    let rank_rows = r.nrows();
    let (sigmas, w, z) = small_svd(r);
    let head = qtb.rows(0, rank_rows);
    let mut alpha = DVector::zeros(k);
    for (i, &s) in sigmas.iter().enumerate() {
        if s > LS_DROP_TOL * max_col {
            let coef = w.column(i).dot(&head) / s;
            alpha += coef * z.column(i);
        }
    }
    alpha.iter().copied().collect()
}

fn solve_cgls(span: &SpanMap<'_>, b: &[f64], options: &LsOptions) -> Result<Vec<f64>> {
    let k = span.atoms.len();
    let mut x = vec![0.0; k];
    let mut r = b.to_vec();
    let mut s = span.backward(&r);
    let mut dir = s.clone();
    let mut gamma = dot(&s, &s);
    let target = options.tol * gamma.sqrt();
    for _ in 0..options.max_iter {
        if gamma.sqrt() <= target || gamma == 0.0 {
            return Ok(x);
        }
        let q = span.forward(&dir);
        let delta = dot(&q, &q);
        if delta == 0.0 {
            return Ok(x);
        }
        let step = gamma / delta;
        axpy(step, &dir, &mut x);
        axpy(-step, &q, &mut r);
        s = span.backward(&r);
        let gamma_new = dot(&s, &s);
        let beta = gamma_new / gamma;
        for (d, si) in dir.iter_mut().zip(&s) {
            *d = si + beta * *d;
        }
        gamma = gamma_new;
    }
    if gamma.sqrt() <= target {
        return Ok(x);
    }
    Err(Error::LeastSquaresNonConvergence {
        method: "cg",
        iterations: options.max_iter,
        residual: gamma.sqrt() / (target / options.tol),
    })
}

/// Largest eigenvalue of `(AL)ᵀ(AL)` by power iteration.
fn normal_spectral_radius(span: &SpanMap<'_>, iters: usize) -> f64 {
    let k = span.atoms.len();
    let mut x: Vec<f64> = (0..k).map(|i| 1.0 + 0.1 * i as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..iters {
        let nx = norm(&x);
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = span.backward(&span.forward(&x));
        lambda = dot(&x, &y);
        x = y;
    }
    lambda
}

fn solve_richardson(span: &SpanMap<'_>, b: &[f64], options: &LsOptions) -> Result<Vec<f64>> {
    let k = span.atoms.len();
    let lambda = normal_spectral_radius(span, 50);
    if lambda <= 0.0 {
        return Ok(vec![0.0; k]);
    }
    // Power iteration underestimates λ_max, so 1/λ stays below 2/λ_max.
    let step = 1.0 / lambda;
    let mut x = vec![0.0; k];
    let mut s = span.backward(b);
    let s0 = norm(&s);
    let target = options.tol * s0;
    for _ in 0..options.max_iter {
        if norm(&s) <= target {
            return Ok(x);
        }
        axpy(step, &s, &mut x);
        let fitted = span.forward(&x);
        let r: Vec<f64> = b.iter().zip(&fitted).map(|(bi, fi)| bi - fi).collect();
        s = span.backward(&r);
    }
    if norm(&s) <= target {
        return Ok(x);
    }
    Err(Error::LeastSquaresNonConvergence {
        method: "richardson",
        iterations: options.max_iter,
        residual: norm(&s) / s0,
    })
}
