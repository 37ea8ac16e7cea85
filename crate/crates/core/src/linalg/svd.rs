//! Full, truncated and factored-form singular value decompositions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lanczos::{lanczos_svd, LanczosOptions};
use super::{fix_sign, DenseMatrix, FactoredMatrix, LinearMap, Triplet};
use crate::error::{Error, Result};

/// Singular values at or below `RANK_TOL · σ₁` are treated as zero.
pub const RANK_TOL: f64 = 1e-12;

/// In [`SvdMode::Auto`], matrices with `min(m, n)` up to this size are
/// decomposed densely.
pub const DENSE_FALLBACK_MAX_DIM: usize = 400;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvdMode {
    /// Dense below [`DENSE_FALLBACK_MAX_DIM`], Lanczos above.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

/// Sorted singular triplets of a small nalgebra matrix, as column-vector
/// triples. Includes zero singular values.
///
/// Computed with faer: nalgebra's bidiagonal SVD loses accuracy on
/// rank-deficient inputs, which are routine here (duplicate atoms, exactly
/// low-rank data, Lanczos breakdowns).
pub(crate) fn small_svd(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let mat = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = mat
        .thin_svd()
        .expect("SVD of a finite matrix converges");
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let sigmas = order.iter().map(|&i| s[i].max(0.0)).collect();
    let u = DMatrix::from_fn(rows, order.len(), |i, j| u[(i, order[j])]);
    let v = DMatrix::from_fn(cols, order.len(), |i, j| v[(i, order[j])]);
    (sigmas, u, v)
}

fn triplet_from_columns(sigma: f64, u: &DMatrix<f64>, v: &DMatrix<f64>, j: usize) -> Triplet {
    let mut uj: Vec<f64> = u.column(j).iter().copied().collect();
    let mut vj: Vec<f64> = v.column(j).iter().copied().collect();
    fix_sign(&mut uj, &mut vj);
    Triplet {
        sigma,
        u: uj,
        v: vj,
    }
}

/// Full SVD with `min(m, n)` triplets, zero singular values included.
pub fn full_svd(m: &DenseMatrix) -> FactoredMatrix {
    let (sigmas, u, v) = small_svd(m.to_nalgebra());
    let triplets = sigmas
        .iter()
        .enumerate()
        .map(|(j, &s)| triplet_from_columns(s, &u, &v, j))
        .collect();
    FactoredMatrix::from_svd(m.rows(), m.cols(), triplets)
}

fn drop_numerical_zeros(mut triplets: Vec<Triplet>) -> Vec<Triplet> {
    let s1 = triplets.first().map_or(0.0, |t| t.sigma);
    triplets.retain(|t| t.sigma > RANK_TOL * s1 && t.sigma > 0.0);
    triplets
}

/// Leading `k` singular triplets of `map`. Numerically zero singular values
/// are not returned, so the result may hold fewer than `k` triplets.
pub fn truncated_svd(
    map: &dyn LinearMap,
    k: usize,
    mode: SvdMode,
    options: &LanczosOptions,
) -> Result<FactoredMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("truncated_svd needs k >= 1".into()));
    }
    let (m, n) = (map.nrows(), map.ncols());
    let dense = match mode {
        SvdMode::Dense => true,
        SvdMode::Lanczos => false,
        SvdMode::Auto => m.min(n) <= DENSE_FALLBACK_MAX_DIM,
    };
    let mut triplets = if dense {
        full_svd(&map.to_dense()).into_triplets()
    } else {
        lanczos_svd(map, k, options)?
    };
    triplets = drop_numerical_zeros(triplets);
    triplets.truncate(k);
    Ok(FactoredMatrix::from_svd(m, n, triplets))
}

/// SVD of a matrix given in factored form `U Σ Vᵀ` with arbitrary (unit,
/// possibly dependent) columns. QR-factorizes `U` and `V`, decomposes the
/// small core `R_U Σ R_Vᵀ` and maps the result back; the dense product is
/// never formed.
pub fn svd_of_factored(x: &FactoredMatrix) -> FactoredMatrix {
    let (m, n) = (x.rows(), x.cols());
    let terms: Vec<&Triplet> = x.triplets().iter().filter(|t| t.sigma > 0.0).collect();
    if terms.is_empty() {
        return FactoredMatrix::zero(m, n);
    }
    let k = terms.len();
    let u = DMatrix::from_fn(m, k, |i, j| terms[j].u[i]);
    let v = DMatrix::from_fn(n, k, |i, j| terms[j].v[i]);
    let qr_u = u.qr();
    let qr_v = v.qr();
    let (q_u, r_u) = (qr_u.q(), qr_u.r());
    let (q_v, r_v) = (qr_v.q(), qr_v.r());
    let sigma = DMatrix::from_fn(k, k, |i, j| if i == j { terms[i].sigma } else { 0.0 });
    let core = &r_u * sigma * r_v.transpose();
    let (sigmas, w, z) = small_svd(core);
    let left = q_u * w;
    let right = q_v * z;
    let triplets = sigmas
        .iter()
        .enumerate()
        .map(|(j, &s)| triplet_from_columns(s, &left, &right, j))
        .collect();
    FactoredMatrix::from_svd(m, n, drop_numerical_zeros(triplets))
}

/// Best rank-`r` approximation: the `r` leading singular triplets.
/// Non-orthonormal input is first brought to SVD form.
pub fn best_rank_r(x: &FactoredMatrix, r: usize) -> FactoredMatrix {
    if x.is_orthonormal() {
        x.truncated(r)
    } else {
        svd_of_factored(x).truncated(r)
    }
}
