//! Dense and factored matrices, SVD routines and the text file formats.

mod dense;
mod factored;
pub mod io;
mod lanczos;
mod sparse;
mod svd;

pub use dense::DenseMatrix;
pub use factored::{Atom, AtomSet, FactoredMatrix, Triplet};
pub use lanczos::LanczosOptions;
pub use sparse::SparseMatrix;
pub(crate) use svd::small_svd;
pub use svd::{
    best_rank_r, full_svd, svd_of_factored, truncated_svd, SvdMode, DENSE_FALLBACK_MAX_DIM,
    RANK_TOL,
};

/// A linear map usable by the truncated SVD: only products with the map and
/// its transpose are needed.
pub trait LinearMap: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `out = M x`
    fn mul_vec(&self, x: &[f64], out: &mut [f64]);

    /// `out = Mᵀ x`
    fn mul_vec_transpose(&self, x: &[f64], out: &mut [f64]);

    fn to_dense(&self) -> DenseMatrix {
        let (m, n) = (self.nrows(), self.ncols());
        let mut dense = DenseMatrix::zeros(m, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; m];
        for j in 0..n {
            e[j] = 1.0;
            self.mul_vec(&e, &mut col);
            for (i, &x) in col.iter().enumerate() {
                dense[(i, j)] = x;
            }
            e[j] = 0.0;
        }
        dense
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn scale_in_place(x: &mut [f64], alpha: f64) {
    x.iter_mut().for_each(|v| *v *= alpha);
}

pub(crate) fn is_unit(x: &[f64]) -> bool {
    (norm(x) - 1.0).abs() <= 1e-10
}

/// Flips `(u, v)` jointly so that the largest-magnitude entry of `u` is
/// positive. The product `u vᵀ` is unchanged.
pub(crate) fn fix_sign(u: &mut [f64], v: &mut [f64]) {
    let mut best = 0.0;
    let mut sign = 1.0;
    for &x in u.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        scale_in_place(u, -1.0);
        scale_in_place(v, -1.0);
    }
}
