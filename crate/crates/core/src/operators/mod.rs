//! Linear measurement operators `A: ℝ^{m×n} → ℝ^p` and their adjoints.

mod gaussian;
pub mod io;
mod rip;
mod sampling;

pub use gaussian::GaussianOperator;
pub use rip::{estimate_delta, estimate_delta_profile, RipEstimate};
pub use sampling::SamplingOperator;

use crate::error::{mismatch, Result};
use crate::linalg::{DenseMatrix, FactoredMatrix, LinearMap, SparseMatrix};

/// A linear map from `rows × cols` matrices to `ℝ^p`, with its adjoint.
pub trait MeasurementOperator: Send + Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// Number of measurements `p`.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>>;

    /// `A(u vᵀ)` for one rank-one term.
    fn apply_atom(&self, u: &[f64], v: &[f64]) -> Vec<f64>;

    /// `A(X)` for a factored `X`, without forming the dense matrix.
    fn apply_factored(&self, x: &FactoredMatrix) -> Result<Vec<f64>> {
        self.check_factored(x)?;
        let mut out = vec![0.0; self.len()];
        for t in x.triplets() {
            crate::linalg::axpy(t.sigma, &self.apply_atom(&t.u, &t.v), &mut out);
        }
        Ok(out)
    }

    /// `A*(y)`, in whichever representation suits the operator.
    fn adjoint(&self, y: &[f64]) -> Result<Adjoint>;

    fn check_dense(&self, x: &DenseMatrix) -> Result<()> {
        if x.shape() != (self.rows(), self.cols()) {
            return Err(mismatch(
                format!("{}x{}", self.rows(), self.cols()),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        Ok(())
    }

    fn check_factored(&self, x: &FactoredMatrix) -> Result<()> {
        if (x.rows(), x.cols()) != (self.rows(), self.cols()) {
            return Err(mismatch(
                format!("{}x{}", self.rows(), self.cols()),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        Ok(())
    }

    fn check_measurements(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.len() {
            return Err(mismatch(
                format!("{} measurements", self.len()),
                y.len(),
            ));
        }
        Ok(())
    }
}

/// Image of the adjoint: dense for dense frames, sparse for entry sampling.
/// Either form supports densification and the matrix-vector products the
/// truncated SVD needs.
#[derive(Clone, Debug, PartialEq)]
pub enum Adjoint {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

impl Adjoint {
    pub fn frobenius_norm(&self) -> f64 {
        match self {
            Adjoint::Dense(d) => d.frobenius_norm(),
            Adjoint::Sparse(s) => s.frobenius_norm(),
        }
    }

    fn inner(&self) -> &dyn LinearMap {
        match self {
            Adjoint::Dense(d) => d,
            Adjoint::Sparse(s) => s,
        }
    }
}

impl LinearMap for Adjoint {
    fn nrows(&self) -> usize {
        self.inner().nrows()
    }

    fn ncols(&self) -> usize {
        self.inner().ncols()
    }

    fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        self.inner().mul_vec(x, out)
    }

    fn mul_vec_transpose(&self, x: &[f64], out: &mut [f64]) {
        self.inner().mul_vec_transpose(x, out)
    }

    fn to_dense(&self) -> DenseMatrix {
        self.inner().to_dense()
    }
}

/// Closed set of the concrete operators, for code that must own or
/// serialize "some operator".
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Gaussian(GaussianOperator),
    Sampling(SamplingOperator),
}

impl Operator {
    fn inner(&self) -> &dyn MeasurementOperator {
        match self {
            Operator::Gaussian(g) => g,
            Operator::Sampling(s) => s,
        }
    }
}

impl MeasurementOperator for Operator {
    fn rows(&self) -> usize {
        self.inner().rows()
    }

    fn cols(&self) -> usize {
        self.inner().cols()
    }

    fn len(&self) -> usize {
        self.inner().len()
    }

    fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        self.inner().apply(x)
    }

    fn apply_atom(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        self.inner().apply_atom(u, v)
    }

    fn apply_factored(&self, x: &FactoredMatrix) -> Result<Vec<f64>> {
        self.inner().apply_factored(x)
    }

    fn adjoint(&self, y: &[f64]) -> Result<Adjoint> {
        self.inner().adjoint(y)
    }
}
