use super::{Adjoint, MeasurementOperator};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, DenseMatrix};
use crate::rng::{normal, rng_from_seed};

/// Dense i.i.d. Gaussian ensemble: `(A X)_k = ⟨X, Z_k⟩` with every entry of
/// every frame `Z_k` drawn from `N(0, 1/p)`, so `E‖A X‖² = ‖X‖_F²`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianOperator {
    rows: usize,
    cols: usize,
    p: usize,
    seed: u64,
    /// `p × (rows·cols)`, frame `k` stored row-major in row `k`.
    frames: Vec<f64>,
}

impl GaussianOperator {
    pub fn new(rows: usize, cols: usize, p: usize, seed: u64) -> Result<Self> {
        if rows == 0 || cols == 0 || p == 0 {
            return Err(Error::InvalidArgument(
                "gaussian operator needs positive dimensions and p".into(),
            ));
        }
        let mut rng = rng_from_seed(seed);
        let std = (1.0 / p as f64).sqrt();
        let frames = (0..p * rows * cols).map(|_| std * normal(&mut rng)).collect();
        Ok(GaussianOperator {
            rows,
            cols,
            p,
            seed,
            frames,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Frame `Z_k` as a row-major slice.
    pub fn frame(&self, k: usize) -> &[f64] {
        let mn = self.rows * self.cols;
        &self.frames[k * mn..(k + 1) * mn]
    }
}

impl MeasurementOperator for GaussianOperator {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn len(&self) -> usize {
        self.p
    }

    fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        self.check_dense(x)?;
        Ok((0..self.p).map(|k| dot(self.frame(k), x.as_slice())).collect())
    }

    fn apply_atom(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.cols;
        (0..self.p)
            .map(|k| {
                self.frame(k)
                    .chunks_exact(n)
                    .zip(u)
                    .map(|(row, &ui)| ui * dot(row, v))
                    .sum()
            })
            .collect()
    }

    fn adjoint(&self, y: &[f64]) -> Result<Adjoint> {
        self.check_measurements(y)?;
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        let data = out.as_mut_slice();
        for (k, &yk) in y.iter().enumerate() {
            if yk != 0.0 {
                axpy(yk, self.frame(k), data);
            }
        }
        Ok(Adjoint::Dense(out))
    }
}
