use std::collections::{HashMap, HashSet};

use rand::Rng as _;

use super::{Adjoint, MeasurementOperator};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, FactoredMatrix, SparseMatrix};
use crate::rng::rng_from_seed;

/// Entry sampling (matrix completion): `b_k = X[i_k, j_k]` over a list `Ω`
/// of distinct 0-based positions.
///
/// The CSR pattern of the adjoint is built once, so `A*(y)` is a scatter of
/// `y` into a fixed sparse layout.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingOperator {
    rows: usize,
    cols: usize,
    omega: Vec<(usize, usize)>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    /// CSR position of measurement `k`.
    slot: Vec<usize>,
}

impl SamplingOperator {
    pub fn new(rows: usize, cols: usize, omega: Vec<(usize, usize)>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("sampling operator needs positive dimensions".into()));
        }
        let mut seen = HashSet::with_capacity(omega.len());
        for &(i, j) in &omega {
            if i >= rows || j >= cols {
                return Err(Error::InvalidArgument(format!(
                    "index ({i}, {j}) out of range for {rows}x{cols}"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidArgument(format!("index ({i}, {j}) sampled twice")));
            }
        }

        let mut order: Vec<usize> = (0..omega.len()).collect();
        order.sort_unstable_by_key(|&k| omega[k]);
        let mut row_ptr = vec![0; rows + 1];
        for &(i, _) in &omega {
            row_ptr[i + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut col_idx = Vec::with_capacity(omega.len());
        let mut slot = vec![0; omega.len()];
        for (pos, &k) in order.iter().enumerate() {
            col_idx.push(omega[k].1);
            slot[k] = pos;
        }
        Ok(SamplingOperator {
            rows,
            cols,
            omega,
            row_ptr,
            col_idx,
            slot,
        })
    }

    /// `p` positions drawn uniformly without replacement by a Fisher–Yates
    /// shuffle over the virtual range `0..rows·cols`; only displaced slots are
    /// stored, so memory is `O(p)`.
    pub fn random(rows: usize, cols: usize, p: usize, seed: u64) -> Result<Self> {
        let total = rows as u64 * cols as u64;
        if p as u64 > total {
            return Err(Error::InvalidArgument(format!(
                "cannot sample {p} distinct entries of a {rows}x{cols} matrix"
            )));
        }
        let mut rng = rng_from_seed(seed);
        let mut displaced: HashMap<u64, u64> = HashMap::with_capacity(2 * p);
        let mut omega = Vec::with_capacity(p);
        for i in 0..p as u64 {
            let j = rng.random_range(i..total);
            let at_j = displaced.get(&j).copied().unwrap_or(j);
            let at_i = displaced.get(&i).copied().unwrap_or(i);
            displaced.insert(j, at_i);
            omega.push(((at_j / cols as u64) as usize, (at_j % cols as u64) as usize));
        }
        Self::new(rows, cols, omega)
    }

    /// Every entry in row-major order: the vectorization map, an exact
    /// isometry.
    pub fn full(rows: usize, cols: usize) -> Self {
        let omega = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect();
        Self::new(rows, cols, omega).expect("row-major enumeration is valid")
    }

    pub fn omega(&self) -> &[(usize, usize)] {
        &self.omega
    }

    /// Sparse matrix with `y_k` at `Ω[k]`.
    pub fn scatter(&self, y: &[f64]) -> Result<SparseMatrix> {
        self.check_measurements(y)?;
        let mut values = vec![0.0; y.len()];
        for (k, &yk) in y.iter().enumerate() {
            values[self.slot[k]] = yk;
        }
        Ok(SparseMatrix::from_csr(
            self.rows,
            self.cols,
            self.row_ptr.clone(),
            self.col_idx.clone(),
            values,
        ))
    }
}

impl MeasurementOperator for SamplingOperator {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn len(&self) -> usize {
        self.omega.len()
    }

    fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        self.check_dense(x)?;
        Ok(self.omega.iter().map(|&(i, j)| x[(i, j)]).collect())
    }

    fn apply_atom(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        self.omega.iter().map(|&(i, j)| u[i] * v[j]).collect()
    }

    fn apply_factored(&self, x: &FactoredMatrix) -> Result<Vec<f64>> {
        self.check_factored(x)?;
        let ts = x.triplets();
        Ok(self
            .omega
            .iter()
            .map(|&(i, j)| ts.iter().map(|t| t.sigma * t.u[i] * t.v[j]).sum())
            .collect())
    }

    fn adjoint(&self, y: &[f64]) -> Result<Adjoint> {
        Ok(Adjoint::Sparse(self.scatter(y)?))
    }
}
