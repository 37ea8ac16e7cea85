use serde::{Deserialize, Serialize};

use super::{axpy, dot, is_unit, norm, DenseMatrix, LinearMap};
use crate::error::{mismatch, Error, Result};

/// One term `sigma · u vᵀ` of an atomic decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// A matrix held as a sum of weighted rank-one atoms `Σ σ_k u_k v_kᵀ`.
///
/// Vectors are unit norm and weights are nonnegative and sorted
/// nonincreasing. The atoms need not be orthogonal; matrices produced by the
/// SVD routines carry the `orthonormal` flag, in which case the weights are
/// singular values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoredMatrix {
    rows: usize,
    cols: usize,
    triplets: Vec<Triplet>,
    orthonormal: bool,
}

impl FactoredMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        FactoredMatrix {
            rows,
            cols,
            triplets: Vec::new(),
            orthonormal: true,
        }
    }

    /// Validating constructor: every vector must be unit norm (within 1e-10)
    /// and the weights nonnegative and nonincreasing.
    pub fn new(rows: usize, cols: usize, triplets: Vec<Triplet>) -> Result<Self> {
        for (k, t) in triplets.iter().enumerate() {
            check_parts(rows, cols, t.sigma, &t.u, &t.v)?;
            if !is_unit(&t.u) || !is_unit(&t.v) {
                return Err(Error::InvalidArgument(format!(
                    "triplet {k} does not have unit-norm vectors"
                )));
            }
            if t.sigma < 0.0 {
                return Err(Error::InvalidArgument(format!("triplet {k} has negative weight")));
            }
        }
        if triplets.windows(2).any(|w| w[0].sigma < w[1].sigma) {
            return Err(Error::InvalidArgument("weights are not sorted nonincreasing".into()));
        }
        Ok(FactoredMatrix {
            rows,
            cols,
            triplets,
            orthonormal: false,
        })
    }

    /// Normalizing constructor for arbitrary terms `c · u vᵀ`: vector norms
    /// and signs are folded into the weight, zero terms are dropped and the
    /// rest are stably sorted by weight.
    pub fn from_terms<I>(rows: usize, cols: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Vec<f64>, Vec<f64>)>,
    {
        let mut triplets = Vec::new();
        for (coef, mut u, mut v) in terms {
            check_parts(rows, cols, coef, &u, &v)?;
            let (nu, nv) = (norm(&u), norm(&v));
            let sigma = coef * nu * nv;
            if sigma == 0.0 {
                continue;
            }
            let su = sigma.signum() / nu;
            u.iter_mut().for_each(|x| *x *= su);
            v.iter_mut().for_each(|x| *x /= nv);
            triplets.push(Triplet {
                sigma: sigma.abs(),
                u,
                v,
            });
        }
        triplets.sort_by(|a, b| b.sigma.total_cmp(&a.sigma));
        Ok(FactoredMatrix {
            rows,
            cols,
            triplets,
            orthonormal: false,
        })
    }

    /// Wraps SVD output that is already normalized, sorted and orthonormal.
    pub(crate) fn from_svd(rows: usize, cols: usize, triplets: Vec<Triplet>) -> Self {
        debug_assert!(triplets.windows(2).all(|w| w[0].sigma >= w[1].sigma));
        FactoredMatrix {
            rows,
            cols,
            triplets,
            orthonormal: true,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of stored triplets.
    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn into_triplets(self) -> Vec<Triplet> {
        self.triplets
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.triplets.iter().map(|t| t.sigma).collect()
    }

    /// Keeps the first `r` triplets.
    pub fn truncated(&self, r: usize) -> Self {
        let mut out = self.clone();
        out.triplets.truncate(r);
        out
    }

    pub fn atoms(&self) -> AtomSet {
        AtomSet {
            rows: self.rows,
            cols: self.cols,
            atoms: self
                .triplets
                .iter()
                .map(|t| Atom {
                    u: t.u.clone(),
                    v: t.v.clone(),
                })
                .collect(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        let cols = self.cols;
        let data = d.as_mut_slice();
        for t in &self.triplets {
            for (i, &ui) in t.u.iter().enumerate() {
                let c = t.sigma * ui;
                if c != 0.0 {
                    axpy(c, &t.v, &mut data[i * cols..(i + 1) * cols]);
                }
            }
        }
        d
    }

    /// Frobenius norm computed from the factors. Uses the atom Gram matrix
    /// unless the atoms are known to be orthonormal.
    pub fn frobenius_norm(&self) -> f64 {
        if self.orthonormal {
            return self.triplets.iter().map(|t| t.sigma * t.sigma).sum::<f64>().sqrt();
        }
        let mut s = 0.0;
        for a in &self.triplets {
            for b in &self.triplets {
                s += a.sigma * b.sigma * dot(&a.u, &b.u) * dot(&a.v, &b.v);
            }
        }
        s.max(0.0).sqrt()
    }
}

fn check_parts(rows: usize, cols: usize, sigma: f64, u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != rows || v.len() != cols {
        return Err(mismatch(
            format!("vectors of length {rows} and {cols}"),
            format!("{} and {}", u.len(), v.len()),
        ));
    }
    if !sigma.is_finite() || u.iter().chain(v).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index: 0 });
    }
    Ok(())
}

impl LinearMap for FactoredMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for t in &self.triplets {
            axpy(t.sigma * dot(&t.v, x), &t.u, out);
        }
    }

    fn mul_vec_transpose(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for t in &self.triplets {
            axpy(t.sigma * dot(&t.u, x), &t.v, out);
        }
    }

    fn to_dense(&self) -> DenseMatrix {
        FactoredMatrix::to_dense(self)
    }
}

/// A rank-one atom `u vᵀ` with unit vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Ordered collection of atoms. Union is plain concatenation; duplicates and
/// linear dependence are left for the least-squares step to resolve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSet {
    rows: usize,
    cols: usize,
    atoms: Vec<Atom>,
}

impl AtomSet {
    pub fn empty(rows: usize, cols: usize) -> Self {
        AtomSet {
            rows,
            cols,
            atoms: Vec::new(),
        }
    }

    pub fn from_atoms(rows: usize, cols: usize, atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if a.u.len() != rows || a.v.len() != cols {
                return Err(mismatch(
                    format!("atom of shape {rows}x{cols}"),
                    format!("{}x{}", a.u.len(), a.v.len()),
                ));
            }
            if !is_unit(&a.u) || !is_unit(&a.v) {
                return Err(Error::InvalidArgument("atom vectors must be unit norm".into()));
            }
        }
        Ok(AtomSet { rows, cols, atoms })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Atom> {
        self.atoms.iter()
    }

    /// `self ∪ other`, by concatenation.
    pub fn union(&self, other: &AtomSet) -> AtomSet {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        AtomSet {
            rows: self.rows,
            cols: self.cols,
            atoms,
        }
    }

    /// Frobenius Gram matrix `G_jk = ⟨u_j v_jᵀ, u_k v_kᵀ⟩ = (u_j·u_k)(v_j·v_k)`.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        self.atoms
            .iter()
            .map(|a| {
                self.atoms
                    .iter()
                    .map(|b| dot(&a.u, &b.u) * dot(&a.v, &b.v))
                    .collect()
            })
            .collect()
    }
}
