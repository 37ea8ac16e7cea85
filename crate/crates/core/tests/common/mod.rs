//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's numerical routines.
#![allow(dead_code)]

use admira::linalg::DenseMatrix;
use admira::rng::Rng;

pub struct OracleSvd {
    pub sigmas: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One-sided (Hestenes) Jacobi SVD, sorted descending.
pub fn jacobi_svd(a: &DenseMatrix) -> OracleSvd {
    let (m, n) = a.shape();
    if m < n {
        let t = jacobi_svd(&a.transpose());
        return OracleSvd {
            sigmas: t.sigmas,
            u: t.v,
            v: t.u,
        };
    }
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for vecs in [&mut cols, &mut v] {
                    let (lo, hi) = vecs.split_at_mut(j);
                    for (x, y) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
                        let (xi, yj) = (*x, *y);
                        *x = c * xi - s * yj;
                        *y = s * xi + c * yj;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let mut out = OracleSvd {
        sigmas: vec![],
        u: vec![],
        v: vec![],
    };
    for k in order {
        let s = norms[k];
        out.sigmas.push(s);
        out.u.push(cols[k].iter().map(|x| if s > 0.0 { x / s } else { 0.0 }).collect());
        out.v.push(v[k].clone());
    }
    out
}

/// Best rank-`r` approximation from the oracle SVD.
pub fn oracle_truncation(a: &DenseMatrix, r: usize) -> DenseMatrix {
    let svd = jacobi_svd(a);
    let (m, n) = a.shape();
    DenseMatrix::from_fn(m, n, |i, j| {
        (0..r.min(svd.sigmas.len()))
            .map(|k| svd.sigmas[k] * svd.u[k][i] * svd.v[k][j])
            .sum()
    })
}

/// Least squares `min ‖Σ c_k col_k − b‖` through the normal equations and
/// Gaussian elimination with partial pivoting. Returns the fitted vector.
pub fn normal_equations_fit(columns: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let k = columns.len();
    let mut g: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut row: Vec<f64> = (0..k).map(|j| dot(&columns[i], &columns[j])).collect();
            row.push(dot(&columns[i], b));
            row
        })
        .collect();
    for c in 0..k {
        let piv = (c..k).max_by(|&a, &b| g[a][c].abs().total_cmp(&g[b][c].abs())).unwrap();
        g.swap(c, piv);
        for r in c + 1..k {
            let f = g[r][c] / g[c][c];
            for j in c..=k {
                g[r][j] -= f * g[c][j];
            }
        }
    }
    let mut x = vec![0.0; k];
    for c in (0..k).rev() {
        let s: f64 = (c + 1..k).map(|j| g[c][j] * x[j]).sum();
        x[c] = (g[c][k] - s) / g[c][c];
    }
    (0..b.len())
        .map(|i| (0..k).map(|j| x[j] * columns[j][i]).sum())
        .collect()
}

pub fn random_low_rank(m: usize, n: usize, r: usize, rng: &mut Rng) -> DenseMatrix {
    let l = DenseMatrix::random_normal(m, r, rng);
    let rt = DenseMatrix::random_normal(r, n, rng);
    l.matmul(&rt).unwrap()
}

pub fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / a.frobenius_norm().max(f64::MIN_POSITIVE)
}

pub fn vec_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    d / dot(a, a).sqrt().max(f64::MIN_POSITIVE)
}

pub mod equivalence;
