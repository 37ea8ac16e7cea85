//! Worst-case discrepancies between library routines and the oracles over
//! seeded random instances.

use admira::linalg::{
    full_svd, svd_of_factored, truncated_svd, AtomSet, DenseMatrix, FactoredMatrix, LanczosOptions,
    LinearMap, SvdMode, Atom,
};
use admira::operators::{GaussianOperator, MeasurementOperator, SamplingOperator};
use admira::rng::{derive_seed, normal_vec, rng_from_seed, unit_vec};
use admira::solver::{admira_solve, least_squares_on_span, LsMethod, LsOptions, SolverConfig};
use rand::Rng as _;

use super::{normal_equations_fit, oracle_truncation, random_low_rank, rel_diff, vec_rel_diff};

fn densify_top(x: &FactoredMatrix, k: usize) -> DenseMatrix {
    x.truncated(k).to_dense()
}

/// Lanczos truncated SVD against the dense SVD and the Jacobi oracle on
/// 50×40 rank-5 matrices, k = 5.
pub fn truncated_vs_full(instances: u64, seed: u64) -> f64 {
    let mut worst = 0.0f64;
    for t in 0..instances {
        let mut rng = rng_from_seed(derive_seed(seed, t));
        let a = random_low_rank(50, 40, 5, &mut rng);
        let opts = LanczosOptions {
            seed: t,
            ..LanczosOptions::default()
        };
        let trunc = truncated_svd(&a, 5, SvdMode::Lanczos, &opts).unwrap();
        let full = full_svd(&a);
        let oracle = super::jacobi_svd(&a);
        let s1 = oracle.sigmas[0];
        for k in 0..5 {
            worst = worst.max((trunc.sigmas()[k] - full.sigmas()[k]).abs() / s1);
            worst = worst.max((full.sigmas()[k] - oracle.sigmas[k]).abs() / s1);
        }
        worst = worst.max(rel_diff(&densify_top(&full, 5), &trunc.to_dense()));
        worst = worst.max(rel_diff(&oracle_truncation(&a, 5), &trunc.to_dense()));
    }
    worst
}

/// Factored SVD against densify-then-SVD for non-orthogonal factorizations.
pub fn factored_vs_dense(instances: u64, seed: u64) -> f64 {
    let mut worst = 0.0f64;
    for t in 0..instances {
        let mut rng = rng_from_seed(derive_seed(seed, t));
        let (m, n) = (rng.random_range(3..25), rng.random_range(3..25));
        let k = rng.random_range(1..7);
        let terms: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..k)
            .map(|_| {
                let c = rng.random_range(-5.0..5.0);
                (c, unit_vec(&mut rng, m), unit_vec(&mut rng, n))
            })
            .collect();
        let x = FactoredMatrix::from_terms(m, n, terms).unwrap();
        let dense = x.to_dense();
        let via_factored = svd_of_factored(&x);
        let via_dense = full_svd(&dense);
        let s1 = via_dense.sigmas()[0];
        let fs = via_factored.sigmas();
        for (i, s) in via_dense.sigmas().iter().enumerate() {
            let got = fs.get(i).copied().unwrap_or(0.0);
            worst = worst.max((got - s).abs() / s1);
        }
        worst = worst.max(rel_diff(&dense, &via_factored.to_dense()));
    }
    worst
}

/// One iteration with the identity operator against oracle truncation.
pub fn identity_one_iteration(instances: u64, seed: u64) -> f64 {
    let mut worst = 0.0f64;
    for t in 0..instances {
        let mut rng = rng_from_seed(derive_seed(seed, t));
        let (m, n) = (rng.random_range(4..20), rng.random_range(4..20));
        let r = rng.random_range(1..=m.min(n) / 2);
        let x0 = DenseMatrix::random_normal(m, n, &mut rng);
        let op = SamplingOperator::full(m, n);
        let config = SolverConfig {
            max_iter: 1,
            ..SolverConfig::with_rank(r)
        };
        let report = admira_solve(&op, x0.as_slice(), &config, None).unwrap();
        assert_eq!(report.iterations, 1);
        worst = worst.max(rel_diff(&oracle_truncation(&x0, r), &report.solution.to_dense()));
    }
    worst
}

/// Pairwise agreement of the three least-squares methods and the
/// normal-equations oracle on fitted measurements.
pub fn least_squares_agreement(instances: u64, seed: u64) -> f64 {
    let mut worst = 0.0f64;
    for t in 0..instances {
        let mut rng = rng_from_seed(derive_seed(seed, t));
        let op = GaussianOperator::new(20, 15, 200, derive_seed(seed, t + 1_000_000)).unwrap();
        let atoms: Vec<Atom> = (0..6)
            .map(|_| Atom {
                u: unit_vec(&mut rng, 20),
                v: unit_vec(&mut rng, 15),
            })
            .collect();
        let columns: Vec<Vec<f64>> = atoms.iter().map(|a| op.apply_atom(&a.u, &a.v)).collect();
        let set = AtomSet::from_atoms(20, 15, atoms).unwrap();
        let b = normal_vec(&mut rng, 200);
        let oracle = normal_equations_fit(&columns, &b);
        let fits: Vec<Vec<f64>> = [LsMethod::Qr, LsMethod::Cg, LsMethod::Richardson]
            .into_iter()
            .map(|method| {
                let opts = LsOptions {
                    method,
                    ..LsOptions::default()
                };
                let x = least_squares_on_span(&op, &b, &set, &opts).unwrap();
                op.apply_factored(&x).unwrap()
            })
            .collect();
        for (i, f) in fits.iter().enumerate() {
            worst = worst.max(vec_rel_diff(&oracle, f));
            for g in &fits[i + 1..] {
                worst = worst.max(vec_rel_diff(f, g));
            }
        }
    }
    worst
}

/// `|⟨A X, y⟩ − ⟨X, A* y⟩|` relative to `‖X‖‖y‖` for both operator kinds.
pub fn adjoint_identity(instances: u64, seed: u64) -> f64 {
    let mut worst = 0.0f64;
    for t in 0..instances {
        let mut rng = rng_from_seed(derive_seed(seed, t));
        let (m, n) = (rng.random_range(2..15), rng.random_range(2..15));
        let p = rng.random_range(1..=m * n);
        let ops: [Box<dyn MeasurementOperator>; 2] = [
            Box::new(GaussianOperator::new(m, n, p, t).unwrap()),
            Box::new(SamplingOperator::random(m, n, p, t).unwrap()),
        ];
        for op in &ops {
            let x = DenseMatrix::random_normal(m, n, &mut rng);
            let y = normal_vec(&mut rng, p);
            let ax = op.apply(&x).unwrap();
            let lhs: f64 = ax.iter().zip(&y).map(|(a, b)| a * b).sum();
            let rhs = x.inner(&op.adjoint(&y).unwrap().to_dense()).unwrap();
            let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            worst = worst.max((lhs - rhs).abs() / (x.frobenius_norm() * ynorm));
        }
    }
    worst
}
