mod common;

use admira::analysis::snr_recon;
use admira::baseline::{svt_solve, SvtConfig};
use admira::experiment::{degrees_of_freedom, generate_problem, OperatorKind, ProblemSpec};
use admira::operators::{MeasurementOperator, Operator};
use admira::rng::derive_seed;
use admira::solver::{admira_solve, rank_search, SearchMode, SolverConfig};

fn problem(n: usize, r: usize, p: usize, kind: OperatorKind, seed: u64) -> admira::experiment::Problem {
    generate_problem(&ProblemSpec {
        m: n,
        n,
        r_true: r,
        operator: kind,
        p,
        snr_meas_db: None,
        seed,
    })
    .unwrap()
}

#[test]
fn rank_search_finds_true_rank() {
    let pr = problem(15, 3, 8 * degrees_of_freedom(15, 15, 3), OperatorKind::Gaussian, 1);
    let config = SolverConfig::default();
    for r in 1..3 {
        let rep = admira_solve(&pr.operator, &pr.b, &SolverConfig::with_rank(r), None).unwrap();
        assert!(rep.final_residual() > 1e-4, "rank {r} should be infeasible");
    }
    let (r, rep) = rank_search(&pr.operator, &pr.b, 6, 1e-4, SearchMode::Incremental, &config, None).unwrap();
    assert_eq!(r, 3);
    assert!(rep.final_residual() <= 1e-4);
}

#[test]
fn bisection_agrees_with_incremental() {
    let config = SolverConfig::default();
    for t in 0..20u64 {
        let r_true = 1 + (t % 5) as usize;
        let pr = problem(12, r_true, 8 * degrees_of_freedom(12, 12, 5), OperatorKind::Gaussian, derive_seed(2, t));
        let inc = rank_search(&pr.operator, &pr.b, 6, 1e-4, SearchMode::Incremental, &config, None).unwrap();
        let bis = rank_search(&pr.operator, &pr.b, 6, 1e-4, SearchMode::Bisection, &config, None).unwrap();
        assert_eq!(inc.0, bis.0, "instance {t}");
        assert_eq!(inc.0, r_true, "instance {t}");
    }
}

#[test]
fn solutions_respect_rank_and_best_iterate() {
    for t in 0..10u64 {
        let pr = problem(20, 2, 300, OperatorKind::Sampling, derive_seed(3, t));
        let rep = admira_solve(&pr.operator, &pr.b, &SolverConfig::with_rank(2), Some(&pr.x0)).unwrap();
        assert!(rep.solution.len() <= 2);
        let min = rep.residual_trace.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(rep.final_residual(), min);
        assert_eq!(rep.residual_trace.len(), rep.iterations);
        assert_eq!(rep.error_trace.len(), rep.iterations);
    }
}

#[test]
fn svt_and_admira_head_to_head() {
    let n = 100;
    let p = 20 * degrees_of_freedom(n, n, 2);
    let pr = problem(n, 2, p, OperatorKind::Sampling, 4);
    let Operator::Sampling(op) = &pr.operator else {
        unreachable!()
    };
    let svt = svt_solve(op, &pr.b, &SvtConfig::default(), None).unwrap();
    let adm = admira_solve(op, &pr.b, &SolverConfig::with_rank(2), None).unwrap();
    let svt_snr = snr_recon(&pr.x0, &svt.solution.to_dense()).unwrap();
    let adm_snr = snr_recon(&pr.x0, &adm.solution.to_dense()).unwrap();
    assert!(svt_snr >= 70.0, "svt {svt_snr} dB");
    assert!(adm_snr >= 70.0, "admira {adm_snr} dB");
    assert!(adm.iterations < svt.iterations, "{} vs {}", adm.iterations, svt.iterations);
    assert_eq!(op.len(), p);
}

#[test]
fn svt_residual_eventually_decreases() {
    let pr = problem(60, 2, 8 * degrees_of_freedom(60, 60, 2), OperatorKind::Sampling, 5);
    let Operator::Sampling(op) = &pr.operator else {
        unreachable!()
    };
    let rep = svt_solve(op, &pr.b, &SvtConfig::default(), None).unwrap();
    let tr = &rep.residual_trace;
    let tail = &tr[tr.len() / 2..];
    assert!(tail.last().unwrap() < tail.first().unwrap());
}
