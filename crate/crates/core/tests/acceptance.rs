//! Acceptance suite: every criterion at its stated tolerance, one PASS/FAIL
//! line each. Runs as a plain binary so the lines are never captured.
//!
//! Pass criterion numbers as arguments to run a subset, for example
//! `cargo test --test acceptance -- 5 6`.

mod common;

use std::time::Instant;

use admira::analysis::{
    iteration_bound, profile_from_singular_values, snr_db, snr_meas, snr_recon,
    unrecoverable_energy, SNR_CAP_DB,
};
use admira::baseline::SvtConfig;
use admira::experiment::{
    degrees_of_freedom, run_phase, run_table1, run_table2, run_trial, table1_measurements,
    Algorithm, OperatorKind, PhaseOptions, ProblemSpec, SweepConfig, SUCCESS_SNR_DB,
};
use admira::linalg::DenseMatrix;
use admira::operators::{estimate_delta, estimate_delta_profile, GaussianOperator, SamplingOperator};
use admira::par::{map_indexed, Execution};
use admira::solver::SolverConfig;
use common::equivalence;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sweep(trials: usize, seed: u64) -> SweepConfig {
    SweepConfig {
        trials,
        seed,
        ..SweepConfig::default()
    }
}

fn table1() -> Outcome {
    let (rows, _) = run_table1(&[500], &sweep(20, 2024)).expect("sweep runs");
    let r = &rows[0];
    let noiseless = r.snr_noiseless_db >= 70.0 && r.iters_noiseless <= 15.0;
    let noisy = (29.0..=39.0).contains(&r.snr_noisy_db) && r.iters_noisy <= 8.0;
    outcome(
        noiseless && noisy && r.p == table1_measurements(500, 2),
        format!(
            "n=500 p={} p/dr={:.1}: noiseless {:.1} dB / {:.1} it, 20 dB {:.1} dB / {:.1} it",
            r.p, r.p_over_dr, r.snr_noiseless_db, r.iters_noiseless, r.snr_noisy_db, r.iters_noisy
        ),
    )
}

const TABLE2_TRIALS: usize = 5;

fn table2() -> Outcome {
    let config = sweep(TABLE2_TRIALS, 2025);
    let (rows, _) = run_table2(1000, &[2], &[0.20], &config).expect("sweep runs");
    let r = &rows[0];
    let easy = r.admira_snr_db >= 70.0
        && r.admira_iters <= 20.0
        && r.svt_snr_db >= 70.0
        && (27.0..=110.0).contains(&r.svt_iters);

    // the designed failure needs only ADMiRA
    let hard = ProblemSpec {
        m: 1000,
        n: 1000,
        r_true: 10,
        operator: OperatorKind::Sampling,
        p: 50_000,
        snr_meas_db: None,
        seed: 2026,
    };
    let recs = map_indexed(Execution::Parallel, TABLE2_TRIALS, |t| {
        run_trial(&hard, t, Algorithm::Admira, &SolverConfig::with_rank(10), &SvtConfig::default())
            .expect("valid spec")
            .0
    });
    let hard_snr = recs.iter().map(|r| r.snr_recon_db).sum::<f64>() / recs.len() as f64;
    let hard_iters = recs.iter().map(|r| r.iterations as f64).sum::<f64>() / recs.len() as f64;
    outcome(
        easy && hard_snr <= 20.0,
        format!(
            "r=2 p/n2=0.20: ADMiRA {:.1} dB / {:.1} it, SVT {:.1} dB / {:.1} it; \
             r=10 p/n2=0.05: ADMiRA {:.1} dB / {:.1} it ({} trials each)",
            r.admira_snr_db, r.admira_iters, r.svt_snr_db, r.svt_iters, hard_snr, hard_iters,
            TABLE2_TRIALS
        ),
    )
}

fn phase() -> Outcome {
    let n = 100;
    let dr = degrees_of_freedom(n, n, 2);
    let options = PhaseOptions {
        algorithms: vec![Algorithm::Admira],
    };
    let (cells, _) =
        run_phase(n, &[dr - 1, 20 * dr], &[2], &options, &sweep(10, 2027)).expect("sweep runs");
    let below = cells.iter().find(|c| c.p < dr).unwrap();
    let above = cells.iter().find(|c| c.p == 20 * dr).unwrap();
    outcome(
        above.successes == 10 && below.successes == 0,
        format!(
            "p/dr=20: {}/10 successes; p=dr-1: {}/10 successes",
            above.successes, below.successes
        ),
    )
}

fn gaussian() -> Outcome {
    let d = degrees_of_freedom(30, 30, 2);
    let spec = ProblemSpec {
        m: 30,
        n: 30,
        r_true: 2,
        operator: OperatorKind::Gaussian,
        p: 8 * d,
        snr_meas_db: None,
        seed: 2028,
    };
    let results = map_indexed(Execution::Parallel, 20, |t| {
        run_trial(&spec, t, Algorithm::Admira, &SolverConfig::with_rank(2), &SvtConfig::default())
            .expect("valid spec")
    });
    let mut successes = 0;
    let mut monotone = true;
    let mut ratios = Vec::new();
    for (rec, report) in &results {
        if !rec.succeeded() {
            continue;
        }
        successes += 1;
        let trace = &report.as_ref().unwrap().error_trace;
        monotone &= trace.windows(2).all(|w| w[1] <= w[0]);
        ratios.extend(trace.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]));
    }
    ratios.sort_by(f64::total_cmp);
    let median = if ratios.is_empty() {
        f64::NAN
    } else if ratios.len() % 2 == 1 {
        ratios[ratios.len() / 2]
    } else {
        0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
    };
    outcome(
        successes >= 18 && monotone && median <= 0.8,
        format!(
            "{successes}/20 at >= {SUCCESS_SNR_DB} dB, error traces monotone: {monotone}, \
             median step ratio {median:.3}"
        ),
    )
}

fn oracles() -> Outcome {
    let checks = [
        ("truncated vs full SVD", equivalence::truncated_vs_full(100, 31), 1e-8),
        ("factored vs dense SVD", equivalence::factored_vs_dense(100, 32), 1e-10),
        ("identity one iteration", equivalence::identity_one_iteration(100, 33), 1e-8),
        ("least-squares methods", equivalence::least_squares_agreement(100, 34), 1e-8),
        ("adjoint identity", equivalence::adjoint_identity(100, 35), 1e-10),
    ];
    let pass = checks.iter().all(|(_, worst, tol)| worst <= tol);
    let detail = checks
        .iter()
        .map(|(name, worst, tol)| format!("{name} {worst:.1e} (tol {tol:.0e})"))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(pass, format!("100 instances each: {detail}"))
}

fn analysis() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };

    let mut rng = admira::rng::rng_from_seed(36);
    for rank in 1..=4 {
        let x = common::random_low_rank(8, 7, rank, &mut rng);
        for r in 1..=5 {
            let eps = unrecoverable_energy(&x, r, 0.0).unwrap().epsilon;
            let zero = eps <= 1e-10 * x.frobenius_norm();
            check(zero == (r >= rank), "epsilon vanishes exactly at rank");
        }
    }
    let b = unrecoverable_energy(&DenseMatrix::from_diagonal(&[3.0, 2.0, 1.0]), 2, 0.5).unwrap();
    check((b.epsilon - 2.2071).abs() < 1e-4, "diag(3,2,1) budget");

    let p1 = profile_from_singular_values(&[1.0, 1.0]).unwrap();
    let p2 = profile_from_singular_values(&[1.0, 0.25]).unwrap();
    check(p1.t == 1 && p2.t == 2, "profile hand cases");

    check(
        (1..=100).all(|r| iteration_bound(r, r) <= 6.0 * (r as f64 + 1.0)),
        "iteration bound below 6(r+1)",
    );

    let x = DenseMatrix::from_diagonal(&[3.0, 4.0]);
    check(snr_recon(&x, &x).unwrap() == SNR_CAP_DB, "exact recovery capped");
    check(snr_recon(&x, &DenseMatrix::zeros(2, 2)).unwrap() == 0.0, "zero estimate is 0 dB");
    check(snr_db(10.0, 1.0) == 20.0, "ratio 10 is 20 dB");
    check(snr_db(100.0, 1.0) == 40.0, "ratio 100 is 40 dB");
    check(snr_meas(&[1.0], &[1.0]).unwrap() == 0.0, "equal energy is 0 dB");

    let pass = failures.is_empty();
    outcome(
        pass,
        if pass {
            "budget, bands, iteration bound and SNR identities hold".into()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn nested_delta() -> Outcome {
    let gauss = GaussianOperator::new(10, 10, 500, 37).unwrap();
    let sampling = SamplingOperator::random(10, 10, 60, 38).unwrap();
    let mut monotone = true;
    let mut consistent = true;
    let mut last = Vec::new();
    for (op, seed) in [(&gauss as &dyn admira::operators::MeasurementOperator, 39), (&sampling, 40)] {
        let prof = estimate_delta_profile(op, 6, 200, seed, Execution::Parallel);
        monotone &= prof.windows(2).all(|w| w[0].delta_lower <= w[1].delta_lower);
        consistent &= estimate_delta(op, 3, 200, seed).delta_lower == prof[2].delta_lower;
        last.push(prof.last().unwrap().delta_lower);
    }
    let identity = estimate_delta(&SamplingOperator::full(6, 6), 3, 50, 41).delta_lower;
    outcome(
        monotone && consistent && identity <= 1e-12,
        format!(
            "delta_r nondecreasing in r: {monotone}; per-rank calls match profile: {consistent}; \
             delta_6 lower bounds gaussian {:.3}, sampling {:.3}; identity {identity:.1e}. \
             Certifying delta_4r <= 0.04 is intractable and not attempted",
            last[0], last[1]
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 7] = [
        (1, "Table I row n=500", table1),
        (2, "Table II spot checks n=1000", table2),
        (3, "phase-transition points n=100", phase),
        (4, "Gaussian-operator recovery", gaussian),
        (5, "oracle equivalences", oracles),
        (6, "analysis suite", analysis),
        (7, "nested delta monotonicity surrogate", nested_delta),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "[{status}] criterion {id}: {name} | {} | {:.1}s",
            out.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!out.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
