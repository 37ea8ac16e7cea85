//! Table and phase-transition sweeps. Each sweep flattens its cells and
//! trials into one job list so the whole grid shares the worker pool.

use serde::{Deserialize, Serialize};

use super::{
    degrees_of_freedom, finite_mean, run_trial, spec_hash, Algorithm, OperatorKind, ProblemSpec,
    TrialRecord,
};
use crate::baseline::SvtConfig;
use crate::error::{Error, Result};
use crate::par::{try_map_indexed, Execution};
use crate::solver::SolverConfig;

/// Solver settings shared by every trial of a sweep. The target rank is
/// overridden per cell with the true rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub admira: SolverConfig,
    pub svt: SvtConfig,
    pub trials: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            admira: SolverConfig::default(),
            svt: SvtConfig::default(),
            trials: 20,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl SweepConfig {
    /// Everything that affects results; the execution mode does not.
    fn hash_key(&self) -> (&SolverConfig, &SvtConfig, usize, u64) {
        (&self.admira, &self.svt, self.trials, self.seed)
    }

    fn run(&self, spec: &ProblemSpec, trial: usize, algorithm: Algorithm) -> Result<TrialRecord> {
        let admira = self.admira.clone().with_rank_override(spec.r_true);
        run_trial(spec, trial, algorithm, &admira, &self.svt).map(|(rec, _)| rec)
    }

    fn run_jobs(&self, jobs: &[(ProblemSpec, Algorithm)]) -> Result<Vec<Vec<TrialRecord>>> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("a sweep needs at least one trial".into()));
        }
        let t = self.trials;
        let flat = try_map_indexed(self.execution, jobs.len() * t, |k| {
            let (spec, algo) = &jobs[k / t];
            self.run(spec, k % t, *algo)
        })?;
        Ok(flat.chunks(t).map(<[TrialRecord]>::to_vec).collect())
    }
}

trait RankOverride {
    fn with_rank_override(self, r: usize) -> Self;
}

impl RankOverride for SolverConfig {
    fn with_rank_override(mut self, r: usize) -> Self {
        self.target_rank = r;
        self
    }
}

fn mean_iterations(records: &[TrialRecord]) -> f64 {
    records.iter().map(|r| r.iterations as f64).sum::<f64>() / records.len() as f64
}

fn mean_snr(records: &[TrialRecord]) -> f64 {
    finite_mean(records.iter().map(|r| r.snr_recon_db))
}

fn successes(records: &[TrialRecord]) -> usize {
    records.iter().filter(|r| r.succeeded()).count()
}

/// Measurement count `10·⌈n^1.2 · r · log₁₀ n⌉` of the square completion table.
pub fn table1_measurements(n: usize, r: usize) -> usize {
    let nf = n as f64;
    10 * (nf.powf(1.2) * r as f64 * nf.log10()).ceil() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub spec_hash: String,
    pub n: usize,
    pub r: usize,
    pub p: usize,
    pub p_over_n2: f64,
    pub p_over_dr: f64,
    pub snr_noiseless_db: f64,
    pub iters_noiseless: f64,
    pub snr_noisy_db: f64,
    pub iters_noisy: f64,
    pub noisy_snr_meas_db: f64,
    pub trials: usize,
}

/// Completion of square rank-2 matrices, noiseless and at 20 dB measurement
/// SNR, for each size in `n_list`.
pub fn run_table1(
    n_list: &[usize],
    config: &SweepConfig,
) -> Result<(Vec<Table1Row>, Vec<TrialRecord>)> {
    const RANK: usize = 2;
    const NOISY_DB: f64 = 20.0;
    let mut jobs = Vec::new();
    for &n in n_list {
        let p = table1_measurements(n, RANK);
        let base = ProblemSpec {
            m: n,
            n,
            r_true: RANK,
            operator: OperatorKind::Sampling,
            p,
            snr_meas_db: None,
            seed: config.seed,
        };
        base.validate()?;
        let noisy = ProblemSpec {
            snr_meas_db: Some(NOISY_DB),
            ..base.clone()
        };
        jobs.push((base, Algorithm::Admira));
        jobs.push((noisy, Algorithm::Admira));
    }
    let results = config.run_jobs(&jobs)?;
    let mut rows = Vec::new();
    for (pair, recs) in jobs.chunks(2).zip(results.chunks(2)) {
        let spec = &pair[0].0;
        let n = spec.n;
        rows.push(Table1Row {
            spec_hash: spec_hash(&(&pair[0].0, &pair[1].0, config.hash_key())),
            n,
            r: RANK,
            p: spec.p,
            p_over_n2: spec.p as f64 / (n * n) as f64,
            p_over_dr: spec.p as f64 / spec.degrees_of_freedom() as f64,
            snr_noiseless_db: mean_snr(&recs[0]),
            iters_noiseless: mean_iterations(&recs[0]),
            snr_noisy_db: mean_snr(&recs[1]),
            iters_noisy: mean_iterations(&recs[1]),
            noisy_snr_meas_db: NOISY_DB,
            trials: config.trials,
        });
    }
    Ok((rows, results.into_iter().flatten().collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub spec_hash: String,
    pub n: usize,
    pub r: usize,
    pub density: f64,
    pub p: usize,
    pub p_over_dr: f64,
    pub admira_snr_db: f64,
    pub admira_iters: f64,
    pub admira_successes: usize,
    pub svt_snr_db: f64,
    pub svt_iters: f64,
    pub svt_successes: usize,
    pub trials: usize,
}

/// Noiseless head-to-head of ADMiRA and SVT on `n × n` completion problems
/// over every `(rank, density)` pair, where density is `p/n²`.
pub fn run_table2(
    n: usize,
    r_list: &[usize],
    density_list: &[f64],
    config: &SweepConfig,
) -> Result<(Vec<Table2Row>, Vec<TrialRecord>)> {
    let mut jobs = Vec::new();
    let mut cells = Vec::new();
    for &r in r_list {
        for &density in density_list {
            if !(density > 0.0 && density <= 1.0) {
                return Err(Error::InvalidArgument(format!("density {density} outside (0, 1]")));
            }
            let spec = ProblemSpec {
                m: n,
                n,
                r_true: r,
                operator: OperatorKind::Sampling,
                p: (density * (n * n) as f64).round() as usize,
                snr_meas_db: None,
                seed: config.seed,
            };
            spec.validate()?;
            jobs.push((spec.clone(), Algorithm::Admira));
            jobs.push((spec.clone(), Algorithm::Svt));
            cells.push((spec, density));
        }
    }
    let results = config.run_jobs(&jobs)?;
    let rows = cells
        .iter()
        .zip(results.chunks(2))
        .map(|((spec, density), recs)| Table2Row {
            spec_hash: spec_hash(&(spec, config.hash_key())),
            n,
            r: spec.r_true,
            density: *density,
            p: spec.p,
            p_over_dr: spec.p as f64 / spec.degrees_of_freedom() as f64,
            admira_snr_db: mean_snr(&recs[0]),
            admira_iters: mean_iterations(&recs[0]),
            admira_successes: successes(&recs[0]),
            svt_snr_db: mean_snr(&recs[1]),
            svt_iters: mean_iterations(&recs[1]),
            svt_successes: successes(&recs[1]),
            trials: config.trials,
        })
        .collect();
    Ok((rows, results.into_iter().flatten().collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseOptions {
    pub algorithms: Vec<Algorithm>,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            algorithms: vec![Algorithm::Admira, Algorithm::Svt],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub spec_hash: String,
    pub n: usize,
    pub r: usize,
    pub p: usize,
    pub p_over_dr: f64,
    pub algorithm: Algorithm,
    pub successes: usize,
    pub trials: usize,
}

/// Success counts over a `(p, r)` grid of noiseless `n × n` completion
/// problems.
pub fn run_phase(
    n: usize,
    p_grid: &[usize],
    r_grid: &[usize],
    options: &PhaseOptions,
    config: &SweepConfig,
) -> Result<(Vec<PhaseCell>, Vec<TrialRecord>)> {
    let mut jobs = Vec::new();
    for &r in r_grid {
        for &p in p_grid {
            let spec = ProblemSpec {
                m: n,
                n,
                r_true: r,
                operator: OperatorKind::Sampling,
                p,
                snr_meas_db: None,
                seed: config.seed,
            };
            spec.validate()?;
            for &algo in &options.algorithms {
                jobs.push((spec.clone(), algo));
            }
        }
    }
    let results = config.run_jobs(&jobs)?;
    let cells = jobs
        .iter()
        .zip(&results)
        .map(|((spec, algo), recs)| PhaseCell {
            spec_hash: spec_hash(&(spec, config.hash_key())),
            n,
            r: spec.r_true,
            p: spec.p,
            p_over_dr: spec.p as f64 / degrees_of_freedom(n, n, spec.r_true) as f64,
            algorithm: *algo,
            successes: successes(recs),
            trials: config.trials,
        })
        .collect();
    Ok((cells, results.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize, exec: Execution) -> SweepConfig {
        SweepConfig {
            trials,
            seed: 11,
            execution: exec,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn measurement_count_for_500() {
        let p = table1_measurements(500, 2);
        assert_eq!(p, 93_540);
        assert_eq!((p as f64 / degrees_of_freedom(500, 500, 2) as f64).round(), 47.0);
    }

    #[test]
    fn table1_small_row() {
        let (rows, recs) = run_table1(&[200], &small(2, Execution::Sequential)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(recs.len(), 4);
        assert_eq!(rows[0].p, table1_measurements(200, 2));
        assert!(rows[0].snr_noiseless_db > rows[0].snr_noisy_db);
    }

    #[test]
    fn table2_records_both_algorithms() {
        let (rows, recs) = run_table2(30, &[1], &[0.5], &small(1, Execution::Sequential)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].algorithm, Algorithm::Admira);
        assert_eq!(recs[1].algorithm, Algorithm::Svt);
        assert!(run_table2(30, &[1], &[1.5], &small(1, Execution::Sequential)).is_err());
    }

    #[test]
    fn phase_is_independent_of_execution() {
        let opts = PhaseOptions {
            algorithms: vec![Algorithm::Admira],
        };
        let seq = run_phase(20, &[100, 200], &[1, 2], &opts, &small(2, Execution::Sequential))
            .unwrap()
            .0;
        let par = run_phase(20, &[100, 200], &[1, 2], &opts, &small(2, Execution::Parallel))
            .unwrap()
            .0;
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 4);
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(run_table1(&[10], &small(0, Execution::Sequential)).is_err());
    }
}
