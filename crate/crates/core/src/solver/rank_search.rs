//! Smallest target rank whose solution meets `‖b − A X̂‖₂ ≤ η ‖b‖₂`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{admira_solve, SolverConfig, SolverReport};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::operators::MeasurementOperator;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    #[default]
    Incremental,
    /// Assumes the achieved residual is nonincreasing in `r`.
    Bisection,
}

/// Returns the smallest feasible rank in `1..=r_max` with its report, or
/// [`Error::Infeasible`] carrying the residual reached at `r_max`.
/// `ground_truth` only feeds the error traces of the reports.
pub fn rank_search(
    op: &dyn MeasurementOperator,
    b: &[f64],
    r_max: usize,
    eta: f64,
    mode: SearchMode,
    config: &SolverConfig,
    ground_truth: Option<&DenseMatrix>,
) -> Result<(usize, SolverReport)> {
    if r_max == 0 || !(eta >= 0.0) {
        return Err(Error::InvalidArgument("rank search needs r_max >= 1 and eta >= 0".into()));
    }
    let mut cache: BTreeMap<usize, SolverReport> = BTreeMap::new();
    let mut solve = |r: usize| -> Result<bool> {
        if !cache.contains_key(&r) {
            let cfg = SolverConfig {
                target_rank: r,
                residual_tol: if eta > 0.0 { eta } else { config.residual_tol },
                ..config.clone()
            };
            cache.insert(r, admira_solve(op, b, &cfg, ground_truth)?);
        }
        Ok(cache[&r].final_residual() <= eta)
    };

    let found = match mode {
        SearchMode::Incremental => {
            let mut found = None;
            for r in 1..=r_max {
                if solve(r)? {
                    found = Some(r);
                    break;
                }
            }
            found
        }
        SearchMode::Bisection => {
            if solve(r_max)? {
                let (mut lo, mut hi) = (1, r_max);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if solve(mid)? {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                Some(hi)
            } else {
                None
            }
        }
    };
    match found {
        Some(r) => Ok((r, cache.remove(&r).expect("solved"))),
        None => Err(Error::Infeasible {
            r_max,
            best_residual: cache[&r_max].final_residual(),
        }),
    }
}
