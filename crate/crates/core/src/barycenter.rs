//! Global averaging of a set of series under asymmetric open-begin/open-end
//! DTW (aDBA).
//!
//! The average starts from the longest member and keeps its length. Each
//! iteration matches every member onto the current average, pools the member
//! values matched to every position and replaces the position by their mean.
//! Positions that receive no match keep their value.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dtw::{dtw_on_matrix, cross_distance, DtwOptions, DtwResult};
use crate::error::{Error, Result};
use crate::series::CenteredSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdbaConfig {
    /// Maximum number of update iterations `I`.
    pub max_iter: usize,
    /// Iterations before the stopping rule is consulted, `S*`.
    pub start_up: usize,
    /// Relative decrease of the objective below which the run has converged.
    pub rel_tol: f64,
}

impl Default for AdbaConfig {
    fn default() -> Self {
        Self { max_iter: 10, start_up: 1, rel_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Barycenter {
    pub values: Vec<f64>,
    /// Id of the member the average was initialised with.
    pub initial_id: alloc::string::String,
    /// Update steps performed (including a rejected final one).
    pub iterations_run: usize,
    /// Sum of member distances for every accepted average, starting with the
    /// initial one. The last entry belongs to `values`.
    pub objective_trace: Vec<f64>,
    /// Positions matched by at least one member in some iteration.
    pub coverage: Vec<bool>,
    /// Matching of every member (input order) onto `values`.
    pub matchings: Vec<DtwResult>,
    pub converged: bool,
}

impl Barycenter {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }

    /// `delta(member, average)` for every member, in input order.
    pub fn member_distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.matchings.iter().map(|m| m.distance)
    }
}

fn match_all(set: &[CenteredSeries], avg: &[f64]) -> Result<(Vec<DtwResult>, f64)> {
    let mut total = 0.0;
    let mut out = Vec::with_capacity(set.len());
    for z in set {
        let r = dtw_on_matrix(&cross_distance(&z.values, avg), DtwOptions::OBE)?;
        total += r.distance;
        out.push(r);
    }
    Ok((out, total))
}

fn update(set: &[CenteredSeries], avg: &[f64], matchings: &[DtwResult], coverage: &mut [bool]) -> Vec<f64> {
    let mut sum = vec![0.0; avg.len()];
    let mut count = vec![0usize; avg.len()];
    for (z, r) in set.iter().zip(matchings) {
        for &(i, t) in &r.path.pairs {
            sum[t] += z.values[i];
            count[t] += 1;
        }
    }
    avg.iter()
        .enumerate()
        .map(|(t, &old)| {
            if count[t] > 0 {
                coverage[t] = true;
                sum[t] / count[t] as f64
            } else {
                old
            }
        })
        .collect()
}

/// Average of `set` under asymmetric open-begin/open-end DTW.
///
/// The longest member (smallest id among ties) initialises the average.
/// From iteration `start_up` on, an update that increases the objective is
/// rejected and the previous average returned; a relative decrease below
/// `rel_tol` counts as convergence.
pub fn adba(set: &[CenteredSeries], cfg: &AdbaConfig) -> Result<Barycenter> {
    if set.is_empty() {
        return Err(Error::Empty("barycenter member set"));
    }
    let init = set
        .iter()
        .reduce(|best, z| {
            if z.len() > best.len() || (z.len() == best.len() && z.id < best.id) {
                z
            } else {
                best
            }
        })
        .expect("non-empty");
    let mut avg = init.values.clone();
    let mut coverage = vec![false; avg.len()];
    let (mut matchings, mut objective) = match_all(set, &avg)?;
    let mut trace = vec![objective];
    let mut iterations_run = 0;
    let mut converged = false;

    for iter in 1..=cfg.max_iter {
        iterations_run = iter;
        let mut cov = coverage.clone();
        let candidate = update(set, &avg, &matchings, &mut cov);
        let (cand_matchings, cand_objective) = match_all(set, &candidate)?;
        let checked = iter >= cfg.start_up;
        if checked && cand_objective > objective {
            converged = true;
            break;
        }
        let small_step = objective - cand_objective <= cfg.rel_tol * objective;
        avg = candidate;
        coverage = cov;
        matchings = cand_matchings;
        objective = cand_objective;
        trace.push(objective);
        if checked && small_step {
            converged = true;
            break;
        }
    }

    Ok(Barycenter {
        values: avg,
        initial_id: init.id.clone(),
        iterations_run,
        objective_trace: trace,
        coverage,
        matchings,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TimeSeries;
    use alloc::string::ToString;

    fn centered(id: &str, values: &[f64]) -> CenteredSeries {
        TimeSeries::new(id, 1, values.to_vec()).unwrap().center()
    }

    #[test]
    fn singleton_is_fixed_point() {
        let z = centered("a", &[1.0, 3.0, 2.0, 6.0]);
        let b = adba(core::slice::from_ref(&z), &AdbaConfig::default()).unwrap();
        assert_eq!(b.values, z.values);
        assert_eq!(b.objective(), 0.0);
        assert_eq!(b.iterations_run, 1);
        assert!(b.converged);
    }

    #[test]
    fn identical_pair_is_fixed_point() {
        let z = centered("a", &[1.0, 3.0, 2.0, 6.0]);
        let mut w = z.clone();
        w.id = "b".to_string();
        let b = adba(&[z.clone(), w], &AdbaConfig::default()).unwrap();
        assert_eq!(b.values, z.values);
        assert_eq!(b.objective(), 0.0);
    }

    #[test]
    fn longest_member_initialises_ties_by_id() {
        let a = centered("b", &[0.0, 1.0, 0.0]);
        let c = centered("a", &[5.0, 1.0, 0.0]);
        let b = adba(&[a, c], &AdbaConfig { max_iter: 0, ..Default::default() }).unwrap();
        assert_eq!(b.initial_id, "a");
        assert_eq!(b.values.len(), 3);
    }

    #[test]
    fn small_set_objective_non_increasing() {
        let set = [centered("a", &[0.0, 0.0, 0.0, 0.0]), centered("b", &[0.0, 2.0, 0.0])];
        let b = adba(&set, &AdbaConfig { max_iter: 10, ..Default::default() }).unwrap();
        assert_eq!(b.values.len(), 4);
        for w in b.objective_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-8));
        }
        assert!(b.objective() <= b.objective_trace[0]);
        let recomputed: f64 = set
            .iter()
            .map(|z| crate::dtw::dtw_asymmetric(&z.values, &b.values, true, true).unwrap().distance)
            .sum();
        assert_eq!(recomputed, b.objective());
    }

    #[test]
    fn empty_set_rejected() {
        assert_eq!(adba(&[], &AdbaConfig::default()).unwrap_err(), Error::Empty("barycenter member set"));
    }
}
