//! How neighbourhoods change as data arrives.
//!
//! A neighbourhood is encoded as a two-cluster partition of every other id in
//! the panel (member or not) and compared with the neighbourhood of the same
//! query at a reference time.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neighborhood::{find_neighbors, Neighborhood};
use crate::series::{Panel, Time};

use super::ari::{adjusted_rand, Partition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionPoint {
    pub id: String,
    pub time: Time,
    pub n_neighbors: usize,
    /// Normalised DTW distances of the neighbours.
    pub dtw_min: Option<f64>,
    pub dtw_median: Option<f64>,
    pub dtw_max: Option<f64>,
    /// Agreement with the neighbourhood at the reference time.
    pub ari: Option<f64>,
}

fn membership(panel: &Panel, nb: &Neighborhood) -> Partition {
    let members: Vec<&str> = nb.neighbors.iter().map(|n| n.id.as_str()).collect();
    Partition::membership(panel.ids().filter(|id| *id != nb.query_id()), &members)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// For every query and every time in `times`, the neighbourhood summary and
/// its adjusted Rand index against the neighbourhood at `reference`.
/// Queries with fewer than two observations at a time are skipped there.
pub fn neighborhood_evolution(
    panel: &Panel,
    k: usize,
    times: core::ops::RangeInclusive<Time>,
    reference: Time,
) -> Result<Vec<EvolutionPoint>> {
    let mut out = Vec::new();
    for id in panel.ids() {
        out.extend(query_evolution(panel, id, k, times.clone(), reference)?);
    }
    Ok(out)
}

/// [`neighborhood_evolution`] for a single query.
pub fn query_evolution(
    panel: &Panel,
    id: &str,
    k: usize,
    times: core::ops::RangeInclusive<Time>,
    reference: Time,
) -> Result<Vec<EvolutionPoint>> {
    if times.start() >= times.end() {
        return Err(Error::Config("neighbourhood evolution needs at least two time points".into()));
    }
    let y = panel.get(id).ok_or_else(|| Error::UnknownId(id.into()))?;
    let truth = match find_neighbors(y, panel, k, reference) {
        Ok(nb) => Some(membership(panel, &nb)),
        Err(Error::TooShort { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    for t in times {
        let nb = match find_neighbors(y, panel, k, t) {
            Ok(nb) => nb,
            Err(Error::TooShort { .. }) => continue,
            Err(e) => return Err(e),
        };
        let mut d: Vec<f64> = nb.neighbors.iter().map(|n| n.normalized).collect();
        d.sort_by(f64::total_cmp);
        let ari = match &truth {
            Some(p) => Some(adjusted_rand(&membership(panel, &nb), p)?),
            None => None,
        };
        out.push(EvolutionPoint {
            id: y.id().into(),
            time: t,
            n_neighbors: d.len(),
            dtw_min: d.first().copied(),
            dtw_median: (!d.is_empty()).then(|| median(&d)),
            dtw_max: d.last().copied(),
            ari,
        });
    }
    Ok(out)
}

/// Mean adjusted Rand index over queries, per time.
pub fn mean_ari_by_time(points: &[EvolutionPoint]) -> Vec<(Time, f64)> {
    let mut acc: alloc::collections::BTreeMap<Time, (f64, usize)> = Default::default();
    for p in points {
        if let Some(a) = p.ari {
            let e = acc.entry(p.time).or_default();
            e.0 += a;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(t, (s, n))| (t, s / n as f64)).collect()
}
