//! k-nearest-neighbour search over a panel with asymmetric open-begin/open-end
//! DTW on centered series.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dtw::{cross_distance, dtw_on_matrix, DtwOptions, WarpingPath};
use crate::error::{Error, Result};
use crate::series::{CenteredSeries, Panel, Time, TimeSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub id: String,
    /// Raw asymmetric distance `delta(y^c, z^c)`; used for ranking.
    pub distance: f64,
    /// Distance divided by the query length.
    pub normalized: f64,
    /// The neighbour truncated at the as-of time.
    pub series: TimeSeries,
    pub centered: CenteredSeries,
    /// Matching of the centered query (rows) onto the centered neighbour.
    pub path: WarpingPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    /// The query truncated at the as-of time.
    pub query: TimeSeries,
    pub query_centered: CenteredSeries,
    pub asof: Time,
    pub k: usize,
    /// Ascending by distance, ties by id.
    pub neighbors: Vec<Neighbor>,
}

impl Neighborhood {
    pub fn query_id(&self) -> &str {
        self.query.id()
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// The `k` closest neighbours; a prefix of the full ranking.
    pub fn truncated(&self, k: usize) -> Neighborhood {
        Neighborhood {
            query: self.query.clone(),
            query_centered: self.query_centered.clone(),
            asof: self.asof,
            k,
            neighbors: self.neighbors.iter().take(k).cloned().collect(),
        }
    }

    /// Centered query followed by centered neighbours.
    pub fn centered_members(&self) -> Vec<CenteredSeries> {
        core::iter::once(self.query_centered.clone())
            .chain(self.neighbors.iter().map(|n| n.centered.clone()))
            .collect()
    }
}

/// Whether `z` may serve as neighbour of `y`: it ends no later and has a
/// strictly longer history.
pub fn is_admissible(y: &TimeSeries, z: &TimeSeries) -> bool {
    z.end() <= y.end() && (z.end() - z.start()) > (y.end() - y.start())
}

/// The `k` nearest admissible neighbours of `y` among series observed up to
/// `asof`.
pub fn find_neighbors(y: &TimeSeries, panel: &Panel, k: usize, asof: Time) -> Result<Neighborhood> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let query = y.truncated(asof).ok_or_else(|| Error::TooShort {
        id: y.id().into(),
        len: 0,
        need: 2,
    })?;
    if query.len() < 2 {
        return Err(Error::TooShort { id: y.id().into(), len: query.len(), need: 2 });
    }
    let query_centered = query.center();
    let mut neighbors = Vec::new();
    for cand in panel.iter() {
        if cand.id() == y.id() {
            continue;
        }
        let Some(z) = cand.truncated(asof) else { continue };
        if !is_admissible(&query, &z) {
            continue;
        }
        let centered = z.center();
        let r = dtw_on_matrix(&cross_distance(&query_centered.values, &centered.values), DtwOptions::OBE)?;
        neighbors.push(Neighbor {
            id: z.id().into(),
            distance: r.distance,
            normalized: r.normalized(),
            series: z,
            centered,
            path: r.path,
        });
    }
    neighbors.sort_by(|a, b| a.distance.total_cmp(&b.distance).then_with(|| a.id.cmp(&b.id)));
    neighbors.truncate(k);
    Ok(Neighborhood { query, query_centered, asof, k, neighbors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn s(id: &str, start: Time, v: &[f64]) -> TimeSeries {
        TimeSeries::new(id, start, v.to_vec()).unwrap()
    }

    #[test]
    fn ranking_and_truncation() {
        let y = s("y", 5, &[0.0, 1.0, 0.0]);
        let panel = Panel::new([
            y.clone(),
            s("a", 1, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.0]),
            s("b", 1, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]),
            s("c", 1, &[0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0]),
        ])
        .unwrap();
        let nb = find_neighbors(&y, &panel, 2, 7).unwrap();
        assert_eq!(nb.len(), 2);
        assert!(nb.neighbors[0].distance <= nb.neighbors[1].distance);
        assert_eq!(nb.neighbors[0].id, "b");
        assert!(nb.neighbors.iter().all(|n| n.id != "y"));
        let full = find_neighbors(&y, &panel, 10, 7).unwrap();
        assert_eq!(full.len(), 3);
        assert_eq!(full.truncated(2).neighbors, nb.neighbors);
    }

    #[test]
    fn equal_length_and_later_end_excluded() {
        let y = s("y", 3, &[0.0, 1.0, 2.0]);
        let same = s("same", 1, &[0.0, 1.0, 2.0]);
        let later = s("later", 1, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let panel = Panel::new([y.clone(), same, later]).unwrap();
        let nb = find_neighbors(&y, &panel, 5, 6).unwrap();
        assert!(nb.is_empty());
        // at asof 5 "later" is truncated to length 5 ending at 5: admissible
        let panel = Panel::new([
            y.clone(),
            s("later", 1, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
        ])
        .unwrap();
        let nb = find_neighbors(&y, &panel, 5, 5).unwrap();
        assert_eq!(nb.len(), 1);
        assert!(nb.neighbors[0].series.end() <= 5);
    }

    #[test]
    fn duplicate_history_is_first_at_zero() {
        // same centered shape, longer history
        let y = s("y", 5, &[3.0, 1.0, 3.0, 1.0]);
        let dup = s("dup", 1, &[3.0, 1.0, 3.0, 1.0, 3.0, 1.0, 3.0, 1.0]);
        let other = s("o", 1, &[0.0, 5.0, 0.0, 0.0, 5.0, 0.0, 1.0, 2.0]);
        let panel = Panel::new([y.clone(), dup, other]).unwrap();
        let nb = find_neighbors(&y, &panel, 2, 8).unwrap();
        assert_eq!(nb.neighbors[0].id, "dup");
        assert_eq!(nb.neighbors[0].distance, 0.0);
    }

    #[test]
    fn ties_broken_by_id() {
        let y = s("y", 3, &[0.0, 1.0]);
        let z = vec![0.0, 1.0, 0.0, 1.0];
        let panel = Panel::new([y.clone(), s("b", 1, &z), s("a", 1, &z)]).unwrap();
        let nb = find_neighbors(&y, &panel, 2, 4).unwrap();
        assert_eq!(nb.neighbors[0].id, "a");
        assert_eq!(nb.neighbors[0].distance, nb.neighbors[1].distance);
    }

    #[test]
    fn short_query_rejected() {
        let y = s("y", 3, &[1.0]);
        let panel = Panel::new([y.clone()]).unwrap();
        assert!(matches!(find_neighbors(&y, &panel, 1, 3), Err(Error::TooShort { .. })));
    }
}
