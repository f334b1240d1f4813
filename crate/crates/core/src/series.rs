//! Univariate series on a shared integer time axis, and panels of them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute time index (weeks, starting at 1).
pub type Time = i64;

/// A contiguous run of observations `values[0]` at `start` up to `end()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    id: String,
    start: Time,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(id: impl Into<String>, start: Time, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if values.is_empty() {
            return Err(Error::Empty("time series values"));
        }
        if start < 1 {
            return Err(Error::BadStart { id, start });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { id, time: start + pos as Time });
        }
        Ok(Self { id, start, values })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn start(&self) -> Time {
        self.start
    }

    /// Last observed time, `start + len - 1`.
    pub fn end(&self) -> Time {
        self.start + self.values.len() as Time - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Value observed at absolute time `t`, if any.
    pub fn at(&self, t: Time) -> Option<f64> {
        if t < self.start || t > self.end() {
            return None;
        }
        Some(self.values[(t - self.start) as usize])
    }

    /// The prefix observed up to and including `asof`, or `None` if the
    /// series starts later.
    pub fn truncated(&self, asof: Time) -> Option<TimeSeries> {
        if asof < self.start {
            return None;
        }
        if asof >= self.end() {
            return Some(self.clone());
        }
        let len = (asof - self.start + 1) as usize;
        Some(TimeSeries {
            id: self.id.clone(),
            start: self.start,
            values: self.values[..len].to_vec(),
        })
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn center(&self) -> CenteredSeries {
        center(self)
    }
}

/// A series with its arithmetic mean removed.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredSeries {
    pub id: String,
    pub start: Time,
    pub mean: f64,
    pub values: Vec<f64>,
}

impl CenteredSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn center(y: &TimeSeries) -> CenteredSeries {
    let mean = y.mean();
    CenteredSeries {
        id: y.id.clone(),
        start: y.start,
        mean,
        values: y.values.iter().map(|v| v - mean).collect(),
    }
}

/// An unbalanced panel: series keyed by id, iterated in id order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Panel {
    series: BTreeMap<String, TimeSeries>,
}

impl Panel {
    pub fn new(series: impl IntoIterator<Item = TimeSeries>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for s in series {
            if map.contains_key(&s.id) {
                return Err(Error::DuplicateId(s.id));
            }
            map.insert(s.id.clone(), s);
        }
        if map.is_empty() {
            return Err(Error::Empty("panel"));
        }
        Ok(Self { series: map })
    }

    /// Largest observed time over all series.
    pub fn horizon(&self) -> Time {
        self.series.values().map(TimeSeries::end).max().unwrap_or(0)
    }

    pub fn get(&self, id: &str) -> Option<&TimeSeries> {
        self.series.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &TimeSeries> {
        self.series.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Every series restricted to observations at or before `asof`; series
    /// starting later are dropped. The result may be empty.
    pub fn truncated(&self, asof: Time) -> Panel {
        Panel {
            series: self
                .series
                .iter()
                .filter_map(|(k, s)| s.truncated(asof).map(|t| (k.clone(), t)))
                .collect(),
        }
    }

    /// Number of series with an observation at time `t`.
    pub fn alive_at(&self, t: Time) -> usize {
        self.iter().filter(|s| s.at(t).is_some()).count()
    }

    /// Merge two panels with disjoint ids.
    pub fn merged(mut self, other: Panel) -> Result<Panel> {
        for (k, s) in other.series {
            if self.series.contains_key(&k) {
                return Err(Error::DuplicateId(k));
            }
            self.series.insert(k, s);
        }
        Ok(self)
    }
}
