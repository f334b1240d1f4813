//! Adjusted Rand index from the pair-counting contingency table.

use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::error::{Error, Result};

/// Cluster label per id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    pub labels: BTreeMap<String, usize>,
}

impl Partition {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, usize)>) -> Self {
        Self { labels: pairs.into_iter().collect() }
    }

    /// Two clusters over `universe`: label 1 for members, 0 otherwise.
    pub fn membership<'a>(universe: impl IntoIterator<Item = &'a str>, members: &[&str]) -> Self {
        Self::from_pairs(universe.into_iter().map(|id| (String::from(id), usize::from(members.contains(&id)))))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn choose2(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Adjusted Rand index. When the expected-index correction vanishes (for
/// instance both partitions are a single cluster) the result is 1 for
/// identical partitions up to relabelling and 0 otherwise.
pub fn adjusted_rand(p1: &Partition, p2: &Partition) -> Result<f64> {
    if p1.len() != p2.len() || p1.labels.keys().zip(p2.labels.keys()).any(|(a, b)| a != b) {
        return Err(Error::UniverseMismatch);
    }
    let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut rows: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cols: BTreeMap<usize, usize> = BTreeMap::new();
    for (a, b) in p1.labels.values().zip(p2.labels.values()) {
        *table.entry((*a, *b)).or_default() += 1;
        *rows.entry(*a).or_default() += 1;
        *cols.entry(*b).or_default() += 1;
    }
    let index: f64 = table.values().map(|&n| choose2(n)).sum();
    let sa: f64 = rows.values().map(|&n| choose2(n)).sum();
    let sb: f64 = cols.values().map(|&n| choose2(n)).sum();
    let total = choose2(p1.len());
    let expected = if total > 0.0 { sa * sb / total } else { 0.0 };
    let max = 0.5 * (sa + sb);
    let denom = max - expected;
    if denom == 0.0 {
        let same = table.len() == rows.len() && table.len() == cols.len();
        return Ok(if same { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / denom)
}

/// Mean of per-query indices; `None` when empty.
pub fn mean_index(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}
