//! Rolling-origin cross-validation, one-standard-error selection of the
//! neighbourhood size and test-set evaluation.
//!
//! Fold `f` covers times `1..=t_f` for `t_f = T_0..=T_train`. An individual
//! enters at `max(T_0, s_i)`; in each fold its one-step forecasts are scored
//! over `max(T_0, s_i + 1)..=min(t_f, t_i)` with running random-walk scaling.
//! The forecast of time `u` only uses data up to `u - 1`, so forecasts are
//! shared by every fold containing `u`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{rms, rmsse_set};
use crate::pipeline::{ForecastRecord, Method};
use crate::series::{Panel, Time, TimeSeries};
use crate::ZERO_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub t0: Time,
    pub t_train: Time,
}

impl FoldSpec {
    pub fn new(t0: Time, t_train: Time) -> Result<Self> {
        if t0 < 1 || t0 > t_train {
            return Err(Error::Config(format!("need 1 <= T0 <= T_train, got T0={t0}, T_train={t_train}")));
        }
        Ok(Self { t0, t_train })
    }

    /// Fold end times for an individual starting at `start`.
    pub fn fold_ends(&self, start: Time) -> core::ops::RangeInclusive<Time> {
        self.t0.max(start)..=self.t_train
    }

    pub fn fold_count(&self, start: Time) -> usize {
        let r = self.fold_ends(start);
        if r.start() > r.end() {
            0
        } else {
            (r.end() - r.start() + 1) as usize
        }
    }

    /// Whether the individual has an observation in `T0..=T_train`.
    pub fn covers(&self, y: &TimeSeries) -> bool {
        y.start() <= self.t_train && y.end() >= self.t0
    }
}

/// One-step forecasts keyed by `(id, method, k)` and target time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ForecastTable {
    map: BTreeMap<(String, Method, Option<usize>), BTreeMap<Time, f64>>,
}

impl ForecastTable {
    pub fn insert(&mut self, id: &str, method: Method, k: Option<usize>, time: Time, value: f64) {
        self.map.entry((id.to_string(), method, k)).or_default().insert(time, value);
    }

    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ForecastRecord>) -> Self {
        let mut t = Self::default();
        for r in records {
            t.insert(&r.id, r.method, r.k, r.time, r.forecast);
        }
        t
    }

    pub fn get(&self, id: &str, method: Method, k: Option<usize>, time: Time) -> Option<f64> {
        self.map.get(&(id.to_string(), method, k)).and_then(|m| m.get(&time).copied())
    }

    fn require(&self, id: &str, method: Method, k: Option<usize>, time: Time) -> Result<f64> {
        self.get(id, method, k, time).ok_or_else(|| {
            let k = k.map(|k| format!(" k={k}")).unwrap_or_default();
            Error::Config(format!("missing {method}{k} forecast for {id} at time {time}"))
        })
    }
}

/// Running random-walk scale of `y` at absolute time `u` (at least one
/// earlier observation required), guarded below by the zero tolerance.
struct RunningScale {
    start: Time,
    cum: Vec<f64>,
}

impl RunningScale {
    fn new(y: &TimeSeries) -> Self {
        let mut cum = Vec::with_capacity(y.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in y.values().windows(2) {
            acc += (w[1] - w[0]) * (w[1] - w[0]);
            cum.push(acc);
        }
        Self { start: y.start(), cum }
    }

    /// `(scale, clamped)`.
    fn at(&self, u: Time) -> (f64, bool) {
        let i = (u - self.start) as usize;
        let s = libm::sqrt(self.cum[i] / i as f64);
        if s >= ZERO_TOL {
            (s, false)
        } else {
            (ZERO_TOL, true)
        }
    }
}

/// Running-scaled errors `(u, q_u)` of one individual at the given target
/// times, and whether any scale hit the zero guard.
pub fn running_scaled_errors(
    y: &TimeSeries,
    table: &ForecastTable,
    method: Method,
    k: Option<usize>,
    times: core::ops::RangeInclusive<Time>,
) -> Result<(Vec<(Time, f64)>, bool)> {
    let scale = RunningScale::new(y);
    let mut clamped = false;
    let mut out = Vec::new();
    for u in times {
        let actual = y.at(u).ok_or_else(|| Error::Config(format!("series {} has no observation at {u}", y.id())))?;
        if u <= y.start() {
            return Err(Error::Config(format!("series {} has no history before {u}", y.id())));
        }
        let f = table.require(y.id(), method, k, u)?;
        let (s, c) = scale.at(u);
        clamped |= c;
        out.push((u, (actual - f) / s));
    }
    Ok((out, clamped))
}

/// First and last target time scored in training for an individual.
pub fn training_window(y: &TimeSeries, spec: FoldSpec) -> core::ops::RangeInclusive<Time> {
    spec.t0.max(y.start() + 1)..=spec.t_train.min(y.end())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvEntry {
    pub id: String,
    pub method: Method,
    pub k: Option<usize>,
    pub mu: f64,
    pub se: f64,
    /// Only one fold: the standard error is reported as zero.
    pub single_fold: bool,
    /// A running scale fell below the zero tolerance.
    pub scale_clamped: bool,
    /// `(t_f, RMSSE)` per fold.
    pub folds: Vec<(Time, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub id: String,
    pub method: Method,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: FoldSpec,
    pub grid: Vec<usize>,
    pub entries: Vec<CvEntry>,
    pub selections: Vec<Selection>,
    /// Individuals without observations in the fold range.
    pub omitted: Vec<String>,
}

impl CvReport {
    pub fn selected_k(&self, id: &str, method: Method) -> Option<Option<usize>> {
        self.selections.iter().find(|s| s.id == id && s.method == method).map(|s| s.k)
    }
}

/// Mean and standard error of fold scores: `SE = sd / sqrt(N)` with the
/// sample standard deviation; zero (and flagged) for a single fold.
pub fn fold_statistics(scores: &[f64]) -> Result<(f64, f64, bool)> {
    let n = scores.len();
    if n == 0 {
        return Err(Error::Empty("fold scores"));
    }
    let mu = scores.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok((mu, 0.0, true));
    }
    let var = scores.iter().map(|s| (s - mu) * (s - mu)).sum::<f64>() / (n - 1) as f64;
    Ok((mu, libm::sqrt(var / n as f64), false))
}

/// Smallest grid value whose score lies within one standard error of the
/// minimum score. `grid` must be ascending.
pub fn select_k_one_se(grid: &[usize], mu: &[f64], se: &[f64]) -> Option<usize> {
    if grid.is_empty() || grid.len() != mu.len() || mu.len() != se.len() {
        return None;
    }
    let best = (0..mu.len()).fold(0, |b, i| if mu[i] < mu[b] { i } else { b });
    let bound = mu[best] + se[best];
    (0..grid.len()).find(|&i| mu[i] <= bound).map(|i| grid[i])
}

/// Fold-wise RMSSE of one individual for one method and `k`.
pub fn fold_scores(
    y: &TimeSeries,
    table: &ForecastTable,
    method: Method,
    k: Option<usize>,
    spec: FoldSpec,
) -> Result<(Vec<(Time, f64)>, bool)> {
    let window = training_window(y, spec);
    let (first, last) = (*window.start(), *window.end());
    let (q, clamped) = running_scaled_errors(y, table, method, k, window)?;
    let mut prefix = Vec::with_capacity(q.len() + 1);
    prefix.push(0.0);
    for (_, v) in &q {
        prefix.push(prefix.last().unwrap() + v * v);
    }
    let scores = spec
        .fold_ends(y.start())
        .map(|tf| {
            let hi = tf.min(last);
            let n = if hi < first { 0 } else { (hi - first + 1) as usize };
            let score = if n == 0 { 0.0 } else { libm::sqrt(prefix[n] / n as f64) };
            (tf, score)
        })
        .collect();
    Ok((scores, clamped))
}

/// Cross-validates every method over `grid` (methods without a neighbourhood
/// size are scored once) and selects `k` per individual and method.
pub fn tscv(panel: &Panel, table: &ForecastTable, methods: &[Method], grid: &[usize], spec: FoldSpec) -> Result<CvReport> {
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let mut entries = Vec::new();
    let mut selections = Vec::new();
    let mut omitted = Vec::new();
    for y in panel.iter() {
        if !spec.covers(y) {
            omitted.push(y.id().to_string());
            continue;
        }
        for &method in methods {
            let ks: Vec<Option<usize>> = if method.uses_k() { grid.iter().map(|&k| Some(k)).collect() } else { alloc::vec![None] };
            let mut mus = Vec::with_capacity(ks.len());
            let mut ses = Vec::with_capacity(ks.len());
            for &k in &ks {
                let (folds, scale_clamped) = fold_scores(y, table, method, k, spec)?;
                let scores: Vec<f64> = folds.iter().map(|f| f.1).collect();
                let (mu, se, single_fold) = fold_statistics(&scores)?;
                mus.push(mu);
                ses.push(se);
                entries.push(CvEntry { id: y.id().to_string(), method, k, mu, se, single_fold, scale_clamped, folds });
            }
            let k = if method.uses_k() { select_k_one_se(&grid, &mus, &ses) } else { None };
            selections.push(Selection { id: y.id().to_string(), method, k });
        }
    }
    Ok(CvReport { folds: spec, grid, entries, selections, omitted })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestEntry {
    pub id: String,
    pub method: Method,
    pub k: Option<usize>,
    /// RMSSE over the training window with running scaling.
    pub train_rmsse: f64,
    /// RMSSE over the test window scaled by the training random-walk RMS.
    pub test_rmsse: f64,
    pub n_test: usize,
    pub scale_clamped: bool,
    /// Test scaled errors `(time, q)`.
    pub q: Vec<(Time, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetLevel {
    pub method: Method,
    pub train_rmsse: f64,
    pub test_rmsse: f64,
    pub n_individuals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileRow {
    pub method: Method,
    /// Per-individual test RMSSE divided by the ETS one, ascending.
    pub ratios: Vec<(String, f64)>,
    /// Share of individuals beating the ETS benchmark.
    pub fraction_below_one: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub folds: FoldSpec,
    pub entries: Vec<TestEntry>,
    pub set_level: Vec<SetLevel>,
    pub percentiles: Vec<PercentileRow>,
    /// Individuals without test data or enough training data.
    pub omitted: Vec<String>,
}

impl EvalReport {
    pub fn set_level_of(&self, method: Method) -> Option<&SetLevel> {
        self.set_level.iter().find(|s| s.method == method)
    }
}

/// Scores the test period `T_train + 1..=t_i` with the selected `k`.
pub fn evaluate(panel: &Panel, table: &ForecastTable, cv: &CvReport, methods: &[Method]) -> Result<EvalReport> {
    let spec = cv.folds;
    let mut entries = Vec::new();
    let mut omitted = Vec::new();
    for y in panel.iter() {
        let train_len = y.truncated(spec.t_train).map_or(0, |t| t.len());
        if train_len < 2 || y.end() <= spec.t_train || cv.omitted.iter().any(|o| o == y.id()) {
            omitted.push(y.id().to_string());
            continue;
        }
        let train = y.truncated(spec.t_train).expect("has training data");
        let raw = libm::sqrt(
            train.values().windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>() / (train.len() - 1) as f64,
        );
        let (scale, mut clamped) = if raw >= ZERO_TOL { (raw, false) } else { (ZERO_TOL, true) };
        for &method in methods {
            let k = cv
                .selected_k(y.id(), method)
                .ok_or_else(|| Error::Config(format!("no cross-validated selection for {} {method}", y.id())))?;
            let mut q = Vec::new();
            for u in spec.t_train + 1..=y.end() {
                let f = table.require(y.id(), method, k, u)?;
                q.push((u, (y.at(u).expect("inside") - f) / scale));
            }
            let (train_folds, train_clamped) = fold_scores(y, table, method, k, spec)?;
            clamped |= train_clamped;
            let qs: Vec<f64> = q.iter().map(|x| x.1).collect();
            entries.push(TestEntry {
                id: y.id().to_string(),
                method,
                k,
                train_rmsse: train_folds.last().map_or(0.0, |f| f.1),
                test_rmsse: rms(&qs),
                n_test: qs.len(),
                scale_clamped: clamped,
                q,
            });
        }
    }
    let mut set_level = Vec::new();
    for &method in methods {
        let rows: Vec<&TestEntry> = entries.iter().filter(|e| e.method == method).collect();
        if rows.is_empty() {
            continue;
        }
        let test: Vec<f64> = rows.iter().map(|e| e.test_rmsse).collect();
        let train: Vec<f64> = rows.iter().map(|e| e.train_rmsse).collect();
        set_level.push(SetLevel {
            method,
            train_rmsse: rmsse_set(&train)?,
            test_rmsse: rmsse_set(&test)?,
            n_individuals: rows.len(),
        });
    }
    let percentiles = if methods.contains(&Method::Ets) { percentiles(&entries, methods) } else { Vec::new() };
    Ok(EvalReport { folds: spec, entries, set_level, percentiles, omitted })
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Ordered test RMSSE ratios against ETS and the share below one.
pub fn percentiles(entries: &[TestEntry], methods: &[Method]) -> Vec<PercentileRow> {
    let ets: BTreeMap<&str, f64> =
        entries.iter().filter(|e| e.method == Method::Ets).map(|e| (e.id.as_str(), e.test_rmsse)).collect();
    methods
        .iter()
        .filter(|m| **m != Method::Ets)
        .map(|&method| {
            let mut ratios: Vec<(String, f64)> = entries
                .iter()
                .filter(|e| e.method == method)
                .filter_map(|e| ets.get(e.id.as_str()).map(|b| (e.id.clone(), ratio(e.test_rmsse, *b))))
                .collect();
            ratios.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
            let below = ratios.iter().filter(|r| r.1 < 1.0).count();
            let fraction_below_one = if ratios.is_empty() { 0.0 } else { below as f64 / ratios.len() as f64 };
            PercentileRow { method, ratios, fraction_below_one }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaging::AvgMethod;
    use alloc::vec;

    #[test]
    fn default_fold_count() {
        let spec = FoldSpec::new(21, 74).unwrap();
        assert_eq!(spec.fold_count(1), 54);
        assert_eq!(spec.fold_count(30), 45);
        assert_eq!(spec.fold_count(80), 0);
        assert!(FoldSpec::new(30, 20).is_err());
    }

    #[test]
    fn one_se_examples() {
        assert_eq!(select_k_one_se(&[1, 3, 5], &[1.0, 0.9, 0.89], &[0.0, 0.0, 0.02]), Some(3));
        assert_eq!(select_k_one_se(&[1, 3, 5], &[0.5, 0.6, 0.7], &[0.1, 0.1, 0.1]), Some(1));
        assert_eq!(select_k_one_se(&[1, 3, 5], &[0.5, 0.5, 0.5], &[0.0, 0.0, 0.0]), Some(1));
        assert_eq!(select_k_one_se(&[], &[], &[]), None);
    }

    #[test]
    fn statistics() {
        let (mu, se, single) = fold_statistics(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(mu, 2.0);
        assert!((se - libm::sqrt(1.0 / 3.0)).abs() < 1e-15);
        assert!(!single);
        assert_eq!(fold_statistics(&[4.0]).unwrap(), (4.0, 0.0, true));
    }

    fn table_for(y: &TimeSeries, method: Method, k: Option<usize>, f: impl Fn(Time) -> f64) -> ForecastTable {
        let mut t = ForecastTable::default();
        for u in y.start() + 1..=y.end() {
            t.insert(y.id(), method, k, u, f(u));
        }
        t
    }

    #[test]
    fn fold_scores_match_direct_rmsse() {
        let y = TimeSeries::new("y", 1, vec![1.0, 2.0, 4.0, 3.0, 5.0, 8.0]).unwrap();
        let t = table_for(&y, Method::Ets, None, |u| y.at(u - 1).unwrap() + 0.5);
        let spec = FoldSpec::new(2, 6).unwrap();
        let (folds, _) = fold_scores(&y, &t, Method::Ets, None, spec).unwrap();
        assert_eq!(folds.len(), 5);
        let fc: Vec<f64> = (2..=6).map(|u| t.get("y", Method::Ets, None, u).unwrap()).collect();
        let rw = crate::metrics::random_walk_forecasts(y.values());
        for (tf, score) in folds {
            let direct = crate::metrics::rmsse_window(y.values(), &fc, &rw, 2, tf as usize).unwrap();
            assert!((score - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn single_grid_value_always_selected() {
        let y = TimeSeries::new("y", 1, vec![1.0, 2.0, 4.0, 3.0, 5.0]).unwrap();
        let m = Method::Avg(AvgMethod::SAvg);
        let t = table_for(&y, m, Some(4), |u| u as f64);
        let panel = Panel::new([y]).unwrap();
        let r = tscv(&panel, &t, &[m], &[4], FoldSpec::new(3, 4).unwrap()).unwrap();
        assert_eq!(r.selected_k("y", m), Some(Some(4)));
        assert_eq!(r.entries[0].folds.len(), 2);
    }

    #[test]
    fn omitted_and_test_scaling() {
        let y = TimeSeries::new("y", 1, vec![0.0, 2.0, 0.0, 5.0]).unwrap();
        let late = TimeSeries::new("late", 5, vec![1.0, 2.0]).unwrap();
        let mut t = table_for(&y, Method::Ets, None, |_| 0.0);
        t.insert("y", Method::Ets, None, 4, 2.0);
        let panel = Panel::new([y, late]).unwrap();
        let spec = FoldSpec::new(2, 3).unwrap();
        let cv = tscv(&panel, &t, &[Method::Ets], &[], spec).unwrap();
        assert_eq!(cv.omitted, vec!["late".to_string()]);
        let ev = evaluate(&panel, &t, &cv, &[Method::Ets]).unwrap();
        // training RW errors 2, -2 give scale 2; residual 3
        assert_eq!(ev.entries[0].q, vec![(4, 1.5)]);
        assert_eq!(ev.set_level_of(Method::Ets).unwrap().test_rmsse, 1.5);
    }
}
