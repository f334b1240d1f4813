//! One-step forecasts of every requested method for every query at one as-of
//! time.
//!
//! Everything computed for as-of time `t` depends only on the panel
//! truncated at `t`, so forecasts for `t + 1` never look ahead.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::averaging::{AvgContext, AvgMethod, Component, WeightVector};
use crate::barycenter::AdbaConfig;
use crate::error::{Error, Result};
use crate::ets::{select_ets, EtsModel};
use crate::neighborhood::find_neighbors;
use crate::pooled::{fit_pooled_ar1, PanelModel};
use crate::series::{Panel, Time, TimeSeries};

/// Any forecasting method: the two benchmarks or an averaging strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Method {
    Ets,
    PlmPool,
    Avg(AvgMethod),
}

impl Method {
    pub fn all() -> Vec<Method> {
        [Method::Ets, Method::PlmPool].into_iter().chain(AvgMethod::ALL.map(Method::Avg)).collect()
    }

    pub fn tag(self) -> &'static str {
        match self {
            Method::Ets => "ETS",
            Method::PlmPool => "PLM-POOL",
            Method::Avg(m) => m.tag(),
        }
    }

    /// Whether the method depends on the number of neighbours.
    pub fn uses_k(self) -> bool {
        matches!(self, Method::Avg(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ETS" => Ok(Method::Ets),
            "PLM-POOL" => Ok(Method::PlmPool),
            other => other.parse().map(Method::Avg),
        }
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.tag().to_string()
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub methods: Vec<Method>,
    /// Neighbourhood sizes to evaluate.
    pub grid: Vec<usize>,
    pub adba: AdbaConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { methods: Method::all(), grid: alloc::vec![1, 3, 5, 10, 20], adba: AdbaConfig::default() }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods requested".into()));
        }
        if self.methods.iter().any(|m| m.uses_k()) && self.grid.is_empty() {
            return Err(Error::Config("neighbourhood grid is empty".into()));
        }
        if self.grid.contains(&0) {
            return Err(Error::Config("neighbourhood sizes must be positive".into()));
        }
        Ok(())
    }

    fn avg_methods(&self) -> impl Iterator<Item = AvgMethod> + '_ {
        self.methods.iter().filter_map(|m| match m {
            Method::Avg(a) => Some(*a),
            _ => None,
        })
    }
}

/// Models selected on every series of a truncated panel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelBank {
    pub models: BTreeMap<String, EtsModel>,
    /// Series without a model and the reason.
    pub failures: BTreeMap<String, String>,
}

impl ModelBank {
    pub fn fit(series: &TimeSeries) -> Result<EtsModel> {
        select_ets(series)
    }

    pub fn from_results(results: impl IntoIterator<Item = (String, Result<EtsModel>)>) -> Self {
        let mut bank = ModelBank::default();
        for (id, r) in results {
            match r {
                Ok(m) => {
                    bank.models.insert(id, m);
                }
                Err(e) => {
                    bank.failures.insert(id, e.to_string());
                }
            }
        }
        bank
    }

    pub fn build(panel: &Panel) -> Self {
        Self::from_results(panel.iter().map(|s| (s.id().to_string(), Self::fit(s))))
    }

    pub fn get(&self, id: &str) -> Option<&EtsModel> {
        self.models.get(id)
    }
}

/// One forecast of one method for one query and target time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub id: String,
    /// Target time, one after the as-of time.
    pub time: Time,
    pub method: Method,
    pub k: Option<usize>,
    pub forecast: f64,
    pub weights: Option<WeightVector>,
    pub fallback: Option<String>,
    pub n_neighbors: usize,
    #[serde(skip)]
    pub components: Vec<Component>,
}

impl ForecastRecord {
    pub fn fallback_flag(&self) -> bool {
        self.fallback.is_some()
    }
}

/// Everything needed to forecast at `asof + 1`.
#[derive(Debug, Clone)]
pub struct AsOfState {
    pub asof: Time,
    pub panel: Panel,
    pub bank: ModelBank,
    pub pooled: Result<PanelModel>,
}

impl AsOfState {
    /// Truncates `panel` at `asof` and fits everything sequentially.
    pub fn build(panel: &Panel, asof: Time) -> Self {
        let truncated = panel.truncated(asof);
        let bank = ModelBank::build(&truncated);
        Self::from_parts(truncated, asof, bank)
    }

    /// `panel` must already be truncated at `asof`.
    pub fn from_parts(panel: Panel, asof: Time, bank: ModelBank) -> Self {
        let pooled = fit_pooled_ar1(&panel, asof);
        Self { asof, panel, bank, pooled }
    }

    /// Series observed at the as-of time.
    pub fn queries(&self) -> impl Iterator<Item = &TimeSeries> {
        self.panel.iter().filter(move |s| s.end() == self.asof)
    }

    /// ETS forecast of the query, or its last value when no model exists.
    fn baseline(&self, y: &TimeSeries) -> (f64, Option<String>) {
        match self.bank.get(y.id()) {
            Some(m) => (m.forecast_one().mean, None),
            None => (y.last(), Some("random walk: no ETS model for the query".into())),
        }
    }

    /// Records of every configured method for query `id`, in method order and
    /// ascending `k`.
    pub fn forecast_query(&self, id: &str, cfg: &PipelineConfig) -> Result<Vec<ForecastRecord>> {
        let y = self.panel.get(id).ok_or_else(|| Error::UnknownId(id.into()))?;
        if y.end() != self.asof {
            return Err(Error::Config(format!("series {id} is not observed at time {}", self.asof)));
        }
        let time = self.asof + 1;
        let (base, base_flag) = self.baseline(y);
        let record = |method, k, forecast, fallback: Option<String>, n_neighbors| ForecastRecord {
            id: id.to_string(),
            time,
            method,
            k,
            forecast,
            weights: None,
            fallback,
            n_neighbors,
            components: Vec::new(),
        };
        let fallback_reason = |why: &str| match &base_flag {
            Some(b) => format!("{why}; {b}"),
            None => format!("{why}; ETS baseline"),
        };

        let mut out = Vec::new();
        for m in &cfg.methods {
            match m {
                Method::Ets => out.push(record(Method::Ets, None, base, base_flag.clone(), 0)),
                Method::PlmPool => out.push(match &self.pooled {
                    Ok(p) => record(Method::PlmPool, None, p.forecast(y.last()), None, 0),
                    Err(e) => record(Method::PlmPool, None, base, Some(fallback_reason(&e.to_string())), 0),
                }),
                Method::Avg(_) => {}
            }
        }

        let avg: Vec<AvgMethod> = cfg.avg_methods().collect();
        if avg.is_empty() {
            return Ok(out);
        }
        let mut grid = cfg.grid.clone();
        grid.sort_unstable();
        grid.dedup();
        let kmax = *grid.last().expect("validated grid");
        let full = match find_neighbors(y, &self.panel, kmax, self.asof) {
            Ok(nb) => nb,
            Err(e) => {
                let why = fallback_reason(&e.to_string());
                for m in &avg {
                    for &k in &grid {
                        out.push(record(Method::Avg(*m), Some(k), base, Some(why.clone()), 0));
                    }
                }
                return Ok(out);
            }
        };
        let query_model = self.bank.get(id);
        let model_of = |z: &str| self.bank.get(z);
        // one entry per method and k, in method order
        let mut per_method: Vec<Vec<ForecastRecord>> = alloc::vec![Vec::new(); avg.len()];
        for &k in &grid {
            let nb = full.truncated(k);
            let ctx = AvgContext { neighborhood: &nb, query_model, model_of: &model_of, adba: cfg.adba };
            let bary = if avg.iter().any(|m| m.needs_barycenter()) { Some(ctx.barycenter()) } else { None };
            for (slot, &m) in avg.iter().enumerate() {
                let result = match (&bary, m.needs_barycenter()) {
                    (Some(Err(e)), true) => Err(e.clone()),
                    (Some(Ok(b)), true) => ctx.forecast(m, Some(b)),
                    _ => ctx.forecast(m, None),
                };
                let rec = match result {
                    Ok(c) => ForecastRecord {
                        weights: c.weights,
                        components: c.components,
                        ..record(Method::Avg(m), Some(k), c.forecast, None, nb.len())
                    },
                    Err(e) => record(Method::Avg(m), Some(k), base, Some(fallback_reason(&e.to_string())), nb.len()),
                };
                per_method[slot].push(rec);
            }
        }
        out.extend(per_method.into_iter().flatten());
        Ok(out)
    }

    /// Records for every query observed at the as-of time, in id order.
    pub fn forecast_all(&self, cfg: &PipelineConfig) -> Result<Vec<ForecastRecord>> {
        let mut out = Vec::new();
        for y in self.queries() {
            out.extend(self.forecast_query(y.id(), cfg)?);
        }
        Ok(out)
    }
}
