//! The nine neighbourhood averaging strategies for a one-step forecast.
//!
//! Participants are the query `y` and its neighbours `z`. A neighbour
//! contributes the forecast of its own model refit to `y`; the query
//! contributes the forecast of its own model.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::barycenter::{adba, AdbaConfig, Barycenter};
use crate::error::{Error, Result};
use crate::ets::{refit, select_ets, EtsModel};
use crate::metrics::{random_walk_forecasts, scaled_errors_guarded};
use crate::neighborhood::Neighborhood;
use crate::series::TimeSeries;
use crate::ZERO_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AvgMethod {
    #[serde(rename = "G-AVG")]
    GAvg,
    #[serde(rename = "S-AVG")]
    SAvg,
    #[serde(rename = "S-AVG-N")]
    SAvgN,
    #[serde(rename = "D-AVG")]
    DAvg,
    #[serde(rename = "D-AVG-N")]
    DAvgN,
    #[serde(rename = "P-AVG")]
    PAvg,
    #[serde(rename = "P-AVG-R")]
    PAvgR,
    #[serde(rename = "S-NM-AVG")]
    SNmAvg,
    #[serde(rename = "D-NM-AVG")]
    DNmAvg,
}

impl AvgMethod {
    pub const ALL: [AvgMethod; 9] = [
        AvgMethod::GAvg,
        AvgMethod::SAvg,
        AvgMethod::SAvgN,
        AvgMethod::DAvg,
        AvgMethod::DAvgN,
        AvgMethod::PAvg,
        AvgMethod::PAvgR,
        AvgMethod::SNmAvg,
        AvgMethod::DNmAvg,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            AvgMethod::GAvg => "G-AVG",
            AvgMethod::SAvg => "S-AVG",
            AvgMethod::SAvgN => "S-AVG-N",
            AvgMethod::DAvg => "D-AVG",
            AvgMethod::DAvgN => "D-AVG-N",
            AvgMethod::PAvg => "P-AVG",
            AvgMethod::PAvgR => "P-AVG-R",
            AvgMethod::SNmAvg => "S-NM-AVG",
            AvgMethod::DNmAvg => "D-NM-AVG",
        }
    }

    /// Whether the query's own forecast takes part in the combination.
    pub fn includes_query(self) -> bool {
        matches!(self, AvgMethod::SAvg | AvgMethod::DAvg | AvgMethod::PAvg | AvgMethod::PAvgR)
    }

    /// Whether the query's own fitted model is required.
    pub fn needs_query_model(self) -> bool {
        self.includes_query()
    }

    pub fn needs_barycenter(self) -> bool {
        matches!(self, AvgMethod::GAvg | AvgMethod::DAvg)
    }

    /// Whether the method reports a weight vector.
    pub fn has_weights(self) -> bool {
        self != AvgMethod::GAvg
    }
}

impl fmt::Display for AvgMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for AvgMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AvgMethod::ALL
            .into_iter()
            .find(|m| m.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown averaging method `{s}`")))
    }
}

/// Participant weights, in participant order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub entries: Vec<(String, f64)>,
}

impl WeightVector {
    pub fn equal(ids: impl IntoIterator<Item = String>) -> Result<Self> {
        let ids: Vec<String> = ids.into_iter().collect();
        if ids.is_empty() {
            return Err(Error::Empty("participant set"));
        }
        let w = 1.0 / ids.len() as f64;
        Ok(Self { entries: ids.into_iter().map(|id| (id, w)).collect() })
    }

    /// Weights proportional to `1 / d`. Participants with `d` below the zero
    /// tolerance share the whole weight equally.
    pub fn reciprocal(items: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let items: Vec<(String, f64)> = items.into_iter().collect();
        if items.is_empty() {
            return Err(Error::Empty("participant set"));
        }
        if items.iter().any(|(_, d)| d.is_nan() || *d < 0.0) {
            return Err(Error::Config("weight denominators must be non-negative".into()));
        }
        let zeros = items.iter().filter(|(_, d)| *d < ZERO_TOL).count();
        if zeros > 0 {
            let w = 1.0 / zeros as f64;
            return Ok(Self {
                entries: items.into_iter().map(|(id, d)| (id, if d < ZERO_TOL { w } else { 0.0 })).collect(),
            });
        }
        let total: f64 = items.iter().map(|(_, d)| 1.0 / d).sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::InsufficientData("no finite weight denominator"));
        }
        Ok(Self { entries: items.into_iter().map(|(id, d)| (id, (1.0 / d) / total)).collect() })
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum_i w_i x_i` for values in participant order.
    pub fn apply(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.entries.len() {
            return Err(Error::DimensionMismatch { left: values.len(), right: self.entries.len() });
        }
        Ok(self.entries.iter().zip(values).map(|((_, w), x)| w * x).sum())
    }
}

/// One participant of a combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    pub weight: f64,
    pub value: f64,
}

/// A combined forecast with its participants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Combined {
    pub forecast: f64,
    pub weights: Option<WeightVector>,
    /// Participant values; for no-model methods these are successor values
    /// shifted back by the query mean.
    pub components: Vec<Component>,
}

impl Combined {
    fn weighted(weights: WeightVector, values: Vec<f64>) -> Result<Self> {
        let forecast = weights.apply(&values)?;
        let components = weights
            .entries
            .iter()
            .zip(&values)
            .map(|((id, w), v)| Component { id: id.clone(), weight: *w, value: *v })
            .collect();
        Ok(Self { forecast, weights: Some(weights), components })
    }
}

/// Neighbour value following the matched part of its path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Successor {
    pub id: String,
    /// 0-based index of the successor within the neighbour.
    pub index: usize,
    /// Centered value at `index`.
    pub value: f64,
    pub distance: f64,
}

/// For every neighbour, the centered value right after the latest neighbour
/// index matched to the query's last observation, if the neighbour has one.
pub fn successors(nb: &Neighborhood) -> Vec<Successor> {
    let last = nb.query_centered.len() - 1;
    nb.neighbors
        .iter()
        .filter_map(|n| {
            let j = n.path.matches_of(last).max()?;
            let next = j + 1;
            (next < n.centered.len()).then(|| Successor {
                id: n.id.clone(),
                index: next,
                value: n.centered.values[next],
                distance: n.distance,
            })
        })
        .collect()
}

/// In-sample RMSSE of one-step forecasts `fitted` (one per observation)
/// against `y`, random walk as benchmark. The first fitted value has no
/// benchmark and is skipped.
pub fn in_sample_rmsse(y: &[f64], fitted: &[f64]) -> Result<f64> {
    if fitted.len() != y.len() {
        return Err(Error::DimensionMismatch { left: fitted.len(), right: y.len() });
    }
    if y.len() < 2 {
        return Err(Error::TooShort { id: String::new(), len: y.len(), need: 2 });
    }
    let s = scaled_errors_guarded(y, &fitted[1..], &random_walk_forecasts(y))?;
    Ok(s.window(2, y.len()))
}

/// Which RMSSE feeds the performance weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerformanceVariant {
    /// Each participant's own in-sample fit.
    Own,
    /// Each neighbour model refit to the query, evaluated on the query.
    Refit,
}

/// Everything a combination may need for one query at one as-of time.
pub struct AvgContext<'a, 'm> {
    /// Neighbourhood already cut to the desired `k`.
    pub neighborhood: &'a Neighborhood,
    /// Model selected on the query; absent when the query is too short.
    pub query_model: Option<&'m EtsModel>,
    /// Model selected on each neighbour, looked up by id.
    pub model_of: &'a dyn Fn(&str) -> Option<&'m EtsModel>,
    pub adba: AdbaConfig,
}

impl<'m> AvgContext<'_, 'm> {
    fn y(&self) -> &TimeSeries {
        &self.neighborhood.query
    }

    fn query_model(&self) -> Result<&'m EtsModel> {
        self.query_model.ok_or(Error::TooShort {
            id: self.y().id().into(),
            len: self.y().len(),
            need: 3,
        })
    }

    fn neighbor_model(&self, id: &str) -> Result<&'m EtsModel> {
        (self.model_of)(id).ok_or_else(|| Error::UnknownId(id.into()))
    }

    /// `forecast_one(refit(M_z, y)).mean` for every neighbour, in order.
    pub fn neighbor_forecasts(&self) -> Result<Vec<(String, f64)>> {
        self.neighborhood
            .neighbors
            .iter()
            .map(|n| {
                let m = refit(self.neighbor_model(&n.id)?, self.y())?;
                Ok((n.id.clone(), m.forecast_one().mean))
            })
            .collect()
    }

    /// Barycenter of the centered query and neighbours (query first).
    pub fn barycenter(&self) -> Result<Barycenter> {
        adba(&self.neighborhood.centered_members(), &self.adba)
    }

    /// Participant id → RMSSE for performance weighting (query first).
    pub fn rmsse_weight_inputs(&self, variant: PerformanceVariant) -> Result<Vec<(String, f64)>> {
        let y = self.y();
        let my = self.query_model()?;
        let mut out = Vec::with_capacity(self.neighborhood.len() + 1);
        out.push((y.id().to_string(), in_sample_rmsse(y.values(), &my.fitted)?));
        for n in &self.neighborhood.neighbors {
            let mz = self.neighbor_model(&n.id)?;
            let v = match variant {
                PerformanceVariant::Own => in_sample_rmsse(n.series.values(), &mz.fitted)?,
                PerformanceVariant::Refit => in_sample_rmsse(y.values(), &refit(mz, y)?.fitted)?,
            };
            out.push((n.id.clone(), v));
        }
        Ok(out)
    }

    /// First average, then model: model the barycenter, refit to the query.
    pub fn forecast_gavg(&self, bary: Option<&Barycenter>) -> Result<Combined> {
        let owned;
        let b = match bary {
            Some(b) => b,
            None => {
                owned = self.barycenter()?;
                &owned
            }
        };
        let series = TimeSeries::new("barycenter", 1, b.values.clone())?;
        let model = select_ets(&series)?;
        let forecast = refit(&model, self.y())?.forecast_one().mean;
        Ok(Combined { forecast, weights: None, components: Vec::new() })
    }

    /// First model, then average.
    pub fn combine_fmta(&self, method: AvgMethod, bary: Option<&Barycenter>) -> Result<Combined> {
        let nb = self.neighborhood;
        let yid = || self.y().id().to_string();
        let mut values = Vec::with_capacity(nb.len() + 1);
        if method.includes_query() {
            values.push(self.query_model()?.forecast_one().mean);
        }
        let zf = self.neighbor_forecasts()?;
        values.extend(zf.iter().map(|(_, v)| *v));
        let ids = || {
            method
                .includes_query()
                .then(yid)
                .into_iter()
                .chain(nb.neighbors.iter().map(|n| n.id.clone()))
        };
        let weights = match method {
            AvgMethod::SAvg | AvgMethod::SAvgN => WeightVector::equal(ids())?,
            AvgMethod::DAvgN => WeightVector::reciprocal(nb.neighbors.iter().map(|n| (n.id.clone(), n.distance)))?,
            AvgMethod::DAvg => {
                let owned;
                let b = match bary {
                    Some(b) => b,
                    None => {
                        owned = self.barycenter()?;
                        &owned
                    }
                };
                if b.matchings.len() != nb.len() + 1 {
                    return Err(Error::DimensionMismatch { left: b.matchings.len(), right: nb.len() + 1 });
                }
                WeightVector::reciprocal(ids().zip(b.member_distances()))?
            }
            AvgMethod::PAvg => WeightVector::reciprocal(self.rmsse_weight_inputs(PerformanceVariant::Own)?)?,
            AvgMethod::PAvgR => WeightVector::reciprocal(self.rmsse_weight_inputs(PerformanceVariant::Refit)?)?,
            other => return Err(Error::Config(format!("{other} is not a model-then-average method"))),
        };
        Combined::weighted(weights, values)
    }

    /// No-model averaging of warping-path successors, shifted back by the
    /// query mean. An empty successor set is an error.
    pub fn combine_nomodel(&self, method: AvgMethod) -> Result<Combined> {
        let succ = successors(self.neighborhood);
        if succ.is_empty() {
            return Err(Error::Empty("successor set"));
        }
        let weights = match method {
            AvgMethod::SNmAvg => WeightVector::equal(succ.iter().map(|s| s.id.clone()))?,
            AvgMethod::DNmAvg => WeightVector::reciprocal(succ.iter().map(|s| (s.id.clone(), s.distance)))?,
            other => return Err(Error::Config(format!("{other} is not a no-model method"))),
        };
        let ybar = self.neighborhood.query_centered.mean;
        Combined::weighted(weights, succ.iter().map(|s| s.value + ybar).collect())
    }

    /// Dispatches on the method.
    pub fn forecast(&self, method: AvgMethod, bary: Option<&Barycenter>) -> Result<Combined> {
        match method {
            AvgMethod::GAvg => self.forecast_gavg(bary),
            AvgMethod::SNmAvg | AvgMethod::DNmAvg => self.combine_nomodel(method),
            _ => self.combine_fmta(method, bary),
        }
    }
}
