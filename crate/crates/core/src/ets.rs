//! Local exponential smoothing models: ANN (simple exponential smoothing) and
//! AAN (Holt's linear trend), fitted by least squares on one-step errors and
//! selected by AICc.
//!
//! For fixed smoothing parameters the one-step forecasts are affine in the
//! initial states, so the initial states are profiled out by linear least
//! squares and only the smoothing parameters are searched numerically.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{minimize_scalar, nelder_mead_unit2};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EtsForm {
    #[serde(rename = "ANN")]
    Ann,
    #[serde(rename = "AAN")]
    Aan,
}

impl EtsForm {
    /// Smoothing parameters + initial states + residual variance.
    pub fn n_params(self) -> usize {
        match self {
            EtsForm::Ann => 3,
            EtsForm::Aan => 5,
        }
    }

    pub fn min_len(self) -> usize {
        match self {
            EtsForm::Ann => 3,
            EtsForm::Aan => 4,
        }
    }

    fn n_states(self) -> usize {
        match self {
            EtsForm::Ann => 1,
            EtsForm::Aan => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EtsForm::Ann => "ANN",
            EtsForm::Aan => "AAN",
        }
    }
}

/// Final state and in-sample one-step forecasts of a recursion run.
#[derive(Debug, Clone, PartialEq)]
struct Run {
    fitted: Vec<f64>,
    level: f64,
    trend: f64,
}

fn run(form: EtsForm, alpha: f64, beta: f64, level0: f64, trend0: f64, y: &[f64]) -> Run {
    let mut fitted = Vec::with_capacity(y.len());
    let (mut l, mut b) = (level0, trend0);
    for &obs in y {
        match form {
            EtsForm::Ann => {
                fitted.push(l);
                l = alpha * obs + (1.0 - alpha) * l;
            }
            EtsForm::Aan => {
                fitted.push(l + b);
                let nl = alpha * obs + (1.0 - alpha) * (l + b);
                b = beta * (nl - l) + (1.0 - beta) * b;
                l = nl;
            }
        }
    }
    Run { fitted, level: l, trend: b }
}

/// Least-squares initial states for fixed smoothing parameters, with the
/// resulting sum of squared one-step errors.
fn profile(form: EtsForm, alpha: f64, beta: f64, y: &[f64]) -> (f64, f64, f64) {
    // forecasts = base + level0 * cl + trend0 * cb, by linearity of the recursion
    let n = y.len();
    let mut resid = vec![0.0; n];
    let mut cl = vec![0.0; n];
    let mut cb = vec![0.0; n];
    let (mut l, mut b) = (0.0, 0.0);
    let (mut ll, mut lb) = (1.0, 0.0);
    let (mut bl, mut bb) = (0.0, 1.0);
    for t in 0..n {
        match form {
            EtsForm::Ann => {
                resid[t] = y[t] - l;
                cl[t] = ll;
                l = alpha * y[t] + (1.0 - alpha) * l;
                ll *= 1.0 - alpha;
            }
            EtsForm::Aan => {
                resid[t] = y[t] - (l + b);
                cl[t] = ll + lb;
                cb[t] = bl + bb;
                let nl = alpha * y[t] + (1.0 - alpha) * (l + b);
                b = beta * (nl - l) + (1.0 - beta) * b;
                l = nl;
                let nll = (1.0 - alpha) * (ll + lb);
                lb = beta * (nll - ll) + (1.0 - beta) * lb;
                ll = nll;
                let nbl = (1.0 - alpha) * (bl + bb);
                bb = beta * (nbl - bl) + (1.0 - beta) * bb;
                bl = nbl;
            }
        }
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (l0, b0) = match form {
        EtsForm::Ann => (dot(&cl, &resid) / dot(&cl, &cl), 0.0),
        EtsForm::Aan => {
            let (a11, a12, a22) = (dot(&cl, &cl), dot(&cl, &cb), dot(&cb, &cb));
            let (r1, r2) = (dot(&cl, &resid), dot(&cb, &resid));
            let det = a11 * a22 - a12 * a12;
            if det.abs() > 1e-12 * a11 * a22 {
                ((a22 * r1 - a12 * r2) / det, (a11 * r2 - a12 * r1) / det)
            } else {
                (r1 / a11, 0.0)
            }
        }
    };
    let sse = resid
        .iter()
        .zip(cl.iter().zip(&cb))
        .map(|(r, (a, c))| {
            let e = r - l0 * a - b0 * c;
            e * e
        })
        .sum();
    (sse, l0, b0)
}

/// A fitted local model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtsModel {
    pub form: EtsForm,
    pub alpha: f64,
    /// Trend smoothing; zero for ANN.
    pub beta: f64,
    pub level0: f64,
    pub trend0: f64,
    pub sigma: f64,
    pub sse: f64,
    pub loglik: f64,
    pub aicc: f64,
    pub n_obs: usize,
    pub fitted_on: String,
    /// Final level `l_t`.
    pub level: f64,
    /// Final trend `b_t` (zero for ANN).
    pub trend: f64,
    /// In-sample one-step forecasts, one per observation.
    #[serde(skip)]
    pub fitted: Vec<f64>,
}

impl EtsModel {
    /// Runs the recursion with fully specified parameters.
    pub fn with_params(
        y: &TimeSeries,
        form: EtsForm,
        alpha: f64,
        beta: f64,
        level0: f64,
        trend0: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || (form == EtsForm::Aan && !(0.0..=alpha).contains(&beta)) {
            return Err(Error::Config("smoothing parameters must satisfy 0 <= beta <= alpha <= 1".into()));
        }
        let (beta, trend0) = if form == EtsForm::Ann { (0.0, 0.0) } else { (beta, trend0) };
        let r = run(form, alpha, beta, level0, trend0, y.values());
        let sse = r.fitted.iter().zip(y.values()).map(|(f, v)| (v - f) * (v - f)).sum();
        Ok(Self::assemble(y, form, alpha, beta, level0, trend0, sse, r))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(y: &TimeSeries, form: EtsForm, alpha: f64, beta: f64, level0: f64, trend0: f64, sse: f64, r: Run) -> Self {
        let n = y.len();
        let var = sse / n as f64;
        let loglik = -0.5 * n as f64 * (libm::log(2.0 * core::f64::consts::PI * var) + 1.0);
        Self {
            form,
            alpha,
            beta,
            level0,
            trend0,
            sigma: libm::sqrt(var),
            sse,
            loglik,
            aicc: aicc(loglik, form.n_params(), n),
            n_obs: n,
            fitted_on: y.id().into(),
            level: r.level,
            trend: r.trend,
            fitted: r.fitted,
        }
    }

    pub fn forecast_one(&self) -> ForecastDist {
        ForecastDist { mean: self.level + self.trend, sigma: self.sigma }
    }
}

/// `-2 log L + 2k + 2k(k+1)/(n-k-1)`; infinite when `n <= k + 1`.
pub fn aicc(loglik: f64, k: usize, n: usize) -> f64 {
    if n <= k + 1 {
        return f64::INFINITY;
    }
    let k = k as f64;
    -2.0 * loglik + 2.0 * k + 2.0 * k * (k + 1.0) / (n as f64 - k - 1.0)
}

/// Least-squares fit of one model form.
pub fn fit_ets(y: &TimeSeries, form: EtsForm) -> Result<EtsModel> {
    if y.len() < form.min_len() {
        return Err(Error::TooShort { id: y.id().into(), len: y.len(), need: form.min_len() });
    }
    let v = y.values();
    let (alpha, beta) = match form {
        EtsForm::Ann => (minimize_scalar(|a| profile(form, a, 0.0, v).0, 0.0, 1.0, 21).0, 0.0),
        EtsForm::Aan => {
            // beta = alpha * gamma keeps beta <= alpha on the unit square
            let obj = |p: [f64; 2]| profile(form, p[0], p[0] * p[1], v).0;
            let mut best = ([0.0, 0.0], f64::INFINITY);
            for i in 0..=5 {
                for j in 0..=5 {
                    let p = [i as f64 / 5.0, j as f64 / 5.0];
                    let f = obj(p);
                    if f < best.1 {
                        best = (p, f);
                    }
                }
            }
            let mut starts = vec![best.0];
            starts.extend([0.1, 0.5, 0.9].map(|s| [s, 0.5]));
            for s in starts {
                let cand = nelder_mead_unit2(obj, s, 200);
                if cand.1 < best.1 {
                    best = cand;
                }
            }
            (best.0[0], best.0[0] * best.0[1])
        }
    };
    let (sse, l0, b0) = profile(form, alpha, beta, v);
    if !sse.is_finite() || !l0.is_finite() || !b0.is_finite() {
        return Err(Error::Optimization("non-finite sum of squared errors"));
    }
    let r = run(form, alpha, beta, l0, b0, v);
    Ok(EtsModel::assemble(y, form, alpha, beta, l0, b0, sse, r))
}

/// Whether AICc selection considers `form` for a series of length `n`.
pub fn is_admissible(form: EtsForm, n: usize) -> bool {
    match form {
        EtsForm::Ann => n >= EtsForm::Ann.min_len(),
        EtsForm::Aan => n >= EtsForm::Aan.min_len() && n > form.n_params() + 1,
    }
}

/// Fits every admissible form and returns the one with the smallest AICc
/// (ANN on ties).
pub fn select_ets(y: &TimeSeries) -> Result<EtsModel> {
    if !is_admissible(EtsForm::Ann, y.len()) {
        return Err(Error::TooShort { id: y.id().into(), len: y.len(), need: EtsForm::Ann.min_len() });
    }
    let mut best = fit_ets(y, EtsForm::Ann)?;
    if is_admissible(EtsForm::Aan, y.len()) {
        let aan = fit_ets(y, EtsForm::Aan)?;
        if aan.aicc < best.aicc {
            best = aan;
        }
    }
    Ok(best)
}

/// A model estimated on one series and run on another with re-estimated
/// initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefitModel {
    pub form: EtsForm,
    pub alpha: f64,
    pub beta: f64,
    pub source_id: String,
    pub target_id: String,
    pub level0: f64,
    pub trend0: f64,
    pub level: f64,
    pub trend: f64,
    pub sse: f64,
    /// Residual standard deviation on the target series.
    pub sigma: f64,
    #[serde(skip)]
    pub fitted: Vec<f64>,
}

impl RefitModel {
    pub fn forecast_one(&self) -> ForecastDist {
        ForecastDist { mean: self.level + self.trend, sigma: self.sigma }
    }
}

/// Freezes the smoothing parameters of `model` and re-estimates the initial
/// states on `z`.
pub fn refit(model: &EtsModel, z: &TimeSeries) -> Result<RefitModel> {
    let need = model.form.n_states();
    if z.len() < need {
        return Err(Error::TooShort { id: z.id().into(), len: z.len(), need });
    }
    let (sse, l0, b0) = profile(model.form, model.alpha, model.beta, z.values());
    if !sse.is_finite() || !l0.is_finite() || !b0.is_finite() {
        return Err(Error::Optimization("non-finite refit"));
    }
    let r = run(model.form, model.alpha, model.beta, l0, b0, z.values());
    Ok(RefitModel {
        form: model.form,
        alpha: model.alpha,
        beta: model.beta,
        source_id: model.fitted_on.clone(),
        target_id: z.id().into(),
        level0: l0,
        trend0: b0,
        level: r.level,
        trend: r.trend,
        sse,
        sigma: libm::sqrt(sse / z.len() as f64),
        fitted: r.fitted,
    })
}

/// One-step-ahead Gaussian forecast distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastDist {
    pub mean: f64,
    pub sigma: f64,
}

/// Anything producing a one-step forecast distribution.
pub trait OneStep {
    fn forecast_one(&self) -> ForecastDist;
}

impl OneStep for EtsModel {
    fn forecast_one(&self) -> ForecastDist {
        EtsModel::forecast_one(self)
    }
}

impl OneStep for RefitModel {
    fn forecast_one(&self) -> ForecastDist {
        RefitModel::forecast_one(self)
    }
}

pub fn forecast_one(model: &impl OneStep) -> ForecastDist {
    model.forecast_one()
}
