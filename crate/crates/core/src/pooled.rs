//! Pooled AR(1) panel benchmark: `y_{i,t} = a + b y_{i,t-1} + e_{i,t}`
//! estimated by OLS on all within-series lag pairs.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Panel, Time, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelModel {
    pub intercept: f64,
    pub slope: f64,
    pub residual_sigma: f64,
    pub n_pairs: usize,
}

impl PanelModel {
    pub fn forecast(&self, last: f64) -> f64 {
        self.intercept + self.slope * last
    }
}

/// OLS on stacked `(y_{t-1}, y_t)` pairs.
pub fn fit_pairs(pairs: impl IntoIterator<Item = (f64, f64)> + Clone) -> Result<PanelModel> {
    let mut n = 0usize;
    let (mut sx, mut sy) = (0.0, 0.0);
    for (x, y) in pairs.clone() {
        n += 1;
        sx += x;
        sy += y;
    }
    if n < 3 {
        return Err(Error::InsufficientData("pooled AR(1) needs at least 3 lag pairs"));
    }
    let (mx, my) = (sx / n as f64, sy / n as f64);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in pairs.clone() {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= crate::ZERO_TOL * (1.0 + mx * mx) * n as f64 {
        return Err(Error::RankDeficient("all lagged values identical"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pairs
        .into_iter()
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum();
    Ok(PanelModel { intercept, slope, residual_sigma: libm::sqrt(ssr / (n - 2) as f64), n_pairs: n })
}

fn lag_pairs(panel: &Panel, upto: Time) -> Vec<(f64, f64)> {
    panel
        .iter()
        .flat_map(|s| {
            let len = if upto < s.start() { 0 } else { ((upto - s.start() + 1) as usize).min(s.len()) };
            s.values()[..len].windows(2).map(|w| (w[0], w[1]))
        })
        .collect()
}

/// Fits the pooled model on observations at or before `upto`; pairs never
/// cross series boundaries.
pub fn fit_pooled_ar1(panel: &Panel, upto: Time) -> Result<PanelModel> {
    fit_pairs(lag_pairs(panel, upto).iter().copied())
}

pub fn forecast_pooled(model: &PanelModel, y: &TimeSeries) -> f64 {
    model.forecast(y.last())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_ols() {
        let m = fit_pairs([(1.0, 2.0), (2.0, 3.0), (3.0, 4.0)]).unwrap();
        assert!((m.intercept - 1.0).abs() < 1e-12 && (m.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn insufficient_and_degenerate() {
        assert!(matches!(fit_pairs([(1.0, 2.0)]), Err(Error::InsufficientData(_))));
        assert!(matches!(fit_pairs([(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn recovers_noiseless_panel() {
        let gen = |id: &str, start: Time, y0: f64, len: usize| {
            let mut v = Vec::with_capacity(len);
            let mut y = y0;
            for _ in 0..len {
                v.push(y);
                y = 2.0 + 0.5 * y;
            }
            TimeSeries::new(id, start, v).unwrap()
        };
        let panel = Panel::new([gen("a", 1, 10.0, 6), gen("b", 3, -4.0, 5), gen("c", 2, 0.0, 4)]).unwrap();
        let m = fit_pooled_ar1(&panel, 10).unwrap();
        assert!((m.intercept - 2.0).abs() < 1e-9);
        assert!((m.slope - 0.5).abs() < 1e-9);
        // the cutoff is respected
        let early = fit_pooled_ar1(&panel, 3).unwrap();
        assert_eq!(early.n_pairs, 2 + 1);
    }

    #[test]
    fn residuals_orthogonal_to_regressors() {
        let pairs = [(1.0, 2.5), (2.0, 2.9), (4.0, 6.1), (3.0, 3.2), (0.5, 1.0)];
        let m = fit_pairs(pairs).unwrap();
        let (mut s1, mut sx) = (0.0, 0.0);
        for (x, y) in pairs {
            let e = y - m.intercept - m.slope * x;
            s1 += e;
            sx += e * x;
        }
        assert!(s1.abs() < 1e-8 && sx.abs() < 1e-8);
    }

    #[test]
    fn forecast_examples() {
        let y = TimeSeries::new("y", 1, alloc::vec![1.0, 9.0]).unwrap();
        let m = PanelModel { intercept: 0.0, slope: 1.0, residual_sigma: 0.0, n_pairs: 3 };
        assert_eq!(forecast_pooled(&m, &y), 9.0);
        let m = PanelModel { intercept: 2.0, slope: 0.5, ..m };
        assert_eq!(m.forecast(4.0), 4.0);
        let m = PanelModel { intercept: 0.0, slope: 0.0, ..m };
        assert_eq!(forecast_pooled(&m, &y), 0.0);
    }
}
