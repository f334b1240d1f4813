//! Squared 2-Wasserstein distance between univariate Gaussians.

use crate::ets::ForecastDist;

/// `(m1 - m2)^2 + (s1 - s2)^2`.
pub fn wasserstein_forecast(a: ForecastDist, b: ForecastDist) -> f64 {
    let dm = a.mean - b.mean;
    let ds = a.sigma - b.sigma;
    dm * dm + ds * ds
}
