//! Closed forms for two independent, centered ANN processes and Monte-Carlo
//! checks of the resulting inequalities.
//!
//! For `X_t = l_{t-1} + e_t`, `l_t = l_{t-1} + alpha e_t`, `l_0 = 0`, the
//! expected pointwise cost is `d(i, j) = E[X_i^2] + E[Y_j^2]` and the
//! asymmetric DTW over these costs has a closed form.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dtw::{dtw_on_matrix, CostMatrix, DtwOptions};
use crate::error::{Error, Result};
use crate::ets::ForecastDist;

use super::wasserstein::wasserstein_forecast;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnParams {
    pub alpha: f64,
    pub sigma: f64,
    pub n: usize,
}

impl AnnParams {
    pub fn new(alpha: f64, sigma: f64, n: usize) -> Result<Self> {
        let p = Self { alpha, sigma, n };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) || self.sigma.is_nan() || self.sigma <= 0.0 || self.n == 0 {
            return Err(Error::Config("ANN parameters need alpha in [0,1], sigma > 0, n >= 1".into()));
        }
        Ok(())
    }

    /// `E[X_i^2]` for 1-based `i`.
    pub fn second_moment(&self, i: usize) -> f64 {
        self.sigma * self.sigma * (1.0 + (i as f64 - 1.0) * self.alpha * self.alpha)
    }
}

fn same_length(px: &AnnParams, py: &AnnParams) -> Result<usize> {
    px.validate()?;
    py.validate()?;
    if px.n != py.n {
        return Err(Error::DimensionMismatch { left: px.n, right: py.n });
    }
    Ok(px.n)
}

/// Expected cost matrix `d(i, j) = E[X_i^2] + E[Y_j^2]`.
pub fn expected_cost_matrix(px: &AnnParams, py: &AnnParams) -> Result<CostMatrix> {
    let n = same_length(px, py)?;
    Ok(CostMatrix::from_fn(n, n, |i, j| px.second_moment(i + 1) + py.second_moment(j + 1)))
}

/// `sigma_X^2 (n + C(n,2) alpha_X^2) + sigma_Y^2 (n + floor(n^2/4) alpha_Y^2)`.
pub fn theoretical_dtw_ann(px: &AnnParams, py: &AnnParams) -> Result<f64> {
    let n = same_length(px, py)?;
    let nf = n as f64;
    let c2 = nf * (nf - 1.0) / 2.0;
    let quarter = ((n * n) / 4) as f64;
    Ok(px.sigma * px.sigma * (nf + c2 * px.alpha * px.alpha)
        + py.sigma * py.sigma * (nf + quarter * py.alpha * py.alpha))
}

/// Asymmetric DTW (no open ends) on the expected cost matrix.
pub fn dtw_on_expected_costs(px: &AnnParams, py: &AnnParams) -> Result<f64> {
    Ok(dtw_on_matrix(&expected_cost_matrix(px, py)?, DtwOptions::ASYMMETRIC)?.distance)
}

/// `(l_X - l_Y)^2 + (sigma_X - sigma_Y)^2`.
pub fn theoretical_w2(level_x: f64, level_y: f64, sigma_x: f64, sigma_y: f64) -> f64 {
    wasserstein_forecast(ForecastDist { mean: level_x, sigma: sigma_x }, ForecastDist { mean: level_y, sigma: sigma_y })
}

/// Distance between the laws of the mean forecasts,
/// `n (sigma_X alpha_X - sigma_Y alpha_Y)^2`.
pub fn theoretical_w2_mean(px: &AnnParams, py: &AnnParams) -> Result<f64> {
    let n = same_length(px, py)?;
    let d = px.sigma * px.alpha - py.sigma * py.alpha;
    Ok(n as f64 * d * d)
}

/// Ratio of the mean-forecast distance to the closed-form DTW.
pub fn mean_forecast_ratio(px: &AnnParams, py: &AnnParams) -> Result<f64> {
    Ok(theoretical_w2_mean(px, py)? / theoretical_dtw_ann(px, py)?)
}

/// Simulates `n` steps and returns `(sum of innovations, final level)`.
fn simulate<R: rand::Rng>(rng: &mut R, p: &AnnParams) -> (f64, f64) {
    let mut sum = 0.0;
    for _ in 0..p.n {
        let e: f64 = StandardNormal.sample(rng);
        sum += p.sigma * e;
    }
    (sum, p.alpha * sum)
}

/// Empirical share of trials below a threshold with its binomial standard
/// error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McFraction {
    pub trials: usize,
    pub fraction: f64,
    pub se: f64,
}

impl McFraction {
    fn from_hits(hits: usize, trials: usize) -> Self {
        let p = hits as f64 / trials as f64;
        Self { trials, fraction: p, se: libm::sqrt(p * (1.0 - p) / trials as f64) }
    }

    /// Whether the fraction is at least `p` minus three standard errors,
    /// using the standard error at `p`.
    pub fn at_least(&self, p: f64) -> bool {
        let se = libm::sqrt(p * (1.0 - p) / self.trials as f64);
        self.fraction >= p - 3.0 * se
    }
}

/// Share of simulated pairs whose forecast distributions are closer in
/// squared 2-Wasserstein distance than the closed-form DTW.
pub fn mc_lipschitz(px: &AnnParams, py: &AnnParams, trials: usize, seed: u64) -> Result<McFraction> {
    if trials == 0 {
        return Err(Error::Config("need at least one trial".into()));
    }
    let dtw = theoretical_dtw_ann(px, py)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let (_, lx) = simulate(&mut rng, px);
        let (_, ly) = simulate(&mut rng, py);
        if theoretical_w2(lx, ly, px.sigma, py.sigma) / dtw < 1.0 {
            hits += 1;
        }
    }
    Ok(McFraction::from_hits(hits, trials))
}

/// Setup of the convex-combination experiment: unbiased smoothing-parameter
/// estimators `alpha + tau * N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinationSetup {
    pub x: AnnParams,
    pub y: AnnParams,
    /// Weight on the forecast of `X`.
    pub w: f64,
    /// Mean squared error of the estimator for `alpha_X`.
    pub mse_alpha_x: f64,
    pub mse_alpha_y: f64,
}

impl CombinationSetup {
    /// Largest admissible `MSE(alpha_Y)`:
    /// `sigma_X^2 / (2 sigma_Y^2) ((1 - w^2) MSE(alpha_X) - DTW / (n sigma_X^2))`.
    pub fn mse_bound(&self) -> Result<f64> {
        let dtw = theoretical_dtw_ann(&self.x, &self.y)?;
        let sx2 = self.x.sigma * self.x.sigma;
        let sy2 = self.y.sigma * self.y.sigma;
        Ok(sx2 / (2.0 * sy2) * ((1.0 - self.w * self.w) * self.mse_alpha_x - dtw / (self.x.n as f64 * sx2)))
    }

    pub fn condition_holds(&self) -> Result<bool> {
        Ok(self.mse_alpha_y <= self.mse_bound()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinationReport {
    pub trials: usize,
    pub condition_holds: bool,
    pub mse_combined: f64,
    pub mse_single: f64,
    /// Standard error of the per-trial difference `combined - single`.
    pub se_difference: f64,
}

impl CombinationReport {
    /// Combined MSE not above the single one beyond three standard errors.
    pub fn combination_helps(&self) -> bool {
        self.mse_combined - self.mse_single <= 3.0 * self.se_difference
    }
}

/// Squared errors of `w l^X_hat + (1 - w) l^Y_hat` and of `l^X_hat` for the
/// next value of `X`.
pub fn mc_combination(setup: &CombinationSetup, trials: usize, seed: u64) -> Result<CombinationReport> {
    if trials < 2 {
        return Err(Error::Config("need at least two trials".into()));
    }
    if !(0.0..=1.0).contains(&setup.w) || setup.mse_alpha_x < 0.0 || setup.mse_alpha_y < 0.0 {
        return Err(Error::Config("need w in [0,1] and non-negative estimator errors".into()));
    }
    let condition_holds = setup.condition_holds()?;
    let (tx, ty) = (libm::sqrt(setup.mse_alpha_x), libm::sqrt(setup.mse_alpha_y));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diffs = Vec::with_capacity(trials);
    let (mut sc, mut ss) = (0.0, 0.0);
    for _ in 0..trials {
        let (sum_x, lx) = simulate(&mut rng, &setup.x);
        let (sum_y, _) = simulate(&mut rng, &setup.y);
        let nx: f64 = StandardNormal.sample(&mut rng);
        let ny: f64 = StandardNormal.sample(&mut rng);
        let e: f64 = StandardNormal.sample(&mut rng);
        let next = lx + setup.x.sigma * e;
        let lx_hat = (setup.x.alpha + tx * nx) * sum_x;
        let ly_hat = (setup.y.alpha + ty * ny) * sum_y;
        let combined = setup.w * lx_hat + (1.0 - setup.w) * ly_hat;
        let c = (next - combined) * (next - combined);
        let s = (next - lx_hat) * (next - lx_hat);
        sc += c;
        ss += s;
        diffs.push(c - s);
    }
    let n = trials as f64;
    let md = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - md) * (d - md)).sum::<f64>() / (n - 1.0);
    Ok(CombinationReport {
        trials,
        condition_holds,
        mse_combined: sc / n,
        mse_single: ss / n,
        se_difference: libm::sqrt(var / n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, sigma: f64, n: usize) -> AnnParams {
        AnnParams::new(alpha, sigma, n).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(theoretical_dtw_ann(&p(1.0, 1.0, 3), &p(1.0, 1.0, 3)).unwrap(), 11.0);
        assert_eq!(dtw_on_expected_costs(&p(1.0, 1.0, 3), &p(1.0, 1.0, 3)).unwrap(), 11.0);
        assert_eq!(theoretical_dtw_ann(&p(0.0, 2.0, 7), &p(0.0, 1.0, 7)).unwrap(), 7.0 * 5.0);
        assert!(theoretical_dtw_ann(&p(0.5, 1.0, 3), &p(0.5, 1.0, 4)).is_err());
        assert!(AnnParams::new(1.5, 1.0, 3).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(theoretical_w2(1.0, 1.0, 2.0, 2.0), 0.0);
        assert_eq!(theoretical_w2(0.0, 2.0, 1.0, 1.0), 4.0);
        assert_eq!(theoretical_w2_mean(&p(0.2, 1.0, 9), &p(0.4, 0.5, 9)).unwrap(), 0.0);
    }

    #[test]
    fn lipschitz_fraction() {
        let r = mc_lipschitz(&p(0.5, 1.0, 20), &p(0.3, 2.0, 20), 2000, 5).unwrap();
        assert!(r.at_least(0.95), "{r:?}");
    }

    #[test]
    fn combination_example() {
        let setup = CombinationSetup { x: p(0.1, 1.0, 20), y: p(0.1, 0.1, 20), w: 0.5, mse_alpha_x: 4.0, mse_alpha_y: 0.01 };
        assert!(setup.condition_holds().unwrap());
        let r = mc_combination(&setup, 4000, 9).unwrap();
        assert!(r.combination_helps() && r.mse_combined < r.mse_single, "{r:?}");
    }
}
