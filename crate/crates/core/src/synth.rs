//! Synthetic panels of simple exponential smoothing (ANN) paths.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Panel, Time, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_series: usize,
    pub length_range: (usize, usize),
    pub alpha_range: (f64, f64),
    pub sigma_range: (f64, f64),
    pub level0_range: (f64, f64),
    /// Every series ends at this time; starts follow from the drawn length.
    pub horizon: Time,
    pub id_prefix: String,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_series: 20,
            length_range: (8, 78),
            alpha_range: (0.1, 0.5),
            sigma_range: (1.0, 3.0),
            level0_range: (20.0, 60.0),
            horizon: 78,
            id_prefix: String::from("s"),
            seed: 1,
        }
    }
}

/// Parameters a synthetic series was drawn with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub id: String,
    pub alpha: f64,
    pub sigma: f64,
    pub level0: f64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        fn range_ok(r: (f64, f64)) -> bool {
            r.0.is_finite() && r.1.is_finite() && r.0 <= r.1
        }
        if self.n_series == 0 {
            return Err(Error::Config("n_series must be positive".into()));
        }
        let (lo, hi) = self.length_range;
        if lo == 0 || lo > hi {
            return Err(Error::Config("length_range must satisfy 1 <= min <= max".into()));
        }
        if hi as Time > self.horizon {
            return Err(Error::Config("maximum length exceeds horizon".into()));
        }
        if !range_ok(self.alpha_range) || self.alpha_range.0 < 0.0 || self.alpha_range.1 > 1.0 {
            return Err(Error::Config("alpha_range must lie in [0, 1]".into()));
        }
        if !range_ok(self.sigma_range) || self.sigma_range.0 < 0.0 {
            return Err(Error::Config("sigma_range must be non-negative".into()));
        }
        if !range_ok(self.level0_range) {
            return Err(Error::Config("level0_range must satisfy min <= max".into()));
        }
        Ok(())
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Simulate `x_t = l_{t-1} + e_t`, `l_t = l_{t-1} + alpha e_t` with
/// `e_t ~ N(0, sigma^2)`.
pub fn simulate_ann<R: Rng>(rng: &mut R, alpha: f64, sigma: f64, level0: f64, len: usize) -> Vec<f64> {
    let mut level = level0;
    (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            let e = sigma * z;
            let x = level + e;
            level += alpha * e;
            x
        })
        .collect()
}

/// Deterministic (given `cfg.seed`) synthetic panel with one ground-truth
/// record per series.
pub fn generate_panel(cfg: &SynthConfig) -> Result<(Panel, Vec<GroundTruth>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let width = format!("{}", cfg.n_series.saturating_sub(1)).len().max(2);
    let mut series = Vec::with_capacity(cfg.n_series);
    let mut truth = Vec::with_capacity(cfg.n_series);
    for i in 0..cfg.n_series {
        let len = rng.random_range(cfg.length_range.0..=cfg.length_range.1);
        let alpha = draw(&mut rng, cfg.alpha_range);
        let sigma = draw(&mut rng, cfg.sigma_range);
        let level0 = draw(&mut rng, cfg.level0_range);
        let values = simulate_ann(&mut rng, alpha, sigma, level0, len);
        let id = format!("{}{:0width$}", cfg.id_prefix, i, width = width);
        let start = cfg.horizon - len as Time + 1;
        series.push(TimeSeries::new(id.clone(), start, values)?);
        truth.push(GroundTruth { id, alpha, sigma, level0 });
    }
    Ok((Panel::new(series)?, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_gives_constant_series() {
        let cfg = SynthConfig { sigma_range: (0.0, 0.0), n_series: 5, ..Default::default() };
        let (panel, truth) = generate_panel(&cfg).unwrap();
        for (s, t) in panel.iter().zip(&truth) {
            assert!(s.values().iter().all(|&v| v == t.level0));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SynthConfig::default();
        assert_eq!(generate_panel(&cfg).unwrap(), generate_panel(&cfg).unwrap());
        let other = SynthConfig { seed: 2, ..cfg.clone() };
        assert_ne!(generate_panel(&cfg).unwrap().0, generate_panel(&other).unwrap().0);
    }

    #[test]
    fn innovation_variance_matches_sigma() {
        let cfg = SynthConfig {
            n_series: 1,
            length_range: (10_000, 10_000),
            alpha_range: (0.3, 0.3),
            sigma_range: (1.0, 1.0),
            level0_range: (0.0, 0.0),
            horizon: 10_000,
            seed: 7,
            ..Default::default()
        };
        let (panel, truth) = generate_panel(&cfg).unwrap();
        let y = panel.iter().next().unwrap().values();
        // recover latent levels from the smoothing recursion
        let mut level = truth[0].level0;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for &x in y {
            let e = x - level;
            sum += e;
            sq += e * e;
            level = 0.3 * x + 0.7 * level;
        }
        let n = y.len() as f64;
        let var = sq / n - (sum / n) * (sum / n);
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn respects_lengths_and_horizon() {
        for seed in 0..20 {
            let cfg = SynthConfig { seed, length_range: (3, 30), horizon: 40, ..Default::default() };
            let (panel, _) = generate_panel(&cfg).unwrap();
            for s in panel.iter() {
                assert!((3..=30).contains(&s.len()));
                assert_eq!(s.end(), 40);
                assert!(s.values().iter().all(|v| v.is_finite()));
            }
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = SynthConfig { length_range: (10, 5), ..Default::default() };
        assert!(generate_panel(&cfg).is_err());
        let cfg = SynthConfig { alpha_range: (0.5, 1.5), ..Default::default() };
        assert!(generate_panel(&cfg).is_err());
    }
}
