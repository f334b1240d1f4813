//! Root mean squared scaled errors.
//!
//! Positions are 1-based within a series: `y[u]` is observation `u`, and a
//! one-step forecast of `y[u]` uses observations `1..u-1`, so forecasts exist
//! for `u = 2..=n`. Slices of forecasts are therefore one shorter than `y`,
//! with `forecasts[i]` targeting `y[i + 2]` in 1-based terms.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ZERO_TOL;

/// Random-walk forecasts `y[u-1]` for `u = 2..=n`.
pub fn random_walk_forecasts(y: &[f64]) -> Vec<f64> {
    y.iter().take(y.len().saturating_sub(1)).copied().collect()
}

fn check_aligned(y: &[f64], forecasts: &[f64], benchmark: &[f64]) -> Result<()> {
    let need = y.len().saturating_sub(1);
    if forecasts.len() != need {
        return Err(Error::DimensionMismatch { left: forecasts.len(), right: need });
    }
    if benchmark.len() != need {
        return Err(Error::DimensionMismatch { left: benchmark.len(), right: need });
    }
    Ok(())
}

/// Scaled errors with their running scales, guarded against zero scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledErrors {
    /// `q[i]` belongs to position `u = i + 2`.
    pub q: Vec<f64>,
    /// Positions (1-based) whose running scale fell below the guard.
    pub clamped: Vec<usize>,
}

impl ScaledErrors {
    /// RMSSE over positions `from..=to`, clipped to the available range;
    /// zero for an empty window.
    pub fn window(&self, from: usize, to: usize) -> f64 {
        let lo = from.max(2);
        let hi = to.min(self.q.len() + 1);
        if lo > hi {
            return 0.0;
        }
        let s: f64 = self.q[lo - 2..=hi - 2].iter().map(|q| q * q).sum();
        libm::sqrt(s / (hi - lo + 1) as f64)
    }
}

/// `q_u = (y_u - f_u) / sqrt(mean_{v <= u} (y_v - b_v)^2)` where the running
/// mean covers benchmark errors from position 2 to `u`. Scales below the
/// zero tolerance are replaced by it and reported.
pub fn scaled_errors_guarded(y: &[f64], forecasts: &[f64], benchmark: &[f64]) -> Result<ScaledErrors> {
    check_aligned(y, forecasts, benchmark)?;
    let mut q = Vec::with_capacity(forecasts.len());
    let mut clamped = Vec::new();
    let mut acc = 0.0;
    for (i, (&f, &b)) in forecasts.iter().zip(benchmark).enumerate() {
        let target = y[i + 1];
        let e = target - b;
        acc += e * e;
        let mut scale = libm::sqrt(acc / (i + 1) as f64);
        if scale.is_nan() || scale < ZERO_TOL {
            scale = ZERO_TOL;
            clamped.push(i + 2);
        }
        q.push((target - f) / scale);
    }
    Ok(ScaledErrors { q, clamped })
}

/// Like [`scaled_errors_guarded`] but a zero scale is an error.
pub fn scaled_errors(y: &[f64], forecasts: &[f64], benchmark: &[f64]) -> Result<Vec<f64>> {
    let s = scaled_errors_guarded(y, forecasts, benchmark)?;
    match s.clamped.first() {
        Some(&position) => Err(Error::ZeroScale { position }),
        None => Ok(s.q),
    }
}

/// RMSSE over the window `s..=t` (1-based positions); zero when `s > t`.
pub fn rmsse_window(y: &[f64], forecasts: &[f64], benchmark: &[f64], s: usize, t: usize) -> Result<f64> {
    check_aligned(y, forecasts, benchmark)?;
    if s > t {
        return Ok(0.0);
    }
    let q = scaled_errors(y, forecasts, benchmark)?;
    Ok(ScaledErrors { q, clamped: Vec::new() }.window(s, t))
}

/// RMSSE of `forecasts` over every available position with the random walk
/// as benchmark.
pub fn rmsse(y: &[f64], forecasts: &[f64]) -> Result<f64> {
    rmsse_window(y, forecasts, &random_walk_forecasts(y), 2, y.len())
}

/// Root mean square of per-series RMSSEs.
pub fn rmsse_set(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("RMSSE set"));
    }
    Ok(libm::sqrt(values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64))
}

/// RMS of the random-walk errors on a training series.
pub fn training_rw_scale(train: &[f64]) -> Result<f64> {
    if train.len() < 2 {
        return Err(Error::InsufficientData("training scale needs two observations"));
    }
    let s: f64 = train.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    Ok(libm::sqrt(s / (train.len() - 1) as f64))
}

/// Test residuals divided by the fixed training random-walk scale.
pub fn test_scaled_errors(train: &[f64], actual: &[f64], forecasts: &[f64]) -> Result<Vec<f64>> {
    if actual.len() != forecasts.len() {
        return Err(Error::DimensionMismatch { left: actual.len(), right: forecasts.len() });
    }
    let scale = training_rw_scale(train)?;
    if scale.is_nan() || scale < ZERO_TOL {
        return Err(Error::ZeroScale { position: train.len() });
    }
    Ok(actual.iter().zip(forecasts).map(|(a, f)| (a - f) / scale).collect())
}

/// Root mean square of a slice; zero when empty.
pub fn rms(q: &[f64]) -> f64 {
    if q.is_empty() {
        return 0.0;
    }
    libm::sqrt(q.iter().map(|v| v * v).sum::<f64>() / q.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn worked_example() {
        let y = [1.0, 2.0, 4.0];
        let f = [1.5, 3.0];
        let v = rmsse_window(&y, &f, &random_walk_forecasts(&y), 2, 3).unwrap();
        assert!((v - libm::sqrt(0.325)).abs() < 1e-12);
        assert!((v - 0.570_087_7).abs() < 1e-6);
    }

    #[test]
    fn perfect_and_empty_window() {
        let y = [1.0, 3.0, 2.0, 5.0];
        assert_eq!(rmsse(&y, &y[1..]).unwrap(), 0.0);
        assert_eq!(rmsse_window(&y, &[0.0; 3], &random_walk_forecasts(&y), 4, 3).unwrap(), 0.0);
    }

    #[test]
    fn zero_scale_reported() {
        let y = [2.0, 2.0, 3.0];
        let err = rmsse(&y, &[1.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::ZeroScale { position: 2 });
        let g = scaled_errors_guarded(&y, &[1.0, 1.0], &random_walk_forecasts(&y)).unwrap();
        assert_eq!(g.clamped, vec![2]);
        assert!(g.q.iter().all(|q| q.is_finite()));
    }

    #[test]
    fn set_level() {
        assert_eq!(rmsse_set(&[0.5, 0.5, 0.5]).unwrap(), 0.5);
        assert!((rmsse_set(&[0.0, 2.0]).unwrap() - libm::sqrt(2.0)).abs() < 1e-15);
        assert!(rmsse_set(&[]).is_err());
    }

    #[test]
    fn test_errors_fixed_scale() {
        // training RW errors 2, -2: RMS 2
        let q = test_scaled_errors(&[0.0, 2.0, 0.0], &[5.0, 1.0], &[2.0, 1.0]).unwrap();
        assert_eq!(q, vec![1.5, 0.0]);
        assert!(test_scaled_errors(&[1.0, 1.0], &[1.0], &[0.0]).is_err());
        assert!(test_scaled_errors(&[1.0], &[1.0], &[0.0]).is_err());
    }

    #[test]
    fn misaligned_rejected() {
        assert!(rmsse(&[1.0, 2.0, 3.0], &[1.0]).is_err());
    }
}
