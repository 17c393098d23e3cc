//! Decay rate of the free flow: least-squares slope of
//! `log sup |exp(-i t d^4) u0|` against `log t`. On the line the slope is
//! `-1/4` for integrable data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{linear_propagate, TAIL_FRACTION};
use crate::spectral::ComplexField;

/// Fraction of the mass allowed in `|x| >= TAIL_FRACTION * L` before the
/// fitting window is truncated.
pub const DEFAULT_WRAP_FRACTION: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub tail_fractions: Vec<f64>,
    /// First time at which the tail fraction exceeded the wrap limit.
    pub truncated_at: Option<f64>,
}

/// Ordinary least-squares line through `(x, y)`; returns `(slope, intercept)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `n` geometrically spaced times in `[t0, t1]`.
pub fn geometric_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let r = (t1 / t0).ln() / (n - 1) as f64;
    (0..n).map(|k| t0 * (r * k as f64).exp()).collect()
}

pub fn dispersive_decay_fit(u0: &ComplexField, t_grid: &[f64], wrap_fraction: f64) -> Result<DecayFit> {
    if t_grid.len() < 3 {
        return Err(Error::param("need at least three times to fit a decay rate"));
    }
    if t_grid.iter().any(|&t| !(t > 0.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("times must be positive and increasing"));
    }
    if u0.is_zero() {
        return Err(Error::ZeroField);
    }
    let mass = u0.l2_norm_sq();
    let radius = TAIL_FRACTION * u0.grid().length();
    let spec = u0.forward();

    let mut times = Vec::new();
    let mut sups = Vec::new();
    let mut tails = Vec::new();
    let mut truncated_at = None;
    for &t in t_grid {
        let u = spec
            .apply(|xi| num_complex::Complex64::from_polar(1.0, -t * xi.powi(4)))
            .inverse();
        let tail = u.tail_mass(radius) / mass;
        if tail > wrap_fraction {
            log::warn!("wrap-around at t = {t}: tail fraction {tail:.3e}; truncating decay window");
            truncated_at = Some(t);
            break;
        }
        times.push(t);
        sups.push(u.sup_norm());
        tails.push(tail);
    }
    if times.len() < 3 {
        return Err(Error::param(format!(
            "only {} times before wrap-around; widen the domain or shorten the window",
            times.len()
        )));
    }
    let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
    let (exponent, intercept) = least_squares(&lx, &ly);
    Ok(DecayFit {
        exponent,
        intercept,
        times,
        sup_norms: sups,
        tail_fractions: tails,
        truncated_at,
    })
}

/// `sup |exp(-i t d^4) u0|` at a single time.
pub fn free_sup_norm(u0: &ComplexField, t: f64) -> f64 {
    linear_propagate(u0, t).sup_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use num_complex::Complex64;

    #[test]
    fn line_fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (s, c) = least_squares(&x, &y);
        assert!((s + 0.5).abs() < 1e-14 && (c - 2.0).abs() < 1e-14);
    }

    #[test]
    fn plane_wave_does_not_decay() {
        let g = Grid::new(256, 2.0 * std::f64::consts::PI * 10.0).unwrap();
        let f = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, 0.3 * x));
        let fit = dispersive_decay_fit(&f, &geometric_times(1.0, 50.0, 12), 1.0).unwrap();
        assert!(fit.exponent.abs() < 1e-10);
    }

    #[test]
    fn rejects_degenerate_windows() {
        let g = Grid::new(64, 10.0).unwrap();
        let f = ComplexField::gaussian(&g, 1.0, 1.0);
        assert!(dispersive_decay_fit(&f, &[1.0, 2.0], 0.05).is_err());
        assert!(dispersive_decay_fit(&f, &[1.0, 0.5, 2.0], 0.05).is_err());
        assert!(dispersive_decay_fit(&ComplexField::zeros(&g), &[1.0, 2.0, 3.0], 0.05).is_err());
    }
}
