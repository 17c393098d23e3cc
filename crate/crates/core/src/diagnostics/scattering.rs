//! Back-propagated profile `w(t) = exp(+i t d^4) u(t)`. A solution scatters
//! forward exactly when `w(t)` converges in `H^2`; its limit is the
//! scattering state `phi_plus`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Snapshot;
use crate::spectral::{ComplexField, Spectrum};

#[derive(Clone, Debug)]
pub struct ScatteringProfile {
    pub phi_plus: ComplexField,
    pub times: Vec<f64>,
    /// `||w(t_{k+1}) - w(t_k)||_{H^2}`, with `||f||_{H^2}^2 = ||f||^2 + ||f_xx||^2`.
    pub cauchy_increments: Vec<f64>,
    /// Largest increment over the final 20% of snapshots.
    pub cauchy_floor: f64,
    /// `||w(T) - w(0.8 T)||_{H^2}`.
    pub tail_distance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScatteringSummary {
    pub cauchy_floor: f64,
    pub tail_distance: f64,
    pub increments: Vec<f64>,
}

impl ScatteringProfile {
    pub fn summary(&self) -> ScatteringSummary {
        ScatteringSummary {
            cauchy_floor: self.cauchy_floor,
            tail_distance: self.tail_distance,
            increments: self.cauchy_increments.clone(),
        }
    }
}

fn h2_distance(a: &Spectrum, b: &Spectrum) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .zip(a.grid().wavenumbers())
        .map(|((x, y), xi)| (1.0 + xi.powi(4)) * (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn scattering_profile(snapshots: &[Snapshot]) -> Result<ScatteringProfile> {
    if snapshots.len() < 2 {
        return Err(Error::param("need at least two snapshots"));
    }
    let profiles: Vec<Spectrum> = snapshots
        .iter()
        .map(|s| {
            let t = s.time;
            s.field
                .forward()
                .apply(|xi| Complex64::from_polar(1.0, t * xi.powi(4)))
        })
        .collect();
    let increments: Vec<f64> = profiles.windows(2).map(|w| h2_distance(&w[1], &w[0])).collect();

    let n = increments.len();
    let late = ((0.2 * n as f64).ceil() as usize).clamp(1, n);
    let cauchy_floor = increments[n - late..].iter().fold(0.0f64, |m, &v| m.max(v));

    let times: Vec<f64> = snapshots.iter().map(|s| s.time).collect();
    let t_end = *times.last().unwrap();
    let cut = times[0] + 0.8 * (t_end - times[0]);
    let k = times.partition_point(|&t| t < cut).min(profiles.len() - 1);
    let tail_distance = h2_distance(profiles.last().unwrap(), &profiles[k]);

    Ok(ScatteringProfile {
        phi_plus: profiles.last().unwrap().inverse(),
        times,
        cauchy_increments: increments,
        cauchy_floor,
        tail_distance,
    })
}
