use serde::{Deserialize, Serialize};

use crate::evolution::Snapshot;
use crate::spectral::{ComplexField, Grid};

/// `R -> sup_t int_{|x| >= R} |u|^2 + |u_xx|^2 dx` on a ladder of radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessProfile {
    pub radii: Vec<f64>,
    pub sup_tail: Vec<f64>,
}

/// Radii `1, 2, 4, ...` strictly below `L/2`.
pub fn dyadic_radii(grid: &Grid) -> Vec<f64> {
    std::iter::successors(Some(1.0f64), |r| Some(2.0 * r))
        .take_while(|&r| r < 0.5 * grid.length())
        .collect()
}

/// `int_{|x| >= R} |u|^2 + |u_xx|^2 dx`.
pub fn h2_tail(u: &ComplexField, radius: f64) -> f64 {
    let uxx = u.derivative(2);
    u.values()
        .iter()
        .zip(uxx.values())
        .zip(u.grid().nodes())
        .filter(|(_, x)| x.abs() >= radius)
        .map(|((a, b), _)| a.norm_sqr() + b.norm_sqr())
        .sum::<f64>()
        * u.grid().dx()
}

pub fn tightness_profile(snapshots: &[Snapshot], radii: &[f64]) -> TightnessProfile {
    let mut sup_tail = vec![0.0f64; radii.len()];
    for snap in snapshots {
        let uxx = snap.field.derivative(2);
        let dens: Vec<(f64, f64)> = snap
            .field
            .values()
            .iter()
            .zip(uxx.values())
            .zip(snap.field.grid().nodes())
            .map(|((a, b), &x)| (x.abs(), a.norm_sqr() + b.norm_sqr()))
            .collect();
        let dx = snap.field.grid().dx();
        for (s, &r) in sup_tail.iter_mut().zip(radii) {
            let tail: f64 = dens.iter().filter(|(ax, _)| *ax >= r).map(|(_, d)| d).sum::<f64>() * dx;
            *s = s.max(tail);
        }
    }
    TightnessProfile {
        radii: radii.to_vec(),
        sup_tail,
    }
}
