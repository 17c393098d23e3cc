use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic grid on `[-length/2, length/2)` with `n_points` uniform nodes.
///
/// Wavenumbers are stored in the native FFT order: index `k` carries the
/// integer frequency `m = k` for `k < n/2` and `m = k - n` otherwise, so the
/// unpaired Nyquist mode `m = -n/2` sits at index `n/2`. Use
/// [`Grid::monotone_order`] to obtain indices sorted by increasing wavenumber.
///
/// Cloning is cheap: the node tables and FFT plans are shared. Plans are
/// reentrant (`&self` with caller-supplied scratch), so a `Grid` can be used
/// from any number of threads at once.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n_points: usize,
    length: f64,
    dx: f64,
    nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points must be at least {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        if !n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_points must be even, got {n_points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        if !n_points.is_power_of_two() {
            log::debug!("grid size {n_points} is not a power of two; transforms will be slower");
        }

        let dx = length / n_points as f64;
        let nodes = (0..n_points)
            .map(|j| -0.5 * length + j as f64 * dx)
            .collect();
        let base = 2.0 * std::f64::consts::PI / length;
        let half = n_points / 2;
        let wavenumbers = (0..n_points)
            .map(|k| {
                let m = if k < half {
                    k as i64
                } else {
                    k as i64 - n_points as i64
                };
                base * m as f64
            })
            .collect();

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());

        Ok(Self {
            inner: Arc::new(GridInner {
                n_points,
                length,
                dx,
                nodes,
                wavenumbers,
                forward,
                inverse,
                scratch_len,
            }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    pub fn dx(&self) -> f64 {
        self.inner.dx
    }

    pub fn nodes(&self) -> &[f64] {
        &self.inner.nodes
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    /// Index of the unpaired Nyquist mode `m = -n/2`.
    pub fn nyquist_index(&self) -> usize {
        self.inner.n_points / 2
    }

    /// Integer frequency index of transform slot `k`.
    pub fn frequency_index(&self, k: usize) -> i64 {
        let n = self.inner.n_points;
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Transform slot holding integer frequency `m`, if it is on the grid.
    pub fn slot_of_frequency(&self, m: i64) -> Option<usize> {
        let n = self.inner.n_points as i64;
        if m < -n / 2 || m >= n / 2 {
            return None;
        }
        Some(m.rem_euclid(n) as usize)
    }

    /// Transform slots ordered by increasing wavenumber.
    pub fn monotone_order(&self) -> Vec<usize> {
        let n = self.inner.n_points;
        (n / 2..n).chain(0..n / 2).collect()
    }

    /// Node index of the reflection `x -> -x` on the periodic grid.
    pub fn mirror_index(&self, j: usize) -> usize {
        let n = self.inner.n_points;
        (n - j) % n
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.n_points() == other.n_points() && self.length() == other.length())
    }

    pub(crate) fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.inner.scratch_len]
    }

    /// Unnormalized forward DFT in place.
    pub(crate) fn fft_in_place(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inner.forward.process_with_scratch(buf, scratch);
    }

    /// Unnormalized inverse DFT in place.
    pub(crate) fn ifft_in_place(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inner.inverse.process_with_scratch(buf, scratch);
    }

    /// Scale taking raw DFT output to unitary coefficients, `sqrt(L)/N`.
    pub(crate) fn forward_scale(&self) -> f64 {
        self.inner.length.sqrt() / self.inner.n_points as f64
    }

    /// Scale taking raw inverse DFT output of unitary coefficients back to
    /// samples, `1/sqrt(L)`.
    pub(crate) fn inverse_scale(&self) -> f64 {
        1.0 / self.inner.length.sqrt()
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.inner.n_points)
            .field("length", &self.inner.length)
            .field("dx", &self.inner.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_grid_spacing_and_modes() {
        let g = Grid::new(8, 8.0).unwrap();
        assert_eq!(g.dx(), 1.0);
        let mut ks: Vec<f64> = g.monotone_order().iter().map(|&k| g.wavenumbers()[k]).collect();
        let expected: Vec<f64> = (-4..4).map(|m| 2.0 * PI * m as f64 / 8.0).collect();
        for (a, b) in ks.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
        ks.dedup();
        assert_eq!(ks.len(), 8);
    }

    #[test]
    fn two_pi_period_gives_integer_wavenumbers() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let ks: Vec<f64> = g.monotone_order().iter().map(|&k| g.wavenumbers()[k]).collect();
        for (i, k) in ks.iter().enumerate() {
            assert!((k - (i as f64 - 8.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn spacing_of_large_grid() {
        let g = Grid::new(1024, 200.0).unwrap();
        assert_eq!(g.dx(), 0.1953125);
        assert_eq!(g.dx() * g.n_points() as f64, g.length());
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(7, 1.0).is_err());
        assert!(Grid::new(4, 1.0).is_err());
        assert!(Grid::new(15, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, -3.0).is_err());
        assert!(Grid::new(16, f64::NAN).is_err());
    }

    #[test]
    fn nodes_uniform_and_wavenumbers_symmetric() {
        let g = Grid::new(64, 13.0).unwrap();
        for w in g.nodes().windows(2) {
            assert!((w[1] - w[0] - g.dx()).abs() < 1e-13);
        }
        assert_eq!(g.nodes()[0], -6.5);
        for (k, &xi) in g.wavenumbers().iter().enumerate() {
            if k == g.nyquist_index() {
                continue;
            }
            assert!(g.wavenumbers().iter().any(|&o| (o + xi).abs() < 1e-12));
        }
        for j in 0..64 {
            let m = g.mirror_index(j);
            if j != 0 {
                assert!((g.nodes()[m] + g.nodes()[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn slot_lookup_roundtrip() {
        let g = Grid::new(32, 5.0).unwrap();
        for k in 0..32 {
            assert_eq!(g.slot_of_frequency(g.frequency_index(k)), Some(k));
        }
        assert_eq!(g.slot_of_frequency(16), None);
        assert_eq!(g.slot_of_frequency(-16), Some(16));
    }
}
