use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Complex samples of a function on a periodic [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

/// Unitary Fourier coefficients of a field, in transform order.
///
/// Coefficients are `c_k = sqrt(L)/N * sum_j f_j exp(-2 pi i j k / N)`, so
/// that `sum_k |c_k|^2 = sum_j |f_j|^2 dx` holds exactly. The phase is taken
/// relative to the first node; this convention is used everywhere in the
/// crate and only matters when comparing coefficients against an external
/// transform.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

/// `|z|^q`, taking the cheap path for even integer exponents.
#[inline]
pub fn abs_pow(z: Complex64, q: f64) -> f64 {
    let n2 = z.norm_sqr();
    let half = 0.5 * q;
    if half.fract() == 0.0 && half.abs() < 64.0 {
        n2.powi(half as i32)
    } else if n2 == 0.0 {
        if q > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        n2.powf(half)
    }
}

impl ComplexField {
    pub fn new(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::SizeMismatch {
                expected: grid.n_points(),
                actual: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid: grid.clone(),
            values: grid.nodes().iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn from_real_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// `amplitude * exp(-x^2 / (2 width^2))`.
    pub fn gaussian(grid: &Grid, amplitude: f64, width: f64) -> Self {
        Self::from_real_fn(grid, |x| amplitude * (-0.5 * x * x / (width * width)).exp())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn scaled(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        self.map(|z| z * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Periodic shift by a whole number of nodes: `g(x_j) = f(x_{j - shift})`.
    pub fn shifted(&self, shift: i64) -> Self {
        let n = self.values.len() as i64;
        let values = (0..n)
            .map(|j| self.values[(j - shift).rem_euclid(n) as usize])
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    pub(crate) fn check_same_grid(&self, other: &ComplexField) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::SizeMismatch {
                expected: self.grid.n_points(),
                actual: other.grid.n_points(),
            });
        }
        Ok(())
    }

    pub fn forward(&self) -> Spectrum {
        let mut coeffs = self.values.clone();
        let mut scratch = self.grid.scratch();
        self.grid.fft_in_place(&mut coeffs, &mut scratch);
        let s = self.grid.forward_scale();
        coeffs.iter_mut().for_each(|c| *c *= s);
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// `(d/dx)^order` by Fourier multiplication; the Nyquist mode is dropped
    /// for odd orders so real fields stay real.
    pub fn derivative(&self, order: u32) -> Self {
        if order == 0 {
            return self.clone();
        }
        self.forward().derivative(order).inverse()
    }

    /// Rectangle-rule `sum |f_j|^2 dx`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `sum |f_j|^q dx`, i.e. the q-th power of the L^q norm.
    pub fn lp_power(&self, q: f64) -> Result<f64> {
        if !(q >= 1.0) {
            return Err(Error::param(format!("L^q exponent must be >= 1, got {q}")));
        }
        Ok(self.values.iter().map(|&z| abs_pow(z, q)).sum::<f64>() * self.grid.dx())
    }

    pub fn lp_norm(&self, q: f64) -> Result<f64> {
        Ok(self.lp_power(q)?.powf(1.0 / q))
    }

    /// Homogeneous `sum |xi|^{2s} |c(xi)|^2` over unitary coefficients.
    pub fn sobolev_seminorm_sq(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::param(format!("Sobolev order must be >= 0, got {s}")));
        }
        Ok(self.forward().sobolev_seminorm_sq(s))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_j |f(x_j) - f(-x_j)|`.
    pub fn evenness_defect(&self) -> f64 {
        (0..self.values.len())
            .map(|j| (self.values[j] - self.values[self.grid.mirror_index(j)]).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// `sum |f_j|^2 dx` restricted to `|x_j| >= radius`.
    pub fn tail_mass(&self, radius: f64) -> f64 {
        self.values
            .iter()
            .zip(self.grid.nodes())
            .filter(|(_, x)| x.abs() >= radius)
            .map(|(z, _)| z.norm_sqr())
            .sum::<f64>()
            * self.grid.dx()
    }

    /// Sup distance to another field on the same grid.
    pub fn sup_distance(&self, other: &ComplexField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `<f, g> = sum conj(f_j) g_j dx`.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx())
    }
}

impl Spectrum {
    pub fn new(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n_points() {
            return Err(Error::SizeMismatch {
                expected: grid.n_points(),
                actual: coeffs.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn inverse(&self) -> ComplexField {
        let mut values = self.coeffs.clone();
        let mut scratch = self.grid.scratch();
        self.grid.ifft_in_place(&mut values, &mut scratch);
        let s = self.grid.inverse_scale();
        values.iter_mut().for_each(|v| *v *= s);
        ComplexField {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Multiply each coefficient by `m(xi)`.
    pub fn apply(&self, multiplier: impl Fn(f64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.grid.wavenumbers())
            .map(|(&c, &xi)| c * multiplier(xi))
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub fn derivative(&self, order: u32) -> Self {
        let mut out = self.apply(|xi| derivative_symbol(xi, order));
        if order % 2 == 1 {
            let k = self.grid.nyquist_index();
            out.coeffs[k] = Complex64::new(0.0, 0.0);
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn sobolev_seminorm_sq(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(self.grid.wavenumbers())
            .map(|(c, &xi)| {
                if xi == 0.0 {
                    0.0
                } else {
                    xi.abs().powf(2.0 * s) * c.norm_sqr()
                }
            })
            .sum()
    }
}

/// `(i xi)^order`.
pub fn derivative_symbol(xi: f64, order: u32) -> Complex64 {
    let mag = xi.powi(order as i32);
    match order % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mode(grid: &Grid, m: i64) -> (f64, ComplexField) {
        let xi = 2.0 * PI * m as f64 / grid.length();
        (xi, ComplexField::from_fn(grid, |x| Complex64::from_polar(1.0, xi * x)))
    }

    #[test]
    fn constant_has_only_dc() {
        let g = Grid::new(32, 7.0).unwrap();
        let f = ComplexField::from_real_fn(&g, |_| 2.5);
        let s = f.forward();
        assert!((s.coeffs()[0].norm() - 2.5 * 7f64.sqrt()).abs() < 1e-12);
        for c in &s.coeffs()[1..] {
            assert!(c.norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_single_coefficient() {
        let g = Grid::new(64, 10.0).unwrap();
        let (_, f) = mode(&g, 5);
        let s = f.forward();
        let k = g.slot_of_frequency(5).unwrap();
        for (i, c) in s.coeffs().iter().enumerate() {
            if i == k {
                assert!((c.norm() - 10f64.sqrt()).abs() < 1e-12);
            } else {
                assert!(c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fourth_derivative_of_plane_wave() {
        let g = Grid::new(64, 10.0).unwrap();
        let (xi, f) = mode(&g, 3);
        let d4 = f.derivative(4);
        let expected = f.scaled(xi.powi(4));
        assert!(d4.sup_distance(&expected).unwrap() < 1e-10 * xi.powi(4));
    }

    #[test]
    fn derivatives_of_constant_vanish() {
        let g = Grid::new(32, 3.0).unwrap();
        let f = ComplexField::from_real_fn(&g, |_| 1.0);
        for order in 1..=4 {
            assert!(f.derivative(order).sup_norm() < 1e-13);
        }
    }

    #[test]
    fn second_derivative_of_sine() {
        let g = Grid::new(128, 2.0 * PI).unwrap();
        let f = ComplexField::from_real_fn(&g, |x| (4.0 * x).sin());
        let d2 = f.derivative(2);
        let expected = f.scaled(-16.0);
        assert!(d2.sup_distance(&expected).unwrap() < 1e-11);
    }

    #[test]
    fn norms_of_simple_fields() {
        let g = Grid::new(64, 10.0).unwrap();
        let c = ComplexField::from_fn(&g, |_| Complex64::new(0.6, 0.8) * 3.0);
        assert!((c.l2_norm_sq() - 90.0).abs() < 1e-12);
        assert!((c.sup_norm() - 3.0).abs() < 1e-14);
        assert!((c.lp_norm(4.0).unwrap() - 3.0 * 10f64.powf(0.25)).abs() < 1e-12);

        let (xi, w) = mode(&g, 4);
        let h2 = w.sobolev_seminorm_sq(2.0).unwrap();
        assert!((h2 - xi.powi(4) * 10.0).abs() < 1e-9 * h2);
    }

    #[test]
    fn gaussian_mass_matches_closed_form() {
        // integral of exp(-2 x^2) over the line is sqrt(pi/2)
        let g = Grid::new(512, 40.0).unwrap();
        let f = ComplexField::from_real_fn(&g, |x| (-x * x).exp());
        assert!((f.l2_norm_sq() - (PI / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_exponents_and_sizes() {
        let g = Grid::new(16, 1.0).unwrap();
        let f = ComplexField::zeros(&g);
        assert!(f.lp_norm(0.5).is_err());
        assert!(f.sobolev_seminorm_sq(-1.0).is_err());
        assert!(ComplexField::new(&g, vec![Complex64::new(0.0, 0.0); 15]).is_err());
        assert!(Spectrum::new(&g, vec![Complex64::new(0.0, 0.0); 17]).is_err());
        let other = ComplexField::zeros(&Grid::new(32, 1.0).unwrap());
        assert!(f.sub(&other).is_err());
    }

    #[test]
    fn odd_derivative_drops_nyquist() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        // alternating samples are exactly the Nyquist mode
        let f = ComplexField::new(
            &g,
            (0..16).map(|j| Complex64::new(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect(),
        )
        .unwrap();
        assert!(f.derivative(1).sup_norm() < 1e-13);
        assert!((f.derivative(2).sup_norm() - 64.0).abs() < 1e-10);
    }

    #[test]
    fn abs_pow_paths_agree() {
        let z = Complex64::new(0.3, -1.2);
        assert!((abs_pow(z, 14.0) - z.norm().powf(14.0)).abs() < 1e-12);
        assert!((abs_pow(z, 3.5) - z.norm().powf(3.5)).abs() < 1e-12);
        assert_eq!(abs_pow(Complex64::new(0.0, 0.0), 2.5), 0.0);
    }
}
