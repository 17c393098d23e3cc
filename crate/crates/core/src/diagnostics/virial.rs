//! Localized virial functional
//!
//! ```text
//! M_R(u) = 2 Im int conj(u) Psi_R' u_x dx,
//! Psi_R(x) = R^2 int_0^{|x|/R} int_0^r psi(s) ds dr,
//! ```
//!
//! and its time derivative along the flow, split as `4 K(u) + A_R(u)` with
//!
//! ```text
//! A_R = 8 int (Psi_R'' - 1)|u_xx|^2 - 6 int Psi_R''''|u_x|^2 + int Psi_R^(6)|u|^2
//!       - 2(p-1)/(p+1) int (Psi_R'' - 1)|u|^{p+1}.
//! ```
//!
//! On the torus `Psi_R'` jumps at `x = +-L/2`; the identity holds only while
//! the field is negligible there, which is why `R <= L/4` is enforced.

use serde::{Deserialize, Serialize};

use super::cutoff::{psi_jet, CutoffIntegrals};
use crate::error::{Error, Result};
use crate::functionals::{FieldNorms, NonlinearityParams};
use crate::spectral::{abs_pow, ComplexField, Grid};

/// Largest admissible `R / L`.
pub const MAX_RADIUS_FRACTION: f64 = 0.25;

/// `Psi_R` and the derivatives the virial identity uses, tabulated on a grid.
#[derive(Clone, Debug)]
pub struct VirialWeight {
    grid: Grid,
    radius: f64,
    pub psi: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d4: Vec<f64>,
    pub d6: Vec<f64>,
}

impl VirialWeight {
    pub fn new(grid: &Grid, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= MAX_RADIUS_FRACTION * grid.length()) {
            return Err(Error::param(format!(
                "virial radius {radius} must lie in (0, {}] for domain length {}",
                MAX_RADIUS_FRACTION * grid.length(),
                grid.length()
            )));
        }
        let quad = CutoffIntegrals::default();
        let n = grid.n_points();
        let (mut psi, mut d1, mut d2, mut d4, mut d6) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        let r = radius;
        for &x in grid.nodes() {
            let y = x.abs() / r;
            let jet = psi_jet(y);
            psi.push(r * r * quad.second(y));
            d1.push(x.signum() * r * quad.first(y));
            d2.push(jet.value());
            d4.push(jet.derivative(2) / (r * r));
            d6.push(jet.derivative(4) / (r * r * r * r));
        }
        Ok(Self {
            grid: grid.clone(),
            radius,
            psi,
            d1,
            d2,
            d4,
            d6,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `sup |Psi_R'|`.
    pub fn max_slope(&self) -> f64 {
        self.d1.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check(&self, u: &ComplexField) -> Result<()> {
        if !u.grid().same_as(&self.grid) {
            return Err(Error::SizeMismatch {
                expected: self.grid.n_points(),
                actual: u.grid().n_points(),
            });
        }
        Ok(())
    }
}

pub fn virial_m(u: &ComplexField, w: &VirialWeight) -> Result<f64> {
    w.check(u)?;
    let ux = u.derivative(1);
    let s: f64 = u
        .values()
        .iter()
        .zip(ux.values())
        .zip(&w.d1)
        .map(|((a, b), g)| g * (a.conj() * b).im)
        .sum();
    Ok(2.0 * s * u.grid().dx())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirialRate {
    pub four_k: f64,
    pub a_r: f64,
    pub total: f64,
    /// `8 int (Psi'' - 1)|u_xx|^2`
    pub term_h2: f64,
    /// `-6 int Psi''''|u_x|^2`
    pub term_h1: f64,
    /// `int Psi^(6)|u|^2`
    pub term_l2: f64,
    /// `-2(p-1)/(p+1) int (Psi'' - 1)|u|^{p+1}`, non-negative.
    pub term_nonlinear: f64,
}

pub fn virial_rate_decomposition(
    u: &ComplexField,
    w: &VirialWeight,
    params: &NonlinearityParams,
) -> Result<VirialRate> {
    w.check(u)?;
    let p = params.p();
    let spec = u.forward();
    let ux = spec.derivative(1).inverse();
    let uxx = spec.derivative(2).inverse();
    let dx = u.grid().dx();

    let (mut h2, mut h1, mut l2, mut nl) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..u.len() {
        let flat = w.d2[j] - 1.0;
        let z = u.values()[j];
        h2 += flat * uxx.values()[j].norm_sqr();
        h1 += w.d4[j] * ux.values()[j].norm_sqr();
        l2 += w.d6[j] * z.norm_sqr();
        nl += flat * abs_pow(z, p + 1.0);
    }
    let term_h2 = 8.0 * h2 * dx;
    let term_h1 = -6.0 * h1 * dx;
    let term_l2 = l2 * dx;
    let term_nonlinear = -2.0 * (p - 1.0) / (p + 1.0) * nl * dx;
    let a_r = term_h2 + term_h1 + term_l2 + term_nonlinear;

    let norms = FieldNorms {
        mass: u.l2_norm_sq(),
        h2_sq: spec.sobolev_seminorm_sq(2.0),
        lp1: u.lp_power(p + 1.0)?,
    };
    let four_k = 4.0 * norms.k(params);
    Ok(VirialRate {
        four_k,
        a_r,
        total: four_k + a_r,
        term_h2,
        term_h1,
        term_l2,
        term_nonlinear,
    })
}
