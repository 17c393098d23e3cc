//! Conserved quantities, variational functionals, scaling exponents and the
//! scale-invariant threshold products.
//!
//! Conventions: `M(u) = ||u||_2^2`,
//! `E(u) = 1/2 ||u_xx||_2^2 - ||u||_{p+1}^{p+1} / (p+1)`,
//! `S_w(u) = E(u) + w/2 M(u)` and
//! `K(u) = 2 ||u_xx||_2^2 - (p-1)/(2(p+1)) ||u||_{p+1}^{p+1}`.
//! All norms use the rectangle rule of [`crate::spectral`]; `||u_xx||_2^2` is
//! evaluated in Fourier space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground_state::GroundStateResult;
use crate::spectral::ComplexField;

/// Relative width of the band around a threshold in which a comparison is
/// reported as indeterminate.
pub const THRESHOLD_BAND: f64 = 1e-6;

/// Relative disagreement between the two sharp-constant formulas above which
/// a ground state is treated as unconverged.
pub const SHARP_CONSTANT_AGREEMENT: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityParams {
    p: f64,
    omega: f64,
    exploratory: bool,
}

impl NonlinearityParams {
    /// Mass-supercritical power `p > 9`, `omega = 1`.
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 9.0) {
            return Err(Error::param(format!(
                "nonlinearity power must satisfy p > 9, got {p}; use NonlinearityParams::exploratory for p <= 9"
            )));
        }
        if p < 9.01 {
            log::warn!("p = {p} is within 0.01 of 9; scale-invariant products are numerically fragile");
        }
        Ok(Self {
            p,
            omega: 1.0,
            exploratory: false,
        })
    }

    /// Any `p > 1`. Only for unit checks of degenerate cases.
    pub fn exploratory(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::param(format!("nonlinearity power must exceed 1, got {p}")));
        }
        Ok(Self {
            p,
            omega: 1.0,
            exploratory: true,
        })
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self> {
        let ok = if self.exploratory { omega >= 0.0 } else { omega > 0.0 };
        if !(omega.is_finite() && ok) {
            return Err(Error::param(format!("invalid frequency omega = {omega}")));
        }
        self.omega = omega;
        Ok(self)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn is_exploratory(&self) -> bool {
        self.exploratory
    }

    /// True when `|u|^{p-1} u` is a polynomial in `u, conj(u)`.
    pub fn is_odd_integer(&self) -> bool {
        self.p.fract() == 0.0 && (self.p as i64) % 2 == 1
    }

    /// `s_c = 1/2 - 4/(p-1)`, evaluated as `(p-9)/(2(p-1))`.
    pub fn s_c(&self) -> f64 {
        (self.p - 9.0) / (2.0 * (self.p - 1.0))
    }

    /// `(2 - s_c)/s_c`, evaluated as `(3p+5)/(p-9)` so that no cancellation
    /// occurs as `p -> 9`.
    pub fn threshold_exponent(&self) -> f64 {
        (3.0 * self.p + 5.0) / (self.p - 9.0)
    }

    pub fn strichartz(&self) -> StrichartzExponents {
        scaling_exponents(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrichartzExponents {
    pub r: f64,
    pub q: f64,
    pub q1: f64,
    pub q2: f64,
}

impl StrichartzExponents {
    /// Residuals of the four admissibility relations, in the order
    /// `4/q + 1/r = 1/2`, `4/q1 + 1/r = 1/2 - s_c`, `4/q2 + 1/r = 1/2 + s_c`,
    /// `1/q1 + 1/q2 = (1 - 2/r)/4`.
    pub fn identity_residuals(&self, params: &NonlinearityParams) -> [f64; 4] {
        let s_c = params.s_c();
        [
            4.0 / self.q + 1.0 / self.r - 0.5,
            4.0 / self.q1 + 1.0 / self.r - (0.5 - s_c),
            4.0 / self.q2 + 1.0 / self.r - (0.5 + s_c),
            1.0 / self.q1 + 1.0 / self.q2 - (1.0 - 2.0 / self.r) / 4.0,
        ]
    }
}

pub fn scaling_exponents(params: &NonlinearityParams) -> StrichartzExponents {
    let p = params.p();
    StrichartzExponents {
        r: p + 1.0,
        q: 8.0 * (p + 1.0) / (p - 1.0),
        q1: 4.0 * (p - 1.0) * (p + 1.0) / (3.0 * p + 5.0),
        q2: 4.0 * (p - 1.0) * (p + 1.0) / (p * p - 5.0 * p - 4.0),
    }
}

/// The three quadratures every functional is built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldNorms {
    /// `||u||_2^2`
    pub mass: f64,
    /// `||u_xx||_2^2`
    pub h2_sq: f64,
    /// `||u||_{p+1}^{p+1}`
    pub lp1: f64,
}

impl FieldNorms {
    pub fn of(f: &ComplexField, params: &NonlinearityParams) -> Self {
        Self {
            mass: f.l2_norm_sq(),
            h2_sq: f.forward().sobolev_seminorm_sq(2.0),
            lp1: f.lp_power(params.p() + 1.0).expect("p + 1 > 1"),
        }
    }

    pub fn energy(&self, params: &NonlinearityParams) -> f64 {
        0.5 * self.h2_sq - self.lp1 / (params.p() + 1.0)
    }

    pub fn action(&self, params: &NonlinearityParams) -> f64 {
        self.energy(params) + 0.5 * params.omega() * self.mass
    }

    pub fn k(&self, params: &NonlinearityParams) -> f64 {
        let p = params.p();
        2.0 * self.h2_sq - (p - 1.0) / (2.0 * (p + 1.0)) * self.lp1
    }

    /// `||u||_2^{(2-s_c)/s_c} ||u_xx||_2`.
    pub fn grad_product(&self, params: &NonlinearityParams) -> f64 {
        let alpha = params.threshold_exponent();
        if self.mass == 0.0 || self.h2_sq == 0.0 {
            return 0.0;
        }
        (0.5 * alpha * self.mass.ln() + 0.5 * self.h2_sq.ln()).exp()
    }

    /// `M(u)^{(2-s_c)/s_c} E(u)`, signed like `E(u)`.
    pub fn me_product(&self, params: &NonlinearityParams) -> f64 {
        let alpha = params.threshold_exponent();
        let e = self.energy(params);
        if self.mass == 0.0 || e == 0.0 {
            return 0.0;
        }
        e.signum() * (alpha * self.mass.ln() + e.abs().ln()).exp()
    }

    /// `||u||_{p+1}^{p+1} / (||u||_2^{(3p+5)/4} ||u_xx||_2^{(p-1)/4})`.
    pub fn gn_ratio(&self, params: &NonlinearityParams) -> Result<f64> {
        if self.mass == 0.0 || self.h2_sq == 0.0 {
            return Err(Error::ZeroField);
        }
        let p = params.p();
        let log = self.lp1.ln()
            - (3.0 * p + 5.0) / 8.0 * self.mass.ln()
            - (p - 1.0) / 8.0 * self.h2_sq.ln();
        Ok(log.exp())
    }
}

pub fn mass(f: &ComplexField) -> f64 {
    f.l2_norm_sq()
}

pub fn energy(f: &ComplexField, params: &NonlinearityParams) -> f64 {
    FieldNorms::of(f, params).energy(params)
}

pub fn action(f: &ComplexField, params: &NonlinearityParams) -> f64 {
    FieldNorms::of(f, params).action(params)
}

pub fn k_functional(f: &ComplexField, params: &NonlinearityParams) -> f64 {
    FieldNorms::of(f, params).k(params)
}

/// `|E(f) - (p-9)/(2(p-1)) ||f_xx||^2 - 2/(p-1) K(f)|`.
pub fn energy_k_decomposition_check(f: &ComplexField, params: &NonlinearityParams) -> f64 {
    let n = FieldNorms::of(f, params);
    let p = params.p();
    let rhs = (p - 9.0) / (2.0 * (p - 1.0)) * n.h2_sq + 2.0 / (p - 1.0) * n.k(params);
    (n.energy(params) - rhs).abs()
}

/// Lower and upper energy bounds `(p-9)/(2(p-1)) ||f_xx||^2 <= E(f) <= 1/2 ||f_xx||^2`,
/// valid whenever `K(f) >= 0`.
pub fn energy_bounds(f: &ComplexField, params: &NonlinearityParams) -> (f64, f64) {
    let n = FieldNorms::of(f, params);
    let p = params.p();
    ((p - 9.0) / (2.0 * (p - 1.0)) * n.h2_sq, 0.5 * n.h2_sq)
}

/// `1 - (1 - delta')^{(p-9)/4}`.
pub fn coercivity_delta(delta_prime: f64, params: &NonlinearityParams) -> Result<f64> {
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(Error::param(format!("delta' must lie in (0, 1), got {delta_prime}")));
    }
    let e = (params.p() - 9.0) / 4.0;
    // 1 - exp(e ln(1 - d)), computed without cancellation for small d
    Ok(-(e * (-delta_prime).ln_1p()).exp_m1())
}

pub fn gn_ratio(f: &ComplexField, params: &NonlinearityParams) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::ZeroField);
    }
    FieldNorms::of(f, params).gn_ratio(params)
}

/// Both closed forms of the sharp Gagliardo-Nirenberg constant built from a
/// ground-state profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpConstant {
    /// `||Q||_{p+1}^{p+1} / (||Q_xx||^{(p-1)/4} ||Q||^{(3p+5)/4})`
    pub ratio_form: f64,
    /// `4(p+1)/(p-1) (||Q_xx|| ||Q||^{(2-s_c)/s_c})^{-(p-9)/4}`
    pub closed_form: f64,
    pub relative_gap: f64,
}

impl SharpConstant {
    pub fn from_norms(norms: &FieldNorms, params: &NonlinearityParams) -> Result<Self> {
        let p = params.p();
        let ratio_form = norms.gn_ratio(params)?;
        let g = norms.grad_product(params);
        let closed_form = 4.0 * (p + 1.0) / (p - 1.0) * (-(p - 9.0) / 4.0 * g.ln()).exp();
        let relative_gap = (ratio_form - closed_form).abs() / closed_form.abs();
        Ok(Self {
            ratio_form,
            closed_form,
            relative_gap,
        })
    }

    pub fn value(&self) -> f64 {
        0.5 * (self.ratio_form + self.closed_form)
    }

    pub fn agrees(&self) -> bool {
        self.relative_gap <= SHARP_CONSTANT_AGREEMENT
    }
}

/// Sharp constant from a ground state; errors if the two closed forms
/// disagree beyond [`SHARP_CONSTANT_AGREEMENT`].
pub fn sharp_constant_from_q(q: &GroundStateResult) -> Result<f64> {
    let norms = FieldNorms::of(&q.profile, &q.params);
    let sc = SharpConstant::from_norms(&norms, &q.params)?;
    if !sc.agrees() {
        return Err(Error::NotConverged(format!(
            "sharp-constant forms disagree: {} vs {} (relative gap {:.3e})",
            sc.ratio_form, sc.closed_form, sc.relative_gap
        )));
    }
    Ok(sc.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    BelowBoth,
    AboveGrad,
    AboveEnergy,
    Indeterminate,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::BelowBoth => "BelowBoth",
            Classification::AboveGrad => "AboveGrad",
            Classification::AboveEnergy => "AboveEnergy",
            Classification::Indeterminate => "Indeterminate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub mass: f64,
    pub energy: f64,
    pub me_product: f64,
    pub grad_product: f64,
    pub me_threshold: f64,
    pub grad_threshold: f64,
    pub classification: Classification,
}

impl ThresholdReport {
    pub fn me_ratio(&self) -> f64 {
        self.me_product / self.me_threshold
    }

    pub fn grad_ratio(&self) -> f64 {
        self.grad_product / self.grad_threshold
    }
}

pub fn classify(me: f64, grad: f64, me_threshold: f64, grad_threshold: f64) -> Classification {
    let near = |a: f64, b: f64| (a - b).abs() <= THRESHOLD_BAND * b.abs();
    if near(me, me_threshold) || near(grad, grad_threshold) {
        Classification::Indeterminate
    } else if grad > grad_threshold {
        Classification::AboveGrad
    } else if me > me_threshold {
        Classification::AboveEnergy
    } else {
        Classification::BelowBoth
    }
}

pub fn threshold_report_against(
    u0: &ComplexField,
    params: &NonlinearityParams,
    me_threshold: f64,
    grad_threshold: f64,
) -> ThresholdReport {
    let n = FieldNorms::of(u0, params);
    let me = n.me_product(params);
    let grad = n.grad_product(params);
    ThresholdReport {
        mass: n.mass,
        energy: n.energy(params),
        me_product: me,
        grad_product: grad,
        me_threshold,
        grad_threshold,
        classification: classify(me, grad, me_threshold, grad_threshold),
    }
}

pub fn threshold_report(u0: &ComplexField, q: &GroundStateResult) -> ThresholdReport {
    threshold_report_against(
        u0,
        &q.params,
        q.derived.me_threshold,
        q.derived.grad_threshold,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn p13() -> NonlinearityParams {
        NonlinearityParams::new(13.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(NonlinearityParams::new(9.0).is_err());
        assert!(NonlinearityParams::new(5.0).is_err());
        assert!(NonlinearityParams::exploratory(5.0).is_ok());
        assert!(NonlinearityParams::exploratory(1.0).is_err());
        assert!(p13().with_omega(0.0).is_err());
        assert!(NonlinearityParams::exploratory(13.0).unwrap().with_omega(0.0).is_ok());
        assert!((p13().s_c() - (0.5 - 4.0 / 12.0)).abs() < 1e-15);
        assert!(p13().is_odd_integer());
        assert!(!NonlinearityParams::new(12.0).unwrap().is_odd_integer());
        assert!(!NonlinearityParams::new(12.5).unwrap().is_odd_integer());
    }

    #[test]
    fn mass_of_constant_and_plane_wave() {
        let g = Grid::new(64, 10.0).unwrap();
        assert!((mass(&ComplexField::from_real_fn(&g, |_| 1.0)) - 10.0).abs() < 1e-12);
        let xi = 2.0 * PI * 3.0 / 10.0;
        let w = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, xi * x));
        assert!((mass(&w) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn energy_of_plane_wave() {
        let g = Grid::new(64, 10.0).unwrap();
        let xi = 2.0 * PI * 2.0 / 10.0;
        let w = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, xi * x));
        let expected = xi.powi(4) * 10.0 / 2.0 - 10.0 / 14.0;
        assert!((energy(&w, &p13()) - expected).abs() < 1e-10);
        let zero = ComplexField::zeros(&g);
        assert_eq!(energy(&zero, &p13()), 0.0);
        assert_eq!(action(&zero, &p13()), 0.0);
        assert_eq!(k_functional(&zero, &p13()), 0.0);
    }

    #[test]
    fn k_dominated_by_dispersion_for_fast_mode() {
        let g = Grid::new(64, 10.0).unwrap();
        let xi = 2.0 * PI * 20.0 / 10.0;
        let w = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, xi * x));
        let k = k_functional(&w, &p13());
        assert!((k / (2.0 * xi.powi(4) * 10.0) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn action_arithmetic() {
        let g = Grid::new(64, 10.0).unwrap();
        let one = ComplexField::from_real_fn(&g, |_| 1.0);
        let params = p13().with_omega(2.0).unwrap();
        assert!((action(&one, &params) - (-10.0 / 14.0 + 10.0)).abs() < 1e-12);
        let hatch = NonlinearityParams::exploratory(13.0).unwrap().with_omega(0.0).unwrap();
        let f = ComplexField::gaussian(&g, 1.3, 0.8);
        assert_eq!(action(&f, &hatch), energy(&f, &hatch));
    }

    #[test]
    fn coercivity_delta_values() {
        assert!((coercivity_delta(0.5, &p13()).unwrap() - 0.5).abs() < 1e-15);
        let tiny = coercivity_delta(1e-12, &p13()).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-11);
        let near_one = coercivity_delta(1.0 - 1e-12, &p13()).unwrap();
        assert!(near_one > 1.0 - 1e-11 && near_one < 1.0);
        assert!(coercivity_delta(0.0, &p13()).is_err());
        assert!(coercivity_delta(1.0, &p13()).is_err());
    }

    #[test]
    fn strichartz_numbers() {
        let e = scaling_exponents(&NonlinearityParams::exploratory(9.0).unwrap());
        assert_eq!((e.r, e.q, e.q1, e.q2), (10.0, 10.0, 10.0, 10.0));
        let e = scaling_exponents(&NonlinearityParams::new(17.0).unwrap());
        assert_eq!(e.r, 18.0);
        assert_eq!(e.q, 9.0);
        assert!((e.q1 - 144.0 / 7.0).abs() < 1e-12);
        assert!((e.q2 - 5.76).abs() < 1e-12);
    }

    #[test]
    fn gn_ratio_rejects_zero() {
        let g = Grid::new(32, 10.0).unwrap();
        assert!(matches!(gn_ratio(&ComplexField::zeros(&g), &p13()), Err(Error::ZeroField)));
    }

    #[test]
    fn classification_rules() {
        assert_eq!(classify(0.5, 0.5, 1.0, 1.0), Classification::BelowBoth);
        assert_eq!(classify(0.5, 1.5, 1.0, 1.0), Classification::AboveGrad);
        assert_eq!(classify(1.5, 0.5, 1.0, 1.0), Classification::AboveEnergy);
        assert_eq!(classify(1.0 + 1e-8, 0.5, 1.0, 1.0), Classification::Indeterminate);
        assert_eq!(classify(0.2, 1.0 - 1e-7, 1.0, 1.0), Classification::Indeterminate);
    }

    fn smooth_random_field(grid: &Grid, coeffs: &[(f64, f64, f64)]) -> ComplexField {
        ComplexField::from_fn(grid, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &(a, b, w))| {
                    let env = (-(x - 3.0 * w).powi(2) / (1.0 + k as f64)).exp();
                    Complex64::new(a, b) * env
                })
                .sum()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn decomposition_identity_holds(coeffs in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -1.0..1.0f64), 1..5), p in 9.5..25.0f64) {
            let g = Grid::new(256, 40.0).unwrap();
            let params = NonlinearityParams::new(p).unwrap();
            let f = smooth_random_field(&g, &coeffs);
            let e = energy(&f, &params);
            prop_assert!(energy_k_decomposition_check(&f, &params) < 1e-10 * (1.0 + e.abs()));
        }

        #[test]
        fn gn_ratio_amplitude_invariant(coeffs in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -1.0..1.0f64), 1..5), c in 0.05..20.0f64, phase in 0.0..std::f64::consts::TAU) {
            let g = Grid::new(256, 40.0).unwrap();
            let params = p13();
            let f = smooth_random_field(&g, &coeffs);
            prop_assume!(!f.is_zero());
            let a = gn_ratio(&f, &params).unwrap();
            let b = gn_ratio(&f.scaled(Complex64::from_polar(c, phase)), &params).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }

        #[test]
        fn gn_ratio_translation_invariant(coeffs in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -1.0..1.0f64), 1..5), shift in -60i64..60) {
            let g = Grid::new(256, 40.0).unwrap();
            let params = p13();
            let f = smooth_random_field(&g, &coeffs);
            prop_assume!(!f.is_zero());
            let a = gn_ratio(&f, &params).unwrap();
            let b = gn_ratio(&f.shifted(shift), &params).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs());
        }

        #[test]
        fn strichartz_identities(p in 9.0001..30.0f64) {
            let params = NonlinearityParams::new(p).unwrap();
            for r in params.strichartz().identity_residuals(&params) {
                prop_assert!(r.abs() < 1e-12);
            }
        }
    }
}
