//! Time integration of `i u_t - u_xxxx + |u|^{p-1} u = 0` by Strang
//! splitting.
//!
//! Both sub-flows are solved exactly: the linear flow is the Fourier
//! multiplier `exp(-i t xi^4)` and the nonlinear flow `i u_t = -|u|^{p-1} u`
//! is the pointwise phase rotation `u -> exp(i t |u|^{p-1}) u`. A step is
//! half nonlinear, full linear, half nonlinear. Consecutive half nonlinear
//! phases between recording points are fused, which is exact because the
//! phase flow preserves `|u|` pointwise.
//!
//! Time reversal: if `u(t)` solves the equation so does `conj(u(-t))`. The
//! backward flow is therefore `conj -> forward -> conj`, see
//! [`evolve_backward`]. Each Strang step with `-dt` is also the exact inverse
//! of the step with `dt`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::virial::{virial_m, virial_rate_decomposition, VirialWeight};
use crate::error::{Error, Result};
use crate::functionals::{FieldNorms, NonlinearityParams};
use crate::spectral::{abs_pow, ComplexField, Grid};

/// Mass in `|x| >= TAIL_FRACTION * L` counts as tail mass.
pub const TAIL_FRACTION: f64 = 0.4;

/// Default guard: abort once `sup |u|` exceeds this multiple of its initial value.
pub const DEFAULT_GUARD_FACTOR: f64 = 1e6;

/// Nonlinear phase per step above which an accuracy warning is logged.
pub const PHASE_ADVISORY: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    /// `None` selects the 2/3 rule for odd integer `p` and no filtering otherwise.
    pub dealias: Option<bool>,
    /// Absolute sup-norm guard; `None` means `DEFAULT_GUARD_FACTOR * sup|u0|`.
    pub blowup_guard: Option<f64>,
    /// Multiplies the nonlinearity; `0` gives the free flow.
    pub coupling: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 1.0,
            record_every: 100,
            dealias: None,
            blowup_guard: None,
            coupling: 1.0,
        }
    }
}

impl EvolveConfig {
    pub fn new(dt: f64, t_final: f64, record_every: usize) -> Self {
        Self {
            dt,
            t_final,
            record_every,
            ..Self::default()
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn validate(&self, initial_sup: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) {
            return Err(Error::param(format!(
                "t_final = {} must be at least dt = {}",
                self.t_final, self.dt
            )));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every must be at least 1"));
        }
        let steps = self.t_final / self.dt;
        if (steps - steps.round()).abs() > 1e-6 * steps {
            log::warn!(
                "t_final / dt = {steps} is not an integer; running {} steps",
                self.n_steps()
            );
        }
        if let Some(g) = self.blowup_guard {
            if !(g > initial_sup) {
                return Err(Error::param(format!(
                    "blow-up guard {g} must exceed the initial sup norm {initial_sup}"
                )));
            }
        }
        Ok(())
    }

    pub fn dealias_for(&self, params: &NonlinearityParams) -> bool {
        match self.dealias {
            Some(d) => d,
            None => {
                let on = params.is_odd_integer();
                if !on {
                    log::warn!(
                        "p = {} is not an odd integer; |u|^(p-1)u is not band-limited and no dealiasing is applied",
                        params.p()
                    );
                }
                on
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalStatus {
    Completed,
    BlowupGuard,
    NonFinite,
}

/// Which optional monitors to evaluate at recording points.
#[derive(Clone, Debug, Default)]
pub struct Monitors {
    pub virial: Option<VirialWeight>,
    /// Keep a copy of the field every this many records (`None`: keep none).
    pub snapshot_every: Option<usize>,
}

impl Monitors {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_snapshots(every: usize) -> Self {
        Self {
            virial: None,
            snapshot_every: Some(every.max(1)),
        }
    }

    pub fn virial(mut self, weight: VirialWeight) -> Self {
        self.virial = Some(weight);
        self
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub field: ComplexField,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub mass_series: Vec<f64>,
    pub energy_series: Vec<f64>,
    /// `||u_xx||_2`
    pub h2_series: Vec<f64>,
    /// `||u||_{p+1}^{p+1}`
    pub lp1_series: Vec<f64>,
    pub sup_series: Vec<f64>,
    pub k_series: Vec<f64>,
    /// `M_R(t)`; empty unless the virial monitor is on.
    pub virial_series: Vec<f64>,
    /// `4K + A_R` at the same times; empty unless the virial monitor is on.
    pub virial_rate_series: Vec<f64>,
    /// Running trapezoid integral of `||u(t)||_{L^r}^{q1}`.
    pub xnorm_accum: Vec<f64>,
    /// Mass in `|x| >= TAIL_FRACTION * L`.
    pub tail_mass_series: Vec<f64>,
    pub terminal_status: Option<TerminalStatus>,
    pub p: f64,
    pub dt: f64,
    pub steps_taken: usize,
    #[serde(skip)]
    pub snapshots: Vec<Snapshot>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn status(&self) -> TerminalStatus {
        self.terminal_status.unwrap_or(TerminalStatus::Completed)
    }

    fn max_relative_drift(series: &[f64]) -> f64 {
        let Some(&first) = series.first() else {
            return 0.0;
        };
        let scale = first.abs().max(f64::MIN_POSITIVE);
        series.iter().fold(0.0, |m, v| m.max((v - first).abs() / scale))
    }

    /// `max_t |M(t) - M(0)| / M(0)` over recorded times.
    pub fn mass_drift(&self) -> f64 {
        Self::max_relative_drift(&self.mass_series)
    }

    /// `max_t |E(t) - E(0)| / |E(0)|` over recorded times.
    pub fn energy_drift(&self) -> f64 {
        Self::max_relative_drift(&self.energy_series)
    }

    /// `||u(t)||_{L^r}` with `r = p + 1` at each recorded time.
    pub fn lr_series(&self) -> Vec<f64> {
        let r = self.p + 1.0;
        self.lp1_series.iter().map(|v| v.powf(1.0 / r)).collect()
    }

    /// `||u||_2^{(2-s_c)/s_c} ||u_xx||_2` along the trajectory.
    pub fn grad_product_series(&self, params: &NonlinearityParams) -> Vec<f64> {
        self.mass_series
            .iter()
            .zip(&self.h2_series)
            .zip(&self.lp1_series)
            .map(|((&mass, &h2), &lp1)| {
                FieldNorms {
                    mass,
                    h2_sq: h2 * h2,
                    lp1,
                }
                .grad_product(params)
            })
            .collect()
    }

    /// Index of the first sample at or after `t`.
    pub fn index_at(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s < t)
    }
}

/// Multiply every Fourier coefficient by `exp(-i t xi^4)`.
pub fn linear_propagate(f: &ComplexField, t: f64) -> ComplexField {
    if t == 0.0 {
        return f.clone();
    }
    f.forward()
        .apply(|xi| Complex64::from_polar(1.0, -t * xi.powi(4)))
        .inverse()
}

/// Exact flow of `i u_t = -|u|^{p-1} u` over `dt`.
pub fn nonlinear_phase(f: &ComplexField, dt: f64, params: &NonlinearityParams) -> Result<ComplexField> {
    let mut out = f.clone();
    let mut scratch = 0.0;
    rotate_phase(out.values_mut(), dt, params.p(), &mut scratch);
    if !out.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

/// One Strang step. Negative `dt` runs the inverse step.
pub fn strang_step(
    f: &ComplexField,
    dt: f64,
    params: &NonlinearityParams,
    dealias: bool,
) -> Result<ComplexField> {
    let mut stepper = Stepper::new(f.grid(), params, dt, dealias, 1.0);
    let mut out = f.clone();
    stepper.run(out.values_mut(), 1, f64::INFINITY)?;
    Ok(out)
}

/// Rotates in place; stores `max |u|^2` (NaN if any sample is non-finite).
fn rotate_phase(u: &mut [Complex64], theta_scale: f64, p: f64, max_sq: &mut f64) {
    let e = p - 1.0;
    let mut m: f64 = 0.0;
    let mut sum = 0.0;
    for z in u.iter_mut() {
        let n2 = z.norm_sqr();
        m = m.max(n2);
        sum += n2;
        let theta = theta_scale * abs_pow(*z, e);
        *z *= Complex64::from_polar(1.0, theta);
    }
    *max_sq = if sum.is_finite() { m } else { f64::NAN };
}

/// Reusable Strang stepper holding the linear multiplier and FFT scratch.
pub struct Stepper {
    grid: Grid,
    p: f64,
    dt: f64,
    coupling: f64,
    multiplier: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: &Grid, params: &NonlinearityParams, dt: f64, dealias: bool, coupling: f64) -> Self {
        let n = grid.n_points();
        // unnormalized FFT pair: fold 1/N into the multiplier
        let norm = 1.0 / n as f64;
        let cutoff = n as f64 / 3.0;
        let multiplier = (0..n)
            .map(|k| {
                let xi = grid.wavenumbers()[k];
                let keep = !dealias || (grid.frequency_index(k).abs() as f64) < cutoff;
                if keep {
                    Complex64::from_polar(norm, -dt * xi.powi(4))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            p: params.p(),
            dt,
            coupling,
            multiplier,
            scratch: grid.scratch(),
        }
    }

    fn linear(&mut self, u: &mut [Complex64]) {
        self.grid.fft_in_place(u, &mut self.scratch);
        u.iter_mut().zip(&self.multiplier).for_each(|(z, m)| *z *= m);
        self.grid.ifft_in_place(u, &mut self.scratch);
    }

    fn phase(&self, u: &mut [Complex64], fraction: f64) -> f64 {
        let mut max_sq = 0.0;
        if self.coupling != 0.0 {
            rotate_phase(u, fraction * self.dt * self.coupling, self.p, &mut max_sq);
        } else {
            let sum: f64 = u.iter().map(|z| z.norm_sqr()).sum();
            max_sq = if sum.is_finite() {
                u.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
            } else {
                f64::NAN
            };
        }
        max_sq
    }

    /// Advance `steps` Strang steps from a synchronized state. Stops early
    /// (returning the number of completed steps and the status) when the sup
    /// norm exceeds `guard` or becomes non-finite.
    pub fn run(&mut self, u: &mut [Complex64], steps: usize, guard: f64) -> Result<(usize, TerminalStatus)> {
        if u.len() != self.grid.n_points() {
            return Err(Error::SizeMismatch {
                expected: self.grid.n_points(),
                actual: u.len(),
            });
        }
        if steps == 0 {
            return Ok((0, TerminalStatus::Completed));
        }
        let guard_sq = guard * guard;
        self.phase(u, 0.5);
        for s in 0..steps {
            self.linear(u);
            let last = s + 1 == steps;
            let max_sq = self.phase(u, if last { 0.5 } else { 1.0 });
            let status = if !max_sq.is_finite() {
                Some(TerminalStatus::NonFinite)
            } else if max_sq > guard_sq {
                Some(TerminalStatus::BlowupGuard)
            } else {
                None
            };
            if let Some(st) = status {
                if !last && st == TerminalStatus::BlowupGuard {
                    // undo the extra half phase so the state is synchronized
                    self.phase(u, -0.5);
                }
                return Ok((s + 1, st));
            }
        }
        Ok((steps, TerminalStatus::Completed))
    }
}

struct Recorder<'a> {
    params: NonlinearityParams,
    q1: f64,
    tail_radius: f64,
    monitors: &'a Monitors,
    record: TrajectoryRecord,
    prev_integrand: Option<f64>,
}

impl<'a> Recorder<'a> {
    fn push(&mut self, t: f64, u: &ComplexField) -> Result<()> {
        let n = FieldNorms::of(u, &self.params);
        let rec = &mut self.record;
        rec.times.push(t);
        rec.mass_series.push(n.mass);
        rec.energy_series.push(n.energy(&self.params));
        rec.h2_series.push(n.h2_sq.sqrt());
        rec.lp1_series.push(n.lp1);
        rec.sup_series.push(u.sup_norm());
        rec.k_series.push(n.k(&self.params));
        rec.tail_mass_series.push(u.tail_mass(self.tail_radius));

        let integrand = n.lp1.powf(self.q1 / (self.params.p() + 1.0));
        let accum = match (self.prev_integrand, rec.xnorm_accum.last(), rec.times.len()) {
            (Some(prev), Some(&acc), k) if k >= 2 => {
                acc + 0.5 * (prev + integrand) * (rec.times[k - 1] - rec.times[k - 2])
            }
            _ => 0.0,
        };
        rec.xnorm_accum.push(accum);
        self.prev_integrand = Some(integrand);

        if let Some(w) = &self.monitors.virial {
            rec.virial_series.push(virial_m(u, w)?);
            rec.virial_rate_series.push(virial_rate_decomposition(u, w, &self.params)?.total);
        }
        if let Some(every) = self.monitors.snapshot_every {
            if (rec.times.len() - 1).is_multiple_of(every) {
                rec.snapshots.push(Snapshot {
                    time: t,
                    field: u.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Integrate from `u0` to `config.t_final`, recording diagnostics every
/// `config.record_every` steps. Guard trips and non-finite states end the
/// run with the corresponding [`TerminalStatus`]; they are not errors.
pub fn evolve(
    u0: &ComplexField,
    params: &NonlinearityParams,
    config: &EvolveConfig,
    monitors: &Monitors,
) -> Result<TrajectoryRecord> {
    if !u0.is_finite() {
        return Err(Error::NonFinite);
    }
    let sup0 = u0.sup_norm();
    config.validate(sup0)?;
    if let Some(w) = &monitors.virial {
        if !w.grid().same_as(u0.grid()) {
            return Err(Error::param("virial weight built on a different grid"));
        }
    }
    let guard = config
        .blowup_guard
        .unwrap_or(DEFAULT_GUARD_FACTOR * sup0.max(f64::MIN_POSITIVE));
    let dealias = config.dealias_for(params);

    let phase_per_step = config.dt * config.coupling.abs() * sup0.powf(params.p() - 1.0);
    if phase_per_step > PHASE_ADVISORY {
        log::warn!(
            "nonlinear phase per step {phase_per_step:.3} rad exceeds {PHASE_ADVISORY}; splitting accuracy degrades"
        );
    }

    let grid = u0.grid().clone();
    let mut stepper = Stepper::new(&grid, params, config.dt, dealias, config.coupling);
    let mut recorder = Recorder {
        params: *params,
        q1: params.strichartz().q1,
        tail_radius: TAIL_FRACTION * grid.length(),
        monitors,
        record: TrajectoryRecord {
            p: params.p(),
            dt: config.dt,
            ..Default::default()
        },
        prev_integrand: None,
    };

    let mut u = u0.clone();
    recorder.push(0.0, &u)?;
    let total = config.n_steps();
    let mut done = 0;
    let mut status = TerminalStatus::Completed;
    while done < total {
        let chunk = config.record_every.min(total - done);
        let (taken, st) = stepper.run(u.values_mut(), chunk, guard)?;
        done += taken;
        status = st;
        if st == TerminalStatus::NonFinite {
            break;
        }
        recorder.push(done as f64 * config.dt, &u)?;
        if st != TerminalStatus::Completed {
            break;
        }
    }
    let mut record = recorder.record;
    record.terminal_status = Some(status);
    record.steps_taken = done;
    Ok(record)
}

/// Final state after `evolve`-equivalent stepping, without recording.
pub fn evolve_to(
    u0: &ComplexField,
    params: &NonlinearityParams,
    config: &EvolveConfig,
) -> Result<(ComplexField, TerminalStatus)> {
    let sup0 = u0.sup_norm();
    config.validate(sup0)?;
    let guard = config
        .blowup_guard
        .unwrap_or(DEFAULT_GUARD_FACTOR * sup0.max(f64::MIN_POSITIVE));
    let mut stepper = Stepper::new(
        u0.grid(),
        params,
        config.dt,
        config.dealias_for(params),
        config.coupling,
    );
    let mut u = u0.clone();
    let (_, status) = stepper.run(u.values_mut(), config.n_steps(), guard)?;
    Ok((u, status))
}

/// Backward flow over `config.t_final` via `u -> conj(S_T(conj(u)))`.
pub fn evolve_backward(
    u: &ComplexField,
    params: &NonlinearityParams,
    config: &EvolveConfig,
) -> Result<(ComplexField, TerminalStatus)> {
    let (v, status) = evolve_to(&u.conj(), params, config)?;
    Ok((v.conj(), status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p13() -> NonlinearityParams {
        NonlinearityParams::new(13.0).unwrap()
    }

    #[test]
    fn linear_flow_of_plane_wave() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let k = 3.0;
        let f = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, k * x));
        let t = 0.37;
        let out = linear_propagate(&f, t);
        let expect = f.scaled(Complex64::from_polar(1.0, -t * k.powi(4)));
        assert!(out.sup_distance(&expect).unwrap() < 1e-12);
        assert_eq!(linear_propagate(&f, 0.0).values(), f.values());
    }

    #[test]
    fn linear_flow_preserves_mass_and_group_law() {
        let g = Grid::new(256, 30.0).unwrap();
        let f = ComplexField::from_fn(&g, |x| Complex64::new((-x * x).exp(), 0.3 * (-(x - 1.0).powi(2)).exp()));
        let a = linear_propagate(&f, 0.8);
        assert!((a.l2_norm_sq() - f.l2_norm_sq()).abs() < 1e-12 * f.l2_norm_sq());
        let b = linear_propagate(&linear_propagate(&f, 0.3), 0.5);
        assert!(a.sup_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn nonlinear_phase_cases() {
        let g = Grid::new(32, 4.0).unwrap();
        let c = Complex64::new(0.9, 0.2);
        let f = ComplexField::from_fn(&g, |_| c);
        let dt = 0.01;
        let out = nonlinear_phase(&f, dt, &p13()).unwrap();
        let expect = c * Complex64::from_polar(1.0, dt * c.norm().powi(12));
        assert!((out.values()[0] - expect).norm() < 1e-15);
        let zero = ComplexField::zeros(&g);
        assert!(nonlinear_phase(&zero, dt, &p13()).unwrap().is_zero());
        let g2 = ComplexField::gaussian(&g, 1.2, 0.7);
        let out = nonlinear_phase(&g2, 0.3, &p13()).unwrap();
        for (a, b) in out.values().iter().zip(g2.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        let huge = ComplexField::from_fn(&g, |_| Complex64::new(1e30, 0.0));
        assert!(matches!(nonlinear_phase(&huge, dt, &p13()), Err(Error::NonFinite)));
    }

    #[test]
    fn zero_coupling_is_linear_flow() {
        let g = Grid::new(128, 20.0).unwrap();
        let f = ComplexField::gaussian(&g, 1.0, 1.0);
        let mut st = Stepper::new(&g, &p13(), 0.01, false, 0.0);
        let mut u = f.clone();
        st.run(u.values_mut(), 1, f64::INFINITY).unwrap();
        let lin = linear_propagate(&f, 0.01);
        assert!(u.sup_distance(&lin).unwrap() < 1e-14);
    }

    #[test]
    fn negative_step_inverts() {
        let g = Grid::new(256, 30.0).unwrap();
        let f = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0 * (-x * x / 2.0).exp(), 0.5 * x));
        let a = strang_step(&f, 0.01, &p13(), false).unwrap();
        let b = strang_step(&a, -0.01, &p13(), false).unwrap();
        assert!(b.sup_distance(&f).unwrap() < 1e-13);
    }

    #[test]
    fn guard_and_config_validation() {
        let g = Grid::new(64, 20.0).unwrap();
        let f = ComplexField::gaussian(&g, 1.0, 1.0);
        let mut cfg = EvolveConfig::new(1e-3, 0.1, 10);
        cfg.blowup_guard = Some(0.5);
        assert!(evolve(&f, &p13(), &cfg, &Monitors::none()).is_err());
        assert!(EvolveConfig::new(0.0, 1.0, 1).validate(1.0).is_err());
        assert!(EvolveConfig::new(0.1, 0.05, 1).validate(1.0).is_err());
        assert!(EvolveConfig::new(0.1, 1.0, 0).validate(1.0).is_err());

        // a tiny guard just above the initial sup trips almost immediately
        let big = ComplexField::gaussian(&g, 1.3, 1.0);
        let mut cfg = EvolveConfig::new(1e-3, 1.0, 10);
        cfg.blowup_guard = Some(1.3 * (1.0 + 1e-9));
        let rec = evolve(&big, &p13(), &cfg, &Monitors::none()).unwrap();
        assert!(matches!(
            rec.status(),
            TerminalStatus::BlowupGuard | TerminalStatus::Completed
        ));
        assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn record_series_aligned() {
        let g = Grid::new(128, 40.0).unwrap();
        let f = ComplexField::gaussian(&g, 0.5, 1.0);
        let cfg = EvolveConfig::new(1e-3, 0.05, 7);
        let rec = evolve(&f, &p13(), &cfg, &Monitors::with_snapshots(2)).unwrap();
        let n = rec.len();
        assert_eq!(n, 1 + 50usize.div_ceil(7));
        for s in [
            &rec.mass_series,
            &rec.energy_series,
            &rec.h2_series,
            &rec.lp1_series,
            &rec.sup_series,
            &rec.k_series,
            &rec.xnorm_accum,
            &rec.tail_mass_series,
        ] {
            assert_eq!(s.len(), n);
        }
        assert!(rec.virial_series.is_empty());
        assert_eq!(rec.snapshots.len(), n.div_ceil(2));
        assert_eq!(rec.status(), TerminalStatus::Completed);
        assert!((rec.times.last().unwrap() - 0.05).abs() < 1e-12);
    }
}
