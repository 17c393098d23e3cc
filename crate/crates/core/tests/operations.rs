//! Longer-running behaviour checks of the public operations.

use num_complex::Complex64;

use biharm_nls::diagnostics::decay::{dispersive_decay_fit, geometric_times, DEFAULT_WRAP_FRACTION};
use biharm_nls::diagnostics::tightness::h2_tail;
use biharm_nls::diagnostics::{
    dyadic_radii, scattering_profile, tightness_profile, virial_m, virial_rate_decomposition, xnorm_accumulate,
    VirialWeight,
};
use biharm_nls::evolution::{evolve, EvolveConfig, Monitors, Snapshot, TerminalStatus};
use biharm_nls::experiment::{convergence_study, run_sweep, Family, GridSpec, RunOutcome, SweepSpec, Verdict};
use biharm_nls::functionals::{Classification, FieldNorms, NonlinearityParams};
use biharm_nls::ground_state::{petviashvili_solve, GroundStateResult};
use biharm_nls::spectral::{ComplexField, Grid};

fn p13() -> NonlinearityParams {
    NonlinearityParams::new(13.0).unwrap()
}

fn q_on(n: usize, length: f64) -> GroundStateResult {
    petviashvili_solve(&p13(), &Grid::new(n, length).unwrap(), None, 1e-10, 2000).unwrap()
}

fn scaled(q: &GroundStateResult, c: f64) -> ComplexField {
    q.profile.scaled(Complex64::new(c, 0.0))
}

#[test]
fn strang_self_convergence_is_second_order() {
    // Second-order behaviour needs dt * xi^4 small on the modes carrying Q.
    let q = q_on(512, 100.0);
    let table = convergence_study(&scaled(&q, 0.5), &p13(), &EvolveConfig::new(2.5e-4, 1.0, 10), 3).unwrap();
    for r in &table.ratios {
        assert!((3.5..=4.5).contains(r), "{table:?}");
    }
    let order = table.fitted_order.unwrap();
    assert!((1.8..=2.2).contains(&order), "{table:?}");
}

#[test]
fn small_data_scatters_quickly() {
    let q = q_on(1024, 100.0);
    let cfg = EvolveConfig::new(1e-2, 50.0, 100);
    let rec = evolve(&scaled(&q, 0.01), &p13(), &cfg, &Monitors::with_snapshots(1)).unwrap();
    let prof = scattering_profile(&rec.snapshots).unwrap();
    assert!(prof.cauchy_increments.iter().all(|&d| d < 1e-6), "{:?}", prof.cauchy_increments);
    assert!(prof.cauchy_floor < 1e-6);
}

fn standing_wave_snapshots(q: &GroundStateResult, t_final: f64, n: usize) -> Vec<Snapshot> {
    (0..=n)
        .map(|k| {
            let t = t_final * k as f64 / n as f64;
            Snapshot {
                time: t,
                field: q.profile.scaled(Complex64::from_polar(1.0, t)),
            }
        })
        .collect()
}

#[test]
fn standing_wave_never_scatters() {
    let q = q_on(1024, 60.0);
    let prof = scattering_profile(&standing_wave_snapshots(&q, 20.0, 40)).unwrap();
    let norm = FieldNorms::of(&q.profile, &p13());
    let scale = (norm.mass + norm.h2_sq).sqrt();
    assert!(prof.cauchy_floor > 0.1 * scale, "{} vs {scale}", prof.cauchy_floor);

    // Over a short window the computed flow stays close to e^{it}Q (Q is
    // linearly unstable, so the window and dt are kept small) and its X-norm
    // grows like T^{1/q1} without saturating.
    let t_final = 1.0;
    let rec = evolve(&q.profile, &p13(), &EvolveConfig::new(1e-4, t_final, 500), &Monitors::none()).unwrap();
    let x = xnorm_accumulate(&rec).unwrap();
    let q1 = p13().strichartz().q1;
    let lr = norm.lp1.powf(1.0 / 14.0);
    let expect = lr * t_final.powf(1.0 / q1);
    assert!((x.value - expect).abs() < 1e-4 * expect, "{} vs {expect}", x.value);
    assert!(!x.saturated);
}

#[test]
fn tightness_of_standing_wave_and_free_gaussian() {
    let q = q_on(1024, 60.0);
    let snaps = standing_wave_snapshots(&q, 5.0, 10);
    let radii = dyadic_radii(q.grid());
    let prof = tightness_profile(&snaps, &radii);
    for (r, s) in radii.iter().zip(&prof.sup_tail) {
        let tail_q = h2_tail(&q.profile, *r);
        assert!((s - tail_q).abs() <= 1e-12 * (1.0 + tail_q), "R = {r}");
    }

    let g = Grid::new(4096, 400.0).unwrap();
    let u0 = ComplexField::gaussian(&g, 1.0, 1.0);
    let free = EvolveConfig {
        coupling: 0.0,
        ..EvolveConfig::new(1e-2, 20.0, 100)
    };
    let rec = evolve(&u0, &p13(), &free, &Monitors::with_snapshots(1)).unwrap();
    let total = u0.l2_norm_sq() + u0.derivative(2).l2_norm_sq();
    let prof = tightness_profile(&rec.snapshots, &[16.0]);
    assert!(h2_tail(&u0, 16.0) < 1e-20);
    assert!(prof.sup_tail[0] > 0.5 * total, "{} of {total}", prof.sup_tail[0]);
}

#[test]
fn spike_decays_at_quarter_rate_before_wrapping() {
    let g = Grid::new(1024, 400.0).unwrap();
    let mut u0 = ComplexField::zeros(&g);
    u0.values_mut()[512] = Complex64::new(1.0, 0.0);
    let fit = dispersive_decay_fit(&u0, &geometric_times(1e-4, 1e-1, 20), DEFAULT_WRAP_FRACTION).unwrap();
    assert!((fit.exponent + 0.25).abs() < 0.05, "{fit:?}");
    assert!(fit.truncated_at.is_some());
}

#[test]
fn virial_identity_with_nontrivial_remainder() {
    let g = Grid::new(1024, 60.0).unwrap();
    let params = p13();
    let w = VirialWeight::new(&g, 4.0).unwrap();
    let u0 = ComplexField::from_fn(&g, |x| Complex64::from_polar(0.8 * (-(x - 1.0).powi(2) / 32.0).exp(), 0.4 * x));
    let dt = 1e-4;
    let rec = evolve(&u0, &params, &EvolveConfig::new(dt, 0.5, 10), &Monitors::none().virial(w.clone())).unwrap();
    let h = 10.0 * dt;
    for k in 1..rec.len() - 1 {
        let fd = (rec.virial_series[k + 1] - rec.virial_series[k - 1]) / (2.0 * h);
        let rate = rec.virial_rate_series[k];
        assert!((fd - rate).abs() < 1e-4 * rate.abs().max(1.0), "t = {}: {fd} vs {rate}", rec.times[k]);
    }
    let r = virial_rate_decomposition(&u0, &w, &params).unwrap();
    assert!(r.a_r.abs() > 1e-2 * r.four_k.abs(), "{r:?}");
    assert!(r.term_nonlinear >= 0.0);
}

#[test]
fn remainder_of_compactly_supported_field() {
    let g = Grid::new(2048, 200.0).unwrap();
    let w = VirialWeight::new(&g, 40.0).unwrap();
    let u = ComplexField::from_fn(&g, |x| Complex64::from_polar((-x * x / 2.0).exp(), 0.3 * x));
    assert!(u.tail_mass(w.radius()) < 1e-12);
    let r = virial_rate_decomposition(&u, &w, &p13()).unwrap();
    assert!(r.term_h2.abs() < 1e-10 && r.term_nonlinear.abs() < 1e-10, "{r:?}");
    let h2 = u.l2_norm_sq() + u.derivative(2).l2_norm_sq();
    let bound = (w.radius().powi(-2) + w.radius().powi(-4)) * h2;
    assert!((r.term_h1 + r.term_l2).abs() <= bound, "{r:?}");
    let m = virial_m(&u, &w).unwrap();
    assert!(m.abs() <= 2.0 * w.radius() * u.l2_norm() * u.derivative(1).l2_norm() * (1.0 + 1e-10));
}

fn small_spec(family: Family) -> SweepSpec {
    SweepSpec {
        grid: GridSpec {
            n_points: 1024,
            length: 80.0,
        },
        family,
        evolve: EvolveConfig::new(5e-3, 2.0, 10),
        ..SweepSpec::default()
    }
}

#[test]
fn sweep_at_threshold_is_indeterminate_and_not_scattering() {
    let spec = small_spec(Family::ScaledGroundState { c: vec![1.0] });
    let result = run_sweep(&spec, 1).unwrap();
    let s = result.outcomes[0].summary().unwrap();
    assert_eq!(s.threshold.classification, Classification::Indeterminate);
    assert_ne!(s.verdict, Verdict::ScatterProxy);
}

#[test]
fn sweep_below_threshold_classifies_below_both() {
    let spec = small_spec(Family::ScaledGroundState {
        c: vec![0.3, 0.5, 0.7, 0.9],
    });
    let result = run_sweep(&spec, 2).unwrap();
    assert_eq!(result.n_failed(), 0);
    for o in &result.outcomes {
        let s = o.summary().unwrap();
        assert_eq!(s.threshold.classification, Classification::BelowBoth, "{}", s.input);
        assert_eq!(s.metrics.terminal_status, TerminalStatus::Completed);
        if s.verdict == Verdict::ScatterProxy {
            assert!(s.metrics.saturated && s.metrics.cauchy_floor < spec.classify.cauchy_threshold);
            assert!(s.metrics.max_grad_ratio < 1.0);
        }
    }
    let indices: Vec<usize> = result.outcomes.iter().map(RunOutcome::index).collect();
    assert_eq!(indices, vec![0, 1, 2, 3]);
}

#[test]
fn failing_member_does_not_abort_sweep() {
    let mut spec = small_spec(Family::ScaledGroundState { c: vec![0.3, 0.9] });
    // A guard below sup |0.9 Q| is rejected for that member only.
    let q = q_on(1024, 80.0);
    spec.evolve.blowup_guard = Some(0.5 * (0.3 + 0.9) * q.profile.sup_norm());
    let result = run_sweep(&spec, 2).unwrap();
    assert!(matches!(result.outcomes[0], RunOutcome::Completed(_)));
    assert!(matches!(result.outcomes[1], RunOutcome::Failed(_)));
    assert_eq!(result.n_failed(), 1);
    let table = result.phase_table_csv("c").unwrap();
    assert!(table.lines().nth(2).unwrap().ends_with(",Failed"), "{table}");
}

#[test]
fn empty_family_is_rejected() {
    let spec = small_spec(Family::ScaledGroundState { c: vec![] });
    assert!(run_sweep(&spec, 1).is_err());
}
