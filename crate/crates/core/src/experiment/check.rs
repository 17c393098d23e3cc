//! The invariant suite behind the `check` subcommand: certify a ground state
//! and run quick consistency checks of every layer built on it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::cutoff::psi;
use crate::diagnostics::{virial_m, VirialWeight};
use crate::error::Result;
use crate::evolution::{evolve, EvolveConfig, Monitors};
use crate::functionals::{FieldNorms, NonlinearityParams, SharpConstant};
use crate::ground_state::{petviashvili_solve, GroundStateResult};
use crate::spectral::Grid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckItem {
    fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value.abs() < tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub p: f64,
    pub n_points: usize,
    pub length: f64,
    pub iterations: usize,
    pub checks: Vec<CheckItem>,
    pub all_passed: bool,
}

fn ground_state_checks(q: &GroundStateResult, out: &mut Vec<CheckItem>) -> Result<()> {
    let params = &q.params;
    let norms = FieldNorms::of(&q.profile, params);
    let ir = &q.identity_residuals;
    out.push(CheckItem {
        name: "ground_state_converged".into(),
        value: q.iterations as f64,
        tolerance: f64::NAN,
        passed: q.converged,
    });
    out.push(CheckItem::below("pde_residual_sup", q.residual_linf, 1e-9));
    out.push(CheckItem::below("energy_identity", ir.energy_identity, 1e-6));
    out.push(CheckItem::below("pohozaev_identity", ir.pohozaev, 1e-6));
    out.push(CheckItem::below("lp1_h2_consequence", ir.consequence, 1e-6));

    let sharp = SharpConstant::from_norms(&norms, params)?;
    out.push(CheckItem::below("sharp_constant_forms", sharp.relative_gap, 1e-5));
    let ratio = norms.gn_ratio(params)?;
    out.push(CheckItem::below(
        "gn_ratio_of_q",
        (ratio - q.derived.c_gn).abs() / q.derived.c_gn,
        1e-4,
    ));
    out.push(CheckItem::below("k_of_q", norms.k(params) / norms.h2_sq, 1e-6));
    let e_expect = params.s_c() * norms.h2_sq;
    out.push(CheckItem::below(
        "energy_of_q",
        (norms.energy(params) - e_expect) / e_expect,
        1e-6,
    ));
    Ok(())
}

fn virial_checks(q: &GroundStateResult, out: &mut Vec<CheckItem>) -> Result<()> {
    let grid = q.grid();
    let w = VirialWeight::new(grid, 0.15 * grid.length())?;
    let r = w.radius();
    let mut psi_err = 0.0f64;
    let mut slope_err = 0.0f64;
    let mut sign_violation = 0.0f64;
    for (j, &x) in grid.nodes().iter().enumerate() {
        psi_err = psi_err.max((w.d2[j] - psi(x.abs() / r)).abs());
        if x.abs() <= r {
            slope_err = slope_err.max((w.d1[j] - x).abs());
        }
        sign_violation = sign_violation.max(w.d2[j] - 1.0);
    }
    out.push(CheckItem::below("virial_second_derivative", psi_err, 1e-8));
    out.push(CheckItem::below("virial_flat_slope", slope_err, 1e-10));
    out.push(CheckItem {
        name: "virial_concavity".into(),
        value: sign_violation,
        tolerance: 0.0,
        passed: sign_violation <= 0.0,
    });
    let u = &q.profile;
    let bound = 2.0 * r * u.l2_norm() * u.derivative(1).l2_norm();
    out.push(CheckItem::below("virial_even_vanishes", virial_m(u, &w)? / bound, 1e-10));
    Ok(())
}

fn flow_checks(q: &GroundStateResult, out: &mut Vec<CheckItem>) -> Result<()> {
    let u0 = q.profile.scaled(Complex64::new(0.5, 0.0));
    let rec = evolve(&u0, &q.params, &EvolveConfig::new(1e-3, 1.0, 100), &Monitors::none())?;
    out.push(CheckItem::below("mass_drift", rec.mass_drift(), 1e-10));
    out.push(CheckItem::below("energy_drift", rec.energy_drift(), 1e-6));
    Ok(())
}

pub fn run_checks(params: &NonlinearityParams, grid: &Grid, tol: f64, max_iter: usize) -> Result<CheckReport> {
    let q = petviashvili_solve(params, grid, None, tol, max_iter)?;
    let mut checks = Vec::new();
    ground_state_checks(&q, &mut checks)?;
    let s = params.strichartz();
    let worst = s.identity_residuals(params).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    checks.push(CheckItem::below("strichartz_identities", worst, 1e-12));
    virial_checks(&q, &mut checks)?;
    flow_checks(&q, &mut checks)?;
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(CheckReport {
        p: params.p(),
        n_points: grid.n_points(),
        length: grid.length(),
        iterations: q.iterations,
        checks,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_at_p13() {
        let p = NonlinearityParams::new(13.0).unwrap();
        let g = Grid::new(1024, 60.0).unwrap();
        let report = run_checks(&p, &g, 1e-11, 2000).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(report.all_passed);
    }
}
