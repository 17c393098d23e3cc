//! Richardson self-convergence of the integrator: solve with `dt, dt/2, ...`
//! and compare consecutive solutions at the final time.

use serde::{Deserialize, Serialize};

use crate::diagnostics::decay::least_squares;
use crate::error::{Error, Result};
use crate::evolution::{evolve_to, EvolveConfig, TerminalStatus};
use crate::functionals::NonlinearityParams;
use crate::spectral::ComplexField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub dt: f64,
    /// `||u_dt(T) - u_{dt/2}(T)||_2`.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// `error[k] / error[k + 1]`; about 4 for a second-order scheme.
    pub ratios: Vec<f64>,
    /// Slope of `log error` against `log dt`; `None` with fewer than two rows.
    pub fitted_order: Option<f64>,
}

/// Solves at `refinements + 1` step sizes `base.dt / 2^k` and reports
/// `refinements` successive differences.
pub fn convergence_study(
    u0: &ComplexField,
    params: &NonlinearityParams,
    base: &EvolveConfig,
    refinements: usize,
) -> Result<ConvergenceTable> {
    if refinements == 0 {
        return Err(Error::param("refinements must be at least 1"));
    }
    let mut solutions = Vec::with_capacity(refinements + 1);
    for k in 0..=refinements {
        let cfg = EvolveConfig {
            dt: base.dt / (1u64 << k) as f64,
            ..base.clone()
        };
        let (u, status) = evolve_to(u0, params, &cfg)?;
        if status != TerminalStatus::Completed {
            return Err(Error::NotConverged(format!(
                "run with dt = {} ended with {status:?}",
                cfg.dt
            )));
        }
        solutions.push((cfg.dt, u));
    }
    let rows: Vec<ConvergenceRow> = solutions
        .windows(2)
        .map(|w| {
            Ok(ConvergenceRow {
                dt: w[0].0,
                error: w[0].1.sub(&w[1].1)?.l2_norm(),
            })
        })
        .collect::<Result<_>>()?;
    let ratios = rows.windows(2).map(|w| w[0].error / w[1].error).collect();
    let fitted_order = (rows.len() >= 2).then(|| {
        let x: Vec<f64> = rows.iter().map(|r| r.dt.ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.error.ln()).collect();
        least_squares(&x, &y).0
    });
    Ok(ConvergenceTable {
        rows,
        ratios,
        fitted_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn zero_refinements_rejected() {
        let g = Grid::new(64, 20.0).unwrap();
        let u0 = ComplexField::gaussian(&g, 0.5, 1.0);
        let p = NonlinearityParams::new(13.0).unwrap();
        assert!(convergence_study(&u0, &p, &EvolveConfig::new(0.01, 0.1, 10), 0).is_err());
    }

    #[test]
    fn linear_mode_is_exact() {
        let g = Grid::new(256, 40.0).unwrap();
        let u0 = ComplexField::gaussian(&g, 1.0, 1.5);
        let p = NonlinearityParams::new(13.0).unwrap();
        let cfg = EvolveConfig {
            coupling: 0.0,
            ..EvolveConfig::new(0.1, 1.0, 10)
        };
        let table = convergence_study(&u0, &p, &cfg, 3).unwrap();
        assert!(table.rows.iter().all(|r| r.error < 1e-12), "{table:?}");
    }
}
