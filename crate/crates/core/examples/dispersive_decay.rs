//! Sup-norm decay of the free fourth-order flow: slope close to -1/4 on a
//! log-log plot until mass wraps around the torus.

use biharm_nls::diagnostics::decay::{dispersive_decay_fit, geometric_times, DEFAULT_WRAP_FRACTION};
use biharm_nls::spectral::{ComplexField, Grid};

fn main() -> biharm_nls::Result<()> {
    let grid = Grid::new(8192, 400.0)?;
    let u0 = ComplexField::gaussian(&grid, 1.0, std::f64::consts::SQRT_2);
    let fit = dispersive_decay_fit(&u0, &geometric_times(5.0, 50.0, 12), DEFAULT_WRAP_FRACTION)?;
    for (t, s) in fit.times.iter().zip(&fit.sup_norms) {
        println!("t {t:>7.3}  sup {s:.6}");
    }
    println!("fitted exponent {:.4}", fit.exponent);

    // Too long a window on a small domain: the fit is truncated at wrap-around.
    let small = Grid::new(1024, 100.0)?;
    let fit = dispersive_decay_fit(&ComplexField::gaussian(&small, 1.0, 1.0), &geometric_times(1.0, 200.0, 24), DEFAULT_WRAP_FRACTION)?;
    println!("small domain: truncated at t = {:?}, exponent {:.4}", fit.truncated_at, fit.exponent);
    Ok(())
}
