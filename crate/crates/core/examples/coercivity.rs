//! Below the threshold the gradient product stays trapped under its
//! ground-state value and K(u) stays coercive.

use num_complex::Complex64;

use biharm_nls::evolution::{evolve, EvolveConfig, Monitors};
use biharm_nls::functionals::{coercivity_delta, NonlinearityParams};
use biharm_nls::ground_state::petviashvili_solve;
use biharm_nls::spectral::Grid;

fn main() -> biharm_nls::Result<()> {
    let params = NonlinearityParams::new(13.0)?;
    let q = petviashvili_solve(&params, &Grid::new(2048, 200.0)?, None, 1e-10, 2000)?;
    let thr = q.derived.grad_threshold;
    for c in [0.5, 0.7, 0.9] {
        let rec = evolve(&q.profile.scaled(Complex64::new(c, 0.0)), &params, &EvolveConfig::new(2e-3, 20.0, 50), &Monitors::none())?;
        let max_ratio = rec.grad_product_series(&params).iter().fold(0.0f64, |m, g| m.max(g / thr));
        let d2 = coercivity_delta(1.0 - max_ratio, &params)?;
        let min_k = rec
            .k_series
            .iter()
            .zip(&rec.h2_series)
            .map(|(k, h)| k / (h * h))
            .fold(f64::INFINITY, f64::min);
        println!("c = {c}: max grad/threshold {max_ratio:.4}, delta'' {d2:.4}, min K/|u_xx|^2 {min_k:.4} (bound {:.4})", 2.0 * d2);
    }
    Ok(())
}
