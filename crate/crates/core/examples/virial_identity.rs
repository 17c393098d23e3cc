//! Check dM_R/dt = 4K + A_R along a moving wave packet with centred
//! differences of the recorded M_R.

use num_complex::Complex64;

use biharm_nls::diagnostics::{virial_rate_decomposition, VirialWeight};
use biharm_nls::evolution::{evolve, EvolveConfig, Monitors};
use biharm_nls::functionals::NonlinearityParams;
use biharm_nls::spectral::{ComplexField, Grid};

fn main() -> biharm_nls::Result<()> {
    let params = NonlinearityParams::new(13.0)?;
    let grid = Grid::new(2048, 100.0)?;
    let w = VirialWeight::new(&grid, 8.0)?;
    let u0 = ComplexField::from_fn(&grid, |x| Complex64::from_polar(0.8 * (-(x - 2.0).powi(2) / 18.0).exp(), 0.5 * x));
    let split = virial_rate_decomposition(&u0, &w, &params)?;
    println!("t = 0: 4K = {:.6}, A_R = {:.6} (terms {:.3e} {:.3e} {:.3e} {:.3e})",
        split.four_k, split.a_r, split.term_h2, split.term_h1, split.term_l2, split.term_nonlinear);

    let dt = 1e-4;
    let rec = evolve(&u0, &params, &EvolveConfig::new(dt, 0.5, 10), &Monitors::none().virial(w))?;
    let h = 10.0 * dt;
    println!("{:>6} {:>14} {:>14} {:>10}", "t", "dM/dt (FD)", "4K + A_R", "rel err");
    for k in (50..rec.len() - 1).step_by(50) {
        let fd = (rec.virial_series[k + 1] - rec.virial_series[k - 1]) / (2.0 * h);
        let rate = rec.virial_rate_series[k];
        println!("{:>6.2} {fd:>14.8} {rate:>14.8} {:>10.2e}", rec.times[k], ((fd - rate) / rate).abs());
    }
    Ok(())
}
