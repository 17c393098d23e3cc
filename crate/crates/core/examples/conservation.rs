//! Mass and energy drift of the Strang integrator from 0.5 Q, and the
//! second-order scaling of the energy error with dt.

use num_complex::Complex64;

use biharm_nls::evolution::{evolve, EvolveConfig, Monitors};
use biharm_nls::functionals::NonlinearityParams;
use biharm_nls::ground_state::petviashvili_solve;
use biharm_nls::spectral::Grid;

fn main() -> biharm_nls::Result<()> {
    let params = NonlinearityParams::new(13.0)?;
    let q = petviashvili_solve(&params, &Grid::new(2048, 100.0)?, None, 1e-10, 2000)?;
    let u0 = q.profile.scaled(Complex64::new(0.5, 0.0));
    let mut previous: Option<f64> = None;
    for dt in [2e-3, 1e-3, 5e-4] {
        let rec = evolve(&u0, &params, &EvolveConfig::new(dt, 20.0, 100), &Monitors::none())?;
        let ratio = previous.map_or(String::new(), |e| format!("  ratio {:.2}", e / rec.energy_drift()));
        println!(
            "dt {dt:.0e}: mass drift {:.2e}, energy drift {:.3e}{ratio}",
            rec.mass_drift(),
            rec.energy_drift()
        );
        previous = Some(rec.energy_drift());
    }
    Ok(())
}
