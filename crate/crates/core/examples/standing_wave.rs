//! Evolve Q itself and watch it leave the standing wave e^{it}Q: the error
//! grows exponentially because Q is linearly unstable for p > 9.

use num_complex::Complex64;

use biharm_nls::evolution::{evolve_to, EvolveConfig};
use biharm_nls::functionals::NonlinearityParams;
use biharm_nls::ground_state::petviashvili_solve;
use biharm_nls::spectral::Grid;

fn main() -> biharm_nls::Result<()> {
    let params = NonlinearityParams::new(13.0)?;
    let q = petviashvili_solve(&params, &Grid::new(2048, 100.0)?, None, 1e-10, 2000)?;
    let mut u = q.profile.clone();
    let step = 0.5;
    let cfg = EvolveConfig::new(1e-4, step, 1000);
    println!("{:>5} {:>12}", "t", "sup error");
    for k in 1..=10 {
        u = evolve_to(&u, &params, &cfg)?.0;
        let t = step * k as f64;
        let err = u.sup_distance(&q.profile.scaled(Complex64::from_polar(1.0, t)))?;
        println!("{t:>5.1} {err:>12.3e}");
    }
    Ok(())
}
