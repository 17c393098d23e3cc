//! Solve for the ground state Q at a few powers and print its certificate.
//!
//! ```text
//! cargo run --release --example ground_state
//! ```

use biharm_nls::functionals::NonlinearityParams;
use biharm_nls::ground_state::{continuation_in_p, DEFAULT_MAX_ITER, DEFAULT_TOL};
use biharm_nls::spectral::Grid;

fn main() -> biharm_nls::Result<()> {
    let grid = Grid::new(2048, 100.0)?;
    let results = continuation_in_p(&[11.0, 13.0, 15.0], &grid, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    println!("{:>5} {:>5} {:>10} {:>10} {:>10} {:>14} {:>14}", "p", "iter", "residual", "pohozaev", "sup Q", "mass", "C_GN");
    for q in &results {
        println!(
            "{:>5} {:>5} {:>10.2e} {:>10.2e} {:>10.6} {:>14.8} {:>14.8e}",
            q.params.p(),
            q.iterations,
            q.residual_linf,
            q.identity_residuals.pohozaev,
            q.profile.sup_norm(),
            q.derived.mass,
            q.derived.c_gn
        );
    }
    let p13 = NonlinearityParams::new(13.0)?;
    let q = &results[1];
    println!(
        "\np = 13: ME threshold {:.6e}, gradient threshold {:.6e}, s_c = {}",
        q.derived.me_threshold,
        q.derived.grad_threshold,
        p13.s_c()
    );
    Ok(())
}
