//! The sharp Gagliardo-Nirenberg constant from Q in two ways, and random even
//! trial functions staying below it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use biharm_nls::functionals::{gn_ratio, FieldNorms, NonlinearityParams, SharpConstant};
use biharm_nls::ground_state::petviashvili_solve;
use biharm_nls::spectral::{ComplexField, Grid};

fn main() -> biharm_nls::Result<()> {
    let params = NonlinearityParams::new(13.0)?;
    let grid = Grid::new(2048, 100.0)?;
    let q = petviashvili_solve(&params, &grid, None, 1e-10, 2000)?;
    let sharp = SharpConstant::from_norms(&FieldNorms::of(&q.profile, &params), &params)?;
    println!("ratio form   {:.12e}", sharp.ratio_form);
    println!("closed form  {:.12e}", sharp.closed_form);
    println!("relative gap {:.2e}", sharp.relative_gap);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut best = 0.0f64;
    for _ in 0..200 {
        let (a, w, k) = (rng.gen_range(0.2..2.0), rng.gen_range(0.4..4.0), rng.gen_range(0.0..1.5));
        let f = ComplexField::from_real_fn(&grid, |x| a * (-x * x / (2.0 * w * w)).exp() * (k * x).cos());
        best = best.max(gn_ratio(&f, &params)? / sharp.value());
    }
    println!("best random trial / C_GN = {best:.4}");
    Ok(())
}
