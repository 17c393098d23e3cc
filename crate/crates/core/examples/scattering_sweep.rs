//! A small dichotomy sweep over c Q: threshold ratios and proxy verdicts,
//! written to `scattering_sweep/` under the system temp directory.

use biharm_nls::evolution::EvolveConfig;
use biharm_nls::experiment::sweep::write_sweep_outputs;
use biharm_nls::experiment::{run_sweep, Family, GridSpec, SweepSpec};

fn main() -> biharm_nls::Result<()> {
    let spec = SweepSpec {
        grid: GridSpec {
            n_points: 4096,
            length: 400.0,
        },
        family: Family::ScaledGroundState {
            c: vec![0.1, 0.3, 0.5, 0.7, 0.9, 1.0],
        },
        evolve: EvolveConfig::new(5e-3, 40.0, 100),
        ..SweepSpec::default()
    };
    print!("{}", spec.to_toml_string()?);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let result = run_sweep(&spec, workers)?;
    println!("\n{:>5} {:>10} {:>10} {:>10} {:>10}  verdict", "c", "ME ratio", "grad", "X-norm", "floor");
    for o in &result.outcomes {
        if let Some(s) = o.summary() {
            println!(
                "{:>5} {:>10.4} {:>10.4} {:>10.4} {:>10.2e}  {}",
                s.parameter,
                s.threshold.me_ratio(),
                s.threshold.grad_ratio(),
                s.metrics.xnorm,
                s.metrics.cauchy_floor,
                s.verdict
            );
        }
    }
    let out = std::env::temp_dir().join("scattering_sweep");
    write_sweep_outputs(&spec, &result, &out)?;
    println!("\noutputs in {}", out.display());
    Ok(())
}
