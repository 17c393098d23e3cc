use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use biharm_nls::diagnostics::decay::{dispersive_decay_fit, geometric_times, DEFAULT_WRAP_FRACTION};
use biharm_nls::evolution::{evolve, EvolveConfig, Monitors, TerminalStatus};
use biharm_nls::experiment::check::run_checks;
use biharm_nls::experiment::plot::emit_plots;
use biharm_nls::experiment::sweep::{run_sweep, write_sweep_outputs, series_csv};
use biharm_nls::experiment::SweepSpec;
use biharm_nls::functionals::{threshold_report, threshold_report_against, NonlinearityParams, ThresholdReport};
use biharm_nls::ground_state::{petviashvili_solve, GroundStateResult};
use biharm_nls::spectral::{io, ComplexField, Grid};
use biharm_nls::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "biharm-nls", version, about = "Focusing fourth-order NLS experiments")]
struct Cli {
    /// TOML run configuration; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// -v for progress, -vv for debug output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct ProblemArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    npoints: Option<usize>,
    /// Ground-state tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the ground state Q and certify it.
    Groundstate {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Profile output (`.csv` or binary); default `<out-dir>/ground_state.bin`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report; default `<out-dir>/ground_state.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Integrate from initial data and record diagnostics.
    Evolve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// A field file, `groundstate-scaled:C` or `gaussian:A,W`.
        #[arg(long)]
        init: String,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        record_every: Option<usize>,
    },
    /// Run the invariant suite and write `check.json`.
    Check {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Fit the sup-norm decay rate of the free flow from a Gaussian.
    Decay {
        #[arg(long, default_value_t = 400.0)]
        length: f64,
        #[arg(long, default_value_t = 8192)]
        npoints: usize,
        /// Gaussian `exp(-x^2 / (2 w^2))`.
        #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
        width: f64,
        #[arg(long, default_value_t = 5.0)]
        t_start: f64,
        #[arg(long, default_value_t = 50.0)]
        t_end: f64,
        #[arg(long, default_value_t = 24)]
        n_times: usize,
    },
    /// Run the initial-data family from `--config` in parallel.
    Sweep {
        /// Print the effective configuration as TOML before running.
        #[arg(long)]
        print_config: bool,
    },
    /// Render CSV files as SVG line charts into `<out-dir>`.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotConverged(_) | Error::NonFinite | Error::SizeMismatch { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> biharm_nls::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

struct Problem {
    params: NonlinearityParams,
    grid: Grid,
    tol: f64,
    max_iter: usize,
}

fn resolve(args: &ProblemArgs, spec: &SweepSpec) -> biharm_nls::Result<Problem> {
    Ok(Problem {
        params: NonlinearityParams::new(args.p.unwrap_or(spec.p))?,
        grid: Grid::new(
            args.npoints.unwrap_or(spec.grid.n_points),
            args.length.unwrap_or(spec.grid.length),
        )?,
        tol: args.tol.unwrap_or(spec.ground_state.tol),
        max_iter: args.max_iter.unwrap_or(spec.ground_state.max_iter),
    })
}

fn solve(pb: &Problem) -> biharm_nls::Result<GroundStateResult> {
    let q = petviashvili_solve(&pb.params, &pb.grid, None, pb.tol, pb.max_iter)?;
    if !q.converged {
        return Err(Error::NotConverged(format!("{:?} after {} iterations", q.status, q.iterations)));
    }
    Ok(q)
}

fn parse_init(init: &str, pb: &Problem) -> biharm_nls::Result<(ComplexField, ThresholdReport)> {
    let numbers = |s: &str| -> biharm_nls::Result<Vec<f64>> {
        s.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number '{v}' in --init {init}")))
            })
            .collect()
    };
    if let Some(rest) = init.strip_prefix("groundstate-scaled:") {
        let c = numbers(rest)?;
        let [c] = c[..] else {
            return Err(Error::Config("groundstate-scaled takes one factor".into()));
        };
        let q = solve(pb)?;
        let u0 = q.profile.scaled(Complex64::new(c, 0.0));
        let report = threshold_report(&u0, &q);
        return Ok((u0, report));
    }
    let u0 = if let Some(rest) = init.strip_prefix("gaussian:") {
        let v = numbers(rest)?;
        let [a, w] = v[..] else {
            return Err(Error::Config("gaussian takes amplitude,width".into()));
        };
        ComplexField::gaussian(&pb.grid, a, w)
    } else {
        io::load(Path::new(init))?
    };
    let q = solve(&Problem {
        grid: u0.grid().clone(),
        ..*pb
    })?;
    let report = threshold_report_against(&u0, &pb.params, q.derived.me_threshold, q.derived.grad_threshold);
    Ok((u0, report))
}

#[derive(Serialize)]
struct EvolveSummary<'a> {
    init: &'a str,
    p: f64,
    n_points: usize,
    length: f64,
    config: &'a EvolveConfig,
    terminal_status: TerminalStatus,
    steps_taken: usize,
    final_time: f64,
    mass_drift: f64,
    energy_drift: f64,
    threshold: ThresholdReport,
}

fn run(cli: Cli) -> Result<u8, Error> {
    let spec = match &cli.config {
        Some(path) => SweepSpec::load(path)?,
        None => SweepSpec::default(),
    };
    let out = &cli.out_dir;
    match cli.command {
        Command::Groundstate { problem, out: file, report } => {
            let pb = resolve(&problem, &spec)?;
            let q = petviashvili_solve(&pb.params, &pb.grid, None, pb.tol, pb.max_iter)?;
            let file = file.unwrap_or_else(|| out.join("ground_state.bin"));
            let report_path = report.unwrap_or_else(|| out.join("ground_state.json"));
            if let Some(dir) = file.parent() {
                std::fs::create_dir_all(dir)?;
            }
            io::save(&q.profile, &file)?;
            write_json(&report_path, &q.report(pb.tol))?;
            println!(
                "p = {}: {} after {} iterations, residual {:.3e}, C_GN = {:.12e}",
                pb.params.p(),
                if q.converged { "converged" } else { "NOT converged" },
                q.iterations,
                q.residual_linf,
                q.derived.c_gn
            );
            Ok(if q.converged { 0 } else { EXIT_NUMERICAL })
        }
        Command::Evolve {
            problem,
            init,
            dt,
            t_final,
            record_every,
        } => {
            let pb = resolve(&problem, &spec)?;
            let config = EvolveConfig {
                dt: dt.unwrap_or(spec.evolve.dt),
                t_final: t_final.unwrap_or(spec.evolve.t_final),
                record_every: record_every.unwrap_or(spec.evolve.record_every),
                ..spec.evolve.clone()
            };
            let (u0, threshold) = parse_init(&init, &pb)?;
            let record = evolve(&u0, &pb.params, &config, &Monitors::none())?;
            std::fs::create_dir_all(out)?;
            std::fs::write(out.join("series.csv"), series_csv(&record, &pb.params)?)?;
            let summary = EvolveSummary {
                init: &init,
                p: pb.params.p(),
                n_points: u0.grid().n_points(),
                length: u0.grid().length(),
                config: &config,
                terminal_status: record.status(),
                steps_taken: record.steps_taken,
                final_time: record.times.last().copied().unwrap_or(0.0),
                mass_drift: record.mass_drift(),
                energy_drift: record.energy_drift(),
                threshold,
            };
            write_json(&out.join("evolve.json"), &summary)?;
            println!(
                "{:?} at t = {} ({} records), mass drift {:.3e}, energy drift {:.3e}",
                summary.terminal_status,
                summary.final_time,
                record.len(),
                summary.mass_drift,
                summary.energy_drift
            );
            Ok(match record.status() {
                TerminalStatus::NonFinite => EXIT_NUMERICAL,
                _ => 0,
            })
        }
        Command::Check { problem } => {
            let pb = resolve(&problem, &spec)?;
            let report = run_checks(&pb.params, &pb.grid, pb.tol, pb.max_iter)?;
            write_json(&out.join("check.json"), &report)?;
            for c in &report.checks {
                println!("{} {:<28} {:.3e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value);
            }
            Ok(if report.all_passed { 0 } else { EXIT_NUMERICAL })
        }
        Command::Decay {
            length,
            npoints,
            width,
            t_start,
            t_end,
            n_times,
        } => {
            if !(t_start > 0.0 && t_end > t_start) || n_times < 3 {
                return Err(Error::Config("need 0 < t-start < t-end and n-times >= 3".into()));
            }
            let grid = Grid::new(npoints, length)?;
            let u0 = ComplexField::gaussian(&grid, 1.0, width);
            let fit = dispersive_decay_fit(&u0, &geometric_times(t_start, t_end, n_times), DEFAULT_WRAP_FRACTION)?;
            std::fs::create_dir_all(out)?;
            let mut w = csv::Writer::from_path(out.join("decay.csv"))?;
            w.write_record(["t", "sup_norm", "tail_fraction"])?;
            for i in 0..fit.times.len() {
                w.write_record([fit.times[i], fit.sup_norms[i], fit.tail_fractions[i]].map(|v| v.to_string()))?;
            }
            w.flush()?;
            write_json(&out.join("decay.json"), &fit)?;
            println!("decay exponent {:.4} over {} times", fit.exponent, fit.times.len());
            Ok(0)
        }
        Command::Sweep { print_config } => {
            if cli.config.is_none() {
                return Err(Error::Config("sweep requires --config".into()));
            }
            if print_config {
                print!("{}", spec.to_toml_string()?);
            }
            let workers = cli
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let result = run_sweep(&spec, workers)?;
            write_sweep_outputs(&spec, &result, out)?;
            for o in &result.outcomes {
                match o.summary() {
                    Some(s) => println!("{:<28} {}", s.input, s.verdict),
                    None => println!("run {:<24} failed", o.index()),
                }
            }
            Ok(if result.n_failed() > 0 { EXIT_PARTIAL } else { 0 })
        }
        Command::Plot { csv } => {
            for path in emit_plots(&csv, out)? {
                println!("{}", path.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
