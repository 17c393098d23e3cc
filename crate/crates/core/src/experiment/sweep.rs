use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ClassifyConfig, Family, SweepSpec};
use crate::diagnostics::{scattering_profile, xnorm_accumulate_with};
use crate::error::{Error, Result};
use crate::evolution::{evolve, Monitors, TerminalStatus, TrajectoryRecord};
use crate::functionals::{threshold_report, NonlinearityParams, ThresholdReport};
use crate::ground_state::{petviashvili_solve, GroundStateResult};
use crate::spectral::{io, ComplexField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ScatterProxy,
    GrowthProxy,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ScatterProxy => "ScatterProxy",
            Verdict::GrowthProxy => "GrowthProxy",
            Verdict::Undecided => "Undecided",
        })
    }
}

/// Everything the verdict depends on, extracted from one trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub terminal_status: TerminalStatus,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub xnorm: f64,
    pub xnorm_late_share: f64,
    pub saturated: bool,
    pub cauchy_floor: f64,
    /// `max_t grad_product(u(t)) / grad_threshold`.
    pub max_grad_ratio: f64,
    /// `max_t ||u_xx(t)||_2 / ||u_xx(0)||_2`.
    pub max_h2_growth: f64,
    pub final_time: f64,
}

impl RunMetrics {
    pub fn from_record(
        record: &TrajectoryRecord,
        params: &NonlinearityParams,
        grad_threshold: f64,
        classify: &ClassifyConfig,
    ) -> Result<Self> {
        let x = xnorm_accumulate_with(record, classify.saturation_horizon, classify.saturation_share)?;
        let floor = scattering_profile(&record.snapshots)?.cauchy_floor;
        let max_grad = record
            .grad_product_series(params)
            .into_iter()
            .fold(0.0f64, f64::max);
        let h0 = record.h2_series[0];
        let max_h2_growth = if h0 > 0.0 {
            record.h2_series.iter().fold(0.0f64, |m, &v| m.max(v)) / h0
        } else {
            1.0
        };
        Ok(Self {
            terminal_status: record.status(),
            mass_drift: record.mass_drift(),
            energy_drift: record.energy_drift(),
            xnorm: x.value,
            xnorm_late_share: x.late_share,
            saturated: x.saturated,
            cauchy_floor: floor,
            max_grad_ratio: max_grad / grad_threshold,
            max_h2_growth,
            final_time: *record.times.last().unwrap(),
        })
    }
}

/// Growth wins over everything; scattering needs saturation, a small Cauchy
/// floor and the gradient product below threshold at every record.
pub fn verdict(m: &RunMetrics, classify: &ClassifyConfig) -> Verdict {
    if m.terminal_status != TerminalStatus::Completed || m.max_h2_growth > classify.growth_factor {
        Verdict::GrowthProxy
    } else if m.saturated && m.cauchy_floor < classify.cauchy_threshold && m.max_grad_ratio < 1.0 {
        Verdict::ScatterProxy
    } else {
        Verdict::Undecided
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub index: usize,
    /// e.g. `c=0.5` or `amplitude=1.2,width=2`.
    pub input: String,
    pub parameter: f64,
    pub threshold: ThresholdReport,
    pub metrics: RunMetrics,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunFailure {
    pub index: usize,
    pub input: String,
    pub parameter: f64,
    pub threshold: ThresholdReport,
    pub error: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RunOutcome {
    Completed(RunSummary),
    Failed(RunFailure),
}

impl RunOutcome {
    pub fn index(&self) -> usize {
        match self {
            RunOutcome::Completed(s) => s.index,
            RunOutcome::Failed(f) => f.index,
        }
    }

    pub fn summary(&self) -> Option<&RunSummary> {
        match self {
            RunOutcome::Completed(s) => Some(s),
            RunOutcome::Failed(_) => None,
        }
    }
}

pub struct SweepResult {
    pub ground_state: GroundStateResult,
    pub outcomes: Vec<RunOutcome>,
    /// Records in input order; `None` for failed runs.
    pub records: Vec<Option<TrajectoryRecord>>,
}

impl SweepResult {
    pub fn n_failed(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| matches!(o, RunOutcome::Failed(_)))
            .count()
    }

    /// CSV with one row per run: parameter, mass-energy ratio, gradient ratio, verdict.
    pub fn phase_table_csv(&self, parameter_name: &str) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([parameter_name, "me_ratio", "grad_ratio", "verdict"])?;
        for o in &self.outcomes {
            let (param, th, verdict) = match o {
                RunOutcome::Completed(s) => (s.parameter, &s.threshold, s.verdict.to_string()),
                RunOutcome::Failed(f) => (f.parameter, &f.threshold, "Failed".to_string()),
            };
            w.write_record([
                param.to_string(),
                th.me_ratio().to_string(),
                th.grad_ratio().to_string(),
                verdict,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn initial_data(family: &Family, param: f64, q: &GroundStateResult) -> (String, ComplexField) {
    match family {
        Family::ScaledGroundState { .. } => (
            format!("c={param}"),
            q.profile.scaled(Complex64::new(param, 0.0)),
        ),
        Family::Gaussian { width, .. } => (
            format!("amplitude={param},width={width}"),
            ComplexField::gaussian(q.grid(), param, *width),
        ),
    }
}

/// Solve for the ground state named by the sweep configuration, seeding from a field file if given.
pub fn solve_ground_state(spec: &SweepSpec) -> Result<GroundStateResult> {
    let params = NonlinearityParams::new(spec.p)?;
    let grid = spec.grid.build()?;
    let init = match &spec.ground_state.init {
        Some(path) => Some(io::load(path)?),
        None => None,
    };
    let q = petviashvili_solve(
        &params,
        &grid,
        init.as_ref(),
        spec.ground_state.tol,
        spec.ground_state.max_iter,
    )?;
    if !q.converged {
        return Err(Error::NotConverged(format!(
            "ground state for p = {} did not converge ({:?})",
            spec.p, q.status
        )));
    }
    Ok(q)
}

fn run_one(
    spec: &SweepSpec,
    params: &NonlinearityParams,
    q: &GroundStateResult,
    index: usize,
    param: f64,
) -> (RunOutcome, Option<TrajectoryRecord>) {
    let (input, u0) = initial_data(&spec.family, param, q);
    let threshold = threshold_report(&u0, q);
    let monitors = Monitors::with_snapshots(spec.classify.snapshot_every);
    let result = evolve(&u0, params, &spec.evolve, &monitors).and_then(|record| {
        let metrics = RunMetrics::from_record(&record, params, q.derived.grad_threshold, &spec.classify)?;
        Ok((metrics, record))
    });
    match result {
        Ok((metrics, record)) => {
            let verdict = verdict(&metrics, &spec.classify);
            log::info!("run {index} ({input}): {verdict}");
            (
                RunOutcome::Completed(RunSummary {
                    index,
                    input,
                    parameter: param,
                    threshold,
                    metrics,
                    verdict,
                }),
                Some(record),
            )
        }
        Err(e) => {
            log::error!("run {index} ({input}) failed: {e}");
            (
                RunOutcome::Failed(RunFailure {
                    index,
                    input,
                    parameter: param,
                    threshold,
                    error: e.to_string(),
                }),
                None,
            )
        }
    }
}

/// Run every family member on a pool of `workers` threads. Results come back in
/// input order; a failing member is recorded and does not stop the others.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult> {
    spec.validate()?;
    let params = NonlinearityParams::new(spec.p)?;
    let q = solve_ground_state(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let members: Vec<(usize, f64)> = spec.family.parameters().iter().copied().enumerate().collect();
    let (outcomes, records): (Vec<_>, Vec<_>) = pool.install(|| {
        members
            .par_iter()
            .map(|&(i, c)| run_one(spec, &params, &q, i, c))
            .collect::<Vec<_>>()
            .into_iter()
            .unzip()
    });
    Ok(SweepResult {
        ground_state: q,
        outcomes,
        records,
    })
}

/// CSV of the recorded series of one trajectory.
#[allow(clippy::needless_range_loop)]
pub fn series_csv(record: &TrajectoryRecord, params: &NonlinearityParams) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "t",
        "mass",
        "energy",
        "h2",
        "lp1",
        "sup",
        "k",
        "grad_product",
        "xnorm_accum",
        "tail_mass",
    ])?;
    let grad = record.grad_product_series(params);
    for i in 0..record.len() {
        w.write_record(
            [
                record.times[i],
                record.mass_series[i],
                record.energy_series[i],
                record.h2_series[i],
                record.lp1_series[i],
                record.sup_series[i],
                record.k_series[i],
                grad[i],
                record.xnorm_accum[i],
                record.tail_mass_series[i],
            ]
            .map(|v| v.to_string()),
        )?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Write `config.toml`, `ground_state.json`, `summaries.json`,
/// `phase_table.csv` and `series/run_NNN.csv` under `out_dir`.
pub fn write_sweep_outputs(spec: &SweepSpec, result: &SweepResult, out_dir: &Path) -> Result<()> {
    let params = NonlinearityParams::new(spec.p)?;
    std::fs::create_dir_all(out_dir.join("series"))?;
    std::fs::write(out_dir.join("config.toml"), spec.to_toml_string()?)?;
    let gs = result.ground_state.report(spec.ground_state.tol);
    std::fs::write(out_dir.join("ground_state.json"), serde_json::to_string_pretty(&gs)?)?;
    std::fs::write(
        out_dir.join("summaries.json"),
        serde_json::to_string_pretty(&result.outcomes)?,
    )?;
    std::fs::write(
        out_dir.join("phase_table.csv"),
        result.phase_table_csv(spec.family.parameter_name())?,
    )?;
    for (o, rec) in result.outcomes.iter().zip(&result.records) {
        if let Some(rec) = rec {
            std::fs::write(
                out_dir.join("series").join(format!("run_{:03}.csv", o.index())),
                series_csv(rec, &params)?,
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics() -> RunMetrics {
        RunMetrics {
            terminal_status: TerminalStatus::Completed,
            mass_drift: 0.0,
            energy_drift: 0.0,
            xnorm: 1.0,
            xnorm_late_share: 1e-4,
            saturated: true,
            cauchy_floor: 1e-9,
            max_grad_ratio: 0.5,
            max_h2_growth: 1.0,
            final_time: 10.0,
        }
    }

    #[test]
    fn verdict_rules() {
        let c = ClassifyConfig::default();
        assert_eq!(verdict(&metrics(), &c), Verdict::ScatterProxy);
        let m = RunMetrics { saturated: false, ..metrics() };
        assert_eq!(verdict(&m, &c), Verdict::Undecided);
        let m = RunMetrics { cauchy_floor: 1e-3, ..metrics() };
        assert_eq!(verdict(&m, &c), Verdict::Undecided);
        let m = RunMetrics { max_grad_ratio: 1.01, ..metrics() };
        assert_eq!(verdict(&m, &c), Verdict::Undecided);
        let m = RunMetrics { max_h2_growth: 11.0, ..metrics() };
        assert_eq!(verdict(&m, &c), Verdict::GrowthProxy);
        let m = RunMetrics {
            terminal_status: TerminalStatus::BlowupGuard,
            ..metrics()
        };
        assert_eq!(verdict(&m, &c), Verdict::GrowthProxy);
    }
}
