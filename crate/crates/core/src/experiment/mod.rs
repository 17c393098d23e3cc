//! Batch orchestration: configuration, parameter sweeps, convergence
//! studies, the invariant check suite and SVG plots.

pub mod check;
pub mod config;
pub mod convergence;
pub mod plot;
pub mod sweep;

pub use config::{ClassifyConfig, Family, GridSpec, GroundStateSpec, SweepSpec};
pub use convergence::{convergence_study, ConvergenceTable};
pub use sweep::{run_sweep, verdict, RunMetrics, RunOutcome, RunSummary, SweepResult, Verdict};
