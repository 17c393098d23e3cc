//! Run configuration as a TOML document.
//!
//! ```toml
//! p = 13.0
//!
//! [grid]
//! n_points = 2048
//! length = 100.0
//!
//! [family]
//! kind = "scaled_ground_state"   # or "gaussian" with `amplitudes` and `width`
//! c = [0.3, 0.5, 0.7, 0.9]
//!
//! [evolve]
//! dt = 1e-3
//! t_final = 10.0
//! record_every = 100
//!
//! [classify]
//! saturation_horizon = 0.2
//! saturation_share = 0.01
//! cauchy_threshold = 1e-5
//! growth_factor = 10.0
//! snapshot_every = 1
//!
//! [ground_state]
//! tol = 1e-10
//! max_iter = 2000
//! ```
//!
//! Every section is optional; missing keys take the defaults shown.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::EvolveConfig;
use crate::ground_state::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::spectral::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub n_points: usize,
    pub length: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_points: 2048,
            length: 100.0,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.n_points, self.length)
    }
}

/// Initial-data family swept by [`super::run_sweep`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `u0 = c * Q` for each `c`.
    ScaledGroundState { c: Vec<f64> },
    /// `u0 = a * exp(-x^2 / (2 w^2))` for each amplitude `a`.
    Gaussian { amplitudes: Vec<f64>, width: f64 },
}

impl Default for Family {
    fn default() -> Self {
        Family::ScaledGroundState {
            c: vec![0.3, 0.5, 0.7, 0.9],
        }
    }
}

impl Family {
    pub fn parameters(&self) -> &[f64] {
        match self {
            Family::ScaledGroundState { c } => c,
            Family::Gaussian { amplitudes, .. } => amplitudes,
        }
    }

    pub fn parameter_name(&self) -> &'static str {
        match self {
            Family::ScaledGroundState { .. } => "c",
            Family::Gaussian { .. } => "amplitude",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let list = self.parameters();
        if list.is_empty() {
            return Err(Error::Config(format!("{} list is empty", self.parameter_name())));
        }
        if list.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("{} values must be positive", self.parameter_name())));
        }
        if list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "{} values must be strictly increasing",
                self.parameter_name()
            )));
        }
        if let Family::Gaussian { width, .. } = self {
            if !(*width > 0.0 && width.is_finite()) {
                return Err(Error::Config("gaussian width must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Thresholds turning a trajectory into a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    /// Trailing fraction of the time window inspected for X-norm saturation.
    pub saturation_horizon: f64,
    /// The trailing window must carry less than this share of the X-norm integral.
    pub saturation_share: f64,
    /// Cauchy floor of the back-propagated profile in `H^2`.
    pub cauchy_threshold: f64,
    /// Growth of `||u_xx||_2` over its initial value that flags growth.
    pub growth_factor: f64,
    /// Keep a snapshot every this many records for the scattering profile.
    pub snapshot_every: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            saturation_horizon: 0.2,
            saturation_share: 0.01,
            cauchy_threshold: 1e-5,
            growth_factor: 10.0,
            snapshot_every: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroundStateSpec {
    pub tol: f64,
    pub max_iter: usize,
    /// Optional field file used to seed the solver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<PathBuf>,
}

impl Default for GroundStateSpec {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            init: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub p: f64,
    pub grid: GridSpec,
    pub family: Family,
    pub evolve: EvolveConfig,
    pub classify: ClassifyConfig,
    pub ground_state: GroundStateSpec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            p: 13.0,
            grid: GridSpec::default(),
            family: Family::default(),
            evolve: EvolveConfig::new(1e-3, 10.0, 100),
            classify: ClassifyConfig::default(),
            ground_state: GroundStateSpec::default(),
        }
    }
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 9.0) {
            return Err(Error::Config(format!("p must exceed 9, got {}", self.p)));
        }
        self.grid.build()?;
        self.family.validate()?;
        let c = &self.classify;
        if !(c.saturation_horizon > 0.0 && c.saturation_horizon < 1.0) {
            return Err(Error::Config("saturation_horizon must lie in (0, 1)".into()));
        }
        if !(c.saturation_share > 0.0 && c.cauchy_threshold > 0.0 && c.growth_factor > 1.0) {
            return Err(Error::Config(
                "saturation_share and cauchy_threshold must be positive, growth_factor above 1".into(),
            ));
        }
        if c.snapshot_every == 0 {
            return Err(Error::Config("snapshot_every must be at least 1".into()));
        }
        if !(self.ground_state.tol > 0.0) || self.ground_state.max_iter == 0 {
            return Err(Error::Config("ground_state tol and max_iter must be positive".into()));
        }
        Ok(())
    }
}
