//! Pseudospectral toolkit for the focusing fourth-order nonlinear
//! Schrodinger equation on a periodic interval,
//!
//! ```text
//! i u_t - u_xxxx + |u|^{p-1} u = 0,   p > 9.
//! ```
//!
//! - [`spectral`]: grids, complex fields, transforms, field files.
//! - [`functionals`]: mass, energy, `K`, sharp constants, threshold reports.
//! - [`ground_state`]: Petviashvili solver for the ground state `Q`.
//! - [`evolution`]: Strang splitting with recorded diagnostics.
//! - [`diagnostics`]: virial identity, tightness, decay, X-norm, scattering profile.
//! - [`experiment`]: configuration, sweeps, convergence studies, checks, plots.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod functionals;
pub mod ground_state;
pub mod spectral;

pub use error::{Error, Result};
