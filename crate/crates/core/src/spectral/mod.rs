//! Periodic grid, unitary Fourier transform, spectral derivatives and norm
//! quadratures.
//!
//! The line is approximated by the torus `[-L/2, L/2)`. Results are only
//! meaningful while the field carries negligible mass near the boundary; the
//! evolution records a tail-mass series for exactly that reason.

mod field;
mod grid;
pub mod io;

pub use field::{abs_pow, derivative_symbol, ComplexField, Spectrum};
pub use grid::Grid;
