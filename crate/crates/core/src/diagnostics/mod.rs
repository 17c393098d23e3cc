//! Monitors specific to the focusing fourth-order problem: the localized
//! virial identity, tightness, dispersive decay, the spacetime X-norm and
//! the back-propagated scattering profile.

pub mod cutoff;
pub mod decay;
pub mod scattering;
pub mod tightness;
pub mod virial;
pub mod xnorm;

pub use decay::{dispersive_decay_fit, geometric_times, DecayFit};
pub use scattering::{scattering_profile, ScatteringProfile};
pub use tightness::{dyadic_radii, tightness_profile, TightnessProfile};
pub use virial::{virial_m, virial_rate_decomposition, VirialRate, VirialWeight};
pub use xnorm::{xnorm_accumulate, xnorm_accumulate_with, XNorm};
