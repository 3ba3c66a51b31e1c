//! Constant-coefficient first-order systems, plane waves and the wave cone, and
//! 0-homogeneous Fourier multipliers for active scalars.

pub mod expr;
pub mod multiplier;
pub mod system;
pub mod transport;
pub mod wave;

pub use multiplier::{multiplier_apply, multiplier_check, Multiplier, MultiplierReport, Parity};
pub use system::{euler_linear_system, euler_state, gradient_system, LinearSystem};
pub use transport::{transport_residual, TransportResidual};
pub use wave::{discrete_residual, plane_wave, relative_residual, wave_cone_contains, WaveWitness};
