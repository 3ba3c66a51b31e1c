//! Numerical laboratory for convex integration.
//!
//! Modules follow the objects they manipulate: sampled [`fields`], the exact 1-D
//! [`toy_ci`] scheme, the plane-wave framework in [`tartar`], Euler subsolutions in
//! [`euler_subsol`], the oscillation-adding iteration in [`euler_ci`] and the
//! isometric-embedding iteration in [`nash_kuiper`]. [`cli`] wires them to the `cil` binary.

pub mod cli;
pub mod error;
pub mod euler_ci;
pub mod euler_subsol;
pub mod fields;
pub mod nash_kuiper;
pub mod tartar;
pub mod toy_ci;

pub use error::{Error, Result};
