//! Oscillation-adding iteration for Euler: stationary shear waves are added to a strict
//! subsolution and the relaxed constraint is re-closed through u and q.

mod cross;
mod step;

pub use cross::{cross_term_pairing, CrossTermPairing};
pub use step::{
    cell_average_increase, ci_run, ci_step, deficit, select_wave, shell_fraction, trivial_start, CiConfig,
    CiRow, CiState, Deficit, SelectedWave,
};
