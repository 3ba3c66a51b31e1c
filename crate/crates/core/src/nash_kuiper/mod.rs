//! Codimension-one corrugation scheme for flat 2-D metrics, with the Gauss-map degree check.

pub mod bessel;
pub mod corrugate;
pub mod decompose;
pub mod degree;
pub mod export;
pub mod geometry;
pub mod stage;
pub mod targets;

pub use bessel::{bessel_j_all, invert_j0, invert_one_minus_j0, j0, Corrugation, J0_FIRST_ZERO};
pub use corrugate::{
    choose_frequency, corrugation_step, frame_orthogonality, frequency_formula, max_resolvable, metric_gain_error,
    Clamp,
};
pub use decompose::{decompose_with_margin, margin_target, primitive_decompose, Primitive, PrimitiveDecomposition, DIRECTIONS};
pub use degree::{gauss_degree_check, solid_angle, DegreeCheck};
pub use export::{report_csv, to_obj};
pub use geometry::{
    c1_seminorm, c2_seminorm, deficit, frame, immersion_margin, induced_metric, min_eig, shortness_check, sup_norm,
    Frame,
};
pub use stage::{nash_kuiper_run, stage, theoretical_exponent, RunReport, StageConfig, StageReport, N_STAR};
pub use targets::{flat_square, flat_torus};
