//! Euler subsolutions: the relaxed constraint, linear residuals, admissibility, the
//! shear and porous-media mixing zones, and dissipation scans.

pub mod admissibility;
pub mod muskat;
pub mod residual;
pub mod scan;
pub mod shear;
pub mod triple;

pub use admissibility::{admissibility, admissibility_triple, AdmissibilityReport};
pub use muskat::{build_muskat_subsolution, muskat_report, MuskatProfile, MuskatReport, MuskatSubsolution};
pub use residual::{
    linear_residual, profile_strong_residual, profile_weak_residual, sample_profile, ResidualReport,
    SpaceTimeProfile,
};
pub use scan::{dissipation_scan, DissipationScan, ScanRow};
pub use shear::{build_shear_subsolution, shear_energy, shear_grid, shear_rate, ShearParams, ShearProfile};
pub use triple::{constraint_margin, generalized_energy, PointState, SubsolutionTriple};
