//! Sampled fields on periodic or clamped grids and the numerical operations shared by every module.

pub mod commutator;
pub mod diff;
pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod metric;
pub mod mollify;
pub mod norms;
pub mod project;

pub use commutator::{commutator_exponent, commutator_fit, CommutatorFit, Generator};
pub use field::{sym2_eigs, sym2_top_eigvec, ScalarField, SymTensorField, VectorField};
pub use grid::{Boundary, Grid, TimeAxis};
pub use metric::{jacobian, pullback_metric};
pub use diff::d1_fourth;
pub use mollify::{mollify, mollify_vector, Kernel, Mollified};
pub use norms::{discrete_norms, discrete_norms_vector, total_variation, NormReport};
pub use project::{max_spectral_divergence, solenoidal_project};
