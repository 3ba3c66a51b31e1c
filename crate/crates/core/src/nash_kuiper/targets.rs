//! Starting maps and target metrics for the runs.

use std::f64::consts::PI;

use crate::error::Result;
use crate::fields::{Grid, SymTensorField, VectorField};

/// Scale applied to the isometric reference to make the start strictly short.
pub const SHRINK: f64 = 0.9;

fn constant_metric(g: Grid, e: [f64; 3]) -> Result<SymTensorField> {
    let n = g.len();
    SymTensorField::new(g, e.iter().map(|v| vec![*v; n]).collect(), false)
}

/// Unit square, g = I, u₀ = 0.9·(x, y, 0): deficit 0.19·I.
pub fn flat_square(resolution: usize) -> Result<(VectorField, SymTensorField)> {
    let g = Grid::clamped(2, resolution, 1.0)?;
    let u = VectorField::from_fn(g, |x, y, _| [SHRINK * x, SHRINK * y, 0.0]);
    Ok((u, constant_metric(g, [1.0, 0.0, 1.0])?))
}

pub const TORUS_R: f64 = 1.0;
pub const TORUS_RHO: f64 = 0.5;
/// Length of the first circle factor of the flat target, r in r²dθ₁² + dθ₂².
pub const FLAT_R: f64 = 2.0;

/// Periodic unit parameter square with θ = 2πs. Start: 0.9 × the torus of revolution with radii
/// (1, ½); target: the flat product metric (2π)²·diag(r², 1), r = 2.
pub fn flat_torus(resolution: usize) -> Result<(VectorField, SymTensorField)> {
    let g = Grid::periodic(2, resolution, 1.0)?;
    let u = VectorField::from_fn(g, |s1, s2, _| {
        let (t1, t2) = (2.0 * PI * s1, 2.0 * PI * s2);
        let w = TORUS_R + TORUS_RHO * t2.cos();
        [
            SHRINK * w * t1.cos(),
            SHRINK * w * t1.sin(),
            SHRINK * TORUS_RHO * t2.sin(),
        ]
    });
    let c = 4.0 * PI * PI;
    Ok((u, constant_metric(g, [c * FLAT_R * FLAT_R, 0.0, c])?))
}
