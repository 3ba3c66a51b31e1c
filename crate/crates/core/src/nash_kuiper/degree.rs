//! Change of variables for the Gauss map: ∫_V f(N)κ dA against ∫_{S²} f·deg(·, V, N) dσ.

use serde::{Deserialize, Serialize};

use super::geometry::{check_map, cross, dot, frame};
use crate::error::{Error, Result};
use crate::fields::diff::{d12, d2};
use crate::fields::VectorField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    /// |lhs − rhs| / max(|lhs|, |rhs|), 0 when both vanish.
    pub relative: f64,
}

/// Signed solid angle of the spherical triangle (a, b, c).
pub fn solid_angle(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let num = dot(a, &cross(b, c));
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

/// The grid of `u` covers V (clamped). The left side uses κ = det II / det I from the
/// discrete second fundamental form; the right side sums f at the Gauss image of each
/// parameter triangle times its signed solid angle, which integrates f against the degree.
pub fn gauss_degree_check(u: &VectorField, f: &dyn Fn([f64; 3]) -> f64) -> Result<DegreeCheck> {
    check_map(u)?;
    if u.grid.is_periodic() {
        return Err(Error::InvalidGrid("the degree check runs on a clamped patch".into()));
    }
    let g = u.grid;
    let fr = frame(u)?;
    let n = g.len();
    let second: Vec<[Vec<f64>; 3]> = u
        .comps
        .iter()
        .map(|c| [d2(c, &g, 0), d12(c, &g), d2(c, &g, 1)])
        .collect();
    let mut normals = Vec::with_capacity(n);
    for i in 0..n {
        normals.push(fr.normal(i)?);
    }
    let mut lhs = 0.0;
    for i in 0..n {
        let nv = normals[i];
        let ii: Vec<f64> = (0..3)
            .map(|k| (0..3).map(|c| second[c][k][i] * nv[c]).sum())
            .collect();
        let [e, f1, gg] = fr.metric(i);
        let det1 = e * gg - f1 * f1;
        let det2 = ii[0] * ii[2] - ii[1] * ii[1];
        lhs += f(nv) * det2 / det1.sqrt() * g.weight(i);
    }
    let res = g.resolution;
    let mut rhs = 0.0;
    for j in 0..res - 1 {
        for i in 0..res - 1 {
            let p00 = &normals[g.index(i, j)];
            let p10 = &normals[g.index(i + 1, j)];
            let p11 = &normals[g.index(i + 1, j + 1)];
            let p01 = &normals[g.index(i, j + 1)];
            for (a, b, c) in [(p00, p10, p11), (p00, p11, p01)] {
                let s = [a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]];
                let m = dot(&s, &s).sqrt();
                if !(m > 0.0) {
                    return Err(Error::Immersion("Gauss image triangle spans antipodes".into()));
                }
                rhs += solid_angle(a, b, c) * f([s[0] / m, s[1] / m, s[2] / m]);
            }
        }
    }
    let scale = lhs.abs().max(rhs.abs());
    Ok(DegreeCheck {
        lhs,
        rhs,
        difference: lhs - rhs,
        relative: if scale > 0.0 { (lhs - rhs).abs() / scale } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn octant_solid_angle() {
        let a = [1.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0];
        let c = [0.0, 0.0, 1.0];
        assert!((solid_angle(&a, &b, &c) - PI / 2.0).abs() < 1e-15);
        assert!((solid_angle(&a, &c, &b) + PI / 2.0).abs() < 1e-15);
    }
}
