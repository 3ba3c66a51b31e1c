//! Splitting a diagonally dominant deficit into primitive metrics a²ν⊗ν along fixed directions.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::SymTensorField;

/// e₁, e₂, (e₁+e₂)/√2, (e₁−e₂)/√2.
pub const DIRECTIONS: [[f64; 2]; 4] = [
    [1.0, 0.0],
    [0.0, 1.0],
    [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
    [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub nu: [f64; 2],
    /// a² per sample.
    pub a2: Vec<f64>,
}

impl Primitive {
    pub fn is_zero(&self) -> bool {
        self.a2.iter().all(|v| *v == 0.0)
    }

    pub fn amplitude(&self) -> Vec<f64> {
        self.a2.iter().map(|v| v.sqrt()).collect()
    }
}

/// One term per direction of [`DIRECTIONS`]. At a sample with D₁₂ ≥ 0 the last term vanishes,
/// with D₁₂ < 0 the third does, so at most three are active pointwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveDecomposition {
    pub terms: Vec<Primitive>,
}

impl PrimitiveDecomposition {
    /// Terms whose largest a² exceeds `rel` times the largest a² of any term.
    pub fn active(&self, rel: f64) -> impl Iterator<Item = &Primitive> {
        let top = self.terms.iter().flat_map(|t| t.a2.iter()).fold(0.0f64, |m, v| m.max(*v));
        self.terms
            .iter()
            .filter(move |t| t.a2.iter().fold(0.0f64, |m, v| m.max(*v)) > rel * top)
    }

    /// Σ a²ν⊗ν per sample as (11, 12, 22).
    pub fn reassemble(&self, i: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        for t in &self.terms {
            let [p, q] = t.nu;
            out[0] += t.a2[i] * p * p;
            out[1] += t.a2[i] * p * q;
            out[2] += t.a2[i] * q * q;
        }
        out
    }
}

fn dominance_gap(d: [f64; 3]) -> f64 {
    d[0].min(d[2]) - d[1].abs()
}

pub fn primitive_decompose(d: &SymTensorField) -> Result<PrimitiveDecomposition> {
    let n = d.grid.len();
    let scale = (0..n).map(|i| d.at(i).iter().fold(0.0f64, |m, x| m.max(x.abs()))).fold(0.0, f64::max);
    let tol = 1e-14 * scale.max(1e-300);
    let mut a2 = vec![vec![0.0; n]; 4];
    for i in 0..n {
        let e = d.at(i);
        if e.iter().any(|x| !x.is_finite()) {
            return Err(Error::Decomposition {
                msg: format!("non-finite deficit at sample {i}"),
                suggested: 0.0,
            });
        }
        let gap = dominance_gap(e);
        if gap < -tol {
            let [x, y] = d.grid.point(i);
            return Err(Error::Decomposition {
                msg: format!(
                    "|D12| = {:.6e} exceeds min(D11, D22) = {:.6e} at ({x}, {y})",
                    e[1].abs(),
                    e[0].min(e[2])
                ),
                suggested: 0.0,
            });
        }
        let off = e[1].abs();
        a2[0][i] = (e[0] - off).max(0.0);
        a2[1][i] = (e[2] - off).max(0.0);
        if e[1] >= 0.0 {
            a2[2][i] = 2.0 * e[1];
        } else {
            a2[3][i] = -2.0 * e[1];
        }
    }
    Ok(PrimitiveDecomposition {
        terms: DIRECTIONS
            .iter()
            .zip(a2)
            .map(|(nu, a2)| Primitive { nu: *nu, a2 })
            .collect(),
    })
}

/// D − μg with μ = δ·sup|D|/min-eig(g): retains at least δ of the current deficit as margin.
pub fn margin_target(d: &SymTensorField, g: &SymTensorField, delta: f64) -> Result<(SymTensorField, f64)> {
    let dsup = super::geometry::sup_norm(d);
    let gmin = super::geometry::min_eig(g);
    if !(gmin > 0.0) {
        return Err(Error::Domain("target metric must be positive definite".into()));
    }
    let mu = delta * dsup / gmin;
    let e = (0..3)
        .map(|k| d.entries[k].iter().zip(&g.entries[k]).map(|(a, b)| a - mu * b).collect())
        .collect();
    Ok((SymTensorField::new(d.grid, e, false)?, mu))
}

/// Decomposes D − μg; on a dominance failure the error carries the largest δ ≤ `delta`
/// (found by bisection) for which the target is still dominant, or 0 when none is.
pub fn decompose_with_margin(
    d: &SymTensorField,
    g: &SymTensorField,
    delta: f64,
) -> Result<(PrimitiveDecomposition, f64)> {
    let (target, mu) = margin_target(d, g, delta)?;
    match primitive_decompose(&target) {
        Ok(p) => Ok((p, mu)),
        Err(Error::Decomposition { msg, .. }) => {
            let ok = |dl: f64| -> bool {
                margin_target(d, g, dl)
                    .map(|(t, _)| (0..t.grid.len()).all(|i| dominance_gap(t.at(i)) >= 0.0))
                    .unwrap_or(false)
            };
            let suggested = if !ok(0.0) {
                0.0
            } else {
                let (mut lo, mut hi) = (0.0, delta);
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    if ok(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            };
            Err(Error::Decomposition { msg, suggested })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    fn constant(e: [f64; 3]) -> SymTensorField {
        let g = Grid::clamped(2, 16, 1.0).unwrap();
        let n = g.len();
        SymTensorField::new(g, e.iter().map(|v| vec![*v; n]).collect(), false).unwrap()
    }

    #[test]
    fn identity_and_off_diagonal() {
        let p = primitive_decompose(&constant([1.0, 0.0, 1.0])).unwrap();
        assert_eq!(p.terms[0].a2[0], 1.0);
        assert_eq!(p.terms[1].a2[0], 1.0);
        assert_eq!(p.active(0.0).count(), 2);
        let p = primitive_decompose(&constant([2.0, 1.0, 2.0])).unwrap();
        assert_eq!(p.terms[2].a2[7], 2.0);
        assert_eq!(p.terms[0].a2[7], 1.0);
        assert_eq!(p.terms[1].a2[7], 1.0);
        let r = p.reassemble(7);
        assert!((r[0] - 2.0).abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15 && (r[2] - 2.0).abs() < 1e-15);
        let p = primitive_decompose(&constant([2.0, -0.5, 1.0])).unwrap();
        assert!(p.terms[2].is_zero());
        assert_eq!(p.terms[3].a2[0], 1.0);
    }

    #[test]
    fn dominance_failure_suggests_margin() {
        assert!(matches!(
            primitive_decompose(&constant([1.0, 2.0, 1.0])),
            Err(Error::Decomposition { .. })
        ));
        // D − μI stays dominant only for μ ≤ 0.2, i.e. δ ≤ 0.2 / 1.8
        let d = constant([1.0, 0.8, 1.0]);
        let g = constant([1.0, 0.0, 1.0]);
        match decompose_with_margin(&d, &g, 0.5) {
            Err(Error::Decomposition { suggested, .. }) => {
                assert!((suggested - 0.2 / 1.8).abs() < 1e-9, "{suggested}")
            }
            other => panic!("{other:?}"),
        }
        assert!(decompose_with_margin(&d, &g, 0.1).is_ok());
    }
}
