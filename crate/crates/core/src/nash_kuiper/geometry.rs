//! Induced metrics, shortness margins and discrete seminorms of maps from a 2-D parameter grid into R³.

use crate::error::{Error, Result};
use crate::fields::diff::{d12, d1_fourth, d2};
use crate::fields::{sym2_eigs, Grid, ScalarField, SymTensorField, VectorField};

/// Tangent frame ∂1u, ∂2u per sample from fourth-order differences.
#[derive(Clone, Debug)]
pub struct Frame {
    pub grid: Grid,
    pub d1: Vec<[f64; 3]>,
    pub d2: Vec<[f64; 3]>,
}

pub(crate) fn check_map(u: &VectorField) -> Result<()> {
    u.grid.validate()?;
    if u.grid.dims != 2 || u.grid.time.is_some() {
        return Err(Error::InvalidGrid("immersions live on a 2-D spatial grid".into()));
    }
    if u.ncomp() != 3 {
        return Err(Error::Shape(format!("immersion needs 3 components, got {}", u.ncomp())));
    }
    if u.grid.resolution < 5 {
        return Err(Error::InvalidGrid("immersion grids need at least 5 samples per axis".into()));
    }
    Ok(())
}

pub(crate) fn check_metric(g: &SymTensorField, grid: &Grid) -> Result<()> {
    if !g.grid.same_space(grid) || g.grid.time.is_some() {
        return Err(Error::Shape("metric and map grids differ".into()));
    }
    if g.entries.len() != 3 {
        return Err(Error::Shape("metric needs 3 entries".into()));
    }
    Ok(())
}

pub fn frame(u: &VectorField) -> Result<Frame> {
    check_map(u)?;
    let g = u.grid;
    let a: Vec<Vec<f64>> = u.comps.iter().map(|c| d1_fourth(c, &g, 0)).collect();
    let b: Vec<Vec<f64>> = u.comps.iter().map(|c| d1_fourth(c, &g, 1)).collect();
    let n = g.len();
    Ok(Frame {
        grid: g,
        d1: (0..n).map(|i| [a[0][i], a[1][i], a[2][i]]).collect(),
        d2: (0..n).map(|i| [b[0][i], b[1][i], b[2][i]]).collect(),
    })
}

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl Frame {
    pub fn metric(&self, i: usize) -> [f64; 3] {
        [
            dot(&self.d1[i], &self.d1[i]),
            dot(&self.d1[i], &self.d2[i]),
            dot(&self.d2[i], &self.d2[i]),
        ]
    }

    /// Unit normal ∂1u × ∂2u / |·|.
    pub fn normal(&self, i: usize) -> Result<[f64; 3]> {
        let c = cross(&self.d1[i], &self.d2[i]);
        let m = dot(&c, &c).sqrt();
        if !(m > 1e-12) {
            let [x, y] = self.grid.point(i);
            return Err(Error::Immersion(format!("degenerate normal at ({x}, {y})")));
        }
        Ok([c[0] / m, c[1] / m, c[2] / m])
    }
}

/// u♯e with fourth-order differences.
pub fn induced_metric(u: &VectorField) -> Result<SymTensorField> {
    let f = frame(u)?;
    let n = u.grid.len();
    let mut e = vec![vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let m = f.metric(i);
        for k in 0..3 {
            e[k][i] = m[k];
        }
    }
    SymTensorField::new(u.grid, e, false)
}

/// Smallest singular value of the Jacobian over all samples.
pub fn immersion_margin(u: &VectorField) -> Result<f64> {
    let m = induced_metric(u)?;
    Ok((0..u.grid.len())
        .map(|i| {
            let [a, b, c] = m.at(i);
            sym2_eigs(a, b, c).0.max(0.0).sqrt()
        })
        .fold(f64::INFINITY, f64::min))
}

/// g − u♯e.
pub fn deficit(u: &VectorField, g: &SymTensorField) -> Result<SymTensorField> {
    let m = induced_metric(u)?;
    check_metric(g, &u.grid)?;
    let e = (0..3)
        .map(|k| m.entries[k].iter().zip(&g.entries[k]).map(|(a, b)| b - a).collect())
        .collect();
    SymTensorField::new(u.grid, e, false)
}

/// Smallest eigenvalue of g − u♯e per sample.
pub fn shortness_check(u: &VectorField, g: &SymTensorField) -> Result<ScalarField> {
    let d = deficit(u, g)?;
    let values = (0..u.grid.len())
        .map(|i| {
            let [a, b, c] = d.at(i);
            sym2_eigs(a, b, c).0
        })
        .collect();
    ScalarField::new(u.grid, values)
}

/// Largest eigenvalue modulus over all samples.
pub fn sup_norm(d: &SymTensorField) -> f64 {
    (0..d.grid.len())
        .map(|i| {
            let [a, b, c] = d.at(i);
            let (lo, hi) = sym2_eigs(a, b, c);
            lo.abs().max(hi.abs())
        })
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue over all samples.
pub fn min_eig(d: &SymTensorField) -> f64 {
    (0..d.grid.len())
        .map(|i| {
            let [a, b, c] = d.at(i);
            sym2_eigs(a, b, c).0
        })
        .fold(f64::INFINITY, f64::min)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Seminorm sup |Du| over samples, components and axes.
pub fn c1_seminorm(u: &VectorField) -> f64 {
    let g = u.grid.spatial();
    u.comps
        .iter()
        .map(|c| sup(&d1_fourth(c, &g, 0)).max(sup(&d1_fourth(c, &g, 1))))
        .fold(0.0, f64::max)
}

/// Seminorm sup |D²u| over samples, components and second partials.
pub fn c2_seminorm(u: &VectorField) -> f64 {
    let g = u.grid.spatial();
    u.comps
        .iter()
        .map(|c| sup(&d2(c, &g, 0)).max(sup(&d2(c, &g, 1))).max(sup(&d12(c, &g))))
        .fold(0.0, f64::max)
}

pub fn difference(a: &VectorField, b: &VectorField) -> VectorField {
    VectorField {
        grid: a.grid,
        comps: a
            .comps
            .iter()
            .zip(&b.comps)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(scale: f64) -> VectorField {
        let g = Grid::clamped(2, 16, 1.0).unwrap();
        VectorField::from_fn(g, |x, y, _| [scale * x, scale * y, 0.0])
    }

    fn unit_metric(g: Grid) -> SymTensorField {
        let n = g.len();
        SymTensorField::new(g, vec![vec![1.0; n], vec![0.0; n], vec![1.0; n]], false).unwrap()
    }

    #[test]
    fn half_identity_margin() {
        let u = identity(0.5);
        let m = shortness_check(&u, &unit_metric(u.grid)).unwrap();
        assert!(m.values.iter().all(|v| (v - 0.75).abs() < 1e-12));
        let iso = identity(1.0);
        let m = shortness_check(&iso, &unit_metric(iso.grid)).unwrap();
        assert!(m.values.iter().all(|v| v.abs() < 1e-12));
        let g = iso.grid;
        let long = VectorField::from_fn(g, |x, y, _| [1.5 * x, y, 0.0]);
        let m = shortness_check(&long, &unit_metric(g)).unwrap();
        assert!(m.values.iter().all(|v| (v + 1.25).abs() < 1e-12));
    }

    #[test]
    fn degenerate_normal_reported() {
        let g = Grid::clamped(2, 16, 1.0).unwrap();
        let line = VectorField::from_fn(g, |x, _, _| [x, 0.0, 0.0]);
        let f = frame(&line).unwrap();
        assert!(matches!(f.normal(3), Err(Error::Immersion(_))));
        assert_eq!(immersion_margin(&line).unwrap(), 0.0);
    }

    #[test]
    fn seminorms_of_quadratic() {
        let g = Grid::clamped(2, 32, 1.0).unwrap();
        let u = VectorField::from_fn(g, |x, y, _| [x, y, x * x + 0.5 * x * y]);
        assert!((c1_seminorm(&u) - 2.5).abs() < 1e-10);
        assert!((c2_seminorm(&u) - 2.0).abs() < 1e-8);
    }
}
