use super::diff::d1;
use super::field::{SymTensorField, VectorField};
use crate::error::{Error, Result};

/// Jacobian columns ∂1u and ∂2u of a map on one spatial slice, per component.
pub fn jacobian(u: &VectorField) -> Result<[Vec<Vec<f64>>; 2]> {
    let g = u.grid.spatial();
    g.validate()?;
    if g.dims != 2 {
        return Err(Error::InvalidGrid("pullback needs a 2-D parameter grid".into()));
    }
    if u.ncomp() < 2 {
        return Err(Error::Shape("pullback needs a map into R^m with m >= 2".into()));
    }
    if u.grid.time.is_some() {
        return Err(Error::Shape("pullback acts on a single spatial slice".into()));
    }
    let du1 = u.comps.iter().map(|c| d1(c, &g, 0)).collect();
    let du2 = u.comps.iter().map(|c| d1(c, &g, 1)).collect();
    Ok([du1, du2])
}

/// (∂iu · ∂ju) with centered differences, one-sided at clamped edges.
pub fn pullback_metric(u: &VectorField) -> Result<SymTensorField> {
    let [a, b] = jacobian(u)?;
    let n = u.grid.len();
    let mut g11 = vec![0.0; n];
    let mut g12 = vec![0.0; n];
    let mut g22 = vec![0.0; n];
    for c in 0..u.ncomp() {
        for i in 0..n {
            g11[i] += a[c][i] * a[c][i];
            g12[i] += a[c][i] * b[c][i];
            g22[i] += b[c][i] * b[c][i];
        }
    }
    Ok(SymTensorField {
        grid: u.grid,
        entries: vec![g11, g12, g22],
        traceless: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::field::sym2_eigs;
    use crate::fields::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn linear_maps() {
        let g = Grid::clamped(2, 16, 1.0).unwrap();
        let id = VectorField::from_fn(g, |x, y, _| [x, y, 0.0]);
        let m = pullback_metric(&id).unwrap();
        for i in 0..g.len() {
            let e = m.at(i);
            assert!((e[0] - 1.0).abs() < 1e-12 && e[1].abs() < 1e-12 && (e[2] - 1.0).abs() < 1e-12);
        }
        let st = VectorField::from_fn(g, |x, y, _| [2.0 * x, y, 0.0]);
        let m = pullback_metric(&st).unwrap();
        assert!((m.at(5)[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn flat_cylinder_is_isometric() {
        let g = Grid::periodic(2, 256, 1.0).unwrap();
        let r = 1.0 / (2.0 * PI);
        let cyl = VectorField::from_fn(g, |x, y, _| {
            [r * (2.0 * PI * x).cos(), r * (2.0 * PI * x).sin(), y]
        });
        // the third coordinate is not periodic in y: evaluate the metric on interior rows only
        let m = pullback_metric(&cyl).unwrap();
        let n = g.resolution;
        let h = g.spacing();
        let expected11 = ((2.0 * PI * h).sin() / (2.0 * PI * h)).powi(2);
        for j in 1..n - 1 {
            for i in 0..n {
                let e = m.at(i + n * j);
                assert!((e[0] - expected11).abs() < 1e-12);
                assert!((e[2] - 1.0).abs() < 1e-12);
                assert!(e[1].abs() < 1e-12);
            }
        }
        assert!((expected11 - 1.0).abs() < 1e-3);
        let (lo, _) = sym2_eigs(m.at(3)[0], m.at(3)[1], m.at(3)[2]);
        assert!(lo >= -1e-10);
    }
}
