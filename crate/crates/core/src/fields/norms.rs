use serde::{Deserialize, Serialize};

use super::diff::{d1, d12, d2};
use super::field::{ScalarField, VectorField};
use super::grid::{Boundary, Grid};

/// Discrete norms. `c1` and `c2` are cumulative: C¹ = C⁰ + sup|Df|, C² = C¹ + sup|D²f|.
/// For space-time fields every entry is the maximum over time slices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub l1: f64,
    pub l2: f64,
    pub tv: f64,
}

pub fn discrete_norms(f: &ScalarField) -> NormReport {
    norms_of(&[&f.values], &f.grid)
}

pub fn discrete_norms_vector(f: &VectorField) -> NormReport {
    let comps: Vec<&Vec<f64>> = f.comps.iter().collect();
    norms_of(&comps, &f.grid)
}

fn norms_of(comps: &[&Vec<f64>], grid: &Grid) -> NormReport {
    let ns = grid.len_space();
    let mut out = NormReport {
        c0: 0.0,
        c1: 0.0,
        c2: 0.0,
        l1: 0.0,
        l2: 0.0,
        tv: 0.0,
    };
    for it in 0..grid.time_samples() {
        let slices: Vec<&[f64]> = comps.iter().map(|c| &c[it * ns..(it + 1) * ns]).collect();
        let r = slice_norms(&slices, &grid.spatial());
        out.c0 = out.c0.max(r.c0);
        out.c1 = out.c1.max(r.c1);
        out.c2 = out.c2.max(r.c2);
        out.l1 = out.l1.max(r.l1);
        out.l2 = out.l2.max(r.l2);
        out.tv = out.tv.max(r.tv);
    }
    out
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn slice_norms(comps: &[&[f64]], grid: &Grid) -> NormReport {
    let ns = grid.len_space();
    let c0 = comps.iter().map(|c| sup(c)).fold(0.0, f64::max);
    let mut g1: f64 = 0.0;
    let mut g2: f64 = 0.0;
    for c in comps {
        for axis in 0..grid.dims {
            g1 = g1.max(sup(&d1(c, grid, axis)));
            g2 = g2.max(sup(&d2(c, grid, axis)));
        }
        if grid.dims == 2 {
            g2 = g2.max(sup(&d12(c, grid)));
        }
    }
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for i in 0..ns {
        let m2: f64 = comps.iter().map(|c| c[i] * c[i]).sum();
        l1 += m2.sqrt() * grid.weight(i);
        l2 += m2 * grid.weight(i);
    }
    let tv = comps.iter().map(|c| total_variation(c, grid)).sum();
    NormReport {
        c0,
        c1: c0 + g1,
        c2: c0 + g1 + g2,
        l1,
        l2: l2.sqrt(),
        tv,
    }
}

/// Sum of absolute jumps; periodic grids count the wrap jump. In 2-D each line sum
/// is weighted by the transverse spacing (anisotropic total variation).
pub fn total_variation(f: &[f64], grid: &Grid) -> f64 {
    let n = grid.resolution;
    let line = |get: &dyn Fn(usize) -> f64| -> f64 {
        let mut s = 0.0;
        for i in 0..n - 1 {
            s += (get(i + 1) - get(i)).abs();
        }
        if grid.boundary == Boundary::Periodic {
            s += (get(0) - get(n - 1)).abs();
        }
        s
    };
    if grid.dims == 1 {
        return line(&|i| f[i]);
    }
    let mut tv = 0.0;
    for j in 0..n {
        tv += grid.weight_1d(j) * line(&|i| f[i + n * j]);
        tv += grid.weight_1d(j) * line(&|i| f[j + n * i]);
    }
    tv
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_field() {
        let g = Grid::periodic(2, 16, 1.0).unwrap();
        let r = discrete_norms(&ScalarField::constant(g, -2.5));
        assert_eq!(r.c0, 2.5);
        assert_eq!(r.c1, 2.5);
        assert_eq!(r.c2, 2.5);
        assert!((r.l2 - 2.5).abs() < 1e-12);
        assert_eq!(r.tv, 0.0);
    }

    #[test]
    fn sine_norms() {
        let g = Grid::periodic(2, 256, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x, _, _| (2.0 * PI * x).sin());
        let r = discrete_norms(&f);
        assert!((r.c0 - 1.0).abs() < 1e-3);
        let grad = r.c1 - r.c0;
        assert!((grad / (2.0 * PI) - 1.0).abs() < 0.01);
        assert!((r.l2 - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn step_tv_conventions() {
        let p = Grid::periodic(1, 16, 1.0).unwrap();
        let c = Grid::clamped(1, 16, 1.0).unwrap();
        let step: Vec<f64> = (0..16).map(|i| if i < 8 { 1.0 } else { -1.0 }).collect();
        assert_eq!(total_variation(&step, &p), 4.0);
        assert_eq!(total_variation(&step, &c), 2.0);
    }
}
