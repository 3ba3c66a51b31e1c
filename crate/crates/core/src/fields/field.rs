use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub grid: Grid,
    pub comps: Vec<Vec<f64>>,
}

/// Symmetric tensor field; in 2-D the entries are ordered (11, 12, 22).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymTensorField {
    pub grid: Grid,
    pub entries: Vec<Vec<f64>>,
    pub traceless: bool,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "scalar field needs {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x1, x2, t)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let ns = grid.len_space();
        let mut values = Vec::with_capacity(grid.len());
        for it in 0..grid.time_samples() {
            let t = grid.time.map_or(0.0, |ax| ax.time(it));
            for idx in 0..ns {
                let [x1, x2] = grid.point(idx);
                values.push(f(x1, x2, t));
            }
        }
        Self { grid, values }
    }

    pub fn slice(&self, it: usize) -> &[f64] {
        let ns = self.grid.len_space();
        &self.values[it * ns..(it + 1) * ns]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Spatial integral of time slice `it`.
    pub fn integral(&self, it: usize) -> f64 {
        self.slice(it)
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.grid.weight(i))
            .sum()
    }
}

impl VectorField {
    pub fn new(grid: Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
        grid.validate()?;
        if comps.is_empty() {
            return Err(Error::Shape("vector field needs components".into()));
        }
        for c in &comps {
            if c.len() != grid.len() {
                return Err(Error::Shape(format!(
                    "component needs {} samples, got {}",
                    grid.len(),
                    c.len()
                )));
            }
        }
        Ok(Self { grid, comps })
    }

    pub fn zeros(grid: Grid, ncomp: usize) -> Self {
        Self {
            grid,
            comps: vec![vec![0.0; grid.len()]; ncomp],
        }
    }

    pub fn from_fn<const M: usize>(grid: Grid, f: impl Fn(f64, f64, f64) -> [f64; M]) -> Self {
        let ns = grid.len_space();
        let mut comps = vec![Vec::with_capacity(grid.len()); M];
        for it in 0..grid.time_samples() {
            let t = grid.time.map_or(0.0, |ax| ax.time(it));
            for idx in 0..ns {
                let [x1, x2] = grid.point(idx);
                let v = f(x1, x2, t);
                for (c, val) in comps.iter_mut().zip(v) {
                    c.push(val);
                }
            }
        }
        Self { grid, comps }
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, c: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.comps[c].clone(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn at(&self, idx: usize) -> Vec<f64> {
        self.comps.iter().map(|c| c[idx]).collect()
    }
}

impl SymTensorField {
    pub fn new(grid: Grid, entries: Vec<Vec<f64>>, traceless: bool) -> Result<Self> {
        grid.validate()?;
        let need = grid.dims * (grid.dims + 1) / 2;
        if entries.len() != need {
            return Err(Error::Shape(format!(
                "symmetric tensor needs {need} entries, got {}",
                entries.len()
            )));
        }
        for e in &entries {
            if e.len() != grid.len() {
                return Err(Error::Shape("tensor entry length mismatch".into()));
            }
        }
        let t = Self {
            grid,
            entries,
            traceless,
        };
        if traceless {
            t.check_traceless()?;
        }
        Ok(t)
    }

    pub fn zeros(grid: Grid, traceless: bool) -> Self {
        let need = grid.dims * (grid.dims + 1) / 2;
        Self {
            grid,
            entries: vec![vec![0.0; grid.len()]; need],
            traceless,
        }
    }

    /// Largest |trace| relative to the largest entry at the same sample.
    pub fn check_traceless(&self) -> Result<()> {
        if self.grid.dims != 2 {
            return Ok(());
        }
        for i in 0..self.grid.len() {
            let (a, b, c) = (self.entries[0][i], self.entries[1][i], self.entries[2][i]);
            let scale = a.abs().max(b.abs()).max(c.abs());
            if (a + c).abs() > 1e-12 * scale {
                return Err(Error::Type(format!(
                    "tensor flagged traceless has trace {} at sample {i}",
                    a + c
                )));
            }
        }
        Ok(())
    }

    /// 2-D entries at one sample.
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [
            self.entries[0][idx],
            self.entries[1][idx],
            self.entries[2][idx],
        ]
    }
}

/// Eigenvalues (min, max) of the symmetric 2x2 matrix [[a, b], [b, c]].
pub fn sym2_eigs(a: f64, b: f64, c: f64) -> (f64, f64) {
    let m = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (m - r, m + r)
}

/// Unit eigenvector of the largest eigenvalue of [[a, b], [b, c]]; ties resolve to e1.
pub fn sym2_top_eigvec(a: f64, b: f64, c: f64) -> [f64; 2] {
    let scale = a.abs().max(b.abs()).max(c.abs()).max(1e-300);
    if b.abs() <= 1e-14 * scale {
        if c > a + 1e-14 * scale {
            return [0.0, 1.0];
        }
        return [1.0, 0.0];
    }
    let (_, lmax) = sym2_eigs(a, b, c);
    let v = [b, lmax - a];
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let mut w = [v[0] / n, v[1] / n];
    if w[0] < 0.0 || (w[0] == 0.0 && w[1] < 0.0) {
        w = [-w[0], -w[1]];
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_2x2() {
        let (lo, hi) = sym2_eigs(1.0, 0.0, 0.0);
        assert_eq!((lo, hi), (0.0, 1.0));
        let (lo, hi) = sym2_eigs(2.0, 1.0, 2.0);
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
        assert_eq!(sym2_top_eigvec(0.5, 0.0, 0.5), [1.0, 0.0]);
        assert_eq!(sym2_top_eigvec(0.0, 0.0, 1.0), [0.0, 1.0]);
        let w = sym2_top_eigvec(1.0, 1.0, 1.0);
        assert!((w[0] - w[1]).abs() < 1e-15);
    }

    #[test]
    fn traceless_flag_is_checked() {
        let g = Grid::periodic(2, 8, 1.0).unwrap();
        let n = g.len();
        assert!(SymTensorField::new(g, vec![vec![1.0; n], vec![0.0; n], vec![-1.0; n]], true).is_ok());
        assert!(SymTensorField::new(g, vec![vec![1.0; n], vec![0.0; n], vec![0.0; n]], true).is_err());
    }
}
