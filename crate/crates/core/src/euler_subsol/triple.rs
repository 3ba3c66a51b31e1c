use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{sym2_eigs, Grid, ScalarField, SymTensorField, VectorField};

/// Pointwise state of a subsolution in 2-D: u holds (u11, u12, u22).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointState {
    pub v: [f64; 2],
    pub u: [f64; 3],
    pub q: f64,
    pub ebar: f64,
}

/// λ_max(v⊗v − u) for 2-D states.
pub fn lambda_max(v: [f64; 2], u: [f64; 3]) -> f64 {
    sym2_eigs(v[0] * v[0] - u[0], v[0] * v[1] - u[1], v[1] * v[1] - u[2]).1
}

/// (n/2) λ_max(v⊗v − u) with n = 2.
pub fn generalized_energy_at(v: [f64; 2], u: [f64; 3]) -> f64 {
    lambda_max(v, u)
}

/// (2/n) ē − λ_max(v⊗v − u) with n = 2.
pub fn margin_at(p: &PointState) -> f64 {
    p.ebar - lambda_max(p.v, p.u)
}

/// (v, u, q) with energy density ē sampled on one space-time grid; u is traceless.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsolutionTriple {
    pub v: VectorField,
    pub u: SymTensorField,
    pub q: ScalarField,
    pub ebar: ScalarField,
}

impl SubsolutionTriple {
    pub fn new(v: VectorField, u: SymTensorField, q: ScalarField, ebar: ScalarField) -> Result<Self> {
        let g = v.grid;
        if g.dims != 2 || v.ncomp() != 2 || u.entries.len() != 3 {
            return Err(Error::Shape("subsolutions live on 2-D grids with 2 velocity components".into()));
        }
        if u.grid != g || q.grid != g || ebar.grid != g {
            return Err(Error::Shape("v, u, q and ebar must share one grid".into()));
        }
        if !u.traceless {
            return Err(Error::Type("u must be flagged traceless".into()));
        }
        u.check_traceless()?;
        Ok(Self { v, u, q, ebar })
    }

    pub fn grid(&self) -> Grid {
        self.v.grid
    }

    pub fn at(&self, i: usize) -> PointState {
        PointState {
            v: [self.v.comps[0][i], self.v.comps[1][i]],
            u: self.u.at(i),
            q: self.q.values[i],
            ebar: self.ebar.values[i],
        }
    }

    /// Equality case u = v⊗v − (|v|²/2) I, ē = ½|v|², with pressure-like q.
    pub fn from_velocity(v: VectorField, q: ScalarField) -> Result<Self> {
        let g = v.grid;
        let n = g.len();
        let mut u = SymTensorField::zeros(g, true);
        let mut e = ScalarField::zeros(g);
        for i in 0..n {
            let (a, b) = (v.comps[0][i], v.comps[1][i]);
            let h = 0.5 * (a * a - b * b);
            u.entries[0][i] = h;
            u.entries[1][i] = a * b;
            u.entries[2][i] = -h;
            e.values[i] = 0.5 * (a * a + b * b);
        }
        Self::new(v, u, q, e)
    }
}

fn check_u(u: &SymTensorField) -> Result<()> {
    if !u.traceless {
        return Err(Error::Type("u must be traceless".into()));
    }
    u.check_traceless()
}

pub fn constraint_margin(t: &SubsolutionTriple) -> Result<ScalarField> {
    check_u(&t.u)?;
    let g = t.grid();
    Ok(ScalarField {
        grid: g,
        values: (0..g.len()).map(|i| margin_at(&t.at(i))).collect(),
    })
}

pub fn generalized_energy(v: &VectorField, u: &SymTensorField) -> Result<ScalarField> {
    check_u(u)?;
    if v.grid != u.grid || v.ncomp() != 2 {
        return Err(Error::Shape("v and u must share a 2-D grid".into()));
    }
    let g = v.grid;
    Ok(ScalarField {
        grid: g,
        values: (0..g.len())
            .map(|i| generalized_energy_at([v.comps[0][i], v.comps[1][i]], u.at(i)))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_point(v: [f64; 2], u: [f64; 3], ebar: f64) -> SubsolutionTriple {
        let g = Grid::periodic(2, 8, 1.0).unwrap();
        SubsolutionTriple::new(
            VectorField::from_fn(g, |_, _, _| v),
            SymTensorField::new(g, u.iter().map(|x| vec![*x; g.len()]).collect(), true).unwrap(),
            ScalarField::zeros(g),
            ScalarField::constant(g, ebar),
        )
        .unwrap()
    }

    #[test]
    fn margin_examples() {
        let m = constraint_margin(&one_point([0.0, 0.0], [0.0; 3], 0.5)).unwrap();
        assert!(m.values.iter().all(|x| (*x - 0.5).abs() < 1e-15));
        let m = constraint_margin(&one_point([1.0, 0.0], [0.0; 3], 0.5)).unwrap();
        assert!(m.values.iter().all(|x| (*x + 0.5).abs() < 1e-15));
        let v = [0.6, -0.8];
        let h = 0.5 * (v[0] * v[0] - v[1] * v[1]);
        let m = constraint_margin(&one_point(v, [h, v[0] * v[1], -h], 0.5)).unwrap();
        assert!(m.values.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn energy_examples() {
        assert_eq!(generalized_energy_at([1.0, 0.0], [0.0; 3]), 1.0);
        assert!((generalized_energy_at([0.0, 0.0], [0.3, 0.0, -0.3]) - 0.3).abs() < 1e-15);
        assert_eq!(generalized_energy_at([0.0, 0.0], [0.0; 3]), 0.0);
    }

    #[test]
    fn trace_required() {
        let g = Grid::periodic(2, 8, 1.0).unwrap();
        let u = SymTensorField::new(g, vec![vec![1.0; 64], vec![0.0; 64], vec![1.0; 64]], false).unwrap();
        let v = VectorField::zeros(g, 2);
        assert!(matches!(generalized_energy(&v, &u), Err(Error::Type(_))));
    }
}
