use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::system::LinearSystem;
use crate::error::{Error, Result};
use crate::fields::diff::d1;
use crate::fields::{Grid, VectorField};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaveWitness {
    /// Unit direction in (x, t) space.
    pub xi: Vec<f64>,
    /// |Σ ξ_i A_i a| / |a|.
    pub residual: f64,
}

fn normalize_sign(mut xi: Vec<f64>) -> Vec<f64> {
    let n = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    xi.iter_mut().for_each(|x| *x /= n);
    if let Some(first) = xi.iter().find(|x| x.abs() > 1e-14) {
        if *first < 0.0 {
            xi.iter_mut().for_each(|x| *x = -*x);
        }
    }
    xi
}

/// Relative residual |Σ ξ_i A_i a| / (|ξ| |a|).
pub fn relative_residual(sys: &LinearSystem, a: &DVector<f64>, xi: &[f64]) -> f64 {
    let nx = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    sys.apply(xi, a).norm() / (nx * a.norm())
}

/// Looks for a unit ξ with |Σ ξ_i A_i a| ≤ tol·|a|·max‖A_i‖.
///
/// Candidates come from exact kernels of single columns and coordinate 2-planes of
/// B = [A_1 a | ... | A_d a], then from the smallest right singular vector of B.
pub fn wave_cone_contains(sys: &LinearSystem, a: &DVector<f64>, tol: f64) -> Result<Option<WaveWitness>> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    if a.len() != sys.n_state {
        return Err(Error::Shape(format!("state has {} entries, system expects {}", a.len(), sys.n_state)));
    }
    let an = a.norm();
    if an == 0.0 {
        return Err(Error::Config("state must be nonzero".into()));
    }
    let scale = sys.max_norm();
    let d = sys.d;
    if scale == 0.0 {
        let mut xi = vec![0.0; d];
        xi[0] = 1.0;
        return Ok(Some(WaveWitness { xi, residual: 0.0 }));
    }
    let cols: Vec<DVector<f64>> = sys.a.iter().map(|m| m * a).collect();
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        candidates.push(e);
        for j in i + 1..d {
            let (bi, bj) = (&cols[i], &cols[j]);
            let mut xi = vec![0.0; d];
            xi[i] = bj.dot(bj);
            xi[j] = -bi.dot(bj);
            if xi[i] != 0.0 || xi[j] != 0.0 {
                candidates.push(xi);
            }
        }
    }
    let rows = sys.m.max(d);
    let mut b = DMatrix::zeros(rows, d);
    for (j, c) in cols.iter().enumerate() {
        b.view_mut((0, j), (sys.m, 1)).copy_from(c);
    }
    let svd = b.svd(false, true);
    if let Some(vt) = svd.v_t {
        let (k, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (k, s)| if *s < best.1 { (k, *s) } else { best });
        candidates.push(vt.row(k).iter().copied().collect());
    }
    let best = candidates
        .into_iter()
        .map(|xi| {
            let r = relative_residual(sys, a, &xi);
            (xi, r)
        })
        .fold(None::<(Vec<f64>, f64)>, |acc, (xi, r)| match acc {
            Some((_, br)) if br <= r => acc,
            _ => Some((xi, r)),
        });
    Ok(best.and_then(|(xi, r)| {
        (r <= tol * scale).then(|| WaveWitness {
            xi: normalize_sign(xi),
            residual: r,
        })
    }))
}

/// z(y) = a·h(ξ·y) sampled on `grid`.
///
/// The first `grid.dims` entries of ξ are spatial and must be integer multiples of
/// 1/period so that z is periodic; when the system carries a time variable the grid
/// needs a time axis and ξ one more entry.
pub fn plane_wave(
    sys: &LinearSystem,
    a: &DVector<f64>,
    xi: &[f64],
    h: impl Fn(f64) -> f64,
    grid: &Grid,
    tol: f64,
) -> Result<VectorField> {
    grid.validate()?;
    let with_time = sys.d == grid.dims + 1;
    if xi.len() != sys.d || !(with_time || sys.d == grid.dims) {
        return Err(Error::Shape(format!(
            "direction has {} entries; system has d = {} on a {}-D grid",
            xi.len(),
            sys.d,
            grid.dims
        )));
    }
    if with_time && grid.time_samples() < 3 {
        return Err(Error::InvalidGrid("time-dependent waves need at least 3 time samples".into()));
    }
    if grid.is_periodic() {
        for (i, x) in xi.iter().take(grid.dims).enumerate() {
            let k = x * grid.period;
            if (k - k.round()).abs() > 1e-9 {
                return Err(Error::InvalidWave(format!(
                    "spatial direction component {i} = {x} is not on the period lattice"
                )));
            }
        }
    }
    let r = relative_residual(sys, a, xi);
    let scale = sys.max_norm();
    if !(r <= tol * scale) {
        return Err(Error::InvalidWave(format!(
            "direction is not a wave-cone witness: residual {r:e} > {:e}",
            tol * scale
        )));
    }
    let ns = grid.len_space();
    let mut comps = vec![Vec::with_capacity(grid.len()); sys.n_state];
    for it in 0..grid.time_samples() {
        let t = grid.time.map(|ta| ta.time(it)).unwrap_or(0.0);
        for idx in 0..ns {
            let p = grid.point(idx);
            let mut y = 0.0;
            for i in 0..grid.dims {
                y += xi[i] * p[i];
            }
            if with_time {
                y += xi[grid.dims] * t;
            }
            let hv = h(y);
            for (c, comp) in comps.iter_mut().enumerate() {
                comp.push(a[c] * hv);
            }
        }
    }
    VectorField::new(*grid, comps)
}

/// Sup over the evaluated slice of |Σ A_i D_i z| with centered differences.
///
/// Space-time fields are evaluated on the middle time sample with a centered time
/// difference; purely spatial systems use the single slice.
pub fn discrete_residual(sys: &LinearSystem, z: &VectorField) -> Result<f64> {
    let g = z.grid;
    if z.ncomp() != sys.n_state {
        return Err(Error::Shape("state field does not match the system".into()));
    }
    let with_time = sys.d == g.dims + 1;
    if !(with_time || sys.d == g.dims) {
        return Err(Error::Shape("system dimension does not match the grid".into()));
    }
    let ns = g.len_space();
    let sg = g.spatial();
    let it = if with_time {
        if g.time_samples() < 3 {
            return Err(Error::InvalidGrid("need 3 time samples".into()));
        }
        g.time_samples() / 2
    } else {
        0
    };
    let mut res = vec![vec![0.0; ns]; sys.m];
    for c in 0..sys.n_state {
        let slice = &z.comps[c][it * ns..(it + 1) * ns];
        for axis in 0..g.dims {
            let dz = d1(slice, &sg, axis);
            for r in 0..sys.m {
                let coef = sys.a[axis][(r, c)];
                if coef != 0.0 {
                    for (o, v) in res[r].iter_mut().zip(&dz) {
                        *o += coef * v;
                    }
                }
            }
        }
        if with_time {
            let dt = g.time.map(|t| t.step).unwrap_or(1.0);
            for r in 0..sys.m {
                let coef = sys.a[g.dims][(r, c)];
                if coef != 0.0 {
                    for i in 0..ns {
                        let dzdt = (z.comps[c][(it + 1) * ns + i] - z.comps[c][(it - 1) * ns + i]) / (2.0 * dt);
                        res[r][i] += coef * dzdt;
                    }
                }
            }
        }
    }
    Ok(res
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0, |m, x| m.max(x.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tartar::system::{euler_linear_system, euler_state, gradient_system};
    use std::f64::consts::PI;

    #[test]
    fn euler_shear_witness() {
        let s = euler_linear_system(2).unwrap();
        let a = euler_state(&[1.0, 0.0], &[0.0; 4], 0.0).unwrap();
        let w = wave_cone_contains(&s, &a, 1e-10).unwrap().unwrap();
        assert!(w.residual < 1e-15);
        assert!((w.xi[1].abs() - 1.0).abs() < 1e-14);
        assert!(w.xi[0].abs() < 1e-14 && w.xi[2].abs() < 1e-14);
    }

    #[test]
    fn zero_operator_accepts_everything() {
        let s = LinearSystem::new(vec![DMatrix::zeros(2, 3); 3]).unwrap();
        let a = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        assert!(wave_cone_contains(&s, &a, 1e-12).unwrap().is_some());
    }

    #[test]
    fn gradient_cone_is_rank_one() {
        let s = gradient_system();
        let rank_one = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert!(wave_cone_contains(&s, &rank_one, 1e-6).unwrap().is_some());
        let rot = DVector::from_vec(vec![0.0, -1.0, 1.0, 0.0]);
        assert!(wave_cone_contains(&s, &rot, 1e-6).unwrap().is_none());
        let generic = DVector::from_vec(vec![2.0, -1.0, 6.0, -3.0]);
        let w = wave_cone_contains(&s, &generic, 1e-10).unwrap().unwrap();
        // a = (1, 3) ⊗ (2, −1) needs ξ ∥ (2, −1)
        assert!((w.xi[0] * 1.0 + w.xi[1] * 2.0).abs() < 1e-10);
    }

    #[test]
    fn bad_tolerance_and_state() {
        let s = gradient_system();
        let a = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert!(wave_cone_contains(&s, &a, 0.0).is_err());
        assert!(wave_cone_contains(&s, &DVector::zeros(4), 1e-6).is_err());
    }

    #[test]
    fn constant_profile_has_zero_residual() {
        let s = euler_linear_system(2).unwrap();
        let a = euler_state(&[1.0, 0.0], &[0.0; 4], 0.0).unwrap();
        let g = Grid::periodic(2, 32, 1.0).unwrap().with_time(3, 0.0, 1.0 / 32.0).unwrap();
        let z = plane_wave(&s, &a, &[0.0, 1.0, 0.0], |_| 2.0, &g, 1e-10).unwrap();
        assert_eq!(discrete_residual(&s, &z).unwrap(), 0.0);
    }

    #[test]
    fn non_witness_rejected_and_off_lattice_rejected() {
        let s = euler_linear_system(2).unwrap();
        let a = euler_state(&[1.0, 0.0], &[0.0; 4], 0.0).unwrap();
        let g = Grid::periodic(2, 32, 1.0).unwrap().with_time(3, 0.0, 1.0 / 32.0).unwrap();
        let sine = |y: f64| (2.0 * PI * y).sin();
        assert!(matches!(
            plane_wave(&s, &a, &[1.0, 0.0, 0.0], sine, &g, 1e-10),
            Err(Error::InvalidWave(_))
        ));
        assert!(matches!(
            plane_wave(&s, &a, &[0.0, 0.5, 0.0], sine, &g, 1e-10),
            Err(Error::InvalidWave(_))
        ));
    }
}
