use std::f64::consts::PI;

use serde::Serialize;

use super::triple::{constraint_margin, SubsolutionTriple};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField};
use crate::tartar::transport::time_bump;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub times: Vec<f64>,
    /// E(t) = ∫ e dx per time sample.
    pub energy: Vec<f64>,
    /// E(t) ≤ E(t0) off isolated spikes.
    pub a: bool,
    /// E nonincreasing off isolated spikes.
    pub b: bool,
    /// E(t) ≤ E(t0) at every sample.
    pub a_prime: bool,
    /// E nonincreasing at every sample.
    pub b_prime: bool,
    /// Largest positive value of −∫∫ e ∂_tψ + (e + p) v·∇ψ over ψ ≥ 0.
    pub local_energy_violation: f64,
    /// Minimum constraint margin when checked from a triple.
    pub min_margin: Option<f64>,
}

pub const DEFAULT_TOL: f64 = 1e-10;

/// Samples kept for the almost-everywhere criteria: strict one-sample spikes are dropped.
fn ae_samples(e: &[f64], tol: f64) -> Vec<usize> {
    (0..e.len())
        .filter(|&i| {
            if i == 0 || i + 1 == e.len() {
                return true;
            }
            e[i] <= e[i - 1].max(e[i + 1]) + tol
        })
        .collect()
}

fn criteria(e: &[f64], keep: &[usize], tol: f64) -> (bool, bool) {
    let e0 = e[0];
    let a = keep.iter().all(|&i| e[i] <= e0 + tol);
    let mut running = f64::INFINITY;
    let mut b = true;
    for &i in keep {
        if e[i] > running + tol {
            b = false;
        }
        running = running.min(e[i]);
    }
    (a, b)
}

/// Criteria (a), (b), (a'), (b') and the local energy inequality for a velocity with
/// energy density ½|v|² and pressure p.
pub fn admissibility(v: &VectorField, p: Option<&ScalarField>, tol: f64) -> Result<AdmissibilityReport> {
    let Some(p) = p else {
        return Err(Error::Config("admissibility needs a pressure".into()));
    };
    if v.ncomp() != 2 || v.grid.dims != 2 || p.grid != v.grid {
        return Err(Error::Shape("v and p must share a 2-D grid".into()));
    }
    let e = ScalarField {
        grid: v.grid,
        values: (0..v.grid.len())
            .map(|i| 0.5 * (v.comps[0][i].powi(2) + v.comps[1][i].powi(2)))
            .collect(),
    };
    report(v, &e, p, tol, None)
}

/// The same checks for a triple, with e = ē and p = q − ē.
pub fn admissibility_triple(t: &SubsolutionTriple, tol: f64) -> Result<AdmissibilityReport> {
    let m = constraint_margin(t)?;
    let p = ScalarField {
        grid: t.grid(),
        values: t.q.values.iter().zip(&t.ebar.values).map(|(q, e)| q - e).collect(),
    };
    report(&t.v, &t.ebar, &p, tol, Some(m.min()))
}

fn report(
    v: &VectorField,
    e: &ScalarField,
    p: &ScalarField,
    tol: f64,
    min_margin: Option<f64>,
) -> Result<AdmissibilityReport> {
    let g = v.grid;
    let Some(ta) = g.time else {
        return Err(Error::InvalidGrid("admissibility needs a time axis".into()));
    };
    if !g.is_periodic() {
        return Err(Error::InvalidGrid("admissibility needs a periodic grid".into()));
    }
    let times: Vec<f64> = (0..ta.samples).map(|i| ta.time(i)).collect();
    let energy: Vec<f64> = (0..ta.samples).map(|i| e.integral(i)).collect();
    let all: Vec<usize> = (0..energy.len()).collect();
    let (a_prime, b_prime) = criteria(&energy, &all, tol);
    let (a, b) = criteria(&energy, &ae_samples(&energy, tol), tol);
    Ok(AdmissibilityReport {
        local_energy_violation: local_energy(v, e, p)?,
        times,
        energy,
        a,
        b,
        a_prime,
        b_prime,
        min_margin,
    })
}

const MODES: [[f64; 2]; 5] = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0], [0.0, 2.0]];

/// ψ = (1 + cos(2πk·x/P + φ)) χ(t) ≥ 0; trapezoid in t, periodic sums in x.
fn local_energy(v: &VectorField, e: &ScalarField, p: &ScalarField) -> Result<f64> {
    let g = v.grid;
    let ta = g.time.expect("checked");
    if ta.samples < 3 {
        return Err(Error::InvalidGrid("need at least 3 time samples".into()));
    }
    let (t0, t1) = (ta.time(0), ta.time(ta.samples - 1));
    let tm = 0.5 * (t0 + t1);
    let windows = [(t0, t1), (t0, tm), (tm, t1)];
    let sg = g.spatial();
    let ns = g.len_space();
    let mut worst: f64 = 0.0;
    for &(a, b) in &windows {
        for k in MODES {
            let kk = [2.0 * PI * k[0] / g.period, 2.0 * PI * k[1] / g.period];
            for phase in [0.0, 0.5 * PI] {
                let mut acc = 0.0;
                for it in 0..ta.samples {
                    let (chi, dchi) = time_bump(ta.time(it), a, b);
                    if chi == 0.0 && dchi == 0.0 {
                        continue;
                    }
                    let wt = if it == 0 || it + 1 == ta.samples { 0.5 * ta.step } else { ta.step };
                    for idx in 0..ns {
                        let i = it * ns + idx;
                        let x = sg.point(idx);
                        let (s, c) = (kk[0] * x[0] + kk[1] * x[1] + phase).sin_cos();
                        let psi = 1.0 + c;
                        let vg = -s * (kk[0] * v.comps[0][i] + kk[1] * v.comps[1][i]);
                        let en = e.values[i];
                        acc += wt * sg.weight(idx) * (en * psi * dchi + (en + p.values[i]) * vg * chi);
                    }
                }
                worst = worst.max(-acc);
            }
        }
    }
    Ok(worst.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    fn grid() -> Grid {
        Grid::periodic(2, 32, 1.0).unwrap().with_time(9, 0.0, 0.125).unwrap()
    }

    #[test]
    fn steady_shear_passes_with_equality() {
        let g = grid();
        let v = VectorField::from_fn(g, |_, y, _| [(2.0 * PI * y).sin(), 0.0]);
        let p = ScalarField::zeros(g);
        let r = admissibility(&v, Some(&p), DEFAULT_TOL).unwrap();
        assert!(r.a && r.b && r.a_prime && r.b_prime);
        assert!(r.local_energy_violation < 1e-12);
        assert!(r.energy.iter().all(|e| (e - 0.25).abs() < 1e-12));
    }

    #[test]
    fn growth_and_reversal() {
        let g = grid();
        let v = VectorField::from_fn(g, |_, _, t| [1.0 - 0.5 * t, 0.0]);
        let rev = VectorField::from_fn(g, |_, _, t| [0.5 + 0.5 * t, 0.0]);
        let p = ScalarField::zeros(g);
        let r = admissibility(&v, Some(&p), DEFAULT_TOL).unwrap();
        assert!(r.b_prime && r.local_energy_violation == 0.0);
        let r = admissibility(&rev, Some(&p), DEFAULT_TOL).unwrap();
        assert!(!r.b_prime && !r.a_prime && !r.b);
        assert!(r.local_energy_violation > 1e-3);
    }

    #[test]
    fn single_spike_only_breaks_primed() {
        let g = grid();
        let v = VectorField::from_fn(g, |_, _, t| [if (t - 0.5).abs() < 1e-9 { 2.0 } else { 1.0 }, 0.0]);
        let r = admissibility(&v, Some(&ScalarField::zeros(g)), DEFAULT_TOL).unwrap();
        assert!(r.a && r.b && !r.a_prime && !r.b_prime);
    }

    #[test]
    fn missing_pressure() {
        let g = grid();
        let v = VectorField::zeros(g, 2);
        assert!(matches!(admissibility(&v, None, 1e-10), Err(Error::Config(_))));
    }
}
