//! Mixing-zone subsolution for the incompressible porous media system with heavy fluid
//! on top: θ = +1 for x2 > 0. Inside |x2| < ct, θ = x2/(ct) and the relaxed flux is
//! q = (0, (c/2)(ζ² − 1)), so ∂_tθ + div q = 0 with q continuous across ±ct.

use serde::Serialize;

use super::residual::{gauss_rule, panel_nodes, TIME_PANELS};
use super::shear::shear_grid;
use crate::error::{Error, Result};
use crate::fields::commutator::fit_slope;
use crate::fields::{Grid, ScalarField, VectorField};
use crate::tartar::transport::time_bump;
use crate::tartar::{multiplier_apply, Multiplier};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuskatProfile {
    pub c: f64,
    pub t_end: f64,
}

impl MuskatProfile {
    pub fn new(c: f64, t_end: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && t_end > 0.0) {
            return Err(Error::Range("c and T must be positive".into()));
        }
        if c * t_end >= 0.5 {
            return Err(Error::Wrap(format!("mixing zone 2cT = {} too wide", 2.0 * c * t_end)));
        }
        Ok(Self { c, t_end })
    }

    /// (θ, q2) at height x2 ∈ [−½, ½) and time t.
    pub fn state(&self, x2: f64, t: f64) -> (f64, f64) {
        let x2 = (x2 + 0.5).rem_euclid(1.0) - 0.5;
        let w = self.c * t;
        if x2.abs() < w {
            let z = x2 / w;
            (z, 0.5 * self.c * (z * z - 1.0))
        } else if x2 >= 0.0 {
            (1.0, 0.0)
        } else {
            (-1.0, 0.0)
        }
    }
}

#[derive(Clone, Debug)]
pub struct MuskatSubsolution {
    pub profile: MuskatProfile,
    pub theta: ScalarField,
    pub flux: VectorField,
}

pub fn build_muskat_subsolution(c: f64, t_end: f64, resolution: usize, time_samples: usize) -> Result<MuskatSubsolution> {
    let profile = MuskatProfile::new(c, t_end)?;
    let grid = shear_grid(resolution, time_samples, t_end)?;
    let theta = ScalarField::from_fn(grid, |_, x2, t| profile.state(x2, t).0);
    let flux = VectorField::from_fn(grid, |_, x2, t| [0.0, profile.state(x2, t).1]);
    Ok(MuskatSubsolution { profile, theta, flux })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuskatReport {
    /// max |∫∫ θ ∂_tψ + q·∇ψ| over the test library.
    pub residual: f64,
    pub max_abs_theta: f64,
    /// sup |T[θ]| for the porous media multiplier.
    pub max_velocity: f64,
    pub times: Vec<f64>,
    pub widths: Vec<f64>,
    pub width_slope: f64,
}

const MODES: [[f64; 2]; 6] = [[0.0, 1.0], [0.0, 2.0], [0.0, 3.0], [1.0, 0.0], [1.0, 1.0], [2.0, -1.0]];

/// Weak residual by Gauss quadrature split at the zone edges; θ and q do not depend on x1,
/// so modes with k1 ≠ 0 pair to zero and x1 is integrated exactly.
pub fn muskat_residual(p: &MuskatProfile) -> f64 {
    weak_residual(p, |x2, t| p.state(x2, t))
}

fn weak_residual(p: &MuskatProfile, state: impl Fn(f64, f64) -> (f64, f64)) -> f64 {
    use std::f64::consts::PI;
    let rule = gauss_rule(6);
    let t_end = p.t_end;
    let tn = panel_nodes(0.0, t_end, &[0.5 * t_end], t_end / TIME_PANELS as f64, &gauss_rule(8));
    let windows = [(0.0, t_end), (0.0, 0.5 * t_end), (0.5 * t_end, t_end)];
    let mut worst: f64 = 0.0;
    for &(a, b) in &windows {
        for k in MODES {
            for phase in [0.0, 0.5 * PI] {
                if k[0] != 0.0 {
                    // ∫ cos(2πk1 x1 + ·) dx1 = 0 for k1 ≠ 0
                    continue;
                }
                let kk = 2.0 * PI * k[1];
                let mut acc = 0.0;
                for &(t, wt) in &tn {
                    let (chi, dchi) = time_bump(t, a, b);
                    if chi == 0.0 && dchi == 0.0 {
                        continue;
                    }
                    let w = p.c * t;
                    for (x2, wx) in panel_nodes(-0.5, 0.5, &[-w, w], 1.0 / 256.0, &rule) {
                        let (th, q2) = state(x2, t);
                        let arg = kk * x2 + phase;
                        acc += wt * wx * (th * dchi * arg.cos() - q2 * chi * kk * arg.sin());
                    }
                }
                worst = worst.max(acc.abs());
            }
        }
    }
    worst
}

/// Width of the zone at each time as 2 / (least-squares slope of θ over interior samples).
pub fn zone_widths(theta: &ScalarField) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = theta.grid;
    let Some(ta) = g.time else {
        return Err(Error::InvalidGrid("zone widths need a time axis".into()));
    };
    let n = g.resolution;
    let ns = g.len_space();
    let mut times = Vec::new();
    let mut widths = Vec::new();
    for it in 0..ta.samples {
        let col: Vec<(f64, f64)> = (0..n)
            .map(|j| (g.coord(j), theta.values[it * ns + g.index(0, j)]))
            .filter(|(_, th)| th.abs() < 1.0 - 1e-12)
            .collect();
        if col.len() < 2 {
            continue;
        }
        let xs: Vec<f64> = col.iter().map(|c| c.0).collect();
        let ys: Vec<f64> = col.iter().map(|c| c.1).collect();
        times.push(ta.time(it));
        widths.push(2.0 / fit_slope(&xs, &ys));
    }
    if times.len() < 2 {
        return Err(Error::Degenerate("mixing zone unresolved at fewer than two times".into()));
    }
    Ok((times, widths))
}

pub fn muskat_report(s: &MuskatSubsolution) -> Result<MuskatReport> {
    let v = multiplier_apply(&Multiplier::ipm(), &s.theta)?;
    let (times, widths) = zone_widths(&s.theta)?;
    Ok(MuskatReport {
        residual: muskat_residual(&s.profile),
        max_abs_theta: s.theta.max_abs(),
        max_velocity: v.max_abs(),
        width_slope: fit_slope(&times, &widths),
        times,
        widths,
    })
}

/// Grid used by [`build_muskat_subsolution`].
pub fn muskat_grid(resolution: usize, time_samples: usize, t_end: f64) -> Result<Grid> {
    shear_grid(resolution, time_samples, t_end)
}
