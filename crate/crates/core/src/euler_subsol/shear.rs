//! Self-similar shear subsolution on the unit torus, x2 ∈ [−½, ½).
//!
//! Outside the zone |x2| < ct the state is the vortex sheet datum v = −σ sign(x2) e1
//! (stationary jump at x2 = ±½). Inside, with ζ = x2/(ct):
//! v1 = −σζ, u12 = σ(c/2)(1 − ζ²), u11 = −u22 = q = v1²/2,
//! so ∂_t v1 + ∂_2 u12 = 0 and u is continuous across ±ct.

use serde::{Deserialize, Serialize};

use super::residual::{sample_profile, SpaceTimeProfile};
use super::triple::{PointState, SubsolutionTriple};
use crate::error::{Error, Result};
use crate::fields::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearParams {
    pub c: f64,
    /// Sign of the datum: v = σ e1 on the lower half.
    pub sigma: f64,
    pub t_end: f64,
    /// ē = e(v,u) + ε(1 − ζ²) inside the zone.
    pub epsilon: f64,
    /// Adds min(t, 1/t) to ē everywhere.
    pub time_padding: bool,
}

impl ShearParams {
    pub fn new(c: f64) -> Self {
        Self {
            c,
            sigma: 1.0,
            t_end: 0.2,
            epsilon: 0.01,
            time_padding: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Range(format!("mixing speed must be positive, got {}", self.c)));
        }
        if self.sigma.abs() != 1.0 {
            return Err(Error::Range("sigma must be ±1".into()));
        }
        if !(self.t_end > 0.0) || self.epsilon < 0.0 {
            return Err(Error::Range("t_end must be positive and epsilon nonnegative".into()));
        }
        if self.c * self.t_end >= 0.5 {
            return Err(Error::Wrap(format!(
                "mixing zone 2cT = {} reaches the stationary interface",
                2.0 * self.c * self.t_end
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ShearProfile(pub ShearParams);

impl SpaceTimeProfile for ShearProfile {
    fn state(&self, x: [f64; 2], t: f64) -> PointState {
        let p = &self.0;
        let x2 = (x[1] + 0.5).rem_euclid(1.0) - 0.5;
        let pad = if p.time_padding { t.min(1.0 / t) } else { 0.0 };
        let w = p.c * t;
        if x2.abs() < w {
            let z = x2 / w;
            let v1 = -p.sigma * z;
            let u12 = p.sigma * 0.5 * p.c * (1.0 - z * z);
            let h = 0.5 * v1 * v1;
            PointState {
                v: [v1, 0.0],
                u: [h, u12, -h],
                q: h,
                ebar: h + 0.5 * p.c * (1.0 - z * z) + p.epsilon * (1.0 - z * z) + pad,
            }
        } else {
            let v1 = if x2 >= 0.0 { -p.sigma } else { p.sigma };
            PointState {
                v: [v1, 0.0],
                u: [0.5, 0.0, -0.5],
                q: 0.5,
                ebar: 0.5 + pad,
            }
        }
    }

    fn x2_breaks(&self, t: f64) -> Vec<f64> {
        let w = self.0.c * t;
        vec![-0.5, -w, w, 0.5]
    }

    fn window(&self) -> (f64, f64) {
        (0.0, self.0.t_end)
    }
}

/// Unit torus with x2 ∈ [−½, ½) and times T/S, 2T/S, .., T.
pub fn shear_grid(resolution: usize, time_samples: usize, t_end: f64) -> Result<Grid> {
    Grid::periodic(2, resolution, 1.0)?
        .with_origin(-0.5)
        .with_time(time_samples, t_end / time_samples as f64, t_end / time_samples as f64)
}

fn check_grid(grid: &Grid, t_end: f64) -> Result<()> {
    if grid.period != 1.0 || grid.origin != -0.5 || !grid.is_periodic() || grid.dims != 2 {
        return Err(Error::InvalidGrid("shear subsolution lives on the unit torus with origin −½".into()));
    }
    let Some(ta) = grid.time else {
        return Err(Error::InvalidGrid("shear subsolution needs a time axis".into()));
    };
    if ta.start <= 0.0 || ta.time(ta.samples - 1) > t_end * (1.0 + 1e-12) {
        return Err(Error::InvalidGrid("time samples must lie in (0, T]".into()));
    }
    Ok(())
}

pub fn build_shear_subsolution(params: &ShearParams, grid: &Grid) -> Result<SubsolutionTriple> {
    params.validate()?;
    check_grid(grid, params.t_end)?;
    sample_profile(&ShearProfile(*params), grid)
}

/// ∫ ē dx at time t: ½ + ct(2c − 2)/3 + (4/3)εct (+ min(t, 1/t) if padded).
pub fn shear_energy(params: &ShearParams, t: f64) -> f64 {
    let ct = params.c * t;
    let pad = if params.time_padding { t.min(1.0 / t) } else { 0.0 };
    0.5 + ct * (2.0 * params.c - 2.0) / 3.0 + 4.0 / 3.0 * params.epsilon * ct + pad
}

/// dE/dt for ε = 0: (2c/3)(c − 1).
pub fn shear_rate(c: f64) -> f64 {
    2.0 * c / 3.0 * (c - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler_subsol::triple::{generalized_energy_at, margin_at};

    #[test]
    fn margins() {
        let p = ShearProfile(ShearParams::new(0.5));
        for i in 0..200 {
            let x2 = -0.5 + i as f64 / 200.0;
            for t in [0.01, 0.1, 0.2] {
                let s = p.state([0.3, x2], t);
                let m = margin_at(&s);
                assert!(m >= -1e-15);
                if x2.abs() < 0.5 * t * 0.999 {
                    assert!(m > 0.0);
                    let z = x2 / (0.5 * t);
                    let e = generalized_energy_at(s.v, s.u);
                    assert!((e - (z * z / 2.0 + 0.25 * (1.0 - z * z))).abs() < 1e-14);
                }
                assert!(0.5 * s.v[0] * s.v[0] <= s.ebar + 1e-15);
            }
        }
    }

    #[test]
    fn datum_and_wrap() {
        let p = ShearProfile(ShearParams::new(1.0));
        assert_eq!(p.state([0.0, -0.3], 0.1).v, [1.0, 0.0]);
        assert_eq!(p.state([0.0, 0.3], 0.1).v, [-1.0, 0.0]);
        let mut bad = ShearParams::new(3.0);
        bad.t_end = 0.2;
        assert!(matches!(bad.validate(), Err(Error::Wrap(_))));
    }

    #[test]
    fn optimum_rate() {
        assert!((shear_rate(0.5) + 1.0 / 6.0).abs() < 1e-15);
    }
}
