use std::f64::consts::PI;

use serde::Serialize;

use super::multiplier::{multiplier_apply, Multiplier};
use crate::error::{Error, Result};
use crate::fields::ScalarField;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportResidual {
    pub max_abs: f64,
    pub pairings: Vec<f64>,
}

/// C^∞ bump on (a, b) with its derivative.
pub fn time_bump(t: f64, a: f64, b: f64) -> (f64, f64) {
    let s = (2.0 * t - (a + b)) / (b - a);
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - s * s;
    let v = (1.0 - 1.0 / q).exp();
    let ds_dt = 2.0 / (b - a);
    (v, v * (-2.0 * s / (q * q)) * ds_dt)
}

const MODES: [[f64; 2]; 5] = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0], [2.0, 1.0]];

/// max over ψ = χ(t)φ(x) of |∫∫ θ ∂_tψ + θ v·∇ψ|, v = T[θ], with φ ∈ {sin, cos}(2π k·x/P)
/// and χ three bumps (whole window, first and second half). Trapezoid in t, exact
/// periodic sums in x.
pub fn transport_residual(theta: &ScalarField, mult: &Multiplier) -> Result<TransportResidual> {
    let g = theta.grid;
    let Some(ta) = g.time else {
        return Err(Error::InvalidGrid("transport residual needs a space-time field".into()));
    };
    if ta.samples < 3 {
        return Err(Error::InvalidGrid("need at least 3 time samples".into()));
    }
    let v = multiplier_apply(mult, theta)?;
    let ns = g.len_space();
    let (t0, t1) = (ta.start, ta.time(ta.samples - 1));
    let tm = 0.5 * (t0 + t1);
    let windows = [(t0, t1), (t0, tm), (tm, t1)];
    let sg = g.spatial();
    let mut pairings = Vec::new();
    for &(a, b) in &windows {
        for k in MODES {
            for phase in [0.0, 0.5 * PI] {
                let kk = [2.0 * PI * k[0] / g.period, 2.0 * PI * k[1] / g.period];
                let mut total = 0.0;
                for it in 0..ta.samples {
                    let (chi, dchi) = time_bump(ta.time(it), a, b);
                    if chi == 0.0 && dchi == 0.0 {
                        continue;
                    }
                    let wt = if it == 0 || it + 1 == ta.samples { 0.5 * ta.step } else { ta.step };
                    let mut s = 0.0;
                    for idx in 0..ns {
                        let p = sg.point(idx);
                        let arg = kk[0] * p[0] + kk[1] * p[1] + phase;
                        let (phi, dphi) = (arg.sin(), arg.cos());
                        let i = it * ns + idx;
                        let th = theta.values[i];
                        let vg = v.comps[0][i] * kk[0] + v.comps[1][i] * kk[1];
                        s += sg.weight(idx) * (th * dchi * phi + chi * th * vg * dphi);
                    }
                    total += wt * s;
                }
                pairings.push(total);
            }
        }
    }
    let max_abs = pairings.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(TransportResidual { max_abs, pairings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    fn st_grid() -> Grid {
        Grid::periodic(2, 32, 1.0).unwrap().with_time(65, 0.0, 1.0 / 64.0).unwrap()
    }

    #[test]
    fn constants_and_steady_layers() {
        let g = st_grid();
        let c = ScalarField::constant(g, 2.0);
        assert!(transport_residual(&c, &Multiplier::sqg()).unwrap().max_abs < 1e-12);
        let layers = ScalarField::from_fn(g, |_, y, _| (2.0 * PI * y).sin());
        assert!(transport_residual(&layers, &Multiplier::ipm()).unwrap().max_abs < 1e-12);
    }

    #[test]
    fn moving_blob_is_not_a_solution() {
        let g = st_grid();
        let th = ScalarField::from_fn(g, |x, y, t| (2.0 * PI * (x + 3.0 * t)).sin() * (2.0 * PI * y).cos());
        let r = transport_residual(&th, &Multiplier::ipm()).unwrap();
        assert!(r.max_abs > 1e-3);
    }

    #[test]
    fn bump_derivative() {
        let h = 1e-6;
        for t in [0.2, 0.45, 0.7] {
            let (_, d) = time_bump(t, 0.1, 0.9);
            let fd = (time_bump(t + h, 0.1, 0.9).0 - time_bump(t - h, 0.1, 0.9).0) / (2.0 * h);
            assert!((d - fd).abs() < 1e-6);
        }
    }
}
