use rayon::prelude::*;
use serde::Serialize;

use super::residual::{gauss_rule, panel_nodes, SpaceTimeProfile};
use super::shear::{shear_rate, ShearParams, ShearProfile};
use crate::error::{Error, Result};
use crate::fields::commutator::fit_slope;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub c: f64,
    /// Slope of a linear fit of the quadrature E(t).
    pub measured: f64,
    pub closed_form: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DissipationScan {
    pub rows: Vec<ScanRow>,
    pub c_star: f64,
    pub rate_star: f64,
    pub closed_form_c_star: f64,
    pub closed_form_rate: f64,
    /// Optimum (3/4)^{1/4} and its rate c(√(1+c²) − 2)/3 for the reference ansatz.
    pub reference_c_star: f64,
    pub reference_rate: f64,
    pub paper_rate: f64,
}

/// ∫ ē dx of the profile at time t by Gauss panels split at the zone edges.
pub fn profile_energy(p: &dyn SpaceTimeProfile, t: f64) -> f64 {
    let rule = gauss_rule(6);
    panel_nodes(-0.5, 0.5, &p.x2_breaks(t), 1.0 / 64.0, &rule)
        .iter()
        .map(|&(x2, w)| w * p.state([0.0, x2], t).ebar)
        .sum()
}

pub fn reference_rate(c: f64) -> f64 {
    c * ((1.0 + c * c).sqrt() - 2.0) / 3.0
}

/// dE/dt over a grid of mixing speeds with ε = 0, T = 0.2.
pub fn dissipation_scan(c_grid: &[f64]) -> Result<DissipationScan> {
    if c_grid.len() < 3 {
        return Err(Error::Config("scan needs at least 3 speeds".into()));
    }
    if c_grid.iter().any(|c| !(*c > 0.0 && *c < 2.0)) {
        return Err(Error::Range("scan speeds must lie in (0, 2)".into()));
    }
    if c_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("scan speeds must increase".into()));
    }
    let rows: Vec<ScanRow> = c_grid
        .par_iter()
        .map(|&c| {
            let mut params = ShearParams::new(c);
            params.epsilon = 0.0;
            let prof = ShearProfile(params);
            let ts: Vec<f64> = (1..=16).map(|i| params.t_end * i as f64 / 16.0).collect();
            let es: Vec<f64> = ts.iter().map(|&t| profile_energy(&prof, t)).collect();
            ScanRow {
                c,
                measured: fit_slope(&ts, &es),
                closed_form: shear_rate(c),
            }
        })
        .collect();
    let (c_star, rate_star) = refine_min(&rows);
    let rc = 0.75f64.powf(0.25);
    Ok(DissipationScan {
        rows,
        c_star,
        rate_star,
        closed_form_c_star: 0.5,
        closed_form_rate: shear_rate(0.5),
        reference_c_star: rc,
        reference_rate: reference_rate(rc),
        paper_rate: -1.0 / 6.0,
    })
}

/// Parabola through the smallest measured rate and its neighbours.
fn refine_min(rows: &[ScanRow]) -> (f64, f64) {
    let j = (0..rows.len())
        .min_by(|&a, &b| rows[a].measured.partial_cmp(&rows[b].measured).unwrap())
        .unwrap();
    if j == 0 || j + 1 == rows.len() {
        return (rows[j].c, rows[j].measured);
    }
    let (x0, x1, x2) = (rows[j - 1].c, rows[j].c, rows[j + 1].c);
    let (y0, y1, y2) = (rows[j - 1].measured, rows[j].measured, rows[j + 1].measured);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a > 0.0) {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let xs = -b / (2.0 * a);
    (xs, y0 + d01 * (xs - x0) + a * (xs - x0) * (xs - x1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_finds_half() {
        let grid: Vec<f64> = (1..40).map(|i| i as f64 * 0.05).collect();
        let s = dissipation_scan(&grid).unwrap();
        assert!((s.c_star - 0.5).abs() < 1e-6, "{}", s.c_star);
        assert!((s.rate_star + 1.0 / 6.0).abs() < 1e-6);
        for r in &s.rows {
            assert!((r.measured - r.closed_form).abs() < 1e-12);
        }
        assert!((s.reference_c_star - 0.9306).abs() < 1e-4);
        assert!((s.reference_rate + 0.1967).abs() < 1e-4);
    }

    #[test]
    fn small_speed_rate_vanishes() {
        let s = dissipation_scan(&[1e-4, 2e-4, 3e-4]).unwrap();
        assert!(s.rows.iter().all(|r| r.measured.abs() < 1e-3));
        assert!(dissipation_scan(&[0.5, 1.0, 2.5]).is_err());
    }
}
