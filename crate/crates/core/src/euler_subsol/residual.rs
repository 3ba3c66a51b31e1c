use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::Serialize;

use super::triple::{PointState, SubsolutionTriple};
use crate::error::{Error, Result};
use crate::fields::diff::d1;
use crate::fields::Grid;
use crate::tartar::transport::time_bump;

/// Analytic subsolution on the periodic strip x2 ∈ [origin, origin + period).
pub trait SpaceTimeProfile: Sync {
    fn state(&self, x: [f64; 2], t: f64) -> PointState;
    /// x2 locations where the profile is not smooth at time t.
    fn x2_breaks(&self, t: f64) -> Vec<f64>;
    /// Time window (0, T) on which the profile is defined.
    fn window(&self) -> (f64, f64);
    /// Trapezoid points in x1; profiles independent of x1 need only a few.
    fn x1_points(&self) -> usize {
        8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Centered-difference sup of |∂_t v + div u + ∇q| + sup |div v|.
    pub strong: f64,
    /// Largest |pairing| over the test library.
    pub weak: f64,
    pub tests: usize,
}

const MODES: [[f64; 2]; 7] = [
    [0.0, 1.0],
    [0.0, 2.0],
    [0.0, 3.0],
    [1.0, 0.0],
    [1.0, 1.0],
    [1.0, -1.0],
    [2.0, 1.0],
];

/// Test fields Φ = ∇⊥ψ χ(t) and scalars φ χ(t), ψ, φ ∈ {sin, cos}(2π k·x / P),
/// χ a bump on the whole window and on each half.
struct TestLibrary {
    windows: [(f64, f64); 3],
    wave: Vec<[f64; 2]>,
}

impl TestLibrary {
    fn new(period: f64, t0: f64, t1: f64) -> Self {
        let tm = 0.5 * (t0 + t1);
        Self {
            windows: [(t0, t1), (t0, tm), (tm, t1)],
            wave: MODES
                .iter()
                .map(|k| [2.0 * PI * k[0] / period, 2.0 * PI * k[1] / period])
                .collect(),
        }
    }

    fn len(&self) -> usize {
        2 * self.windows.len() * self.wave.len() * 2
    }

    /// Adds weight × integrand of every pairing at one quadrature point.
    fn accumulate(&self, x: [f64; 2], t: f64, w: f64, s: &PointState, acc: &mut [f64]) {
        let mut j = 0;
        for &(a, b) in &self.windows {
            let (chi, dchi) = time_bump(t, a, b);
            if chi == 0.0 && dchi == 0.0 {
                j += 2 * 2 * self.wave.len();
                continue;
            }
            for kk in &self.wave {
                let arg0 = kk[0] * x[0] + kk[1] * x[1];
                let perp = [-kk[1], kk[0]];
                let v_perp = perp[0] * s.v[0] + perp[1] * s.v[1];
                let v_k = kk[0] * s.v[0] + kk[1] * s.v[1];
                // Σ u_ij perp_i k_j
                let ukk = s.u[0] * perp[0] * kk[0]
                    + s.u[1] * (perp[0] * kk[1] + perp[1] * kk[0])
                    + s.u[2] * perp[1] * kk[1];
                for phase in [0.0, 0.5 * PI] {
                    let (sa, ca) = (arg0 + phase).sin_cos();
                    acc[j] += w * (dchi * ca * v_perp - chi * sa * ukk);
                    acc[j + 1] += w * chi * ca * v_k;
                    j += 2;
                }
            }
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Strong and weak residuals of ∂_t v + div u + ∇q = 0, div v = 0 for sampled fields.
/// The weak pairings use the trapezoid rule in t and periodic sums in x.
pub fn linear_residual(t: &SubsolutionTriple) -> Result<ResidualReport> {
    let g = t.grid();
    let Some(ta) = g.time else {
        return Err(Error::InvalidGrid("linear residual needs a space-time grid".into()));
    };
    if !g.is_periodic() {
        return Err(Error::InvalidGrid("linear residual needs a periodic grid".into()));
    }
    let strong = strong_residual(t, &|_, _| true)?;
    let lib = TestLibrary::new(g.period, ta.start, ta.time(ta.samples - 1));
    let mut acc = vec![0.0; lib.len()];
    let ns = g.len_space();
    let sg = g.spatial();
    for it in 0..ta.samples {
        let wt = if it == 0 || it + 1 == ta.samples { 0.5 * ta.step } else { ta.step };
        let time = ta.time(it);
        for idx in 0..ns {
            lib.accumulate(sg.point(idx), time, wt * sg.weight(idx), &t.at(it * ns + idx), &mut acc);
        }
    }
    Ok(ResidualReport {
        strong,
        weak: max_abs(&acc),
        tests: lib.len(),
    })
}

/// Sup of the centered-difference residual over interior time samples, restricted to
/// samples where `keep(spatial index, time)` holds.
pub fn strong_residual(t: &SubsolutionTriple, keep: &dyn Fn(usize, f64) -> bool) -> Result<f64> {
    let g = t.grid();
    let Some(ta) = g.time else {
        return Err(Error::InvalidGrid("strong residual needs a time axis".into()));
    };
    let ns = g.len_space();
    let sg = g.spatial();
    let sl = |c: &Vec<f64>, it: usize| c[it * ns..(it + 1) * ns].to_vec();
    let mut out: f64 = 0.0;
    for it in 0..ta.samples {
        let (v1, v2) = (sl(&t.v.comps[0], it), sl(&t.v.comps[1], it));
        let (u11, u12, u22) = (sl(&t.u.entries[0], it), sl(&t.u.entries[1], it), sl(&t.u.entries[2], it));
        let q = sl(&t.q.values, it);
        let div = |a: &[f64], b: &[f64]| -> Vec<f64> {
            d1(a, &sg, 0).iter().zip(d1(b, &sg, 1)).map(|(x, y)| x + y).collect()
        };
        let dv = div(&v1, &v2);
        let m1 = div(&u11, &u12);
        let m2 = div(&u12, &u22);
        let (q1, q2) = (d1(&q, &sg, 0), d1(&q, &sg, 1));
        let time = ta.time(it);
        let interior = it > 0 && it + 1 < ta.samples;
        for i in 0..ns {
            if !keep(i, time) {
                continue;
            }
            let mut r = dv[i].abs();
            if interior {
                let dt = |c: &Vec<f64>| (c[(it + 1) * ns + i] - c[(it - 1) * ns + i]) / (2.0 * ta.step);
                let r1 = dt(&t.v.comps[0]) + m1[i] + q1[i];
                let r2 = dt(&t.v.comps[1]) + m2[i] + q2[i];
                r += r1.hypot(r2);
            }
            out = out.max(r);
        }
    }
    Ok(out)
}

/// Gauss nodes on [a, b] split at `breaks` and into panels no wider than `h`.
pub(crate) fn panel_nodes(a: f64, b: f64, breaks: &[f64], h: f64, rule: &GaussLegendre) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let panels = ((hi - lo) / h).ceil().max(1.0) as usize;
        let ph = (hi - lo) / panels as f64;
        for p in 0..panels {
            let (pa, pb) = (lo + p as f64 * ph, lo + (p + 1) as f64 * ph);
            for (x, wt) in rule.as_node_weight_pairs() {
                out.push((0.5 * ((pb - pa) * x + pa + pb), 0.5 * (pb - pa) * wt));
            }
        }
    }
    out
}

/// Gauss panels across the time window of a profile.
pub(crate) const TIME_PANELS: usize = 128;

pub(crate) fn gauss_rule(n: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(n).expect("positive degree"))
}

/// Weak residual of an analytic profile by piecewise Gauss quadrature: panels of width
/// period/N in x2 split at the profile's breaks, 128 panels in t, trapezoid in x1.
pub fn profile_weak_residual(p: &dyn SpaceTimeProfile, grid: &Grid) -> Result<f64> {
    grid.validate()?;
    let (t0, t1) = p.window();
    let lib = TestLibrary::new(grid.period, t0, t1);
    let rule = gauss_rule(6);
    let tnodes = panel_nodes(t0, t1, &[0.5 * (t0 + t1)], (t1 - t0) / TIME_PANELS as f64, &gauss_rule(8));
    let m = p.x1_points();
    let (lo, hi) = (grid.origin, grid.origin + grid.period);
    let h = grid.period / grid.resolution as f64;
    let partial: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        tnodes
            .par_iter()
            .map(|&(t, wt)| {
                let mut acc = vec![0.0; lib.len()];
                let xnodes = panel_nodes(lo, hi, &p.x2_breaks(t), h, &rule);
                for i1 in 0..m {
                    let x1 = grid.origin + grid.period * i1 as f64 / m as f64;
                    let w1 = grid.period / m as f64;
                    for &(x2, w2) in &xnodes {
                        let s = p.state([x1, x2], t);
                        lib.accumulate([x1, x2], t, wt * w1 * w2, &s, &mut acc);
                    }
                }
                acc
            })
            .collect()
    };
    let mut acc = vec![0.0; lib.len()];
    for row in partial {
        for (a, b) in acc.iter_mut().zip(row) {
            *a += b;
        }
    }
    Ok(max_abs(&acc))
}

/// Samples the profile on a periodic space-time grid.
pub fn sample_profile(p: &dyn SpaceTimeProfile, grid: &Grid) -> Result<SubsolutionTriple> {
    use crate::fields::{ScalarField, SymTensorField, VectorField};
    grid.validate()?;
    if grid.time.is_none() || grid.dims != 2 {
        return Err(Error::InvalidGrid("profiles are sampled on 2-D space-time grids".into()));
    }
    let n = grid.len();
    let ns = grid.len_space();
    let ta = grid.time.expect("checked");
    let mut v = VectorField::zeros(*grid, 2);
    let mut u = SymTensorField::zeros(*grid, true);
    let mut q = ScalarField::zeros(*grid);
    let mut e = ScalarField::zeros(*grid);
    for i in 0..n {
        let s = p.state(grid.point(i % ns), ta.time(i / ns));
        v.comps[0][i] = s.v[0];
        v.comps[1][i] = s.v[1];
        for c in 0..3 {
            u.entries[c][i] = s.u[c];
        }
        q.values[i] = s.q;
        e.values[i] = s.ebar;
    }
    SubsolutionTriple::new(v, u, q, e)
}

/// Strong residual of a sampled profile, skipping samples whose space or time stencil
/// straddles a break.
pub fn profile_strong_residual(p: &dyn SpaceTimeProfile, t: &SubsolutionTriple) -> Result<f64> {
    let g = t.grid();
    let h = g.spacing();
    let period = g.period;
    let dt = g.time.map_or(0.0, |ta| ta.step);
    strong_residual(t, &|i, time| {
        let x2 = g.point(i)[1];
        [time - dt, time, time + dt].iter().all(|&s| {
            p.x2_breaks(s).iter().all(|b| {
                let d = (x2 - b).rem_euclid(period);
                d.min(period - d) > 1.5 * h
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ScalarField, VectorField};

    fn st(n: usize) -> Grid {
        Grid::periodic(2, n, 1.0).unwrap().with_time(17, 0.0, 1.0 / 16.0).unwrap()
    }

    #[test]
    fn constant_triple() {
        let g = st(16);
        let v = VectorField::from_fn(g, |_, _, _| [0.3, -0.2]);
        let t = SubsolutionTriple::from_velocity(v, ScalarField::constant(g, 1.0)).unwrap();
        let r = linear_residual(&t).unwrap();
        assert!(r.strong < 1e-12 && r.weak < 1e-12, "{r:?}");
    }

    #[test]
    fn random_fields_have_residual() {
        use rand::{Rng, SeedableRng};
        let g = st(16);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut r = || -> Vec<f64> { (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let v = VectorField::new(g, vec![r(), r()]).unwrap();
        let t = SubsolutionTriple::from_velocity(v, ScalarField::new(g, r()).unwrap()).unwrap();
        let rep = linear_residual(&t).unwrap();
        assert!(rep.weak > 1e-6 && rep.strong > 1.0);
    }

    #[test]
    fn panels_integrate_polynomials() {
        let rule = gauss_rule(4);
        let nodes = panel_nodes(-0.5, 0.5, &[0.1, -0.3, 0.7], 0.05, &rule);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(6)).sum();
        assert!((s - 2.0 * 0.5f64.powi(7) / 7.0).abs() < 1e-15);
    }
}
