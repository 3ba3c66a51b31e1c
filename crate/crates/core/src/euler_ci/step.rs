use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler_subsol::{constraint_margin, linear_residual, SubsolutionTriple};
use crate::fields::fft::{wavenumber, Fft2};
use crate::fields::{
    max_spectral_divergence, solenoidal_project, sym2_eigs, sym2_top_eigvec, Grid, ScalarField,
    SymTensorField, VectorField,
};
use crate::tartar::{euler_linear_system, euler_state, wave_cone_contains, WaveWitness};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CiConfig {
    pub resolution: usize,
    pub lambda0: u64,
    /// λ_{k+1} = growth · λ_k.
    pub growth: u64,
    /// Gate δ_k ≤ ρ^k δ_0.
    pub rho: f64,
    /// Fraction of the largest admissible amplitude.
    pub kappa: f64,
    pub retries: usize,
    pub seed: u64,
    pub div_tol: f64,
}

impl Default for CiConfig {
    fn default() -> Self {
        Self {
            resolution: 256,
            lambda0: 8,
            growth: 2,
            rho: 0.75,
            kappa: 0.98,
            retries: 3,
            seed: 7,
            div_tol: 1e-9,
        }
    }
}

impl CiConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Config(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::Config(format!("kappa must lie in (0, 1), got {}", self.kappa)));
        }
        if self.lambda0 == 0 || self.growth < 2 {
            return Err(Error::Config("lambda0 must be positive and growth at least 2".into()));
        }
        Grid::periodic(2, self.resolution, 1.0)?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CiState {
    pub triple: SubsolutionTriple,
    pub step: usize,
    pub lambda_schedule: Vec<u64>,
    /// δ_k per accepted state, starting with δ_0.
    pub deficit_trace_history: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Deficit {
    /// (2/n)ē I − (v⊗v − u), not traceless.
    pub tensor: SymTensorField,
    /// Space-time mean of tr D.
    pub delta: f64,
}

pub fn deficit(t: &SubsolutionTriple) -> Deficit {
    let g = t.grid();
    let n = g.len();
    let mut e = vec![Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut sum = 0.0;
    for i in 0..n {
        let s = t.at(i);
        let d = [
            s.ebar - (s.v[0] * s.v[0] - s.u[0]),
            -(s.v[0] * s.v[1] - s.u[1]),
            s.ebar - (s.v[1] * s.v[1] - s.u[2]),
        ];
        sum += d[0] + d[2];
        for c in 0..3 {
            e[c].push(d[c]);
        }
    }
    Deficit {
        tensor: SymTensorField {
            grid: g,
            entries: e,
            traceless: false,
        },
        delta: sum / n as f64,
    }
}

/// v = 0, u = 0, q = 0, ē = ½ on the unit torus; three identical time slices.
pub fn trivial_start(resolution: usize) -> Result<CiState> {
    let g = Grid::periodic(2, resolution, 1.0)?.with_time(3, 0.0, 0.5)?;
    let triple = SubsolutionTriple::new(
        VectorField::zeros(g, 2),
        SymTensorField::zeros(g, true),
        ScalarField::zeros(g),
        ScalarField::constant(g, 0.5),
    )?;
    let d = deficit(&triple).delta;
    Ok(CiState {
        triple,
        step: 0,
        lambda_schedule: Vec::new(),
        deficit_trace_history: vec![d],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectedWave {
    /// Unit amplitude direction.
    pub w: [f64; 2],
    /// Euler state (w, 0, 0).
    pub state: Vec<f64>,
    pub witness: WaveWitness,
}

/// Top eigenvector of D (ties to e1) with its shear-wave cone witness.
pub fn select_wave(d: [f64; 3]) -> Result<SelectedWave> {
    let (_, top) = sym2_eigs(d[0], d[1], d[2]);
    if !(top > 1e-14) {
        return Err(Error::Degenerate("deficit has no positive direction: nothing to correct".into()));
    }
    let w = sym2_top_eigvec(d[0], d[1], d[2]);
    let sys = euler_linear_system(2)?;
    let a = euler_state(&w, &[0.0; 4], 0.0)?;
    let witness = wave_cone_contains(&sys, &a, 1e-10)?
        .ok_or_else(|| Error::Degenerate("no wave-cone witness for the shear state".into()))?;
    Ok(SelectedWave {
        w,
        state: a.iter().copied().collect(),
        witness,
    })
}

const PRIMITIVE: [[i64; 2]; 8] = [[1, 0], [0, 1], [1, 1], [1, -1], [1, 2], [2, 1], [1, -2], [2, -1]];

/// Lattice direction closest to w.
fn snap(w: [f64; 2]) -> [i64; 2] {
    let score = |p: &[i64; 2]| {
        let n = ((p[0] * p[0] + p[1] * p[1]) as f64).sqrt();
        ((p[0] as f64 * w[0] + p[1] as f64 * w[1]) / n).abs()
    };
    *PRIMITIVE
        .iter()
        .max_by(|a, b| score(a).partial_cmp(&score(b)).unwrap().then(std::cmp::Ordering::Greater))
        .unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CiRow {
    pub k: usize,
    pub lambda_k: f64,
    pub delta_k: f64,
    pub l2_v: f64,
    pub linres: f64,
    pub min_margin: f64,
    pub divergence: f64,
    pub shell_fraction: f64,
    pub attempts: usize,
}

fn l2(v: &VectorField) -> f64 {
    let g = v.grid.spatial();
    let ns = g.len_space();
    (0..ns)
        .map(|i| g.weight(i) * (v.comps[0][i].powi(2) + v.comps[1][i].powi(2)))
        .sum::<f64>()
        .sqrt()
}

/// One step: add κ a_max(x) w sin(2π k·x + φ), k ⊥ w with |k| ≈ λ, project, and close
/// u ← u + traceless(v⊗V + V⊗v + V⊗V), q ← q + (2v·V + |V|²)/2. Doubles λ on failure.
pub fn ci_step(state: &CiState, cfg: &CiConfig) -> Result<(CiState, CiRow)> {
    cfg.validate()?;
    let t = &state.triple;
    let g = t.grid();
    let d = deficit(t);
    let n = g.len();
    let mean = |c: usize| d.tensor.entries[c].iter().sum::<f64>() / n as f64;
    let wave = select_wave([mean(0), mean(1), mean(2)])?;
    if constraint_margin(t)?.values.iter().all(|m| *m <= 0.0) {
        return Err(Error::Degenerate("no strict margin: nothing to correct".into()));
    }
    let p = snap(wave.w);
    let pn = ((p[0] * p[0] + p[1] * p[1]) as f64).sqrt();
    let w = [p[0] as f64 / pn, p[1] as f64 / pn];
    let margin = constraint_margin(t)?;
    let amp: Vec<f64> = (0..n)
        .map(|i| {
            let vw = t.v.comps[0][i] * w[0] + t.v.comps[1][i] * w[1];
            let m = margin.values[i].max(0.0);
            cfg.kappa * (-vw.abs() + (vw * vw + 2.0 * m).sqrt())
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (state.step as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let flip: bool = rng.gen();
    let fallback: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    let k = state.step + 1;
    let target = state.deficit_trace_history[0] * cfg.rho.powi(k as i32);
    let base = cfg.lambda0 * cfg.growth.pow(state.step as u32);
    let mut diagnostics = Vec::new();
    for attempt in 0..=cfg.retries {
        let lambda = base << attempt;
        let m = ((lambda as f64 / pn).round() as i64).max(1);
        let kv = [-p[1] * m, p[0] * m];
        if 2 * kv[0].unsigned_abs().max(kv[1].unsigned_abs()) as usize >= g.resolution {
            diagnostics.push(format!("lambda {lambda}: beyond Nyquist"));
            break;
        }
        let mut raw = VectorField::zeros(g, 2);
        let ns = g.len_space();
        let arg = |i: usize| {
            let x = g.point(i % ns);
            std::f64::consts::TAU * (kv[0] as f64 * x[0] + kv[1] as f64 * x[1])
        };
        let phase = zero_mean_phase(&amp[..ns], (0..ns).map(arg), flip, fallback);
        for i in 0..n {
            let s = (arg(i) + phase).sin();
            raw.comps[0][i] = t.v.comps[0][i] + amp[i] * w[0] * s;
            raw.comps[1][i] = t.v.comps[1][i] + amp[i] * w[1] * s;
        }
        let v_new = solenoidal_project(&raw)?;
        let next = close(t, v_new)?;
        let dnew = deficit(&next).delta;
        let mm = constraint_margin(&next)?.min();
        let div = max_spectral_divergence(&next.v);
        if mm >= 0.0 && dnew <= target && div <= cfg.div_tol {
            let lin = linear_residual(&next)?;
            let shell = shell_fraction(&t.v, &next.v, (kv[0] as f64).hypot(kv[1] as f64))?;
            let row = CiRow {
                k,
                lambda_k: (kv[0] as f64).hypot(kv[1] as f64),
                delta_k: dnew,
                l2_v: l2(&next.v),
                linres: lin.weak.max(lin.strong),
                min_margin: mm,
                divergence: div,
                shell_fraction: shell,
                attempts: attempt + 1,
            };
            let mut hist = state.deficit_trace_history.clone();
            hist.push(dnew);
            let mut sched = state.lambda_schedule.clone();
            sched.push(lambda);
            return Ok((
                CiState {
                    triple: next,
                    step: k,
                    lambda_schedule: sched,
                    deficit_trace_history: hist,
                },
                row,
            ));
        }
        diagnostics.push(format!(
            "lambda {lambda}: delta {dnew:.6} (target {target:.6}), min margin {mm:.3e}, div {div:.3e}"
        ));
    }
    Err(Error::FrequencyExhaustion {
        attempts: diagnostics.len(),
        diagnostics: diagnostics.join("; "),
    })
}

/// Phase φ with Σ a_i sin(θ_i + φ) = 0, so the wave carries no mean flow; `flip` picks
/// between the two roots.
fn zero_mean_phase(amp: &[f64], theta: impl Iterator<Item = f64>, flip: bool, fallback: f64) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for (a, th) in amp.iter().zip(theta) {
        s += a * th.sin();
        c += a * th.cos();
    }
    if s.hypot(c) <= 1e-12 * amp.iter().map(|a| a.abs()).sum::<f64>().max(1e-300) {
        return fallback;
    }
    (-s).atan2(c) + if flip { std::f64::consts::PI } else { 0.0 }
}

/// Triple with velocity v_new and the constraint re-closed through u and q.
fn close(t: &SubsolutionTriple, v_new: VectorField) -> Result<SubsolutionTriple> {
    let g = t.grid();
    let mut u = t.u.clone();
    let mut q = t.q.clone();
    for i in 0..g.len() {
        let (a, b) = (t.v.comps[0][i], t.v.comps[1][i]);
        let (c, d) = (v_new.comps[0][i], v_new.comps[1][i]);
        // change of v⊗v
        let (d11, d12, d22) = (c * c - a * a, c * d - a * b, d * d - b * b);
        let h = 0.5 * (d11 - d22);
        u.entries[0][i] += h;
        u.entries[1][i] += d12;
        u.entries[2][i] -= h;
        q.values[i] += 0.5 * (d11 + d22);
    }
    SubsolutionTriple::new(v_new, u, q, t.ebar.clone())
}

/// Fraction of the L² mass of v_new − v_old (first time slice) with |ξ| ∈ [λ/2, 2λ].
pub fn shell_fraction(v_old: &VectorField, v_new: &VectorField, lambda: f64) -> Result<f64> {
    let g = v_old.grid.spatial();
    let n = g.resolution;
    let ns = g.len_space();
    let fft = Fft2::new(n);
    let (mut inside, mut total) = (0.0, 0.0);
    for c in 0..2 {
        let inc: Vec<f64> = (0..ns).map(|i| v_new.comps[c][i] - v_old.comps[c][i]).collect();
        let hat = fft.forward_real(&inc);
        for (idx, z) in hat.iter().enumerate() {
            let k = (wavenumber(idx % n, n) as f64).hypot(wavenumber(idx / n, n) as f64);
            let e = z.norm_sqr();
            total += e;
            if k >= 0.5 * lambda && k <= 2.0 * lambda {
                inside += e;
            }
        }
    }
    if total == 0.0 {
        return Err(Error::Degenerate("zero increment".into()));
    }
    Ok(inside / total)
}

/// Largest increase of tr D averaged over square cells of side 1/λ (first time slice).
pub fn cell_average_increase(before: &SubsolutionTriple, after: &SubsolutionTriple, lambda: u64) -> f64 {
    let g = before.grid().spatial();
    let n = g.resolution;
    let cell = (n / lambda as usize).max(1);
    let tr = |t: &SubsolutionTriple| -> Vec<f64> {
        let d = deficit(t).tensor;
        (0..n * n).map(|i| d.entries[0][i] + d.entries[2][i]).collect()
    };
    let (a, b) = (tr(before), tr(after));
    let mut worst = f64::NEG_INFINITY;
    for cy in (0..n).step_by(cell) {
        for cx in (0..n).step_by(cell) {
            let mut s = 0.0;
            let mut cnt = 0.0;
            for y in cy..(cy + cell).min(n) {
                for x in cx..(cx + cell).min(n) {
                    s += b[x + n * y] - a[x + n * y];
                    cnt += 1.0;
                }
            }
            worst = worst.max(s / cnt);
        }
    }
    worst
}

pub fn ci_run(start: CiState, steps: usize, cfg: &CiConfig) -> Result<(CiState, Vec<CiRow>)> {
    let mut state = start;
    let mut rows = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (next, row) = ci_step(&state, cfg)?;
        state = next;
        rows.push(row);
    }
    Ok((state, rows))
}
