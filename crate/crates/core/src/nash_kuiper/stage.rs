//! Stages (mollify, decompose, corrugate serially) and multi-stage runs with norm tracking.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::corrugate::{choose_frequency, corrugation_step, max_resolvable, Clamp};
use super::decompose::decompose_with_margin;
use super::geometry::{c1_seminorm, c2_seminorm, deficit, difference, min_eig, sup_norm};
use crate::error::{Error, Result};
use crate::fields::commutator::fit_slope;
use crate::fields::{mollify_vector, Kernel, ScalarField, SymTensorField, VectorField};

/// Number of primitive metrics needed in two dimensions.
pub const N_STAR: usize = 3;

/// Terms with a² below this fraction of the largest a² are roundoff and skipped.
pub const ACTIVE_THRESHOLD: f64 = 1e-10;

/// 1/(1 + 2n_*).
pub fn theoretical_exponent() -> f64 {
    1.0 / (1.0 + 2.0 * N_STAR as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StageConfig {
    pub k_const: f64,
    pub delta_margin: f64,
    /// Samples per oscillation at the frequency ceiling.
    pub samples_per_wave: f64,
    /// Allowed relative growth of the deficit sup under mollification.
    pub mollify_tolerance: f64,
    /// Frequency floor in waves across the domain, used when the C² seminorm vanishes.
    pub floor_waves: f64,
    pub stop_on_clamp: bool,
}

impl Default for StageConfig {
    fn default() -> Self {
        Self {
            k_const: 4.0,
            delta_margin: 0.1,
            samples_per_wave: 16.0,
            mollify_tolerance: 0.2,
            floor_waves: 2.0,
            stop_on_clamp: true,
        }
    }
}

impl StageConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_const > 2.0) || !self.k_const.is_finite() {
            return Err(Error::Config(format!("k_const must exceed 2, got {}", self.k_const)));
        }
        if !(self.delta_margin >= 0.0 && self.delta_margin < 1.0) {
            return Err(Error::Config(format!(
                "delta_margin must lie in [0, 1), got {}",
                self.delta_margin
            )));
        }
        if !(self.samples_per_wave >= super::corrugate::MIN_SAMPLES_PER_WAVE) {
            return Err(Error::Config(format!(
                "samples_per_wave must be at least {}",
                super::corrugate::MIN_SAMPLES_PER_WAVE
            )));
        }
        if !(self.floor_waves >= 1.0) || !self.floor_waves.is_finite() {
            return Err(Error::Config("floor_waves must be at least 1".into()));
        }
        if !(self.mollify_tolerance > 0.0) {
            return Err(Error::Config("mollify_tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub deficit_before: f64,
    pub deficit_after_mollify: f64,
    pub deficit_after: f64,
    /// deficit_after / deficit_before.
    pub contraction: f64,
    /// sup |D(u' − u)|.
    pub delta_c1: f64,
    pub c1_after: f64,
    pub c2_before: f64,
    pub c2_after: f64,
    pub k_const: f64,
    pub mollify_scale: f64,
    pub mollify_below_grid: bool,
    pub mollify_ok: bool,
    pub lambdas: Vec<f64>,
    pub directions: Vec<[f64; 2]>,
    pub clamps: Vec<Clamp>,
    /// Smallest eigenvalue of g − u'♯e.
    pub min_margin: f64,
    /// μ·min-eig(g), the part of the deficit the stage target leaves in place.
    pub retained: f64,
}

impl StageReport {
    pub fn clamped(&self) -> bool {
        self.clamps.contains(&Clamp::Ceiling)
    }
}

fn floor_frequency(u: &VectorField, waves: f64) -> f64 {
    waves * 2.0 * PI / u.grid.period
}

/// Nearest frequency at or above `lambda` whose phase λx·ν is periodic on the torus,
/// stepping down when that would exceed `ceiling`.
fn commensurate(lambda: f64, nu: [f64; 2], period: f64, ceiling: f64) -> f64 {
    let step = 2.0 * PI / (period * nu[0].abs().max(nu[1].abs()));
    let up = (lambda / step).ceil() * step;
    if up <= ceiling {
        up
    } else {
        ((lambda / step).floor() * step).max(step)
    }
}

pub fn stage(u: &VectorField, g: &SymTensorField, cfg: &StageConfig) -> Result<(VectorField, StageReport)> {
    cfg.validate()?;
    let d0 = deficit(u, g)?;
    let before = sup_norm(&d0);
    let c2_before = c2_seminorm(u);
    let c1_before = c1_seminorm(u);
    if min_eig(&d0) < 0.0 && before > 1e-12 {
        return Err(Error::Domain(format!(
            "map is not short: smallest deficit eigenvalue {}",
            min_eig(&d0)
        )));
    }
    if before <= 1e-12 {
        return Ok((
            u.clone(),
            StageReport {
                deficit_before: before,
                deficit_after_mollify: before,
                deficit_after: before,
                contraction: 1.0,
                delta_c1: 0.0,
                c1_after: c1_before,
                c2_before,
                c2_after: c2_before,
                k_const: cfg.k_const,
                mollify_scale: 0.0,
                mollify_below_grid: true,
                mollify_ok: true,
                lambdas: vec![],
                directions: vec![],
                clamps: vec![],
                min_margin: min_eig(&d0),
                retained: 0.0,
            },
        ));
    }
    let h = u.grid.spacing();
    // an (almost) affine map is left alone: smoothing cannot change it
    let ell = if c2_before > 1e-6 * before.sqrt() {
        (before.sqrt() / c2_before).min(u.grid.period / 8.0)
    } else {
        0.0
    };
    let (um, below) = if ell >= h {
        let m = mollify_vector(u, ell, &Kernel::quartic())?;
        (m.field, m.below_grid)
    } else {
        (u.clone(), true)
    };
    let dm = deficit(&um, g)?;
    let after_moll = sup_norm(&dm);
    let mollify_ok = after_moll <= (1.0 + cfg.mollify_tolerance) * before;
    let (parts, mu) = decompose_with_margin(&dm, g, cfg.delta_margin)?;
    let mut cur = um;
    let mut lambdas = Vec::new();
    let mut directions = Vec::new();
    let mut clamps = Vec::new();
    for term in parts.active(ACTIVE_THRESHOLD) {
        let ceiling = max_resolvable(h, term.nu, cfg.samples_per_wave);
        let (mut lambda, clamp) = choose_frequency(
            c2_seminorm(&cur),
            after_moll,
            cfg.k_const,
            floor_frequency(u, cfg.floor_waves),
            ceiling,
        )?;
        if u.grid.is_periodic() {
            lambda = commensurate(lambda, term.nu, u.grid.period, ceiling);
        }
        let a = ScalarField::new(cur.grid, term.amplitude())?;
        cur = corrugation_step(&cur, &a, term.nu, lambda)?;
        lambdas.push(lambda);
        directions.push(term.nu);
        clamps.push(clamp);
    }
    let d1 = deficit(&cur, g)?;
    let after = sup_norm(&d1);
    let report = StageReport {
        deficit_before: before,
        deficit_after_mollify: after_moll,
        deficit_after: after,
        contraction: after / before,
        delta_c1: c1_seminorm(&difference(&cur, u)),
        c1_after: c1_seminorm(&cur),
        c2_before,
        c2_after: c2_seminorm(&cur),
        k_const: cfg.k_const,
        mollify_scale: ell,
        mollify_below_grid: below,
        mollify_ok,
        lambdas,
        directions,
        clamps,
        min_margin: min_eig(&d1),
        retained: mu * min_eig(g),
    };
    Ok((cur, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub deficit0: f64,
    pub c1_0: f64,
    pub c2_0: f64,
    pub stages: Vec<StageReport>,
    pub requested_stages: usize,
    /// Set when the run ended before `requested_stages`; the reason is in `stop_reason`.
    pub partial: bool,
    pub stop_reason: Option<String>,
    /// Slope of log deficit_j against j.
    pub deficit_slope: f64,
    /// Slope of log C²_j against j.
    pub c2_slope: f64,
    /// Slope of log ΔC¹_j against j.
    pub c1_increment_slope: f64,
    /// −s₁/(s₂ − s₁) from the increment and C² slopes.
    pub alpha_hat: f64,
    pub alpha_theory: f64,
}

fn slope_of(vals: &[f64]) -> f64 {
    if vals.len() < 2 || vals.iter().any(|v| !(*v > 0.0)) {
        return f64::NAN;
    }
    let x: Vec<f64> = (1..=vals.len()).map(|j| j as f64).collect();
    let y: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    fit_slope(&x, &y)
}

pub fn nash_kuiper_run(
    u0: &VectorField,
    g: &SymTensorField,
    stages: usize,
    cfg: &StageConfig,
) -> Result<(VectorField, RunReport)> {
    if stages < 2 {
        return Err(Error::Config(format!("a run needs at least 2 stages, got {stages}")));
    }
    cfg.validate()?;
    let d0 = deficit(u0, g)?;
    let mut report = RunReport {
        deficit0: sup_norm(&d0),
        c1_0: c1_seminorm(u0),
        c2_0: c2_seminorm(u0),
        stages: vec![],
        requested_stages: stages,
        partial: false,
        stop_reason: None,
        deficit_slope: f64::NAN,
        c2_slope: f64::NAN,
        c1_increment_slope: f64::NAN,
        alpha_hat: f64::NAN,
        alpha_theory: theoretical_exponent(),
    };
    let mut u = u0.clone();
    for j in 0..stages {
        match stage(&u, g, cfg) {
            Ok((next, rep)) => {
                let clamped = rep.clamped();
                let short = rep.min_margin >= 0.0;
                u = next;
                report.stages.push(rep);
                if j + 1 < stages {
                    if !short {
                        report.stop_reason = Some(format!("strict shortness lost in stage {}", j + 1));
                        break;
                    }
                    if clamped && cfg.stop_on_clamp {
                        report.stop_reason = Some(format!("frequency ceiling reached in stage {}", j + 1));
                        break;
                    }
                }
            }
            Err(e @ Error::Decomposition { .. }) | Err(e @ Error::Frequency(_)) | Err(e @ Error::Amplitude(_)) => {
                report.stop_reason = Some(format!("stage {}: {e}", j + 1));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    report.partial = report.stages.len() < stages;
    let defs: Vec<f64> = report.stages.iter().map(|s| s.deficit_after).collect();
    let c2s: Vec<f64> = report.stages.iter().map(|s| s.c2_after).collect();
    let inc: Vec<f64> = report.stages.iter().map(|s| s.delta_c1).collect();
    report.deficit_slope = slope_of(&defs);
    report.c2_slope = slope_of(&c2s);
    report.c1_increment_slope = slope_of(&inc);
    report.alpha_hat = -report.c1_increment_slope / (report.c2_slope - report.c1_increment_slope);
    Ok((u, report))
}
