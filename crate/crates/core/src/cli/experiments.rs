//! One runner per subcommand: compute, gate, and collect artifacts without writing them.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde_json::json;

use super::config::*;
use super::manifest::{Gate, Outcome};
use crate::error::{Error, Result};
use crate::euler_ci::{ci_run, cross_term_pairing, trivial_start};
use crate::euler_subsol::{
    admissibility_triple, build_muskat_subsolution, build_shear_subsolution, constraint_margin,
    dissipation_scan, muskat_report, profile_weak_residual, shear_energy, shear_grid, ShearParams, ShearProfile,
};
use crate::fields::commutator::{default_scales, fit_slope, r_squared};
use crate::fields::io::{csv_bytes, fmt_f64};
use crate::fields::{commutator_exponent, Grid, ScalarField, VectorField};
use crate::nash_kuiper::{
    corrugation_step, flat_square, flat_torus, gauss_degree_check, metric_gain_error, nash_kuiper_run, report_csv,
    to_obj, N_STAR,
};
use crate::tartar::{
    discrete_residual, euler_linear_system, euler_state, multiplier_apply, multiplier_check, plane_wave,
    wave_cone_contains, Multiplier, Parity,
};
use crate::toy_ci::{
    averaged_defect_recursion_check, lemma_bound_holds, ratios_in_band, toy_run, toy_table, PiecewiseConstantFn,
    Schedule,
};

fn json_bytes(v: &serde_json::Value) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

pub const TOY_HEADER: [&str; 6] = ["k", "lambda_k", "defect", "defect_float", "l1_increment", "tv_increment"];

pub fn toy(cfg: &ToyConfig) -> Result<Outcome> {
    let traj = toy_run(&PiecewiseConstantFn::zero(), &Schedule::Dyadic { shift: cfg.shift }, cfg.steps)?;
    let mut o = Outcome::default();
    o.gates.push(Gate::flag("toy.lemma_bound", Some(1), lemma_bound_holds(&traj)));
    o.gates.push(Gate::equals("toy.defect_1", Some(1), &traj.defects[1].to_string(), "3/4"));
    o.gates.push(Gate::equals("toy.defect_2", Some(1), &traj.defects[2].to_string(), "39/64"));
    o.gates.push(Gate::flag("toy.averaged_recursion", Some(2), averaged_defect_recursion_check(&traj)));
    o.gates.push(Gate::flag("toy.ratio_band", None, ratios_in_band(&traj)));
    let rows = toy_table(&traj)?;
    if let Some(last) = rows.last() {
        o.measure("toy.final_defect_float", last.defect_float);
    }
    o.artifact(&cfg.out, || {
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    r.lambda_k.to_string(),
                    r.defect.clone(),
                    fmt_f64(r.defect_float),
                    fmt_f64(r.l1_increment),
                    fmt_f64(r.tv_increment),
                ]
            })
            .collect();
        csv_bytes(&TOY_HEADER, &cells)
    })?;
    Ok(o)
}

/// Smallest integer multiple of the direction, if one exists with entries up to 16/min|ξ_i|.
fn lattice_direction(xi: &[f64]) -> Option<Vec<f64>> {
    let m = xi.iter().map(|x| x.abs()).filter(|x| *x > 1e-12).fold(f64::INFINITY, f64::min);
    if !m.is_finite() {
        return None;
    }
    (1..=16).find_map(|k| {
        let t = k as f64 / m;
        let c: Vec<f64> = xi.iter().map(|x| x * t).collect();
        c.iter()
            .all(|v| (v - v.round()).abs() <= 1e-8 * v.abs().max(1.0))
            .then(|| c.iter().map(|v| v.round() + 0.0).collect())
    })
}

fn wave_residual(lattice: &[f64], a: &nalgebra::DVector<f64>, n: usize) -> Result<f64> {
    let sys = euler_linear_system(2)?;
    let grid = Grid::periodic(2, n, 1.0)?.with_time(3, 0.0, 1.0 / n as f64)?;
    let z = plane_wave(&sys, a, lattice, |y| (2.0 * PI * y).sin(), &grid, 1e-10)?;
    discrete_residual(&sys, &z)
}

pub fn wavecone(cfg: &WaveconeConfig) -> Result<Outcome> {
    let sys = euler_linear_system(2)?;
    let [v1, v2] = cfg.velocity;
    let n = v1.hypot(v2);
    let a = euler_state(&[v1 / n, v2 / n], &[0.0; 4], 0.0)?;
    let witness = wave_cone_contains(&sys, &a, 1e-10)?;
    let lattice = witness.as_ref().and_then(|w| lattice_direction(&w.xi));
    let mut o = Outcome::default();
    o.gates.push(Gate::flag("wavecone.witness", Some(4), witness.is_some()));
    o.gates.push(Gate::flag("wavecone.lattice_direction", Some(4), lattice.is_some()));
    let (coarse, fine) = match &lattice {
        Some(l) => (wave_residual(l, &a, cfg.coarse)?, wave_residual(l, &a, cfg.fine)?),
        None => (f64::NAN, f64::NAN),
    };
    let order = (coarse / fine).ln() / (cfg.fine as f64 / cfg.coarse as f64).ln();
    o.gates.push(Gate::ge("wavecone.residual_order", Some(4), order, cfg.min_order));
    o.measure("wavecone.residual_coarse", coarse);
    o.measure("wavecone.residual_fine", fine);
    if let Some(w) = &witness {
        o.note("wavecone.witness_xi", w.xi.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" "));
    }
    o.artifact(&cfg.out, || {
        json_bytes(&json!({
            "velocity": [v1, v2],
            "witness": witness.as_ref().map(|w| w.xi.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>()),
            "witness_residual": witness.as_ref().map(|w| fmt_f64(w.residual)),
            "lattice_direction": lattice,
            "resolutions": [cfg.coarse, cfg.fine],
            "residuals": [fmt_f64(coarse), fmt_f64(fine)],
            "order": fmt_f64(order),
        }))
    })?;
    Ok(o)
}

pub fn load_multiplier(cfg: &MultiplierConfig) -> Result<Multiplier> {
    match &cfg.symbol_file {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            Multiplier::from_symbol_file(&cfg.name, &text)
        }
        None => Multiplier::by_name(&cfg.name),
    }
}

/// sup |T[sin 2πx₁] − Im(m(1,0) e^{2πix₁})| on the periodic grid.
fn single_mode_error(m: &Multiplier, resolution: usize) -> Result<f64> {
    let g = Grid::periodic(2, resolution, 1.0)?;
    let th = ScalarField::from_fn(g, |x, _, _| (2.0 * PI * x).sin());
    let v = multiplier_apply(m, &th)?;
    let s = m.eval([1.0, 0.0]);
    let mut e: f64 = 0.0;
    for i in 0..g.len() {
        let (sn, cs) = (2.0 * PI * g.point(i)[0]).sin_cos();
        for c in 0..2 {
            e = e.max((v.comps[c][i] - (s[c].re * sn + s[c].im * cs)).abs());
        }
    }
    Ok(e)
}

pub fn multiplier(cfg: &MultiplierConfig) -> Result<Outcome> {
    let m = load_multiplier(cfg)?;
    let r = multiplier_check(&m);
    let id = |s: &str| format!("multiplier.{}.{s}", cfg.name);
    let parity = match r.parity {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::Neither => "neither",
    };
    let parity_ok = match cfg.expected_parity() {
        "any" => parity != "neither",
        p => p == parity,
    };
    let mode_err = single_mode_error(&m, cfg.resolution).unwrap_or(f64::NAN);
    let mut o = Outcome::default();
    o.gates.push(Gate::le(&id("homogeneity"), Some(3), r.max_homogeneity_error, 1e-12));
    o.gates.push(Gate::le(&id("divergence"), Some(3), r.max_divergence, 1e-12));
    o.gates.push(Gate {
        id: id("parity"),
        criterion: Some(3),
        value: parity.into(),
        gate: format!("== {}", cfg.expected_parity()),
        pass: parity_ok,
    });
    o.gates.push(Gate::flag(&id("real_output"), None, r.real));
    o.gates.push(Gate::le(&id("single_mode"), Some(3), mode_err, 1e-10));
    o.measure(&id("modes_tested"), r.modes_tested as f64);
    o.artifact(&cfg.out, || json_bytes(&serde_json::to_value(&r)?))?;
    Ok(o)
}

fn energy_path(out: &Option<PathBuf>) -> Option<PathBuf> {
    out.as_ref().map(|p| p.with_extension("energy.csv"))
}

/// Speeds 0.05, 0.10, …, 1.95.
pub fn scan_speeds() -> Vec<f64> {
    (1..40).map(|i| i as f64 * 0.05).collect()
}

pub fn subsol(cfg: &SubsolConfig) -> Result<Outcome> {
    match cfg.kind.as_str() {
        "shear" => shear(cfg),
        "muskat" => muskat(cfg),
        k => Err(Error::Config(format!("field `kind`: expected shear or muskat, got '{k}'"))),
    }
}

fn shear(cfg: &SubsolConfig) -> Result<Outcome> {
    let mut params = ShearParams::new(cfg.speed());
    params.t_end = cfg.t_end;
    let grid = shear_grid(cfg.resolution, cfg.time_samples, params.t_end)?;
    let weak = profile_weak_residual(&ShearProfile(params), &grid)?;
    let t = build_shear_subsolution(&params, &grid)?;
    let m = constraint_margin(&t)?;
    let ns = grid.len_space();
    let ta = grid.time.ok_or_else(|| Error::InvalidGrid("shear grid needs time".into()))?;
    let mut inside = f64::INFINITY;
    for it in 0..ta.samples {
        let w = params.c * ta.time(it);
        for idx in 0..ns {
            if grid.point(idx)[1].abs() < w {
                inside = inside.min(m.values[it * ns + idx]);
            }
        }
    }
    let adm = admissibility_triple(&t, 1e-10)?;
    let r2 = r_squared(&adm.times, &adm.energy);
    let slope = fit_slope(&adm.times, &adm.energy);
    let scan = dissipation_scan(&scan_speeds())?;

    let mut o = Outcome::default();
    o.gates.push(Gate::le("shear.weak_residual", Some(5), weak, 1e-8));
    o.gates.push(Gate::ge("shear.margin_min", Some(5), m.min(), 0.0));
    o.gates.push(Gate::gt("shear.margin_inside_zone", Some(5), inside, 0.0));
    o.gates.push(Gate::ge("shear.energy_r_squared", Some(5), r2, 0.999));
    o.gates.push(Gate::within("shear.scan_c_star", Some(5), scan.c_star, scan.reference_c_star, 1e-2));
    o.gates.push(Gate::within("shear.scan_rate", Some(5), scan.rate_star, scan.reference_rate, 1e-2));
    o.gates.push(Gate::flag("shear.admissible_a_b", None, adm.a && adm.b && adm.a_prime && adm.b_prime));
    o.measure("shear.energy_slope", slope);
    o.measure("shear.energy_slope_closed_form", (shear_energy(&params, cfg.t_end) - shear_energy(&params, cfg.t_end / 2.0)) / (cfg.t_end / 2.0));
    o.measure("shear.scan_closed_form_c_star", scan.closed_form_c_star);
    o.measure("shear.scan_closed_form_rate", scan.closed_form_rate);
    o.measure("shear.benchmark_rate_reference", scan.paper_rate);
    o.measure("shear.local_energy_violation", adm.local_energy_violation);

    o.artifact(&cfg.out, || {
        json_bytes(&json!({
            "kind": "shear",
            "c": fmt_f64(params.c),
            "resolution": cfg.resolution,
            "weak_residual": fmt_f64(weak),
            "margin_min": fmt_f64(m.min()),
            "margin_inside_zone_min": fmt_f64(inside),
            "energy_slope": fmt_f64(slope),
            "energy_r_squared": fmt_f64(r2),
            "admissibility": {"a": adm.a, "b": adm.b, "a_prime": adm.a_prime, "b_prime": adm.b_prime,
                "local_energy_violation": fmt_f64(adm.local_energy_violation)},
            "scan": scan.rows.iter().map(|r| json!({"c": fmt_f64(r.c), "measured": fmt_f64(r.measured),
                "closed_form": fmt_f64(r.closed_form)})).collect::<Vec<_>>(),
            "scan_c_star": fmt_f64(scan.c_star),
            "scan_rate_star": fmt_f64(scan.rate_star),
        }))
    })?;
    o.artifact(&energy_path(&cfg.out), || {
        let rows: Vec<Vec<String>> =
            adm.times.iter().zip(&adm.energy).map(|(t, e)| vec![fmt_f64(*t), fmt_f64(*e)]).collect();
        csv_bytes(&["t", "energy"], &rows)
    })?;
    Ok(o)
}

fn muskat(cfg: &SubsolConfig) -> Result<Outcome> {
    let c = cfg.speed();
    let s = build_muskat_subsolution(c, cfg.t_end, cfg.resolution, cfg.time_samples)?;
    let r = muskat_report(&s)?;
    let mut o = Outcome::default();
    o.gates.push(Gate::le("muskat.residual", Some(6), r.residual, 1e-10));
    o.gates.push(Gate::le("muskat.max_abs_theta", Some(6), r.max_abs_theta, 1.0));
    o.gates.push(Gate::within("muskat.width_slope", Some(6), r.width_slope, 2.0 * c, 1e-6));
    o.measure("muskat.max_velocity", r.max_velocity);
    o.artifact(&cfg.out, || {
        json_bytes(&json!({
            "kind": "muskat",
            "c": fmt_f64(c),
            "resolution": cfg.resolution,
            "residual": fmt_f64(r.residual),
            "max_abs_theta": fmt_f64(r.max_abs_theta),
            "max_velocity": fmt_f64(r.max_velocity),
            "width_slope": fmt_f64(r.width_slope),
        }))
    })?;
    o.artifact(&energy_path(&cfg.out), || {
        let rows: Vec<Vec<String>> =
            r.times.iter().zip(&r.widths).map(|(t, w)| vec![fmt_f64(*t), fmt_f64(*w)]).collect();
        csv_bytes(&["t", "width"], &rows)
    })?;
    Ok(o)
}

pub const CI_HEADER: [&str; 6] = ["k", "lambda_k", "delta_k", "l2_v", "linres", "min_margin"];

pub fn euler_ci(cfg: &EulerCiRunConfig) -> Result<Outcome> {
    let ci = cfg.ci();
    let (state, rows) = ci_run(trivial_start(cfg.resolution)?, cfg.steps, &ci)?;
    let h = &state.deficit_trace_history;
    let k = cfg.steps as i32;
    let ratio = h[h.len() - 1] / h[0];
    let div = rows.iter().map(|r| r.divergence).fold(0.0, f64::max);
    let lin = rows.iter().map(|r| r.linres).fold(0.0, f64::max);
    let margin = rows.iter().map(|r| r.min_margin).fold(f64::INFINITY, f64::min);
    let lam = rows.last().map(|r| r.lambda_k.round()).unwrap_or(cfg.lambda0 as f64);
    let pairing = cross_term_pairing(lam)?;
    let mut o = Outcome::default();
    o.gates.push(Gate::le("euler_ci.contraction", Some(7), ratio, cfg.rho.powi(k)));
    o.gates.push(Gate::le("euler_ci.divergence", Some(7), div, 1e-9));
    o.gates.push(Gate::ge("euler_ci.min_margin", Some(7), margin, 0.0));
    o.gates.push(Gate::within("euler_ci.cross_pairing_ratio", Some(7), pairing.ratio, 0.5, cfg.pairing_tolerance));
    o.gates.push(Gate::le("euler_ci.linear_residual", None, lin, ci.div_tol));
    o.measure("euler_ci.delta_0", h[0]);
    o.measure("euler_ci.delta_final", h[h.len() - 1]);
    o.measure("euler_ci.pairing_lambda", lam);
    o.artifact(&cfg.out, || {
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    fmt_f64(r.lambda_k),
                    fmt_f64(r.delta_k),
                    fmt_f64(r.l2_v),
                    fmt_f64(r.linres),
                    fmt_f64(r.min_margin),
                ]
            })
            .collect();
        csv_bytes(&CI_HEADER, &cells)
    })?;
    Ok(o)
}

pub fn embed(cfg: &EmbedConfig) -> Result<Outcome> {
    let (u, g) = match cfg.target.as_str() {
        "flat-square" => flat_square(cfg.resolution)?,
        "flat-torus" => flat_torus(cfg.resolution)?,
        t => return Err(Error::Config(format!("field `target`: unknown target '{t}'"))),
    };
    let (v, rep) = nash_kuiper_run(&u, &g, cfg.stages, &cfg.stage_config())?;
    let k = cfg.kconst;
    let band = rep
        .stages
        .iter()
        .map(|s| {
            let f = s.contraction * k;
            f.max(1.0 / f)
        })
        .fold(0.0, f64::max);
    let c1 = rep
        .stages
        .iter()
        .map(|s| s.delta_c1 / (2.0 * s.deficit_before.sqrt()))
        .fold(0.0, f64::max);
    let last = rep.stages.last().map(|s| s.deficit_after).unwrap_or(rep.deficit0);
    let short = rep.stages.iter().map(|s| s.min_margin).fold(f64::INFINITY, f64::min);
    let mut o = Outcome::default();
    o.gates.push(Gate::le("embed.contraction_factor", Some(8), band, 2.0));
    o.gates.push(Gate::le("embed.c1_increment_ratio", Some(8), c1, 1.0));
    o.gates.push(Gate::le("embed.c2_log_slope", Some(8), rep.c2_slope, (N_STAR as f64 + 0.5) * k.ln()));
    o.gates.push(Gate::flag("embed.all_stages_completed", Some(8), !rep.partial));
    o.gates.push(Gate::le(
        "embed.final_deficit",
        Some(8),
        last,
        2.0 * rep.deficit0 * k.powi(-(cfg.stages as i32)),
    ));
    o.gates.push(Gate::ge("embed.shortness_margin", None, short, 0.0));
    o.note("embed.stop_reason", rep.stop_reason.clone().unwrap_or_else(|| "none".into()));
    o.measure("embed.stages_completed", rep.stages.len() as f64);
    o.measure("embed.deficit0", rep.deficit0);
    o.measure("embed.alpha_hat", rep.alpha_hat);
    o.measure("embed.alpha_theory", rep.alpha_theory);
    for (j, s) in rep.stages.iter().enumerate() {
        o.measure(&format!("embed.stage{}.contraction", j + 1), s.contraction);
        o.measure(&format!("embed.stage{}.delta_c1", j + 1), s.delta_c1);
        o.measure(&format!("embed.stage{}.min_margin", j + 1), s.min_margin);
    }
    o.artifact(&cfg.mesh, || Ok(to_obj(&v)?.into_bytes()))?;
    o.artifact(&cfg.report, || report_csv(&rep))?;
    Ok(o)
}

pub fn mollify_exp(cfg: &MollifyExpConfig) -> Result<Outcome> {
    let mut o = Outcome::default();
    let mut rows = Vec::new();
    for &alpha in &cfg.alphas {
        let fit = commutator_exponent(alpha, &default_scales(), cfg.seed)?;
        o.gates.push(Gate::within(
            &format!("mollify.slope_alpha_{alpha}"),
            Some(10),
            fit.slope,
            2.0 * alpha - 1.0,
            cfg.tolerance,
        ));
        for (l, e) in fit.scales.iter().zip(&fit.errors) {
            rows.push(vec![fmt_f64(alpha), fmt_f64(*l), fmt_f64(*e), fmt_f64(fit.slope)]);
        }
    }
    o.artifact(&cfg.out, || csv_bytes(&["alpha", "scale", "error", "slope"], &rows))?;
    Ok(o)
}

pub const CONTRACT_LAMBDAS: [f64; 4] = [25.0, 50.0, 100.0, 200.0];

/// Metric-gain errors of single corrugations of the flat sheet, and the zero-amplitude identity.
pub fn step_contract(resolution: usize) -> Result<Outcome> {
    let g = Grid::clamped(2, resolution, 1.0)?;
    let u = VectorField::from_fn(g, |x, y, _| [x, y, 0.0]);
    let a = ScalarField::from_fn(g, |x, y, _| 0.5 + 0.2 * (2.0 * PI * x).sin() * (2.0 * PI * y).cos());
    let errs = CONTRACT_LAMBDAS
        .iter()
        .map(|l| metric_gain_error(&u, &a, [1.0, 0.0], *l, 4))
        .collect::<Result<Vec<f64>>>()?;
    let logs = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<_>>();
    let slope = fit_slope(&logs(&CONTRACT_LAMBDAS), &logs(&errs));
    let curved = VectorField::from_fn(g, |x, y, _| [x + 0.1 * y * y, y, 0.3 * x * y]);
    let zero = corrugation_step(&curved, &ScalarField::zeros(g), [1.0, 0.0], 30.0)?;
    let mut o = Outcome::default();
    o.gates.push(Gate::le("contract.gain_error_slope", Some(9), slope, -0.8));
    o.gates.push(Gate::flag("contract.zero_amplitude_identity", Some(9), zero.comps == curved.comps));
    for (l, e) in CONTRACT_LAMBDAS.iter().zip(&errs) {
        o.measure(&format!("contract.gain_error_lambda_{l}"), *e);
    }
    Ok(o)
}

/// Both sides of the Gauss-map change of variables on a sphere cap and a paraboloid.
pub fn degree(resolution: usize) -> Result<Outcome> {
    let g = Grid::clamped(2, resolution, 1.0)?.with_origin(-0.5);
    let sphere = VectorField::from_fn(g, |x, y, _| [x, y, (1.0 - x * x - y * y).sqrt()]);
    let parab = VectorField::from_fn(g, |x, y, _| [x, y, x * x + y * y]);
    let s = gauss_degree_check(&sphere, &|_| 1.0)?;
    let p = gauss_degree_check(&parab, &|_| 1.0)?;
    let mut o = Outcome::default();
    o.gates.push(Gate::le("degree.sphere_cap_relative", Some(11), s.relative, 0.01));
    o.gates.push(Gate::le("degree.paraboloid_relative", Some(11), p.relative, 0.01));
    o.measure("degree.sphere_cap_lhs", s.lhs);
    o.measure("degree.sphere_cap_rhs", s.rhs);
    o.measure("degree.paraboloid_lhs", p.lhs);
    o.measure("degree.paraboloid_rhs", p.rhs);
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_rescaling() {
        let r5 = 5f64.sqrt();
        assert_eq!(lattice_direction(&[2.0 / r5, -1.0 / r5, 0.0]), Some(vec![2.0, -1.0, 0.0]));
        assert_eq!(lattice_direction(&[0.6, 0.8]), Some(vec![3.0, 4.0]));
        assert_eq!(lattice_direction(&[1.0, 2f64.sqrt()]), None);
    }

    #[test]
    fn toy_gates_and_rows() {
        let cfg = ToyConfig { steps: 4, out: Some("x.csv".into()), ..Default::default() };
        let o = toy(&cfg).unwrap();
        assert!(o.gates.iter().all(|g| g.pass), "{:?}", o.gates);
        let text = String::from_utf8(o.artifacts[0].1.clone()).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.lines().nth(2).unwrap().starts_with("1,2,3/4,"));
    }

    #[test]
    fn multiplier_gates() {
        for name in ["sqg", "ipm"] {
            let o = multiplier(&MultiplierConfig { name: name.into(), ..Default::default() }).unwrap();
            assert!(o.gates.iter().all(|g| g.pass), "{:?}", o.gates);
        }
        let o = multiplier(&MultiplierConfig { name: "sqg".into(), parity: Some("even".into()), ..Default::default() })
            .unwrap();
        assert!(!o.gates[2].pass);
    }
}
