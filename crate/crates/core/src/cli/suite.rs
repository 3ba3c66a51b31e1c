//! The acceptance battery at default desk-scale parameters.

use super::config::*;
use super::experiments as ex;
use super::manifest::{Gate, Manifest, Outcome};
use crate::error::Result;

pub const CRITERIA: u32 = 12;

/// One battery entry: a group name for filtering and the criteria its gates cover.
pub struct Entry {
    pub group: &'static str,
    pub criteria: &'static [u32],
    pub run: fn(&SuiteConfig) -> Result<Outcome>,
}

fn merge(parts: Vec<Outcome>) -> Outcome {
    let mut o = Outcome::default();
    for p in parts {
        o.gates.extend(p.gates);
        o.measurements.extend(p.measurements);
    }
    o
}

fn toy(_: &SuiteConfig) -> Result<Outcome> {
    ex::toy(&ToyConfig::default())
}

fn multipliers(_: &SuiteConfig) -> Result<Outcome> {
    Ok(merge(vec![
        ex::multiplier(&MultiplierConfig { name: "sqg".into(), ..Default::default() })?,
        ex::multiplier(&MultiplierConfig { name: "ipm".into(), ..Default::default() })?,
    ]))
}

fn wavecone(_: &SuiteConfig) -> Result<Outcome> {
    ex::wavecone(&WaveconeConfig::default())
}

fn shear(_: &SuiteConfig) -> Result<Outcome> {
    ex::subsol(&SubsolConfig::default())
}

fn muskat(_: &SuiteConfig) -> Result<Outcome> {
    ex::subsol(&SubsolConfig { kind: "muskat".into(), ..Default::default() })
}

fn euler_ci(s: &SuiteConfig) -> Result<Outcome> {
    ex::euler_ci(&EulerCiRunConfig { seed: s.seed, ..Default::default() })
}

fn embed(_: &SuiteConfig) -> Result<Outcome> {
    ex::embed(&EmbedConfig::default())
}

fn contract(_: &SuiteConfig) -> Result<Outcome> {
    ex::step_contract(1024)
}

fn mollify(s: &SuiteConfig) -> Result<Outcome> {
    ex::mollify_exp(&MollifyExpConfig { seed: s.seed, ..Default::default() })
}

fn degree(_: &SuiteConfig) -> Result<Outcome> {
    ex::degree(256)
}

/// Repeats the seeded toy and Euler runs and compares their manifests byte for byte.
fn determinism(s: &SuiteConfig) -> Result<Outcome> {
    let ci = EulerCiRunConfig { seed: s.seed, ..Default::default() };
    let bytes = |o: Outcome, cfg: serde_json::Value| Manifest::new("check", cfg, &o).to_bytes();
    let toy_a = bytes(ex::toy(&ToyConfig::default())?, serde_json::Value::Null)?;
    let toy_b = bytes(ex::toy(&ToyConfig::default())?, serde_json::Value::Null)?;
    let ci_a = bytes(ex::euler_ci(&ci)?, serde_json::to_value(&ci)?)?;
    let ci_b = bytes(ex::euler_ci(&ci)?, serde_json::to_value(&ci)?)?;
    let same = toy_a == toy_b && ci_a == ci_b;
    let mut o = Outcome::default();
    o.gates.push(Gate::flag("suite.repeat_identical", Some(12), same));
    Ok(o)
}

pub fn battery() -> Vec<Entry> {
    vec![
        Entry { group: "toy", criteria: &[1, 2], run: toy },
        Entry { group: "multiplier", criteria: &[3], run: multipliers },
        Entry { group: "wavecone", criteria: &[4], run: wavecone },
        Entry { group: "subsol", criteria: &[5], run: shear },
        Entry { group: "subsol", criteria: &[6], run: muskat },
        Entry { group: "euler-ci", criteria: &[7], run: euler_ci },
        Entry { group: "embed", criteria: &[8], run: embed },
        Entry { group: "embed", criteria: &[9], run: contract },
        Entry { group: "mollify-exp", criteria: &[10], run: mollify },
        Entry { group: "embed", criteria: &[11], run: degree },
        Entry { group: "suite", criteria: &[12], run: determinism },
    ]
}

/// Comma-separated group names or criterion numbers; no filter keeps everything.
pub fn selected(e: &Entry, filter: Option<&str>) -> bool {
    match filter {
        None => true,
        Some(f) => f.split(',').map(str::trim).any(|t| {
            t == e.group || t.parse::<u32>().map(|c| e.criteria.contains(&c)).unwrap_or(false)
        }),
    }
}

/// Runs the selected entries in order. An entry that errors contributes one failing gate
/// carrying the error message.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    for e in battery().iter().filter(|e| selected(e, cfg.filter.as_deref())) {
        match (e.run)(cfg) {
            Ok(o) => {
                out.gates.extend(o.gates);
                out.measurements.extend(o.measurements);
            }
            Err(err) => out.gates.push(Gate {
                id: format!("{}.error", e.group),
                criterion: e.criteria.first().copied(),
                value: err.to_string(),
                gate: "no error".into(),
                pass: false,
            }),
        }
    }
    Ok(out)
}

/// Pass/fail per criterion: every gate tagged with it must pass.
pub fn criteria_status(m: &Manifest) -> Vec<(u32, Option<bool>)> {
    (1..=CRITERIA)
        .map(|c| {
            let gates: Vec<&Gate> = m.gates.iter().filter(|g| g.criterion == Some(c)).collect();
            (c, (!gates.is_empty()).then(|| gates.iter().all(|g| g.pass)))
        })
        .collect()
}
