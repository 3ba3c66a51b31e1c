//! Gates, run manifests and atomic artifact output.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fields::io::{fmt_f64, write_atomic};

/// One pass/fail check with the measured value and the bound it was held to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub id: String,
    /// Acceptance criterion the gate belongs to, when it belongs to one.
    pub criterion: Option<u32>,
    pub value: String,
    pub gate: String,
    pub pass: bool,
}

impl Gate {
    pub fn le(id: &str, criterion: Option<u32>, value: f64, bound: f64) -> Self {
        Self {
            id: id.into(),
            criterion,
            value: fmt_f64(value),
            gate: format!("<= {}", fmt_f64(bound)),
            pass: value <= bound,
        }
    }

    pub fn ge(id: &str, criterion: Option<u32>, value: f64, bound: f64) -> Self {
        Self {
            id: id.into(),
            criterion,
            value: fmt_f64(value),
            gate: format!(">= {}", fmt_f64(bound)),
            pass: value >= bound,
        }
    }

    pub fn gt(id: &str, criterion: Option<u32>, value: f64, bound: f64) -> Self {
        Self {
            id: id.into(),
            criterion,
            value: fmt_f64(value),
            gate: format!("> {}", fmt_f64(bound)),
            pass: value > bound,
        }
    }

    pub fn within(id: &str, criterion: Option<u32>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            criterion,
            value: fmt_f64(value),
            gate: format!("{} +- {}", fmt_f64(target), fmt_f64(tol)),
            pass: (value - target).abs() <= tol,
        }
    }

    /// value ∈ [lo, hi].
    pub fn band(id: &str, criterion: Option<u32>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            id: id.into(),
            criterion,
            value: fmt_f64(value),
            gate: format!("in [{}, {}]", fmt_f64(lo), fmt_f64(hi)),
            pass: value >= lo && value <= hi,
        }
    }

    pub fn flag(id: &str, criterion: Option<u32>, ok: bool) -> Self {
        Self {
            id: id.into(),
            criterion,
            value: ok.to_string(),
            gate: "== true".into(),
            pass: ok,
        }
    }

    /// Exact comparison of a textual value such as a rational.
    pub fn equals(id: &str, criterion: Option<u32>, value: &str, expected: &str) -> Self {
        Self {
            id: id.into(),
            criterion,
            value: value.into(),
            gate: format!("== {expected}"),
            pass: value == expected,
        }
    }

    pub fn line(&self) -> String {
        let c = self.criterion.map(|c| format!("[{c}] ")).unwrap_or_default();
        format!(
            "{} {c}{} = {} (gate {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.value,
            self.gate
        )
    }
}

/// Result of one experiment before anything touches the disk.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub gates: Vec<Gate>,
    /// Reported values that are not gated.
    pub measurements: BTreeMap<String, String>,
    pub artifacts: Vec<(PathBuf, Vec<u8>)>,
}

impl Outcome {
    pub fn measure(&mut self, key: &str, value: f64) {
        self.measurements.insert(key.into(), fmt_f64(value));
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.measurements.insert(key.into(), value.into());
    }

    pub fn artifact(&mut self, path: &Option<PathBuf>, bytes: impl FnOnce() -> Result<Vec<u8>>) -> Result<()> {
        if let Some(p) = path {
            self.artifacts.push((p.clone(), bytes()?));
        }
        Ok(())
    }
}

pub const MANIFEST_VERSION: u32 = 1;

/// Config echo, versions and every gate of a run. Carries no timestamps so that
/// identical runs give identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    pub versions: BTreeMap<String, String>,
    pub gates: Vec<Gate>,
    pub measurements: BTreeMap<String, String>,
    pub artifacts: Vec<String>,
    pub pass: bool,
    pub failures: Vec<String>,
}

pub fn versions() -> BTreeMap<String, String> {
    let mut v = BTreeMap::new();
    v.insert("cilab".into(), env!("CARGO_PKG_VERSION").into());
    v.insert("manifest".into(), MANIFEST_VERSION.to_string());
    v
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value, outcome: &Outcome) -> Self {
        let failures: Vec<String> = outcome.gates.iter().filter(|g| !g.pass).map(|g| g.id.clone()).collect();
        Self {
            command: command.into(),
            config,
            versions: versions(),
            gates: outcome.gates.clone(),
            measurements: outcome.measurements.clone(),
            artifacts: outcome.artifacts.iter().map(|(p, _)| p.display().to_string()).collect(),
            pass: failures.is_empty(),
            failures,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut b = serde_json::to_vec_pretty(self)?;
        b.push(b'\n');
        Ok(b)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&g.line());
            s.push('\n');
        }
        for (k, v) in &self.measurements {
            s.push_str(&format!("  {k} = {v}\n"));
        }
        let passed = self.gates.iter().filter(|g| g.pass).count();
        s.push_str(&format!("{}: {passed}/{} gates pass\n", self.command, self.gates.len()));
        s
    }
}

/// Writes the artifacts, then the manifest, each through a temp file and a rename.
pub fn write_outputs(outcome: &Outcome, manifest: &Manifest, manifest_path: Option<&PathBuf>) -> Result<()> {
    for (p, bytes) in &outcome.artifacts {
        write_atomic(p, bytes)?;
    }
    if let Some(p) = manifest_path {
        write_atomic(p, &manifest.to_bytes()?)?;
    }
    Ok(())
}
