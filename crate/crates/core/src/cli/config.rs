//! Experiment configurations. Files are JSON objects with the field names below; unknown
//! keys are rejected and missing keys take the defaults.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler_ci::CiConfig;
use crate::euler_subsol::ShearParams;
use crate::euler_subsol::MuskatProfile;
use crate::fields::Grid;
use crate::nash_kuiper::StageConfig;

/// Reads a config file; an absent path gives the defaults.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("field `{field}`: {msg}"))
}

fn check_resolution(field: &str, n: usize, lo: usize, hi: usize) -> Result<()> {
    if !n.is_power_of_two() || n < lo || n > hi {
        return Err(field_err(field, format!("must be a power of two in [{lo}, {hi}], got {n}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToyConfig {
    pub steps: usize,
    /// λ_k = 2^(k + shift).
    pub shift: u32,
    pub out: Option<PathBuf>,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self { steps: 12, shift: 0, out: None }
    }
}

impl ToyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=16).contains(&self.steps) {
            return Err(field_err("steps", format!("must lie in [2, 16], got {}", self.steps)));
        }
        if self.shift > 16 {
            return Err(field_err("shift", format!("must be at most 16, got {}", self.shift)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveconeConfig {
    /// Velocity of the state a = (v, 0, 0); the witness is searched for it.
    pub velocity: [f64; 2],
    pub coarse: usize,
    pub fine: usize,
    pub min_order: f64,
    pub out: Option<PathBuf>,
}

impl Default for WaveconeConfig {
    fn default() -> Self {
        Self {
            velocity: [1.0, 2.0],
            coarse: 128,
            fine: 512,
            min_order: 1.8,
            out: None,
        }
    }
}

impl WaveconeConfig {
    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.velocity;
        if !(a.is_finite() && b.is_finite() && a.hypot(b) > 0.0) {
            return Err(field_err("velocity", "must be finite and nonzero"));
        }
        check_resolution("coarse", self.coarse, 8, 2048)?;
        check_resolution("fine", self.fine, 8, 2048)?;
        if self.fine <= self.coarse {
            return Err(field_err("fine", "must exceed coarse"));
        }
        if !(self.min_order > 0.0) {
            return Err(field_err("min_order", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiplierConfig {
    /// sqg or ipm; the label of the symbol when `symbol_file` is given.
    pub name: String,
    pub symbol_file: Option<PathBuf>,
    /// odd, even or any; defaults to odd for sqg, even for ipm, any otherwise.
    pub parity: Option<String>,
    pub resolution: usize,
    pub out: Option<PathBuf>,
}

impl Default for MultiplierConfig {
    fn default() -> Self {
        Self {
            name: "sqg".into(),
            symbol_file: None,
            parity: None,
            resolution: 128,
            out: None,
        }
    }
}

impl MultiplierConfig {
    pub fn expected_parity(&self) -> &str {
        match (&self.parity, self.symbol_file.is_some(), self.name.as_str()) {
            (Some(p), _, _) => p,
            (None, false, "sqg") => "odd",
            (None, false, "ipm") => "even",
            _ => "any",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.symbol_file.is_none() && !matches!(self.name.as_str(), "sqg" | "ipm") {
            return Err(field_err("name", format!("expected sqg or ipm, got '{}'", self.name)));
        }
        if let Some(p) = &self.parity {
            if !matches!(p.as_str(), "odd" | "even" | "any") {
                return Err(field_err("parity", format!("expected odd, even or any, got '{p}'")));
            }
        }
        check_resolution("resolution", self.resolution, 8, 1024)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SubsolConfig {
    /// shear or muskat.
    pub kind: String,
    /// Mixing speed; defaults to 0.5 for shear and 0.6 for muskat.
    pub c: Option<f64>,
    pub resolution: usize,
    pub time_samples: usize,
    pub t_end: f64,
    /// report.json; E(t) goes next to it with the extension `energy.csv`.
    pub out: Option<PathBuf>,
}

impl Default for SubsolConfig {
    fn default() -> Self {
        Self {
            kind: "shear".into(),
            c: None,
            resolution: 256,
            time_samples: 20,
            t_end: 0.2,
            out: None,
        }
    }
}

impl SubsolConfig {
    pub fn speed(&self) -> f64 {
        self.c.unwrap_or(if self.kind == "muskat" { 0.6 } else { 0.5 })
    }

    pub fn validate(&self) -> Result<()> {
        check_resolution("resolution", self.resolution, 16, 1024)?;
        if !(4..=200).contains(&self.time_samples) {
            return Err(field_err("time_samples", format!("must lie in [4, 200], got {}", self.time_samples)));
        }
        let c = self.speed();
        match self.kind.as_str() {
            "shear" => {
                let mut p = ShearParams::new(c);
                p.t_end = self.t_end;
                p.validate().map_err(|e| field_err("c", e))
            }
            "muskat" => MuskatProfile::new(c, self.t_end).map(|_| ()).map_err(|e| field_err("c", e)),
            k => Err(field_err("kind", format!("expected shear or muskat, got '{k}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EulerCiRunConfig {
    pub steps: usize,
    pub rho: f64,
    pub resolution: usize,
    pub lambda0: u64,
    pub kappa: f64,
    pub seed: u64,
    /// Tolerance on the cross-term pairing ratio ½.
    pub pairing_tolerance: f64,
    pub out: Option<PathBuf>,
}

impl Default for EulerCiRunConfig {
    fn default() -> Self {
        let c = CiConfig::default();
        Self {
            steps: 4,
            rho: c.rho,
            resolution: c.resolution,
            lambda0: c.lambda0,
            kappa: c.kappa,
            seed: c.seed,
            pairing_tolerance: 0.125,
            out: None,
        }
    }
}

impl EulerCiRunConfig {
    pub fn ci(&self) -> CiConfig {
        CiConfig {
            resolution: self.resolution,
            lambda0: self.lambda0,
            rho: self.rho,
            kappa: self.kappa,
            seed: self.seed,
            ..CiConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.steps) {
            return Err(field_err("steps", format!("must lie in [1, 8], got {}", self.steps)));
        }
        check_resolution("resolution", self.resolution, 16, 1024)?;
        if !(self.pairing_tolerance > 0.0) {
            return Err(field_err("pairing_tolerance", "must be positive"));
        }
        self.ci().validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmbedConfig {
    /// flat-square or flat-torus.
    pub target: String,
    pub stages: usize,
    pub kconst: f64,
    pub resolution: usize,
    pub delta_margin: f64,
    pub mesh: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            target: "flat-square".into(),
            stages: 3,
            kconst: 4.0,
            resolution: 1024,
            delta_margin: StageConfig::default().delta_margin,
            mesh: None,
            report: None,
        }
    }
}

impl EmbedConfig {
    pub fn stage_config(&self) -> StageConfig {
        StageConfig {
            k_const: self.kconst,
            delta_margin: self.delta_margin,
            ..StageConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.target.as_str(), "flat-square" | "flat-torus") {
            return Err(field_err("target", format!("expected flat-square or flat-torus, got '{}'", self.target)));
        }
        if !(2..=8).contains(&self.stages) {
            return Err(field_err("stages", format!("must lie in [2, 8], got {}", self.stages)));
        }
        check_resolution("resolution", self.resolution, 16, 2048)?;
        Grid::clamped(2, self.resolution, 1.0)?;
        self.stage_config().validate().map_err(|e| field_err("kconst", e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MollifyExpConfig {
    pub alphas: Vec<f64>,
    pub seed: u64,
    /// Allowed distance of the fitted slope from 2α − 1.
    pub tolerance: f64,
    pub out: Option<PathBuf>,
}

impl Default for MollifyExpConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.6, 0.75, 0.9],
            seed: 7,
            tolerance: 0.15,
            out: None,
        }
    }
}

impl MollifyExpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.alphas.len() > 8 {
            return Err(field_err("alphas", "needs between 1 and 8 entries"));
        }
        if self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(field_err("alphas", "entries must lie in (0, 1)"));
        }
        if !(self.tolerance > 0.0) {
            return Err(field_err("tolerance", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    /// Keep only battery entries whose group or criterion number matches.
    pub filter: Option<String>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { filter: None, seed: 7 }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(f) = &self.filter {
            if f.trim().is_empty() {
                return Err(field_err("filter", "must not be empty"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let e = serde_json::from_str::<ToyConfig>(r#"{"steps": 3, "stpes": 4}"#).unwrap_err();
        assert!(e.to_string().contains("stpes"));
        let t: ToyConfig = serde_json::from_str(r#"{"steps": 3}"#).unwrap();
        assert_eq!(t.steps, 3);
        assert_eq!(t.shift, 0);
    }

    #[test]
    fn ranges() {
        assert!(ToyConfig { steps: 1, ..Default::default() }.validate().is_err());
        assert!(EmbedConfig { kconst: 2.0, ..Default::default() }.validate().is_err());
        assert!(EmbedConfig { resolution: 1000, ..Default::default() }.validate().is_err());
        assert!(SubsolConfig { kind: "vortex".into(), ..Default::default() }.validate().is_err());
        assert!(SubsolConfig { c: Some(3.0), ..Default::default() }.validate().is_err());
        assert!(MultiplierConfig { name: "euler".into(), ..Default::default() }.validate().is_err());
        assert_eq!(MultiplierConfig { name: "ipm".into(), ..Default::default() }.expected_parity(), "even");
        for c in [
            ToyConfig::default().validate(),
            WaveconeConfig::default().validate(),
            MultiplierConfig::default().validate(),
            SubsolConfig::default().validate(),
            EulerCiRunConfig::default().validate(),
            EmbedConfig::default().validate(),
            MollifyExpConfig::default().validate(),
            SuiteConfig::default().validate(),
        ] {
            c.unwrap();
        }
    }
}
