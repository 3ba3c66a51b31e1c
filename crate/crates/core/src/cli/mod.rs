//! Command-line front end: config files with flag overrides, gated runs, manifests.
//!
//! Exit codes: 0 when every gate passes, 1 on a gate failure, 2 on a config or usage
//! error (nothing is written), 3 when an experiment itself fails.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod suite;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use config::*;
pub use manifest::{write_outputs, Gate, Manifest, Outcome};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_GATE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cil", version, about = "Convex integration laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Where to write the run manifest
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Print the manifest as one JSON document instead of gate lines
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact one-dimensional scheme with λ_k = 2^(k+shift)
    Toy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        shift: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wave-cone witness for a velocity state and the residual order of its plane wave
    Wavecone {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 2, value_names = ["V1", "V2"], allow_negative_numbers = true)]
        velocity: Option<Vec<f64>>,
        #[arg(long)]
        coarse: Option<usize>,
        #[arg(long)]
        fine: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symbol identities of an active-scalar multiplier
    Multiplier {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        symbol_file: Option<PathBuf>,
        #[arg(long)]
        parity: Option<String>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shear or Muskat subsolution checks
    Subsol {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        time_samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Oscillation-adding iteration from the trivial subsolution
    EulerCi {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        lambda0: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Corrugation stages toward an isometric embedding
    Embed {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long)]
        kconst: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Commutator exponent of mollified quadratic terms
    MollifyExp {
        #[command(flatten)]
        common: Common,
        /// Hölder exponent; repeat for several
        #[arg(long = "alpha")]
        alphas: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The full acceptance battery
    Suite {
        #[command(flatten)]
        common: Common,
        /// Comma-separated groups (toy, multiplier, wavecone, subsol, euler-ci, embed, mollify-exp, suite) or criterion numbers
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

macro_rules! overlay {
    ($cfg:ident; $($field:ident),*) => {
        $( if let Some(v) = $field { $cfg.$field = v.clone().into(); } )*
    };
}

/// A validated run, ready to execute.
pub struct Prepared {
    pub name: &'static str,
    pub config: serde_json::Value,
    pub common: Common,
    job: Box<dyn FnOnce() -> Result<Outcome>>,
}

fn prepared<T: Serialize + 'static>(
    name: &'static str,
    common: &Common,
    cfg: T,
    run: fn(&T) -> Result<Outcome>,
) -> Result<Prepared> {
    Ok(Prepared {
        name,
        config: serde_json::to_value(&cfg)?,
        common: common.clone(),
        job: Box::new(move || run(&cfg)),
    })
}

/// Loads the config file, applies flags and validates. Errors here map to exit code 2.
pub fn prepare(cmd: &Command) -> Result<Prepared> {
    match cmd {
        Command::Toy { common, steps, shift, out } => {
            let mut cfg: ToyConfig = load(common.config.as_deref())?;
            overlay!(cfg; steps, shift);
            if out.is_some() {
                cfg.out = out.clone();
            }
            cfg.validate()?;
            prepared("toy", common, cfg, experiments::toy)
        }
        Command::Wavecone { common, velocity, coarse, fine, out } => {
            let mut cfg: WaveconeConfig = load(common.config.as_deref())?;
            overlay!(cfg; coarse, fine);
            if let Some(v) = velocity {
                cfg.velocity = [v[0], v[1]];
            }
            if out.is_some() {
                cfg.out = out.clone();
            }
            cfg.validate()?;
            prepared("wavecone", common, cfg, experiments::wavecone)
        }
        Command::Multiplier { common, name, symbol_file, parity, resolution, out } => {
            let mut cfg: MultiplierConfig = load(common.config.as_deref())?;
            overlay!(cfg; name, resolution);
            if symbol_file.is_some() {
                cfg.symbol_file = symbol_file.clone();
            }
            if parity.is_some() {
                cfg.parity = parity.clone();
            }
            if out.is_some() {
                cfg.out = out.clone();
            }
            cfg.validate()?;
            // parse the symbol now so a bad file is a config error
            experiments::load_multiplier(&cfg)?;
            prepared("multiplier", common, cfg, experiments::multiplier)
        }
        Command::Subsol { common, kind, c, resolution, time_samples, out } => {
            let mut cfg: SubsolConfig = load(common.config.as_deref())?;
            overlay!(cfg; kind, resolution, time_samples);
            if c.is_some() {
                cfg.c = *c;
            }
            if out.is_some() {
                cfg.out = out.clone();
            }
            cfg.validate()?;
            prepared("subsol", common, cfg, experiments::subsol)
        }
        Command::EulerCi { common, steps, rho, resolution, lambda0, seed, out } => {
            let mut cfg: EulerCiRunConfig = load(common.config.as_deref())?;
            overlay!(cfg; steps, rho, resolution, lambda0, seed);
            if out.is_some() {
                cfg.out = out.clone();
            }
            cfg.validate()?;
            prepared("euler-ci", common, cfg, experiments::euler_ci)
        }
        Command::Embed { common, target, stages, kconst, resolution, mesh, report } => {
            let mut cfg: EmbedConfig = load(common.config.as_deref())?;
            overlay!(cfg; target, stages, kconst, resolution);
            if mesh.is_some() {
                cfg.mesh = mesh.clone();
            }
            if report.is_some() {
                cfg.report = report.clone();
            }
            cfg.validate()?;
            prepared("embed", common, cfg, experiments::embed)
        }
        Command::MollifyExp { common, alphas, seed, out } => {
            let mut cfg: MollifyExpConfig = load(common.config.as_deref())?;
            overlay!(cfg; seed);
            if !alphas.is_empty() {
                cfg.alphas = alphas.clone();
            }
            if out.is_some() {
                cfg.out = out.clone();
            }
            cfg.validate()?;
            prepared("mollify-exp", common, cfg, experiments::mollify_exp)
        }
        Command::Suite { common, filter, seed } => {
            let mut cfg: SuiteConfig = load(common.config.as_deref())?;
            overlay!(cfg; seed);
            if filter.is_some() {
                cfg.filter = filter.clone();
            }
            cfg.validate()?;
            prepared("suite", common, cfg, suite::run_suite)
        }
    }
}

impl Prepared {
    /// Runs the experiment and builds the manifest; nothing is written.
    pub fn execute(self) -> Result<(Manifest, Outcome, Common)> {
        let outcome = (self.job)()?;
        let m = Manifest::new(self.name, self.config, &outcome);
        Ok((m, outcome, self.common))
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(e, Error::Config(_) | Error::Parse { .. } | Error::Symbol(_) | Error::Type(_))
}

/// Sizes the global rayon pool from CIL_THREADS. A pool that already exists is kept.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("CIL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("CIL_THREADS must be a positive integer, got '{v}'")))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args` (program name first), runs, writes outputs and returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    if let Err(e) = init_threads() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_CONFIG;
    }
    let prepared = match prepare(&cli.command) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let (manifest, outcome, common) = match prepared.execute() {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return if is_config_error(&e) { EXIT_CONFIG } else { EXIT_RUN };
        }
    };
    if let Err(e) = write_outputs(&outcome, &manifest, common.manifest.as_ref()) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_RUN;
    }
    let shown = if common.json {
        manifest.to_bytes().map(|b| String::from_utf8_lossy(&b).into_owned())
    } else {
        Ok(manifest.summary())
    };
    match shown {
        Ok(s) => {
            let _ = write!(out, "{s}");
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_RUN;
        }
    }
    if !manifest.pass {
        let _ = writeln!(err, "gate failures: {}", manifest.failures.join(", "));
        return EXIT_GATE;
    }
    EXIT_PASS
}
