//! Run configuration: a JSON file, overridden field by field by flags.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use contactkit::invariant::pipeline::MAX_THETA_SAMPLES;
use contactkit::suites::Suite;
use contactkit::weinstein::ModelKind;

use crate::CliError;

pub const SEED_ENV: &str = "CONTACTKIT_SEED";

#[derive(Parser, Debug)]
#[command(name = "contactkit", version, about = "Verification suites and winding invariant of the rotation contactomorphism of a doubled Weinstein domain times a circle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pointwise identity suites, contact condition and Gray conformality.
    Verify(RunArgs),
    /// Determinant winding number of the pushed Lagrangian loop for each k.
    Invariant(RunArgs),
    /// Landing, conformality and commutation of the double equivalence.
    DoubleEquiv(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Invariant(_) => "invariant",
            Command::DoubleEquiv(_) => "double-equiv",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Verify(a) | Command::Invariant(a) | Command::DoubleEquiv(a) => a,
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated iterate indices.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Comma-separated suite names.
    #[arg(long, value_delimiter = ',', value_parser = parse_suite)]
    pub checks: Option<Vec<Suite>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub theta_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol_ode_rel: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol_ode_abs: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol_surface: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol_identity: Option<f64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Write an SVG trace of each determinant loop.
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum ModelArg {
    Flat,
    Torus,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Flat => ModelKind::Flat,
            ModelArg::Torus => ModelKind::Torus,
        }
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse::<Suite>().map_err(|e| e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub ode_rel: f64,
    pub ode_abs: f64,
    pub surface: f64,
    pub identity: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { ode_rel: 1e-10, ode_abs: 1e-12, surface: 1e-8, identity: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Where files go; not part of the result, so not echoed.
    #[serde(skip_serializing)]
    pub dir: PathBuf,
    pub plot: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("contactkit-out"), plot: false }
    }
}

/// Source equation of the double equivalence; the target is always the
/// cutoff equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceEquation {
    #[default]
    Shifted,
    Cutoff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    /// Suites to run; empty selects the command's defaults.
    pub checks: Vec<Suite>,
    pub k_list: Vec<usize>,
    pub samples: usize,
    pub theta_samples: usize,
    pub tolerances: ToleranceConfig,
    pub seed: Option<u64>,
    pub output: OutputConfig,
    /// Worker threads; absent means one per core. Not part of the result.
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
    pub f0: SourceEquation,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelConfig { kind: ModelKind::Flat, n: 1 },
            checks: Vec::new(),
            k_list: vec![0, 1, 2, 3, 4],
            samples: 100,
            theta_samples: 64,
            tolerances: ToleranceConfig::default(),
            seed: None,
            output: OutputConfig::default(),
            jobs: None,
            f0: SourceEquation::Shifted,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// File (if any), then flags, then the seed fallback from the environment.
    pub fn resolve(args: &RunArgs, env_seed: Option<String>) -> Result<Self, CliError> {
        let mut cfg = match &args.config {
            Some(p) => Self::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(m) = args.model {
            cfg.model.kind = m.into();
        }
        if let Some(n) = args.n {
            cfg.model.n = n;
        }
        if let Some(k) = &args.k {
            cfg.k_list = k.clone();
        }
        if let Some(c) = &args.checks {
            cfg.checks = c.clone();
        }
        if let Some(s) = args.samples {
            cfg.samples = s;
        }
        if let Some(s) = args.theta_samples {
            cfg.theta_samples = s;
        }
        if let Some(s) = args.seed {
            cfg.seed = Some(s);
        }
        if let Some(t) = args.tol_ode_rel {
            cfg.tolerances.ode_rel = t;
        }
        if let Some(t) = args.tol_ode_abs {
            cfg.tolerances.ode_abs = t;
        }
        if let Some(t) = args.tol_surface {
            cfg.tolerances.surface = t;
        }
        if let Some(t) = args.tol_identity {
            cfg.tolerances.identity = t;
        }
        if let Some(o) = &args.out {
            cfg.output.dir = o.clone();
        }
        if args.plot {
            cfg.output.plot = true;
        }
        if let Some(j) = args.jobs {
            cfg.jobs = Some(j);
        }
        if cfg.seed.is_none() {
            if let Some(s) = env_seed {
                let v = s.trim().parse::<u64>().map_err(|_| CliError::Config(format!("{SEED_ENV}='{s}' is not a non-negative integer")))?;
                cfg.seed = Some(v);
            }
        }
        cfg.seed.get_or_insert(0);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [("ode_rel", t.ode_rel), ("ode_abs", t.ode_abs), ("surface", t.surface), ("identity", t.identity)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerance {name} = {v} must be positive and finite")));
            }
        }
        if self.model.n == 0 {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        if self.theta_samples == 0 || self.theta_samples > MAX_THETA_SAMPLES {
            return Err(CliError::Config(format!("theta_samples must lie in 1..={MAX_THETA_SAMPLES}")));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }
}
