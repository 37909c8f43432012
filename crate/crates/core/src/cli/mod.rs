// SPDX-License-Identifier: Apache-2.0

//! The `wentro` command line.
//!
//! Exit codes: 0 success, 1 failed verification or numerical breakdown,
//! 2 invalid input, 3 resource cap.

mod checks;
mod format;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::carpets::{carpet_dimension, carpet_to_factor_pair, sofic_carpet_dimension};
use crate::cover::{growth_limit_bounds, CoverOptions, Potential};
use crate::error::{Error, Result};
use crate::io::{load_carpet, load_input, load_measure, load_potential, CarpetInput, Input, System};
use crate::numeric::Precision;
use crate::variational::{optimize_weighted_value, Family, OptimizerConfig};
use crate::Limits;

pub use checks::{calculus_check, verify_instance, Check, InstanceReport};
pub use format::sig12;

#[derive(Debug, Parser)]
#[command(name = "wentro", version, about = "Weighted entropy and pressure of factor maps between subshifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Certified bounds on the weighted pressure of a system or carpet.
    Entropy(RunConfig),
    /// Hausdorff dimension of a carpet file.
    DimCarpet(RunConfig),
    /// Checks of the variational principle on one input or a random batch.
    VerifyVp(RunConfig),
    /// CSV sweep over a grid of weights.
    Report(RunConfig),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Entropy(_) => "entropy",
            Command::DimCarpet(_) => "dim-carpet",
            Command::VerifyVp(_) => "verify-vp",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Bernoulli,
    Markov,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// System or carpet JSON file; `random` for a seeded batch in verify-vp.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Potential JSON file (default: zero).
    #[arg(long)]
    pub potential: Option<PathBuf>,
    /// Measure JSON file to include in verify-vp.
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Weight in [0, 1]; carpets default to log_a b.
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long, default_value_t = 12)]
    pub nmax: usize,
    #[arg(long, default_value_t = 0)]
    pub resolution: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    pub precision: PrecisionArg,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    /// Weights for `report`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    /// Batch size for `verify-vp --input random`.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
}

impl RunConfig {
    fn check(&self) -> Result<()> {
        if let Some(w) = self.w {
            crate::cover::check_weight(w)?;
        }
        if self.nmax == 0 {
            return Err(Error::invalid("nmax", "must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts", "must be at least 1"));
        }
        Ok(())
    }

    fn limits(&self) -> Limits {
        Limits::from_env()
    }

    fn cover_options(&self) -> CoverOptions {
        CoverOptions {
            resolution: self.resolution,
            precision: match self.precision {
                PrecisionArg::Double => Precision::Double,
                PrecisionArg::Extended => Precision::Extended,
            },
            limits: self.limits(),
            parallel: true,
        }
    }

    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            family: self.family.map(|f| match f {
                FamilyArg::Bernoulli => Family::Bernoulli,
                FamilyArg::Markov => Family::Markov,
            }),
            restarts: self.restarts,
            seed: self.seed,
            search_n_max: self.nmax.min(6),
            final_n_max: self.nmax,
            limits: self.limits(),
            ..OptimizerConfig::default()
        }
    }

    fn input_path(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::invalid("input", "missing --input"))
    }
}

/// A command's failure, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Error(Error),
    Verification(Vec<String>),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Error(e) => exit_code(e),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Error(e) => write!(f, "{e}"),
            Failure::Verification(names) => write!(f, "verification failed: {}", names.join(", ")),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::NonConvergence { .. } | Error::NonFinite(_) => 1,
        Error::InvalidInput { .. } | Error::Inadmissible { .. } | Error::Io(_) | Error::Json(_) => 2,
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let name = cli.command.name();
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("wentro {name}: {f}");
            f.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Entropy(c) => cmd_entropy(c),
        Command::DimCarpet(c) => cmd_dim_carpet(c),
        Command::VerifyVp(c) => cmd_verify_vp(c),
        Command::Report(c) => cmd_report(c),
    }
}

/// Pair, weight default and potential for a system or carpet input.
fn load_problem(cfg: &RunConfig) -> Result<(System, Option<f64>, Potential, bool)> {
    let limits = cfg.limits();
    let (system, default_w, is_carpet) = match load_input(cfg.input_path()?, &limits)? {
        Input::System(s) => (*s, None, false),
        Input::Carpet(CarpetInput::Plain(c)) => {
            (System::from_pair(carpet_to_factor_pair(&c)?), Some(c.weight()), true)
        }
        Input::Carpet(CarpetInput::Sofic(s)) => (
            System::from_pair(s.factor_pair(&cfg.cover_options())?),
            Some(s.carpet.weight()),
            false,
        ),
    };
    let f = match &cfg.potential {
        Some(p) => system.potential(&load_potential(p)?, &limits)?,
        None => Potential::zero(),
    };
    Ok((system, default_w, f, is_carpet))
}

fn weight(cfg: &RunConfig, default_w: Option<f64>) -> Result<f64> {
    cfg.w
        .or(default_w)
        .ok_or_else(|| Error::invalid("w", "missing --w"))
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(cfg: &RunConfig, mut report: Value, started: Instant) -> Result<()> {
    report["timing"] = json!({ "seconds": started.elapsed().as_secs_f64() });
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(cfg, &text)
}

fn input_name(cfg: &RunConfig) -> Value {
    cfg.input
        .as_ref()
        .map_or(Value::Null, |p| Value::String(p.display().to_string()))
}

pub fn cmd_entropy(cfg: &RunConfig) -> Result<(), Failure> {
    let started = Instant::now();
    cfg.check()?;
    let (system, default_w, f, _) = load_problem(cfg)?;
    let w = weight(cfg, default_w)?;
    let bounds = growth_limit_bounds(&system.pair, w, &f, cfg.nmax, &cfg.cover_options())?;
    let report = json!({
        "command": "entropy",
        "input": input_name(cfg),
        "w": w,
        "N_max": cfg.nmax,
        "resolution": cfg.resolution,
        "precision": cfg.precision,
        "upper": bounds.upper,
        "lower": bounds.lower,
        "lower_kind": bounds.lower_kind,
        "estimate": bounds.estimate,
        "upper_source": bounds.upper_source,
        "lower_source": bounds.lower_source,
        "records": bounds.records,
    });
    emit_json(cfg, report, started)?;
    Ok(())
}

pub fn cmd_dim_carpet(cfg: &RunConfig) -> Result<(), Failure> {
    let started = Instant::now();
    cfg.check()?;
    let input = load_carpet(cfg.input_path()?)?;
    let carpet = input.carpet();
    let closed = carpet_dimension(carpet);
    let mut report = json!({
        "command": "dim-carpet",
        "input": input_name(cfg),
        "a": carpet.a(),
        "b": carpet.b(),
        "w": closed.w,
    });
    match &input {
        CarpetInput::Plain(_) => {
            report["dimension_dim"] = json!(closed.dimension_dim);
            report["entropy"] = json!(closed.entropy);
            report["exact"] = json!(closed.exact);
        }
        CarpetInput::Sofic(s) => {
            let d = sofic_carpet_dimension(s, cfg.nmax, &cfg.cover_options())?;
            report["N_max"] = json!(cfg.nmax);
            report["dimension_dim"] = json!(d.estimate_dim);
            report["interval_dim"] = json!([d.lower_dim, d.upper_dim]);
            report["lower_kind"] = json!(d.lower_kind);
            report["entropy"] = json!([d.bounds.lower, d.bounds.upper]);
            report["unrestricted_dim"] = json!(closed.dimension_dim);
        }
    }
    emit_json(cfg, report, started)?;
    Ok(())
}

pub fn cmd_verify_vp(cfg: &RunConfig) -> Result<(), Failure> {
    let started = Instant::now();
    cfg.check()?;
    let limits = cfg.limits();
    let opts = cfg.cover_options();
    let ocfg = cfg.optimizer();
    let random = cfg.input.as_deref() == Some(Path::new("random")) && !Path::new("random").exists();

    let mut instances = Vec::new();
    if random {
        if cfg.count == 0 {
            return Err(Error::invalid("count", "must be at least 1").into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for i in 0..cfg.count {
            let pair = crate::random::random_pair(&mut rng, 4, &limits)?;
            let f = crate::random::random_potential(&mut rng, pair.x(), 1.0);
            let w = cfg.w.unwrap_or_else(|| rand::Rng::gen_range(&mut rng, 0.0..=1.0));
            let measure = crate::random::random_markov_measure(&mut rng, pair.x())?;
            let label = format!("random[{i}]");
            instances.push(verify_instance(&label, &pair, w, &f, Some(&measure), false, cfg.nmax, &opts, &ocfg)?);
        }
    } else {
        let (system, default_w, f, is_carpet) = load_problem(cfg)?;
        let w = weight(cfg, default_w)?;
        let measure = match &cfg.measure {
            Some(p) => Some(system.measure(&load_measure(p)?)?),
            None => None,
        };
        let label = cfg.input_path()?.display().to_string();
        instances.push(verify_instance(&label, &system.pair, w, &f, measure.as_ref(), is_carpet, cfg.nmax, &opts, &ocfg)?);
    }

    let calculus = calculus_check(cfg.seed, 10_000);
    let mut checks = checks::aggregate(&instances);
    checks.extend(calculus);
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();

    let mut report = json!({
        "command": "verify-vp",
        "input": input_name(cfg),
        "seed": cfg.seed,
        "config": cfg,
        "passed": failed.is_empty(),
        "checks": checks,
        "instances": instances,
    });
    if let [one] = instances.as_slice() {
        report["value_lower"] = json!(one.value_lower);
        report["value_upper"] = json!(one.value_upper);
        report["measure"] = json!(one.measure);
        report["residuals"] = json!(one.residuals);
    }
    emit_json(cfg, report, started)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed))
    }
}

pub fn cmd_report(cfg: &RunConfig) -> Result<(), Failure> {
    cfg.check()?;
    if cfg.grid.is_empty() {
        return Err(Error::invalid("grid", "empty weight grid").into());
    }
    for &w in &cfg.grid {
        crate::cover::check_weight(w)?;
    }
    let (system, _, f, _) = load_problem(cfg)?;
    let opts = cfg.cover_options();
    let ocfg = cfg.optimizer();
    let mut text = String::from("w,lower,upper,opt_value_lo,opt_value_hi,gap\n");
    for &w in &cfg.grid {
        let bounds = growth_limit_bounds(&system.pair, w, &f, cfg.nmax, &opts)?;
        let opt = optimize_weighted_value(&system.pair, w, &f, &ocfg)?;
        let row = [
            w,
            bounds.lower,
            bounds.upper,
            opt.value.lower,
            opt.value.upper,
            bounds.upper - opt.value.lower,
        ];
        text.push_str(&row.iter().map(|&v| sig12(v)).collect::<Vec<_>>().join(","));
        text.push('\n');
    }
    emit(cfg, &text)?;
    Ok(())
}
