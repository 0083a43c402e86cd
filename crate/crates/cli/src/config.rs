use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kcbs_core::optimize::Target;
use kcbs_core::sequential::Order;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_DELAY_NS: f64 = 50.0;

#[derive(Parser, Debug)]
#[command(name = "kcbs", version, about = "Qutrit contextuality simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the classical bounds found by exhaustive search.
    Bounds {
        #[arg(long)]
        json: bool,
    },
    /// Run a simulated experiment, a device check or an optimization.
    Run(RunArgs),
    /// Compare published measurements with simulated bands.
    Tables(TablesArgs),
    /// Check the five photonic measurement devices against their questions.
    PhotonicVerify(PhotonicArgs),
    /// Search for the maximal quantum violation.
    Optimize(OptimizeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Wright,
    Kcbs,
    PhotonicVerify,
    Bounds,
    Optimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderChoice {
    Forward,
    Reverse,
    Both,
}

impl OrderChoice {
    pub fn orders(self) -> Vec<Order> {
        match self {
            OrderChoice::Forward => vec![Order::Forward],
            OrderChoice::Reverse => vec![Order::Reverse],
            OrderChoice::Both => Order::BOTH.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetChoice {
    Wright,
    Kcbs,
}

impl From<TargetChoice> for Target {
    fn from(t: TargetChoice) -> Self {
        match t {
            TargetChoice::Wright => Target::Wright,
            TargetChoice::Kcbs => Target::Kcbs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub experiment: Option<ExperimentKind>,
    /// Interference visibility in [0, 1].
    #[arg(long)]
    pub visibility: Option<f64>,
    /// Leakage rotation angle in radians.
    #[arg(long, conflicts_with = "leakage_fit")]
    pub leakage: Option<f64>,
    /// Fit the leakage angle to the published W at the chosen visibility.
    #[arg(long)]
    pub leakage_fit: bool,
    /// Standard deviation of the per-sample leakage drift, radians.
    #[arg(long)]
    pub drift: Option<f64>,
    /// Detection events per setting and sample.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Independent samples, pooled for the estimate.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub order: Option<OrderChoice>,
    /// Optimization target.
    #[arg(long, value_enum)]
    pub target: Option<TargetChoice>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Objective evaluations per optimizer restart.
    #[arg(long)]
    pub evaluations: Option<usize>,
    /// Delay of the yes branch, nanoseconds.
    #[arg(long)]
    pub delay_ns: Option<f64>,
    /// JSON config file, or a previous report whose effective config is reused.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct TablesArgs {
    #[arg(long, value_parser = ["I", "II"])]
    pub which: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Use the estimates of an earlier `run` report instead of fresh runs.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PhotonicArgs {
    #[arg(long)]
    pub delay_ns: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long, value_enum)]
    pub target: Option<TargetChoice>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub evaluations: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Config file contents; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<ExperimentKind>,
    pub visibility: Option<f64>,
    pub leakage: Option<f64>,
    pub leakage_fit: Option<bool>,
    pub drift: Option<f64>,
    pub shots: Option<u64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub order: Option<OrderChoice>,
    pub target: Option<TargetChoice>,
    pub restarts: Option<usize>,
    pub evaluations: Option<usize>,
    pub delay_ns: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigFile {
    /// Reads a config file. A report written by `run` is accepted too; its
    /// echoed `effective_config` is used.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let mut value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {} is not JSON: {e}", path.display())))?;
        if let Some(inner) = value.get_mut("effective_config") {
            value = inner.take();
        }
        serde_json::from_value(value)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fully resolved settings; echoed into every output. Fed back through
/// `--config` it regenerates the same report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub visibility: f64,
    /// Resolved leakage angle; the fitted value when `leakage_fit` is set.
    pub leakage: f64,
    pub leakage_fit: bool,
    pub drift: f64,
    pub shots: u64,
    pub samples: usize,
    pub seed: u64,
    pub order: OrderChoice,
    pub target: TargetChoice,
    pub restarts: usize,
    pub evaluations: usize,
    pub delay_ns: f64,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Flags override the config file, which overrides the defaults.
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let optimize = kcbs_core::optimize::OptimizeConfig::new(Target::Wright, DEFAULT_SEED);
        let plan = kcbs_core::lab::ShotPlan::with_seed(DEFAULT_SEED);
        let leakage_fit =
            args.leakage_fit || (args.leakage.is_none() && file.leakage_fit.unwrap_or(false));
        let cfg = Self {
            experiment: args.experiment.or(file.experiment).ok_or_else(|| {
                CliError::Usage("no experiment given (use --experiment or a config file)".into())
            })?,
            visibility: args.visibility.or(file.visibility).unwrap_or(1.0),
            leakage: args.leakage.or(file.leakage).unwrap_or(0.0),
            leakage_fit,
            drift: args.drift.or(file.drift).unwrap_or(0.0),
            shots: args.shots.or(file.shots).unwrap_or(plan.shots_per_setting),
            samples: args.samples.or(file.samples).unwrap_or(plan.samples),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            order: args.order.or(file.order).unwrap_or(OrderChoice::Both),
            target: args.target.or(file.target).unwrap_or(TargetChoice::Wright),
            restarts: args.restarts.or(file.restarts).unwrap_or(optimize.restarts),
            evaluations: args
                .evaluations
                .or(file.evaluations)
                .unwrap_or(optimize.evaluations_per_restart),
            delay_ns: args.delay_ns.or(file.delay_ns).unwrap_or(DEFAULT_DELAY_NS),
            format: args.format.or(file.format).unwrap_or(Format::Json),
            output: args.output.clone().or(file.output),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if !(0.0..=1.0).contains(&self.visibility) {
            return bad(format!(
                "visibility must lie in [0, 1], got {}",
                self.visibility
            ));
        }
        if !self.leakage.is_finite() || !self.drift.is_finite() || self.drift < 0.0 {
            return bad("leakage must be finite and drift non-negative".into());
        }
        if self.shots == 0 || self.samples == 0 {
            return bad("shots and samples must be at least 1".into());
        }
        if self.restarts == 0 || self.evaluations == 0 {
            return bad("restarts and evaluations must be at least 1".into());
        }
        if !(self.delay_ns.is_finite() && self.delay_ns > 0.0) {
            return bad(format!("delay must be positive, got {} ns", self.delay_ns));
        }
        if let Some(dir) = self.output.as_deref().and_then(Path::parent) {
            if !dir.as_os_str().is_empty() && !dir.is_dir() {
                return Err(CliError::Io(format!(
                    "output directory {} does not exist",
                    dir.display()
                )));
            }
        }
        Ok(())
    }
}
