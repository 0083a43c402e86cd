//! Photon-counting experiments: noise models, multinomial sampling,
//! estimators with error bars and end-to-end runs.

mod estimate;
mod experiment;
mod noise;
pub mod published;
mod sampling;

pub use estimate::{
    estimate_correlation, estimate_kcbs, estimate_wright, estimate_yes_probability, Estimate,
    EstimateMethod, KcbsEstimate, WrightEstimate,
};
pub use experiment::{
    run_experiment, AnalyticValues, Experiment, ExperimentConfig, ExperimentReport, Source, Verdict,
};
pub use noise::{
    dephase, fit_leakage, incoherent_yes_probability, noisy_distribution, noisy_joint,
    noisy_kcbs_value, noisy_wright_value, noisy_yes_probability, perturbed_cycle, NoiseModel,
};
pub use sampling::{
    sample_counts, sample_drifting, sample_multinomial, CountTable, SettingCounts, ShotPlan,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sequential::Order;

/// What one detector configuration measures: a single question, or an
/// ordered pair of questions read out through arrival times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Single(usize),
    Pair { first: usize, second: usize },
}

impl Setting {
    pub fn edge(order: Order, i: usize) -> Self {
        let (first, second) = order.edge(i);
        Setting::Pair { first, second }
    }

    pub fn outcome_count(self) -> usize {
        match self {
            Setting::Single(_) => 2,
            Setting::Pair { .. } => 4,
        }
    }

    /// Outcome labels in arrival-time order: `no, yes` for a single question,
    /// `nn, yn, ny, yy` for a pair (first letter is the first question).
    pub fn outcome_labels(self) -> &'static [&'static str] {
        match self {
            Setting::Single(_) => &["no", "yes"],
            Setting::Pair { .. } => &["nn", "yn", "ny", "yy"],
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::Single(i) => write!(f, "Q{i}"),
            Setting::Pair { first, second } => write!(f, "Q{first}Q{second}"),
        }
    }
}

/// Outcome probabilities of one setting, ordered as
/// [`Setting::outcome_labels`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub setting: Setting,
    pub probabilities: Vec<f64>,
}
