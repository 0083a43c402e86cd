//! End-to-end runs: ideal statistics, noise, sampling, estimation, verdict.

use serde::{Deserialize, Serialize};

use super::estimate::{estimate_kcbs, estimate_wright, Estimate, KcbsEstimate, WrightEstimate};
use super::noise::{noisy_distribution, noisy_kcbs_value, noisy_wright_value, NoiseModel};
use super::sampling::{drift_stream, sample_drifting, stream_rng, CountTable, ShotPlan};
use super::{Distribution, Setting};
use crate::error::{Error, Result};
use crate::inequality::{
    classical_strategy_kcbs, classical_strategy_wright, ClassicalStrategy, KCBS_CLASSICAL_BOUND,
    WRIGHT_CLASSICAL_BOUND,
};
use crate::qutrit::{make_pentagram, QuestionCycle, State, CYCLE_LEN};
use crate::sequential::Order;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Five single questions; estimates `W`.
    Wright,
    /// Five ordered pairs per order; estimates `κ`.
    Kcbs,
}

/// Where the detection statistics come from.
#[derive(Clone, Debug)]
pub enum Source {
    Quantum {
        state: State,
        cycle: QuestionCycle,
    },
    /// Predetermined answers; the noise model does not apply.
    Classical(ClassicalStrategy),
}

impl Source {
    pub fn pentagram() -> Self {
        let p = make_pentagram();
        Source::Quantum {
            state: (*p.test_state()).into(),
            cycle: *p.cycle(),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Source::Quantum { .. } => "quantum",
            Source::Classical(_) => "classical",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub noise: NoiseModel,
    pub plan: ShotPlan,
    /// Orders to measure; ignored by the Wright experiment.
    pub orders: Vec<Order>,
}

impl ExperimentConfig {
    /// Ideal devices, default shot plan, both orders.
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        Self {
            experiment,
            noise: NoiseModel::ideal(),
            plan: ShotPlan::with_seed(seed),
            orders: Order::BOTH.to_vec(),
        }
    }
}

/// Expected values without sampling, at the nominal leakage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticValues {
    pub wright: Option<f64>,
    pub kappa_forward: Option<f64>,
    pub kappa_reverse: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub inequality: String,
    pub classical_bound: f64,
    pub value: f64,
    pub sigma: f64,
    pub violated: bool,
    /// Distance beyond the classical bound in units of sigma; negative when
    /// the bound is respected.
    pub significance: f64,
}

impl Verdict {
    fn wright(e: &Estimate) -> Self {
        Self {
            inequality: "wright".into(),
            classical_bound: WRIGHT_CLASSICAL_BOUND,
            value: e.value,
            sigma: e.sigma,
            violated: e.value > WRIGHT_CLASSICAL_BOUND,
            significance: e.significance(WRIGHT_CLASSICAL_BOUND),
        }
    }

    fn kcbs(e: &Estimate, order: Order) -> Self {
        Self {
            inequality: format!("kcbs {order}"),
            classical_bound: KCBS_CLASSICAL_BOUND,
            value: e.value,
            sigma: e.sigma,
            violated: e.value < KCBS_CLASSICAL_BOUND,
            significance: -e.significance(KCBS_CLASSICAL_BOUND),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub source: String,
    pub analytic: AnalyticValues,
    pub counts: CountTable,
    pub wright: Option<WrightEstimate>,
    pub kcbs: Vec<KcbsEstimate>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }

    pub fn kcbs_for(&self, order: Order) -> Option<&KcbsEstimate> {
        self.kcbs.iter().find(|k| k.order == order)
    }
}

fn block_of(experiment: Experiment, order: Option<Order>) -> u64 {
    match (experiment, order) {
        (Experiment::Wright, _) => 0,
        (Experiment::Kcbs, Some(Order::Forward) | None) => 1,
        (Experiment::Kcbs, Some(Order::Reverse)) => 2,
    }
}

fn distributions(
    source: &Source,
    noise: &NoiseModel,
    settings: &[Setting],
    angles: &[f64; CYCLE_LEN],
) -> Vec<Distribution> {
    settings
        .iter()
        .map(|&setting| match source {
            Source::Quantum { state, cycle } => {
                noisy_distribution(*state, cycle, setting, noise.visibility, angles)
            }
            Source::Classical(strategy) => {
                let probabilities = match setting {
                    Setting::Single(i) => {
                        let p = strategy.yes_probability(i);
                        vec![1.0 - p, p]
                    }
                    Setting::Pair { first, second } => {
                        strategy.joint(first, second).slot_probabilities().to_vec()
                    }
                };
                Distribution {
                    setting,
                    probabilities,
                }
            }
        })
        .collect()
}

/// Counts for one block of settings, with drift redrawn per sample.
fn sample_block(
    source: &Source,
    config: &ExperimentConfig,
    settings: &[Setting],
    block: u64,
) -> Result<CountTable> {
    let per_sample: Vec<Vec<Distribution>> = (0..config.plan.samples)
        .map(|s| {
            let mut rng = stream_rng(config.plan.seed, drift_stream(block, s));
            let angles = config.noise.draw_angles(&mut rng);
            distributions(source, &config.noise, settings, &angles)
        })
        .collect();
    sample_drifting(&per_sample, &config.plan, block)
}

pub fn run_experiment(source: &Source, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.noise.validate()?;
    config.plan.validate()?;
    let mut orders = config.orders.clone();
    orders.dedup();
    if config.experiment == Experiment::Kcbs && orders.is_empty() {
        return Err(Error::InvalidParameter(
            "no measurement order selected".into(),
        ));
    }

    let mut notes = Vec::new();
    if matches!(source, Source::Classical(_)) {
        notes.push("noise model not applied to a classical source".to_string());
    }

    let mut analytic = AnalyticValues::default();
    let mut counts = CountTable {
        seed: config.plan.seed,
        shots_per_setting: config.plan.shots_per_setting,
        samples: config.plan.samples,
        rows: Vec::new(),
    };
    let mut wright = None;
    let mut kcbs = Vec::new();
    let mut verdicts = Vec::new();

    match config.experiment {
        Experiment::Wright => {
            analytic.wright = Some(match source {
                Source::Quantum { state, cycle } => {
                    noisy_wright_value(*state, cycle, &config.noise)
                }
                Source::Classical(s) => classical_strategy_wright(s).total,
            });
            let settings: Vec<Setting> = (0..CYCLE_LEN).map(Setting::Single).collect();
            counts.extend(sample_block(
                source,
                config,
                &settings,
                block_of(Experiment::Wright, None),
            )?);
            let est = estimate_wright(&counts)?;
            verdicts.push(Verdict::wright(&est.total));
            wright = Some(est);
        }
        Experiment::Kcbs => {
            if orders.len() > 1 {
                notes.push("each order is sampled with an independent drift draw".to_string());
            }
            for &order in &orders {
                let value = match source {
                    Source::Quantum { state, cycle } => {
                        noisy_kcbs_value(*state, cycle, &config.noise, order)
                    }
                    Source::Classical(s) => classical_strategy_kcbs(s).kappa,
                };
                match order {
                    Order::Forward => analytic.kappa_forward = Some(value),
                    Order::Reverse => analytic.kappa_reverse = Some(value),
                }
                let settings: Vec<Setting> =
                    (0..CYCLE_LEN).map(|i| Setting::edge(order, i)).collect();
                counts.extend(sample_block(
                    source,
                    config,
                    &settings,
                    block_of(Experiment::Kcbs, Some(order)),
                )?);
                let est = estimate_kcbs(&counts, order)?;
                verdicts.push(Verdict::kcbs(&est.kappa, order));
                kcbs.push(est);
            }
        }
    }

    Ok(ExperimentReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.plan.seed,
        config: ExperimentConfig {
            orders,
            ..config.clone()
        },
        source: source.label().to_string(),
        analytic,
        counts,
        wright,
        kcbs,
        verdicts,
        notes,
    })
}
