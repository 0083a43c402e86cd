//! Multinomial photon counts from a seeded, counter-based generator.
//!
//! Every `(block, sample, setting)` triple gets its own ChaCha stream derived
//! from the plan seed, so counts do not depend on scheduling or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Distribution, Setting};
use crate::error::{Error, Result};

/// One detected photon per shot; 3×10⁴ detections per second for one second.
pub const DEFAULT_SHOTS_PER_SETTING: u64 = 30_000;
pub const DEFAULT_SAMPLES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotPlan {
    pub shots_per_setting: u64,
    pub seed: u64,
    /// Outer repetitions; drift is redrawn for each one.
    pub samples: usize,
}

impl ShotPlan {
    pub fn new(shots_per_setting: u64, seed: u64, samples: usize) -> Result<Self> {
        let plan = Self {
            shots_per_setting,
            seed,
            samples,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_seed(seed: u64) -> Self {
        Self {
            shots_per_setting: DEFAULT_SHOTS_PER_SETTING,
            seed,
            samples: DEFAULT_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots_per_setting == 0 {
            return Err(Error::InvalidParameter(
                "shots per setting must be at least 1".into(),
            ));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        Ok(())
    }
}

const DRIFT_STREAM_BIT: u64 = 1 << 63;

/// Stream id for the counts of one setting.
pub(crate) fn count_stream(block: u64, sample: usize, setting: usize) -> u64 {
    (block << 40) | ((sample as u64) << 20) | setting as u64
}

/// Stream id for the drift draw of one sample.
pub(crate) fn drift_stream(block: u64, sample: usize) -> u64 {
    DRIFT_STREAM_BIT | (block << 40) | ((sample as u64) << 20)
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Counts of `shots` draws over `probabilities`, by successive conditional
/// binomials. Probabilities must be non-negative; they are renormalized.
pub fn sample_multinomial<R: Rng>(probabilities: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut remaining_mass: f64 = probabilities.iter().sum();
    let mut remaining = shots;
    let mut counts = Vec::with_capacity(probabilities.len());
    for (k, &p) in probabilities.iter().enumerate() {
        let n = if k + 1 == probabilities.len() {
            remaining
        } else if remaining == 0 || remaining_mass <= 0.0 {
            0
        } else {
            let q = (p / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining, q)
                .expect("probability clamped to [0, 1]")
                .sample(rng)
        };
        counts.push(n);
        remaining -= n;
        remaining_mass -= p;
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingCounts {
    pub sample: usize,
    pub setting: Setting,
    /// Ordered as [`Setting::outcome_labels`].
    pub counts: Vec<u64>,
}

impl SettingCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub seed: u64,
    pub shots_per_setting: u64,
    pub samples: usize,
    pub rows: Vec<SettingCounts>,
}

impl CountTable {
    pub const CSV_HEADER: &'static str = "sample,setting,outcome,count";

    pub fn rows_for(&self, setting: Setting) -> impl Iterator<Item = &SettingCounts> {
        self.rows.iter().filter(move |r| r.setting == setting)
    }

    /// Pooled counts over all samples, or `None` when the setting is absent.
    pub fn pooled(&self, setting: Setting) -> Option<Vec<u64>> {
        let mut rows = self.rows_for(setting).peekable();
        rows.peek()?;
        let mut total = vec![0; setting.outcome_count()];
        for r in rows {
            for (t, c) in total.iter_mut().zip(&r.counts) {
                *t += c;
            }
        }
        Some(total)
    }

    /// One line per `(sample, setting, outcome)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            for (label, count) in r.setting.outcome_labels().iter().zip(&r.counts) {
                out.push_str(&format!("{},{},{},{}\n", r.sample, r.setting, label, count));
            }
        }
        out
    }

    pub(crate) fn extend(&mut self, other: CountTable) {
        self.rows.extend(other.rows);
    }
}

/// Samples the same distributions in every repetition of the plan.
pub fn sample_counts(distributions: &[Distribution], plan: &ShotPlan) -> Result<CountTable> {
    let per_sample = vec![distributions.to_vec(); plan.samples];
    sample_drifting(&per_sample, plan, 0)
}

/// Samples `per_sample[s]` in repetition `s`. `block` separates independent
/// runs that share a seed.
pub fn sample_drifting(
    per_sample: &[Vec<Distribution>],
    plan: &ShotPlan,
    block: u64,
) -> Result<CountTable> {
    plan.validate()?;
    if per_sample.len() != plan.samples {
        return Err(Error::InvalidParameter(format!(
            "{} distribution sets for {} samples",
            per_sample.len(),
            plan.samples
        )));
    }
    for d in per_sample.iter().flatten() {
        if d.probabilities.len() != d.setting.outcome_count()
            || d.probabilities
                .iter()
                .any(|p| !(*p >= 0.0) || !p.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "invalid outcome distribution for {}",
                d.setting
            )));
        }
    }
    let jobs: Vec<(usize, usize, &Distribution)> = per_sample
        .iter()
        .enumerate()
        .flat_map(|(s, dists)| dists.iter().enumerate().map(move |(k, d)| (s, k, d)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(sample, k, d)| {
            let mut rng = stream_rng(plan.seed, count_stream(block, sample, k));
            SettingCounts {
                sample,
                setting: d.setting,
                counts: sample_multinomial(&d.probabilities, plan.shots_per_setting, &mut rng),
            }
        })
        .collect();
    Ok(CountTable {
        seed: plan.seed,
        shots_per_setting: plan.shots_per_setting,
        samples: plan.samples,
        rows,
    })
}
