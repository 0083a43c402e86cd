//! Imperfect devices: leakage of each question towards its neighbour, loss of
//! interference visibility, and per-sample calibration drift.
//!
//! Visibility acts as partial dephasing between the two paths. In the qutrit
//! basis, path `a` is `|2⟩` and path `b` spans `|0⟩, |1⟩`, so the channel
//! multiplies `ρ₀₂, ρ₁₂` and their conjugates by `V`. It is applied to the
//! state entering every device, before that device's projection.

use rand::Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use super::{Distribution, Setting};
use crate::error::{Error, Result};
use crate::qutrit::{
    next_index, Mat3, Question, QuestionCycle, State, StateVector, C64, CYCLE_LEN,
};
use crate::sequential::{JointDistribution, Order};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Interference visibility of every device, in `[0, 1]`.
    pub visibility: f64,
    /// Rotation (radians) of each question's eigenvector towards the next one.
    pub leakage: f64,
    /// Standard deviation (radians) of the per-sample jitter on the leakage.
    pub drift_sigma: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self {
            visibility: 1.0,
            leakage: 0.0,
            drift_sigma: 0.0,
        }
    }

    pub fn new(visibility: f64, leakage: f64, drift_sigma: f64) -> Result<Self> {
        let m = Self {
            visibility,
            leakage,
            drift_sigma,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::InvalidParameter(format!(
                "visibility must lie in [0, 1], got {}",
                self.visibility
            )));
        }
        if !(self.leakage >= 0.0) || !self.leakage.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "leakage must be a non-negative angle, got {}",
                self.leakage
            )));
        }
        if !(self.drift_sigma >= 0.0) || !self.drift_sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "drift sigma must be non-negative, got {}",
                self.drift_sigma
            )));
        }
        Ok(())
    }

    /// Leakage angle of each device for one sample.
    pub fn draw_angles<R: Rng>(&self, rng: &mut R) -> [f64; CYCLE_LEN] {
        if self.drift_sigma == 0.0 {
            return [self.leakage; CYCLE_LEN];
        }
        let jitter = Normal::new(0.0, self.drift_sigma).expect("validated sigma");
        std::array::from_fn(|_| self.leakage + jitter.sample(rng))
    }
}

/// `vᵢ' = cos εᵢ vᵢ + sin εᵢ vᵢ₊₁`. For an exclusive cycle this stays
/// normalized, and adjacent overlaps grow linearly in the angles.
pub fn perturbed_cycle(cycle: &QuestionCycle, angles: &[f64; CYCLE_LEN]) -> QuestionCycle {
    let vectors = std::array::from_fn(|i| {
        let v = cycle.question(i).eigenvector().as_vector();
        let w = cycle.question(next_index(i)).eigenvector().as_vector();
        let (s, c) = angles[i].sin_cos();
        let rotated = v * C64::new(c, 0.0) + w * C64::new(s, 0.0);
        StateVector::normalized([rotated[0], rotated[1], rotated[2]])
            .expect("rotation of unit vectors is non-zero")
    });
    QuestionCycle::from_vectors(vectors)
}

/// Scales the coherences between path `a` (`|2⟩`) and path `b` by `visibility`.
pub fn dephase(rho: &Mat3, visibility: f64) -> Mat3 {
    let mut out = *rho;
    let v = C64::new(visibility, 0.0);
    for k in 0..2 {
        out[(k, 2)] *= v;
        out[(2, k)] *= v;
    }
    out
}

fn density(state: impl Into<State>) -> Mat3 {
    *state.into().to_density().matrix()
}

fn trace_with(projector: &Mat3, rho: &Mat3) -> f64 {
    (projector * rho).trace().re
}

pub fn noisy_yes_probability(state: impl Into<State>, q: &Question, visibility: f64) -> f64 {
    trace_with(&q.projector(), &dephase(&density(state), visibility)).clamp(0.0, 1.0)
}

/// The yes probability with path coherence fully erased.
pub fn incoherent_yes_probability(state: impl Into<State>, q: &Question) -> f64 {
    noisy_yes_probability(state, q, 0.0)
}

/// Sequential statistics with each device dephasing its input. Branch
/// operators are kept unnormalized, so the result is a joint distribution
/// directly.
pub fn noisy_joint(
    state: impl Into<State>,
    first: &Question,
    second: &Question,
    visibility: f64,
) -> JointDistribution {
    let rho = dephase(&density(state), visibility);
    let branches = [first.projector(), first.complement_projector()];
    let seconds = [second.projector(), second.complement_projector()];
    let mut p = [[0.0; 2]; 2];
    for (a, pa) in branches.iter().enumerate() {
        let after = dephase(&(pa * rho * pa), visibility);
        for (b, pb) in seconds.iter().enumerate() {
            p[a][b] = trace_with(pb, &after).max(0.0);
        }
    }
    JointDistribution {
        first_index: first.index(),
        second_index: second.index(),
        p_yy: p[0][0],
        p_yn: p[0][1],
        p_ny: p[1][0],
        p_nn: p[1][1],
    }
}

/// Outcome distribution of one setting under the noise model, for the given
/// per-device leakage angles.
pub fn noisy_distribution(
    state: impl Into<State>,
    cycle: &QuestionCycle,
    setting: Setting,
    visibility: f64,
    angles: &[f64; CYCLE_LEN],
) -> Distribution {
    let cycle = perturbed_cycle(cycle, angles);
    let probabilities = match setting {
        Setting::Single(i) => {
            let yes = noisy_yes_probability(state, cycle.question(i), visibility);
            vec![1.0 - yes, yes]
        }
        Setting::Pair { first, second } => noisy_joint(
            state,
            cycle.question(first),
            cycle.question(second),
            visibility,
        )
        .slot_probabilities()
        .to_vec(),
    };
    Distribution {
        setting,
        probabilities,
    }
}

/// `W` under the noise model at the nominal leakage, without drift.
pub fn noisy_wright_value(
    state: impl Into<State>,
    cycle: &QuestionCycle,
    noise: &NoiseModel,
) -> f64 {
    let state = state.into();
    let cycle = perturbed_cycle(cycle, &[noise.leakage; CYCLE_LEN]);
    cycle
        .questions()
        .iter()
        .map(|q| noisy_yes_probability(state, q, noise.visibility))
        .sum()
}

/// `κ` under the noise model at the nominal leakage, without drift.
pub fn noisy_kcbs_value(
    state: impl Into<State>,
    cycle: &QuestionCycle,
    noise: &NoiseModel,
    order: Order,
) -> f64 {
    let state = state.into();
    let cycle = perturbed_cycle(cycle, &[noise.leakage; CYCLE_LEN]);
    (0..CYCLE_LEN)
        .map(|i| {
            let (a, b) = order.edge(i);
            noisy_joint(
                state,
                cycle.question(a),
                cycle.question(b),
                noise.visibility,
            )
            .correlation()
        })
        .sum()
}

/// Leakage angle at which the noisy `W` equals `target`, by bisection on
/// `[0, π/4]` where `W` grows with the angle.
pub fn fit_leakage(
    target: f64,
    state: impl Into<State>,
    cycle: &QuestionCycle,
    visibility: f64,
) -> Result<f64> {
    let state = state.into();
    let w = |eps: f64| {
        let noise = NoiseModel {
            visibility,
            leakage: eps,
            drift_sigma: 0.0,
        };
        noisy_wright_value(state, cycle, &noise)
    };
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_4);
    let (w_lo, w_hi) = (w(lo), w(hi));
    if !(w_lo..=w_hi).contains(&target) {
        return Err(Error::InvalidParameter(format!(
            "target W = {target} is outside the reachable range [{w_lo}, {w_hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if w(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
