//! Wright and KCBS expressions: quantum values, classical bounds by
//! exhaustive enumeration, and classical mixed strategies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qutrit::{born_probability, next_index, QuestionCycle, State, CYCLE_LEN, PHYSICS_TOL};
use crate::sequential::{kcbs_run, JointDistribution, Order};

/// Largest number of yes answers compatible with exclusivity.
pub const WRIGHT_CLASSICAL_BOUND: f64 = 2.0;
/// Smallest noncontextual value of `∑⟨QᵢQᵢ₊₁⟩`.
pub const KCBS_CLASSICAL_BOUND: f64 = -3.0;

/// `√5`, the maximal quantum value of the Wright sum.
pub fn wright_quantum_bound() -> f64 {
    5f64.sqrt()
}

/// `5 − 4√5`, the minimal quantum value of the KCBS sum.
pub fn kcbs_quantum_bound() -> f64 {
    5.0 - 4.0 * 5f64.sqrt()
}

/// `∑ᵢ P(+1 | Qᵢ)`.
pub fn wright_value(state: impl Into<State>, cycle: &QuestionCycle) -> f64 {
    let state = state.into();
    cycle
        .questions()
        .iter()
        .map(|q| born_probability(state, q))
        .sum()
}

/// Deterministic ±1 value assignment to the five questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub outcomes: [i8; CYCLE_LEN],
}

impl Assignment {
    /// Bit `i` of `mask` set means question `i` answers yes (+1).
    pub fn from_mask(mask: u8) -> Self {
        Self {
            outcomes: std::array::from_fn(|i| if mask >> i & 1 == 1 { 1 } else { -1 }),
        }
    }

    pub fn yes_count(&self) -> i32 {
        self.outcomes.iter().filter(|&&o| o == 1).count() as i32
    }

    /// No two cyclic neighbours both answer yes.
    pub fn is_exclusive(&self) -> bool {
        (0..CYCLE_LEN).all(|i| !(self.outcomes[i] == 1 && self.outcomes[next_index(i)] == 1))
    }

    pub fn kcbs_sum(&self) -> i32 {
        (0..CYCLE_LEN)
            .map(|i| (self.outcomes[i] * self.outcomes[next_index(i)]) as i32)
            .sum()
    }

    pub fn describe(&self) -> String {
        let yes: Vec<String> = (0..CYCLE_LEN)
            .filter(|&i| self.outcomes[i] == 1)
            .map(|i| i.to_string())
            .collect();
        format!("yes at {{{}}}", yes.join(", "))
    }
}

/// Extremal value of a classical bound and an assignment attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequality: String,
    pub bound_value: i32,
    pub attaining_assignment: Assignment,
    pub description: String,
    pub search_space_size: usize,
    pub admissible_assignments: usize,
}

/// Maximum number of yes answers over all 32 assignments with no two
/// adjacent yes answers.
pub fn classical_wright_bound() -> BoundReport {
    let mut best: Option<(i32, Assignment)> = None;
    let mut admissible = 0;
    for mask in 0..(1u8 << CYCLE_LEN) {
        let a = Assignment::from_mask(mask);
        if !a.is_exclusive() {
            continue;
        }
        admissible += 1;
        let value = a.yes_count();
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, a));
        }
    }
    let (bound_value, attaining_assignment) = best.expect("all-no assignment is admissible");
    BoundReport {
        inequality: "wright".into(),
        bound_value,
        attaining_assignment,
        description: attaining_assignment.describe(),
        search_space_size: 1 << CYCLE_LEN,
        admissible_assignments: admissible,
    }
}

/// Minimum of `∑ aᵢaᵢ₊₁` over all 32 assignments in `{−1, +1}⁵`. Exclusivity
/// is not imposed: noncontextual models assign both outcomes freely.
pub fn classical_kcbs_bound() -> BoundReport {
    let mut best: Option<(i32, Assignment)> = None;
    for mask in 0..(1u8 << CYCLE_LEN) {
        let a = Assignment::from_mask(mask);
        let value = a.kcbs_sum();
        if best.is_none_or(|(b, _)| value < b) {
            best = Some((value, a));
        }
    }
    let (bound_value, attaining_assignment) = best.expect("search space is non-empty");
    BoundReport {
        inequality: "kcbs".into(),
        bound_value,
        attaining_assignment,
        description: format!(
            "{:?}: four anti-correlated edges, one correlated",
            attaining_assignment.outcomes
        ),
        search_space_size: 1 << CYCLE_LEN,
        admissible_assignments: 1 << CYCLE_LEN,
    }
}

/// A classical preparation: a mixture over five classical states together
/// with, for each question, the set of states that answer yes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalStrategy {
    /// Bit `s` of `answer_sets[i]` set means classical state `s` answers yes to `Qᵢ`.
    answer_sets: [u8; CYCLE_LEN],
    state_weights: [f64; CYCLE_LEN],
}

impl ClassicalStrategy {
    pub fn new(answer_sets: [u8; CYCLE_LEN], state_weights: [f64; CYCLE_LEN]) -> Result<Self> {
        for (i, set) in answer_sets.iter().enumerate() {
            if *set >> CYCLE_LEN != 0 {
                return Err(Error::InvalidStrategy(format!(
                    "answer set {i} refers to states outside 0..5"
                )));
            }
            let j = next_index(i);
            if set & answer_sets[j] != 0 {
                return Err(Error::InvalidStrategy(format!(
                    "answer sets of adjacent questions {i} and {j} intersect"
                )));
            }
        }
        if state_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidStrategy("negative state weight".into()));
        }
        let total: f64 = state_weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidStrategy(format!(
                "state weights sum to {total}"
            )));
        }
        Ok(Self {
            answer_sets,
            state_weights,
        })
    }

    /// The optimal five-state strategy: `Q₀ = "0 or 1?"`, `Q₁ = "2 or 3?"`,
    /// `Q₂ = "0 or 4?"`, `Q₃ = "1 or 2?"`, `Q₄ = "3 or 4?"`, uniform weights.
    pub fn five_state_example() -> Self {
        Self::new(Self::FIVE_STATE_SETS, [0.2; CYCLE_LEN]).expect("valid by construction")
    }

    pub const FIVE_STATE_SETS: [u8; CYCLE_LEN] = [
        0b00011, // {0, 1}
        0b01100, // {2, 3}
        0b10001, // {0, 4}
        0b00110, // {1, 2}
        0b11000, // {3, 4}
    ];

    /// All weight on one classical state.
    pub fn deterministic(answer_sets: [u8; CYCLE_LEN], state: usize) -> Result<Self> {
        if state >= CYCLE_LEN {
            return Err(Error::InvalidStrategy(format!(
                "no classical state {state}"
            )));
        }
        let mut w = [0.0; CYCLE_LEN];
        w[state] = 1.0;
        Self::new(answer_sets, w)
    }

    pub fn answer_sets(&self) -> &[u8; CYCLE_LEN] {
        &self.answer_sets
    }

    pub fn state_weights(&self) -> &[f64; CYCLE_LEN] {
        &self.state_weights
    }

    fn answers(&self, question: usize, state: usize) -> bool {
        self.answer_sets[question % CYCLE_LEN] >> state & 1 == 1
    }

    pub fn yes_probability(&self, question: usize) -> f64 {
        (0..CYCLE_LEN)
            .filter(|&s| self.answers(question, s))
            .map(|s| self.state_weights[s])
            .sum()
    }

    /// Joint statistics of asking `first` then `second`. Classical answers
    /// are predetermined, so the order is irrelevant.
    pub fn joint(&self, first: usize, second: usize) -> JointDistribution {
        let mut p = [[0.0; 2]; 2];
        for s in 0..CYCLE_LEN {
            let a = usize::from(!self.answers(first, s));
            let b = usize::from(!self.answers(second, s));
            p[a][b] += self.state_weights[s];
        }
        JointDistribution {
            first_index: first % CYCLE_LEN,
            second_index: second % CYCLE_LEN,
            p_yy: p[0][0],
            p_yn: p[0][1],
            p_ny: p[1][0],
            p_nn: p[1][1],
        }
    }
}

/// Edge correlations and their sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcbsTerms {
    pub edges: [f64; CYCLE_LEN],
    pub kappa: f64,
}

/// Per-question yes probabilities and their sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WrightTerms {
    pub probabilities: [f64; CYCLE_LEN],
    pub total: f64,
}

pub fn classical_strategy_wright(strategy: &ClassicalStrategy) -> WrightTerms {
    let probabilities = std::array::from_fn(|i| strategy.yes_probability(i));
    WrightTerms {
        probabilities,
        total: probabilities.iter().sum(),
    }
}

pub fn classical_strategy_kcbs(strategy: &ClassicalStrategy) -> KcbsTerms {
    let edges = std::array::from_fn(|i| strategy.joint(i, next_index(i)).correlation());
    KcbsTerms {
        edges,
        kappa: edges.iter().sum(),
    }
}

/// Quantum KCBS value computed from the sequential joint distributions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcbsEvaluation {
    pub value: f64,
    pub edge_terms: [f64; CYCLE_LEN],
    pub max_adjacent_overlap: f64,
    /// Set when the cycle is not exclusive; the value is still computed.
    pub warning: Option<String>,
}

pub fn kcbs_value(state: impl Into<State>, cycle: &QuestionCycle) -> KcbsEvaluation {
    let run = kcbs_run(state, cycle, Order::Forward);
    let max_adjacent_overlap = cycle.max_adjacent_overlap();
    let warning = (max_adjacent_overlap > PHYSICS_TOL).then(|| {
        format!("questions are not cyclically exclusive (max adjacent overlap {max_adjacent_overlap:.3e})")
    });
    KcbsEvaluation {
        value: run.kappa,
        edge_terms: run.correlations,
        max_adjacent_overlap,
        warning,
    }
}
