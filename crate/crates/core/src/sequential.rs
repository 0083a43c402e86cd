//! Ordered pairs of measurements on one qutrit: joint outcome distributions
//! via Lüders updates, correlations, and the time-slot readout encoding.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qutrit::{
    born_probability, luders_update, next_index, outcome_probability, Outcome, Question,
    QuestionCycle, State, CONSTRUCTION_TOL, CYCLE_LEN, NULL_OUTCOME_PROBABILITY,
};

/// Spacing between readout time slots, in nanoseconds.
pub const SLOT_SPACING_NS: f64 = 50.0;

/// Outcome probabilities for two questions asked one after the other.
/// The first letter of each field refers to the first measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub first_index: usize,
    pub second_index: usize,
    pub p_yy: f64,
    pub p_yn: f64,
    pub p_ny: f64,
    pub p_nn: f64,
}

impl JointDistribution {
    /// Validates that entries lie in `[0, 1]` and sum to one within 1e-12.
    pub fn new(
        first_index: usize,
        second_index: usize,
        [p_yy, p_yn, p_ny, p_nn]: [f64; 4],
    ) -> Result<Self> {
        let jd = Self {
            first_index,
            second_index,
            p_yy,
            p_yn,
            p_ny,
            p_nn,
        };
        jd.validate()?;
        Ok(jd)
    }

    pub fn validate(&self) -> Result<()> {
        let entries = [self.p_yy, self.p_yn, self.p_ny, self.p_nn];
        if entries
            .iter()
            .any(|p| !p.is_finite() || *p < -CONSTRUCTION_TOL || *p > 1.0 + CONSTRUCTION_TOL)
        {
            return Err(Error::InvalidParameter(format!(
                "joint probabilities out of range: {entries:?}"
            )));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::InvalidParameter(format!(
                "joint probabilities sum to {total}"
            )));
        }
        Ok(())
    }

    pub fn probability(&self, first: Outcome, second: Outcome) -> f64 {
        match (first, second) {
            (Outcome::Yes, Outcome::Yes) => self.p_yy,
            (Outcome::Yes, Outcome::No) => self.p_yn,
            (Outcome::No, Outcome::Yes) => self.p_ny,
            (Outcome::No, Outcome::No) => self.p_nn,
        }
    }

    pub fn total(&self) -> f64 {
        self.p_yy + self.p_yn + self.p_ny + self.p_nn
    }

    /// Probabilities indexed by time slot `t0..t3`: `(nn, yn, ny, yy)`.
    pub fn slot_probabilities(&self) -> [f64; 4] {
        [self.p_nn, self.p_yn, self.p_ny, self.p_yy]
    }

    pub fn from_slot_probabilities(
        first_index: usize,
        second_index: usize,
        [nn, yn, ny, yy]: [f64; 4],
    ) -> Self {
        Self {
            first_index,
            second_index,
            p_yy: yy,
            p_yn: yn,
            p_ny: ny,
            p_nn: nn,
        }
    }

    pub fn first_yes(&self) -> f64 {
        self.p_yy + self.p_yn
    }

    pub fn second_yes(&self) -> f64 {
        self.p_yy + self.p_ny
    }

    /// Same statistics seen with the roles of the two measurements exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            first_index: self.second_index,
            second_index: self.first_index,
            p_yy: self.p_yy,
            p_yn: self.p_ny,
            p_ny: self.p_yn,
            p_nn: self.p_nn,
        }
    }

    pub fn correlation(&self) -> f64 {
        correlation(self)
    }

    pub const CSV_HEADER: &'static str = "i,j,p_yy,p_yn,p_ny,p_nn,correlation";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.15},{:.15},{:.15},{:.15},{:.15}",
            self.first_index,
            self.second_index,
            self.p_yy,
            self.p_yn,
            self.p_ny,
            self.p_nn,
            self.correlation()
        )
    }
}

/// `p(o₁, o₂) = p(o₁ | ρ) · p(o₂ | ρ after o₁)` by explicit enumeration of the
/// four branches. The questions need not commute.
pub fn joint_distribution(
    state: impl Into<State>,
    first: &Question,
    second: &Question,
) -> JointDistribution {
    let state = state.into();
    let mut p = [[0.0; 2]; 2];
    for (a, o1) in Outcome::BOTH.into_iter().enumerate() {
        let p1 = outcome_probability(state, first, o1);
        if p1 <= NULL_OUTCOME_PROBABILITY {
            continue;
        }
        let post = luders_update(state, first, o1).expect("outcome probability checked above");
        let yes2 = born_probability(post, second);
        p[a][0] = p1 * yes2;
        p[a][1] = p1 * (1.0 - yes2);
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

/// `⟨Q₁Q₂⟩ = p_yy + p_nn − p_yn − p_ny`.
pub fn correlation(jd: &JointDistribution) -> f64 {
    jd.p_yy + jd.p_nn - jd.p_yn - jd.p_ny
}

/// Which question of each edge is asked first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    /// `Qᵢ` then `Qᵢ₊₁`.
    Forward,
    /// `Qᵢ₊₁` then `Qᵢ`.
    Reverse,
}

impl Order {
    pub const BOTH: [Order; 2] = [Order::Forward, Order::Reverse];

    /// Indices `(first, second)` measured on edge `i`.
    pub fn edge(self, i: usize) -> (usize, usize) {
        match self {
            Order::Forward => (i, next_index(i)),
            Order::Reverse => (next_index(i), i),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Forward => "forward",
            Order::Reverse => "reverse",
        })
    }
}

/// Five edge correlations measured in one order, and their sum `κ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcbsRun {
    pub order: Order,
    pub joints: [JointDistribution; CYCLE_LEN],
    pub correlations: [f64; CYCLE_LEN],
    pub kappa: f64,
}

pub fn kcbs_run(state: impl Into<State>, cycle: &QuestionCycle, order: Order) -> KcbsRun {
    let state = state.into();
    let joints = std::array::from_fn(|i| {
        let (a, b) = order.edge(i);
        joint_distribution(state, cycle.question(a), cycle.question(b))
    });
    let correlations = joints.map(|jd: JointDistribution| jd.correlation());
    KcbsRun {
        order,
        joints,
        correlations,
        kappa: correlations.iter().sum(),
    }
}

/// Arrival time slot of the photon after two cascaded devices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    T0,
    T1,
    T2,
    T3,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::T0, Slot::T1, Slot::T2, Slot::T3];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Inverse of [`outcome_to_timeslot`].
    pub fn outcomes(self) -> (Outcome, Outcome) {
        match self {
            Slot::T0 => (Outcome::No, Outcome::No),
            Slot::T1 => (Outcome::Yes, Outcome::No),
            Slot::T2 => (Outcome::No, Outcome::Yes),
            Slot::T3 => (Outcome::Yes, Outcome::Yes),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSlot {
    pub slot: Slot,
    pub delay_ns: f64,
}

/// The first device delays a yes by Δt, the second by 2Δt; the arrival slot
/// is the total delay in units of Δt = 50 ns.
pub fn outcome_to_timeslot(first: Outcome, second: Outcome) -> TimeSlot {
    let units = match first {
        Outcome::Yes => 1,
        Outcome::No => 0,
    } + match second {
        Outcome::Yes => 2,
        Outcome::No => 0,
    };
    TimeSlot {
        slot: Slot::ALL[units],
        delay_ns: units as f64 * SLOT_SPACING_NS,
    }
}

/// How much the marginal of each question on an edge depends on whether it
/// is measured alone, first or second.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    pub edge: usize,
    /// `P(Qᵢ = +1)` alone, then measured after `Qᵢ₊₁`.
    pub lower_alone: f64,
    pub lower_second: f64,
    /// `P(Qᵢ₊₁ = +1)` alone, then measured after `Qᵢ`.
    pub upper_alone: f64,
    pub upper_second: f64,
    pub discrepancy: f64,
}

pub fn marginal_consistency(
    state: impl Into<State>,
    cycle: &QuestionCycle,
    edge: usize,
) -> MarginalReport {
    let state = state.into();
    let lower = cycle.question(edge);
    let upper = cycle.question(next_index(edge));
    let lower_alone = born_probability(state, lower);
    let upper_alone = born_probability(state, upper);
    let upper_second = joint_distribution(state, lower, upper).second_yes();
    let lower_second = joint_distribution(state, upper, lower).second_yes();
    let discrepancy = (upper_second - upper_alone)
        .abs()
        .max((lower_second - lower_alone).abs());
    MarginalReport {
        edge: edge % CYCLE_LEN,
        lower_alone,
        lower_second,
        upper_alone,
        upper_second,
        discrepancy,
    }
}
