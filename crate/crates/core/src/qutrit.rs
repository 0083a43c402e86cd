//! Qutrit states, rank-1 questions, Born probabilities and Lüders updates.
//!
//! States are kets; the components listed for a [`StateVector`] are the
//! amplitudes in the computational basis `|0⟩, |1⟩, |2⟩`. Two states are
//! compared by `|⟨a|b⟩|`, never componentwise, so global phases are free.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Vec3 = Vector3<C64>;
pub type Mat3 = Matrix3<C64>;

/// Tolerance applied when constructing states and questions.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Tolerance for physical assertions (orthogonality, spectra, repeatability).
pub const PHYSICS_TOL: f64 = 1e-10;
/// Tolerance for aggregate identities such as the pentagram sum.
pub const AGGREGATE_TOL: f64 = 1e-9;
/// Outcomes below this probability cannot be conditioned on.
pub const NULL_OUTCOME_PROBABILITY: f64 = 1e-15;
/// Number of questions in the exclusivity cycle.
pub const CYCLE_LEN: usize = 5;

/// Index of the cyclic successor, `(i + 1) mod 5`.
#[inline]
pub fn next_index(i: usize) -> usize {
    (i + 1) % CYCLE_LEN
}

/// A normalized pure qutrit state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[C64; 3]", into = "[C64; 3]")]
pub struct StateVector(Vec3);

impl StateVector {
    /// Builds a state from amplitudes that must already have unit norm.
    pub fn new(amplitudes: [C64; 3]) -> Result<Self> {
        let v = Vec3::from(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(v))
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(amplitudes: [C64; 3]) -> Result<Self> {
        Self::from_vector(Vec3::from(amplitudes))
    }

    pub fn from_real(amplitudes: [f64; 3]) -> Result<Self> {
        Self::normalized(amplitudes.map(|x| C64::new(x, 0.0)))
    }

    pub(crate) fn from_vector(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < NULL_OUTCOME_PROBABILITY.sqrt() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(v / C64::new(norm, 0.0)))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(index: usize) -> Self {
        assert!(index < 3, "qutrit basis index out of range: {index}");
        let mut v = Vec3::zeros();
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn amplitudes(&self) -> [C64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn as_vector(&self) -> &Vec3 {
        &self.0
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// True when both kets describe the same ray (equal up to global phase).
    pub fn same_ray(&self, other: &StateVector, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() <= tol
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> Mat3 {
        self.0 * self.0.adjoint()
    }
}

impl TryFrom<[C64; 3]> for StateVector {
    type Error = Error;

    fn try_from(value: [C64; 3]) -> Result<Self> {
        Self::new(value)
    }
}

impl From<StateVector> for [C64; 3] {
    fn from(value: StateVector) -> Self {
        value.amplitudes()
    }
}

/// A mixed qutrit state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat3);

impl DensityMatrix {
    pub fn new(entries: Mat3) -> Result<Self> {
        let herm_err = (entries - entries.adjoint()).camax();
        if herm_err > CONSTRUCTION_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm_err:e})"
            )));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > CONSTRUCTION_TOL || trace.im.abs() > CONSTRUCTION_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace} != 1")));
        }
        let rho = Self(entries);
        let min_eig = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -PHYSICS_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    pub fn from_pure(state: &StateVector) -> Self {
        Self(state.projector())
    }

    /// Convex mixture `∑ wₖ |ψₖ⟩⟨ψₖ|`; weights must be non-negative and sum to one.
    pub fn mixture(components: &[(f64, StateVector)]) -> Result<Self> {
        if components.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidDensityMatrix(
                "mixture weights must be non-negative".into(),
            ));
        }
        let rho = components.iter().fold(Mat3::zeros(), |acc, (w, s)| {
            acc + s.projector() * C64::new(*w, 0.0)
        });
        Self::new(rho)
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat3::identity() / C64::new(3.0, 0.0))
    }

    /// Rescales a positive operator to unit trace. Used after projections.
    pub(crate) fn from_unnormalized(m: Mat3) -> Result<Self> {
        let tr = m.trace().re;
        if tr <= NULL_OUTCOME_PROBABILITY {
            return Err(Error::NullOutcome { probability: tr });
        }
        let m = m / C64::new(tr, 0.0);
        // restore exact hermiticity lost to rounding
        Ok(Self((m + m.adjoint()) * C64::new(0.5, 0.0)))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let eig = SymmetricEigen::new(self.0);
        let mut ev = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// `⟨v|ρ|v⟩`.
    pub fn expectation_of(&self, v: &StateVector) -> f64 {
        v.as_vector().dotc(&(self.0 * v.as_vector())).re
    }
}

/// Either a pure or a mixed qutrit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum State {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl State {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(psi) => DensityMatrix::from_pure(psi),
            State::Mixed(rho) => *rho,
        }
    }
}

impl From<StateVector> for State {
    fn from(value: StateVector) -> Self {
        State::Pure(value)
    }
}

impl From<DensityMatrix> for State {
    fn from(value: DensityMatrix) -> Self {
        State::Mixed(value)
    }
}

/// Answer to a yes/no question. `Yes` is the +1 eigenvalue (successful
/// projection), `No` is −1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Yes,
    No,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Yes, Outcome::No];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Yes => 1.0,
            Outcome::No => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Outcome::Yes),
            -1 => Ok(Outcome::No),
            other => Err(Error::InvalidParameter(format!(
                "outcome must be +1 or -1, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Yes => "yes",
            Outcome::No => "no",
        })
    }
}

/// A yes/no question: the projector `|v⟩⟨v|` and its dichotomic observable
/// `2|v⟩⟨v| − 𝟙`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Question {
    eigenvector: StateVector,
    index: usize,
}

impl Question {
    pub fn new(eigenvector: StateVector, index: usize) -> Self {
        Self { eigenvector, index }
    }

    pub fn eigenvector(&self) -> &StateVector {
        &self.eigenvector
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn projector(&self) -> Mat3 {
        self.eigenvector.projector()
    }

    pub fn complement_projector(&self) -> Mat3 {
        Mat3::identity() - self.projector()
    }

    pub fn outcome_projector(&self, outcome: Outcome) -> Mat3 {
        match outcome {
            Outcome::Yes => self.projector(),
            Outcome::No => self.complement_projector(),
        }
    }

    pub fn observable(&self) -> Mat3 {
        self.projector() * C64::new(2.0, 0.0) - Mat3::identity()
    }

    /// Eigenvalues of the observable in ascending order; ideally `[-1, -1, 1]`.
    pub fn observable_spectrum(&self) -> [f64; 3] {
        let eig = SymmetricEigen::new(self.observable());
        let mut ev = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Five questions indexed cyclically. No exclusivity is required here, so
/// perturbed (noisy) question sets can be represented; see [`Pentagram`] for
/// the validated ideal configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuestionCycle([Question; CYCLE_LEN]);

impl QuestionCycle {
    /// Builds a cycle from five eigenvectors, assigning indices 0..5.
    pub fn from_vectors(vectors: [StateVector; CYCLE_LEN]) -> Self {
        let mut i = 0;
        Self(vectors.map(|v| {
            let q = Question::new(v, i);
            i += 1;
            q
        }))
    }

    pub fn questions(&self) -> &[Question; CYCLE_LEN] {
        &self.0
    }

    pub fn question(&self, i: usize) -> &Question {
        &self.0[i % CYCLE_LEN]
    }

    pub fn vectors(&self) -> [StateVector; CYCLE_LEN] {
        self.0.map(|q| q.eigenvector)
    }

    /// `|⟨vᵢ|vᵢ₊₁⟩|` for each edge `i`.
    pub fn adjacent_overlaps(&self) -> [f64; CYCLE_LEN] {
        std::array::from_fn(|i| {
            self.0[i]
                .eigenvector
                .inner(&self.0[next_index(i)].eigenvector)
                .norm()
        })
    }

    pub fn max_adjacent_overlap(&self) -> f64 {
        self.adjacent_overlaps().into_iter().fold(0.0, f64::max)
    }

    /// Sum of the rank-1 projectors, `∑ |vᵢ⟩⟨vᵢ|`.
    pub fn projector_sum(&self) -> Mat3 {
        self.0
            .iter()
            .fold(Mat3::zeros(), |acc, q| acc + q.projector())
    }
}

/// The cyclically exclusive five-question configuration together with the
/// state that is measured on it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PentagramRepr", into = "PentagramRepr")]
pub struct Pentagram {
    cycle: QuestionCycle,
    test_state: StateVector,
}

#[derive(Serialize, Deserialize)]
struct PentagramRepr {
    vectors: [StateVector; CYCLE_LEN],
    state: StateVector,
}

impl TryFrom<PentagramRepr> for Pentagram {
    type Error = Error;

    fn try_from(value: PentagramRepr) -> Result<Self> {
        Pentagram::new(QuestionCycle::from_vectors(value.vectors), value.state)
    }
}

impl From<Pentagram> for PentagramRepr {
    fn from(value: Pentagram) -> Self {
        Self {
            vectors: value.cycle.vectors(),
            state: value.test_state,
        }
    }
}

impl Pentagram {
    /// Validates cyclic exclusivity `|⟨vᵢ|vᵢ₊₁⟩| ≤ 1e-10`.
    pub fn new(cycle: QuestionCycle, test_state: StateVector) -> Result<Self> {
        for (i, overlap) in cycle.adjacent_overlaps().into_iter().enumerate() {
            if overlap > PHYSICS_TOL {
                return Err(Error::NotExclusive {
                    first: i,
                    second: next_index(i),
                    overlap,
                });
            }
        }
        Ok(Self { cycle, test_state })
    }

    pub fn cycle(&self) -> &QuestionCycle {
        &self.cycle
    }

    pub fn questions(&self) -> &[Question; CYCLE_LEN] {
        self.cycle.questions()
    }

    pub fn question(&self, i: usize) -> &Question {
        self.cycle.question(i)
    }

    pub fn test_state(&self) -> &StateVector {
        &self.test_state
    }
}

/// Constants of the optimal pentagram: `r = √cos(π/5)`, `c, s = cos, sin(4π/5)`,
/// `C, S = cos, sin(2π/5)`, `N = 1/√(1 + r²)`.
#[derive(Clone, Copy, Debug)]
pub struct PentagramConstants {
    pub r: f64,
    pub c: f64,
    pub s: f64,
    pub big_c: f64,
    pub big_s: f64,
    pub n: f64,
}

impl PentagramConstants {
    pub fn compute() -> Self {
        let r = (PI / 5.0).cos().sqrt();
        Self {
            r,
            c: (4.0 * PI / 5.0).cos(),
            s: (4.0 * PI / 5.0).sin(),
            big_c: (2.0 * PI / 5.0).cos(),
            big_s: (2.0 * PI / 5.0).sin(),
            n: 1.0 / (1.0 + r * r).sqrt(),
        }
    }
}

/// The maximally violating configuration: `v₀ = N(1,0,r)`, `v₁,₄ = N(c,±s,r)`,
/// `v₂,₃ = N(C,∓S,r)` and test state `(0,0,1)`.
pub fn make_pentagram() -> Pentagram {
    let k = PentagramConstants::compute();
    let rows = [
        [1.0, 0.0, k.r],
        [k.c, k.s, k.r],
        [k.big_c, -k.big_s, k.r],
        [k.big_c, k.big_s, k.r],
        [k.c, -k.s, k.r],
    ];
    let vectors = rows.map(|[x, y, z]| {
        StateVector::from_vector(Vec3::new(
            C64::new(k.n * x, 0.0),
            C64::new(k.n * y, 0.0),
            C64::new(k.n * z, 0.0),
        ))
        .expect("pentagram vector is non-zero")
    });
    Pentagram::new(QuestionCycle::from_vectors(vectors), StateVector::basis(2))
        .expect("pentagram constants are cyclically orthogonal")
}

/// Probability of `outcome` when `q` is asked on `state`.
pub fn outcome_probability(state: impl Into<State>, q: &Question, outcome: Outcome) -> f64 {
    let yes = born_probability(state, q);
    match outcome {
        Outcome::Yes => yes,
        Outcome::No => 1.0 - yes,
    }
}

/// `|⟨v|ψ⟩|²` for pure states, `⟨v|ρ|v⟩` for mixed ones, clamped to `[0, 1]`.
pub fn born_probability(state: impl Into<State>, q: &Question) -> f64 {
    let p = match state.into() {
        State::Pure(psi) => q.eigenvector.fidelity(&psi),
        State::Mixed(rho) => rho.expectation_of(&q.eigenvector),
    };
    p.clamp(0.0, 1.0)
}

/// Post-measurement state after asking `q` and observing `outcome`.
pub fn luders_update(state: impl Into<State>, q: &Question, outcome: Outcome) -> Result<State> {
    let state = state.into();
    let probability = outcome_probability(state, q, outcome);
    if probability <= NULL_OUTCOME_PROBABILITY {
        return Err(Error::NullOutcome { probability });
    }
    match state {
        State::Pure(psi) => {
            let projected = match outcome {
                Outcome::Yes => q.eigenvector.0 * q.eigenvector.inner(&psi),
                Outcome::No => q.complement_projector() * psi.0,
            };
            Ok(State::Pure(StateVector::from_vector(projected)?))
        }
        State::Mixed(rho) => {
            let p = q.outcome_projector(outcome);
            Ok(State::Mixed(DensityMatrix::from_unnormalized(
                p * rho.0 * p,
            )?))
        }
    }
}

/// `⟨Q⟩ = 2 P(+1) − 1`.
pub fn expectation(state: impl Into<State>, q: &Question) -> f64 {
    2.0 * born_probability(state, q) - 1.0
}

/// Result of an exclusivity check between two questions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExclusivityCheck {
    pub exclusive: bool,
    pub overlap: f64,
}

/// Exclusive iff `|⟨vᵢ|vⱼ⟩| ≤ 1e-10`; the overlap is always reported.
pub fn check_exclusive(a: &Question, b: &Question) -> ExclusivityCheck {
    let overlap = a.eigenvector.inner(&b.eigenvector).norm();
    ExclusivityCheck {
        exclusive: overlap <= PHYSICS_TOL,
        overlap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const INV_SQRT5: f64 = 0.447_213_595_499_958;

    fn psi() -> StateVector {
        StateVector::basis(2)
    }

    #[test]
    fn pentagram_first_vector_matches_closed_form() {
        let p = make_pentagram();
        let v0 = p.question(0).eigenvector().amplitudes();
        assert_abs_diff_eq!(v0[0].re, 0.743_496_068_920_369, epsilon = 1e-12);
        assert_abs_diff_eq!(v0[1].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v0[2].re, 0.668_740_304_976_422, epsilon = 1e-12);
    }

    #[test]
    fn closing_edge_vanishes_by_trig_identity() {
        let k = PentagramConstants::compute();
        assert_abs_diff_eq!(k.c + k.r * k.r, 0.0, epsilon = 1e-15);
        let p = make_pentagram();
        let ov = p
            .question(4)
            .eigenvector()
            .inner(p.question(0).eigenvector());
        assert!(ov.norm() <= PHYSICS_TOL);
    }

    #[test]
    fn test_state_probability_is_inverse_sqrt5() {
        let p = make_pentagram();
        for q in p.questions() {
            assert_abs_diff_eq!(born_probability(psi(), q), INV_SQRT5, epsilon = 1e-12);
        }
        let total: f64 = p
            .questions()
            .iter()
            .map(|q| born_probability(psi(), q))
            .sum();
        assert_abs_diff_eq!(total, 5f64.sqrt(), epsilon = AGGREGATE_TOL);
    }

    #[test]
    fn projector_onto_itself_and_neighbour() {
        let p = make_pentagram();
        let v0 = *p.question(0).eigenvector();
        assert_abs_diff_eq!(born_probability(v0, p.question(0)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(born_probability(v0, p.question(1)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mixed_and_pure_born_agree() {
        let p = make_pentagram();
        let rho = DensityMatrix::from_pure(&psi());
        for q in p.questions() {
            assert_abs_diff_eq!(
                born_probability(rho, q),
                born_probability(psi(), q),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn luders_projects_and_is_repeatable() {
        let p = make_pentagram();
        let q0 = p.question(0);
        let after = luders_update(psi(), q0, Outcome::Yes).unwrap();
        let State::Pure(after) = after else {
            panic!("pure in, pure out")
        };
        assert!(after.same_ray(q0.eigenvector(), PHYSICS_TOL));
        let again = luders_update(after, q0, Outcome::Yes).unwrap();
        let State::Pure(again) = again else {
            unreachable!()
        };
        assert!(again.same_ray(&after, PHYSICS_TOL));
    }

    #[test]
    fn luders_no_branch_is_orthogonal() {
        let p = make_pentagram();
        let State::Pure(after) = luders_update(psi(), p.question(0), Outcome::No).unwrap() else {
            unreachable!()
        };
        assert!(after.inner(p.question(0).eigenvector()).norm() <= PHYSICS_TOL);
        // yes on q1 after no on q0 has joint weight 1/√5
        let joint = (1.0 - INV_SQRT5) * born_probability(after, p.question(1));
        assert_abs_diff_eq!(joint, INV_SQRT5, epsilon = 1e-12);
    }

    #[test]
    fn luders_rejects_null_outcome() {
        let p = make_pentagram();
        let v0 = *p.question(0).eigenvector();
        let err = luders_update(v0, p.question(1), Outcome::Yes).unwrap_err();
        assert!(matches!(err, Error::NullOutcome { .. }));
        let rho = DensityMatrix::from_pure(&v0);
        assert!(luders_update(rho, p.question(0), Outcome::No).is_err());
    }

    #[test]
    fn expectation_values() {
        let p = make_pentagram();
        assert_abs_diff_eq!(
            expectation(psi(), p.question(3)),
            -0.105_572_809_000_084_1,
            epsilon = 1e-12
        );
        let v0 = *p.question(0).eigenvector();
        let v1 = *p.question(1).eigenvector();
        assert_abs_diff_eq!(expectation(v0, p.question(0)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(expectation(v1, p.question(0)), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn exclusivity_checks() {
        let p = make_pentagram();
        let c01 = check_exclusive(p.question(0), p.question(1));
        assert!(c01.exclusive);
        assert!(c01.overlap <= PHYSICS_TOL);
        let c00 = check_exclusive(p.question(0), p.question(0));
        assert!(!c00.exclusive);
        assert_abs_diff_eq!(c00.overlap, 1.0, epsilon = 1e-12);
        let c02 = check_exclusive(p.question(0), p.question(2));
        assert!(!c02.exclusive);
        assert_abs_diff_eq!(c02.overlap, 0.618_033_988_749_894_8, epsilon = 1e-12);
    }

    #[test]
    fn observable_spectrum_is_plus_minus_minus() {
        for q in make_pentagram().questions() {
            let ev = q.observable_spectrum();
            assert_abs_diff_eq!(ev[0], -1.0, epsilon = PHYSICS_TOL);
            assert_abs_diff_eq!(ev[1], -1.0, epsilon = PHYSICS_TOL);
            assert_abs_diff_eq!(ev[2], 1.0, epsilon = PHYSICS_TOL);
        }
    }

    #[test]
    fn invalid_states_are_rejected() {
        let c = |x: f64| C64::new(x, 0.0);
        assert!(matches!(
            StateVector::new([c(1.0), c(1.0), c(0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(StateVector::normalized([c(0.0); 3]).is_err());
        let mut m = Mat3::identity();
        m[(0, 1)] = C64::new(0.3, 0.0);
        assert!(DensityMatrix::new(m / C64::new(3.0, 0.0)).is_err());
        assert!(DensityMatrix::new(Mat3::identity()).is_err());
        let neg = Mat3::from_diagonal(&Vec3::new(c(1.2), c(-0.2), c(0.0)));
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn pentagram_rejects_non_exclusive_cycle() {
        let p = make_pentagram();
        let mut vs = p.cycle().vectors();
        vs[1] = vs[2];
        let err = Pentagram::new(QuestionCycle::from_vectors(vs), psi()).unwrap_err();
        assert!(matches!(
            err,
            Error::NotExclusive {
                first: 0,
                second: 1,
                ..
            }
        ));
    }

    #[test]
    fn pentagram_json_round_trip() {
        let p = make_pentagram();
        let json = serde_json::to_string(&p).unwrap();
        let back: Pentagram = serde_json::from_str(&json).unwrap();
        for (a, b) in p.questions().iter().zip(back.questions()) {
            assert!(a.eigenvector().same_ray(b.eigenvector(), 1e-15));
        }
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["vectors"].as_array().unwrap().len(), 5);
        assert_eq!(value["state"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn neighbour_of_four_is_zero() {
        assert_eq!(next_index(4), 0);
        assert_eq!(next_index(0), 1);
    }
}
