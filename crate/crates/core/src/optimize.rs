//! Numerical search for the largest quantum violation of the Wright and KCBS
//! inequalities over qutrit configurations.
//!
//! A configuration is five unit vectors with cyclic orthogonality and a state.
//! Four of the five orthogonality constraints hold by construction: `v₀` is a
//! free unit vector and each `vᵢ₊₁` is drawn from the orthogonal complement of
//! `vᵢ`. The closing constraint `⟨v₄|v₀⟩ = 0` is handled in two ways. A
//! quadratic penalty, whose weight escalates across restarts, keeps the raw
//! `v₄` close to `v₀`'s complement, and the objective is always evaluated on
//! the configuration where `v₄` is replaced by the unit vector orthogonal to
//! both `v₃` and `v₀`. The state is the principal eigenvector of `∑|vᵢ⟩⟨vᵢ|`,
//! which is optimal for both targets once the cycle is exclusive.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::{kcbs_value, wright_value};
use crate::qutrit::{make_pentagram, QuestionCycle, StateVector, Vec3, C64, CYCLE_LEN};
use crate::simplex::{nelder_mead, SimplexOptions};

/// Parameters: 4 for `v₀`, 2 for each of `v₁..v₄`.
/// Largest objective gain of a polishing round that still counts as a stall.
const STALL_TOLERANCE: f64 = 1e-12;

const PARAMS: usize = 4 + 2 * (CYCLE_LEN - 1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Maximize `∑ P(+1|Qᵢ)`.
    Wright,
    /// Minimize `∑⟨QᵢQᵢ₊₁⟩`.
    Kcbs,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub target: Target,
    pub dimension: usize,
    pub seed: u64,
    pub restarts: usize,
    pub evaluations_per_restart: usize,
    /// Start restart 0 from the closed-form pentagram.
    pub seed_with_known_optimum: bool,
}

impl OptimizeConfig {
    pub fn new(target: Target, seed: u64) -> Self {
        Self {
            target,
            dimension: 3,
            seed,
            restarts: 64,
            evaluations_per_restart: 5_000,
            seed_with_known_optimum: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub target: Target,
    /// `W` for the Wright target, `κ` for the KCBS target.
    pub best_value: f64,
    pub vectors: [StateVector; CYCLE_LEN],
    pub state: StateVector,
    /// Objective evaluations summed over all restarts.
    pub iterations: usize,
    /// Largest `|⟨vᵢ|vᵢ₊₁⟩|` of the reported configuration.
    pub residual: f64,
    /// `|⟨v₄|v₀⟩|` of the raw parameters before the closing projection.
    pub penalty_residual: f64,
    pub best_restart: usize,
    pub converged: bool,
    pub seed: u64,
}

impl OptimizationResult {
    /// Recomputes the objective from the reported vectors and state.
    pub fn reevaluate(&self) -> f64 {
        let cycle = QuestionCycle::from_vectors(self.vectors);
        match self.target {
            Target::Wright => wright_value(self.state, &cycle),
            Target::Kcbs => kcbs_value(self.state, &cycle).value,
        }
    }
}

/// Complement basis of `v` built by Gram–Schmidt from a fixed reference axis.
fn complement_basis(v: &Vec3, reference: usize) -> (Vec3, Vec3) {
    let mut w = Vec3::zeros();
    w[reference] = C64::new(1.0, 0.0);
    let e1 = w - v * v.dotc(&w);
    let e1 = e1.normalize();
    let e2 = v.cross(&e1).map(|z| z.conj()).normalize();
    (e1, e2)
}

fn least_aligned_axis(v: &Vec3) -> usize {
    (0..3)
        .min_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
        .expect("three axes")
}

fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

/// Decodes parameters into the raw vectors `v₀..v₄`.
struct Decoder {
    references: [usize; CYCLE_LEN - 1],
}

impl Decoder {
    fn decode(&self, p: &[f64]) -> [Vec3; CYCLE_LEN] {
        let (a, b) = (p[0], p[1]);
        let mut vs = [Vec3::zeros(); CYCLE_LEN];
        vs[0] = Vec3::new(
            C64::new(a.cos(), 0.0),
            cis(p[2]) * (a.sin() * b.cos()),
            cis(p[3]) * (a.sin() * b.sin()),
        );
        for i in 1..CYCLE_LEN {
            let (e1, e2) = complement_basis(&vs[i - 1], self.references[i - 1]);
            let (g, d) = (p[4 + 2 * (i - 1)], p[5 + 2 * (i - 1)]);
            vs[i] = e1 * C64::new(g.cos(), 0.0) + e2 * (cis(d) * g.sin());
        }
        vs
    }

    /// Inverse of `decode` for a cyclically orthogonal configuration.
    fn encode(&self, vs: &[Vec3; CYCLE_LEN]) -> Vec<f64> {
        let v0 = vs[0] * cis(-vs[0][0].arg());
        let a = v0[0].re.clamp(-1.0, 1.0).acos();
        let b = v0[2].norm().atan2(v0[1].norm());
        let mut p = vec![a, b, v0[1].arg(), v0[2].arg()];
        // the complement basis depends on the phase of the previous vector, so
        // follow the decoded vectors rather than the given ones
        let mut prev = v0;
        for i in 1..CYCLE_LEN {
            let (e1, e2) = complement_basis(&prev, self.references[i - 1]);
            let c1 = e1.dotc(&vs[i]);
            let c2 = e2.dotc(&vs[i]);
            let (g, d) = (c2.norm().atan2(c1.norm()), c2.arg() - c1.arg());
            p.push(g);
            p.push(d);
            prev = e1 * C64::new(g.cos(), 0.0) + e2 * (cis(d) * g.sin());
        }
        p
    }

    fn for_configuration(vs: &[Vec3; CYCLE_LEN]) -> Self {
        Self {
            references: std::array::from_fn(|i| least_aligned_axis(&vs[i])),
        }
    }
}

/// Replaces `v₄` by the unit vector orthogonal to `v₃` and `v₀`, keeping its phase.
fn close_cycle(raw: &[Vec3; CYCLE_LEN]) -> Option<[Vec3; CYCLE_LEN]> {
    let n = raw[3].cross(&raw[0]).map(|z| z.conj());
    let norm = n.norm();
    if norm < 1e-9 {
        return None;
    }
    let mut closed = *raw;
    let n = n / C64::new(norm, 0.0);
    let phase = n.dotc(&raw[4]);
    closed[4] = if phase.norm() > 0.0 {
        n * (phase / phase.norm())
    } else {
        n
    };
    Some(closed)
}

struct Evaluated {
    value: f64,
    vectors: [StateVector; CYCLE_LEN],
    state: StateVector,
    residual: f64,
}

fn evaluate(target: Target, closed: &[Vec3; CYCLE_LEN]) -> Option<Evaluated> {
    let vectors: [StateVector; CYCLE_LEN] = {
        let mut out = [StateVector::basis(0); CYCLE_LEN];
        for (o, v) in out.iter_mut().zip(closed) {
            *o = StateVector::from_vector(*v).ok()?;
        }
        out
    };
    let cycle = QuestionCycle::from_vectors(vectors);
    let eig = SymmetricEigen::new(cycle.projector_sum());
    let top = (0..3)
        .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .expect("three eigenvalues");
    let state = StateVector::from_vector(eig.eigenvectors.column(top).into_owned()).ok()?;
    let value = match target {
        Target::Wright => wright_value(state, &cycle),
        Target::Kcbs => kcbs_value(state, &cycle).value,
    };
    Some(Evaluated {
        value,
        vectors,
        state,
        residual: cycle.max_adjacent_overlap(),
    })
}

/// Larger is better for both targets.
fn score(target: Target, value: f64) -> f64 {
    match target {
        Target::Wright => value,
        Target::Kcbs => -value,
    }
}

struct RestartOutcome {
    restart: usize,
    params: Vec<f64>,
    decoder: Decoder,
    score: f64,
    evaluations: usize,
    converged: bool,
}

fn run_restart(config: &OptimizeConfig, restart: usize) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);

    let (decoder, x0) = if restart == 0 && config.seed_with_known_optimum {
        let vs = make_pentagram().cycle().vectors().map(|v| *v.as_vector());
        let decoder = Decoder::for_configuration(&vs);
        let x0 = decoder.encode(&vs);
        (decoder, x0)
    } else {
        let x0: Vec<f64> = (0..PARAMS)
            .map(|_| rng.random_range(0.0..2.0 * PI))
            .collect();
        let probe = Decoder {
            references: [0, 0, 0, 0],
        }
        .decode(&x0);
        let decoder = Decoder::for_configuration(&probe);
        (decoder, x0)
    };

    let weight = 2f64.powi(restart.min(16) as i32);
    let target = config.target;
    let objective = |p: &[f64]| -> f64 {
        let raw = decoder.decode(p);
        let leak = raw[4].dotc(&raw[0]).norm_sqr();
        match close_cycle(&raw).and_then(|c| evaluate(target, &c)) {
            Some(e) => -score(target, e.value) + weight * leak,
            None => f64::INFINITY,
        }
    };

    let budget = config.evaluations_per_restart;
    let mut opts = SimplexOptions {
        max_evaluations: budget,
        ..Default::default()
    };
    let mut result = nelder_mead(objective, &x0, &opts);
    let mut evaluations = result.evaluations;
    // Polish by re-seeding the simplex at the incumbent. The optimum is a
    // continuous family, so the simplex need not shrink; a restart counts
    // as converged once a fresh simplex no longer improves the objective.
    let mut converged = false;
    while evaluations < budget {
        opts.max_evaluations = budget - evaluations;
        opts.initial_step = (opts.initial_step * 0.1).max(1e-6);
        let polished = nelder_mead(objective, &result.x, &opts);
        evaluations += polished.evaluations;
        let stalled = result.value - polished.value <= STALL_TOLERANCE;
        if polished.value <= result.value {
            result = polished;
        }
        if stalled {
            converged = true;
            break;
        }
    }

    let final_score = close_cycle(&decoder.decode(&result.x))
        .and_then(|c| evaluate(target, &c))
        .map(|e| score(target, e.value))
        .unwrap_or(f64::NEG_INFINITY);
    RestartOutcome {
        restart,
        params: result.x,
        decoder,
        score: final_score,
        evaluations,
        converged,
    }
}

/// Multi-start local search for the largest violation. Restarts run in
/// parallel with counter-derived streams, so the result depends only on the
/// configuration.
pub fn maximize_violation(config: &OptimizeConfig) -> Result<OptimizationResult> {
    if config.dimension != 3 {
        return Err(Error::InvalidParameter(format!(
            "only qutrit configurations (dimension 3) are supported, got {}",
            config.dimension
        )));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidParameter(
            "at least one restart is required".into(),
        ));
    }
    if config.evaluations_per_restart < PARAMS + 1 {
        return Err(Error::InvalidParameter(format!(
            "need at least {} evaluations per restart",
            PARAMS + 1
        )));
    }

    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(config, r))
        .collect();
    let iterations = outcomes.iter().map(|o| o.evaluations).sum();
    let best = outcomes
        .into_iter()
        .reduce(|a, b| {
            // ties go to the lower restart index
            if b.score > a.score {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");

    let raw = best.decoder.decode(&best.params);
    let penalty_residual = raw[4].dotc(&raw[0]).norm();
    let closed = close_cycle(&raw).ok_or_else(|| {
        Error::InvalidParameter("optimizer ended on a degenerate configuration".into())
    })?;
    let e = evaluate(config.target, &closed).ok_or_else(|| {
        Error::InvalidParameter("optimizer ended on a degenerate configuration".into())
    })?;
    Ok(OptimizationResult {
        target: config.target,
        best_value: e.value,
        vectors: e.vectors,
        state: e.state,
        iterations,
        residual: e.residual,
        penalty_residual,
        best_restart: best.restart,
        converged: best.converged,
        seed: config.seed,
    })
}
