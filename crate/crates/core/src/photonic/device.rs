//! Measurement devices built from optical elements, their verification
//! against the abstract questions, and two-device cascades.

use std::sync::OnceLock;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::{encode, Mode, ModeState, OpticalElement, Path};
use crate::error::{Error, Result};
use crate::qutrit::{make_pentagram, Mat3, Question, StateVector, C64, CYCLE_LEN};
use crate::simplex::{nelder_mead, SimplexOptions};

/// Half-wave plate angles selecting the five pentagram questions.
pub const PLATE_ANGLES_DEG: [f64; CYCLE_LEN] = [45.0, 117.0, 9.0, 81.0, 153.0];

/// A device is accepted when every target fidelity reaches this.
const FIDELITY_THRESHOLD: f64 = 1.0 - 1e-6;

/// Angles of the two fixed plates inside every device, after the mode
/// transfer: a half-wave plate and a quarter-wave plate, both on path `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InternalSettings {
    pub hwp_deg: f64,
    pub qwp_deg: f64,
}

/// Outcome of the joint solve for [`InternalSettings`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InternalSolve {
    pub settings: InternalSettings,
    pub fidelities: [f64; CYCLE_LEN],
    pub min_fidelity: f64,
    pub evaluations: usize,
}

impl InternalSettings {
    /// Result of [`InternalSettings::solve`], kept for reference and checked
    /// against a fresh solve in the tests. The half-wave angle equals
    /// `atan(r)/2` with `r = √cos(π/5)`.
    pub const FROZEN: InternalSettings = InternalSettings {
        hwp_deg: 20.984_957_617_187_72,
        qwp_deg: 0.0,
    };

    /// Least-squares fit of both angles to all five plate-angle/question
    /// pairs at once. Angles are reported modulo 90°, which leaves the
    /// delayed projector unchanged.
    pub fn solve() -> InternalSolve {
        let targets = make_pentagram();
        let objective = |x: &[f64]| {
            let settings = InternalSettings {
                hwp_deg: x[0],
                qwp_deg: x[1],
            };
            PLATE_ANGLES_DEG
                .iter()
                .zip(targets.questions())
                .map(|(&theta, q)| {
                    // distance rather than squared distance, so the minimum is
                    // resolved to machine precision
                    let delayed = assemble(theta, 1.0, settings).branch_operators().delayed;
                    (delayed.adjoint() * delayed - q.projector()).norm()
                })
                .sum::<f64>()
        };
        let opts = SimplexOptions {
            max_evaluations: 2_000,
            initial_step: 10.0,
            ..Default::default()
        };
        let mut evaluations = 0;
        let mut best: Option<(Vec<f64>, f64)> = None;
        for h in [0.0, 30.0, 60.0] {
            for q in [0.0, 45.0, 90.0, 135.0] {
                let r = nelder_mead(objective, &[h + 5.0, q + 5.0], &opts);
                evaluations += r.evaluations;
                if best.as_ref().is_none_or(|(_, v)| r.value < *v) {
                    best = Some((r.x, r.value));
                }
            }
        }
        let (x, _) = best.expect("grid is non-empty");
        let settings = InternalSettings {
            hwp_deg: canonical_angle(x[0]),
            qwp_deg: canonical_angle(x[1]),
        };
        let fidelities: [f64; CYCLE_LEN] = std::array::from_fn(|i| {
            verify_device(
                &assemble(PLATE_ANGLES_DEG[i], 1.0, settings),
                targets.question(i),
            )
            .fidelity
        });
        InternalSolve {
            settings,
            fidelities,
            min_fidelity: fidelities.iter().copied().fold(f64::INFINITY, f64::min),
            evaluations,
        }
    }

    /// The solve, run at most once per process.
    pub fn solved() -> &'static InternalSolve {
        static SOLVE: OnceLock<InternalSolve> = OnceLock::new();
        SOLVE.get_or_init(InternalSettings::solve)
    }
}

fn canonical_angle(deg: f64) -> f64 {
    let a = deg.rem_euclid(90.0);
    if 90.0 - a < 1e-6 {
        a - 90.0
    } else {
        a
    }
}

/// A single-question measurement device: the photon leaves late by
/// `delay_ns` when the answer is yes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDevice {
    pub plate_angle_deg: f64,
    pub delay_ns: f64,
    pub internal: InternalSettings,
    pipeline: Vec<OpticalElement>,
}

/// Amplitude maps of a device on the qutrit modes, split by arrival time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchOperators {
    pub undelayed: Mat3,
    pub delayed: Mat3,
    /// Largest `(V,a)` amplitude produced from any qutrit basis state.
    pub loss_amplitude: f64,
}

impl MeasurementDevice {
    pub fn pipeline(&self) -> &[OpticalElement] {
        &self.pipeline
    }

    pub fn apply(&self, state: &ModeState) -> ModeState {
        self.pipeline
            .iter()
            .fold(state.clone(), |s, element| element.apply(&s))
    }

    /// Elements undoing the pipeline in reverse order, delay lines omitted.
    pub fn inverse_pipeline(&self) -> Vec<OpticalElement> {
        self.pipeline
            .iter()
            .rev()
            .filter_map(OpticalElement::inverse)
            .flatten()
            .collect()
    }

    pub fn branch_operators(&self) -> BranchOperators {
        let mut undelayed = Mat3::zeros();
        let mut delayed = Mat3::zeros();
        let mut loss_amplitude: f64 = 0.0;
        for k in 0..3 {
            let out = self.apply(&encode(&StateVector::basis(k)));
            for bin in out.bins() {
                let target = if bin.delay_ns.abs() < 1e-9 {
                    &mut undelayed
                } else {
                    &mut delayed
                };
                for m in 0..3 {
                    target[(m, k)] += bin.amplitudes[m];
                }
                loss_amplitude = loss_amplitude.max(bin.amplitudes[Mode::Va.index()].norm());
            }
        }
        BranchOperators {
            undelayed,
            delayed,
            loss_amplitude,
        }
    }
}

fn assemble(plate_angle_deg: f64, delay_ns: f64, internal: InternalSettings) -> MeasurementDevice {
    let b = Path::B;
    let hwp = |angle_deg| OpticalElement::HalfWavePlate { path: b, angle_deg };
    let qwp = |angle_deg| OpticalElement::QuarterWavePlate { path: b, angle_deg };
    let forward = [
        hwp(plate_angle_deg),
        OpticalElement::ModeTransfer,
        hwp(internal.hwp_deg),
        qwp(internal.qwp_deg),
    ];
    let mut pipeline = forward.to_vec();
    pipeline.push(OpticalElement::Delay {
        mode: Mode::Hb,
        delay_ns,
    });
    pipeline.extend(
        forward
            .iter()
            .rev()
            .flat_map(|e| e.inverse().expect("forward stages have inverses")),
    );
    MeasurementDevice {
        plate_angle_deg,
        delay_ns,
        internal,
        pipeline,
    }
}

/// Device with the solved internal settings.
pub fn build_device(plate_angle_deg: f64, delay_ns: f64) -> Result<MeasurementDevice> {
    let solve = InternalSettings::solved();
    if solve.min_fidelity < FIDELITY_THRESHOLD {
        return Err(Error::DeviceConfiguration {
            fidelity: solve.min_fidelity,
        });
    }
    build_device_with(plate_angle_deg, delay_ns, solve.settings)
}

/// Device with explicit internal settings.
pub fn build_device_with(
    plate_angle_deg: f64,
    delay_ns: f64,
    internal: InternalSettings,
) -> Result<MeasurementDevice> {
    if !(delay_ns > 0.0) || !delay_ns.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delay must be positive, got {delay_ns} ns"
        )));
    }
    if !plate_angle_deg.is_finite() {
        return Err(Error::InvalidParameter("plate angle must be finite".into()));
    }
    Ok(assemble(plate_angle_deg, delay_ns, internal))
}

/// A device consisting only of a delay line on `(H,b)`.
pub fn identity_device(delay_ns: f64) -> MeasurementDevice {
    MeasurementDevice {
        plate_angle_deg: 0.0,
        delay_ns,
        internal: InternalSettings {
            hwp_deg: 0.0,
            qwp_deg: 0.0,
        },
        pipeline: vec![OpticalElement::Delay {
            mode: Mode::Hb,
            delay_ns,
        }],
    }
}

/// The five devices for the pentagram questions, delayed by `delay_ns`.
pub fn pentagram_devices(delay_ns: f64) -> Result<Vec<MeasurementDevice>> {
    PLATE_ANGLES_DEG
        .iter()
        .map(|&theta| build_device(theta, delay_ns))
        .collect()
}

/// Plate angle whose device asks about `v`, derived from the polarization of
/// its path-`b` component. `None` when that component is elliptical or zero.
pub fn plate_angle_for(v: &StateVector) -> Option<f64> {
    let [h, vv, a] = v.amplitudes();
    if h.norm() + vv.norm() < 1e-12 {
        return None;
    }
    // the path-a amplitude fixes the sign of the path-b polarization
    let reference = if a.norm() > 1e-12 {
        a
    } else if h.norm() >= vv.norm() {
        h
    } else {
        vv
    };
    let phase = reference / reference.norm();
    let (h, vv) = (h / phase, vv / phase);
    if h.im.abs() > 1e-12 || vv.im.abs() > 1e-12 {
        return None;
    }
    let phi = vv.re.atan2(h.re).to_degrees();
    Some(((phi + 90.0) / 2.0).rem_euclid(180.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceFidelity {
    pub plate_angle_deg: f64,
    pub target_index: usize,
    /// `|⟨v_effective|v_target⟩|²`.
    pub fidelity: f64,
    pub effective: StateVector,
    /// Largest eigenvalue of the delayed branch's effect operator.
    pub delayed_weight: f64,
    /// Second-largest eigenvalue; zero for a rank-one branch.
    pub rank_residual: f64,
    /// Largest deviation of the two-branch map from an isometry.
    pub unitarity_residual: f64,
    pub loss_amplitude: f64,
}

/// Extracts the yes-projector realized by the delayed branch and compares it
/// with the target question.
pub fn verify_device(device: &MeasurementDevice, target: &Question) -> DeviceFidelity {
    let ops = device.branch_operators();
    let effect = ops.delayed.adjoint() * ops.delayed;
    let eig = SymmetricEigen::new(effect);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvectors.column(order[0]).into_owned();
    let effective = StateVector::from_vector(top).unwrap_or_else(|_| StateVector::basis(0));
    let completeness = ops.undelayed.adjoint() * ops.undelayed + effect - Mat3::identity();
    DeviceFidelity {
        plate_angle_deg: device.plate_angle_deg,
        target_index: target.index(),
        fidelity: effective.fidelity(target.eigenvector()),
        effective,
        delayed_weight: eig.eigenvalues[order[0]],
        rank_residual: eig.eigenvalues[order[1]].max(0.0),
        unitarity_residual: completeness.iter().map(|z| z.norm()).fold(0.0, f64::max),
        loss_amplitude: ops.loss_amplitude,
    }
}

/// Arrival-time table of two cascaded devices: slot `t0..t3` carries the
/// outcome pairs `(no,no), (yes,no), (no,yes), (yes,yes)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotTable {
    pub delays_ns: [f64; 4],
    pub amplitudes: [[C64; 4]; 4],
    pub probabilities: [f64; 4],
}

/// Sends `input` through `first` and then `second`. The two delays must
/// differ so that all four outcome pairs arrive at distinct times.
pub fn cascade(
    first: &MeasurementDevice,
    second: &MeasurementDevice,
    input: &ModeState,
) -> Result<SlotTable> {
    let (d1, d2) = (first.delay_ns, second.delay_ns);
    if (d1 - d2).abs() < 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "cascaded devices need distinct delays, both are {d1} ns"
        )));
    }
    let out = second.apply(&first.apply(input));
    let delays_ns = [0.0, d1, d2, d1 + d2];
    let mut amplitudes = [[C64::default(); 4]; 4];
    for bin in out.bins() {
        let slot = delays_ns
            .iter()
            .position(|d| (d - bin.delay_ns).abs() < 1e-9)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("unexpected arrival time {} ns", bin.delay_ns))
            })?;
        amplitudes[slot] = bin.amplitudes;
    }
    let probabilities = amplitudes.map(|a| a.iter().map(|z| z.norm_sqr()).sum());
    Ok(SlotTable {
        delays_ns,
        amplitudes,
        probabilities,
    })
}
