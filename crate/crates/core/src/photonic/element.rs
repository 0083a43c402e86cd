//! Jones-calculus optical elements acting on the four polarization/path modes.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::{Mat4, Mode, ModeState, Path};
use crate::qutrit::C64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Half-wave plate with fast axis at `theta_deg` from horizontal, acting on
/// `(H, V)`: `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`.
pub fn hwp_transfer(theta_deg: f64) -> Matrix2<C64> {
    let t = 2.0 * theta_deg.to_radians();
    Matrix2::new(re(t.cos()), re(t.sin()), re(t.sin()), re(-t.cos()))
}

/// Quarter-wave plate with fast axis at `theta_deg`: `R(θ) diag(1, i) R(−θ)`.
pub fn qwp_transfer(theta_deg: f64) -> Matrix2<C64> {
    let (s, c) = theta_deg.to_radians().sin_cos();
    let i = C64::i();
    let off = (re(1.0) - i) * (s * c);
    Matrix2::new(re(c * c) + i * (s * s), off, off, re(s * s) + i * (c * c))
}

fn embed(path: Path, m: &Matrix2<C64>) -> Mat4 {
    let (h, v) = path.modes();
    let mut out = Mat4::identity();
    out[(h, h)] = m[(0, 0)];
    out[(h, v)] = m[(0, 1)];
    out[(v, h)] = m[(1, 0)];
    out[(v, v)] = m[(1, 1)];
    out
}

/// Column `k` of the result is the image of mode `k`.
fn permutation(images: [Mode; 4]) -> Mat4 {
    let mut out = Mat4::zeros();
    for (k, m) in images.into_iter().enumerate() {
        out[(m.index(), k)] = re(1.0);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpticalElement {
    HalfWavePlate {
        path: Path,
        angle_deg: f64,
    },
    QuarterWavePlate {
        path: Path,
        angle_deg: f64,
    },
    /// Transmits H and reflects V: exchanges `(V,a)` and `(V,b)`.
    PolarizingBeamSplitter,
    /// Mirror pair exchanging the two paths.
    Mirror,
    /// Moves path `a` into path `b` flipping its polarization:
    /// `(H,a) → (V,b)`, `(V,b) → (H,b)`, `(H,b) → (H,a)`. Equivalent to a
    /// polarizing beam splitter, a 45° half-wave plate on `a`, and a mirror.
    ModeTransfer,
    /// Inverse of [`OpticalElement::ModeTransfer`].
    ModeReturn,
    /// Common phase on both polarizations of one path.
    PhaseShifter {
        path: Path,
        phase_deg: f64,
    },
    /// Delay line on one mode.
    Delay {
        mode: Mode,
        delay_ns: f64,
    },
}

impl OpticalElement {
    /// The 4×4 mode operator, or `None` for a delay line.
    pub fn operator(&self) -> Option<Mat4> {
        use Mode::*;
        Some(match *self {
            OpticalElement::HalfWavePlate { path, angle_deg } => {
                embed(path, &hwp_transfer(angle_deg))
            }
            OpticalElement::QuarterWavePlate { path, angle_deg } => {
                embed(path, &qwp_transfer(angle_deg))
            }
            OpticalElement::PhaseShifter { path, phase_deg } => {
                let z = C64::from_polar(1.0, phase_deg.to_radians());
                embed(path, &Matrix2::new(z, C64::default(), C64::default(), z))
            }
            OpticalElement::PolarizingBeamSplitter => permutation([Hb, Va, Ha, Vb]),
            OpticalElement::Mirror => permutation([Ha, Va, Hb, Vb]),
            OpticalElement::ModeTransfer => permutation([Ha, Hb, Vb, Va]),
            OpticalElement::ModeReturn => permutation([Vb, Ha, Hb, Va]),
            OpticalElement::Delay { .. } => return None,
        })
    }

    /// Physical elements undoing this one, in the order they are traversed,
    /// or `None` for a delay line. A quarter-wave plate is undone by the same
    /// plate turned by 90° followed by a −90° phase on its path.
    pub fn inverse(&self) -> Option<Vec<OpticalElement>> {
        Some(match *self {
            OpticalElement::QuarterWavePlate { path, angle_deg } => vec![
                OpticalElement::QuarterWavePlate {
                    path,
                    angle_deg: angle_deg + 90.0,
                },
                OpticalElement::PhaseShifter {
                    path,
                    phase_deg: -90.0,
                },
            ],
            OpticalElement::PhaseShifter { path, phase_deg } => {
                vec![OpticalElement::PhaseShifter {
                    path,
                    phase_deg: -phase_deg,
                }]
            }
            OpticalElement::ModeTransfer => vec![OpticalElement::ModeReturn],
            OpticalElement::ModeReturn => vec![OpticalElement::ModeTransfer],
            OpticalElement::Delay { .. } => return None,
            other => vec![other],
        })
    }

    pub fn apply(&self, state: &ModeState) -> ModeState {
        match (self, self.operator()) {
            (_, Some(op)) => state.apply_operator(&op),
            (OpticalElement::Delay { mode, delay_ns }, None) => state.apply_delay(*mode, *delay_ns),
            _ => unreachable!("only delay lines lack an operator"),
        }
    }
}
