//! Photonic realization of the qutrit: polarization and path of one photon.
//!
//! The basis is `(H,b), (V,b), (H,a), (V,a)` and the qutrit occupies the first
//! three modes, `|0⟩ = |H,b⟩`, `|1⟩ = |V,b⟩`, `|2⟩ = |H,a⟩`. Any amplitude in
//! `(V,a)` counts as loss. Delay lines do not act as operators on these four
//! modes; they move amplitude into a later time bin, and bins never interfere.

mod device;
mod element;

pub use device::{
    build_device, build_device_with, cascade, identity_device, pentagram_devices, plate_angle_for,
    verify_device, BranchOperators, DeviceFidelity, InternalSettings, InternalSolve,
    MeasurementDevice, SlotTable, PLATE_ANGLES_DEG,
};
pub use element::{hwp_transfer, qwp_transfer, OpticalElement};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::qutrit::{StateVector, C64};

pub type Mat4 = Matrix4<C64>;
pub type Vec4 = Vector4<C64>;

/// Bins closer than this are the same arrival time.
const BIN_TOL_NS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Path {
    A,
    B,
}

impl Path {
    /// Indices of the `(H, V)` modes of this path.
    pub(crate) fn modes(self) -> (usize, usize) {
        match self {
            Path::B => (0, 1),
            Path::A => (2, 3),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "H,b")]
    Hb,
    #[serde(rename = "V,b")]
    Vb,
    #[serde(rename = "H,a")]
    Ha,
    #[serde(rename = "V,a")]
    Va,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Hb, Mode::Vb, Mode::Ha, Mode::Va];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Four mode amplitudes arriving with a common delay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeBin {
    pub delay_ns: f64,
    pub amplitudes: [C64; 4],
}

impl TimeBin {
    pub fn probability(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Single-photon amplitudes over modes and arrival times. The total norm may
/// be below one; the deficit is loss.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    bins: Vec<TimeBin>,
}

impl ModeState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn from_amplitudes(amplitudes: [C64; 4]) -> Self {
        let mut s = Self::vacuum();
        s.add(0.0, amplitudes);
        s
    }

    pub fn bins(&self) -> &[TimeBin] {
        &self.bins
    }

    pub fn norm_sqr(&self) -> f64 {
        self.bins.iter().map(TimeBin::probability).sum()
    }

    /// Probability that has leaked into `(V,a)`, summed over bins.
    pub fn loss_mode_probability(&self) -> f64 {
        self.bins
            .iter()
            .map(|b| b.amplitudes[Mode::Va.index()].norm_sqr())
            .sum()
    }

    pub fn bin_at(&self, delay_ns: f64) -> Option<&TimeBin> {
        self.bins
            .iter()
            .find(|b| (b.delay_ns - delay_ns).abs() < BIN_TOL_NS)
    }

    pub fn amplitude(&self, mode: Mode, delay_ns: f64) -> C64 {
        self.bin_at(delay_ns)
            .map(|b| b.amplitudes[mode.index()])
            .unwrap_or_default()
    }

    fn add(&mut self, delay_ns: f64, amplitudes: [C64; 4]) {
        if let Some(bin) = self
            .bins
            .iter_mut()
            .find(|b| (b.delay_ns - delay_ns).abs() < BIN_TOL_NS)
        {
            for (a, b) in bin.amplitudes.iter_mut().zip(amplitudes) {
                *a += b;
            }
        } else {
            self.bins.push(TimeBin {
                delay_ns,
                amplitudes,
            });
            self.bins.sort_by(|a, b| a.delay_ns.total_cmp(&b.delay_ns));
        }
    }

    pub(crate) fn apply_operator(&self, op: &Mat4) -> Self {
        let bins = self
            .bins
            .iter()
            .map(|b| {
                let out = op * Vec4::from(b.amplitudes);
                TimeBin {
                    delay_ns: b.delay_ns,
                    amplitudes: [out[0], out[1], out[2], out[3]],
                }
            })
            .collect();
        Self { bins }
    }

    pub(crate) fn apply_delay(&self, mode: Mode, delay_ns: f64) -> Self {
        let mut out = Self::vacuum();
        for b in &self.bins {
            let mut stay = b.amplitudes;
            let mut moved = [C64::default(); 4];
            moved[mode.index()] = stay[mode.index()];
            stay[mode.index()] = C64::default();
            out.add(b.delay_ns, stay);
            out.add(b.delay_ns + delay_ns, moved);
        }
        out
    }
}

/// Maps qutrit amplitudes onto `(H,b), (V,b), (H,a)` with `(V,a)` empty.
pub fn encode(state: &StateVector) -> ModeState {
    let [a0, a1, a2] = state.amplitudes();
    ModeState::from_amplitudes([a0, a1, a2, C64::default()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn encode_places_amplitudes_by_mode() {
        let s = encode(&StateVector::basis(2));
        assert_eq!(s.amplitude(Mode::Ha, 0.0), C64::new(1.0, 0.0));
        let s = encode(&StateVector::basis(0));
        assert_eq!(s.amplitude(Mode::Hb, 0.0), C64::new(1.0, 0.0));
        let psi = StateVector::new([
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, FRAC_1_SQRT_2),
            C64::default(),
        ])
        .unwrap();
        let s = encode(&psi);
        assert_eq!(s.amplitude(Mode::Hb, 0.0), C64::new(FRAC_1_SQRT_2, 0.0));
        assert_eq!(s.amplitude(Mode::Vb, 0.0), C64::new(0.0, FRAC_1_SQRT_2));
        assert_eq!(s.amplitude(Mode::Va, 0.0), C64::default());
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delay_moves_one_mode_to_a_later_bin() {
        let s = ModeState::from_amplitudes([
            C64::new(0.6, 0.0),
            C64::new(0.8, 0.0),
            C64::default(),
            C64::default(),
        ]);
        let d = s.apply_delay(Mode::Hb, 50.0);
        assert_eq!(d.bins().len(), 2);
        assert_eq!(d.amplitude(Mode::Hb, 50.0), C64::new(0.6, 0.0));
        assert_eq!(d.amplitude(Mode::Vb, 0.0), C64::new(0.8, 0.0));
        assert!((d.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vacuum_has_no_bins() {
        assert_eq!(ModeState::vacuum().norm_sqr(), 0.0);
        assert!(ModeState::vacuum().bins().is_empty());
    }
}
