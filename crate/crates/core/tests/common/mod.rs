#![allow(dead_code)]

use kcbs_core::qutrit::{DensityMatrix, StateVector, C64};
use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-random pure qutrit state.
pub fn random_state<R: Rng>(rng: &mut R) -> StateVector {
    loop {
        let amps: [C64; 3] = std::array::from_fn(|_| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if let Ok(s) = StateVector::normalized(amps) {
            return s;
        }
    }
}

/// Random mixture of three random pure states.
pub fn random_mixed<R: Rng>(rng: &mut R) -> DensityMatrix {
    let w: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
    let total: f64 = w.iter().sum();
    let components: Vec<(f64, StateVector)> =
        w.iter().map(|x| (x / total, random_state(rng))).collect();
    DensityMatrix::mixture(&components).expect("convex mixture of pure states")
}
