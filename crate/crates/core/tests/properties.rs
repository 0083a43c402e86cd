mod common;

use kcbs_core::inequality::{
    classical_strategy_kcbs, classical_strategy_wright, ClassicalStrategy,
};
use kcbs_core::photonic::{build_device, encode, verify_device};
use kcbs_core::qutrit::{
    born_probability, luders_update, make_pentagram, next_index, DensityMatrix, Outcome, State,
    StateVector, C64, CYCLE_LEN,
};
use kcbs_core::sequential::{joint_distribution, kcbs_run, Order};
use proptest::prelude::*;

fn state_strategy() -> impl Strategy<Value = StateVector> {
    prop::array::uniform6(-1.0f64..1.0)
        .prop_filter("non-zero vector", |a| {
            a.iter().map(|x| x * x).sum::<f64>() > 1e-3
        })
        .prop_map(|a| {
            StateVector::normalized([
                C64::new(a[0], a[1]),
                C64::new(a[2], a[3]),
                C64::new(a[4], a[5]),
            ])
            .unwrap()
        })
}

fn mixed_strategy() -> impl Strategy<Value = DensityMatrix> {
    (state_strategy(), state_strategy(), 0.0f64..1.0)
        .prop_map(|(a, b, w)| DensityMatrix::mixture(&[(w, a), (1.0 - w, b)]).unwrap())
}

/// Exclusive yes-sets, one per classical state, with weights.
fn classical_strategy() -> impl Strategy<Value = ClassicalStrategy> {
    let admissible: Vec<u8> = (0u8..32)
        .filter(|m| (0..CYCLE_LEN).all(|i| !(m >> i & 1 == 1 && m >> next_index(i) & 1 == 1)))
        .collect();
    (
        prop::array::uniform5(prop::sample::select(admissible)),
        prop::array::uniform5(0.01f64..1.0),
    )
        .prop_map(|(yes_sets, w)| {
            // yes_sets[s] lists the questions answered yes by state s
            let mut answer_sets = [0u8; CYCLE_LEN];
            for (s, mask) in yes_sets.iter().enumerate() {
                for (q, set) in answer_sets.iter_mut().enumerate() {
                    if mask >> q & 1 == 1 {
                        *set |= 1 << s;
                    }
                }
            }
            let total: f64 = w.iter().sum();
            let mut weights = w.map(|x| x / total);
            let drift: f64 = weights.iter().sum::<f64>() - 1.0;
            weights[0] -= drift;
            ClassicalStrategy::new(answer_sets, weights).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn born_probabilities_of_both_outcomes_sum_to_one(s in state_strategy()) {
        let p = make_pentagram();
        for q in p.questions() {
            let yes = born_probability(s, q);
            prop_assert!((0.0..=1.0).contains(&yes));
            let no = kcbs_core::qutrit::outcome_probability(s, q, Outcome::No);
            prop_assert!((yes + no - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn luders_update_is_idempotent(s in state_strategy()) {
        let p = make_pentagram();
        let q = p.question(2);
        if born_probability(s, q) > 1e-6 {
            let once = luders_update(s, q, Outcome::Yes).unwrap();
            prop_assert!((born_probability(once, q) - 1.0).abs() < 1e-10);
            let twice = luders_update(once, q, Outcome::Yes).unwrap();
            let d = (twice.to_density().matrix() - once.to_density().matrix()).norm();
            prop_assert!(d < 1e-10);
        }
    }

    #[test]
    fn exclusive_pairs_commute_in_order(rho in mixed_strategy()) {
        let p = make_pentagram();
        let state: State = rho.into();
        let fwd = kcbs_run(state, p.cycle(), Order::Forward);
        let rev = kcbs_run(state, p.cycle(), Order::Reverse);
        prop_assert!((fwd.kappa - rev.kappa).abs() < 1e-12);
        for i in 0..CYCLE_LEN {
            let jd = fwd.joints[i];
            prop_assert!((jd.total() - 1.0).abs() < 1e-12);
            prop_assert!(jd.p_yy.abs() < 1e-12);
            let swapped = rev.joints[i].swapped();
            for (a, b) in jd.slot_probabilities().iter().zip(swapped.slot_probabilities()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quantum_values_respect_quantum_bounds(s in state_strategy()) {
        let p = make_pentagram();
        let w = kcbs_core::inequality::wright_value(s, p.cycle());
        let k = kcbs_core::inequality::kcbs_value(s, p.cycle()).value;
        prop_assert!(w <= 5f64.sqrt() + 1e-9);
        prop_assert!(k >= 5.0 - 4.0 * 5f64.sqrt() - 1e-9);
        // for exclusive questions κ = 5 − 4W exactly
        prop_assert!((k - (5.0 - 4.0 * w)).abs() < 1e-9);
    }

    #[test]
    fn classical_strategies_respect_classical_bounds(c in classical_strategy()) {
        prop_assert!(classical_strategy_wright(&c).total <= 2.0 + 1e-12);
        prop_assert!(classical_strategy_kcbs(&c).kappa >= -3.0 - 1e-12);
    }

    #[test]
    fn encoding_is_an_isometry(s in state_strategy()) {
        let m = encode(&s);
        prop_assert!((m.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert_eq!(m.loss_mode_probability(), 0.0);
    }

    #[test]
    fn any_plate_angle_gives_a_projective_device(theta in -180.0f64..180.0, s in state_strategy()) {
        let d = build_device(theta, 50.0).unwrap();
        let out = d.apply(&encode(&s));
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!(out.loss_mode_probability() < 1e-20);
        let q = kcbs_core::qutrit::Question::new(s, 0);
        let r = verify_device(&d, &q);
        prop_assert!(r.unitarity_residual < 1e-10);
        prop_assert!(r.rank_residual < 1e-10);
    }
}

#[test]
fn joint_of_sequential_measurement_matches_for_random_pairs() {
    // non-exclusive pairs are order dependent; their joints still normalize
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(8);
    for _ in 0..200 {
        let a = kcbs_core::qutrit::Question::new(common::random_state(&mut rng), 0);
        let b = kcbs_core::qutrit::Question::new(common::random_state(&mut rng), 1);
        let s = common::random_state(&mut rng);
        let jd = joint_distribution(s, &a, &b);
        assert!((jd.total() - 1.0).abs() < 1e-12);
        assert!((jd.first_yes() - born_probability(s, &a)).abs() < 1e-12);
    }
}
