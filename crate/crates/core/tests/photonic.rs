mod common;

use kcbs_core::photonic::{
    build_device, cascade, encode, pentagram_devices, verify_device, MeasurementDevice,
    OpticalElement, PLATE_ANGLES_DEG,
};
use kcbs_core::qutrit::{make_pentagram, next_index, CYCLE_LEN};
use kcbs_core::sequential::joint_distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DT: f64 = 50.0;

#[test]
fn cascades_match_sequential_joints_for_random_states() {
    let p = make_pentagram();
    let first = pentagram_devices(DT).unwrap();
    let second = pentagram_devices(2.0 * DT).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut states = vec![*p.test_state()];
    states.extend((0..50).map(|_| common::random_state(&mut rng)));
    for s in &states {
        for i in 0..CYCLE_LEN {
            let j = next_index(i);
            for (a, b) in [(i, j), (j, i)] {
                let slots = cascade(&first[a], &second[b], &encode(s)).unwrap();
                let jd = joint_distribution(*s, p.question(a), p.question(b));
                for (x, y) in slots.probabilities.iter().zip(jd.slot_probabilities()) {
                    assert!((x - y).abs() < 1e-9, "pair ({a},{b}): {x} vs {y}");
                }
                assert_eq!(slots.delays_ns, [0.0, DT, 2.0 * DT, 3.0 * DT]);
            }
        }
    }
}

#[test]
fn slot_amplitudes_carry_the_post_measurement_states() {
    // the no,no slot holds (1−P_b)(1−P_a)|ψ⟩ in the qutrit modes
    let p = make_pentagram();
    let first = build_device(PLATE_ANGLES_DEG[0], DT).unwrap();
    let second = build_device(PLATE_ANGLES_DEG[1], 2.0 * DT).unwrap();
    let s = *p.test_state();
    let slots = cascade(&first, &second, &encode(&s)).unwrap();
    let id = kcbs_core::qutrit::Mat3::identity();
    let expected =
        (id - p.question(1).projector()) * (id - p.question(0).projector()) * s.as_vector();
    for k in 0..3 {
        assert!((slots.amplitudes[0][k] - expected[k]).norm() < 1e-10);
    }
    assert!(slots.amplitudes[0][3].norm() < 1e-12);
}

#[test]
fn every_pentagram_device_meets_the_fidelity_threshold() {
    let p = make_pentagram();
    for (i, d) in pentagram_devices(DT).unwrap().iter().enumerate() {
        let r = verify_device(d, p.question(i));
        assert!(r.fidelity >= 1.0 - 1e-6, "{r:?}");
        assert_eq!(r.plate_angle_deg, PLATE_ANGLES_DEG[i]);
    }
}

#[test]
fn equal_delays_are_rejected() {
    let d = build_device(45.0, DT).unwrap();
    assert!(cascade(&d, &d, &encode(make_pentagram().test_state())).is_err());
    assert!(build_device(45.0, 0.0).is_err());
}

#[test]
fn device_descriptions_round_trip_through_json() {
    let d = build_device(117.0, DT).unwrap();
    let json = serde_json::to_string(&d).unwrap();
    assert!(json.contains("\"kind\":\"half_wave_plate\""), "{json}");
    let back: MeasurementDevice = serde_json::from_str(&json).unwrap();
    assert_eq!(back, d);
    assert!(d
        .pipeline()
        .iter()
        .any(|e| matches!(e, OpticalElement::Delay { .. })));
}
