mod common;

use kcbs_core::inequality::{classical_strategy_kcbs, ClassicalStrategy};
use kcbs_core::lab::{
    estimate_correlation, estimate_kcbs, estimate_wright, noisy_kcbs_value, noisy_wright_value,
    run_experiment, sample_counts, CountTable, Distribution, Experiment, ExperimentConfig,
    NoiseModel, Setting, SettingCounts, ShotPlan, Source,
};
use kcbs_core::qutrit::{born_probability, make_pentagram, next_index, CYCLE_LEN};
use kcbs_core::sequential::{joint_distribution, Order};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KAPPA0: f64 = -3.944_271_909_999_159;

fn sqrt5() -> f64 {
    5f64.sqrt()
}

#[test]
fn ideal_edge_correlation_within_five_sigma() {
    let p = make_pentagram();
    let jd = joint_distribution(*p.test_state(), p.question(0), p.question(1));
    let d = vec![Distribution {
        setting: Setting::Pair {
            first: 0,
            second: 1,
        },
        probabilities: jd.slot_probabilities().to_vec(),
    }];
    let t = sample_counts(&d, &ShotPlan::new(30_000, 1, 1).unwrap()).unwrap();
    let c = &t.rows[0].counts;
    let e = estimate_correlation(&[c[0], c[1], c[2], c[3]]).unwrap();
    let expected = 1.0 - 4.0 / sqrt5();
    assert!((e.value - expected).abs() < 5.0 * e.sigma, "{e:?}");
    assert_eq!(c[3], 0, "exclusive questions never both answer yes");
}

fn exact_counts_table(probabilities: &[(Setting, Vec<f64>)]) -> CountTable {
    let total = 1e15;
    CountTable {
        seed: 0,
        shots_per_setting: total as u64,
        samples: 1,
        rows: probabilities
            .iter()
            .map(|(setting, p)| SettingCounts {
                sample: 0,
                setting: *setting,
                counts: p.iter().map(|x| (x * total).round() as u64).collect(),
            })
            .collect(),
    }
}

#[test]
fn expected_counts_reproduce_ideal_values() {
    let p = make_pentagram();
    let singles: Vec<_> = (0..CYCLE_LEN)
        .map(|i| {
            let y = born_probability(*p.test_state(), p.question(i));
            (Setting::Single(i), vec![1.0 - y, y])
        })
        .collect();
    let w = estimate_wright(&exact_counts_table(&singles)).unwrap();
    assert!((w.total.value - sqrt5()).abs() < 1e-12);
    let sigma: f64 = singles
        .iter()
        .map(|(_, p)| p[0] * p[1] / 1e15)
        .sum::<f64>()
        .sqrt();
    assert!(
        (w.total.sigma - sigma).abs() / sigma < 1e-6,
        "{} vs {sigma}",
        w.total.sigma
    );

    let pairs: Vec<_> = (0..CYCLE_LEN)
        .map(|i| {
            let jd = joint_distribution(*p.test_state(), p.question(i), p.question(next_index(i)));
            (
                Setting::edge(Order::Forward, i),
                jd.slot_probabilities().to_vec(),
            )
        })
        .collect();
    let k = estimate_kcbs(&exact_counts_table(&pairs), Order::Forward).unwrap();
    assert!((k.kappa.value - KAPPA0).abs() < 1e-12);
}

#[test]
fn estimates_converge_at_large_shot_counts() {
    let p = make_pentagram();
    let noise = NoiseModel::new(0.85, 0.01, 0.0).unwrap();
    let mut cfg = ExperimentConfig::new(Experiment::Kcbs, 3);
    cfg.noise = noise;
    cfg.plan = ShotPlan::new(10_000_000, 3, 1).unwrap();
    let r = run_experiment(&Source::pentagram(), &cfg).unwrap();
    for order in Order::BOTH {
        let k = r.kcbs_for(order).unwrap().kappa;
        let exact = noisy_kcbs_value(*p.test_state(), p.cycle(), &noise, order);
        assert!(
            (k.value - exact).abs() < 5.0 * k.sigma,
            "{order}: {k:?} vs {exact}"
        );
    }

    let mut cfg = ExperimentConfig::new(Experiment::Wright, 3);
    cfg.noise = noise;
    cfg.plan = ShotPlan::new(10_000_000, 3, 1).unwrap();
    let w = run_experiment(&Source::pentagram(), &cfg)
        .unwrap()
        .wright
        .unwrap()
        .total;
    let exact = noisy_wright_value(*p.test_state(), p.cycle(), &noise);
    assert!((w.value - exact).abs() < 5.0 * w.sigma, "{w:?} vs {exact}");
}

#[test]
fn sigma_scales_with_inverse_root_of_shots() {
    let sigma_at = |shots| {
        let mut cfg = ExperimentConfig::new(Experiment::Kcbs, 21);
        cfg.noise = NoiseModel::new(0.9, 0.0, 0.0).unwrap();
        cfg.plan = ShotPlan::new(shots, 21, 1).unwrap();
        cfg.orders = vec![Order::Forward];
        run_experiment(&Source::pentagram(), &cfg).unwrap().kcbs[0]
            .kappa
            .sigma
    };
    let ratio = sigma_at(10_000) / sigma_at(1_000_000);
    assert!((ratio / 10.0 - 1.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn kappa_magnitude_shrinks_as_visibility_drops() {
    let p = make_pentagram();
    for order in Order::BOTH {
        let mut last = f64::INFINITY;
        for k in (0..=20).rev() {
            let v = k as f64 / 20.0;
            let noise = NoiseModel::new(v, 0.0, 0.0).unwrap();
            let magnitude = noisy_kcbs_value(*p.test_state(), p.cycle(), &noise, order).abs();
            assert!(magnitude <= last + 1e-12, "V={v}: {magnitude} > {last}");
            last = magnitude;
        }
    }
}

#[test]
fn leakage_decides_whether_w_can_exceed_the_quantum_bound() {
    let p = make_pentagram();
    for k in 0..=10 {
        let v = 0.8 + 0.02 * k as f64;
        let exclusive = NoiseModel::new(v, 0.0, 0.0).unwrap();
        assert!(noisy_wright_value(*p.test_state(), p.cycle(), &exclusive) <= sqrt5() + 1e-9);
        let leaky = NoiseModel::new(v, 0.0125, 0.0).unwrap();
        assert!(noisy_wright_value(*p.test_state(), p.cycle(), &leaky) > sqrt5());
    }
}

#[test]
fn noisy_runs_with_large_leakage_break_exclusivity() {
    let mut cfg = ExperimentConfig::new(Experiment::Kcbs, 6);
    cfg.noise = NoiseModel::new(1.0, 0.06, 0.0).unwrap();
    cfg.plan = ShotPlan::new(100_000, 6, 1).unwrap();
    let r = run_experiment(&Source::pentagram(), &cfg).unwrap();
    // both-yes arrivals show up in the last slot
    assert!(r.counts.rows.iter().all(|row| row.counts[3] > 0));
}

#[test]
fn ideal_orders_agree_and_wright_is_certified() {
    let mut cfg = ExperimentConfig::new(Experiment::Kcbs, 7);
    cfg.plan = ShotPlan::new(1_000_000, 7, 1).unwrap();
    let r = run_experiment(&Source::pentagram(), &cfg).unwrap();
    let f = r.kcbs_for(Order::Forward).unwrap().kappa;
    let b = r.kcbs_for(Order::Reverse).unwrap().kappa;
    assert!((f.value - b.value).abs() < 5.0 * f.sigma.hypot(b.sigma));
    assert!((f.value - KAPPA0).abs() < 0.02);

    let mut cfg = ExperimentConfig::new(Experiment::Wright, 7);
    cfg.plan = ShotPlan::new(1_000_000, 7, 1).unwrap();
    let r = run_experiment(&Source::pentagram(), &cfg).unwrap();
    assert!(r.verdicts[0].significance > 50.0, "{:?}", r.verdicts);
}

fn random_classical<R: Rng>(rng: &mut R) -> ClassicalStrategy {
    let admissible: Vec<u8> = (0u8..32)
        .filter(|m| (0..CYCLE_LEN).all(|i| !(m >> i & 1 == 1 && m >> next_index(i) & 1 == 1)))
        .collect();
    let mut answer_sets = [0u8; CYCLE_LEN];
    for s in 0..CYCLE_LEN {
        let mask = admissible[rng.random_range(0..admissible.len())];
        for (q, set) in answer_sets.iter_mut().enumerate() {
            if mask >> q & 1 == 1 {
                *set |= 1 << s;
            }
        }
    }
    let w: [f64; CYCLE_LEN] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
    let total: f64 = w.iter().sum();
    let mut weights = w.map(|x| x / total);
    weights[0] -= weights.iter().sum::<f64>() - 1.0;
    ClassicalStrategy::new(answer_sets, weights).unwrap()
}

#[test]
fn classical_sources_never_violate_beyond_fluctuation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for k in 0..1000u64 {
        let strategy = random_classical(&mut rng);
        assert!(classical_strategy_kcbs(&strategy).kappa >= -3.0 - 1e-12);
        let source = Source::Classical(strategy);
        for experiment in [Experiment::Wright, Experiment::Kcbs] {
            let mut cfg = ExperimentConfig::new(experiment, k);
            cfg.plan = ShotPlan::new(2_000, k, 1).unwrap();
            let r = run_experiment(&source, &cfg).unwrap();
            for v in &r.verdicts {
                assert!(v.significance < 3.0, "strategy {k}: {v:?}");
            }
        }
    }
}

#[test]
fn seeded_runs_are_bit_identical() {
    let mut cfg = ExperimentConfig::new(Experiment::Wright, 99);
    cfg.noise = NoiseModel::new(0.85, 0.0125, 0.004).unwrap();
    let a = run_experiment(&Source::pentagram(), &cfg).unwrap();
    let b = run_experiment(&Source::pentagram(), &cfg).unwrap();
    assert_eq!(a.counts, b.counts);
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.counts.rows.len(), 5 * cfg.plan.samples);
    assert!(a
        .counts
        .rows
        .iter()
        .all(|r| r.total() == cfg.plan.shots_per_setting));
}

#[test]
fn drift_spreads_the_samples() {
    let mut cfg = ExperimentConfig::new(Experiment::Wright, 12);
    cfg.noise = NoiseModel::new(0.85, 0.0125, 0.02).unwrap();
    let w = run_experiment(&Source::pentagram(), &cfg)
        .unwrap()
        .wright
        .unwrap()
        .total;
    let sample = w.sample_sigma.unwrap();
    assert!(sample > 0.0);
    assert!((w.sigma - w.poisson_sigma.hypot(sample)).abs() < 1e-15);
    let _ = common::random_state(&mut ChaCha8Rng::seed_from_u64(0));
}
