use num_complex::Complex64;
use proptest::prelude::*;

use reflectron::markov::{random_reversible_chain, variational_distance, Distribution};
use reflectron::ps::{tailed_distribution, AgentConfig, ClipNetwork, FlagSet, Subchain};
use reflectron::szegedy::{walk_operator, QuantumState, WalkSpec};
use reflectron::CostLedger;

fn distribution(n: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.01f64..10.0, n).prop_map(|w| Distribution::from_weights(&w).unwrap())
}

proptest! {
    #[test]
    fn h_stays_at_least_one(
        gamma in 0.0f64..=1.0,
        lambda in 0.01f64..5.0,
        steps in prop::collection::vec((0usize..3, 0usize..4, any::<bool>()), 1..200),
    ) {
        let cfg = AgentConfig { gamma, lambda, ..AgentConfig::default() };
        let mut net = ClipNetwork::uniform(3, 4, Subchain::ColumnConstant).unwrap();
        for (s, a, r) in steps {
            net = net.update_h(&[(s, a)], r, &cfg).unwrap();
            for s in 0..3 {
                prop_assert!(net.h_row(s).iter().all(|&h| h >= 1.0));
            }
        }
    }

    #[test]
    fn flags_never_empty(steps in prop::collection::vec((0usize..2, 0usize..5, any::<bool>()), 1..200)) {
        let mut flags = FlagSet::all(2, 5);
        for (s, pick, r) in steps {
            let set = flags.flagged(s);
            let a = set[pick % set.len()];
            flags = flags.flag_update(s, a, r).unwrap();
            prop_assert!(!flags.flagged(0).is_empty() && !flags.flagged(1).is_empty());
        }
    }

    #[test]
    fn tailed_is_normalized_on_flags(pi in distribution(6), mask in prop::collection::vec(any::<bool>(), 6)) {
        let mut flagged: Vec<usize> = (0..6).filter(|&i| mask[i]).collect();
        if flagged.is_empty() {
            flagged.push(0);
        }
        let t = tailed_distribution(&pi, &flagged).unwrap();
        prop_assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..6 {
            if !flagged.contains(&i) {
                prop_assert_eq!(t[i], 0.0);
            }
        }
    }

    #[test]
    fn tv_is_symmetric_and_bounded(a in distribution(5), b in distribution(5)) {
        let ab = variational_distance(&a, &b).unwrap();
        let ba = variational_distance(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!(variational_distance(&a, &a).unwrap() == 0.0);
    }

    #[test]
    fn state_bytes_round_trip(
        n in 1usize..4,
        k in 0u32..3,
        s in 0u32..3,
        seed in any::<u64>(),
    ) {
        let len = (n * n) << (k * s);
        let amps: Vec<Complex64> = (0..len)
            .map(|i| {
                let x = seed.wrapping_mul(i as u64 + 1).rotate_left(17);
                Complex64::new((x % 1000) as f64 / 997.0, (x >> 32) as f64 * 1e-9)
            })
            .collect();
        let st = QuantumState::from_amplitudes(n, k, s, amps).unwrap();
        prop_assert_eq!(QuantumState::from_bytes(&st.to_bytes()).unwrap(), st);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn walk_preserves_norm(n in 2usize..6, seed in 0u64..10_000, phases in prop::collection::vec(-1.0f64..1.0, 72)) {
        let p = random_reversible_chain(n, seed, None).unwrap();
        let spec = WalkSpec::new(&p).unwrap();
        let amps: Vec<Complex64> = (0..n * n).map(|i| Complex64::new(phases[2 * i], phases[2 * i + 1])).collect();
        let st = QuantumState::from_nodes(n, amps).unwrap();
        let mut ledger = CostLedger::new();
        let out = walk_operator(&spec, &st, &mut ledger).unwrap();
        prop_assert!((out.norm() - st.norm()).abs() < 1e-10 * st.norm().max(1.0));
        prop_assert_eq!(ledger.quantum_diffusion_calls, 4);
    }

    #[test]
    fn phase_gap_bound(n in 2usize..7, seed in 0u64..10_000) {
        let p = random_reversible_chain(n, seed, None).unwrap();
        let spec = WalkSpec::new(&p).unwrap();
        prop_assert!(spec.phase_gap() >= 2.0 * spec.delta().sqrt() - 1e-9);
        prop_assert!((spec.phase_gap() - 2.0 * (1.0 - spec.delta()).acos()).abs() < 1e-6);
    }
}
