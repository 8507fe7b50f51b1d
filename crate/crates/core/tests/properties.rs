mod common;

use cfmimo::scenario::ParamRange;
use cfmimo::search::CombinationSet;
use cfmimo::{BccMode, BeamAssignment, NetworkConfig, SearchSettings};
use common::Instance;
use proptest::prelude::*;

fn small_net() -> impl Strategy<Value = (usize, usize, usize, u64, u64)> {
    (1usize..=3, 1usize..=3, 2usize..=5, any::<u64>(), 0u64..1000).prop_filter("B >= K", |(_, k, b, _, _)| b >= k)
}

fn settings(pick: usize, bcc: BccMode) -> SearchSettings {
    match pick {
        0 => SearchSettings::disjoint(),
        1 => SearchSettings::linear(2, 2),
        2 => SearchSettings::semilinear(1, 2),
        3 => SearchSettings::linear_iis(1, 2),
        _ => SearchSettings::linear(1, 1).with_metric(cfmimo::Metric::Dl),
    }
    .with_bcc(bcc)
}

fn instance(l: usize, k: usize, b: usize, seed: u64, run: u64) -> Instance {
    let mut cfg = NetworkConfig::reference(l, k, b).with_seed(seed);
    cfg.shadow_sigma_db = ParamRange::Uniform([0.0, 8.0]);
    Instance::new(&cfg, run)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_bcc_is_always_conflict_free((l, k, b, seed, run) in small_net(), pick in 0usize..5) {
        let inst = instance(l, k, b, seed, run);
        let out = inst.run(&settings(pick, BccMode::Full));
        prop_assert!(out.assignment.is_conflict_free(None));
        out.assignment.validate(b).unwrap();
    }

    #[test]
    fn exhaustive_is_an_upper_bound((l, k, b, seed, run) in small_net(), pick in 0usize..5, full in any::<bool>()) {
        prop_assume!((b as f64).powi((k * l) as i32) <= 5000.0);
        let bcc = if full { BccMode::Full } else { BccMode::Off };
        let inst = instance(l, k, b, seed, run);
        let best = inst.run(&SearchSettings::exhaustive().with_bcc(bcc)).report.sum_rate;
        let got = inst.run(&settings(pick, bcc)).report.sum_rate;
        prop_assert!(best >= got, "{} > {}", got, best);
    }

    #[test]
    fn reports_are_consistent((l, k, b, seed, run) in small_net(), pick in 0usize..5) {
        let inst = instance(l, k, b, seed, run);
        let r = inst.run(&settings(pick, BccMode::Off)).report;
        prop_assert_eq!(r.rates.len(), k);
        for (s, rate) in r.sinr.iter().zip(&r.rates) {
            prop_assert!(*s >= 0.0);
            prop_assert_eq!(*rate, (1.0 + s).log2());
        }
        let total: f64 = r.rates.iter().sum();
        prop_assert!((total - r.sum_rate).abs() <= 1e-12 * total.max(1.0));
    }

    #[test]
    fn pruned_sets_never_reuse_committed_beams(b in 1usize..=6, k in 1usize..=3, pick in any::<prop::sample::Index>()) {
        prop_assume!(b >= k);
        let mut set = CombinationSet::distinct(b, k);
        let c = set.get(pick.index(set.len())).to_vec();
        set.prune(&c);
        for t in set.tuples() {
            prop_assert!((0..k).all(|i| (0..k).all(|j| t[i] != t[j] || i == j)));
            prop_assert!((0..k).all(|i| (0..k).all(|j| i == j || c[i] != t[j])));
        }
        prop_assert!(set.tuples().contains(&c));
    }

    #[test]
    fn conflict_free_means_no_shared_beams(idx in prop::collection::vec(0usize..4, 6)) {
        let a = BeamAssignment::from_indices(2, 3, idx.clone()).unwrap();
        let shared = (0..6).any(|x| (0..6).any(|y| x % 3 != y % 3 && idx[x] == idx[y]));
        prop_assert_eq!(a.is_conflict_free(None), !shared);
    }
}
