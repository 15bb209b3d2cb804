mod common;

use num_rational::BigRational;
use permatrellis::scalar::ratio;
use permatrellis::trellis::{
    enumerate_paths, future, merge_step, past, viterbi_all_levels, viterbi_best_path, viterbi_flow, PathMultiset,
    DEFAULT_PATH_CAP,
};
use permatrellis::{Symbol, Trellis, Tropical, VertexId};
use proptest::prelude::*;

fn weight(level: usize, s: Symbol) -> BigRational {
    ratio(s as i64 * 3 - level as i64, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flow_is_the_evaluated_path_multiset(seed in any::<u64>(), len in 1usize..6, width in 1usize..4) {
        let t = common::random_trellis(seed, len, width, 3);
        let code = enumerate_paths(&t, DEFAULT_PATH_CAP).unwrap();
        let labeled = t.map_labels(|j, &s| weight(j, s));
        prop_assert_eq!(viterbi_flow(&labeled).unwrap().value, code.evaluate(weight));
    }

    #[test]
    fn measures_equal_counts_on_trimmed_trellises(seed in any::<u64>(), len in 1usize..6, width in 1usize..4) {
        let (t, _) = common::random_trellis(seed, len, width, 3).trim();
        prop_assume!(t.level_size(0) == 1);
        let labeled = t.map_labels(|j, &s| weight(j, s));
        let f = viterbi_flow(&labeled).unwrap();
        let cm = t.complexity_measures();
        prop_assert_eq!((f.counter.mults, f.counter.adds), (cm.mults, cm.adds));
        prop_assert!(f.diagnostics.is_empty());
    }

    #[test]
    fn past_times_future_covers_each_level(seed in any::<u64>(), len in 2usize..6, width in 1usize..4) {
        let (t, _) = common::random_trellis(seed, len, width, 3).trim();
        prop_assume!(t.level_size(0) == 1);
        let code = enumerate_paths(&t, DEFAULT_PATH_CAP).unwrap();
        for j in 0..=t.length() {
            let mut sum = PathMultiset::new();
            for v in 0..t.level_size(j) {
                let v = VertexId::new(j, v);
                sum = sum.plus(&past(&t, v, DEFAULT_PATH_CAP).unwrap().concat(&future(&t, v, DEFAULT_PATH_CAP).unwrap()));
            }
            prop_assert_eq!(&sum, &code);
        }
    }

    #[test]
    fn each_merge_preserves_the_code(seed in any::<u64>(), len in 2usize..5, width in 1usize..4) {
        let (t, _) = common::random_trellis(seed, len, width, 2).trim();
        prop_assume!(t.level_size(0) == 1);
        let code = enumerate_paths(&t, DEFAULT_PATH_CAP).unwrap();
        let mut current = t.to_combinations();
        for _ in 0..4 {
            match merge_step(&current, DEFAULT_PATH_CAP).unwrap() {
                Some((next, _, _)) => {
                    prop_assert_eq!(&enumerate_paths(&next, DEFAULT_PATH_CAP).unwrap(), &code);
                    current = next;
                }
                None => break,
            }
        }
    }

    #[test]
    fn min_plus_path_is_the_cheapest_word(seed in any::<u64>(), len in 1usize..6, width in 1usize..4) {
        let t = common::random_trellis(seed, len, width, 4);
        let code = enumerate_paths(&t, DEFAULT_PATH_CAP).unwrap();
        let trop = t.map_labels(|j, &s| Tropical(f64::from(s) * j as f64));
        let (best, path) = viterbi_best_path(&trop).unwrap();
        let cheapest = code
            .words()
            .map(|w| w.iter().enumerate().map(|(i, &s)| f64::from(s) * (i + 1) as f64).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        prop_assert_eq!(best.value.0, cheapest);
        prop_assert_eq!(path.is_some(), !code.is_empty());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), len in 1usize..6, width in 1usize..4) {
        let t = common::random_trellis(seed, len, width, 3);
        prop_assert_eq!(Trellis::<Symbol>::from_json_str(&t.to_json_string()).unwrap(), t.clone());
        let q = t.map_labels(|j, &s| weight(j, s));
        prop_assert_eq!(Trellis::<BigRational>::from_json_str(&q.to_json_string()).unwrap(), q);
    }

    #[test]
    fn all_level_flows_end_at_the_toor(seed in any::<u64>(), len in 1usize..6, width in 1usize..4) {
        let t = common::random_trellis(seed, len, width, 3).map_labels(|j, &s| weight(j, s));
        let (levels, ctr) = viterbi_all_levels(&t).unwrap();
        let f = viterbi_flow(&t).unwrap();
        prop_assert_eq!(&levels[len][0], &f.value);
        prop_assert_eq!(ctr, f.counter);
    }
}
