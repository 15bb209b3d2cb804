mod common;

use num_rational::BigRational;
use permatrellis::canonical::{
    build_canonical, default_normalization_column, permanent_trellis, permanent_trellis_normalized, relabel_with_matrix,
};
use permatrellis::oracles::{formulas, permanent_naive, Method};
use permatrellis::scalar::ratio;
use permatrellis::trellis::viterbi_flow;
use permatrellis::Matrix;
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=3).prop_map(|(p, q)| ratio(p, q))
}

fn matrix(max_n: usize) -> impl Strategy<Value = Matrix<BigRational>> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(entry(), n), n)
            .prop_map(|rows| Matrix::from_rows(rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn every_method_agrees_with_expansion(a in matrix(6)) {
        let want = permanent_naive(&a).unwrap();
        for m in Method::ALL {
            prop_assert_eq!(&m.run(&a).unwrap().0, &want, "{}", m.name());
        }
    }

    #[test]
    fn materialized_trellis_counts_match_measures(a in matrix(6)) {
        let t = relabel_with_matrix(&build_canonical(a.n()).unwrap(), &a).unwrap();
        let f = viterbi_flow(&t).unwrap();
        let cm = t.complexity_measures();
        prop_assert_eq!(f.counter.mults, cm.mults);
        prop_assert_eq!(f.counter.adds, cm.adds);
        prop_assert_eq!(t.peak_width() as u64, cm.space);
        prop_assert_eq!(f.value, permanent_trellis(&a).unwrap().value);
    }

    #[test]
    fn any_normalization_column_gives_the_permanent(a in matrix(6), c in 0usize..6) {
        let col = c % a.n() + 1;
        let want = permanent_naive(&a).unwrap();
        prop_assert_eq!(permanent_trellis_normalized(&a, Some(col)).unwrap().value, want);
    }

    #[test]
    fn scaling_a_row_scales_the_permanent(a in matrix(5), k in entry(), row in 0usize..5) {
        let row = row % a.n();
        let scaled = Matrix::from_fn(a.n(), |i, j| if i == row { a.get(i, j) * &k } else { a.get(i, j).clone() });
        let base = permanent_trellis(&a).unwrap().value;
        prop_assert_eq!(permanent_trellis(&scaled).unwrap().value, base * k);
    }

    #[test]
    fn transpose_preserves_the_permanent(a in matrix(6)) {
        prop_assert_eq!(permanent_trellis(&a.transpose()).unwrap().value, permanent_trellis(&a).unwrap().value);
    }
}

#[test]
fn counts_do_not_depend_on_values() {
    for n in 2..=9usize {
        let ones = Matrix::<f64>::ones(n);
        let f = permanent_trellis(&ones).unwrap();
        assert_eq!(f.counter.mults as u128, formulas::trellis_mults(n as u32));
        assert_eq!(f.counter.adds as u128, formulas::trellis_adds(n as u32));
        let g = permanent_trellis_normalized(&ones, Some(default_normalization_column(n))).unwrap();
        assert_eq!(g.counter.mults as u128, formulas::normalized_mults(n as u32));
        assert_eq!(f.value, (1..=n).product::<usize>() as f64);
    }
}

#[test]
fn zero_pivots_skip_division() {
    let a: Matrix<BigRational> =
        Matrix::from_ints(&[vec![1, 2, 3, 0], vec![0, 1, 0, 2], vec![2, 2, 1, 1], vec![1, 0, 0, 3]]).unwrap();
    for col in 1..=4 {
        assert_eq!(
            permanent_trellis_normalized(&a, Some(col)).unwrap().value,
            permanent_naive(&a).unwrap()
        );
    }
}
