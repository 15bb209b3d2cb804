mod common;

use itertools::Itertools;
use num_rational::BigRational;
use permatrellis::oracles::permanent_naive;
use permatrellis::scalar::{ln_abs_rational, ratio};
use permatrellis::semiring::binomial;
use permatrellis::sparse::{
    build_sparse_trellis, estimate_phi_u, expected_vertices_u, permanent_sparse, phi_t, presence_submatrix,
    prob_event_b, prob_event_c, random_sparse_matrix, sparse_benchmark, SparseModel,
};
use permatrellis::{Matrix, Semiring};
use proptest::prelude::*;
use rand::Rng;

fn subsets_present(a: &Matrix<BigRational>) -> Vec<u64> {
    build_sparse_trellis(a, false).unwrap().masks.concat()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn sparse_permanent_matches_expansion(seed in any::<u64>(), n in 3usize..=7) {
        let m = SparseModel::new(n, ratio(2, 1), seed).unwrap();
        let a = random_sparse_matrix(&m);
        prop_assert_eq!(permanent_sparse(&a).unwrap().value, permanent_naive(&a).unwrap());
    }

    #[test]
    fn vertex_present_iff_prefix_permanent_nonzero(seed in any::<u64>(), n in 3usize..=6) {
        let a = random_sparse_matrix(&SparseModel::new(n, ratio(2, 1), seed).unwrap());
        let present = subsets_present(&a);
        for mask in 1u64..(1 << n) {
            let per = permanent_naive(&presence_submatrix(&a, mask).unwrap()).unwrap();
            prop_assert_eq!(present.contains(&mask), !per.is_zero(), "subset {:b}", mask);
        }
    }

    #[test]
    fn signed_entries_keep_every_nonzero_prefix(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = common::rng(seed);
        let a = Matrix::from_fn(n, |_, _| if r.gen_bool(0.5) { ratio(r.gen_range(-2..=2), 1) } else { ratio(0, 1) });
        let present = subsets_present(&a);
        for mask in 1u64..(1 << n) {
            if !permanent_naive(&presence_submatrix(&a, mask).unwrap()).unwrap().is_zero() {
                prop_assert!(present.contains(&mask));
            }
        }
        prop_assert_eq!(permanent_sparse(&a).unwrap().value, permanent_naive(&a).unwrap());
    }

    #[test]
    fn pruning_only_removes_dead_vertices(seed in any::<u64>(), n in 2usize..=8) {
        let a = random_sparse_matrix(&SparseModel::new(n, ratio(3, 2), seed).unwrap());
        let full = build_sparse_trellis(&a, false).unwrap();
        let pruned = build_sparse_trellis(&a, true).unwrap();
        prop_assert!(pruned.trellis.vertex_count() <= full.trellis.vertex_count());
        for (j, level) in pruned.masks.iter().enumerate() {
            prop_assert!(level.iter().all(|m| full.masks[j].contains(m)));
        }
    }
}

/// Probabilities of the events A (nonzero permanent), B (no zero row or
/// column) and C (no zero column) over all `j x j` supports.
fn event_frequencies(j: usize, q: &BigRational) -> [BigRational; 3] {
    let p = ratio(1, 1) - q;
    let mut out = [ratio(0, 1), ratio(0, 1), ratio(0, 1)];
    for bits in 0u32..(1 << (j * j)) {
        let a = Matrix::from_fn(j, |r, c| ratio(i64::from(bits >> (r * j + c) & 1), 1));
        let nnz = bits.count_ones() as usize;
        let weight = num_traits::pow(p.clone(), nnz) * num_traits::pow(q.clone(), j * j - nnz);
        let rows_ok = (0..j).all(|r| a.row(r).iter().any(|x| !x.is_zero()));
        let cols_ok = (0..j).all(|c| a.column(c).any(|x| !x.is_zero()));
        if !permanent_naive(&a).unwrap().is_zero() {
            out[0] += &weight;
        }
        if rows_ok && cols_ok {
            out[1] += &weight;
        }
        if cols_ok {
            out[2] += &weight;
        }
    }
    out
}

#[test]
fn event_closed_forms_match_enumeration() {
    for q in [ratio(1, 2), ratio(2, 3), ratio(1, 5)] {
        for j in 1..=3 {
            let [a, b, c] = event_frequencies(j, &q);
            assert_eq!(b, prob_event_b(j, &q), "B_{j}");
            assert_eq!(c, prob_event_c(j, &q), "C_{j}");
            assert!(a <= b && b <= c);
        }
    }
}

#[test]
fn u_of_two_by_enumerating_supports() {
    // 1 for the root plus, for each nonempty row set v, the chance that the
    // |v| x |v| block on rows v and the first |v| columns has no zero line
    let q = ratio(1, 2);
    let mut expected = ratio(1, 1);
    for j in 1..=2usize {
        expected += BigRational::from_integer(binomial(2, j)) * event_frequencies(j, &q)[1].clone();
    }
    assert_eq!(expected, ratio(39, 16));
    assert_eq!(expected_vertices_u(2, &ratio(1, 1)).unwrap(), expected);
    assert_eq!(expected_vertices_u(1, &ratio(1, 3)).unwrap(), ratio(4, 3));
}

#[test]
fn u_is_below_the_exponential_bound() {
    for d in 1..=4u32 {
        for n in (d as usize + 1)..=30 {
            let u = expected_vertices_u(n, &ratio(d.into(), 1)).unwrap();
            assert!(
                ln_abs_rational(&u).1 <= n as f64 * phi_t(d.into()).ln() + 1e-9,
                "n = {n}, d = {d}"
            );
        }
    }
    let est = estimate_phi_u(2, &[10, 20, 40]).unwrap();
    assert!(est.roots.iter().all(|&(_, r)| r <= phi_t(2.0)));
    assert!(est.roots.windows(2).all(|w| w[0].1 >= w[1].1));
}

#[test]
fn density_matches_the_model() {
    let m = SparseModel::new(100, ratio(3, 1), 11).unwrap();
    for trial in 0..100 {
        let a = random_sparse_matrix(&m.with_seed(trial));
        let nnz = a
            .rows()
            .map(|r| r.iter().filter(|x| !x.is_zero()).count())
            .sum::<usize>();
        let mean = nnz as f64 / 100.0;
        assert!((mean - 3.0).abs() < 0.6, "trial {trial}: mean {mean}");
        assert!(a
            .rows()
            .flatten()
            .all(|x| x.is_zero() || (*x >= ratio(1, 1) && *x <= ratio(16, 1))));
    }
}

#[test]
fn nearly_dense_model_gives_the_full_lattice() {
    let m = SparseModel::new(8, ratio(7999, 1000), 1).unwrap();
    let a = random_sparse_matrix(&m);
    assert!(a.rows().flatten().all(|x| !x.is_zero()));
    assert_eq!(build_sparse_trellis(&a, false).unwrap().trellis.vertex_count(), 256);
}

#[test]
fn permutation_support_leaves_one_path() {
    let perm = [3usize, 0, 4, 1, 2];
    let a = Matrix::from_fn(5, |i, j| {
        if perm[i] == j {
            ratio(i as i64 + 2, 1)
        } else {
            ratio(0, 1)
        }
    });
    let st = build_sparse_trellis(&a, true).unwrap();
    assert_eq!(st.trellis.level_sizes(), vec![1; 6]);
    assert_eq!(permanent_sparse(&a).unwrap().value, ratio(2 * 3 * 4 * 5 * 6, 1));
}

#[test]
fn mean_size_is_within_the_expected_bound() {
    let m = SparseModel::new(14, ratio(3, 1), 100).unwrap();
    let r = sparse_benchmark(&m, 100).unwrap();
    assert!(r.mean_vertices <= r.expected_vertices_u + 3.0 * r.se_vertices);
    assert!(r.mean_mults <= r.mults_bound + 3.0 * r.se_mults);
}

#[test]
fn all_subset_sizes_appear_in_a_dense_block() {
    let a = Matrix::<BigRational>::ones(4);
    let masks = build_sparse_trellis(&a, true).unwrap().masks;
    for (j, level) in masks.iter().enumerate() {
        let want: Vec<u64> = (0..4u64)
            .combinations(j)
            .map(|c| c.iter().map(|b| 1u64 << b).sum())
            .collect();
        assert_eq!(
            level.iter().copied().sorted().collect::<Vec<_>>(),
            want.into_iter().sorted().collect::<Vec<_>>()
        );
    }
}
