//! The canonical permutation trellis `T_n` and the permanent as its flow.
//!
//! Level `j` of `T_n` holds the `j`-subsets of `[n]`; the edge `u -> u + {i}`
//! carries symbol `i`, and after relabeling the entry `a_ij` where `j` is the
//! level it enters. Each root-to-toor path spells one permutation, so the
//! flow at the toor is `per(A)`.
//!
//! The flow itself never materializes the edge list. Subsets are bitmasks,
//! each level is indexed by colexicographic rank, and predecessors are found
//! by clearing one bit.

use rayon::prelude::*;

use crate::bounds::{check_max, check_min, BITMASK_MAX_N, TRELLIS_MAX_N};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::semiring::{Field, OpCounter, Semiring};
use crate::trellis::{FlowOptions, FlowResult, Symbol, Trellis, TrellisBuilder};

/// A subset of `[n]` stored as a bitmask; bit `i - 1` stands for element `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetVertex(pub u64);

impl SubsetVertex {
    pub fn level(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(self) -> Vec<usize> {
        bits(self.0).map(|b| b + 1).collect()
    }

    pub fn contains(self, element: usize) -> bool {
        element >= 1 && self.0 >> (element - 1) & 1 == 1
    }

    pub fn tag(self) -> String {
        let parts: Vec<String> = self.elements().iter().map(usize::to_string).collect();
        format!("{{{}}}", parts.join(","))
    }
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

/// Binomial coefficients `C(p, k)` for `p, k <= n`.
#[derive(Clone, Debug)]
pub(crate) struct BinomialTable {
    rows: Vec<Vec<u64>>,
}

impl BinomialTable {
    pub(crate) fn new(n: usize) -> Self {
        let mut rows = vec![vec![0u64; n + 2]; n + 2];
        for p in 0..=n + 1 {
            rows[p][0] = 1;
            for k in 1..=p {
                rows[p][k] = rows[p - 1][k - 1].saturating_add(if k < p { rows[p - 1][k] } else { 0 });
            }
        }
        BinomialTable { rows }
    }

    pub(crate) fn get(&self, p: usize, k: usize) -> u64 {
        if k > p {
            0
        } else {
            self.rows[p][k]
        }
    }

    /// Position of `mask` among the masks of equal popcount in increasing
    /// numeric order.
    pub(crate) fn colex_rank(&self, mask: u64) -> usize {
        bits(mask).enumerate().map(|(i, p)| self.get(p, i + 1) as usize).sum()
    }
}

/// All `n`-bit masks with `k` bits set, in increasing order.
pub(crate) fn masks_of_weight(n: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    if k > n {
        return Vec::new();
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut m = (1u64 << k) - 1;
    while m < limit {
        out.push(m);
        // next mask with the same popcount
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

fn check_bitmask(n: usize) -> Result<()> {
    if n > BITMASK_MAX_N {
        return Err(Error::TooLarge {
            what: "subset bitmask",
            n,
            max: BITMASK_MAX_N,
        });
    }
    Ok(())
}

/// Materializes `T_n` over the alphabet `[n]`. Vertices in each level are
/// ordered by colexicographic rank of their subsets.
pub fn build_canonical(n: usize) -> Result<Trellis<Symbol>> {
    check_min("canonical trellis", n, 1)?;
    check_bitmask(n)?;
    let binom = BinomialTable::new(n);
    let mut b = TrellisBuilder::new().alphabet(n);
    for j in 0..=n {
        b.add_level();
        for mask in masks_of_weight(n, j) {
            let to = b.add_vertex(j, Some(SubsetVertex(mask).tag()));
            for i in bits(mask) {
                b.add_edge(j, binom.colex_rank(mask ^ (1 << i)), to, i as Symbol + 1)?;
            }
        }
    }
    b.build()
}

/// Replaces symbol `i` on an edge entering level `j` by `a_ij`.
pub fn relabel_with_matrix<T: Clone>(t: &Trellis<Symbol>, a: &Matrix<T>) -> Result<Trellis<T>> {
    let n = a.n();
    if t.length() != n {
        return Err(Error::Dimension(format!(
            "trellis length {} does not match matrix dimension {n}",
            t.length()
        )));
    }
    t.try_map_labels(|j, &s| {
        if s == 0 || s as usize > n {
            return Err(Error::SymbolOutOfRange { symbol: s, size: n });
        }
        Ok(a.get(s as usize - 1, j - 1).clone())
    })
    .map(|r| r.with_alphabet(None))
}

/// Label of an implicit edge during the subset flow.
enum Weight<'a, T> {
    Value(&'a T),
    /// Known to be the multiplicative identity; no multiplication is spent.
    One,
    /// Known to be zero; the edge is skipped.
    Absent,
}

fn subset_vertex_flow<'a, T: Semiring + 'a>(
    v: u64,
    column: usize,
    binom: &BinomialTable,
    prev: &[T],
    weight: &impl Fn(usize, usize) -> Weight<'a, T>,
    ctr: &mut OpCounter,
) -> T {
    let from_root = column == 0;
    let mut acc: Option<T> = None;
    for i in bits(v) {
        let term = match weight(i, column) {
            Weight::Absent => continue,
            Weight::One if from_root => T::one(),
            Weight::One => prev[binom.colex_rank(v ^ (1 << i))].clone(),
            Weight::Value(x) if from_root => x.clone(),
            Weight::Value(x) => ctr.times(x, &prev[binom.colex_rank(v ^ (1 << i))]),
        };
        acc = Some(match acc {
            None => term,
            Some(a) => ctr.plus(&a, &term),
        });
    }
    acc.unwrap_or_else(T::zero)
}

fn subset_flow<'a, T: Semiring + 'a>(
    n: usize,
    weight: impl Fn(usize, usize) -> Weight<'a, T> + Sync,
    opts: FlowOptions,
) -> (T, OpCounter) {
    let binom = BinomialTable::new(n);
    let mut prev = vec![T::one()];
    let mut counter = OpCounter::new();
    for j in 1..=n {
        let masks = masks_of_weight(n, j);
        let column = j - 1;
        let next: Vec<T> = if opts.parallel {
            let results: Vec<(T, OpCounter)> = masks
                .par_iter()
                .map(|&v| {
                    let mut ctr = OpCounter::new();
                    let x = subset_vertex_flow(v, column, &binom, &prev, &weight, &mut ctr);
                    (x, ctr)
                })
                .collect();
            counter += results.iter().map(|(_, c)| *c).sum();
            results.into_iter().map(|(x, _)| x).collect()
        } else {
            masks
                .iter()
                .map(|&v| subset_vertex_flow(v, column, &binom, &prev, &weight, &mut counter))
                .collect()
        };
        prev = next;
    }
    (prev.pop().unwrap_or_else(T::zero), counter)
}

fn peak_width(n: usize) -> usize {
    BinomialTable::new(n).get(n, n / 2) as usize
}

pub fn permanent_trellis<T: Semiring>(a: &Matrix<T>) -> Result<FlowResult<T>> {
    permanent_trellis_with(a, FlowOptions::default())
}

/// `per(A)` as the toor flow of `T_n(A)`, using `n 2^(n-1) - n`
/// multiplications and `(n - 2) 2^(n-1) + 1` additions.
pub fn permanent_trellis_with<T: Semiring>(a: &Matrix<T>, opts: FlowOptions) -> Result<FlowResult<T>> {
    let n = a.n();
    check_min("trellis permanent", n, 1)?;
    check_bitmask(n)?;
    check_max("trellis permanent", n, TRELLIS_MAX_N)?;
    let (value, counter) = subset_flow(n, |i, j| Weight::Value(a.get(i, j)), opts);
    Ok(FlowResult {
        value,
        counter,
        peak_width: peak_width(n),
        diagnostics: Vec::new(),
    })
}

/// Default normalization column, 1-based.
pub fn default_normalization_column(n: usize) -> usize {
    n / 2 + 1
}

/// `A|_t`: rows with `a_it != 0` divided by `a_it`, others unchanged.
/// Returns the normalized matrix and the nonzero pivots `a_it` in row order.
/// Each division off column `t` is counted as a multiplication.
pub fn normalize_column<T: Field>(a: &Matrix<T>, t: usize, ctr: &mut OpCounter) -> Result<(Matrix<T>, Vec<T>)> {
    let n = a.n();
    if t == 0 || t > n {
        return Err(Error::invalid(format!("normalization column {t} is outside [1, {n}]")));
    }
    let c = t - 1;
    let mut rows = Vec::with_capacity(n);
    let mut pivots = Vec::new();
    for i in 0..n {
        let pivot = a.get(i, c);
        if pivot.is_zero() {
            rows.push(a.row(i).to_vec());
            continue;
        }
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(if j == c {
                T::one()
            } else {
                ctr.divide(a.get(i, j), pivot)?
            });
        }
        rows.push(row);
        pivots.push(pivot.clone());
    }
    Ok((Matrix::from_rows(rows)?, pivots))
}

pub fn permanent_trellis_normalized<T: Field>(a: &Matrix<T>, column: Option<usize>) -> Result<FlowResult<T>> {
    permanent_trellis_normalized_with(a, column, FlowOptions::default())
}

/// `per(A)` through the column-normalized matrix `A|_t`. Edges entering
/// level `t` carry 1 (or a structural 0 for rows with `a_it = 0`) and cost
/// no multiplication. With no zero in column `t` the count is
/// `n 2^(n-1) - (n - t + 1) C(n, t - 1) + n^2 - n` multiplications.
pub fn permanent_trellis_normalized_with<T: Field>(
    a: &Matrix<T>,
    column: Option<usize>,
    opts: FlowOptions,
) -> Result<FlowResult<T>> {
    let n = a.n();
    check_min("trellis permanent", n, 1)?;
    check_bitmask(n)?;
    check_max("trellis permanent", n, TRELLIS_MAX_N)?;
    let t = column.unwrap_or_else(|| default_normalization_column(n));
    let mut counter = OpCounter::new();
    let (b, pivots) = normalize_column(a, t, &mut counter)?;
    let zero_rows: Vec<bool> = (0..n).map(|i| a.get(i, t - 1).is_zero()).collect();
    let (flow, ctr) = subset_flow(
        n,
        |i, j| {
            if j == t - 1 {
                if zero_rows[i] {
                    Weight::Absent
                } else {
                    Weight::One
                }
            } else {
                Weight::Value(b.get(i, j))
            }
        },
        opts,
    );
    counter += ctr;
    let mut value = flow;
    if pivots.is_empty() {
        value = T::zero();
    } else {
        let mut product = pivots[0].clone();
        for p in &pivots[1..] {
            product = counter.times(&product, p);
        }
        value = counter.times(&product, &value);
    }
    Ok(FlowResult {
        value,
        counter,
        peak_width: peak_width(n),
        diagnostics: Vec::new(),
    })
}

/// The unmerged permutation trellis: a tree whose level `j < n` holds the
/// ordered `j`-prefixes of permutations of `[n]`, all of whose leaves meet
/// at a single toor.
pub fn build_permutation_tree(n: usize) -> Result<Trellis<Symbol>> {
    check_min("permutation tree", n, 1)?;
    check_max("permutation tree", n, 8)?;
    let mut b = TrellisBuilder::new().alphabet(n);
    b.add_level();
    b.add_vertex(0, Some(String::new()));
    let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
    for j in 1..=n {
        b.add_level();
        if j == n {
            let toor = b.add_vertex(j, Some((1..=n).map(|i| i.to_string()).collect::<Vec<_>>().join("")));
            for (from, p) in prefixes.iter().enumerate() {
                let last = (1..=n).find(|i| !p.contains(i)).expect("one symbol remains");
                b.add_edge(j, from, toor, last as Symbol)?;
            }
            break;
        }
        let mut next = Vec::new();
        for (from, p) in prefixes.iter().enumerate() {
            for i in (1..=n).filter(|i| !p.contains(i)) {
                let mut q = p.clone();
                q.push(i);
                let tag = q.iter().map(usize::to_string).collect::<Vec<_>>().join("");
                let to = b.add_vertex(j, Some(tag));
                b.add_edge(j, from, to, i as Symbol)?;
                next.push(q);
            }
        }
        prefixes = next;
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::trellis::viterbi_flow;

    fn ints(rows: &[Vec<i64>]) -> Matrix<BigRational> {
        Matrix::from_ints(rows).unwrap()
    }

    #[test]
    fn gosper_enumeration_matches_colex_rank() {
        let binom = BinomialTable::new(8);
        for k in 0..=8 {
            let masks = masks_of_weight(8, k);
            assert_eq!(masks.len() as u64, binom.get(8, k));
            for (r, &m) in masks.iter().enumerate() {
                assert_eq!(binom.colex_rank(m), r);
                assert_eq!(m.count_ones() as usize, k);
            }
        }
    }

    #[test]
    fn canonical_sizes() {
        for n in 1..=8 {
            let t = build_canonical(n).unwrap();
            assert_eq!(t.vertex_count(), 1 << n);
            assert_eq!(t.edge_count(), n << (n - 1));
        }
        let t1 = build_canonical(1).unwrap();
        assert_eq!(t1.level_sizes(), vec![1, 1]);
        assert_eq!(t1.incoming(crate::VertexId::new(1, 0))[0].label, 1);
        assert!(build_canonical(0).is_err());
        assert!(matches!(build_canonical(63), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn two_by_two_relabeling() {
        let t = build_canonical(2).unwrap();
        let a = ints(&[vec![1, 2], vec![3, 4]]);
        let ta = relabel_with_matrix(&t, &a).unwrap();
        let level1: Vec<_> = ta.edges_at(1).map(|(_, _, l)| l.clone()).collect();
        assert_eq!(
            level1,
            vec![BigRational::from_integer(1.into()), BigRational::from_integer(3.into())]
        );
        let level2: Vec<_> = ta.edges_at(2).map(|(_, _, l)| l.clone()).collect();
        // edge from {2} adds row 1 (a_12 = 2), from {1} adds row 2 (a_22 = 4)
        assert_eq!(
            level2,
            vec![BigRational::from_integer(2.into()), BigRational::from_integer(4.into())]
        );
        assert_eq!(viterbi_flow(&ta).unwrap().value, BigRational::from_integer(10.into()));
    }

    #[test]
    fn implicit_flow_matches_materialized() {
        let a = ints(&[vec![1, 2, 0, 1], vec![3, 4, 5, -1], vec![2, 2, 7, 1], vec![0, 1, 1, 3]]);
        let implicit = permanent_trellis(&a).unwrap();
        let explicit = viterbi_flow(&relabel_with_matrix(&build_canonical(4).unwrap(), &a).unwrap()).unwrap();
        assert_eq!(implicit.value, explicit.value);
        assert_eq!(implicit.counter, explicit.counter);
        let par = permanent_trellis_with(&a, FlowOptions { parallel: true }).unwrap();
        assert_eq!(par.value, implicit.value);
        assert_eq!(par.counter, implicit.counter);
    }

    #[test]
    fn normalized_handles_zero_pivots() {
        let a = ints(&[vec![1, 0, 2], vec![3, 0, 1], vec![1, 1, 1]]);
        let plain = permanent_trellis(&a).unwrap().value;
        assert_eq!(permanent_trellis_normalized(&a, Some(2)).unwrap().value, plain);
        let zero_col = ints(&[vec![1, 0], vec![3, 0]]);
        assert_eq!(
            permanent_trellis_normalized(&zero_col, Some(2)).unwrap().value,
            BigRational::from_integer(0.into())
        );
        assert!(permanent_trellis_normalized(&a, Some(4)).is_err());
    }

    #[test]
    fn permutation_tree_shape() {
        let t = build_permutation_tree(3).unwrap();
        assert_eq!(t.level_sizes(), vec![1, 3, 6, 1]);
        assert_eq!(t.find_tag(2, "21").map(|v| v.level), Some(2));
    }
}
