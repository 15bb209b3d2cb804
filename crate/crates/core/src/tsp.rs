//! The traveling salesman problem as a min-sum flow.
//!
//! The tour trellis has vertices `(S, v)` with `S` a subset of `{2..n}` and
//! `v` in `S` the last city visited. It is the intersection of the subset
//! trellis over `{2..n}`, which forces every city to appear once, with the
//! walk trellis, which remembers the current city so that each edge can be
//! labeled with a distance. Min-plus Viterbi on it is the Held-Karp
//! recursion.

use itertools::Itertools;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{check_max, check_min, TSP_BRUTEFORCE_MAX_N, TSP_MAX_N};
use crate::canonical::{bits, masks_of_weight, BinomialTable, SubsetVertex};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::rational_to_f64;
use crate::semiring::{OpCounter, Tropical};
use crate::trellis::{fold_root_edge, intersect, Symbol, Trellis, TrellisBuilder};

/// Distances `d[i][j]` from city `i + 1` to city `j + 1`; zero diagonal,
/// nonnegative entries. Infinite entries mark missing roads.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if x.is_nan() || x < 0.0 {
                    return Err(Error::invalid(format!(
                        "distance d[{}][{}] = {x} is negative",
                        i + 1,
                        j + 1
                    )));
                }
                if i == j && x != 0.0 {
                    return Err(Error::invalid(format!(
                        "diagonal entry d[{0}][{0}] must be zero",
                        i + 1
                    )));
                }
                d.push(x);
            }
        }
        Ok(DistanceMatrix { n, d })
    }

    pub fn from_matrix(m: &Matrix<BigRational>) -> Result<Self> {
        DistanceMatrix::from_rows(m.rows().map(|r| r.iter().map(rational_to_f64).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance from city `i` to city `j`, both 1-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[(i - 1) * self.n + j - 1]
    }

    pub fn uniform(n: usize, x: f64) -> Result<Self> {
        DistanceMatrix::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { x }).collect())
                .collect(),
        )
    }

    /// Length of the closed tour `1, x_2, ..., x_n, 1` given as the full
    /// city sequence.
    pub fn tour_length(&self, tour: &[usize]) -> f64 {
        tour.windows(2).map(|w| self.get(w[0], w[1])).sum()
    }
}

/// Integer distances drawn uniformly from `1..=max`.
pub fn random_distances(n: usize, max: u32, symmetric: bool, seed: u64) -> DistanceMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0.0; n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in 0..n {
            if i == j || (symmetric && j < i) {
                continue;
            }
            let x = f64::from(rng.gen_range(1..=max));
            rows[i][j] = x;
            if symmetric {
                rows[j][i] = x;
            }
        }
    }
    DistanceMatrix::from_rows(rows).expect("generated distances are valid")
}

/// Vertex `(S, v)` of the tour trellis; `subset` uses bit `c - 1` for city
/// `c`. The toor is `(S, 1)` with `S` the full set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TspVertex {
    pub subset: u64,
    pub city: usize,
}

impl TspVertex {
    pub fn tag(self) -> String {
        format!("({},{})", SubsetVertex(self.subset).tag(), self.city)
    }
}

pub mod formulas {
    pub fn vertices(n: u32) -> u128 {
        (n as u128 - 1) * (1u128 << (n - 2)) + 2
    }

    pub fn edges(n: u32) -> u128 {
        (n as u128 - 1) * (n as u128 - 2) * (1u128 << (n - 3)) + 2 * (n as u128 - 1)
    }

    pub fn additions(n: u32) -> u128 {
        (n as u128 - 1) * (n as u128 - 2) * (1u128 << (n - 3)) + (n as u128 - 1)
    }

    pub fn comparisons(n: u32) -> u128 {
        let n = n as i128;
        ((n - 1) * (n - 4) * (1i128 << (n - 3)) + (2 * n - 3)) as u128
    }
}

fn check_n(n: usize) -> Result<()> {
    check_min("tsp trellis", n, 3)?;
    check_max("tsp trellis", n, TSP_MAX_N)
}

/// Compact masks over `{2..n}` use bit `b` for city `b + 2`.
fn city_mask(compact: u64) -> u64 {
    compact << 1
}

/// Walks `1, x_2, ..., x_n, 1` with every `x_i` in `{2..n}` and no city
/// repeated twice in a row. Length `n + 1`; vertex tags are cities and the
/// first edge, labeled 1, leaves a separate root.
pub fn build_walk_trellis(n: usize) -> Result<Trellis<Symbol>> {
    check_n(n)?;
    let mut b = TrellisBuilder::new().alphabet(n);
    b.add_level();
    b.add_vertex(0, Some("root".into()));
    b.add_level();
    b.add_vertex(1, Some("1".into()));
    b.add_edge(1, 0, 0, 1)?;
    for j in 2..=n {
        b.add_level();
        for c in 2..=n {
            b.add_vertex(j, Some(c.to_string()));
        }
        for c in 2..=n {
            if j == 2 {
                b.add_edge(j, 0, c - 2, c as Symbol)?;
            } else {
                for p in (2..=n).filter(|&p| p != c) {
                    b.add_edge(j, p - 2, c - 2, c as Symbol)?;
                }
            }
        }
    }
    b.add_level();
    b.add_vertex(n + 1, Some("1".into()));
    for c in 2..=n {
        b.add_edge(n + 1, c - 2, 0, 1)?;
    }
    b.build()
}

/// Tours as symbol strings: the subset trellis over `{2..n}` framed by a
/// root edge and a toor edge, both labeled 1. Length `n + 1`.
pub fn build_circular_trellis(n: usize) -> Result<Trellis<Symbol>> {
    check_n(n)?;
    let m = n - 1;
    let binom = BinomialTable::new(m);
    let mut b = TrellisBuilder::new().alphabet(n);
    b.add_level();
    b.add_vertex(0, Some("root".into()));
    for k in 0..=m {
        let j = k + 1;
        b.add_level();
        for mask in masks_of_weight(m, k) {
            let to = b.add_vertex(j, Some(SubsetVertex(city_mask(mask)).tag()));
            if k == 0 {
                b.add_edge(j, 0, to, 1)?;
            }
            for bit in bits(mask) {
                b.add_edge(j, binom.colex_rank(mask ^ 1 << bit), to, (bit + 2) as Symbol)?;
            }
        }
    }
    b.add_level();
    b.add_vertex(n + 1, Some("toor".into()));
    b.add_edge(n + 1, 0, 0, 1)?;
    b.build()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TspTrellis<L> {
    pub trellis: Trellis<L>,
    pub vertices: Vec<Vec<TspVertex>>,
}

/// Index of `(mask, bit)` within its level: masks in colex order, then the
/// last city in increasing order.
fn level_index(binom: &BinomialTable, mask: u64, bit: usize) -> usize {
    binom.colex_rank(mask) * mask.count_ones() as usize + (mask & ((1 << bit) - 1)).count_ones() as usize
}

fn build_tour_trellis<L>(n: usize, label: impl Fn(usize, usize) -> L) -> Result<TspTrellis<L>> {
    check_n(n)?;
    let m = n - 1;
    let binom = BinomialTable::new(m);
    let mut b = TrellisBuilder::new().alphabet(n);
    let root = TspVertex { subset: 0, city: 1 };
    b.add_level();
    b.add_vertex(0, Some(root.tag()));
    let mut vertices = vec![vec![root]];
    for k in 1..=m {
        b.add_level();
        let mut level = Vec::new();
        for mask in masks_of_weight(m, k) {
            for bit in bits(mask) {
                let v = TspVertex {
                    subset: city_mask(mask),
                    city: bit + 2,
                };
                let to = b.add_vertex(k, Some(v.tag()));
                let rest = mask ^ 1 << bit;
                if k == 1 {
                    b.add_edge(k, 0, to, label(1, v.city))?;
                }
                for prev in bits(rest) {
                    b.add_edge(k, level_index(&binom, rest, prev), to, label(prev + 2, v.city))?;
                }
                level.push(v);
            }
        }
        vertices.push(level);
    }
    b.add_level();
    let full = (1u64 << m) - 1;
    let toor = TspVertex {
        subset: city_mask(full),
        city: 1,
    };
    b.add_vertex(n, Some("toor".into()));
    for bit in 0..m {
        b.add_edge(n, level_index(&binom, full, bit), 0, label(bit + 2, 1))?;
    }
    vertices.push(vec![toor]);
    Ok(TspTrellis {
        trellis: b.build()?,
        vertices,
    })
}

/// Direct construction of the tour trellis with symbol labels. Length `n`;
/// the root is `(∅, 1)`.
pub fn build_tsp_trellis(n: usize) -> Result<TspTrellis<Symbol>> {
    build_tour_trellis(n, |_, to| to as Symbol)
}

/// The tour trellis with edge `(S, i) -> (S', j)` labeled `d_ij`.
pub fn tsp_distance_trellis(dm: &DistanceMatrix) -> Result<TspTrellis<Tropical>> {
    build_tour_trellis(dm.n, |from, to| Tropical(dm.get(from, to)))
}

/// Intersection of the circular and walk trellises with the shared first
/// edge folded away, for comparison with [`build_tsp_trellis`].
pub fn tsp_trellis_by_intersection(n: usize) -> Result<Trellis<Symbol>> {
    let both = intersect(&build_circular_trellis(n)?, &build_walk_trellis(n)?)?;
    Ok(fold_root_edge(&both)?.1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TspSolution {
    pub length: f64,
    /// Cities `1, x_2, ..., x_n, 1` of one shortest tour.
    pub tour: Option<Vec<usize>>,
    pub additions: u64,
    pub comparisons: u64,
}

/// Held-Karp over the tour trellis without materializing it. Predecessors
/// are scanned in increasing city order and only a strictly shorter
/// candidate replaces the current best.
pub fn solve_tsp(dm: &DistanceMatrix, want_tour: bool) -> Result<TspSolution> {
    let n = dm.n;
    check_n(n)?;
    let m = n - 1;
    let size = (1usize << m) * m;
    let mut mu: Vec<f64> = Vec::new();
    mu.try_reserve_exact(size).map_err(|_| Error::TooLarge {
        what: "tsp state table",
        n,
        max: TSP_MAX_N,
    })?;
    mu.resize(size, f64::INFINITY);
    let mut back: Vec<u8> = if want_tour { vec![u8::MAX; size] } else { Vec::new() };
    let mut ctr = OpCounter::new();
    for bit in 0..m {
        mu[(1 << bit) * m + bit] = dm.get(1, bit + 2);
    }
    for mask in 1u64..(1 << m) {
        if mask.count_ones() < 2 {
            continue;
        }
        for bit in bits(mask) {
            let rest = mask ^ 1 << bit;
            let mut best: Option<(Tropical, usize)> = None;
            for prev in bits(rest) {
                let term = ctr.times(
                    &Tropical(mu[rest as usize * m + prev]),
                    &Tropical(dm.get(prev + 2, bit + 2)),
                );
                best = Some(match best {
                    None => (term, prev),
                    Some((b, p)) => {
                        let kept = ctr.plus(&b, &term);
                        if term.0 < b.0 {
                            (kept, prev)
                        } else {
                            (b, p)
                        }
                    }
                });
            }
            let (value, prev) = best.expect("subsets of size two have a predecessor");
            mu[mask as usize * m + bit] = value.0;
            if want_tour {
                back[mask as usize * m + bit] = prev as u8;
            }
        }
    }
    let full = (1u64 << m) - 1;
    let mut best: Option<(Tropical, usize)> = None;
    for bit in 0..m {
        let term = ctr.times(&Tropical(mu[full as usize * m + bit]), &Tropical(dm.get(bit + 2, 1)));
        best = Some(match best {
            None => (term, bit),
            Some((b, p)) => {
                let kept = ctr.plus(&b, &term);
                if term.0 < b.0 {
                    (kept, bit)
                } else {
                    (b, p)
                }
            }
        });
    }
    let (length, last) = best.expect("at least two cities besides the start");
    let tour = (want_tour && !length.is_infinite()).then(|| {
        let mut cities = vec![1];
        let (mut mask, mut bit) = (full, last);
        loop {
            cities.push(bit + 2);
            let rest = mask ^ 1 << bit;
            if rest == 0 {
                break;
            }
            bit = back[mask as usize * m + bit] as usize;
            mask = rest;
        }
        cities.push(1);
        cities[1..n].reverse();
        cities
    });
    Ok(TspSolution {
        length: length.0,
        tour,
        additions: ctr.adds,
        comparisons: ctr.comparisons,
    })
}

/// Minimum over all `(n - 1)!` tours, with the first shortest tour in
/// lexicographic order.
pub fn tsp_bruteforce(dm: &DistanceMatrix) -> Result<(f64, Vec<usize>)> {
    let n = dm.n;
    check_min("tsp brute force", n, 2)?;
    check_max("tsp brute force", n, TSP_BRUTEFORCE_MAX_N)?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (2..=n).permutations(n - 1) {
        let tour: Vec<usize> = std::iter::once(1).chain(perm).chain(std::iter::once(1)).collect();
        let len = dm.tour_length(&tour);
        if best.as_ref().is_none_or(|(b, _)| len < *b) {
            best = Some((len, tour));
        }
    }
    Ok(best.expect("at least one tour"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trellis::{enumerate_paths, is_level_isomorphic, viterbi_best_path, DEFAULT_PATH_CAP};

    #[test]
    fn small_trellis_shapes() {
        let walk = build_walk_trellis(4).unwrap();
        assert_eq!(walk.level_sizes(), vec![1, 1, 3, 3, 3, 1]);
        assert_eq!(enumerate_paths(&walk, DEFAULT_PATH_CAP).unwrap().len(), 12);
        let circ = build_circular_trellis(4).unwrap();
        assert_eq!(circ.vertex_count(), 10);
        assert_eq!(enumerate_paths(&circ, DEFAULT_PATH_CAP).unwrap().len(), 6);
        let tsp = build_tsp_trellis(4).unwrap();
        assert_eq!((tsp.trellis.vertex_count(), tsp.trellis.edge_count()), (14, 18));
        assert_eq!(tsp.trellis.tag(tsp.trellis.root().unwrap()), Some("({},1)"));
        assert_eq!(build_tsp_trellis(3).unwrap().trellis.vertex_count(), 6);
        let meet = tsp_trellis_by_intersection(4).unwrap();
        assert!(is_level_isomorphic(&meet, &tsp.trellis).unwrap());
        assert!(build_walk_trellis(2).is_err());
    }

    #[test]
    fn three_cities() {
        let dm = DistanceMatrix::from_rows(vec![vec![0., 1., 2.], vec![1., 0., 3.], vec![2., 3., 0.]]).unwrap();
        let s = solve_tsp(&dm, true).unwrap();
        assert_eq!(s.length, 6.0);
        // both orientations tie; the toor keeps its lowest-city predecessor
        assert_eq!(s.tour, Some(vec![1, 3, 2, 1]));
        assert_eq!(tsp_bruteforce(&dm).unwrap().0, 6.0);
        let one_way = DistanceMatrix::from_rows(vec![vec![0., 1., 10.], vec![10., 0., 1.], vec![1., 10., 0.]]).unwrap();
        assert_eq!(solve_tsp(&one_way, true).unwrap().length, 3.0);
        assert_eq!(tsp_bruteforce(&one_way).unwrap().0, 3.0);
    }

    #[test]
    fn implicit_matches_trellis_flow() {
        for n in 3..=7 {
            let dm = random_distances(n, 20, false, n as u64);
            let s = solve_tsp(&dm, true).unwrap();
            let t = tsp_distance_trellis(&dm).unwrap();
            let (flow, path) = viterbi_best_path(&t.trellis).unwrap();
            assert_eq!(flow.value.0, s.length);
            assert_eq!(flow.counter.adds, s.additions);
            assert_eq!(flow.counter.comparisons, s.comparisons);
            let cities: Vec<usize> = path
                .unwrap()
                .iter()
                .map(|v| t.vertices[v.level][v.index].city)
                .collect();
            assert_eq!(cities, s.tour.clone().unwrap());
            assert_eq!(s.additions as u128, formulas::additions(n as u32));
            assert_eq!(s.comparisons as u128, formulas::comparisons(n as u32));
            assert_eq!(dm.tour_length(&cities), s.length);
        }
    }

    #[test]
    fn uniform_distances() {
        let dm = DistanceMatrix::uniform(4, 1.0).unwrap();
        assert_eq!(solve_tsp(&dm, false).unwrap().length, 4.0);
        assert!(DistanceMatrix::from_rows(vec![vec![1.0]]).is_err());
    }
}
