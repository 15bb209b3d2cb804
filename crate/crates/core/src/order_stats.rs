//! Joint distribution of order statistics of independent, non-identical
//! random variables.
//!
//! `P(X_(r_1) <= x_1, ..., X_(r_t) <= x_t)` is a sum of scaled permanents of
//! repeated-row matrices built from the rows `b_1..b_{t+1}`, where `b_lj` is
//! the probability that `X_j` falls in the `l`-th interval cut out by the
//! thresholds. All of those permanents are flows of one tuple trellis, and
//! the probability is the sum of the final-level flows over the tuples whose
//! prefix sums reach the ranks.

use num_rational::BigRational;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::oracles::permanent_naive;
use crate::repeated::{build_tuple_trellis, relabel_with_rows, TupleVertex};
use crate::scalar::value_to_rational;
use crate::semiring::{factorial, Field, OpCounter};
use crate::trellis::{viterbi_final_level, FlowOptions};

/// Ranks `r_1 < ... < r_t` and `cdf[j][l] = P(X_j <= x_l)` for `n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderStatQuery<T> {
    ranks: Vec<usize>,
    cdf: Vec<Vec<T>>,
}

impl<T: Field + PartialOrd> OrderStatQuery<T> {
    pub fn new(ranks: Vec<usize>, cdf: Vec<Vec<T>>) -> Result<Self> {
        let n = cdf.len();
        let t = ranks.len();
        if n == 0 || t == 0 {
            return Err(Error::invalid("need at least one variable and one rank"));
        }
        if ranks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!("ranks {ranks:?} are not strictly increasing")));
        }
        if ranks[0] < 1 || ranks[t - 1] > n {
            return Err(Error::invalid(format!("ranks {ranks:?} must lie in [1, {n}]")));
        }
        let (zero, one) = (T::zero(), T::one());
        for (j, row) in cdf.iter().enumerate() {
            if row.len() != t {
                return Err(Error::Dimension(format!(
                    "cdf row {} has {} values for {t} thresholds",
                    j + 1,
                    row.len()
                )));
            }
            if row.iter().any(|p| *p < zero || *p > one) {
                return Err(Error::invalid(format!("cdf row {} has a value outside [0, 1]", j + 1)));
            }
            if row.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::invalid(format!("cdf row {} is not monotone", j + 1)));
            }
        }
        Ok(OrderStatQuery { ranks, cdf })
    }

    pub fn n(&self) -> usize {
        self.cdf.len()
    }

    pub fn t(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn cdf(&self) -> &[Vec<T>] {
        &self.cdf
    }

    pub fn map<U: Field + PartialOrd>(&self, f: impl Fn(&T) -> U) -> OrderStatQuery<U> {
        OrderStatQuery {
            ranks: self.ranks.clone(),
            cdf: self.cdf.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }
}

#[derive(Deserialize)]
struct QueryJson {
    ranks: Vec<usize>,
    cdf: Vec<Vec<serde_json::Value>>,
}

impl OrderStatQuery<BigRational> {
    /// Parses `{"ranks": [...], "cdf": [[...]]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: QueryJson = serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        let cdf = raw
            .cdf
            .iter()
            .map(|r| r.iter().map(value_to_rational).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        OrderStatQuery::new(raw.ranks, cdf)
    }
}

/// Rows `b_1..b_{t+1}`, each of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BMatrix<T> {
    pub rows: Vec<Vec<T>>,
}

impl<T: Field> BMatrix<T> {
    pub fn column_sums(&self) -> Vec<T> {
        let n = self.rows[0].len();
        (0..n)
            .map(|j| self.rows.iter().fold(T::zero(), |acc, r| acc.plus(&r[j])))
            .collect()
    }
}

/// `b_1j = F_j(x_1)`, `b_lj = F_j(x_l) - F_j(x_{l-1})`, `b_{t+1,j} = 1 - F_j(x_t)`.
pub fn build_b_matrix<T: Field + PartialOrd>(q: &OrderStatQuery<T>) -> BMatrix<T> {
    let (n, t) = (q.n(), q.t());
    let mut rows = vec![Vec::with_capacity(n); t + 1];
    for cdf in q.cdf() {
        rows[0].push(cdf[0].clone());
        for l in 1..t {
            rows[l].push(cdf[l].minus(&cdf[l - 1]));
        }
        rows[t].push(T::one().minus(&cdf[t - 1]));
    }
    BMatrix { rows }
}

/// Coordinate bounds `n - r_{l-1}` with `r_0 = 0`.
pub fn order_bounds(n: usize, ranks: &[usize]) -> Vec<usize> {
    std::iter::once(n).chain(ranks.iter().map(|r| n - r)).collect()
}

/// `prod (n - r_{l-1} + 1)`, the size of the tuple box of the trellis
/// definition. Tuples summing past `n` lie in no level and are not built.
pub fn declared_vertex_count(n: usize, ranks: &[usize]) -> u128 {
    order_bounds(n, ranks).iter().map(|&b| b as u128 + 1).product()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderStatResult<T> {
    pub probability: T,
    /// Every final-level tuple and its flow `F(i_1, ..., i_t)`.
    pub final_flows: Vec<(TupleVertex, T)>,
    /// Flow pass plus the final summation over the qualifying tuples.
    pub counter: OpCounter,
    pub vertices: usize,
    pub edges: usize,
    pub declared_vertices: u128,
}

/// Whether every prefix sum `lambda_1 + ... + lambda_l` reaches `r_l`.
pub fn in_rank_set(lambda: &[usize], ranks: &[usize]) -> bool {
    let mut prefix = 0;
    ranks.iter().zip(lambda).all(|(&r, &l)| {
        prefix += l;
        prefix >= r
    })
}

pub fn joint_probability<T: Field + PartialOrd>(q: &OrderStatQuery<T>) -> Result<OrderStatResult<T>> {
    joint_probability_with(q, FlowOptions::default())
}

pub fn joint_probability_with<T: Field + PartialOrd>(
    q: &OrderStatQuery<T>,
    opts: FlowOptions,
) -> Result<OrderStatResult<T>> {
    let n = q.n();
    let b = build_b_matrix(q);
    let tt = build_tuple_trellis(&order_bounds(n, q.ranks()), n)?;
    let labeled = relabel_with_rows(&tt.trellis, &b.rows)?;
    let flows = viterbi_final_level(&labeled, opts)?;
    let mut counter = flows.counter;
    let mut probability: Option<T> = None;
    for (lambda, mu) in tt.tuples[n].iter().zip(&flows.flows) {
        if in_rank_set(&lambda.0, q.ranks()) {
            probability = Some(match probability {
                None => mu.clone(),
                Some(p) => counter.plus(&p, mu),
            });
        }
    }
    Ok(OrderStatResult {
        probability: probability.unwrap_or_else(T::zero),
        final_flows: tt.tuples[n].iter().cloned().zip(flows.flows).collect(),
        counter,
        vertices: tt.trellis.vertex_count(),
        edges: tt.trellis.edge_count(),
        declared_vertices: declared_vertex_count(n, q.ranks()),
    })
}

/// `F(i_1, ..., i_t) = per(B(i)) / (i_1! (i_2 - i_1)! ... (n - i_t)!)`, with
/// the permanent evaluated by direct expansion.
pub fn order_term_by_permanent<T: Field>(b: &BMatrix<T>, i: &[usize]) -> Result<T> {
    let n = b.rows[0].len();
    let mut mults = Vec::with_capacity(i.len() + 1);
    let mut prev = 0;
    for &x in i {
        mults.push(x - prev);
        prev = x;
    }
    mults.push(n - prev);
    let rows = mults
        .iter()
        .zip(&b.rows)
        .flat_map(|(&m, row)| std::iter::repeat_n(row.clone(), m))
        .collect();
    let per = permanent_naive(&Matrix::from_rows(rows)?)?;
    let scale: num_bigint::BigInt = mults.iter().map(|&m| factorial(m)).product();
    let inv = T::from_bigint(&scale).recip().ok_or(Error::DivisionByZero)?;
    Ok(per.times(&inv))
}

/// The nested sum `sum_{i_t = r_t}^{n} ... sum_{i_1 = r_1}^{i_2} F(i_1, ..., i_t)`.
pub fn joint_probability_by_permanents<T: Field + PartialOrd>(q: &OrderStatQuery<T>) -> Result<T> {
    let b = build_b_matrix(q);
    let (n, t) = (q.n(), q.t());
    let mut total = T::zero();
    let mut i = vec![0usize; t];
    fn recurse<T: Field>(
        level: usize,
        upper: usize,
        ranks: &[usize],
        i: &mut Vec<usize>,
        b: &BMatrix<T>,
        total: &mut T,
    ) -> Result<()> {
        for x in ranks[level]..=upper {
            i[level] = x;
            if level == 0 {
                *total = total.plus(&order_term_by_permanent(b, i)?);
            } else {
                recurse(level - 1, x, ranks, i, b, total)?;
            }
        }
        Ok(())
    }
    recurse(t - 1, n, q.ranks(), &mut i, &b, &mut total)?;
    Ok(total)
}
