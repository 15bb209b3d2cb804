//! Merged trellises for matrices with repeated rows.
//!
//! When row `a_l` occurs `m_l` times, the canonical trellis collapses to one
//! vertex per tuple `lambda` with `0 <= lambda_l <= m_l`: the tuple counts
//! how many copies of each row have been used. An edge increments one
//! coordinate `l` and carries `a_{l j}` at level `j`. The toor flow times
//! `m_1! ... m_t!` is the permanent of the expanded matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::value_to_rational;
use crate::semiring::{factorial, Field};
use crate::trellis::{viterbi_all_levels, viterbi_flow, FlowResult, Symbol, Trellis, TrellisBuilder};

/// Largest tuple space materialized by [`build_tuple_trellis`].
pub const MAX_TUPLE_VERTICES: usize = 50_000_000;

/// Distinct rows `a_1..a_t` with multiplicities `m_1..m_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatedRowSpec<T> {
    rows: Vec<Vec<T>>,
    mults: Vec<usize>,
}

impl<T: Clone> RepeatedRowSpec<T> {
    pub fn new(rows: Vec<Vec<T>>, mults: Vec<usize>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("at least one distinct row is required"));
        }
        if rows.len() != mults.len() {
            return Err(Error::Dimension(format!(
                "{} rows but {} multiplicities",
                rows.len(),
                mults.len()
            )));
        }
        if let Some(l) = mults.iter().position(|&m| m == 0) {
            return Err(Error::invalid(format!("multiplicity of row {} is zero", l + 1)));
        }
        let n: usize = mults.iter().sum();
        if let Some((l, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row {} has {} entries but the multiplicities sum to {n}",
                l + 1,
                r.len()
            )));
        }
        Ok(RepeatedRowSpec { rows, mults })
    }

    pub fn n(&self) -> usize {
        self.mults.iter().sum()
    }

    pub fn t(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn mults(&self) -> &[usize] {
        &self.mults
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> RepeatedRowSpec<U> {
        RepeatedRowSpec {
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
            mults: self.mults.clone(),
        }
    }

    /// The `n x n` matrix with row `a_l` repeated `m_l` times, in order.
    pub fn expand(&self) -> Matrix<T> {
        self.prefix_matrix(&self.mults).expect("the full type is in range")
    }

    /// `C(lambda)`: the `j x j` matrix over columns `1..j` whose rows are
    /// `a_l` repeated `lambda_l` times, `j = sum lambda`.
    pub fn prefix_matrix(&self, lambda: &[usize]) -> Result<Matrix<T>> {
        self.check_tuple(lambda)?;
        let j: usize = lambda.iter().sum();
        let rows = lambda
            .iter()
            .zip(&self.rows)
            .flat_map(|(&k, row)| std::iter::repeat_n(row[..j].to_vec(), k))
            .collect();
        Matrix::from_rows(rows)
    }

    fn check_tuple(&self, lambda: &[usize]) -> Result<()> {
        if lambda.len() != self.t() || lambda.iter().zip(&self.mults).any(|(l, m)| l > m) {
            return Err(Error::invalid(format!(
                "tuple {lambda:?} is outside the bounds {:?}",
                self.mults
            )));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct SpecJson {
    rows: Vec<Vec<serde_json::Value>>,
    mults: Vec<usize>,
}

impl RepeatedRowSpec<BigRational> {
    /// Parses `{"rows": [[...]], "mults": [...]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: SpecJson = serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        let rows = raw
            .rows
            .iter()
            .map(|r| r.iter().map(value_to_rational).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        RepeatedRowSpec::new(rows, raw.mults)
    }
}

/// A vertex of a tuple trellis; its level is the coordinate sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleVertex(pub Vec<usize>);

impl TupleVertex {
    pub fn level(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn tag(&self) -> String {
        if self.0.iter().all(|&x| x < 10) {
            self.0.iter().map(usize::to_string).collect()
        } else {
            self.0.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
        }
    }
}

/// Tuple trellis together with the tuple of every vertex.
#[derive(Clone, Debug)]
pub struct TupleTrellis {
    pub trellis: Trellis<Symbol>,
    /// `tuples[j][i]` is the tuple of vertex `i` in level `j`.
    pub tuples: Vec<Vec<TupleVertex>>,
    bounds: Vec<usize>,
    strides: Vec<usize>,
    /// Mixed-radix code to `(level, index)`; `None` past the last level.
    lookup: Vec<Option<(usize, usize)>>,
}

impl TupleTrellis {
    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    /// Position of `lambda` in the trellis, if it lies in some level.
    pub fn locate(&self, lambda: &[usize]) -> Option<(usize, usize)> {
        if lambda.len() != self.bounds.len() || lambda.iter().zip(&self.bounds).any(|(l, b)| l > b) {
            return None;
        }
        let code: usize = lambda.iter().zip(&self.strides).map(|(l, s)| l * s).sum();
        self.lookup[code]
    }

    /// Number of tuples in the full box `prod (b_l + 1)`, including those
    /// whose sum exceeds the trellis length.
    pub fn box_size(&self) -> usize {
        self.lookup.len()
    }
}

/// Trellis on the tuples `0 <= lambda_l <= bounds_l` with `sum lambda <= length`.
/// Level `j` holds the tuples summing to `j`, in mixed-radix order with the
/// first coordinate fastest. The edge `lambda - e_l -> lambda` has symbol `l`.
pub fn build_tuple_trellis(bounds: &[usize], length: usize) -> Result<TupleTrellis> {
    if bounds.is_empty() {
        return Err(Error::invalid("tuple trellis needs at least one coordinate"));
    }
    let mut strides = Vec::with_capacity(bounds.len());
    let mut total: usize = 1;
    for &b in bounds {
        strides.push(total);
        total = total
            .checked_mul(b + 1)
            .filter(|&t| t <= MAX_TUPLE_VERTICES)
            .ok_or(Error::TooLarge {
                what: "tuple trellis",
                n: length,
                max: MAX_TUPLE_VERTICES,
            })?;
    }
    let t = bounds.len();
    let mut tuples: Vec<Vec<TupleVertex>> = vec![Vec::new(); length + 1];
    let mut lookup = vec![None; total];
    let mut digits = vec![0usize; t];
    for (code, slot) in lookup.iter_mut().enumerate() {
        if code > 0 {
            // odometer increment
            for (d, &b) in digits.iter_mut().zip(bounds) {
                if *d < b {
                    *d += 1;
                    break;
                }
                *d = 0;
            }
        }
        let level: usize = digits.iter().sum();
        if level <= length {
            *slot = Some((level, tuples[level].len()));
            tuples[level].push(TupleVertex(digits.clone()));
        }
    }
    let mut b = TrellisBuilder::new().alphabet(t);
    for (j, level) in tuples.iter().enumerate() {
        b.add_level();
        for v in level {
            let to = b.add_vertex(j, Some(v.tag()));
            if j == 0 {
                continue;
            }
            let code: usize = v.0.iter().zip(&strides).map(|(l, s)| l * s).sum();
            for l in 0..t {
                if v.0[l] > 0 {
                    let (_, from) = lookup[code - strides[l]].expect("predecessor is one level up");
                    b.add_edge(j, from, to, l as Symbol + 1)?;
                }
            }
        }
    }
    Ok(TupleTrellis {
        trellis: b.build()?,
        tuples,
        bounds: bounds.to_vec(),
        strides,
        lookup,
    })
}

/// The trellis `T(A, m)` over the alphabet of row indices.
pub fn build_repeated_trellis<T: Clone>(spec: &RepeatedRowSpec<T>) -> Result<TupleTrellis> {
    build_tuple_trellis(spec.mults(), spec.n())
}

/// Replaces symbol `l` on an edge entering level `j` by `rows[l - 1][j - 1]`.
pub fn relabel_with_rows<T: Clone>(t: &Trellis<Symbol>, rows: &[Vec<T>]) -> Result<Trellis<T>> {
    t.try_map_labels(|j, &s| {
        let row = rows.get((s as usize).wrapping_sub(1)).ok_or(Error::SymbolOutOfRange {
            symbol: s,
            size: rows.len(),
        })?;
        row.get(j - 1)
            .cloned()
            .ok_or_else(|| Error::Dimension(format!("row {s} has no entry for level {j}")))
    })
    .map(|r| r.with_alphabet(None))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepeatedPermanent<T> {
    /// `m_1! ... m_t! * mu(toor)`.
    pub value: T,
    /// The flow pass; its counter excludes the final rescaling.
    pub flow: FlowResult<T>,
    pub scale: BigInt,
    pub vertices: usize,
    pub edges: usize,
}

pub fn multiplicity_scale(mults: &[usize]) -> BigInt {
    mults.iter().map(|&m| factorial(m)).product()
}

pub fn permanent_repeated<T: Field>(spec: &RepeatedRowSpec<T>) -> Result<RepeatedPermanent<T>> {
    let tt = build_repeated_trellis(spec)?;
    let labeled = relabel_with_rows(&tt.trellis, spec.rows())?;
    let flow = viterbi_flow(&labeled)?;
    let scale = multiplicity_scale(spec.mults());
    Ok(RepeatedPermanent {
        value: flow.value.times(&T::from_bigint(&scale)),
        flow,
        scale,
        vertices: tt.trellis.vertex_count(),
        edges: tt.trellis.edge_count(),
    })
}

/// Flow of every vertex, level by level, alongside its tuple.
pub fn repeated_flows<T: Field>(spec: &RepeatedRowSpec<T>) -> Result<Vec<Vec<(TupleVertex, T)>>> {
    let tt = build_repeated_trellis(spec)?;
    let labeled = relabel_with_rows(&tt.trellis, spec.rows())?;
    let (flows, _) = viterbi_all_levels(&labeled)?;
    Ok(tt
        .tuples
        .into_iter()
        .zip(flows)
        .map(|(ts, fs)| ts.into_iter().zip(fs).collect())
        .collect())
}

/// `lambda_1! ... lambda_t! * mu(lambda)`, which equals `per(C(lambda))`.
pub fn intermediate_flow_check<T: Field>(spec: &RepeatedRowSpec<T>, lambda: &[usize]) -> Result<T> {
    spec.check_tuple(lambda)?;
    let tt = build_repeated_trellis(spec)?;
    let (level, index) = tt.locate(lambda).expect("in-bounds tuples lie in some level");
    let labeled = relabel_with_rows(&tt.trellis, spec.rows())?;
    let (flows, _) = viterbi_all_levels(&labeled)?;
    Ok(flows[level][index].times(&T::from_bigint(&multiplicity_scale(lambda))))
}

/// `t * prod (m_l + 1)` and `(t - 1) * prod (m_l + 1)`, the bounds on
/// multiplications and additions of the repeated-row flow.
pub fn repeated_op_bounds(mults: &[usize]) -> (u128, u128) {
    let size: u128 = mults.iter().map(|&m| m as u128 + 1).product();
    let t = mults.len() as u128;
    (t * size, (t - 1) * size)
}

/// Multiplicities `m` as balanced as possible over `t` rows, summing to `n`.
pub fn balanced_mults(n: usize, t: usize) -> Vec<usize> {
    (0..t).map(|l| n / t + usize::from(l < n % t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn example_spec() -> RepeatedRowSpec<BigRational> {
        let rows = (1..=3)
            .map(|l| (1..=6).map(|j| ratio(l * 10 + j, 1)).collect())
            .collect();
        RepeatedRowSpec::new(rows, vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn two_plus_one_rows_shape() {
        let spec = example_spec();
        let tt = build_repeated_trellis(&spec).unwrap();
        assert_eq!(tt.trellis.vertex_count(), 24);
        assert_eq!(multiplicity_scale(spec.mults()), BigInt::from(12));
        assert_eq!(tt.trellis.level_sizes(), vec![1, 3, 5, 6, 5, 3, 1]);
    }

    #[test]
    fn single_row_is_a_path() {
        let spec = RepeatedRowSpec::new(vec![vec![ratio(2, 1), ratio(3, 1), ratio(5, 1)]], vec![3]).unwrap();
        let tt = build_repeated_trellis(&spec).unwrap();
        assert_eq!(tt.trellis.level_sizes(), vec![1; 4]);
        let p = permanent_repeated(&spec).unwrap();
        assert_eq!(p.value, ratio(6 * 30, 1));
    }

    #[test]
    fn validation() {
        assert!(RepeatedRowSpec::new(vec![vec![1.0, 2.0]], vec![1]).is_err());
        assert!(RepeatedRowSpec::new(vec![vec![1.0], vec![1.0]], vec![1, 0]).is_err());
        let spec = RepeatedRowSpec::from_json_str(r#"{"rows": [[1, "1/2"]], "mults": [2]}"#).unwrap();
        assert_eq!(spec.rows()[0][1], ratio(1, 2));
        assert!(spec.prefix_matrix(&[3]).is_err());
        assert!(intermediate_flow_check(&spec, &[3]).is_err());
    }

    #[test]
    fn base_cases_of_intermediate_flows() {
        let spec = example_spec();
        assert_eq!(intermediate_flow_check(&spec, &[0, 0, 0]).unwrap(), ratio(1, 1));
        for l in 0..3 {
            let mut e = vec![0; 3];
            e[l] = 1;
            assert_eq!(intermediate_flow_check(&spec, &e).unwrap(), spec.rows()[l][0]);
        }
    }

    #[test]
    fn balanced() {
        assert_eq!(balanced_mults(10, 3), vec![4, 3, 3]);
        assert_eq!(repeated_op_bounds(&[1, 2, 3]), (72, 48));
    }
}
