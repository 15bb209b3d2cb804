//! Reference permanent algorithms with instrumented operation counts.
//!
//! Counting conventions: a subtraction is an addition; sign changes,
//! doubling, power-of-two scaling and integer binomial weights are free; the
//! first summand of any accumulation and the first entries of a running
//! subset sum cost nothing.

use itertools::Itertools;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{check_max, check_min, NAIVE_MAX_N, RYSER_MAX_N};
use crate::canonical::{default_normalization_column, permanent_trellis, permanent_trellis_normalized};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::repeated::RepeatedRowSpec;
use crate::semiring::{binomial, binomial_u128, Field, OpCounter, Semiring};

/// `sum over permutations sigma of prod_i a_{i sigma(i)}`.
pub fn permanent_naive<T: Semiring>(a: &Matrix<T>) -> Result<T> {
    let n = a.n();
    check_max("naive permanent", n, NAIVE_MAX_N)?;
    if n == 0 {
        return Ok(T::one());
    }
    let mut total = T::zero();
    for sigma in (0..n).permutations(n) {
        let mut term = a.get(0, sigma[0]).clone();
        for (i, &s) in sigma.iter().enumerate().skip(1) {
            term = term.times(a.get(i, s));
        }
        total = total.plus(&term);
    }
    Ok(total)
}

/// Reflected binary Gray code over `bits` bits, as the sequence of single
/// bit flips from `0`. Yields `(bit, now_set)` for steps `1..2^bits`.
#[derive(Clone, Debug)]
pub struct GrayFlips {
    k: u64,
    end: u64,
    code: u64,
}

impl GrayFlips {
    pub fn new(bits: usize) -> Self {
        GrayFlips {
            k: 0,
            end: 1u64 << bits,
            code: 0,
        }
    }
}

impl Iterator for GrayFlips {
    type Item = (usize, bool);

    fn next(&mut self) -> Option<(usize, bool)> {
        self.k += 1;
        if self.k >= self.end {
            return None;
        }
        let bit = self.k.trailing_zeros() as usize;
        self.code ^= 1 << bit;
        Some((bit, self.code >> bit & 1 == 1))
    }
}

/// Reflected mixed-radix Gray code over digits `0..=bounds_l`. Yields the
/// changed coordinate and its step (`+1` or `-1`) for every tuple after the
/// zero tuple; each tuple of the box appears exactly once.
#[derive(Clone, Debug)]
pub struct MixedGray {
    bounds: Vec<usize>,
    digits: Vec<usize>,
    up: Vec<bool>,
}

impl MixedGray {
    pub fn new(bounds: &[usize]) -> Self {
        MixedGray {
            bounds: bounds.to_vec(),
            digits: vec![0; bounds.len()],
            up: vec![true; bounds.len()],
        }
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }
}

impl Iterator for MixedGray {
    type Item = (usize, i8);

    fn next(&mut self) -> Option<(usize, i8)> {
        for l in 0..self.bounds.len() {
            if self.up[l] && self.digits[l] < self.bounds[l] {
                self.digits[l] += 1;
                return Some((l, 1));
            }
            if !self.up[l] && self.digits[l] > 0 {
                self.digits[l] -= 1;
                return Some((l, -1));
            }
            self.up[l] = !self.up[l];
        }
        None
    }
}

fn check_ryser(n: usize) -> Result<()> {
    check_min("inclusion-exclusion permanent", n, 1)?;
    check_max("inclusion-exclusion permanent", n, RYSER_MAX_N)
}

fn product<T: Semiring>(values: &[T], ctr: &mut OpCounter) -> T {
    let mut p = values[0].clone();
    for v in &values[1..] {
        p = ctr.times(&p, v);
    }
    p
}

fn accumulate<T: Field>(acc: &mut Option<T>, term: T, ctr: &mut OpCounter) {
    *acc = Some(match acc.take() {
        None => term,
        Some(a) => ctr.plus(&a, &term),
    });
}

/// Ryser's formula `per(A) = (-1)^n sum_{S nonempty} (-1)^{|S|} prod_j sum_{i in S} a_ij`.
/// Without Gray order each subset's row sums are formed from scratch.
pub fn permanent_ryser<T: Field>(a: &Matrix<T>, gray: bool) -> Result<(T, OpCounter)> {
    let n = a.n();
    check_ryser(n)?;
    let mut ctr = OpCounter::new();
    let mut acc: Option<T> = None;
    let sign_of = |size: usize| (n - size) % 2 == 1;
    if gray {
        let mut sums: Vec<T> = a.row(0).to_vec();
        let mut size = 1;
        let p = product(&sums, &mut ctr);
        accumulate(&mut acc, if sign_of(size) { p.negate() } else { p }, &mut ctr);
        for (bit, added) in GrayFlips::new(n).skip(1) {
            let row = a.row(bit);
            for (s, x) in sums.iter_mut().zip(row) {
                *s = if added { ctr.plus(s, x) } else { ctr.minus(s, x) };
            }
            size = if added { size + 1 } else { size - 1 };
            let p = product(&sums, &mut ctr);
            accumulate(&mut acc, if sign_of(size) { p.negate() } else { p }, &mut ctr);
        }
    } else {
        for mask in 1u64..(1u64 << n) {
            let rows: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sums: Vec<T> = (0..n)
                .map(|j| {
                    let mut s = a.get(rows[0], j).clone();
                    for &i in &rows[1..] {
                        s = ctr.plus(&s, a.get(i, j));
                    }
                    s
                })
                .collect();
            let p = product(&sums, &mut ctr);
            accumulate(&mut acc, if sign_of(rows.len()) { p.negate() } else { p }, &mut ctr);
        }
    }
    Ok((acc.expect("at least one subset"), ctr))
}

/// Nijenhuis-Wilf form of Ryser's formula. With `c_j = -1/2 sum_i a_ij`,
/// `per(A) = (-1)^n 2 sum_{S in {2..n}} (-1)^{|S|} prod_j (c_j + sum_{i in S} a_ij)`,
/// the subsets of `{2..n}` visited in Gray order.
pub fn permanent_nw<T: Field>(a: &Matrix<T>) -> Result<(T, OpCounter)> {
    let n = a.n();
    check_ryser(n)?;
    let mut ctr = OpCounter::new();
    let mut sums: Vec<T> = (0..n)
        .map(|j| {
            let mut s = a.get(0, j).clone();
            for i in 1..n {
                s = ctr.plus(&s, a.get(i, j));
            }
            s.negate().scale_pow2(-1)
        })
        .collect();
    let mut acc: Option<T> = None;
    let mut size = 0;
    accumulate(&mut acc, product(&sums, &mut ctr), &mut ctr);
    for (bit, added) in GrayFlips::new(n - 1) {
        let row = a.row(bit + 1);
        for (s, x) in sums.iter_mut().zip(row) {
            *s = if added { ctr.plus(s, x) } else { ctr.minus(s, x) };
        }
        size = if added { size + 1 } else { size - 1 };
        let p = product(&sums, &mut ctr);
        accumulate(&mut acc, if size % 2 == 1 { p.negate() } else { p }, &mut ctr);
    }
    let total = acc.expect("at least one subset").scale_pow2(1);
    Ok((if n % 2 == 1 { total.negate() } else { total }, ctr))
}

/// Glynn's formula `per(A) = 2^{1-n} sum_delta (prod_k delta_k) prod_j sum_i delta_i a_ij`
/// over `delta in {+1, -1}^n` with `delta_1 = +1`, in Gray order.
pub fn permanent_glynn<T: Field>(a: &Matrix<T>) -> Result<(T, OpCounter)> {
    let n = a.n();
    check_ryser(n)?;
    let mut ctr = OpCounter::new();
    let mut sums: Vec<T> = (0..n)
        .map(|j| {
            let mut s = a.get(0, j).clone();
            for i in 1..n {
                s = ctr.plus(&s, a.get(i, j));
            }
            s
        })
        .collect();
    let mut acc: Option<T> = None;
    let mut negatives = 0;
    accumulate(&mut acc, product(&sums, &mut ctr), &mut ctr);
    for (bit, flipped) in GrayFlips::new(n - 1) {
        let row = a.row(bit + 1);
        for (s, x) in sums.iter_mut().zip(row) {
            let twice = x.scale_pow2(1);
            *s = if flipped {
                ctr.minus(s, &twice)
            } else {
                ctr.plus(s, &twice)
            };
        }
        negatives = if flipped { negatives + 1 } else { negatives - 1 };
        let p = product(&sums, &mut ctr);
        accumulate(&mut acc, if negatives % 2 == 1 { p.negate() } else { p }, &mut ctr);
    }
    Ok((acc.expect("at least one sign vector").scale_pow2(1 - n as i32), ctr))
}

/// Inclusion-exclusion over `0 <= r <= m` for a repeated-row matrix:
/// `per = (-1)^n sum_{r != 0} (-1)^{|r|} prod_l C(m_l, r_l) prod_j sum_l r_l a_lj`,
/// the tuples `r` visited in reflected mixed-radix Gray order.
pub fn permanent_clifford<T: Field>(spec: &RepeatedRowSpec<T>) -> Result<(T, OpCounter)> {
    let n = spec.n();
    check_ryser(n)?;
    let rows = spec.rows();
    let mut ctr = OpCounter::new();
    let mut gray = MixedGray::new(spec.mults());
    let mut acc: Option<T> = None;
    let mut sums: Vec<T> = Vec::new();
    let mut weight_sum = 0usize;
    while let Some((l, step)) = gray.next() {
        if sums.is_empty() {
            sums = rows[l].clone();
        } else {
            for (s, x) in sums.iter_mut().zip(&rows[l]) {
                *s = if step > 0 { ctr.plus(s, x) } else { ctr.minus(s, x) };
            }
        }
        weight_sum = if step > 0 { weight_sum + 1 } else { weight_sum - 1 };
        let coefficient: BigInt = gray
            .digits()
            .iter()
            .zip(spec.mults())
            .map(|(&r, &m)| binomial(m, r))
            .product();
        let mut p = product(&sums, &mut ctr).times(&T::from_bigint(&coefficient));
        if weight_sum % 2 == 1 {
            p = p.negate();
        }
        accumulate(&mut acc, p, &mut ctr);
    }
    let total = acc.ok_or_else(|| Error::invalid("empty multiplicity vector"))?;
    Ok((if n % 2 == 1 { total.negate() } else { total }, ctr))
}

/// Closed-form operation counts.
pub mod formulas {
    use super::binomial_u128;

    fn pow2(k: u32) -> u128 {
        1u128 << k
    }

    pub fn ryser_mults(n: u32) -> u128 {
        (n as u128 - 1) * (pow2(n) - 1)
    }

    pub fn ryser_adds(n: u32) -> u128 {
        let n128 = n as u128;
        (n128 * n128 + 2 - 2 * n128) * pow2(n - 1) + n128 - 2
    }

    pub fn ryser_gray_adds(n: u32) -> u128 {
        (n as u128 + 1) * (pow2(n) - 2)
    }

    pub fn nw_mults(n: u32) -> u128 {
        (n as u128 - 1) * pow2(n - 1)
    }

    pub fn nw_adds(n: u32) -> u128 {
        let n128 = n as u128;
        (n128 + 1) * (pow2(n - 1) - 1) + n128 * (n128 - 1)
    }

    pub fn trellis_mults(n: u32) -> u128 {
        n as u128 * pow2(n - 1) - n as u128
    }

    pub fn trellis_adds(n: u32) -> u128 {
        n as u128 * pow2(n - 1) + 1 - pow2(n)
    }

    /// Valid for `n >= 2`; at `n = 1` the normalization column is the root level.
    pub fn normalized_mults(n: u32) -> u128 {
        let n128 = n as u128;
        let t = n128 / 2 + 1;
        n128 * pow2(n - 1) + n128 * n128 - n128 - (n128 - t + 1) * binomial_u128(n as u64, (t - 1) as u64)
    }

    pub fn clifford_mults(n: usize, mults: &[usize]) -> u128 {
        let size: u128 = mults.iter().map(|&m| m as u128 + 1).product();
        (n as u128 - 1) * (size - 1)
    }

    pub fn clifford_adds(n: usize, mults: &[usize]) -> u128 {
        let size: u128 = mults.iter().map(|&m| m as u128 + 1).product();
        (n as u128 + 1) * (size - 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ryser,
    RyserGray,
    NijenhuisWilf,
    Glynn,
    Trellis,
    TrellisNormalized,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Ryser,
        Method::RyserGray,
        Method::NijenhuisWilf,
        Method::Glynn,
        Method::Trellis,
        Method::TrellisNormalized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ryser => "ryser",
            Method::RyserGray => "ryser-gray",
            Method::NijenhuisWilf => "nijenhuis-wilf",
            Method::Glynn => "glynn",
            Method::Trellis => "trellis",
            Method::TrellisNormalized => "trellis-normalized",
        }
    }

    pub fn formula(self, n: u32) -> (u128, u128) {
        use formulas::*;
        match self {
            Method::Ryser => (ryser_mults(n), ryser_adds(n)),
            Method::RyserGray => (ryser_mults(n), ryser_gray_adds(n)),
            Method::NijenhuisWilf | Method::Glynn => (nw_mults(n), nw_adds(n)),
            Method::Trellis => (trellis_mults(n), trellis_adds(n)),
            Method::TrellisNormalized => (normalized_mults(n), trellis_adds(n)),
        }
    }

    /// Runs the method, returning the value and its counter.
    pub fn run<T: Field>(self, a: &Matrix<T>) -> Result<(T, OpCounter)> {
        match self {
            Method::Ryser => permanent_ryser(a, false),
            Method::RyserGray => permanent_ryser(a, true),
            Method::NijenhuisWilf => permanent_nw(a),
            Method::Glynn => permanent_glynn(a),
            Method::Trellis => permanent_trellis(a).map(|f| (f.value, f.counter)),
            Method::TrellisNormalized => {
                permanent_trellis_normalized(a, Some(default_normalization_column(a.n()))).map(|f| (f.value, f.counter))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpcountRow {
    pub n: usize,
    pub method: &'static str,
    pub mults_formula: u128,
    pub mults_measured: u64,
    pub adds_formula: u128,
    pub adds_measured: u64,
}

impl OpcountRow {
    pub fn agrees(&self) -> bool {
        self.mults_formula == self.mults_measured as u128 && self.adds_formula == self.adds_measured as u128
    }
}

/// Matrix with entries uniform in `[1, 2)`, so no entry (in particular
/// none in the normalization column) is zero.
pub fn table_matrix(n: usize, seed: u64) -> Matrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(n, |_, _| rng.gen_range(1.0..2.0))
}

pub const TABLE_SEED: u64 = 0x7e11;

/// Closed-form and measured counts for every method and every `n` in range.
pub fn opcount_table(n_lo: usize, n_hi: usize) -> Result<Vec<OpcountRow>> {
    check_min("operation count table", n_lo, 2)?;
    if n_hi < n_lo || n_hi > 20 {
        return Err(Error::invalid(format!(
            "table range {n_lo}..={n_hi} must lie within 2..=20"
        )));
    }
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        let a = table_matrix(n, TABLE_SEED + n as u64);
        for method in Method::ALL {
            let (_, ctr) = method.run(&a)?;
            let (mults_formula, adds_formula) = method.formula(n as u32);
            rows.push(OpcountRow {
                n,
                method: method.name(),
                mults_formula,
                mults_measured: ctr.mults,
                adds_formula,
                adds_measured: ctr.adds,
            });
        }
    }
    Ok(rows)
}
