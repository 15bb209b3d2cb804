//! Pruned subset trellises for sparse matrices.
//!
//! Under the model where each entry is nonzero with probability `p = d / n`,
//! most subsets of the canonical trellis carry no flow. The forward
//! construction only adds `u + {i}` when `a_ij != 0`, which keeps exactly the
//! subsets `v` with `per(A(v)) != 0` for nonnegative matrices. `U(n)` bounds
//! the expected number of vertices it produces.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::BITMASK_MAX_N;
use crate::canonical::{bits, SubsetVertex};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{format_rational, ln_abs_rational, rational_to_f64};
use crate::semiring::Semiring;
use crate::trellis::{viterbi_flow, FlowResult, Trellis, TrellisBuilder};

/// Vertex budget for a single sparse trellis.
pub const MAX_SPARSE_VERTICES: usize = 20_000_000;

/// Largest nonzero value drawn by [`random_sparse_matrix`].
pub const VALUE_POOL_MAX: i64 = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseModel {
    n: usize,
    d: BigRational,
    seed: u64,
}

impl SparseModel {
    pub fn new(n: usize, d: BigRational, seed: u64) -> Result<Self> {
        if !d.is_positive() || d >= BigRational::from_integer(n.into()) {
            return Err(Error::invalid(format!(
                "need 0 < d < n, got d = {} and n = {n}",
                format_rational(&d)
            )));
        }
        Ok(SparseModel { n, d, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> &BigRational {
        &self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SparseModel { seed, ..self.clone() }
    }

    pub fn p(&self) -> BigRational {
        &self.d / BigRational::from_integer(self.n.into())
    }

    pub fn q(&self) -> BigRational {
        BigRational::from(BigInt::one()) - self.p()
    }
}

/// Entry `(i, j)` is nonzero with probability `p`, drawn uniformly from
/// `1..=16`. Entries are generated in row-major order from a ChaCha stream.
pub fn random_sparse_matrix(m: &SparseModel) -> Matrix<BigRational> {
    let p = rational_to_f64(&m.p());
    let mut rng = ChaCha8Rng::seed_from_u64(m.seed);
    Matrix::from_fn(m.n, |_, _| {
        if rng.gen_bool(p) {
            BigRational::from_integer(rng.gen_range(1..=VALUE_POOL_MAX).into())
        } else {
            BigRational::from(BigInt::zero())
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseTrellis<T> {
    pub trellis: Trellis<T>,
    /// Subset of each vertex, aligned with the trellis levels.
    pub masks: Vec<Vec<u64>>,
}

/// Forward construction: from each `u` in level `j - 1` add `u + {i}` for
/// every row `i` outside `u` with `a_ij != 0`. With `backward_prune`, vertices
/// with no path to the toor are removed as well; the root always stays.
pub fn build_sparse_trellis<T: Semiring>(a: &Matrix<T>, backward_prune: bool) -> Result<SparseTrellis<T>> {
    let n = a.n();
    if n > BITMASK_MAX_N {
        return Err(Error::TooLarge {
            what: "sparse trellis",
            n,
            max: BITMASK_MAX_N,
        });
    }
    let mut b = TrellisBuilder::new();
    b.add_level();
    b.add_vertex(0, Some(SubsetVertex(0).tag()));
    let mut masks: Vec<Vec<u64>> = vec![vec![0]];
    let mut total = 1;
    for j in 1..=n {
        b.add_level();
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut level = Vec::new();
        let support: Vec<usize> = (0..n).filter(|&i| !a.get(i, j - 1).is_zero()).collect();
        for (from, &u) in masks[j - 1].iter().enumerate() {
            for &i in &support {
                if u >> i & 1 == 1 {
                    continue;
                }
                let v = u | 1 << i;
                let to = *index.entry(v).or_insert_with(|| {
                    level.push(v);
                    b.add_vertex(j, Some(SubsetVertex(v).tag()))
                });
                b.add_edge(j, from, to, a.get(i, j - 1).clone())?;
            }
        }
        total += level.len();
        if total > MAX_SPARSE_VERTICES {
            return Err(Error::TooLarge {
                what: "sparse trellis vertices",
                n: total,
                max: MAX_SPARSE_VERTICES,
            });
        }
        masks.push(level);
    }
    let trellis = b.build()?;
    if !backward_prune {
        return Ok(SparseTrellis { trellis, masks });
    }
    let (pruned, maps) = if trellis.level_size(n) == 0 {
        let keep: Vec<Vec<bool>> = (0..=n).map(|j| vec![j == 0; trellis.level_size(j)]).collect();
        trellis.retain(&keep)
    } else {
        trellis.trim()
    };
    let masks = masks
        .iter()
        .zip(&maps)
        .map(|(level, map)| {
            level
                .iter()
                .zip(map)
                .filter(|(_, m)| m.is_some())
                .map(|(&v, _)| v)
                .collect()
        })
        .collect();
    Ok(SparseTrellis { trellis: pruned, masks })
}

/// `per(A)` as the flow of the pruned sparse trellis.
pub fn permanent_sparse<T: Semiring>(a: &Matrix<T>) -> Result<FlowResult<T>> {
    let st = build_sparse_trellis(a, true)?;
    viterbi_flow(&st.trellis)
}

/// Rows of `v` against the first `|v|` columns: the submatrix whose permanent
/// decides whether `v` appears in the forward construction.
pub fn presence_submatrix<T: Clone>(a: &Matrix<T>, v: u64) -> Result<Matrix<T>> {
    let rows: Vec<usize> = bits(v).collect();
    let cols: Vec<usize> = (0..rows.len()).collect();
    a.submatrix(&rows, &cols)
}

fn check_d(n: usize, d: &BigRational) -> Result<()> {
    if !d.is_positive() || d >= &BigRational::from_integer(n.into()) {
        return Err(Error::invalid(format!(
            "need 0 < d < n, got d = {} and n = {n}",
            format_rational(d)
        )));
    }
    Ok(())
}

/// Probability that a random `j x j` matrix with zero probability `q` has no
/// zero row and no zero column: `sum_k (-1)^k C(j, k) (q^k - q^j)^j`.
pub fn prob_event_b(j: usize, q: &BigRational) -> BigRational {
    let qj = pow(q, j);
    let mut total = BigRational::from(BigInt::zero());
    let mut c = BigInt::one();
    for k in 0..=j {
        let term = pow(&(pow(q, k) - &qj), j) * BigRational::from_integer(c.clone());
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        c = c * (j - k) / (k + 1);
    }
    total
}

/// Probability of no zero column: `(1 - q^j)^j`.
pub fn prob_event_c(j: usize, q: &BigRational) -> BigRational {
    pow(&(BigRational::from(BigInt::one()) - pow(q, j)), j)
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    num_traits::pow(x.clone(), e)
}

/// `U(n) = sum_j C(n, j) P(B_j)` with `q = 1 - d/n`, computed exactly.
///
/// With `q = a / b`, `b^{j^2} P(B_j)` is the integer
/// `sum_{k<j} (-1)^k C(j, k) a^{kj} (b^{j-k} - a^{j-k})^j`, so the whole sum
/// is accumulated over the common denominator `b^{n^2}`.
pub fn expected_vertices_u(n: usize, d: &BigRational) -> Result<BigRational> {
    check_d(n, d)?;
    let q = BigRational::from(BigInt::one()) - d / BigRational::from_integer(n.into());
    let (a, b) = (q.numer().clone(), q.denom().clone());
    let diff: Vec<BigInt> = (0..=n)
        .map(|m| num_traits::pow(b.clone(), m) - num_traits::pow(a.clone(), m))
        .collect();
    let mut total = BigInt::zero();
    let mut cn = BigInt::one();
    for j in 0..=n {
        let s = if j == 0 {
            BigInt::one()
        } else {
            let aj = num_traits::pow(a.clone(), j);
            let mut akj = BigInt::one();
            let mut cj = BigInt::one();
            let mut s = BigInt::zero();
            for k in 0..j {
                let term = &cj * &akj * num_traits::pow(diff[j - k].clone(), j);
                if k % 2 == 0 {
                    s += term;
                } else {
                    s -= term;
                }
                akj *= &aj;
                cj = cj * (j - k) / (k + 1);
            }
            s
        };
        total += &cn * s * num_traits::pow(b.clone(), n * n - j * j);
        cn = cn * (n - j) / (j + 1);
    }
    Ok(BigRational::new(total, num_traits::pow(b, n * n)))
}

/// `ln U(n)`, usable when `U(n)` overflows `f64`.
pub fn ln_expected_vertices_u(n: usize, d: &BigRational) -> Result<f64> {
    Ok(ln_abs_rational(&expected_vertices_u(n, d)?).1)
}

/// `2 - e^{-d}`.
pub fn phi_t(d: f64) -> f64 {
    2.0 - (-d).exp()
}

/// Growth constants of the sparse permanent bounds compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiConstants {
    pub d: u32,
    /// At most `dn` nonzero entries in total.
    pub phi1: f64,
    /// At most `d` nonzero entries per row.
    pub phi2: f64,
    /// At most `d` nonzero entries per row and per column.
    pub phi3: f64,
    /// Expected pruned-trellis size bound.
    pub phi_t: f64,
}

pub fn phi_constants(d: u32) -> PhiConstants {
    let df = f64::from(d);
    let m = 2f64.powf(df) - 1.0;
    PhiConstants {
        d,
        phi1: 2.0 * (1.0 - 2f64.powf(-2.0 * df)).powf(1.0 / (8.0 * df)),
        phi2: m.powf(1.0 / df),
        phi3: m.powf(1.0 / (df * df)) * 2f64.powf(1.0 - 1.0 / df),
        phi_t: phi_t(df),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiEstimate {
    pub d: u32,
    /// `(n, U(n)^{1/n})` for increasing `n`.
    pub roots: Vec<(usize, f64)>,
    /// The root at the largest `n`.
    pub estimate: f64,
}

/// Default sample points for [`estimate_phi_u`]: eight evenly spaced values
/// ending at `n_max`.
pub fn phi_sample_points(d: u32, n_max: usize) -> Vec<usize> {
    let step = (n_max / 8).max(1);
    let mut ns: Vec<usize> = (1..=8)
        .map(|k| k * step)
        .filter(|&n| n > d as usize && n < n_max)
        .collect();
    ns.push(n_max);
    ns
}

/// `U(n)^{1/n}` at the given sample points.
pub fn estimate_phi_u(d: u32, ns: &[usize]) -> Result<PhiEstimate> {
    let dq = BigRational::from_integer(d.into());
    let roots = ns
        .iter()
        .map(|&n| Ok((n, (ln_expected_vertices_u(n, &dq)? / n as f64).exp())))
        .collect::<Result<Vec<_>>>()?;
    let estimate = roots
        .last()
        .map(|r| r.1)
        .ok_or_else(|| Error::invalid("no sample points"))?;
    Ok(PhiEstimate { d, roots, estimate })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseBenchReport {
    pub n: usize,
    pub d: String,
    pub trials: usize,
    pub seed: u64,
    pub mean_vertices: f64,
    /// Standard error of `mean_vertices`.
    pub se_vertices: f64,
    pub mean_edges: f64,
    pub mean_mults: f64,
    pub se_mults: f64,
    pub mean_adds: f64,
    /// Trials whose permanent is nonzero.
    pub nonzero_permanents: usize,
    pub expected_vertices_u: f64,
    pub mults_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct TrialStats {
    vertices: usize,
    edges: usize,
    mults: u64,
    adds: u64,
    nonzero: bool,
}

fn run_trial(m: &SparseModel) -> Result<TrialStats> {
    let a = random_sparse_matrix(m).to_f64();
    let st = build_sparse_trellis(&a, false)?;
    let t = &st.trellis;
    let flow = viterbi_flow(t)?;
    Ok(TrialStats {
        vertices: t.vertex_count(),
        edges: t.edge_count(),
        mults: flow.counter.mults,
        adds: flow.counter.adds,
        nonzero: flow.value != 0.0,
    })
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Measures the forward construction over `trials` matrices. Trial `k` uses
/// seed `seed + k`.
pub fn sparse_benchmark(m: &SparseModel, trials: usize) -> Result<SparseBenchReport> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let stats = (0..trials as u64)
        .into_par_iter()
        .map(|k| run_trial(&m.with_seed(m.seed.wrapping_add(k))))
        .collect::<Result<Vec<_>>>()?;
    let col = |f: fn(&TrialStats) -> f64| stats.iter().map(f).collect::<Vec<f64>>();
    let (mean_vertices, se_vertices) = mean_and_se(&col(|s| s.vertices as f64));
    let (mean_mults, se_mults) = mean_and_se(&col(|s| s.mults as f64));
    let (mean_edges, _) = mean_and_se(&col(|s| s.edges as f64));
    let (mean_adds, _) = mean_and_se(&col(|s| s.adds as f64));
    let u = rational_to_f64(&expected_vertices_u(m.n, &m.d)?);
    Ok(SparseBenchReport {
        n: m.n,
        d: format_rational(&m.d),
        trials,
        seed: m.seed,
        mean_vertices,
        se_vertices,
        mean_edges,
        mean_mults,
        se_mults,
        mean_adds,
        nonzero_permanents: stats.iter().filter(|s| s.nonzero).count(),
        expected_vertices_u: u,
        mults_bound: rational_to_f64(&m.d) * u,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FigRow {
    pub n: usize,
    pub method: &'static str,
    pub mults: f64,
}

/// Multiplication counts against `n` for integer `d`: the three prior-bound
/// curves `(n - 1) phi^n`, the trellis bounds `d phi_T^n` and `d U(n)`, and,
/// for `n <= measure_max`, the measured mean over `trials` random matrices.
pub fn fig_sparse_rows(d: u32, n_max: usize, measure_max: usize, trials: usize, seed: u64) -> Result<Vec<FigRow>> {
    let phi = phi_constants(d);
    let df = f64::from(d);
    let dq = BigRational::from_integer(d.into());
    let mut rows = Vec::new();
    for n in (d as usize + 1)..=n_max {
        let nf = n as f64;
        for (method, value) in [
            ("phi1", (nf - 1.0) * phi.phi1.powf(nf)),
            ("phi2", (nf - 1.0) * phi.phi2.powf(nf)),
            ("phi3", (nf - 1.0) * phi.phi3.powf(nf)),
            ("trellis-bound", df * phi.phi_t.powf(nf)),
            ("trellis-expected", df * rational_to_f64(&expected_vertices_u(n, &dq)?)),
        ] {
            rows.push(FigRow {
                n,
                method,
                mults: value,
            });
        }
        if n <= measure_max && trials > 0 {
            let report = sparse_benchmark(&SparseModel::new(n, dq.clone(), seed)?, trials)?;
            rows.push(FigRow {
                n,
                method: "trellis-measured",
                mults: report.mean_mults,
            });
        }
    }
    Ok(rows)
}
