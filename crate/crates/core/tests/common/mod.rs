#![allow(dead_code)]

use num_rational::BigRational;
use permatrellis::scalar::ratio;
use permatrellis::trellis::TrellisBuilder;
use permatrellis::{Matrix, Symbol, Trellis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries `p / q` with `p` in `-5..=5` and `q` in `1..=4`, about a fifth of
/// them zero.
pub fn random_rational_matrix(n: usize, r: &mut impl Rng) -> Matrix<BigRational> {
    Matrix::from_fn(n, |_, _| ratio(r.gen_range(-5..=5), r.gen_range(1..=4)))
}

pub fn random_rational(r: &mut impl Rng, max_den: i64) -> BigRational {
    let q = r.gen_range(1..=max_den);
    ratio(r.gen_range(0..=q), q)
}

/// A trellis with a single root and toor, interior widths in `1..=max_width`
/// and each possible edge present with probability one half, labeled by
/// symbols in `1..=alphabet`.
pub fn random_trellis(seed: u64, length: usize, max_width: usize, alphabet: u32) -> Trellis<Symbol> {
    let mut r = rng(seed);
    let mut b = TrellisBuilder::new().alphabet(alphabet as usize);
    let mut widths = vec![1];
    for _ in 1..length {
        widths.push(r.gen_range(1..=max_width));
    }
    widths.push(1);
    for (j, &w) in widths.iter().enumerate() {
        b.add_level();
        for v in 0..w {
            b.add_vertex(j, Some(format!("{j}.{v}")));
        }
    }
    for j in 1..=length {
        for to in 0..widths[j] {
            for from in 0..widths[j - 1] {
                if r.gen_bool(0.5) {
                    b.add_edge(j, from, to, r.gen_range(1..=alphabet)).unwrap();
                }
            }
        }
    }
    b.build().unwrap()
}
