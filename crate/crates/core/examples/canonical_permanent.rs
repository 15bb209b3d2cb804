//! Permanent of a small integer matrix on the canonical trellis, with the
//! operation counts next to their closed forms.

use num_rational::BigRational;
use permatrellis::canonical::{build_canonical, permanent_trellis, relabel_with_matrix};
use permatrellis::oracles::{formulas, permanent_naive};
use permatrellis::trellis::viterbi_flow;
use permatrellis::Matrix;

fn main() -> permatrellis::Result<()> {
    let a: Matrix<BigRational> =
        Matrix::from_ints(&[vec![1, 2, 0, 1], vec![3, 1, 1, 2], vec![0, 4, 2, 1], vec![1, 1, 1, 5]])?;
    let n = a.n() as u32;

    let flow = permanent_trellis(&a)?;
    println!("per(A) = {}", flow.value);
    println!("naive  = {}", permanent_naive(&a)?);
    println!(
        "mults {} (formula {}), adds {} (formula {}), peak width {}",
        flow.counter.mults,
        formulas::trellis_mults(n),
        flow.counter.adds,
        formulas::trellis_adds(n),
        flow.peak_width
    );

    // the same flow on the materialized trellis
    let t = relabel_with_matrix(&build_canonical(a.n())?, &a)?;
    let explicit = viterbi_flow(&t)?;
    println!(
        "materialized: {} vertices, {} edges, value {}",
        t.vertex_count(),
        t.edge_count(),
        explicit.value
    );
    Ok(())
}
