//! Random sparse matrices: size of the pruned trellis against the expected
//! bound U(n), and the growth constants of earlier bounds.

use permatrellis::oracles::permanent_ryser;
use permatrellis::scalar::{ratio, rational_to_f64};
use permatrellis::sparse::{
    build_sparse_trellis, expected_vertices_u, permanent_sparse, phi_constants, random_sparse_matrix, sparse_benchmark,
    SparseModel,
};

fn main() -> permatrellis::Result<()> {
    let m = SparseModel::new(12, ratio(3, 1), 4)?;
    let a = random_sparse_matrix(&m);
    let full = build_sparse_trellis(&a, false)?.trellis.vertex_count();
    let pruned = build_sparse_trellis(&a, true)?.trellis.vertex_count();
    println!(
        "n = 12, d = 3: {full} vertices forward, {pruned} after pruning (dense: {})",
        1 << 12
    );
    let s = permanent_sparse(&a)?;
    println!(
        "per = {} with {} mults; Ryser agrees: {}",
        s.value,
        s.counter.mults,
        permanent_ryser(&a, true)?.0 == s.value
    );

    let report = sparse_benchmark(&SparseModel::new(20, ratio(3, 1), 1)?, 100)?;
    println!(
        "n = 20 over 100 trials: mean vertices {:.1} +- {:.1}, U(20) = {:.1}",
        report.mean_vertices, report.se_vertices, report.expected_vertices_u
    );
    println!("U(2) at d = 1 is {}", expected_vertices_u(2, &ratio(1, 1))?);
    for d in 2..=6 {
        let p = phi_constants(d);
        let u50 = rational_to_f64(&expected_vertices_u(50, &ratio(d as i64, 1))?);
        println!(
            "d = {d}: phi1 {:.5} phi2 {:.5} phi3 {:.5} phiT {:.5}  U(50)^(1/50) {:.5}",
            p.phi1,
            p.phi2,
            p.phi3,
            p.phi_t,
            u50.powf(1.0 / 50.0)
        );
    }
    Ok(())
}
