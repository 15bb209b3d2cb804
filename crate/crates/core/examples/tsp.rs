//! Shortest tours by min-plus flow, and the tour trellis obtained by
//! intersecting the circular-permutation trellis with the walk trellis.

use permatrellis::trellis::is_level_isomorphic;
use permatrellis::tsp::{
    build_circular_trellis, build_tsp_trellis, build_walk_trellis, formulas, random_distances, solve_tsp,
    tsp_bruteforce, tsp_trellis_by_intersection,
};

fn main() -> permatrellis::Result<()> {
    let circ = build_circular_trellis(4)?;
    let walk = build_walk_trellis(4)?;
    let direct = build_tsp_trellis(4)?.trellis;
    let meet = tsp_trellis_by_intersection(4)?;
    println!(
        "n = 4: circular {} vertices, walks {} vertices",
        circ.vertex_count(),
        walk.vertex_count()
    );
    println!(
        "tour trellis {} vertices / {} edges, intersection isomorphic: {}",
        direct.vertex_count(),
        direct.edge_count(),
        is_level_isomorphic(&meet, &direct)?
    );

    let dm = random_distances(9, 50, true, 3);
    let s = solve_tsp(&dm, true)?;
    let (brute, _) = tsp_bruteforce(&dm)?;
    println!(
        "n = 9: length {} (brute force {brute}), tour {:?}",
        s.length,
        s.tour.unwrap_or_default()
    );
    println!(
        "additions {} (formula {}), comparisons {} (formula {})",
        s.additions,
        formulas::additions(9),
        s.comparisons,
        formulas::comparisons(9)
    );
    Ok(())
}
