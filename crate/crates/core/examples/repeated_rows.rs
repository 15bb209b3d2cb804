//! A matrix with repeated rows: the tuple trellis is much narrower than the
//! subset trellis, and its flow times the multiplicity factorials is the
//! permanent.

use permatrellis::oracles::{formulas, permanent_clifford, permanent_naive};
use permatrellis::repeated::{intermediate_flow_check, permanent_repeated, repeated_op_bounds, RepeatedRowSpec};
use permatrellis::scalar::ratio;

fn main() -> permatrellis::Result<()> {
    let rows = vec![
        (1..=7).map(|j| ratio(j, 1)).collect(),
        (1..=7).map(|j| ratio(8 - j, 2)).collect(),
        (1..=7).map(|j| ratio(j % 3, 1)).collect(),
    ];
    let spec = RepeatedRowSpec::new(rows, vec![3, 2, 2])?;
    let r = permanent_repeated(&spec)?;
    println!("per = {} = {} * {}", r.value, r.scale, r.flow.value);
    println!("naive per = {}", permanent_naive(&spec.expand())?);
    let (mb, ab) = repeated_op_bounds(spec.mults());
    println!(
        "{} vertices, {} edges; mults {} <= {mb}, adds {} <= {ab}",
        r.vertices, r.edges, r.flow.counter.mults, r.flow.counter.adds
    );
    let (c, ctr) = permanent_clifford(&spec)?;
    println!(
        "binomial-weighted formula: {c}, mults {} (closed form {}), adds {} (closed form {})",
        ctr.mults,
        formulas::clifford_mults(spec.n(), spec.mults()),
        ctr.adds,
        formulas::clifford_adds(spec.n(), spec.mults())
    );
    let lambda = [1, 1, 0];
    println!(
        "intermediate vertex {lambda:?}: per of its prefix matrix = {}",
        intermediate_flow_check(&spec, &lambda)?
    );
    Ok(())
}
