//! Joint distribution of order statistics of independent variables with
//! different distributions.

use permatrellis::order_stats::{joint_probability, joint_probability_by_permanents, OrderStatQuery};
use permatrellis::scalar::ratio;

fn main() -> permatrellis::Result<()> {
    // P(min <= x) and P(max <= x) for two fair coins at threshold 1/2
    for rank in [1, 2] {
        let q = OrderStatQuery::new(vec![rank], vec![vec![ratio(1, 2)]; 2])?;
        println!("n = 2, rank {rank}: {}", joint_probability(&q)?.probability);
    }

    // P(X_(2) <= x_1, X_(4) <= x_2) for five variables
    let cdf = vec![
        vec![ratio(1, 3), ratio(2, 3)],
        vec![ratio(1, 4), ratio(1, 2)],
        vec![ratio(1, 5), ratio(4, 5)],
        vec![ratio(1, 2), ratio(3, 4)],
        vec![ratio(0, 1), ratio(1, 1)],
    ];
    let q = OrderStatQuery::new(vec![2, 4], cdf)?;
    let r = joint_probability(&q)?;
    println!("n = 5, ranks (2, 4): {}", r.probability);
    println!("by permanents:       {}", joint_probability_by_permanents(&q)?);
    println!(
        "{} tuple vertices (box of {}), {} mults",
        r.vertices, r.declared_vertices, r.counter.mults
    );
    Ok(())
}
