//! One trellis, three value domains: exact sums, floats and min-plus.

use num_rational::BigRational;
use permatrellis::trellis::{enumerate_paths, viterbi_best_path, viterbi_flow, TrellisBuilder, DEFAULT_PATH_CAP};
use permatrellis::{Symbol, Trellis, Tropical};

fn main() -> permatrellis::Result<()> {
    // a diamond of width two and length three
    let mut b = TrellisBuilder::new().alphabet(3);
    for j in 0..=3 {
        b.add_level();
        let width = if j == 0 || j == 3 { 1 } else { 2 };
        for v in 0..width {
            b.add_vertex(j, Some(format!("{j}{v}")));
        }
    }
    b.add_edge(1, 0, 0, 1)?;
    b.add_edge(1, 0, 1, 2)?;
    for (from, to, s) in [(0, 0, 3), (0, 1, 1), (1, 1, 2)] {
        b.add_edge(2, from, to, s)?;
    }
    b.add_edge(3, 0, 0, 2)?;
    b.add_edge(3, 1, 0, 3)?;
    let t: Trellis<Symbol> = b.build()?;
    println!("words: {}", enumerate_paths(&t, DEFAULT_PATH_CAP)?);

    let exact = t.map_labels(|_, &s| BigRational::from_integer((s as i64).into()));
    let float = t.map_labels(|j, &s| s as f64 / j as f64);
    let trop = t.map_labels(|_, &s| Tropical(s as f64));
    println!("sum-product exact: {}", viterbi_flow(&exact)?.value);
    println!("sum-product float: {}", viterbi_flow(&float)?.value);
    let (best, path) = viterbi_best_path(&trop)?;
    let tags: Vec<&str> = path
        .unwrap_or_default()
        .iter()
        .map(|&v| t.tag(v).unwrap_or("?"))
        .collect();
    println!("min-plus: {} along {:?}", best.value, tags);
    println!("as JSON:\n{}", exact.to_json_string());
    Ok(())
}
