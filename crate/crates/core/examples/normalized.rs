//! Dividing one column's entries into their rows turns that level's labels
//! into ones, which saves multiplications on the canonical trellis.

use permatrellis::canonical::{default_normalization_column, permanent_trellis, permanent_trellis_normalized};
use permatrellis::oracles::{formulas, table_matrix};

fn main() -> permatrellis::Result<()> {
    for n in [4usize, 7, 10] {
        let a = table_matrix(n, 7);
        let plain = permanent_trellis(&a)?;
        let col = default_normalization_column(n);
        let norm = permanent_trellis_normalized(&a, Some(col))?;
        println!(
            "n = {n:2}  column {col}: per {:.6e} vs {:.6e}, mults {} -> {} (formula {})",
            plain.value,
            norm.value,
            plain.counter.mults,
            norm.counter.mults,
            formulas::normalized_mults(n as u32)
        );
    }
    Ok(())
}
