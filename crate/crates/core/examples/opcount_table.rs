//! Measured operation counts of every method against their closed forms.

use permatrellis::oracles::opcount_table;

fn main() -> permatrellis::Result<()> {
    println!(
        "{:>3} {:<20} {:>10} {:>10} {:>10} {:>10}",
        "n", "method", "mults", "formula", "adds", "formula"
    );
    for row in opcount_table(2, 10)? {
        println!(
            "{:>3} {:<20} {:>10} {:>10} {:>10} {:>10}{}",
            row.n,
            row.method,
            row.mults_measured,
            row.mults_formula,
            row.adds_measured,
            row.adds_formula,
            if row.agrees() { "" } else { "  MISMATCH" }
        );
    }
    Ok(())
}
