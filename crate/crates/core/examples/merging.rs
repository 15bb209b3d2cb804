//! Merging vertices of the permutation tree until nothing is mergeable
//! recovers the subset trellis.

use permatrellis::canonical::{build_canonical, build_permutation_tree};
use permatrellis::trellis::{enumerate_paths, is_level_isomorphic, merge_step, DEFAULT_PATH_CAP};

fn main() -> permatrellis::Result<()> {
    for n in [3, 4] {
        let tree = build_permutation_tree(n)?;
        let code = enumerate_paths(&tree, DEFAULT_PATH_CAP)?;
        let mut t = tree.to_combinations();
        let mut merges = 0;
        while let Some((next, v, w)) = merge_step(&t, DEFAULT_PATH_CAP)? {
            assert_eq!(enumerate_paths(&next, DEFAULT_PATH_CAP)?, code);
            if n == 3 {
                println!(
                    "  merge {} and {} in level {}",
                    t.tag(v).unwrap_or("?"),
                    t.tag(w).unwrap_or("?"),
                    v.level
                );
            }
            t = next;
            merges += 1;
        }
        let merged = t.to_symbols().expect("labels stay plain symbols");
        println!(
            "S_{n}: {} -> {} vertices after {merges} merges, level sizes {:?}, matches T_{n}: {}",
            tree.vertex_count(),
            merged.vertex_count(),
            merged.level_sizes(),
            is_level_isomorphic(&merged, &build_canonical(n)?)?
        );
    }
    Ok(())
}
