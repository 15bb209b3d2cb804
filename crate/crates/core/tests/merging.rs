use permatrellis::canonical::{build_canonical, build_permutation_tree};
use permatrellis::trellis::{
    enumerate_paths, is_biproper, is_level_isomorphic, is_mergeable, is_rectangular, merge_all, merge_step,
    merge_vertices, PathMultiset, DEFAULT_PATH_CAP,
};
use permatrellis::{TrellisBuilder, VertexId};

#[test]
fn permutation_tree_merges_to_the_subset_trellis() {
    for n in 2..=4 {
        let tree = build_permutation_tree(n).unwrap();
        let code = enumerate_paths(&tree, DEFAULT_PATH_CAP).unwrap();
        let mut t = tree.to_combinations();
        while let Some((next, _, _)) = merge_step(&t, DEFAULT_PATH_CAP).unwrap() {
            assert_eq!(enumerate_paths(&next, DEFAULT_PATH_CAP).unwrap(), code);
            t = next;
        }
        assert!(t.has_unit_coefficients());
        let merged = t.to_symbols().unwrap();
        assert!(
            is_level_isomorphic(&merged, &build_canonical(n).unwrap()).unwrap(),
            "n = {n}"
        );
        assert_eq!(merge_all(&tree.to_combinations(), DEFAULT_PATH_CAP).unwrap(), t);
    }
}

#[test]
fn subset_trellis_is_fully_merged() {
    for n in 2..=5 {
        let t = build_canonical(n).unwrap();
        assert!(is_biproper(&t));
        for j in 1..n {
            for a in 0..t.level_size(j) {
                for b in a + 1..t.level_size(j) {
                    let (v, w) = (VertexId::new(j, a), VertexId::new(j, b));
                    assert!(!is_mergeable(&t, v, w, DEFAULT_PATH_CAP).unwrap(), "n = {n}, level {j}");
                }
            }
        }
    }
}

#[test]
fn permutations_form_a_rectangular_code() {
    for n in 1..=5 {
        let code = enumerate_paths(&build_permutation_tree(n).unwrap(), DEFAULT_PATH_CAP).unwrap();
        assert_eq!(code.len(), (1..=n).product::<usize>());
        assert!(is_rectangular(&code).unwrap());
    }
    let corner = PathMultiset::from_words([vec![0, 0], vec![0, 1], vec![1, 0]]);
    assert!(!is_rectangular(&corner).unwrap());
    let square = PathMultiset::from_words([vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    assert!(is_rectangular(&square).unwrap());
}

#[test]
fn merging_an_unmergeable_pair_changes_the_code() {
    // words 00 and 11 through two middle vertices
    let mut b = TrellisBuilder::new().alphabet(2);
    b.add_level();
    b.add_vertex(0, None);
    b.add_level();
    b.add_vertex(1, None);
    b.add_vertex(1, None);
    b.add_level();
    b.add_vertex(2, None);
    b.add_edge(1, 0, 0, 0).unwrap();
    b.add_edge(1, 0, 1, 1).unwrap();
    b.add_edge(2, 0, 0, 0).unwrap();
    b.add_edge(2, 1, 0, 1).unwrap();
    let t = b.build().unwrap().to_combinations();
    let (v, w) = (VertexId::new(1, 0), VertexId::new(1, 1));
    assert!(!is_mergeable(&t, v, w, DEFAULT_PATH_CAP).unwrap());
    let merged = merge_vertices(&t, v, w).unwrap();
    assert_eq!(merged.vertex_count(), 3);
    assert_ne!(
        enumerate_paths(&merged, DEFAULT_PATH_CAP).unwrap(),
        enumerate_paths(&t, DEFAULT_PATH_CAP).unwrap()
    );
    assert!(merge_step(&t, DEFAULT_PATH_CAP).unwrap().is_none());
    assert!(is_mergeable(&t, v, v, DEFAULT_PATH_CAP).is_err());
}
