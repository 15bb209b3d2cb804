//! Structural operations on symbol-labeled trellises.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use super::paths::{format_word, PathMultiset};
use super::{Edge, Symbol, Trellis};
use crate::error::{Error, Result};

/// Outgoing labels distinct at every vertex.
pub fn is_proper<L: PartialEq>(t: &Trellis<L>) -> bool {
    (0..t.length()).all(|j| {
        t.outgoing_lists(j).iter().all(|out| {
            out.iter()
                .enumerate()
                .all(|(i, (_, a))| out[..i].iter().all(|(_, b)| b != a))
        })
    })
}

/// Both outgoing and incoming labels distinct at every vertex.
pub fn is_biproper<L: PartialEq>(t: &Trellis<L>) -> bool {
    let co_proper = (1..=t.length()).all(|j| {
        t.level_incoming(j).iter().all(|edges| {
            edges
                .iter()
                .enumerate()
                .all(|(i, e)| edges[..i].iter().all(|f| f.label != e.label))
        })
    });
    co_proper && is_proper(t)
}

/// Whether `ac, ad, bc` in the code force `bd` for every split of the words.
/// Coefficients must be positive integers.
pub fn is_rectangular(code: &PathMultiset) -> Result<bool> {
    for (w, c) in code.iter() {
        if !crate::semiring::is_positive_integer(c) {
            return Err(Error::FractionalCode(format_word(w)));
        }
    }
    let mut words = code.words();
    let Some(first) = words.next() else {
        return Ok(true);
    };
    let n = first.len();
    if code.words().any(|w| w.len() != n) {
        return Err(Error::invalid("code words have different lengths"));
    }
    for k in 1..n {
        let mut by_prefix: HashMap<&[Symbol], BTreeSet<&[Symbol]>> = HashMap::new();
        for w in code.words() {
            by_prefix.entry(&w[..k]).or_default().insert(&w[k..]);
        }
        let mut owner: HashMap<&[Symbol], &BTreeSet<&[Symbol]>> = HashMap::new();
        for suffixes in by_prefix.values() {
            for s in suffixes {
                match owner.get(s) {
                    Some(other) if *other != suffixes => return Ok(false),
                    Some(_) => {}
                    None => {
                        owner.insert(s, suffixes);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Product trellis on `V_j x V'_j` keeping edge pairs with equal labels,
/// followed by removal of vertices on no complete path. Tags are joined
/// as `"a*b"`.
pub fn intersect(t: &Trellis<Symbol>, u: &Trellis<Symbol>) -> Result<Trellis<Symbol>> {
    if t.length() != u.length() {
        return Err(Error::Dimension(format!(
            "trellis lengths differ: {} vs {}",
            t.length(),
            u.length()
        )));
    }
    if let (Some(a), Some(b)) = (t.alphabet(), u.alphabet()) {
        if a != b {
            return Err(Error::AlphabetMismatch(a, b));
        }
    }
    let n = t.length();
    let pair_tag = |x: Option<&str>, y: Option<&str>| match (x, y) {
        (None, None) => None,
        (x, y) => Some(format!("{}*{}", x.unwrap_or("?"), y.unwrap_or("?"))),
    };
    // vertex levels are built lazily from reachable pairs
    let mut tags: Vec<Vec<Option<String>>> = Vec::with_capacity(n + 1);
    let mut incoming: Vec<Vec<Vec<Edge<Symbol>>>> = Vec::with_capacity(n);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..t.level_size(0) {
        for b in 0..u.level_size(0) {
            pairs.push((a, b));
        }
    }
    tags.push(
        pairs
            .iter()
            .map(|&(a, b)| pair_tag(t.level_tags(0)[a].as_deref(), u.level_tags(0)[b].as_deref()))
            .collect(),
    );
    for j in 1..=n {
        let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut next: Vec<(usize, usize)> = Vec::new();
        let mut next_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next_edges: Vec<Vec<Edge<Symbol>>> = Vec::new();
        for (a, ea) in t.level_incoming(j).iter().enumerate() {
            for (b, eb) in u.level_incoming(j).iter().enumerate() {
                for x in ea {
                    for y in eb {
                        if x.label != y.label {
                            continue;
                        }
                        let Some(&from) = index.get(&(x.from, y.from)) else {
                            continue;
                        };
                        let to = *next_index.entry((a, b)).or_insert_with(|| {
                            next.push((a, b));
                            next_edges.push(Vec::new());
                            next.len() - 1
                        });
                        next_edges[to].push(Edge { from, label: x.label });
                    }
                }
            }
        }
        tags.push(
            next.iter()
                .map(|&(a, b)| pair_tag(t.level_tags(j)[a].as_deref(), u.level_tags(j)[b].as_deref()))
                .collect(),
        );
        incoming.push(next_edges);
        pairs = next;
    }
    let alphabet = t.alphabet().or(u.alphabet());
    let product = Trellis::from_parts(tags, incoming, alphabet)?;
    Ok(product.trim().0)
}

/// Removes level 0 when the root has exactly one outgoing edge, making its
/// endpoint the new root. Returns the removed label and the shorter trellis.
pub fn fold_root_edge<L: Clone>(t: &Trellis<L>) -> Result<(L, Trellis<L>)> {
    if t.length() < 2 || t.level_size(0) != 1 || t.level_size(1) != 1 {
        return Err(Error::InvalidTrellis(
            "folding needs a single root edge into a one-vertex level".into(),
        ));
    }
    let root_edges = &t.level_incoming(1)[0];
    if root_edges.len() != 1 {
        return Err(Error::InvalidTrellis("root must have exactly one outgoing edge".into()));
    }
    let label = root_edges[0].label.clone();
    let (mut tags, mut incoming, alphabet) = t.clone().into_parts();
    tags.remove(0);
    incoming.remove(0);
    Ok((label, Trellis::from_parts(tags, incoming, alphabet)?))
}

/// Isomorphism of proper trellises that preserves levels and labels,
/// found by following labels from the root. Both trellises must be trimmed
/// (every vertex reachable from the root).
pub fn is_level_isomorphic(a: &Trellis<Symbol>, b: &Trellis<Symbol>) -> Result<bool> {
    if !is_proper(a) || !is_proper(b) {
        return Err(Error::invalid("level isomorphism is only decided for proper trellises"));
    }
    if a.level_sizes() != b.level_sizes() || a.edge_count() != b.edge_count() || a.level_size(0) != 1 {
        return Ok(false);
    }
    let mut map: Vec<Option<usize>> = vec![Some(0)];
    for j in 0..a.length() {
        let out_a = a.outgoing_lists(j);
        let out_b = b.outgoing_lists(j);
        let mut next: Vec<Option<usize>> = vec![None; a.level_size(j + 1)];
        let mut used = vec![false; b.level_size(j + 1)];
        for (u, image) in map.iter().enumerate() {
            let Some(image) = *image else {
                return Ok(false);
            };
            if out_a[u].len() != out_b[image].len() {
                return Ok(false);
            }
            for (dest, label) in &out_a[u] {
                let Some(&(dest_b, _)) = out_b[image].iter().find(|(_, l)| l == label) else {
                    return Ok(false);
                };
                match next[*dest] {
                    Some(existing) if existing != dest_b => return Ok(false),
                    Some(_) => {}
                    None => {
                        if used[dest_b] {
                            return Ok(false);
                        }
                        used[dest_b] = true;
                        next[*dest] = Some(dest_b);
                    }
                }
            }
        }
        if next.iter().any(Option::is_none) {
            return Ok(false);
        }
        map = next;
    }
    Ok(true)
}

/// Multiset intersection: the smaller coefficient of each shared word.
pub fn intersect_multisets(a: &PathMultiset, b: &PathMultiset) -> PathMultiset {
    let mut m = PathMultiset::new();
    for (w, c) in a.iter() {
        let d = b.coefficient(w);
        let k = if *c < d { c.clone() } else { d };
        if k > num_rational::BigRational::zero() {
            m.add_term(w.to_vec(), k);
        }
    }
    m
}
