//! Vertex merging.
//!
//! Merging `v` and `v'` replaces them by one vertex `v*`. An edge `(w, v*)`
//! carries the sum of the labels of `(w, v)` and `(w, v')`; an edge `(v*, w)`
//! carries half their sum, where a missing edge contributes nothing. When
//! the pair is mergeable the path multiset is unchanged.

use num_rational::BigRational;
use num_traits::One;

use super::paths::{future, past, Combination, FormalLabel};
use super::{Edge, Symbol, Trellis, VertexId};
use crate::error::{Error, Result};

/// Labels closed under addition and halving.
pub trait MergeLabel: Clone {
    fn merge_add(&self, other: &Self) -> Self;
    fn halve(&self) -> Self;
}

impl MergeLabel for Combination {
    fn merge_add(&self, other: &Self) -> Self {
        self.plus(other)
    }
    fn halve(&self) -> Self {
        self.scale(&BigRational::new(1.into(), 2.into()))
    }
}

impl MergeLabel for BigRational {
    fn merge_add(&self, other: &Self) -> Self {
        self + other
    }
    fn halve(&self) -> Self {
        self / BigRational::from_integer(2.into())
    }
}

/// Whether `P(v)F(v) + P(v')F(v') = P(v)F(v') + P(v')F(v)`.
pub fn is_mergeable<L: FormalLabel>(t: &Trellis<L>, v: VertexId, w: VertexId, cap: u128) -> Result<bool> {
    if v == w {
        return Err(Error::SameVertex);
    }
    let (pv, fv) = (past(t, v, cap)?, future(t, v, cap)?);
    let (pw, fw) = (past(t, w, cap)?, future(t, w, cap)?);
    let worst = [pv.len(), pw.len()].iter().max().copied().unwrap_or(0) as u128
        * [fv.len(), fw.len()].iter().max().copied().unwrap_or(0) as u128;
    if worst > cap {
        return Err(Error::EnumerationCap { count: worst, cap });
    }
    let lhs = pv.concat(&fv).plus(&pw.concat(&fw));
    let rhs = pv.concat(&fw).plus(&pw.concat(&fv));
    Ok(lhs == rhs)
}

/// Merges `v` and `w`. Mergeability is the caller's obligation. The merged
/// vertex takes the smaller index of the two.
pub fn merge_vertices<L: MergeLabel>(t: &Trellis<L>, v: VertexId, w: VertexId) -> Result<Trellis<L>> {
    for x in [v, w] {
        if !t.contains(x) {
            return Err(Error::NoSuchVertex {
                level: x.level,
                index: x.index,
            });
        }
    }
    if v.level != w.level {
        return Err(Error::LevelMismatch(v.level, w.level));
    }
    if v == w {
        return Err(Error::SameVertex);
    }
    let j = v.level;
    let (keep, drop) = (v.index.min(w.index), v.index.max(w.index));
    let remap = |i: usize| -> usize {
        if i == drop {
            keep
        } else if i > drop {
            i - 1
        } else {
            i
        }
    };
    let (mut tags, mut incoming, alphabet) = t.clone().into_parts();

    let merged_tag = match (&tags[j][keep], &tags[j][drop]) {
        (Some(a), Some(b)) => Some(format!("{a}|{b}")),
        (a, b) => a.clone().or_else(|| b.clone()),
    };
    tags[j][keep] = merged_tag;
    tags[j].remove(drop);

    if j > 0 {
        let level = &mut incoming[j - 1];
        let dropped = level.remove(drop);
        let kept = &mut level[keep];
        for e in dropped {
            match kept.iter_mut().find(|k| k.from == e.from) {
                Some(k) => k.label = k.label.merge_add(&e.label),
                None => kept.push(e),
            }
        }
    }
    if j < t.length() {
        for edges in incoming[j].iter_mut() {
            let mut out: Vec<Edge<L>> = Vec::with_capacity(edges.len());
            let mut merged: Option<usize> = None;
            for e in edges.drain(..) {
                if e.from == keep || e.from == drop {
                    match merged {
                        Some(pos) => out[pos].label = out[pos].label.merge_add(&e.label),
                        None => {
                            merged = Some(out.len());
                            out.push(Edge {
                                from: keep,
                                label: e.label,
                            });
                        }
                    }
                } else {
                    out.push(Edge {
                        from: remap(e.from),
                        label: e.label,
                    });
                }
            }
            if let Some(pos) = merged {
                out[pos].label = out[pos].label.halve();
            }
            *edges = out;
        }
    }
    Trellis::from_parts(tags, incoming, alphabet)
}

/// Finds the first mergeable pair, scanning from the deepest interior level
/// upward, and merges it.
pub fn merge_step(t: &Trellis<Combination>, cap: u128) -> Result<Option<(Trellis<Combination>, VertexId, VertexId)>> {
    let n = t.length();
    for j in (1..n).rev() {
        let size = t.level_size(j);
        for a in 0..size {
            for b in a + 1..size {
                let (v, w) = (VertexId::new(j, a), VertexId::new(j, b));
                if is_mergeable(t, v, w, cap)? {
                    return Ok(Some((merge_vertices(t, v, w)?, v, w)));
                }
            }
        }
    }
    Ok(None)
}

/// Merges until no mergeable pair remains.
pub fn merge_all(t: &Trellis<Combination>, cap: u128) -> Result<Trellis<Combination>> {
    let mut current = t.clone();
    while let Some((next, _, _)) = merge_step(&current, cap)? {
        current = next;
    }
    Ok(current)
}

impl Trellis<Symbol> {
    pub fn to_combinations(&self) -> Trellis<Combination> {
        self.map_labels(|_, s| Combination::symbol(*s))
    }
}

impl Trellis<Combination> {
    /// Back to plain symbols when every label is a single symbol with
    /// coefficient 1.
    pub fn to_symbols(&self) -> Option<Trellis<Symbol>> {
        self.try_map_labels(|level, c| {
            c.as_symbol()
                .ok_or_else(|| Error::InvalidTrellis(format!("label {c} at level {level} is not a symbol")))
        })
        .ok()
    }

    /// Whether every coefficient is 1.
    pub fn has_unit_coefficients(&self) -> bool {
        (1..=self.length()).all(|j| self.edges_at(j).all(|(_, _, c)| c.terms().all(|(_, k)| k.is_one())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trellis::paths::{enumerate_paths, PathMultiset, DEFAULT_PATH_CAP};
    use crate::trellis::TrellisBuilder;

    /// root -> {a, b} -> toor where both middle vertices have the same past
    /// words and one outgoing label each.
    #[test]
    fn identical_outgoing_labels_are_kept() {
        let mut b = TrellisBuilder::new();
        for j in 0..3 {
            b.add_level();
            b.add_vertex(j, Some(format!("v{j}")));
        }
        b.add_vertex(1, Some("w".into()));
        for (to, s) in [(0, 1), (1, 2)] {
            b.add_edge(1, 0, to, Combination::symbol(s)).unwrap();
        }
        b.add_edge(2, 0, 0, Combination::symbol(5)).unwrap();
        b.add_edge(2, 1, 0, Combination::symbol(5)).unwrap();
        let t = b.build().unwrap();
        let (a, w) = (VertexId::new(1, 0), VertexId::new(1, 1));
        assert!(is_mergeable(&t, a, w, 100).unwrap());
        let m = merge_vertices(&t, a, w).unwrap();
        assert_eq!(m.level_sizes(), vec![1, 1, 1]);
        assert_eq!(m.incoming(VertexId::new(2, 0))[0].label, Combination::symbol(5));
        assert_eq!(m.tag(VertexId::new(1, 0)), Some("v1|w"));
        assert_eq!(
            enumerate_paths(&m, DEFAULT_PATH_CAP).unwrap(),
            PathMultiset::from_words([vec![1, 5], vec![2, 5]])
        );
    }

    #[test]
    fn merge_preconditions() {
        let mut b: TrellisBuilder<Combination> = TrellisBuilder::new();
        b.add_level();
        b.add_vertex(0, None);
        b.add_level();
        b.add_vertex(1, None);
        b.add_vertex(1, None);
        let t = b.build().unwrap();
        let v = VertexId::new(1, 0);
        assert_eq!(merge_vertices(&t, v, v), Err(Error::SameVertex));
        assert_eq!(is_mergeable(&t, v, v, 10), Err(Error::SameVertex));
        assert_eq!(
            merge_vertices(&t, VertexId::new(0, 0), v),
            Err(Error::LevelMismatch(0, 1))
        );
    }
}
