//! Leveled, edge-labeled DAGs with a designated root and toor.
//!
//! Vertices are addressed by `(level, index)`. Edges only join consecutive
//! levels and are stored per level as incoming lists keyed by destination,
//! which is the order the flow recursion consumes them in. Labels are generic:
//! [`Symbol`] for alphabet trellises, a semiring element for relabeled ones,
//! and [`Combination`] for trellises produced by vertex merging.

mod flow;
mod json;
mod merge;
mod ops;
mod paths;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use flow::{
    viterbi_all_levels, viterbi_best_path, viterbi_final_level, viterbi_flow, viterbi_flow_with, FlowDiagnostic,
    FlowOptions, FlowResult, LevelFlows,
};
pub use json::{LabelJson, TrellisJson};
pub use merge::{is_mergeable, merge_all, merge_step, merge_vertices, MergeLabel};
pub use ops::{
    fold_root_edge, intersect, intersect_multisets, is_biproper, is_level_isomorphic, is_proper, is_rectangular,
};
pub use paths::{enumerate_paths, future, past, Combination, FormalLabel, PathMultiset, DEFAULT_PATH_CAP};

/// An alphabet symbol. Alphabets are `{1, ..., size}`.
pub type Symbol = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId {
    pub level: usize,
    pub index: usize,
}

impl VertexId {
    pub fn new(level: usize, index: usize) -> Self {
        VertexId { level, index }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<L> {
    /// Index of the source vertex in the previous level.
    pub from: usize,
    pub label: L,
}

/// Tags, incoming edge lists and alphabet size, level by level.
pub(crate) type Parts<L> = (Vec<Vec<Option<String>>>, Vec<Vec<Vec<Edge<L>>>>, Option<usize>);

#[derive(Clone, Debug, PartialEq)]
pub struct Trellis<L> {
    tags: Vec<Vec<Option<String>>>,
    /// `incoming[j - 1][v]` lists the edges entering vertex `v` of level `j`.
    incoming: Vec<Vec<Vec<Edge<L>>>>,
    alphabet: Option<usize>,
}

/// Graph-only operation counts of a flow on a trellis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityMeasures {
    /// `|E| - deg(root)`.
    pub mults: u64,
    /// `|E| - |V| + 1`.
    pub adds: u64,
    /// `max_j |V_j|`.
    pub space: u64,
}

impl<L> Trellis<L> {
    /// Number of edge levels `n`; vertex levels are `0..=n`.
    pub fn length(&self) -> usize {
        self.tags.len() - 1
    }

    pub fn alphabet(&self) -> Option<usize> {
        self.alphabet
    }

    pub fn level_size(&self, level: usize) -> usize {
        self.tags[level].len()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.tags.iter().map(Vec::len).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.tags.iter().map(Vec::len).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.incoming.iter().flatten().map(Vec::len).sum()
    }

    pub fn peak_width(&self) -> usize {
        self.tags.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.level < self.tags.len() && v.index < self.tags[v.level].len()
    }

    pub fn root(&self) -> Option<VertexId> {
        (self.tags[0].len() == 1).then_some(VertexId::new(0, 0))
    }

    pub fn toor(&self) -> Option<VertexId> {
        let n = self.length();
        (self.tags[n].len() == 1).then_some(VertexId::new(n, 0))
    }

    pub fn tag(&self, v: VertexId) -> Option<&str> {
        self.tags.get(v.level)?.get(v.index)?.as_deref()
    }

    pub fn level_tags(&self, level: usize) -> &[Option<String>] {
        &self.tags[level]
    }

    pub fn find_tag(&self, level: usize, tag: &str) -> Option<VertexId> {
        self.tags[level]
            .iter()
            .position(|t| t.as_deref() == Some(tag))
            .map(|index| VertexId::new(level, index))
    }

    /// Edges entering `v`. Empty for root-level vertices.
    pub fn incoming(&self, v: VertexId) -> &[Edge<L>] {
        if v.level == 0 {
            &[]
        } else {
            &self.incoming[v.level - 1][v.index]
        }
    }

    /// Incoming lists of every vertex of `level` (which must be at least 1).
    pub fn level_incoming(&self, level: usize) -> &[Vec<Edge<L>>] {
        &self.incoming[level - 1]
    }

    /// Outgoing adjacency of every vertex of `level`, as `(dest, label)`
    /// pairs in destination order.
    pub fn outgoing_lists(&self, level: usize) -> Vec<Vec<(usize, &L)>> {
        let mut out: Vec<Vec<(usize, &L)>> = vec![Vec::new(); self.tags[level].len()];
        if level < self.length() {
            for (dest, edges) in self.incoming[level].iter().enumerate() {
                for e in edges {
                    out[e.from].push((dest, &e.label));
                }
            }
        }
        out
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        if v.level >= self.length() {
            return 0;
        }
        self.incoming[v.level]
            .iter()
            .map(|edges| edges.iter().filter(|e| e.from == v.index).count())
            .sum()
    }

    /// Every edge of edge level `level` (1-based) as `(from, to, label)`.
    pub fn edges_at(&self, level: usize) -> impl Iterator<Item = (usize, usize, &L)> {
        self.incoming[level - 1]
            .iter()
            .enumerate()
            .flat_map(|(to, edges)| edges.iter().map(move |e| (e.from, to, &e.label)))
    }

    pub fn complexity_measures(&self) -> ComplexityMeasures {
        let edges = self.edge_count() as u64;
        let vertices = self.vertex_count() as u64;
        let root_degree = match self.root() {
            Some(r) => self.out_degree(r) as u64,
            None => 0,
        };
        ComplexityMeasures {
            mults: edges - root_degree,
            adds: (edges + 1).saturating_sub(vertices),
            space: self.peak_width() as u64,
        }
    }

    /// Relabels every edge; `f` receives the 1-based edge level.
    pub fn map_labels<M>(&self, mut f: impl FnMut(usize, &L) -> M) -> Trellis<M> {
        self.try_map_labels(|level, l| Ok(f(level, l))).expect("infallible")
    }

    pub fn try_map_labels<M>(&self, mut f: impl FnMut(usize, &L) -> Result<M>) -> Result<Trellis<M>> {
        let incoming = self
            .incoming
            .iter()
            .enumerate()
            .map(|(j, level)| {
                level
                    .iter()
                    .map(|edges| {
                        edges
                            .iter()
                            .map(|e| {
                                Ok(Edge {
                                    from: e.from,
                                    label: f(j + 1, &e.label)?,
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Trellis {
            tags: self.tags.clone(),
            incoming,
            alphabet: self.alphabet,
        })
    }

    pub fn with_alphabet(mut self, size: Option<usize>) -> Self {
        self.alphabet = size;
        self
    }

    pub(crate) fn into_parts(self) -> Parts<L> {
        (self.tags, self.incoming, self.alphabet)
    }

    /// Builds a trellis from raw parts, checking that every edge joins
    /// existing vertices of consecutive levels and that no two edges share
    /// both endpoints.
    pub fn from_parts(
        tags: Vec<Vec<Option<String>>>,
        incoming: Vec<Vec<Vec<Edge<L>>>>,
        alphabet: Option<usize>,
    ) -> Result<Self> {
        if tags.is_empty() {
            return Err(Error::InvalidTrellis("a trellis needs at least one level".into()));
        }
        if incoming.len() + 1 != tags.len() {
            return Err(Error::InvalidTrellis(format!(
                "{} vertex levels need {} edge levels, found {}",
                tags.len(),
                tags.len() - 1,
                incoming.len()
            )));
        }
        for (j, level) in incoming.iter().enumerate() {
            if level.len() != tags[j + 1].len() {
                return Err(Error::InvalidTrellis(format!(
                    "edge level {} has lists for {} vertices, level has {}",
                    j + 1,
                    level.len(),
                    tags[j + 1].len()
                )));
            }
            for (to, edges) in level.iter().enumerate() {
                let mut seen = HashSet::with_capacity(edges.len());
                for e in edges {
                    if e.from >= tags[j].len() {
                        return Err(Error::InvalidTrellis(format!(
                            "edge into ({}, {to}) starts at missing vertex ({j}, {})",
                            j + 1,
                            e.from
                        )));
                    }
                    if !seen.insert(e.from) {
                        return Err(Error::InvalidTrellis(format!(
                            "parallel edges ({j}, {}) -> ({}, {to})",
                            e.from,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(Trellis {
            tags,
            incoming,
            alphabet,
        })
    }
}

impl Trellis<Symbol> {
    /// Checks every label against the declared alphabet.
    pub fn check_symbols(&self) -> Result<()> {
        if let Some(size) = self.alphabet {
            for level in &self.incoming {
                for e in level.iter().flatten() {
                    if e.label == 0 || e.label as usize > size {
                        return Err(Error::SymbolOutOfRange { symbol: e.label, size });
                    }
                }
            }
        }
        Ok(())
    }
}

impl<L: Clone> Trellis<L> {
    /// Removes vertices that lie on no root-to-toor path. Returns the trimmed
    /// trellis and, per level, the map from old to new vertex indices.
    pub fn trim(&self) -> (Trellis<L>, Vec<Vec<Option<usize>>>) {
        let n = self.length();
        let mut alive: Vec<Vec<bool>> = self.tags.iter().map(|l| vec![false; l.len()]).collect();
        // forward reachability
        let mut reach: Vec<Vec<bool>> = alive.clone();
        reach[0].iter_mut().for_each(|r| *r = true);
        for j in 1..=n {
            for (v, edges) in self.incoming[j - 1].iter().enumerate() {
                reach[j][v] = edges.iter().any(|e| reach[j - 1][e.from]);
            }
        }
        alive[n].clone_from(&reach[n]);
        for j in (0..n).rev() {
            for (v, edges) in self.incoming[j].iter().enumerate() {
                if alive[j + 1][v] {
                    for e in edges {
                        if reach[j][e.from] {
                            alive[j][e.from] = true;
                        }
                    }
                }
            }
        }
        self.retain(&alive)
    }

    /// Keeps only the vertices flagged in `keep` and the edges between them.
    pub fn retain(&self, keep: &[Vec<bool>]) -> (Trellis<L>, Vec<Vec<Option<usize>>>) {
        let maps: Vec<Vec<Option<usize>>> = keep
            .iter()
            .map(|level| {
                let mut next = 0;
                level
                    .iter()
                    .map(|&k| {
                        k.then(|| {
                            next += 1;
                            next - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let tags = self
            .tags
            .iter()
            .zip(keep)
            .map(|(level, k)| {
                level
                    .iter()
                    .zip(k)
                    .filter(|(_, &k)| k)
                    .map(|(t, _)| t.clone())
                    .collect()
            })
            .collect();
        let incoming = self
            .incoming
            .iter()
            .enumerate()
            .map(|(j, level)| {
                level
                    .iter()
                    .zip(&keep[j + 1])
                    .filter(|(_, &k)| k)
                    .map(|(edges, _)| {
                        edges
                            .iter()
                            .filter_map(|e| {
                                maps[j][e.from].map(|from| Edge {
                                    from,
                                    label: e.label.clone(),
                                })
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        (
            Trellis {
                tags,
                incoming,
                alphabet: self.alphabet,
            },
            maps,
        )
    }
}

/// Incremental trellis construction.
#[derive(Clone, Debug)]
pub struct TrellisBuilder<L> {
    tags: Vec<Vec<Option<String>>>,
    incoming: Vec<Vec<Vec<Edge<L>>>>,
    alphabet: Option<usize>,
}

impl<L> Default for TrellisBuilder<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L> TrellisBuilder<L> {
    pub fn new() -> Self {
        TrellisBuilder {
            tags: Vec::new(),
            incoming: Vec::new(),
            alphabet: None,
        }
    }

    pub fn alphabet(mut self, size: usize) -> Self {
        self.alphabet = Some(size);
        self
    }

    /// Appends an empty vertex level and returns its index.
    pub fn add_level(&mut self) -> usize {
        if !self.tags.is_empty() {
            self.incoming.push(Vec::new());
        }
        self.tags.push(Vec::new());
        self.tags.len() - 1
    }

    pub fn add_vertex(&mut self, level: usize, tag: Option<String>) -> usize {
        self.tags[level].push(tag);
        if level > 0 {
            self.incoming[level - 1].push(Vec::new());
        }
        self.tags[level].len() - 1
    }

    /// Adds the edge `(level - 1, from) -> (level, to)`.
    pub fn add_edge(&mut self, level: usize, from: usize, to: usize, label: L) -> Result<()> {
        if level == 0 || level >= self.tags.len() {
            return Err(Error::InvalidTrellis(format!("no edge level {level}")));
        }
        if from >= self.tags[level - 1].len() {
            return Err(Error::NoSuchVertex {
                level: level - 1,
                index: from,
            });
        }
        if to >= self.tags[level].len() {
            return Err(Error::NoSuchVertex { level, index: to });
        }
        let list = &mut self.incoming[level - 1][to];
        if list.iter().any(|e| e.from == from) {
            return Err(Error::InvalidTrellis(format!(
                "parallel edges ({}, {from}) -> ({level}, {to})",
                level - 1
            )));
        }
        list.push(Edge { from, label });
        Ok(())
    }

    pub fn build(self) -> Result<Trellis<L>> {
        Trellis::from_parts(self.tags, self.incoming, self.alphabet)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trellis with one path labeled `1 2 ... n`.
    fn single_path(n: usize) -> Trellis<Symbol> {
        let mut b = TrellisBuilder::new().alphabet(n);
        b.add_level();
        b.add_vertex(0, None);
        for j in 1..=n {
            b.add_level();
            b.add_vertex(j, None);
            b.add_edge(j, 0, 0, j as Symbol).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn single_path_measures() {
        for n in 1..6 {
            let t = single_path(n);
            let m = t.complexity_measures();
            assert_eq!((m.mults, m.adds, m.space), (n as u64 - 1, 0, 1));
        }
    }

    #[test]
    fn parallel_edges_are_rejected() {
        let mut b = TrellisBuilder::new();
        b.add_level();
        b.add_vertex(0, None);
        b.add_level();
        b.add_vertex(1, None);
        b.add_edge(1, 0, 0, 1u32).unwrap();
        assert!(matches!(b.add_edge(1, 0, 0, 2u32), Err(Error::InvalidTrellis(_))));
        assert!(matches!(b.add_edge(1, 3, 0, 2u32), Err(Error::NoSuchVertex { .. })));
    }

    #[test]
    fn from_parts_validates_levels() {
        let tags = vec![vec![None], vec![None]];
        let bad = vec![vec![vec![Edge { from: 1, label: 1u32 }]]];
        assert!(Trellis::from_parts(tags.clone(), bad, None).is_err());
        let dup = vec![vec![vec![Edge { from: 0, label: 1u32 }, Edge { from: 0, label: 2 }]]];
        assert!(Trellis::from_parts(tags, dup, None).is_err());
    }

    #[test]
    fn trim_removes_dead_ends() {
        // root -> a -> toor, root -> b (dead end)
        let mut b = TrellisBuilder::new();
        b.add_level();
        b.add_vertex(0, None);
        b.add_level();
        b.add_vertex(1, Some("a".into()));
        b.add_vertex(1, Some("b".into()));
        b.add_level();
        b.add_vertex(2, None);
        b.add_edge(1, 0, 0, 1u32).unwrap();
        b.add_edge(1, 0, 1, 2u32).unwrap();
        b.add_edge(2, 0, 0, 3u32).unwrap();
        let t = b.build().unwrap();
        let (trimmed, maps) = t.trim();
        assert_eq!(trimmed.level_sizes(), vec![1, 1, 1]);
        assert_eq!(trimmed.tag(VertexId::new(1, 0)), Some("a"));
        assert_eq!(maps[1], vec![Some(0), None]);
    }

    #[test]
    fn symbols_are_checked_against_alphabet() {
        let t = single_path(3);
        assert!(t.check_symbols().is_ok());
        let t = t.with_alphabet(Some(2));
        assert!(matches!(
            t.check_symbols(),
            Err(Error::SymbolOutOfRange { symbol: 3, size: 2 })
        ));
    }
}
