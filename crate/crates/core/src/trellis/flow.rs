//! Viterbi-style flow over a semiring.
//!
//! `mu(root) = 1` and `mu(v) = sum over incoming (u, v) of L(u, v) * mu(u)`.
//! Edges leaving the root contribute their label directly, so a full pass
//! costs `|E| - deg(root)` multiplications and `|E| - |V| + 1` additions when
//! every non-root vertex is reachable. Only two level buffers are kept.

use std::fmt;

use rayon::prelude::*;

use super::{Edge, Trellis, VertexId};
use crate::error::{Error, Result};
use crate::semiring::{OpCounter, Semiring, Tropical};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlowOptions {
    /// Evaluate each level's vertices on the rayon pool. Per-vertex
    /// reduction order is unchanged, so results are identical.
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowDiagnostic {
    /// Vertices without incoming edges below the root level; their flow is zero.
    Unreachable { level: usize, count: usize },
    /// A level with no vertices; every later flow is zero.
    EmptyLevel(usize),
}

impl fmt::Display for FlowDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowDiagnostic::Unreachable { level, count } => {
                write!(f, "{count} vertices in level {level} have no incoming edges")
            }
            FlowDiagnostic::EmptyLevel(level) => write!(f, "level {level} is empty"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowResult<S> {
    pub value: S,
    pub counter: OpCounter,
    pub peak_width: usize,
    pub diagnostics: Vec<FlowDiagnostic>,
}

/// Flows of every vertex in the final level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelFlows<S> {
    pub flows: Vec<S>,
    pub counter: OpCounter,
    pub peak_width: usize,
    pub diagnostics: Vec<FlowDiagnostic>,
}

fn vertex_flow<S: Semiring>(edges: &[Edge<S>], prev: &[S], from_root: bool, ctr: &mut OpCounter) -> S {
    let mut acc: Option<S> = None;
    for e in edges {
        let term = if from_root {
            e.label.clone()
        } else {
            ctr.times(&e.label, &prev[e.from])
        };
        acc = Some(match acc {
            None => term,
            Some(a) => ctr.plus(&a, &term),
        });
    }
    acc.unwrap_or_else(S::zero)
}

fn next_level<S: Semiring>(
    incoming: &[Vec<Edge<S>>],
    prev: &[S],
    from_root: bool,
    parallel: bool,
) -> (Vec<S>, OpCounter) {
    if parallel {
        let results: Vec<(S, OpCounter)> = incoming
            .par_iter()
            .map(|edges| {
                let mut ctr = OpCounter::new();
                let value = vertex_flow(edges, prev, from_root, &mut ctr);
                (value, ctr)
            })
            .collect();
        let ctr = results.iter().map(|(_, c)| *c).sum();
        (results.into_iter().map(|(v, _)| v).collect(), ctr)
    } else {
        let mut ctr = OpCounter::new();
        let values = incoming
            .iter()
            .map(|edges| vertex_flow(edges, prev, from_root, &mut ctr))
            .collect();
        (values, ctr)
    }
}

fn check_root<L>(t: &Trellis<L>) -> Result<()> {
    if t.level_size(0) != 1 {
        return Err(Error::InvalidTrellis(format!(
            "expected a single root, level 0 has {} vertices",
            t.level_size(0)
        )));
    }
    Ok(())
}

fn diagnose<L>(t: &Trellis<L>, level: usize, diagnostics: &mut Vec<FlowDiagnostic>) {
    if t.level_size(level) == 0 {
        if !diagnostics.iter().any(|d| matches!(d, FlowDiagnostic::EmptyLevel(_))) {
            diagnostics.push(FlowDiagnostic::EmptyLevel(level));
        }
        return;
    }
    let count = t.level_incoming(level).iter().filter(|e| e.is_empty()).count();
    if count > 0 {
        diagnostics.push(FlowDiagnostic::Unreachable { level, count });
    }
}

pub fn viterbi_final_level<S: Semiring>(t: &Trellis<S>, opts: FlowOptions) -> Result<LevelFlows<S>> {
    check_root(t)?;
    let mut current = vec![S::one()];
    let mut counter = OpCounter::new();
    let mut diagnostics = Vec::new();
    for j in 1..=t.length() {
        diagnose(t, j, &mut diagnostics);
        let (next, ctr) = next_level(t.level_incoming(j), &current, j == 1, opts.parallel);
        counter += ctr;
        current = next;
    }
    Ok(LevelFlows {
        flows: current,
        counter,
        peak_width: t.peak_width(),
        diagnostics,
    })
}

/// Flow at the toor. An empty final level yields zero with a diagnostic.
pub fn viterbi_flow_with<S: Semiring>(t: &Trellis<S>, opts: FlowOptions) -> Result<FlowResult<S>> {
    let n = t.length();
    if t.level_size(n) > 1 {
        return Err(Error::InvalidTrellis(format!(
            "expected a single toor, level {n} has {} vertices",
            t.level_size(n)
        )));
    }
    let level = viterbi_final_level(t, opts)?;
    Ok(FlowResult {
        value: level.flows.into_iter().next().unwrap_or_else(S::zero),
        counter: level.counter,
        peak_width: level.peak_width,
        diagnostics: level.diagnostics,
    })
}

pub fn viterbi_flow<S: Semiring>(t: &Trellis<S>) -> Result<FlowResult<S>> {
    viterbi_flow_with(t, FlowOptions::default())
}

/// Flows of every vertex of every level. Same operation counts as the
/// two-buffer pass; memory is `O(|V|)`.
pub fn viterbi_all_levels<S: Semiring>(t: &Trellis<S>) -> Result<(Vec<Vec<S>>, OpCounter)> {
    check_root(t)?;
    let mut levels = vec![vec![S::one()]];
    let mut counter = OpCounter::new();
    for j in 1..=t.length() {
        let (next, ctr) = next_level(t.level_incoming(j), &levels[j - 1], j == 1, false);
        counter += ctr;
        levels.push(next);
    }
    Ok((levels, counter))
}

/// Min-plus flow with back-pointers. Returns the flow and the root-to-toor
/// vertex sequence achieving it, or `None` when the toor is unreachable.
/// Among equal candidates the first incoming edge wins.
pub fn viterbi_best_path(t: &Trellis<Tropical>) -> Result<(FlowResult<Tropical>, Option<Vec<VertexId>>)> {
    check_root(t)?;
    let n = t.length();
    if t.level_size(n) != 1 {
        return Err(Error::InvalidTrellis(format!(
            "expected a single toor, level {n} has {} vertices",
            t.level_size(n)
        )));
    }
    let mut counter = OpCounter::new();
    let mut diagnostics = Vec::new();
    let mut current = vec![Tropical(0.0)];
    let mut back: Vec<Vec<Option<usize>>> = Vec::with_capacity(n);
    for j in 1..=n {
        diagnose(t, j, &mut diagnostics);
        let mut next = Vec::with_capacity(t.level_size(j));
        let mut pointers = Vec::with_capacity(t.level_size(j));
        for edges in t.level_incoming(j) {
            let mut best: Option<(Tropical, usize)> = None;
            for e in edges {
                let term = if j == 1 {
                    e.label
                } else {
                    counter.times(&e.label, &current[e.from])
                };
                best = Some(match best {
                    None => (term, e.from),
                    Some((b, from)) => {
                        let m = counter.plus(&b, &term);
                        if term.0 < b.0 {
                            (m, e.from)
                        } else {
                            (b, from)
                        }
                    }
                });
            }
            match best {
                Some((value, from)) if !value.is_infinite() => {
                    next.push(value);
                    pointers.push(Some(from));
                }
                Some((value, _)) => {
                    next.push(value);
                    pointers.push(None);
                }
                None => {
                    next.push(Tropical::INFINITY);
                    pointers.push(None);
                }
            }
        }
        back.push(pointers);
        current = next;
    }
    let value = current[0];
    let path = if value.is_infinite() {
        None
    } else {
        let mut path = vec![VertexId::new(n, 0)];
        let mut index = 0;
        for j in (1..=n).rev() {
            index = back[j - 1][index].expect("finite flow has a predecessor");
            path.push(VertexId::new(j - 1, index));
        }
        path.reverse();
        Some(path)
    };
    Ok((
        FlowResult {
            value,
            counter,
            peak_width: t.peak_width(),
            diagnostics,
        },
        path,
    ))
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::trellis::TrellisBuilder;

    fn r(p: i64) -> BigRational {
        BigRational::from_integer(p.into())
    }

    /// Diamond: root -> {a, b} -> toor.
    fn diamond<S: Clone>(ra: S, rb: S, at: S, bt: S) -> Trellis<S> {
        let mut b = TrellisBuilder::new();
        for j in 0..3 {
            b.add_level();
            b.add_vertex(j, None);
        }
        b.add_vertex(1, None);
        b.add_edge(1, 0, 0, ra).unwrap();
        b.add_edge(1, 0, 1, rb).unwrap();
        b.add_edge(2, 0, 0, at).unwrap();
        b.add_edge(2, 1, 0, bt).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn diamond_sum_product() {
        let t = diamond(r(2), r(3), r(5), r(7));
        let f = viterbi_flow(&t).unwrap();
        assert_eq!(f.value, r(2 * 5 + 3 * 7));
        assert_eq!((f.counter.mults, f.counter.adds), (2, 1));
        let m = t.complexity_measures();
        assert_eq!((m.mults, m.adds, m.space), (2, 1, 2));
        let par = viterbi_flow_with(&t, FlowOptions { parallel: true }).unwrap();
        assert_eq!(par, f);
    }

    #[test]
    fn diamond_min_plus_with_path() {
        let t = diamond(Tropical(1.0), Tropical(2.0), Tropical(5.0), Tropical(3.0));
        let (f, path) = viterbi_best_path(&t).unwrap();
        assert_eq!(f.value, Tropical(5.0));
        assert_eq!((f.counter.adds, f.counter.comparisons), (2, 1));
        assert_eq!(path.unwrap()[1], VertexId::new(1, 1));
        assert_eq!(viterbi_flow(&t).unwrap().value, Tropical(5.0));
    }

    #[test]
    fn ties_keep_first_edge() {
        let t = diamond(Tropical(1.0), Tropical(1.0), Tropical(1.0), Tropical(1.0));
        let (_, path) = viterbi_best_path(&t).unwrap();
        assert_eq!(path.unwrap()[1], VertexId::new(1, 0));
    }

    #[test]
    fn unreachable_vertex_is_reported() {
        let mut b = TrellisBuilder::new();
        b.add_level();
        b.add_vertex(0, None);
        b.add_level();
        b.add_vertex(1, None);
        b.add_vertex(1, None);
        b.add_level();
        b.add_vertex(2, None);
        b.add_edge(1, 0, 0, r(2)).unwrap();
        b.add_edge(2, 0, 0, r(3)).unwrap();
        b.add_edge(2, 1, 0, r(4)).unwrap();
        let f = viterbi_flow(&b.build().unwrap()).unwrap();
        assert_eq!(f.value, r(6));
        assert_eq!(f.diagnostics, vec![FlowDiagnostic::Unreachable { level: 1, count: 1 }]);
    }

    #[test]
    fn empty_level_gives_zero() {
        let mut b: TrellisBuilder<BigRational> = TrellisBuilder::new();
        b.add_level();
        b.add_vertex(0, None);
        b.add_level();
        b.add_level();
        let f = viterbi_flow(&b.build().unwrap()).unwrap();
        assert_eq!(f.value, r(0));
        assert_eq!(f.diagnostics, vec![FlowDiagnostic::EmptyLevel(1)]);
    }

    #[test]
    fn multiple_roots_are_rejected() {
        let mut b: TrellisBuilder<f64> = TrellisBuilder::new();
        b.add_level();
        b.add_vertex(0, None);
        b.add_vertex(0, None);
        assert!(viterbi_flow(&b.build().unwrap()).is_err());
    }
}
