//! Formal sums of label strings with rational coefficients.
//!
//! A [`PathMultiset`] is an element of the semigroup algebra over label
//! strings: concatenation distributes over the formal sum. Pasts, futures and
//! the full path multiset of a trellis are all computed in this algebra.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Symbol, Trellis, VertexId};
use crate::error::{Error, Result};
use crate::scalar::format_rational;

pub const DEFAULT_PATH_CAP: u128 = 1_000_000;

/// A formal rational combination of single symbols, the label type of
/// trellises produced by merging.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Combination {
    terms: BTreeMap<Symbol, BigRational>,
}

impl Combination {
    pub fn symbol(s: Symbol) -> Self {
        Combination::term(s, BigRational::one())
    }

    pub fn term(s: Symbol, coeff: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(s, coeff);
        }
        Combination { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Symbol, &BigRational)> {
        self.terms.iter().map(|(s, c)| (*s, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The symbol when this is exactly one symbol with coefficient 1.
    pub fn as_symbol(&self) -> Option<Symbol> {
        match self.terms.iter().next() {
            Some((s, c)) if self.terms.len() == 1 && c.is_one() => Some(*s),
            _ => None,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (s, c) in &other.terms {
            let entry = terms.entry(*s).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(s);
            }
        }
        Combination { terms }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Combination::default();
        }
        Combination {
            terms: self.terms.iter().map(|(s, c)| (*s, c * k)).collect(),
        }
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "{}*{s}", format_rational(c))?;
            }
        }
        Ok(())
    }
}

/// Labels that can be read as formal combinations of symbols.
pub trait FormalLabel {
    fn formal_terms(&self) -> Vec<(Symbol, BigRational)>;
}

impl FormalLabel for Symbol {
    fn formal_terms(&self) -> Vec<(Symbol, BigRational)> {
        vec![(*self, BigRational::one())]
    }
}

impl FormalLabel for Combination {
    fn formal_terms(&self) -> Vec<(Symbol, BigRational)> {
        self.terms.iter().map(|(s, c)| (*s, c.clone())).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathMultiset {
    terms: BTreeMap<Vec<Symbol>, BigRational>,
}

impl PathMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// `1 * (empty word)`, the identity for concatenation.
    pub fn unit() -> Self {
        PathMultiset::singleton(Vec::new(), BigRational::one())
    }

    pub fn singleton(word: Vec<Symbol>, coeff: BigRational) -> Self {
        let mut m = PathMultiset::new();
        m.add_term(word, coeff);
        m
    }

    /// Each word with coefficient 1, repeated words accumulating.
    pub fn from_words<I: IntoIterator<Item = Vec<Symbol>>>(words: I) -> Self {
        let mut m = PathMultiset::new();
        for w in words {
            m.add_term(w, BigRational::one());
        }
        m
    }

    pub fn add_term(&mut self, word: Vec<Symbol>, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(word);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (w, c) in &other.terms {
            m.add_term(w.clone(), c.clone());
        }
        m
    }

    /// Concatenation product: every word of `self` followed by every word of `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut m = PathMultiset::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                m.add_term(w, ca * cb);
            }
        }
        m
    }

    /// Appends one formal label to every word.
    fn extend_by(&self, label: &[(Symbol, BigRational)], into: &mut PathMultiset) {
        for (w, c) in &self.terms {
            for (s, k) in label {
                let mut word = w.clone();
                word.push(*s);
                into.add_term(word, c * k);
            }
        }
    }

    /// Prepends one formal label to every word.
    fn prefix_by(&self, label: &[(Symbol, BigRational)], into: &mut PathMultiset) {
        for (w, c) in &self.terms {
            for (s, k) in label {
                let mut word = Vec::with_capacity(w.len() + 1);
                word.push(*s);
                word.extend_from_slice(w);
                into.add_term(word, c * k);
            }
        }
    }

    pub fn coefficient(&self, word: &[Symbol]) -> BigRational {
        self.terms.get(word).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn contains(&self, word: &[Symbol]) -> bool {
        self.terms.contains_key(word)
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Symbol], &BigRational)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn words(&self) -> impl Iterator<Item = &[Symbol]> {
        self.terms.keys().map(Vec::as_slice)
    }

    /// Sum of all coefficients, the multiset's size when coefficients are counts.
    pub fn total(&self) -> BigRational {
        self.terms.values().sum()
    }

    /// Evaluates the formal sum with `weight(position, symbol)` substituted
    /// for each letter. Positions are 1-based.
    pub fn evaluate<T>(&self, weight: impl Fn(usize, Symbol) -> T) -> T
    where
        T: crate::semiring::Field,
    {
        let mut total = T::zero();
        for (w, c) in &self.terms {
            let mut term = T::from_bigint(c.numer());
            if let Some(inv) = T::from_bigint(c.denom()).recip() {
                term = term.times(&inv);
            }
            for (i, s) in w.iter().enumerate() {
                term = term.times(&weight(i + 1, *s));
            }
            total = total.plus(&term);
        }
        total
    }
}

pub(crate) fn format_word(w: &[Symbol]) -> String {
    if w.iter().all(|&s| s < 10) {
        w.iter().map(|s| s.to_string()).collect()
    } else {
        w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for PathMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let word = format_word(w);
            if c.is_one() {
                f.write_str(&word)?;
            } else {
                write!(f, "{}({word})", format_rational(c))?;
            }
        }
        Ok(())
    }
}

fn check_cap(count: u128, cap: u128) -> Result<()> {
    if count > cap {
        Err(Error::EnumerationCap { count, cap })
    } else {
        Ok(())
    }
}

/// Upper bound on the number of word terms produced by forward expansion
/// up to `level`, per vertex.
fn forward_counts<L: FormalLabel>(t: &Trellis<L>, level: usize) -> Vec<Vec<u128>> {
    let mut counts = vec![vec![1u128; t.level_size(0)]];
    for j in 1..=level {
        let prev = &counts[j - 1];
        let next = t
            .level_incoming(j)
            .iter()
            .map(|edges| {
                edges.iter().fold(0u128, |acc, e| {
                    acc.saturating_add(prev[e.from].saturating_mul(e.label.formal_terms().len() as u128))
                })
            })
            .collect();
        counts.push(next);
    }
    counts
}

fn forward<L: FormalLabel>(t: &Trellis<L>, level: usize, cap: u128) -> Result<Vec<PathMultiset>> {
    let counts = forward_counts(t, level);
    let total = counts.iter().flatten().fold(0u128, |a, &c| a.saturating_add(c));
    check_cap(total, cap)?;
    let mut current = vec![PathMultiset::unit(); t.level_size(0)];
    for j in 1..=level {
        let next = t
            .level_incoming(j)
            .iter()
            .map(|edges| {
                let mut m = PathMultiset::new();
                for e in edges {
                    current[e.from].extend_by(&e.label.formal_terms(), &mut m);
                }
                m
            })
            .collect();
        current = next;
    }
    Ok(current)
}

fn backward<L: FormalLabel>(t: &Trellis<L>, level: usize, cap: u128) -> Result<Vec<PathMultiset>> {
    let n = t.length();
    let mut counts = vec![1u128; t.level_size(n)];
    for j in (level..n).rev() {
        let mut next = vec![0u128; t.level_size(j)];
        for (to, edges) in t.level_incoming(j + 1).iter().enumerate() {
            for e in edges {
                next[e.from] =
                    next[e.from].saturating_add(counts[to].saturating_mul(e.label.formal_terms().len() as u128));
            }
        }
        counts = next;
    }
    check_cap(counts.iter().fold(0u128, |a, &c| a.saturating_add(c)), cap)?;

    let mut current = vec![PathMultiset::unit(); t.level_size(n)];
    for j in (level..n).rev() {
        let mut next = vec![PathMultiset::new(); t.level_size(j)];
        for (to, edges) in t.level_incoming(j + 1).iter().enumerate() {
            for e in edges {
                let mut m = std::mem::take(&mut next[e.from]);
                current[to].prefix_by(&e.label.formal_terms(), &mut m);
                next[e.from] = m;
            }
        }
        current = next;
    }
    Ok(current)
}

/// The formal sum of all root-to-toor label strings. When the last level
/// has several vertices, paths ending at any of them are included.
pub fn enumerate_paths<L: FormalLabel>(t: &Trellis<L>, cap: u128) -> Result<PathMultiset> {
    let last = forward(t, t.length(), cap)?;
    Ok(last.iter().fold(PathMultiset::new(), |acc, m| acc.plus(m)))
}

/// `P(v)`: label strings of paths from level 0 to `v`.
pub fn past<L: FormalLabel>(t: &Trellis<L>, v: VertexId, cap: u128) -> Result<PathMultiset> {
    if !t.contains(v) {
        return Err(Error::NoSuchVertex {
            level: v.level,
            index: v.index,
        });
    }
    Ok(forward(t, v.level, cap)?.swap_remove(v.index))
}

/// `F(v)`: label strings of paths from `v` to the last level.
pub fn future<L: FormalLabel>(t: &Trellis<L>, v: VertexId, cap: u128) -> Result<PathMultiset> {
    if !t.contains(v) {
        return Err(Error::NoSuchVertex {
            level: v.level,
            index: v.index,
        });
    }
    Ok(backward(t, v.level, cap)?.swap_remove(v.index))
}
