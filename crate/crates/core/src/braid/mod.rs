//! Braid words on `N` strands: construction from crossing sequences,
//! free reduction, invariants and equivalence.

mod burau;
mod laurent;

pub use burau::{burau, letter_matrix, LMatrix};
pub use laurent::Laurent;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest conjugator tried by [`equivalent`].
pub const CONJUGATOR_BOUND: usize = 6;

/// `sigma_{gen, gen+1}^{sign}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub sign: i8,
}

impl Letter {
    pub fn new(gen: usize, sign: i8) -> Self {
        Self { gen, sign }
    }

    pub fn inverse(self) -> Self {
        Self { gen: self.gen, sign: -self.sign }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<Letter>,
}

impl BraidWord {
    pub fn identity(strands: usize) -> Self {
        Self { strands, letters: Vec::new() }
    }

    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self> {
        if strands < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 strands, got {strands}")));
        }
        for l in &letters {
            if l.gen == 0 || l.gen >= strands || !(l.sign == 1 || l.sign == -1) {
                return Err(Error::InvalidInput(format!(
                    "letter ({}, {}) invalid on {strands} strands",
                    l.gen, l.sign
                )));
            }
        }
        Ok(Self { strands, letters })
    }

    /// Builds from `(gen, sign)` pairs.
    pub fn from_pairs(strands: usize, pairs: &[(usize, i8)]) -> Result<Self> {
        Self::new(strands, pairs.iter().map(|&(g, s)| Letter::new(g, s)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Concatenation `self * other`.
    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands, letters }
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Parses the textual format `"s12 s23 s12' s23'"` (empty = identity).
    pub fn parse(text: &str, strands: usize) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let bad = || Error::Parse(format!("bad braid letter `{tok}`"));
            let body = tok.strip_prefix('s').ok_or_else(bad)?;
            let (digits, sign) = match body.strip_suffix('\'') {
                Some(d) => (d, -1),
                None => (body, 1),
            };
            let gen = (1..strands)
                .find(|g| format!("{}{}", g, g + 1) == digits)
                .ok_or_else(bad)?;
            letters.push(Letter::new(gen, sign));
        }
        Self::new(strands, letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| format!("s{}{}{}", l.gen, l.gen + 1, if l.sign < 0 { "'" } else { "" }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for BraidWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 3)
    }
}

/// Bijection on `{0..N-1}`, `images[x]` being the image of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    pub images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::InvalidInput(format!("not a bijection: {images:?}")));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// Swaps `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a, b);
        p
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Cycle lengths, sorted descending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Images in 1-based notation.
    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.one_based())
    }
}

/// Converts an ordered list of `tau_{ij}` (1-based band labels) into
/// generators, tracking which band sits at which real-part position.
pub fn tau_to_sigma(crossings: &[(usize, usize)], strands: usize) -> Result<BraidWord> {
    if strands < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 strands, got {strands}")));
    }
    // band_at[pos] = label, pos_of[label] = pos; both 1-based with slot 0 unused
    let mut band_at: Vec<usize> = (0..=strands).collect();
    let mut pos_of: Vec<usize> = (0..=strands).collect();
    let mut letters = Vec::with_capacity(crossings.len());
    for &(i, j) in crossings {
        if i == 0 || j == 0 || i > strands || j > strands || i == j {
            return Err(Error::InvalidInput(format!("bad crossing label ({i}, {j})")));
        }
        let (k, l) = (pos_of[i], pos_of[j]);
        if k.abs_diff(l) != 1 {
            return Err(Error::NonAdjacentCrossing { k, l });
        }
        letters.push(Letter::new(k.min(l), if k < l { 1 } else { -1 }));
        band_at.swap(k, l);
        pos_of[band_at[k]] = k;
        pos_of[band_at[l]] = l;
    }
    Ok(BraidWord { strands, letters })
}

/// Deletes adjacent inverse pairs until none remain.
pub fn free_reduce(w: &BraidWord) -> BraidWord {
    let mut out: Vec<Letter> = Vec::with_capacity(w.letters.len());
    for &l in &w.letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    BraidWord { strands: w.strands, letters: out }
}

/// Product `t_m ∘ ... ∘ t_1` of the letter transpositions, so that
/// `permutation_of(a*b) = permutation_of(b) ∘ permutation_of(a)`.
pub fn permutation_of(w: &BraidWord) -> Permutation {
    let mut images: Vec<usize> = (0..w.strands).collect();
    for l in &w.letters {
        let (a, b) = (l.gen - 1, l.gen);
        for x in images.iter_mut() {
            if *x == a {
                *x = b;
            } else if *x == b {
                *x = a;
            }
        }
    }
    Permutation { images }
}

pub fn exponent_sum(w: &BraidWord) -> i64 {
    w.letters.iter().map(|l| l.sign as i64).sum()
}

/// Equality of braids, or of their conjugacy classes.
///
/// Without conjugacy the reduced Burau image decides for `N <= 3`; for larger
/// `N` equal images give `Inconclusive`. With conjugacy, invariants are
/// compared first and then conjugators up to [`CONJUGATOR_BOUND`] letters are
/// searched.
pub fn equivalent(a: &BraidWord, b: &BraidWord, up_to_conjugacy: bool) -> Result<bool> {
    if a.strands != b.strands {
        return Err(Error::InvalidInput(format!(
            "strand counts differ: {} vs {}",
            a.strands, b.strands
        )));
    }
    let n = a.strands;
    let decisive = n <= 3;
    let (ba, bb) = (burau(a), burau(b));
    if !up_to_conjugacy {
        if permutation_of(a) != permutation_of(b) || ba != bb {
            return Ok(false);
        }
        return if decisive { Ok(true) } else { Err(Error::Inconclusive { bound: 0 }) };
    }

    if free_reduce(a) == free_reduce(b) {
        return Ok(true);
    }
    if exponent_sum(a) != exponent_sum(b)
        || permutation_of(a).cycle_type() != permutation_of(b).cycle_type()
        || ba.trace() != bb.trace()
    {
        return Ok(false);
    }
    if conjugator_search(&ba, &bb, n) {
        return if decisive { Ok(true) } else { Err(Error::Inconclusive { bound: CONJUGATOR_BOUND }) };
    }
    Err(Error::Inconclusive { bound: CONJUGATOR_BOUND })
}

/// Depth-first search over freely reduced `g` with `B(g) B(a) = B(b) B(g)`.
fn conjugator_search(ba: &LMatrix, bb: &LMatrix, n: usize) -> bool {
    let alphabet: Vec<Letter> = (1..n).flat_map(|g| [Letter::new(g, 1), Letter::new(g, -1)]).collect();
    let mats: Vec<LMatrix> = alphabet.iter().map(|&l| letter_matrix(l, n)).collect();
    let mut stack: Vec<(LMatrix, Option<Letter>, usize)> = vec![(LMatrix::identity(n - 1), None, 0)];
    while let Some((g, last, depth)) = stack.pop() {
        if g.mul(ba) == bb.mul(&g) {
            return true;
        }
        if depth == CONJUGATOR_BOUND {
            continue;
        }
        for (l, m) in alphabet.iter().zip(mats.iter()) {
            if last == Some(l.inverse()) {
                continue;
            }
            stack.push((g.mul(m), Some(*l), depth + 1));
        }
    }
    false
}
