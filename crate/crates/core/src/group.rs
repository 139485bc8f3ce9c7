//! Words in a free group and their conjugacy classes.
//!
//! Generators are written `a`, `b`, `c`, … and their inverses `A`, `B`,
//! `C`, …; `abAB` is the commutator of `a` and `b`. Conjugation is always
//! `g y g⁻¹`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hypgeom::MoebiusMap;

/// Generator or inverse generator. Ordered by index, then `g < g⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    gen: u8,
    inverse: bool,
}

impl Letter {
    pub fn new(gen: u8, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn gen(&self) -> usize {
        self.gen as usize
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter::new(c as u8 - b'a', false)),
            'A'..='Z' => Some(Letter::new(c as u8 - b'A', true)),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.inverse { b'A' } else { b'a' };
        (base + self.gen) as char
    }
}

/// Sequence of letters; not necessarily reduced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn generator(gen: u8) -> Self {
        Word(vec![Letter::new(gen, false)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of generators the word needs (largest index + 1).
    pub fn rank_needed(&self) -> usize {
        self.0.iter().map(|l| l.gen() + 1).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Free product `self · other`, reduced.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = free_reduce(self).0;
        for &l in &other.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// `self · y · self⁻¹`, reduced.
    pub fn conjugate(&self, y: &Word) -> Word {
        self.mul(y).mul(&self.inverse())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inv())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(f), Some(l)) => self.0.len() == 1 || *f != l.inv(),
                _ => true,
            }
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// For a cyclically reduced word `w = z^k` with `z` not a proper power,
    /// returns `(z, k)`. The empty word gives `(ε, 1)`.
    pub fn primitive_root(&self) -> (Word, usize) {
        let n = self.0.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| self.0[i] == self.0[i - p]) {
                return (Word(self.0[..p].to_vec()), n / p);
            }
        }
        (self.clone(), 1)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Letter::from_char)
            .collect::<Option<Vec<_>>>()
            .map(Word)
            .ok_or_else(|| Error::ParseWord(s.to_string()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// Cancels adjacent inverse pairs.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.0 {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// Splits `w` as `conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let r = free_reduce(w).0;
    let (mut i, mut j) = (0, r.len());
    while j - i >= 2 && r[i] == r[j - 1].inv() {
        i += 1;
        j -= 1;
    }
    (Word(r[i..j].to_vec()), Word(r[..i].to_vec()))
}

/// Canonical representative of a conjugacy class: the lexicographically
/// least rotation of the cyclically reduced core.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjClass(Word);

impl ConjClass {
    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> ConjClass {
        conj_class(&self.0.inverse())
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn conj_class(w: &Word) -> ConjClass {
    let (core, _) = cyclic_reduce(w);
    let best = (0..core.len().max(1))
        .map(|k| core.rotate(k))
        .min()
        .unwrap_or_default();
    ConjClass(best)
}

pub fn is_conjugate(u: &Word, v: &Word) -> bool {
    conj_class(u) == conj_class(v)
}

/// Evaluates `w` as the ordered product of generator matrices. The word is
/// freely reduced first; evaluating `x x⁻¹` pairs only adds cancellation error.
pub fn word_to_map(generators: &[MoebiusMap], w: &Word) -> Result<MoebiusMap> {
    if let Some(l) = w.letters().iter().find(|l| l.gen() >= generators.len()) {
        return Err(Error::BadLetter { index: l.gen(), rank: generators.len() });
    }
    let inverses: Vec<MoebiusMap> = generators.iter().map(MoebiusMap::inverse).collect();
    let mut acc = MoebiusMap::IDENTITY;
    for (i, l) in free_reduce(w).letters().iter().enumerate() {
        let m = if l.is_inverse() { inverses.get(l.gen()) } else { generators.get(l.gen()) }
            .ok_or(Error::BadLetter { index: l.gen(), rank: generators.len() })?;
        acc = acc.mul_raw(m);
        if i % 16 == 15 {
            acc = acc.renormalized();
        }
    }
    Ok(acc.renormalized())
}

/// All freely reduced words of length exactly `len` over `rank` generators,
/// in lexicographic order.
pub fn reduced_words(rank: usize, len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (0..rank as u8)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * alphabet.len());
        for w in &out {
            for &l in &alphabet {
                if w.0.last() != Some(&l.inv()) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
        }
        out = next;
    }
    out
}

/// Canonical classes of all nontrivial cyclically reduced words of length
/// at most `max_len`, sorted and deduplicated.
pub fn cyclic_classes(rank: usize, max_len: usize) -> Vec<ConjClass> {
    let mut out: Vec<ConjClass> = (1..=max_len)
        .flat_map(|n| reduced_words(rank, n))
        .filter(Word::is_cyclically_reduced)
        .map(|w| conj_class(&w))
        .collect();
    out.sort();
    out.dedup();
    out
}
