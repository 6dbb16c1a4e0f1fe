//! Free bases, oriented letters and freely reduced words.

use crate::error::{validation, Result};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// A fixed free basis of `F_n`: `n` distinct letter names, each with a
/// formal inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    names: Vec<String>,
}

impl Basis {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(validation("basis must have positive rank"));
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(validation("basis letter names must be pairwise distinct"));
        }
        Ok(Basis { names })
    }

    /// Basis `a, b, c, ...` of the requested rank (rank at most 26).
    pub fn standard(rank: usize) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(validation("standard basis supports rank 1..=26"));
        }
        let names = (0..rank)
            .map(|i| char::from(b'a' + i as u8).to_string())
            .collect();
        Basis::new(names)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn letter_by_name(&self, name: &str) -> Option<Letter> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Letter::positive(i as u16))
    }

    /// All `2n` oriented letters, positives first.
    pub fn oriented_letters(&self) -> Vec<Letter> {
        let n = self.rank() as u16;
        (0..n)
            .map(Letter::positive)
            .chain((0..n).map(|i| Letter::positive(i).inverse()))
            .collect()
    }

    pub fn display_letter(&self, l: Letter) -> String {
        if l.is_positive() {
            self.names[l.index() as usize].clone()
        } else {
            let mut s = self.names[l.index() as usize].clone();
            s.push_str("^-1");
            s
        }
    }
}

/// An oriented basis letter: a basis index together with an orientation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u16);

impl Letter {
    pub fn positive(index: u16) -> Self {
        Letter(index << 1)
    }

    pub fn index(self) -> u16 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Packed code; positives are even, inverses odd, ordered by index.
    pub fn code(self) -> u16 {
        self.0
    }

    pub fn from_code(code: u16) -> Self {
        Letter(code)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}{}", self.index(), if self.is_positive() { "+" } else { "-" })
    }
}

/// A freely reduced word over a [`Basis`]; the canonical form of an
/// element of `F_n`. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: alloc::vec![l] }
    }

    /// Reduces an arbitrary letter sequence. Free reduction is confluent,
    /// so a single left-to-right pass with a stack is canonical.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { letters: stack }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.mul(self).mul(&g.inverse())
    }

    /// Cyclically reduced form: strips matching first/last letters.
    pub fn cyclic_reduction(&self) -> Word {
        let mut lo = 0;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo] == self.letters[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        Word {
            letters: self.letters[lo..hi].to_vec(),
        }
    }

    /// Lexicographically least rotation of the cyclic reduction, taken
    /// over both the word and its inverse. Canonical representative of
    /// the conjugacy class of `w` and `w^-1`.
    pub fn cyclic_canonical(&self) -> Word {
        let core = self.cyclic_reduction();
        if core.is_empty() {
            return core;
        }
        let mut best: Option<Vec<Letter>> = None;
        for w in [core.clone(), core.inverse()] {
            let k = w.letters.len();
            for r in 0..k {
                let rot: Vec<Letter> = w.letters[r..].iter().chain(w.letters[..r].iter()).copied().collect();
                if best.as_ref().map_or(true, |b| rot < *b) {
                    best = Some(rot);
                }
            }
        }
        Word { letters: best.unwrap() }
    }

    pub fn display(&self, basis: &Basis) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = self.letters.iter().map(|&l| basis.display_letter(l)).collect();
        parts.join(" ")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?})", self.letters)
    }
}

/// An endomorphism of `F_n` given by the images of the positive basis
/// letters. Composition and application reduce words on the fly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    images: Vec<Word>,
}

impl Endomorphism {
    pub fn new(images: Vec<Word>) -> Self {
        Endomorphism { images }
    }

    pub fn identity(rank: usize) -> Self {
        Endomorphism {
            images: (0..rank).map(|i| Word::letter(Letter::positive(i as u16))).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, index: usize) -> &Word {
        &self.images[index]
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.index() as usize];
            if l.is_positive() {
                out.extend(img.letters().iter().copied());
            } else {
                out.extend(img.inverse().letters().iter().copied());
            }
        }
        Word::from_letters(out)
    }

    /// `self` after `first`: `(self ∘ first)(x) = self(first(x))`.
    pub fn compose_after(&self, first: &Endomorphism) -> Endomorphism {
        Endomorphism {
            images: first.images.iter().map(|w| self.apply(w)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(basis: &Basis, s: &str) -> Word {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, inv) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let l = basis.letter_by_name(name).unwrap();
            letters.push(if inv { l.inverse() } else { l });
        }
        Word::from_letters(letters)
    }

    #[test]
    fn reduction_cancels_adjacent_inverses() {
        let b = Basis::standard(2).unwrap();
        assert_eq!(w(&b, "a a^-1"), Word::identity());
        assert_eq!(w(&b, "a b b^-1 a"), w(&b, "a a"));
    }

    #[test]
    fn cyclic_reduction_strips_conjugation() {
        let b = Basis::standard(2).unwrap();
        let g = w(&b, "b a b^-1");
        assert_eq!(g.cyclic_reduction(), w(&b, "a"));
        assert_eq!(g.cyclic_canonical(), w(&b, "a"));
    }

    #[test]
    fn endomorphism_applies_and_composes() {
        let b = Basis::standard(2).unwrap();
        // a -> ab, b -> a (Fibonacci substitution on letters)
        let f = Endomorphism::new(alloc::vec![w(&b, "a b"), w(&b, "a")]);
        assert_eq!(f.apply(&w(&b, "a")), w(&b, "a b"));
        assert_eq!(f.apply(&w(&b, "b^-1 a^-1")), w(&b, "a^-1 b^-1 a^-1"));
        let f2 = f.compose_after(&f);
        assert_eq!(f2.apply(&w(&b, "a")), w(&b, "a b a"));
    }
}
