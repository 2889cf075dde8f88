use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A generator of F₂ or its inverse. `AInv` prints as `A`, `BInv` as `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Result<Letter> {
        match c {
            'a' => Ok(Letter::A),
            'A' => Ok(Letter::AInv),
            'b' => Ok(Letter::B),
            'B' => Ok(Letter::BInv),
            other => Err(Error::InvalidLetter(other)),
        }
    }
}

/// A freely reduced word in F₂ = ⟨a, b⟩.
///
/// The only way to build one from arbitrary letters is through
/// [`reduce_word`], so every value is reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

/// Free reduction by a single left-to-right stack pass.
pub fn reduce_word<I: IntoIterator<Item = Letter>>(letters: I) -> FreeWord {
    let mut stack: Vec<Letter> = Vec::new();
    for l in letters {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    FreeWord { letters: stack }
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    /// Wraps letters that are already known to be reduced.
    ///
    /// Returns `UnreducedPrefix` when an adjacent inverse pair is present.
    pub fn from_reduced(letters: Vec<Letter>) -> Result<Self> {
        if letters.windows(2).any(|w| w[0] == w[1].inverse()) {
            let text: String = letters.iter().map(|l| l.to_char()).collect();
            return Err(Error::UnreducedPrefix(text));
        }
        Ok(FreeWord { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Word length with respect to {a, A, b, B}.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn multiply(&self, other: &FreeWord) -> FreeWord {
        // Both factors are reduced, so cancellation only happens at the seam.
        let mut k = 0;
        let (l, r) = (&self.letters, &other.letters);
        while k < l.len() && k < r.len() && l[l.len() - 1 - k] == r[k].inverse() {
            k += 1;
        }
        let mut letters = Vec::with_capacity(l.len() + r.len() - 2 * k);
        letters.extend_from_slice(&l[..l.len() - k]);
        letters.extend_from_slice(&r[k..]);
        FreeWord { letters }
    }

    pub fn letter(l: Letter) -> FreeWord {
        FreeWord { letters: vec![l] }
    }

    /// Appends `l` on the right and reduces.
    pub fn push(&self, l: Letter) -> FreeWord {
        let mut letters = self.letters.clone();
        if letters.last() == Some(&l.inverse()) {
            letters.pop();
        } else {
            letters.push(l);
        }
        FreeWord { letters }
    }

    /// `self` is a positive power of a single letter (aⁿ, Aⁿ, bⁿ or Bⁿ).
    pub fn is_letter_power(&self, l: Letter) -> bool {
        !self.letters.is_empty() && self.letters.iter().all(|&x| x == l)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl serde::Serialize for FreeWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_char(self.to_char())
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    /// Parses and reduces. `e`, `ε` and the empty string denote the identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "ε" {
            return Ok(FreeWord::identity());
        }
        let letters = s.chars().map(Letter::from_char).collect::<Result<Vec<_>>>()?;
        Ok(reduce_word(letters))
    }
}

/// All reduced words of length exactly `n`, in lexicographic letter order.
pub fn reduced_words_of_length(n: usize) -> Vec<FreeWord> {
    let mut layer = vec![FreeWord::identity()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(layer.len() * 3 + 1);
        for w in &layer {
            for l in Letter::ALL {
                if w.letters.last() != Some(&l.inverse()) {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(FreeWord { letters });
                }
            }
        }
        layer = next;
    }
    layer
}

/// Number of elements of F₂ of length at most `r`: 1 + 4·(3ʳ − 1)/2.
pub fn ball_cardinality(r: u32) -> u64 {
    1 + 2 * (3u64.pow(r) - 1)
}
