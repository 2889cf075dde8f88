use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A vertex of the rooted binary tree T₂.
///
/// `bits[0]` is the least significant digit i₀; the parent of a vertex drops
/// its most significant digit, so children extend `bits` on the right. The
/// empty string is the root `*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TreeVertex {
    bits: Vec<bool>,
}

impl TreeVertex {
    pub fn root() -> Self {
        TreeVertex::default()
    }

    /// Builds a vertex from digits stored least-significant first.
    pub fn from_lsb_first(bits: Vec<bool>) -> Self {
        TreeVertex { bits }
    }

    /// Builds a vertex from digits written as in (i_{n-1}, …, i₀).
    pub fn from_msb_first(digits: &[u8]) -> Self {
        TreeVertex {
            bits: digits.iter().rev().map(|&d| d != 0).collect(),
        }
    }

    /// The depth-`depth` vertex whose digits encode `value` (mod 2^depth).
    pub fn from_value(value: u64, depth: usize) -> Self {
        TreeVertex {
            bits: (0..depth).map(|k| k < 64 && (value >> k) & 1 == 1).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn depth(&self) -> usize {
        self.bits.len()
    }

    pub fn is_root(&self) -> bool {
        self.bits.is_empty()
    }

    /// Σ iₖ 2ᵏ. Only meaningful for depth ≤ 64.
    pub fn value(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| 1u64 << k)
            .sum()
    }

    pub fn parent(&self) -> Option<TreeVertex> {
        if self.bits.is_empty() {
            None
        } else {
            Some(TreeVertex {
                bits: self.bits[..self.bits.len() - 1].to_vec(),
            })
        }
    }

    pub fn child(&self, digit: bool) -> TreeVertex {
        let mut bits = self.bits.clone();
        bits.push(digit);
        TreeVertex { bits }
    }

    /// Length of the longest common prefix i₀ … i_{r-1}.
    pub fn common_prefix_len(&self, other: &TreeVertex) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Path length in T₂: the two vertices meet at their common prefix.
    pub fn tree_distance(&self, other: &TreeVertex) -> u64 {
        let r = self.common_prefix_len(other);
        (self.depth() + other.depth() - 2 * r) as u64
    }

    /// All vertices of depth at most `max_depth`, by depth then value.
    pub fn all_up_to_depth(max_depth: usize) -> Vec<TreeVertex> {
        let mut out = Vec::with_capacity((1usize << (max_depth + 1)) - 1);
        for depth in 0..=max_depth {
            for value in 0..(1u64 << depth) {
                out.push(TreeVertex::from_value(value, depth));
            }
        }
        out
    }
}

impl fmt::Display for TreeVertex {
    /// Prints in the (i_{n-1},…,i₀) order; the root prints as `*`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return write!(f, "*");
        }
        write!(f, "(")?;
        for (i, b) in self.bits.iter().rev().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u8::from(*b))?;
        }
        write!(f, ")")
    }
}

impl serde::Serialize for TreeVertex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for TreeVertex {
    type Err = Error;

    /// Accepts `*`, `(0,1,1)` or `011`, most significant digit first.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "*" || s.is_empty() {
            return Ok(TreeVertex::root());
        }
        let digits = s
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | ',' | ' '))
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::InvalidPoint {
                    text: s.to_string(),
                    reason: format!("unexpected character {c:?} in tree vertex"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TreeVertex::from_msb_first(&digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn notation_round_trip() {
        let v: TreeVertex = "(0,1,1)".parse().unwrap();
        assert_eq!(v.bits(), &[true, true, false]);
        assert_eq!(v.to_string(), "(0,1,1)");
        assert_eq!(v.value(), 3);
        assert_eq!("*".parse::<TreeVertex>().unwrap(), TreeVertex::root());
        assert!("(0,2)".parse::<TreeVertex>().is_err());
    }

    #[test]
    fn parent_child_distance() {
        let v: TreeVertex = "(0,1,1)".parse().unwrap();
        let p: TreeVertex = "(1,1)".parse().unwrap();
        assert_eq!(v.parent(), Some(p.clone()));
        assert_eq!(v.tree_distance(&p), 1);
        assert_eq!(p.child(false), v);
        // (0,0) and (1,0) are siblings under (0).
        let a: TreeVertex = "(0,0)".parse().unwrap();
        let b: TreeVertex = "(1,0)".parse().unwrap();
        assert_eq!(a.tree_distance(&b), 2);
    }

    #[test]
    fn enumeration_size() {
        assert_eq!(TreeVertex::all_up_to_depth(3).len(), 15);
        assert_eq!(TreeVertex::all_up_to_depth(10).len(), 2047);
    }
}
