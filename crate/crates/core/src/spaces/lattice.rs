use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A point of ℤᵏ or ℕᵏ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub coords: Vec<i64>,
}

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint { coords }
    }

    pub fn origin(rank: usize) -> Self {
        LatticePoint {
            coords: vec![0; rank],
        }
    }

    /// The i-th standard basis vector.
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut coords = vec![0; rank];
        coords[i] = 1;
        LatticePoint { coords }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_natural(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0)
    }

    pub fn l1_norm(&self) -> u64 {
        self.coords.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.rank(), other.rank());
        LatticePoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.rank(), other.rank());
        LatticePoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> LatticePoint {
        LatticePoint {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> LatticePoint {
        LatticePoint {
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for LatticePoint {
    type Err = Error;

    /// Accepts `(1,-2)`, `1,-2` or a bare integer for rank one.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = inner
            .split(',')
            .map(|c| {
                c.trim().parse::<i64>().map_err(|e| Error::InvalidPoint {
                    text: s.to_string(),
                    reason: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticePoint { coords })
    }
}

/// Every vector within ℓ¹ distance `r` of `center`, in lexicographic order of offsets.
pub(crate) fn l1_ball(center: &LatticePoint, r: u64, cap: usize) -> Result<Vec<LatticePoint>> {
    fn rec(
        center: &LatticePoint,
        dim: usize,
        budget: u64,
        offset: &mut Vec<i64>,
        out: &mut Vec<LatticePoint>,
        cap: usize,
    ) -> Result<()> {
        if dim == center.rank() {
            if out.len() >= cap {
                return Err(Error::cap(cap, "enumerating an l1 ball"));
            }
            out.push(LatticePoint {
                coords: center
                    .coords
                    .iter()
                    .zip(offset.iter())
                    .map(|(c, o)| c + o)
                    .collect(),
            });
            return Ok(());
        }
        let b = budget as i64;
        for o in -b..=b {
            offset.push(o);
            rec(center, dim + 1, budget - o.unsigned_abs(), offset, out, cap)?;
            offset.pop();
        }
        Ok(())
    }

    let mut out = Vec::new();
    rec(center, 0, r, &mut Vec::with_capacity(center.rank()), &mut out, cap)?;
    Ok(out)
}
