//! The adding machine on the binary tree V₂ and on its boundary.
//!
//! Vertices and boundary words are stored least-significant bit first, so
//! the carry of `+1` runs in index order.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::spaces::TreeVertex;

/// `1·x`: binary increment keeping the length, except that the all-ones
/// vertex of length n goes to 1 followed by n zeros, and `1·* = (0)`.
pub fn odometer_step(v: &TreeVertex) -> TreeVertex {
    let mut bits = v.bits().to_vec();
    if bits.is_empty() {
        return TreeVertex::from_lsb_first(vec![false]);
    }
    for b in bits.iter_mut() {
        if *b {
            *b = false;
        } else {
            *b = true;
            return TreeVertex::from_lsb_first(bits);
        }
    }
    bits.push(true);
    TreeVertex::from_lsb_first(bits)
}

/// `n·x`, iterating the step.
pub fn odometer_iterate(v: &TreeVertex, n: u64) -> TreeVertex {
    (0..n).fold(v.clone(), |acc, _| odometer_step(&acc))
}

/// (x|y) on V₂: the length of the common low-order prefix.
pub fn gromov_product(x: &TreeVertex, y: &TreeVertex) -> u64 {
    x.common_prefix_len(y) as u64
}

/// (x|y) = ½(d(x,*) + d(y,*) − d(x,y)) from a supplied distance.
pub fn gromov_product_from_distance(x: &TreeVertex, y: &TreeVertex, d: u64) -> u64 {
    (x.depth() as u64 + y.depth() as u64 - d) / 2
}

/// Outcome of the exhaustive check d(1·x, 1·y) ≤ d(x, y) + 2.
#[derive(Clone, Debug, Serialize)]
pub struct LipschitzScan {
    pub max_depth: usize,
    pub vertices: usize,
    pub pairs: u64,
    pub violations: u64,
    /// max of d(1·x, 1·y) − d(x, y) over all pairs.
    pub max_excess: i64,
    pub extremal_pair: Option<(TreeVertex, TreeVertex)>,
}

/// Checks the +2 Lipschitz bound over all unordered vertex pairs of depth
/// ≤ `max_depth`.
pub fn lipschitz_scan(max_depth: usize) -> LipschitzScan {
    let vs = TreeVertex::all_up_to_depth(max_depth);
    let images: Vec<TreeVertex> = par::map(&vs, odometer_step);
    let per_row = par::map_range(0..vs.len(), |i| {
        let (mut violations, mut best) = (0u64, (i64::MIN, i, i));
        for j in i..vs.len() {
            let before = vs[i].tree_distance(&vs[j]) as i64;
            let after = images[i].tree_distance(&images[j]) as i64;
            if after > before + 2 {
                violations += 1;
            }
            if after - before > best.0 {
                best = (after - before, i, j);
            }
        }
        (violations, best)
    });
    let violations = per_row.iter().map(|r| r.0).sum();
    let best = per_row
        .iter()
        .map(|r| r.1)
        .max_by_key(|b| b.0)
        .expect("at least the root");
    let n = vs.len() as u64;
    LipschitzScan {
        max_depth,
        vertices: vs.len(),
        pairs: n * (n + 1) / 2,
        violations,
        max_excess: best.0,
        extremal_pair: Some((vs[best.1].clone(), vs[best.2].clone())),
    }
}

/// A boundary point of V₂ truncated at a fixed precision: the cylinder of
/// all infinite binary sequences starting with `bits` (index 0 = i₀).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryWord {
    bits: Vec<bool>,
    overflow: bool,
}

impl BoundaryWord {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyInput("boundary word needs precision >= 1"));
        }
        Ok(BoundaryWord {
            bits,
            overflow: false,
        })
    }

    pub fn zeros(precision: usize) -> Result<Self> {
        Self::new(vec![false; precision])
    }

    pub fn ones(precision: usize) -> Result<Self> {
        Self::new(vec![true; precision])
    }

    /// The word whose bottom `precision` bits spell `value`.
    pub fn from_value(value: &BigUint, precision: usize) -> Result<Self> {
        Self::new((0..precision as u64).map(|k| value.bit(k)).collect())
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, precision: usize) -> Result<Self> {
        Self::new((0..precision).map(|_| rng.random::<bool>()).collect())
    }

    pub fn precision(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Set once a carry has left the stored bits.
    pub fn overflow(&self) -> bool {
        self.overflow
    }

    /// Σ iₖ2ᵏ over the stored bits.
    pub fn value(&self) -> BigUint {
        prefix_value(&self.bits, self.bits.len())
    }

    pub fn step(&self) -> BoundaryWord {
        let mut bits = self.bits.clone();
        for b in bits.iter_mut() {
            if *b {
                *b = false;
            } else {
                *b = true;
                return BoundaryWord {
                    bits,
                    overflow: self.overflow,
                };
            }
        }
        BoundaryWord {
            bits,
            overflow: true,
        }
    }

    /// `n·z` by exact addition on the bottom N bits.
    pub fn advance(&self, n: &BigUint) -> BoundaryWord {
        let sum = self.value() + n;
        let carried = sum.bits() > self.precision() as u64;
        let mut out = BoundaryWord::from_value(&sum, self.precision()).expect("precision >= 1");
        out.overflow = self.overflow || carried;
        out
    }

    /// Common-prefix length. When the words agree on every bit both carry,
    /// the true value is unknown and only a lower bound is reported.
    pub fn gromov_product(&self, other: &BoundaryWord) -> Result<u64> {
        let n = self.precision().min(other.precision());
        match (0..n).find(|&k| self.bits[k] != other.bits[k]) {
            Some(r) => Ok(r as u64),
            None => Err(Error::PrecisionExhausted { lower_bound: n }),
        }
    }
}

impl fmt::Display for BoundaryWord {
    /// Bits in index order, with a trailing `+` after an overflow.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.overflow {
            f.write_str("+")?;
        }
        Ok(())
    }
}

impl FromStr for BoundaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_end_matches('+');
        let bits = body
            .chars()
            .filter(|c| *c != ',')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidPoint {
                    text: s.to_string(),
                    reason: "boundary words are strings of 0 and 1".into(),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut w = BoundaryWord::new(bits)?;
        w.overflow = s.trim().ends_with('+');
        Ok(w)
    }
}

impl Serialize for BoundaryWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A dyadic distance on the boundary: exactly 2^{−r}, or, for words equal
/// up to precision N, only the bound ≤ 2^{−N}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "kebab-case")]
pub enum BoundaryDistance {
    Exact(u64),
    AtMost(u64),
}

impl BoundaryDistance {
    /// The exact value, or the upper bound.
    pub fn upper(&self) -> f64 {
        let e = match *self {
            BoundaryDistance::Exact(e) | BoundaryDistance::AtMost(e) => e,
        };
        (-(e as f64)).exp2()
    }

    /// `-r` or `<=-N`.
    pub fn log2_label(&self) -> String {
        match self {
            BoundaryDistance::Exact(e) => format!("-{e}"),
            BoundaryDistance::AtMost(e) => format!("<=-{e}"),
        }
    }
}

impl fmt::Display for BoundaryDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryDistance::Exact(e) => write!(f, "2^-{e}"),
            BoundaryDistance::AtMost(e) => write!(f, "<= 2^-{e}"),
        }
    }
}

/// d(x, y) = 2^{−(x|y)} at equal precision.
pub fn boundary_distance(x: &BoundaryWord, y: &BoundaryWord) -> Result<BoundaryDistance> {
    if x.precision() != y.precision() {
        return Err(Error::PrecisionMismatch {
            left: x.precision(),
            right: y.precision(),
        });
    }
    match x.gromov_product(y) {
        Ok(r) => Ok(BoundaryDistance::Exact(r)),
        Err(Error::PrecisionExhausted { lower_bound }) => Ok(BoundaryDistance::AtMost(lower_bound as u64)),
        Err(e) => Err(e),
    }
}

fn prefix_value(bits: &[bool], len: usize) -> BigUint {
    let mut v = BigUint::ZERO;
    for k in (0..len).rev() {
        v <<= 1u32;
        if bits[k] {
            v += 1u32;
        }
    }
    v
}

/// n = a + b with a = 2^{N+1} − Σ_{k≤N} iₖ2ᵏ and b = Σ_{k≤N} jₖ2ᵏ; the first
/// N+1 bits of n·x then agree with those of y.
pub fn minimality_witness(x: &BoundaryWord, y: &BoundaryWord, n: usize) -> Result<BigUint> {
    let available = x.precision().min(y.precision());
    if available <= n {
        return Err(Error::InsufficientPrecision {
            needed: n + 1,
            available,
        });
    }
    let a = (BigUint::from(1u32) << (n + 1)) - prefix_value(x.bits(), n + 1);
    let b = prefix_value(y.bits(), n + 1);
    Ok(a + b)
}

/// Whether the first `n + 1` bits of `steps·x` equal those of y.
pub fn verify_witness(x: &BoundaryWord, y: &BoundaryWord, n: usize, steps: &BigUint) -> bool {
    let moved = x.advance(steps);
    moved.bits().len() > n && y.bits().len() > n && moved.bits()[..=n] == y.bits()[..=n]
}

/// The target precision for a tolerance: the least N ≥ 1 with 2^{−N} ≤ ε.
pub fn precision_for(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::config("epsilons", format!("tolerance {epsilon} must be positive")));
    }
    Ok((-epsilon.log2()).ceil().max(1.0) as usize)
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityRow {
    pub target: BoundaryWord,
    pub epsilon: f64,
    pub target_precision: usize,
    #[serde(serialize_with = "decimal")]
    pub witness: BigUint,
    pub achieved: BoundaryDistance,
    pub pass: bool,
}

/// For every target and tolerance: the witness n and the distance from
/// n·x to the target, measured at full precision.
pub fn density_experiment(
    x: &BoundaryWord,
    targets: &[BoundaryWord],
    epsilons: &[f64],
) -> Result<Vec<DensityRow>> {
    let mut jobs = Vec::with_capacity(targets.len() * epsilons.len());
    for y in targets {
        for &eps in epsilons {
            jobs.push((y, eps, precision_for(eps)?));
        }
    }
    par::try_map(&jobs, |&(y, eps, n)| {
        let witness = minimality_witness(x, y, n)?;
        let achieved = boundary_distance(&x.advance(&witness), y)?;
        Ok::<_, Error>(DensityRow {
            target: y.clone(),
            epsilon: eps,
            target_precision: n,
            witness,
            pass: achieved.upper() < eps,
            achieved,
        })
    })
}

fn decimal<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(n)
}

/// CSV with columns `target,epsilon,witness_n_decimal,achieved_distance_log2`.
pub fn write_density_csv<W: Write>(rows: &[DensityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["target", "epsilon", "witness_n_decimal", "achieved_distance_log2"])?;
    for r in rows {
        w.write_record([
            r.target.to_string(),
            r.epsilon.to_string(),
            r.witness.to_string(),
            r.achieved.log2_label(),
        ])?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv>".into(),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn v(s: &str) -> TreeVertex {
        s.parse().unwrap()
    }

    fn w(s: &str) -> BoundaryWord {
        s.parse().unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(odometer_step(&v("*")).to_string(), "(0)");
        assert_eq!(odometer_step(&v("(1,1)")).to_string(), "(1,0,0)");
        assert_eq!(odometer_step(&v("(0,1)")).to_string(), "(1,0)");
    }

    #[test]
    fn orbit_of_root() {
        let orbit: Vec<String> = (0..5).map(|n| odometer_iterate(&v("*"), n).to_string()).collect();
        assert_eq!(orbit, ["*", "(0)", "(1)", "(1,0)", "(1,1)"]);
    }

    #[test]
    fn boundary_step_examples() {
        assert_eq!(w("0000").step(), w("1000"));
        let o = w("1111").step();
        assert_eq!(o.bits(), w("0000").bits());
        assert!(o.overflow());
        assert_eq!(w("01").step(), w("11"));
        assert_eq!(w("1111").advance(&BigUint::from(1u32)), o);
    }

    #[test]
    fn products_and_distances() {
        assert_eq!(gromov_product(&v("(0,1,1)"), &v("(1,1)")), 2);
        assert_eq!(gromov_product(&v("(0,1,1)"), &v("(0,1,1)")), 3);
        assert_eq!(w("0101").gromov_product(&w("1101")).unwrap(), 0);
        assert!(matches!(
            w("0101").gromov_product(&w("0101")),
            Err(Error::PrecisionExhausted { lower_bound: 4 })
        ));
        assert_eq!(boundary_distance(&w("0101"), &w("0101")).unwrap(), BoundaryDistance::AtMost(4));
        assert_eq!(boundary_distance(&w("0101"), &w("1101")).unwrap().upper(), 1.0);
        assert_eq!(boundary_distance(&w("0101"), &w("0111")).unwrap().upper(), 0.25);
        assert!(boundary_distance(&w("01"), &w("011")).is_err());
    }

    #[test]
    fn witness_examples() {
        assert_eq!(minimality_witness(&w("11110"), &w("00000"), 3).unwrap(), BigUint::from(1u32));
        assert_eq!(minimality_witness(&w("0000"), &w("0000"), 2).unwrap(), BigUint::from(8u32));
        let n = minimality_witness(&w("1000"), &w("1100"), 2).unwrap();
        assert_eq!(n, BigUint::from(10u32));
        assert_eq!(&w("1000").advance(&n).bits()[..3], &[true, true, false]);
        assert!(matches!(
            minimality_witness(&w("100"), &w("110"), 3),
            Err(Error::InsufficientPrecision { needed: 4, available: 3 })
        ));
    }

    #[test]
    fn all_ones_returns_after_sixteen() {
        let x = BoundaryWord::ones(8).unwrap();
        let n = minimality_witness(&x, &x, 3).unwrap();
        assert_eq!(n, BigUint::from(16u32));
        assert!(verify_witness(&x, &x, 3, &n));
    }

    #[test]
    fn density_rows_pass() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let x = BoundaryWord::random(&mut rng, 16).unwrap();
        let targets: Vec<_> = (0..10).map(|_| BoundaryWord::random(&mut rng, 16).unwrap()).collect();
        let rows = density_experiment(&x, &targets, &[0.5, (-8f64).exp2()]).unwrap();
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|r| r.pass));
        assert!(rows.iter().filter(|r| r.epsilon == 0.5).all(|r| r.achieved.upper() <= 0.25));
        assert_eq!(precision_for(0.3).unwrap(), 2);
        assert!(precision_for(0.0).is_err());
    }

    #[test]
    fn small_lipschitz_scan() {
        let s = lipschitz_scan(5);
        assert_eq!(s.vertices, 63);
        assert_eq!(s.violations, 0);
        assert_eq!(s.max_excess, 2);
    }
}
