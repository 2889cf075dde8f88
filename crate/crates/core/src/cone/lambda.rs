use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// The weight λ applied to angular movement at height t.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LambdaFunction {
    /// λ(t) = t.
    #[default]
    Linear,
    /// λ(t) = √t.
    Sqrt,
    /// Piecewise-linear through the knots, extrapolated with the last slope.
    Table { knots: Vec<(f64, f64)> },
}

impl LambdaFunction {
    /// Builds a table function, checking λ(0) = 0 and λ(t) > 0 for t > 0.
    pub fn table(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.len() < 2 {
            return Err(Error::InvalidLambda("a table needs at least two knots".into()));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(Error::InvalidLambda("the first knot must be (0, 0)".into()));
        }
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidLambda("knot heights must be distinct".into()));
        }
        if knots[1..].iter().any(|&(t, v)| !(t.is_finite() && v.is_finite() && v > 0.0)) {
            return Err(Error::InvalidLambda("λ must be positive away from the apex".into()));
        }
        let last = knots.len() - 1;
        if knots[last].1 < knots[last - 1].1 {
            // Extrapolating a decreasing last segment would eventually reach zero.
            return Err(Error::InvalidLambda(
                "the last segment must be non-decreasing".into(),
            ));
        }
        Ok(LambdaFunction::Table { knots })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            LambdaFunction::Linear => t,
            LambdaFunction::Sqrt => t.sqrt(),
            LambdaFunction::Table { knots } => {
                let i = knots.partition_point(|&(x, _)| x <= t);
                let (lo, hi) = if i == 0 {
                    (knots[0], knots[1])
                } else if i >= knots.len() {
                    (knots[knots.len() - 2], knots[knots.len() - 1])
                } else {
                    (knots[i - 1], knots[i])
                };
                let slope = (hi.1 - lo.1) / (hi.0 - lo.0);
                lo.1 + slope * (t - lo.0)
            }
        }
    }

    /// Monotone non-decreasing and unbounded.
    pub fn is_increasing_unbounded(&self) -> bool {
        match self {
            LambdaFunction::Linear | LambdaFunction::Sqrt => true,
            LambdaFunction::Table { knots } => {
                let n = knots.len();
                knots.windows(2).all(|w| w[0].1 <= w[1].1) && knots[n - 1].1 > knots[n - 2].1
            }
        }
    }
}

impl fmt::Display for LambdaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaFunction::Linear => write!(f, "linear"),
            LambdaFunction::Sqrt => write!(f, "sqrt"),
            LambdaFunction::Table { knots } => {
                let parts: Vec<String> = knots.iter().map(|(t, v)| format!("{t}:{v}")).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

impl FromStr for LambdaFunction {
    type Err = Error;

    /// `linear`, `sqrt`, or a table `t:v,t:v,...`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" | "t" => Ok(LambdaFunction::Linear),
            "sqrt" => Ok(LambdaFunction::Sqrt),
            other => {
                let knots = other
                    .split(',')
                    .map(|pair| {
                        let (t, v) = pair
                            .split_once(':')
                            .ok_or_else(|| Error::InvalidLambda(format!("bad knot {pair:?}")))?;
                        let parse = |x: &str| {
                            x.trim()
                                .parse::<f64>()
                                .map_err(|e| Error::InvalidLambda(format!("{x:?}: {e}")))
                        };
                        Ok((parse(t)?, parse(v)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                LambdaFunction::table(knots)
            }
        }
    }
}
