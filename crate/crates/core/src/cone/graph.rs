use std::collections::HashMap;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

/// A finite connected weighted graph standing in for the compact base M.
#[derive(Clone, Debug, Serialize)]
pub struct BaseGraph {
    names: Vec<String>,
    edges: Vec<(usize, usize, f64)>,
    #[serde(skip)]
    dist: Vec<Vec<f64>>,
}

impl BaseGraph {
    /// Builds the graph and its all-pairs path metric.
    pub fn new(names: Vec<String>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidBaseGraph("no nodes".into()));
        }
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidBaseGraph(format!("edge ({u}, {v}) out of range")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidBaseGraph(format!(
                    "edge ({u}, {v}) has non-positive length {w}"
                )));
            }
        }
        let dist = floyd_warshall(n, &edges);
        if dist.iter().flatten().any(|d| d.is_infinite()) {
            return Err(Error::DisconnectedBase);
        }
        Ok(BaseGraph { names, edges, dist })
    }

    /// The n-cycle with every edge of the given length; node i is named `i`.
    pub fn cycle(n: usize, edge_length: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidBaseGraph("a cycle needs at least 3 nodes".into()));
        }
        let names = (0..n).map(|i| i.to_string()).collect();
        let edges = (0..n).map(|i| (i, (i + 1) % n, edge_length)).collect();
        BaseGraph::new(names, edges)
    }

    /// Parses the edge-list format: one `node node length` triple per line,
    /// lengths rational (`3`, `1/16`); `#` starts a comment.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut edges = Vec::new();
        let mut id_of = |name: &str, names: &mut Vec<String>| {
            *ids.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            })
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::InvalidBaseGraph(format!(
                    "line {}: expected `node node length`, got {raw:?}",
                    lineno + 1
                )));
            }
            let length = parse_rational(fields[2]).map_err(|e| {
                Error::InvalidBaseGraph(format!("line {}: {e}", lineno + 1))
            })?;
            let u = id_of(fields[0], &mut names);
            let v = id_of(fields[1], &mut names);
            edges.push((u, v, length));
        }
        BaseGraph::new(names, edges)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Path-metric distance between base nodes.
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u][v]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().flatten().copied().fold(0.0, f64::max)
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<f64, String> {
    let r = Ratio::<i64>::from_str(s).map_err(|e| format!("bad length {s:?}: {e}"))?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        if w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k][j];
                if cand < d[i][j] {
                    d[i][j] = cand;
                }
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_metric() {
        let g = BaseGraph::cycle(16, 1.0 / 16.0).unwrap();
        assert_eq!(g.distance(0, 8), 0.5);
        assert_eq!(g.distance(0, 15), 1.0 / 16.0);
        assert_eq!(g.diameter(), 0.5);
    }

    #[test]
    fn edge_list_parsing() {
        let g = BaseGraph::parse_edge_list("# square\nx y 1/2\ny z 1/2\nz w 3\nw x 1\n").unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.distance(0, 2), 1.0);
        assert_eq!(g.distance(0, 3), 1.0);
        assert_eq!(g.node_id("z"), Some(2));
    }

    #[test]
    fn disconnected_is_an_error() {
        let err = BaseGraph::parse_edge_list("a b 1\nc d 1\n").unwrap_err();
        assert!(matches!(err, Error::DisconnectedBase));
        assert!(BaseGraph::parse_edge_list("a b -1\n").is_err());
        assert!(BaseGraph::parse_edge_list("a b\n").is_err());
    }
}
