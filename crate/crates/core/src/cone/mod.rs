//! Cones over finite path-metric graphs with the λ-weighted path metric.
//!
//! The cone distance is approximated from above by shortest paths on a
//! height grid. Grid heights and edge weights are held as integer multiples
//! of [`QUANTUM`] (weights rounded up), so shortest-path sums are exact:
//! the grid metric is exactly symmetric and satisfies the triangle
//! inequality, and it stays an upper bound on the continuous distance.

mod graph;
mod lambda;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::Serialize;

pub use graph::BaseGraph;
pub(crate) use graph::parse_rational;
pub use lambda::LambdaFunction;

use crate::error::{Error, Result};
use crate::par;

/// Resolution of grid heights and edge weights: 2⁻³².
pub const QUANTUM: f64 = 1.0 / 4_294_967_296.0;

/// Default slack for the compactification diagnostic.
pub const DEFAULT_SLACK: f64 = 0.10;

const CACHE_ROWS: usize = 4096;

/// Rounds a height to the nearest multiple of [`QUANTUM`].
pub fn quantize(t: f64) -> f64 {
    (t / QUANTUM).round() * QUANTUM
}

fn weight_units(w: f64) -> u64 {
    (w / QUANTUM).ceil() as u64
}

fn units_to_len(u: u64) -> f64 {
    u as f64 * QUANTUM
}

/// A point (x, t) of the cone; every point with t = 0 is the apex.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConePoint {
    pub vertex: usize,
    pub height: f64,
}

impl ConePoint {
    /// Normalizes the apex to vertex 0 so equal points compare and hash equal.
    pub fn new(vertex: usize, height: f64) -> Self {
        if height == 0.0 {
            ConePoint {
                vertex: 0,
                height: 0.0,
            }
        } else {
            ConePoint { vertex, height }
        }
    }

    pub fn apex() -> Self {
        ConePoint::new(0, 0.0)
    }

    pub fn is_apex(&self) -> bool {
        self.height == 0.0
    }
}

impl PartialEq for ConePoint {
    fn eq(&self, other: &Self) -> bool {
        (self.is_apex() && other.is_apex())
            || (self.vertex == other.vertex && self.height == other.height)
    }
}

impl Eq for ConePoint {}

impl Hash for ConePoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        if self.is_apex() {
            0u8.hash(state);
        } else {
            1u8.hash(state);
            self.vertex.hash(state);
            self.height.to_bits().hash(state);
        }
    }
}

impl fmt::Display for ConePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_apex() {
            write!(f, "apex")
        } else {
            write!(f, "{}@{}", self.vertex, self.height)
        }
    }
}

impl FromStr for ConePoint {
    type Err = Error;

    /// `apex` or `vertex@height` with a numeric vertex id.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "apex" {
            return Ok(ConePoint::apex());
        }
        let bad = |reason: String| Error::InvalidPoint {
            text: s.to_string(),
            reason,
        };
        let (v, t) = s
            .split_once('@')
            .ok_or_else(|| bad("expected `vertex@height` or `apex`".into()))?;
        let vertex = v.trim().parse::<usize>().map_err(|e| bad(e.to_string()))?;
        let height = t.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?;
        if !(height.is_finite() && height >= 0.0) {
            return Err(bad("height must be finite and non-negative".into()));
        }
        Ok(ConePoint::new(vertex, height))
    }
}

/// The base graph together with the height grid 0 = t₀ < t₁ < … < t_max.
#[derive(Clone, Debug, Serialize)]
pub struct ConeGrid {
    base: BaseGraph,
    heights: Vec<f64>,
}

impl ConeGrid {
    /// Heights are quantized, sorted and deduplicated; the apex row is added.
    pub fn new(base: BaseGraph, heights: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut hs = vec![0.0];
        for t in heights {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::config("heights", format!("invalid height {t}")));
            }
            if t > 1e6 {
                return Err(Error::config("heights", format!("height {t} exceeds 1e6")));
            }
            hs.push(quantize(t));
        }
        hs.sort_by(f64::total_cmp);
        hs.dedup();
        if hs.len() < 2 {
            return Err(Error::config("heights", "the grid needs a positive height"));
        }
        Ok(ConeGrid { base, heights: hs })
    }

    /// Heights 2^{i/per_octave} for i ≥ 0 up to the first one reaching `t_max`.
    pub fn geometric(base: BaseGraph, t_max: f64, per_octave: u32) -> Result<Self> {
        if per_octave == 0 || !(t_max >= 1.0) {
            return Err(Error::config(
                "t_max",
                "need t_max >= 1 and at least one height per octave",
            ));
        }
        let mut hs = Vec::new();
        let mut i = 0u32;
        loop {
            let t = 2f64.powf(f64::from(i) / f64::from(per_octave));
            hs.push(t);
            if t >= t_max {
                break;
            }
            i += 1;
        }
        ConeGrid::new(base, hs)
    }

    pub fn with_extra_heights(self, extra: impl IntoIterator<Item = f64>) -> Result<Self> {
        let ConeGrid { base, heights } = self;
        ConeGrid::new(base, heights.into_iter().chain(extra))
    }

    /// Inserts one height inside every gap: half of t₁ below the first row,
    /// the geometric mean elsewhere. The result contains every old height.
    pub fn refined(&self) -> Result<Self> {
        let mut hs = self.heights.clone();
        for w in self.heights.windows(2) {
            let mid = if w[0] == 0.0 {
                w[1] / 2.0
            } else {
                (w[0] * w[1]).sqrt()
            };
            hs.push(mid);
        }
        ConeGrid::new(self.base.clone(), hs)
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn row_of(&self, t: f64) -> Option<usize> {
        let q = quantize(t);
        self.heights.binary_search_by(|h| h.total_cmp(&q)).ok()
    }

    pub fn node_count(&self) -> usize {
        1 + (self.heights.len() - 1) * self.base.len()
    }

    fn node(&self, vertex: usize, row: usize) -> usize {
        if row == 0 {
            0
        } else {
            1 + (row - 1) * self.base.len() + vertex
        }
    }

    fn node_point(&self, node: usize) -> ConePoint {
        if node == 0 {
            ConePoint::apex()
        } else {
            let n = self.base.len();
            let row = 1 + (node - 1) / n;
            ConePoint::new((node - 1) % n, self.heights[row])
        }
    }

    fn node_row(&self, node: usize) -> usize {
        if node == 0 {
            0
        } else {
            1 + (node - 1) / self.base.len()
        }
    }
}

/// A cone grid with a fixed λ, its weighted adjacency and a row cache.
pub struct ConeSpace {
    grid: ConeGrid,
    lambda: LambdaFunction,
    adjacency: Vec<Vec<(usize, u64)>>,
    cache: Mutex<HashMap<usize, Arc<Vec<u64>>>>,
}

impl fmt::Debug for ConeSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConeSpace")
            .field("base_nodes", &self.grid.base.len())
            .field("rows", &self.grid.heights.len())
            .field("lambda", &self.lambda)
            .finish()
    }
}

impl ConeSpace {
    pub fn new(grid: ConeGrid, lambda: LambdaFunction) -> Self {
        let adjacency = build_adjacency(&grid, &lambda);
        ConeSpace {
            grid,
            lambda,
            adjacency,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn grid(&self) -> &ConeGrid {
        &self.grid
    }

    pub fn lambda(&self) -> &LambdaFunction {
        &self.lambda
    }

    /// A grid point, with the height snapped to the quantized grid value.
    pub fn point(&self, vertex: usize, height: f64) -> Result<ConePoint> {
        if vertex >= self.grid.base.len() {
            return Err(Error::InvalidPoint {
                text: format!("{vertex}@{height}"),
                reason: format!("base graph has {} nodes", self.grid.base.len()),
            });
        }
        let row = self.grid.row_of(height).ok_or(Error::OffGrid(height))?;
        Ok(ConePoint::new(vertex, self.grid.heights[row]))
    }

    fn node_of(&self, p: &ConePoint) -> Result<usize> {
        if p.is_apex() {
            return Ok(0);
        }
        if p.vertex >= self.grid.base.len() {
            return Err(Error::InvalidPoint {
                text: p.to_string(),
                reason: format!("base graph has {} nodes", self.grid.base.len()),
            });
        }
        let row = self.grid.row_of(p.height).ok_or(Error::OffGrid(p.height))?;
        Ok(self.grid.node(p.vertex, row))
    }

    /// Every grid point, apex first, then row by row.
    pub fn points(&self) -> Vec<ConePoint> {
        (0..self.grid.node_count())
            .map(|n| self.grid.node_point(n))
            .collect()
    }

    fn row(&self, source: usize) -> Arc<Vec<u64>> {
        if let Some(r) = self.cache.lock().expect("cache poisoned").get(&source) {
            return Arc::clone(r);
        }
        let r = Arc::new(dijkstra(&self.adjacency, source));
        let mut cache = self.cache.lock().expect("cache poisoned");
        if cache.len() >= CACHE_ROWS {
            cache.clear();
        }
        cache.insert(source, Arc::clone(&r));
        r
    }

    /// Shortest-path length on the grid: an upper bound on d_λ.
    pub fn distance_upper(&self, p: &ConePoint, q: &ConePoint) -> Result<f64> {
        let (a, b) = (self.node_of(p)?, self.node_of(q)?);
        let (src, dst) = if a <= b { (a, b) } else { (b, a) };
        Ok(units_to_len(self.row(src)[dst]))
    }

    /// Grid points within `r` of `center`.
    pub fn ball(&self, center: &ConePoint, r: f64) -> Result<Vec<ConePoint>> {
        let row = self.row(self.node_of(center)?);
        Ok(row
            .iter()
            .enumerate()
            .filter(|(_, &u)| units_to_len(u) <= r)
            .map(|(n, _)| self.grid.node_point(n))
            .collect())
    }

    /// The λ-length summand evaluated on the given point sequence.
    pub fn lambda_length(&self, path: &[ConePoint]) -> Result<f64> {
        if path.len() < 2 {
            return Err(Error::EmptyInput("a path needs at least two points"));
        }
        for p in path {
            self.node_of(p)?;
        }
        Ok(lambda_length(&self.grid.base, &self.lambda, path))
    }
}

/// Σⱼ |tⱼ − tⱼ₊₁| + max{λ(tⱼ), λ(tⱼ₊₁)}·d(xⱼ, xⱼ₊₁); the angular term
/// vanishes when either end is the apex.
pub fn lambda_length(base: &BaseGraph, lambda: &LambdaFunction, path: &[ConePoint]) -> f64 {
    path.windows(2)
        .map(|w| {
            let (p, q) = (w[0], w[1]);
            let radial = (p.height - q.height).abs();
            let angular = if p.is_apex() || q.is_apex() {
                0.0
            } else {
                lambda.eval(p.height).max(lambda.eval(q.height)) * base.distance(p.vertex, q.vertex)
            };
            radial + angular
        })
        .sum()
}

/// Any path climbs or descends at least |t_p − t_q|.
pub fn cone_distance_lower(p: &ConePoint, q: &ConePoint) -> f64 {
    (p.height - q.height).abs()
}

fn build_adjacency(grid: &ConeGrid, lambda: &LambdaFunction) -> Vec<Vec<(usize, u64)>> {
    let n = grid.base.len();
    let rows = grid.heights.len();
    let mut adj = vec![Vec::new(); grid.node_count()];
    let mut link = |a: usize, b: usize, w: u64| {
        adj[a].push((b, w));
        adj[b].push((a, w));
    };
    let hs = &grid.heights;
    for row in 0..rows - 1 {
        // Heights are multiples of QUANTUM, so the radial step is exact.
        let dt = weight_units(hs[row + 1] - hs[row]);
        for v in 0..n {
            link(grid.node(v, row), grid.node(v, row + 1), dt);
        }
    }
    for &(u, v, _) in grid.base.edges() {
        if u == v {
            continue;
        }
        let d = grid.base.distance(u, v);
        for row in 1..rows {
            let w = weight_units(lambda.eval(hs[row]) * d);
            link(grid.node(u, row), grid.node(v, row), w);
            if row + 1 < rows {
                let dt = weight_units(hs[row + 1] - hs[row]);
                let lam = lambda.eval(hs[row]).max(lambda.eval(hs[row + 1]));
                let w = dt + weight_units(lam * d);
                link(grid.node(u, row), grid.node(v, row + 1), w);
                link(grid.node(v, row), grid.node(u, row + 1), w);
            }
        }
    }
    adj
}

fn dijkstra(adj: &[Vec<(usize, u64)>], source: usize) -> Vec<u64> {
    let mut dist = vec![u64::MAX; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// One row of the compactification diagnostic.
#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticRow {
    pub t: f64,
    /// Largest base distance d(x, y) among grid pairs at heights ≥ t whose
    /// upper cone distance is at most r_E.
    pub measured_sep: f64,
    /// r_E / λ(t).
    pub bound: f64,
    pub pass: bool,
    pub witness: Option<(ConePoint, ConePoint)>,
}

/// Measures how far apart (in the base) controlled pairs can sit at height
/// ≥ t, against the bound r_E/λ(t) inflated by `slack`.
///
/// Pairs are selected by the grid upper bound, so the measured separation
/// never exceeds what the continuous metric would allow.
pub fn compactification_diagnostic(
    space: &ConeSpace,
    r_e: f64,
    heights: &[f64],
    slack: f64,
) -> Result<Vec<DiagnosticRow>> {
    if !space.lambda.is_increasing_unbounded() {
        return Err(Error::LambdaNotIncreasingUnbounded);
    }
    if !(r_e.is_finite() && r_e >= 0.0) {
        return Err(Error::NegativeRadius(r_e));
    }
    let grid = &space.grid;
    let mut levels = Vec::new();
    for &t in heights {
        if t == 0.0 {
            continue;
        }
        let row = grid.row_of(t).ok_or(Error::OffGrid(t))?;
        levels.push((t, row));
    }
    if levels.is_empty() {
        return Err(Error::EmptyInput("no positive diagnostic heights"));
    }
    let min_row = levels.iter().map(|l| l.1).min().unwrap_or(1);
    let first = grid.node(0, min_row);
    let nodes = grid.node_count();
    let limit = weight_units(r_e);

    type Best = Option<(f64, usize, usize)>;
    let per_source: Vec<Vec<Best>> = par::map_range(first..nodes, |src| {
        let dist = dijkstra(&space.adjacency, src);
        let src_row = grid.node_row(src);
        let mut best: Vec<Best> = vec![None; levels.len()];
        for dst in first..nodes {
            if dist[dst] > limit {
                continue;
            }
            let level = src_row.min(grid.node_row(dst));
            let (pu, pv) = (grid.node_point(src), grid.node_point(dst));
            let sep = grid.base.distance(pu.vertex, pv.vertex);
            for (k, &(_, row)) in levels.iter().enumerate() {
                if level >= row && best[k].is_none_or(|b| sep > b.0) {
                    best[k] = Some((sep, src, dst));
                }
            }
        }
        best
    });

    Ok(levels
        .iter()
        .enumerate()
        .map(|(k, &(_, row))| {
            let best = per_source
                .iter()
                .filter_map(|b| b[k])
                .fold(None::<(f64, usize, usize)>, |acc, b| match acc {
                    Some(a) if a.0 >= b.0 => Some(a),
                    _ => Some(b),
                });
            let t = grid.heights[row];
            let bound = r_e / space.lambda.eval(t);
            let measured_sep = best.map_or(0.0, |b| b.0);
            DiagnosticRow {
                t,
                measured_sep,
                bound,
                pass: measured_sep <= bound * (1.0 + slack),
                witness: best.map(|b| (grid.node_point(b.1), grid.node_point(b.2))),
            }
        })
        .collect())
}
