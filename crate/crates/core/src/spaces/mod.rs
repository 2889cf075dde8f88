//! Proper metric space models with exact distances and finite balls.
//!
//! Lattices, F₂ and the binary tree use exact integer arithmetic; the cone
//! model delegates to [`crate::cone`].

mod config;
mod free_group;
mod lattice;
mod tree;

use std::collections::HashMap;
use std::collections::VecDeque;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::{Serialize, Serializer};

pub use crate::cone::ConePoint;
use crate::cone::ConeSpace;
use crate::error::{Error, Result};
pub use config::{ConeDescriptor, ModelKind, SpaceDescriptor};
pub use free_group::{ball_cardinality, reduce_word, reduced_words_of_length, FreeWord, Letter};
pub use lattice::LatticePoint;
pub use tree::TreeVertex;

/// Default cap on the number of points a single enumeration may produce.
pub const DEFAULT_CAP: usize = 1_000_000;

/// A point of one of the models.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Lattice(LatticePoint),
    Word(FreeWord),
    Tree(TreeVertex),
    Cone(ConePoint),
}

impl Point {
    pub fn kind(&self) -> &'static str {
        match self {
            Point::Lattice(_) => "lattice",
            Point::Word(_) => "free-group",
            Point::Tree(_) => "binary-tree",
            Point::Cone(_) => "cone",
        }
    }

    pub fn as_lattice(&self) -> Result<&LatticePoint> {
        match self {
            Point::Lattice(p) => Ok(p),
            other => Err(mismatch("lattice", other)),
        }
    }

    pub fn as_word(&self) -> Result<&FreeWord> {
        match self {
            Point::Word(w) => Ok(w),
            other => Err(mismatch("free-group", other)),
        }
    }

    pub fn as_tree(&self) -> Result<&TreeVertex> {
        match self {
            Point::Tree(v) => Ok(v),
            other => Err(mismatch("binary-tree", other)),
        }
    }

    pub fn as_cone(&self) -> Result<&ConePoint> {
        match self {
            Point::Cone(c) => Ok(c),
            other => Err(mismatch("cone", other)),
        }
    }
}

fn mismatch(expected: &'static str, found: &Point) -> Error {
    Error::ModelMismatch {
        expected,
        found: found.kind(),
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Lattice(p) => p.fmt(f),
            Point::Word(w) => w.fmt(f),
            Point::Tree(v) => v.fmt(f),
            Point::Cone(c) => c.fmt(f),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl From<LatticePoint> for Point {
    fn from(p: LatticePoint) -> Self {
        Point::Lattice(p)
    }
}

impl From<FreeWord> for Point {
    fn from(w: FreeWord) -> Self {
        Point::Word(w)
    }
}

impl From<TreeVertex> for Point {
    fn from(v: TreeVertex) -> Self {
        Point::Tree(v)
    }
}

impl From<ConePoint> for Point {
    fn from(c: ConePoint) -> Self {
        Point::Cone(c)
    }
}

/// Which model a [`SpaceHandle`] wraps.
#[derive(Clone, Debug)]
pub enum Model {
    /// ℤᵏ, or ℕᵏ with the restricted ℤᵏ metric. `generators: None` means the
    /// standard basis.
    Lattice {
        rank: usize,
        natural: bool,
        generators: Option<Vec<LatticePoint>>,
    },
    /// F₂ with the word metric; `generators: None` means {a, b}.
    FreeGroup { generators: Option<Vec<FreeWord>> },
    BinaryTree,
    Cone(Arc<ConeSpace>),
}

/// An immutable proper metric space with a basepoint and an enumeration cap.
#[derive(Clone, Debug)]
pub struct SpaceHandle {
    model: Model,
    basepoint: Point,
    cap: usize,
}

impl SpaceHandle {
    /// ℤᵏ with generators {±eᵢ}.
    pub fn integer_lattice(rank: usize) -> Self {
        SpaceHandle {
            model: Model::Lattice {
                rank,
                natural: false,
                generators: None,
            },
            basepoint: LatticePoint::origin(rank).into(),
            cap: DEFAULT_CAP,
        }
    }

    /// ℕᵏ with the restriction of the ℤᵏ word metric.
    pub fn natural_lattice(rank: usize) -> Self {
        SpaceHandle {
            model: Model::Lattice {
                rank,
                natural: true,
                generators: None,
            },
            basepoint: LatticePoint::origin(rank).into(),
            cap: DEFAULT_CAP,
        }
    }

    /// A lattice with a custom generating set; the metric is the word metric
    /// of ℤᵏ with respect to the generators and their negatives.
    pub fn lattice_with_generators(
        rank: usize,
        natural: bool,
        generators: Vec<LatticePoint>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::config("generators", "need at least one generator"));
        }
        for g in &generators {
            if g.rank() != rank {
                return Err(Error::config("generators", format!("{g} does not have rank {rank}")));
            }
            if g.is_zero() {
                return Err(Error::config("generators", "the zero vector is not a generator"));
            }
            if natural && !g.is_natural() {
                return Err(Error::config("generators", format!("{g} leaves the positive orthant")));
            }
        }
        Ok(SpaceHandle {
            model: Model::Lattice {
                rank,
                natural,
                generators: Some(generators),
            },
            basepoint: LatticePoint::origin(rank).into(),
            cap: DEFAULT_CAP,
        })
    }

    pub fn free_group() -> Self {
        SpaceHandle {
            model: Model::FreeGroup { generators: None },
            basepoint: FreeWord::identity().into(),
            cap: DEFAULT_CAP,
        }
    }

    pub fn free_group_with_generators(generators: Vec<FreeWord>) -> Result<Self> {
        if generators.is_empty() || generators.iter().any(FreeWord::is_empty) {
            return Err(Error::config("generators", "generators must be non-trivial words"));
        }
        Ok(SpaceHandle {
            model: Model::FreeGroup {
                generators: Some(generators),
            },
            basepoint: FreeWord::identity().into(),
            cap: DEFAULT_CAP,
        })
    }

    pub fn binary_tree() -> Self {
        SpaceHandle {
            model: Model::BinaryTree,
            basepoint: TreeVertex::root().into(),
            cap: DEFAULT_CAP,
        }
    }

    /// The cone model with the apex as basepoint.
    pub fn cone(space: ConeSpace) -> Self {
        SpaceHandle {
            model: Model::Cone(Arc::new(space)),
            basepoint: ConePoint::apex().into(),
            cap: DEFAULT_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_basepoint(mut self, basepoint: Point) -> Result<Self> {
        self.check(&basepoint)?;
        self.basepoint = basepoint;
        Ok(self)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn model_name(&self) -> &'static str {
        match &self.model {
            Model::Lattice { natural: false, .. } => "lattice",
            Model::Lattice { natural: true, .. } => "natural-lattice",
            Model::FreeGroup { .. } => "free-group",
            Model::BinaryTree => "binary-tree",
            Model::Cone(_) => "cone",
        }
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn cone_space(&self) -> Option<&ConeSpace> {
        match &self.model {
            Model::Cone(c) => Some(c),
            _ => None,
        }
    }

    /// Whether closed balls are finite sets of exact points (every model but
    /// the cone grid, which approximates a continuum).
    pub fn is_discrete(&self) -> bool {
        !matches!(self.model, Model::Cone(_))
    }

    /// Checks that `p` is a point of this model.
    pub fn check(&self, p: &Point) -> Result<()> {
        match (&self.model, p) {
            (Model::Lattice { rank, natural, .. }, Point::Lattice(x)) => {
                if x.rank() != *rank {
                    return Err(Error::InvalidPoint {
                        text: x.to_string(),
                        reason: format!("expected rank {rank}"),
                    });
                }
                if *natural && !x.is_natural() {
                    return Err(Error::InvalidPoint {
                        text: x.to_string(),
                        reason: "negative coordinate in a natural lattice".into(),
                    });
                }
                Ok(())
            }
            (Model::FreeGroup { .. }, Point::Word(_)) | (Model::BinaryTree, Point::Tree(_)) => Ok(()),
            (Model::Cone(space), Point::Cone(c)) => {
                let snapped = space.point(c.vertex, c.height)?;
                if snapped != *c {
                    return Err(Error::OffGrid(c.height));
                }
                Ok(())
            }
            (_, other) => Err(mismatch(self.model_name(), other)),
        }
    }

    /// Parses a point in this model's notation.
    pub fn parse_point(&self, s: &str) -> Result<Point> {
        let p = match &self.model {
            Model::Lattice { .. } => Point::Lattice(s.parse()?),
            Model::FreeGroup { .. } => Point::Word(s.parse()?),
            Model::BinaryTree => Point::Tree(s.parse()?),
            Model::Cone(space) => {
                let c: ConePoint = s.parse()?;
                Point::Cone(space.point(c.vertex, c.height)?)
            }
        };
        self.check(&p)?;
        Ok(p)
    }

    /// Symmetric generating set (each generator and its inverse) for the
    /// group models; `None` for the tree and the cone.
    pub fn symmetric_generators(&self) -> Option<Vec<Point>> {
        match &self.model {
            Model::Lattice {
                rank, generators, ..
            } => {
                let base: Vec<LatticePoint> = match generators {
                    Some(g) => g.clone(),
                    None => (0..*rank).map(|i| LatticePoint::unit(*rank, i)).collect(),
                };
                Some(
                    base.iter()
                        .flat_map(|g| [g.clone().into(), g.neg().into()])
                        .collect(),
                )
            }
            Model::FreeGroup { generators } => Some(match generators {
                Some(g) => g
                    .iter()
                    .flat_map(|w| [w.clone().into(), w.inverse().into()])
                    .collect(),
                None => Letter::ALL.iter().map(|&l| FreeWord::letter(l).into()).collect(),
            }),
            _ => None,
        }
    }

    /// The semigroup generators for ℕᵏ, or the symmetric set otherwise.
    pub fn semigroup_generators(&self) -> Option<Vec<Point>> {
        match &self.model {
            Model::Lattice {
                rank,
                natural: true,
                generators,
            } => Some(match generators {
                Some(g) => g.iter().cloned().map(Point::from).collect(),
                None => (0..*rank).map(|i| LatticePoint::unit(*rank, i).into()).collect(),
            }),
            _ => self.symmetric_generators(),
        }
    }

    /// Group law p·q for the lattice and free-group models.
    pub fn multiply(&self, p: &Point, q: &Point) -> Result<Point> {
        match &self.model {
            Model::Lattice { rank, .. } => {
                let (a, b) = (p.as_lattice()?, q.as_lattice()?);
                if a.rank() != *rank || b.rank() != *rank {
                    return Err(Error::InvalidPoint {
                        text: format!("{a} * {b}"),
                        reason: format!("expected rank {rank}"),
                    });
                }
                Ok(a.add(b).into())
            }
            Model::FreeGroup { .. } => Ok(p.as_word()?.multiply(q.as_word()?).into()),
            _ => Err(Error::Unsupported(format!(
                "{} has no group structure",
                self.model_name()
            ))),
        }
    }

    pub fn inverse(&self, p: &Point) -> Result<Point> {
        match (&self.model, p) {
            (Model::Lattice { .. }, Point::Lattice(a)) => Ok(a.neg().into()),
            (Model::FreeGroup { .. }, Point::Word(a)) => Ok(a.inverse().into()),
            _ => Err(Error::Unsupported(format!(
                "{} has no group structure",
                self.model_name()
            ))),
        }
    }

    /// Exact integer distance on the discrete models.
    pub fn int_distance(&self, p: &Point, q: &Point) -> Result<u64> {
        match (&self.model, p, q) {
            (Model::Lattice { generators, .. }, Point::Lattice(a), Point::Lattice(b)) => {
                self.check(p)?;
                self.check(q)?;
                match generators {
                    None => Ok(b.sub(a).l1_norm()),
                    Some(_) => self.bfs_word_length(&Point::Lattice(b.sub(a))),
                }
            }
            (Model::FreeGroup { generators }, Point::Word(a), Point::Word(b)) => {
                let diff = a.inverse().multiply(b);
                match generators {
                    None => Ok(diff.len() as u64),
                    Some(_) => self.bfs_word_length(&Point::Word(diff)),
                }
            }
            (Model::BinaryTree, Point::Tree(a), Point::Tree(b)) => Ok(a.tree_distance(b)),
            (Model::Cone(_), _, _) => Err(Error::Unsupported(
                "the cone metric is not integer valued".into(),
            )),
            (_, a, b) => {
                self.check(a)?;
                Err(mismatch(self.model_name(), b))
            }
        }
    }

    /// Distance between two points of this model.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        match (&self.model, p, q) {
            (Model::Cone(space), Point::Cone(a), Point::Cone(b)) => space.distance_upper(a, b),
            (Model::Cone(_), a, b) => {
                self.check(a)?;
                Err(mismatch("cone", b))
            }
            _ => self.int_distance(p, q).map(|d| d as f64),
        }
    }

    /// Word length of `target` by breadth-first search over the symmetric
    /// generators; used when no closed form exists.
    fn bfs_word_length(&self, target: &Point) -> Result<u64> {
        let identity = match &self.model {
            Model::Lattice { rank, .. } => Point::Lattice(LatticePoint::origin(*rank)),
            _ => Point::Word(FreeWord::identity()),
        };
        if *target == identity {
            return Ok(0);
        }
        let gens = self.symmetric_generators().expect("group model");
        let mut seen: HashMap<Point, u64> = HashMap::from([(identity.clone(), 0)]);
        let mut queue = VecDeque::from([identity]);
        while let Some(p) = queue.pop_front() {
            let d = seen[&p];
            for g in &gens {
                let next = self.multiply(&p, g)?;
                if next == *target {
                    return Ok(d + 1);
                }
                if !seen.contains_key(&next) {
                    if seen.len() >= self.cap {
                        return Err(Error::cap(self.cap, format!("computing the word length of {target}")));
                    }
                    seen.insert(next.clone(), d + 1);
                    queue.push_back(next);
                }
            }
        }
        Err(Error::Unsupported(format!("{target} is not reachable from the generators")))
    }

    /// All points at distance ≤ r from `center`.
    pub fn closed_ball(&self, center: &Point, r: f64) -> Result<Vec<Point>> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::NegativeRadius(r));
        }
        self.check(center)?;
        let steps = r.floor() as u64;
        match &self.model {
            Model::Lattice {
                natural,
                generators: None,
                ..
            } => {
                let c = center.as_lattice()?;
                Ok(lattice::l1_ball(c, steps, self.cap)?
                    .into_iter()
                    .filter(|p| !natural || p.is_natural())
                    .map(Point::from)
                    .collect())
            }
            Model::Lattice { natural, .. } => {
                let ball = self.bfs_ball(center, steps)?;
                Ok(ball
                    .into_iter()
                    .map(|(p, _)| p)
                    .filter(|p| !natural || p.as_lattice().is_ok_and(LatticePoint::is_natural))
                    .collect())
            }
            Model::FreeGroup { generators: None } => {
                let c = center.as_word()?;
                let radius = steps.min(40) as u32;
                if ball_cardinality(radius) > self.cap as u64 {
                    return Err(Error::cap(self.cap, format!("enumerating a ball of radius {steps} in F2")));
                }
                let mut out = Vec::new();
                for n in 0..=radius as usize {
                    out.extend(reduced_words_of_length(n).into_iter().map(|w| Point::Word(c.multiply(&w))));
                }
                Ok(out)
            }
            Model::FreeGroup { .. } => Ok(self.bfs_ball(center, steps)?.into_iter().map(|(p, _)| p).collect()),
            Model::BinaryTree => Ok(self.bfs_ball(center, steps)?.into_iter().map(|(p, _)| p).collect()),
            Model::Cone(space) => {
                let ball = space.ball(center.as_cone()?, r)?;
                if ball.len() > self.cap {
                    return Err(Error::cap(self.cap, "enumerating a cone ball"));
                }
                Ok(ball.into_iter().map(Point::from).collect())
            }
        }
    }

    fn neighbours(&self, p: &Point) -> Result<Vec<Point>> {
        match (&self.model, p) {
            (Model::BinaryTree, Point::Tree(v)) => {
                let mut out: Vec<Point> = v.parent().into_iter().map(Point::from).collect();
                out.push(v.child(false).into());
                out.push(v.child(true).into());
                Ok(out)
            }
            _ => {
                let gens = self
                    .symmetric_generators()
                    .ok_or_else(|| Error::Unsupported(format!("{} has no Cayley graph", self.model_name())))?;
                gens.iter().map(|g| self.multiply(p, g)).collect()
            }
        }
    }

    /// Breadth-first ball over the Cayley graph (or tree edges), with depths.
    fn bfs_ball(&self, center: &Point, steps: u64) -> Result<Vec<(Point, u64)>> {
        let mut seen: HashMap<Point, u64> = HashMap::from([(center.clone(), 0)]);
        let mut order = vec![(center.clone(), 0)];
        let mut frontier = 0;
        while frontier < order.len() {
            let (p, d) = order[frontier].clone();
            frontier += 1;
            if d == steps {
                continue;
            }
            for q in self.neighbours(&p)? {
                if !seen.contains_key(&q) {
                    if seen.len() >= self.cap {
                        return Err(Error::cap(self.cap, format!("breadth-first search to radius {steps}")));
                    }
                    seen.insert(q.clone(), d + 1);
                    order.push((q, d + 1));
                }
            }
        }
        Ok(order)
    }

    /// Independent breadth-first distance table from the basepoint over the
    /// Cayley graph. For ℕᵏ the search runs in ℤᵏ and is then restricted.
    pub fn word_metric_bfs_oracle(&self, r: u64) -> Result<Vec<(Point, u64)>> {
        match &self.model {
            Model::Lattice { natural, .. } => Ok(self
                .bfs_ball(&self.basepoint, r)?
                .into_iter()
                .filter(|(p, _)| !natural || p.as_lattice().is_ok_and(LatticePoint::is_natural))
                .collect()),
            Model::FreeGroup { .. } => self.bfs_ball(&self.basepoint, r),
            _ => Err(Error::Unsupported(format!(
                "{} is not a finitely generated group model",
                self.model_name()
            ))),
        }
    }
}
