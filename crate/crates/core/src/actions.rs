//! Semigroup actions on the space models: orbits, coarse fixed points and
//! the boundary witness for F₂.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use serde::Serialize;

use crate::coarse::{self, AffineBound, CoarseReport, PointMap, Property, ScaleRow, Verdict, Witness};
use crate::cone::ConePoint;
use crate::error::{Error, Result};
use crate::odometer::odometer_step;
use crate::par;
use crate::spaces::{FreeWord, LatticePoint, Letter, Point, SpaceHandle};

/// Minimum number of returns into D read as "unboundedly many".
pub const DEFAULT_MIN_RETURNS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semigroup {
    Naturals,
    IntegerLattice(usize),
    NaturalLattice(usize),
    FreeGroup,
}

impl Semigroup {
    pub fn is_abelian(&self) -> bool {
        !matches!(self, Semigroup::FreeGroup)
    }
}

/// A semigroup acting through one point map per generator. ℕ has a single
/// generator; ℤᵏ carries ±eᵢ, ℕᵏ carries eᵢ and F₂ carries a, A, b, B.
#[derive(Clone, Debug)]
pub struct ActionSpec {
    pub semigroup: Semigroup,
    pub generators: Vec<PointMap>,
    pub isometry: bool,
}

impl ActionSpec {
    pub fn natural(map: PointMap, isometry: bool) -> Self {
        ActionSpec {
            semigroup: Semigroup::Naturals,
            generators: vec![map],
            isometry,
        }
    }

    /// The group (or ℕᵏ) acting on itself by translation.
    pub fn self_translation(space: &SpaceHandle) -> Result<Self> {
        let gens = space
            .semigroup_generators()
            .ok_or_else(|| Error::Unsupported(format!("{} is not a group", space.model_name())))?;
        let semigroup = match space.basepoint() {
            Point::Word(_) => Semigroup::FreeGroup,
            Point::Lattice(x) => {
                if gens.len() == x.rank() {
                    Semigroup::NaturalLattice(x.rank())
                } else {
                    Semigroup::IntegerLattice(x.rank())
                }
            }
            _ => unreachable!("only groups have generators"),
        };
        let generators = gens
            .into_iter()
            .map(|g| {
                let s = space.clone();
                PointMap::new(format!("left translation by {g}"), move |x| s.multiply(&g, x))
            })
            .collect();
        Ok(ActionSpec {
            semigroup,
            generators,
            isometry: true,
        })
    }

    /// ℕ acting on a lattice by x ↦ x + v.
    pub fn translation(v: LatticePoint) -> Self {
        ActionSpec::natural(translation_map(v), true)
    }

    /// ℕ acting on V₂ by the odometer.
    pub fn odometer() -> Self {
        ActionSpec::natural(
            PointMap::new("odometer", |p| Ok(odometer_step(p.as_tree()?).into())),
            false,
        )
    }

    /// ℕ acting on a cone over a cycle by rotating base vertices `k` steps.
    pub fn cone_rotation(space: &SpaceHandle, k: usize) -> Result<Self> {
        let cone = space
            .cone_space()
            .ok_or_else(|| Error::Unsupported("rotation needs the cone model".into()))?;
        let n = cone.grid().base().len();
        let map = PointMap::new(format!("rotation by {k}"), move |p| {
            let c = p.as_cone()?;
            if c.is_apex() {
                return Ok(p.clone());
            }
            Ok(ConePoint::new((c.vertex + k) % n, c.height).into())
        });
        Ok(ActionSpec::natural(map, true))
    }

    pub fn identity() -> Self {
        ActionSpec::natural(PointMap::identity(), true)
    }

    pub fn constant(p: Point) -> Self {
        ActionSpec::natural(PointMap::constant(p), false)
    }

    /// ℕ acting on ℤ by x ↦ (x + 1) mod m, a permutation of {0, …, m−1}.
    pub fn cyclic(m: i64) -> Result<Self> {
        if m < 1 {
            return Err(Error::config("action.modulus", "modulus must be >= 1"));
        }
        let map = PointMap::new(format!("x -> x+1 mod {m}"), move |p| {
            let x = p.as_lattice()?;
            if x.rank() != 1 {
                return Err(Error::Unsupported("cyclic action needs rank 1".into()));
            }
            Ok(LatticePoint::new(vec![(x.coords[0] + 1).rem_euclid(m)]).into())
        });
        Ok(ActionSpec::natural(map, false))
    }

    fn single_generator(&self) -> Result<&PointMap> {
        match (self.semigroup, self.generators.as_slice()) {
            (Semigroup::Naturals, [g]) => Ok(g),
            _ => Err(Error::Unsupported("this operation needs an action of N".into())),
        }
    }

    /// Checks d(Ψx, Ψy) = d(x, y) for every generator on the ball of radius
    /// `sample` around the basepoint.
    pub fn verify_isometry(&self, space: &SpaceHandle, sample: f64) -> Result<()> {
        let pts = space.closed_ball(space.basepoint(), sample)?;
        for g in &self.generators {
            check_isometry_on(g, space, &pts)?;
        }
        Ok(())
    }

    /// Checks Ψ_g Ψ_h x = Ψ_h Ψ_g x on the ball of radius `sample`; returns
    /// the first failing point.
    pub fn check_commutativity(&self, space: &SpaceHandle, sample: f64) -> Result<Option<Point>> {
        if !self.semigroup.is_abelian() {
            return Ok(None);
        }
        let pts = space.closed_ball(space.basepoint(), sample)?;
        for x in &pts {
            for (i, g) in self.generators.iter().enumerate() {
                for h in &self.generators[i + 1..] {
                    if g.apply(&h.apply(x)?)? != h.apply(&g.apply(x)?)? {
                        return Ok(Some(x.clone()));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// x ↦ x + v on a lattice.
pub fn translation_map(v: LatticePoint) -> PointMap {
    PointMap::new(format!("translation by {v}"), move |p| Ok(p.as_lattice()?.add(&v).into()))
}

/// x ↦ x·h on F₂.
pub fn right_translation_map(h: FreeWord) -> PointMap {
    PointMap::new(format!("right translation by {h}"), move |p| {
        Ok(p.as_word()?.multiply(&h).into())
    })
}

fn check_isometry_on(g: &PointMap, space: &SpaceHandle, pts: &[Point]) -> Result<()> {
    let images = par::try_map(pts, |p| g.apply(p))?;
    let bad = par::try_map_range(0..pts.len(), |i| {
        for j in i + 1..pts.len() {
            let before = space.distance(&pts[i], &pts[j])?;
            let after = space.distance(&images[i], &images[j])?;
            if before != after {
                return Ok(Some((i, j, before, after)));
            }
        }
        Ok::<_, Error>(None)
    })?;
    match bad.into_iter().flatten().next() {
        Some((i, j, before, after)) => Err(Error::IsometryViolation {
            src: pts[i].to_string(),
            dst: pts[j].to_string(),
            before,
            after,
        }),
        None => Ok(()),
    }
}

/// Runs the bornologous profile and properness table for each generator.
pub fn verify_coarse_action(
    action: &ActionSpec,
    space: &SpaceHandle,
    radii: &[f64],
    sample: f64,
) -> Result<Vec<CoarseReport>> {
    let mut out = Vec::with_capacity(2 * action.generators.len());
    for g in &action.generators {
        out.push(coarse::bornologous_profile(g, space, space, radii, sample)?);
        out.push(coarse::properness_table(g, space, space, radii, sample)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct EscapeRow {
    pub r: u64,
    pub last_time_within_r: u64,
}

/// Orbit points g·x₀ for |g| ≤ horizon with their first arrival times.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub x0: Point,
    pub horizon: u64,
    pub points: Vec<Point>,
    pub first_times: Vec<u64>,
    pub max_displacement: f64,
    pub escape_profile: Vec<EscapeRow>,
}

impl OrbitRecord {
    /// CSV with columns `r,last_time_within_r`.
    pub fn write_escape_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.escape_profile {
            w.serialize(row)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv>".into(),
            source,
        })?;
        Ok(())
    }
}

/// For each integer r up to ⌈max displacement⌉, the last time t with
/// displacement ≤ r.
fn escape_profile(samples: &[(u64, f64)]) -> Vec<EscapeRow> {
    let max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let top = max.ceil() as u64;
    let mut last = vec![0u64; top as usize + 1];
    for &(t, d) in samples {
        let r0 = d.ceil() as usize;
        if last[r0] < t {
            last[r0] = t;
        }
    }
    for r in 1..last.len() {
        last[r] = last[r].max(last[r - 1]);
    }
    last.into_iter()
        .enumerate()
        .map(|(r, t)| EscapeRow {
            r: r as u64,
            last_time_within_r: t,
        })
        .collect()
}

/// The orbit of `x0` up to word length `horizon`.
///
/// For ℕ the time is the iteration count and the escape profile uses the
/// whole sequence; for the other semigroups it is the breadth-first depth.
pub fn orbit(action: &ActionSpec, space: &SpaceHandle, x0: &Point, horizon: u64) -> Result<OrbitRecord> {
    space.check(x0)?;
    let mut index: HashMap<Point, usize> = HashMap::from([(x0.clone(), 0)]);
    let mut points = vec![x0.clone()];
    let mut first_times = vec![0];
    let mut samples = vec![(0u64, 0.0)];
    let mut frontier = vec![x0.clone()];
    for t in 1..=horizon {
        let mut next = Vec::new();
        for p in &frontier {
            for g in &action.generators {
                let q = g.apply(p)?;
                if action.semigroup == Semigroup::Naturals {
                    samples.push((t, space.distance(x0, &q)?));
                }
                let fresh = !index.contains_key(&q);
                if fresh {
                    if points.len() >= space.cap() {
                        return Err(Error::cap(space.cap(), format!("orbit of {x0} to horizon {horizon}")));
                    }
                    index.insert(q.clone(), points.len());
                    points.push(q.clone());
                    first_times.push(t);
                }
                // ℕ keeps iterating through repeats so every time is sampled.
                if fresh || action.semigroup == Semigroup::Naturals {
                    next.push(q);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    if action.semigroup != Semigroup::Naturals {
        samples = par::try_map_range(0..points.len(), |i| {
            Ok::<_, Error>((first_times[i], space.distance(x0, &points[i])?))
        })?;
    }
    let max_displacement = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(OrbitRecord {
        x0: x0.clone(),
        horizon,
        points,
        first_times,
        max_displacement,
        escape_profile: escape_profile(&samples),
    })
}

/// The outcome of cycle detection for an ℕ-action on a space with finite
/// balls.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CycleVerdict {
    /// m·x₀ = n·x₀ with m > n; the whole orbit lies in the first m points.
    Cycle { m: u64, n: u64, orbit: Vec<Point> },
    InconclusiveAtHorizon { horizon: u64 },
}

/// Detects a repeat m·x₀ = n·x₀ within the horizon, then re-checks every
/// orbit point up to the horizon against the first m points.
pub fn detect_coarse_fixed_point_finite(
    action: &ActionSpec,
    space: &SpaceHandle,
    x0: &Point,
    horizon: u64,
) -> Result<CycleVerdict> {
    if !space.is_discrete() {
        return Err(Error::Unsupported("cycle detection needs finite balls".into()));
    }
    let g = action.single_generator()?;
    space.check(x0)?;
    let mut seen: HashMap<Point, u64> = HashMap::from([(x0.clone(), 0)]);
    let mut orbit = vec![x0.clone()];
    let mut x = x0.clone();
    for m in 1..=horizon {
        x = g.apply(&x)?;
        if let Some(&n) = seen.get(&x) {
            let allowed: HashSet<&Point> = orbit.iter().collect();
            let mut y = x0.clone();
            for _ in 0..horizon {
                y = g.apply(&y)?;
                if !allowed.contains(&y) {
                    return Err(Error::Unsupported(format!(
                        "orbit left the detected cycle at {y}; the action is not deterministic"
                    )));
                }
            }
            return Ok(CycleVerdict::Cycle { m, n, orbit });
        }
        if seen.len() >= space.cap() {
            return Err(Error::cap(space.cap(), "cycle detection"));
        }
        seen.insert(x.clone(), m);
        orbit.push(x.clone());
    }
    Ok(CycleVerdict::InconclusiveAtHorizon { horizon })
}

/// A closed ball {x : d(center, x) ≤ radius}.
#[derive(Clone, Debug, Serialize)]
pub struct BallSpec {
    pub center: Point,
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NetCenter {
    pub point: Point,
    /// Orbit time at which the center is first reached.
    pub entry_time: u64,
    /// Least a ≥ 1 with a·x ∈ D.
    pub return_time: u64,
}

/// The data of the bounded-orbit construction for an isometric ℕ-action.
#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceCertificate {
    pub x0: Point,
    pub domain: BallSpec,
    pub horizon: u64,
    pub return_times: Vec<u64>,
    /// |K| for K = B(D, 1) ∩ orbit.
    pub net_source_size: usize,
    /// Center 0 is x₀ itself.
    pub centers: Vec<NetCenter>,
    pub l: f64,
    pub bound: f64,
    /// (S_j, i_j) pairs of the chain up to the horizon.
    pub chain: Vec<(u64, usize)>,
    pub max_orbit_distance: f64,
}

impl RecurrenceCertificate {
    /// L recomputed from the stored centers and return times by applying
    /// the action afresh.
    pub fn recompute_l(&self, action: &ActionSpec, space: &SpaceHandle) -> Result<f64> {
        let g = action.single_generator()?;
        let mut l: f64 = 0.0;
        for c in &self.centers {
            let mut y = c.point.clone();
            for a in 0..=c.return_time {
                if a > 0 {
                    y = g.apply(&y)?;
                }
                l = l.max(space.distance(&self.x0, &y)?);
            }
        }
        Ok(l)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum IsometryFixedPointVerdict {
    Certificate(Box<RecurrenceCertificate>),
    NotRecurrentAtHorizon { returns: usize, required: usize },
    InconclusiveAtHorizon { reason: String },
}

impl IsometryFixedPointVerdict {
    pub fn certificate(&self) -> Option<&RecurrenceCertificate> {
        match self {
            IsometryFixedPointVerdict::Certificate(c) => Some(c),
            _ => None,
        }
    }
}

/// Builds the bounded-orbit certificate for an isometric ℕ-action whose
/// orbit returns at least `min_returns` times into D.
pub fn detect_coarse_fixed_point_isometry(
    action: &ActionSpec,
    space: &SpaceHandle,
    x0: &Point,
    domain: &BallSpec,
    horizon: u64,
    min_returns: usize,
) -> Result<IsometryFixedPointVerdict> {
    let g = action.single_generator()?;
    if !action.isometry {
        return Err(Error::Unsupported("the action is not flagged as an isometry".into()));
    }
    if space.distance(&domain.center, x0)? > domain.radius {
        return Err(Error::config("domain", format!("x0 = {x0} is not in D")));
    }
    let d_points = space.closed_ball(&domain.center, domain.radius)?;
    let mut sample = d_points.clone();
    sample.truncate(64);
    check_isometry_on(g, space, &sample)?;

    let mut orbit = Vec::with_capacity(horizon as usize + 1);
    orbit.push(x0.clone());
    for t in 0..horizon as usize {
        let next = g.apply(&orbit[t])?;
        orbit.push(next);
    }
    // Isometry along the orbit itself: d(o_{t+1}, o_1) = d(o_t, o_0).
    let shifted = par::try_map_range(1..orbit.len(), |t| {
        let (before, after) = (space.distance(&orbit[t - 1], x0)?, space.distance(&orbit[t], &orbit[1])?);
        Ok::<_, Error>((before != after).then_some((t, before, after)))
    })?;
    if let Some((t, before, after)) = shifted.into_iter().flatten().next() {
        return Err(Error::IsometryViolation {
            src: orbit[t - 1].to_string(),
            dst: x0.to_string(),
            before,
            after,
        });
    }

    let mut distinct: HashMap<&Point, u64> = HashMap::new();
    for (t, p) in orbit.iter().enumerate() {
        distinct.entry(p).or_insert(t as u64);
    }
    let mut by_entry: Vec<(&Point, u64)> = distinct.into_iter().collect();
    by_entry.sort_by_key(|e| e.1);
    let in_d = par::try_map(&by_entry, |&(p, _)| {
        Ok::<_, Error>(space.distance(&domain.center, p)? <= domain.radius)
    })?;
    let in_d: HashMap<&Point, bool> = by_entry.iter().map(|e| e.0).zip(in_d).collect();
    let return_times: Vec<u64> = (1..orbit.len())
        .filter(|&t| in_d[&orbit[t]])
        .map(|t| t as u64)
        .collect();
    if return_times.len() < min_returns {
        return Ok(IsometryFixedPointVerdict::NotRecurrentAtHorizon {
            returns: return_times.len(),
            required: min_returns,
        });
    }

    // K = B(D, 1) ∩ orbit, in first-entry order.
    let near = par::try_map(&by_entry, |&(p, _)| {
        for q in &d_points {
            if space.distance(p, q)? < 1.0 {
                return Ok(true);
            }
        }
        Ok::<_, Error>(false)
    })?;
    let k: Vec<(&Point, u64)> = by_entry
        .iter()
        .zip(near)
        .filter(|(_, n)| *n)
        .map(|(e, _)| *e)
        .collect();

    let mut centers: Vec<(&Point, u64)> = Vec::new();
    for &(p, t) in &k {
        let mut covered = false;
        for c in &centers {
            if space.distance(c.0, p)? < 1.0 {
                covered = true;
                break;
            }
        }
        if !covered {
            centers.push((p, t));
        }
    }

    let mut net = Vec::with_capacity(centers.len());
    for &(p, m) in &centers {
        let first_return = (m as usize + 1..orbit.len()).find(|&t| in_d[&orbit[t]]);
        let Some(t) = first_return else {
            return Ok(IsometryFixedPointVerdict::InconclusiveAtHorizon {
                reason: format!("center {p} (entry time {m}) has no return into D before the horizon"),
            });
        };
        net.push(NetCenter {
            point: p.clone(),
            entry_time: m,
            return_time: t as u64 - m,
        });
    }

    let mut l: f64 = 0.0;
    for c in &net {
        for a in 0..=c.return_time {
            l = l.max(space.distance(x0, &orbit[(c.entry_time + a) as usize])?);
        }
    }

    let mut chain = Vec::new();
    let mut s = net[0].return_time;
    while s <= horizon {
        let here = &orbit[s as usize];
        let mut found = None;
        for (i, c) in net.iter().enumerate() {
            if space.distance(here, &c.point)? < 1.0 {
                found = Some(i);
                break;
            }
        }
        let Some(i) = found else {
            return Ok(IsometryFixedPointVerdict::InconclusiveAtHorizon {
                reason: format!("chain point at time {s} is not covered by the net"),
            });
        };
        chain.push((s, i));
        s += net[i].return_time;
    }

    let dists = par::try_map(&orbit, |p| space.distance(x0, p))?;
    let max_orbit_distance = dists.iter().copied().fold(0.0, f64::max);
    if let Some(t) = dists.iter().position(|&d| d >= l + 1.0) {
        return Err(Error::IsometryViolation {
            src: orbit[t].to_string(),
            dst: x0.to_string(),
            before: l + 1.0,
            after: dists[t],
        });
    }
    Ok(IsometryFixedPointVerdict::Certificate(Box::new(RecurrenceCertificate {
        x0: x0.clone(),
        domain: domain.clone(),
        horizon,
        return_times,
        net_source_size: k.len(),
        centers: net,
        l,
        bound: l + 1.0,
        chain,
        max_orbit_distance,
    })))
}

/// Checks d(m·x, n·x) ≤ L|m − n| with L = d(1·x, x) for all m, n ≤ horizon.
/// Rows are indexed by the lag |m − n|.
pub fn isometry_orbit_lipschitz(
    action: &ActionSpec,
    space: &SpaceHandle,
    x: &Point,
    horizon: u64,
) -> Result<CoarseReport> {
    let g = action.single_generator()?;
    let mut orbit = vec![x.clone()];
    for t in 0..horizon as usize {
        let next = g.apply(&orbit[t])?;
        orbit.push(next);
    }
    let l = if orbit.len() > 1 {
        space.distance(&orbit[1], x)?
    } else {
        0.0
    };
    let n = orbit.len();
    type Best = Option<(f64, usize, usize)>;
    type Violation = Option<(usize, usize, f64)>;
    let per_lag: Vec<(Best, Violation)> = par::try_map_range(1..n, |lag| {
        let mut best: Best = None;
        let mut violation = None;
        for m in 0..n - lag {
            let d = space.distance(&orbit[m], &orbit[m + lag])?;
            if best.is_none_or(|b| d > b.0) {
                best = Some((d, m, m + lag));
            }
            if violation.is_none() && d > l * lag as f64 {
                violation = Some((m, m + lag, d));
            }
        }
        Ok::<_, Error>((best, violation))
    })?;
    let rows: Vec<ScaleRow> = per_lag
        .iter()
        .enumerate()
        .map(|(i, (best, _))| {
            let (value, a, b) = best.expect("non-empty lag");
            ScaleRow {
                scale: (i + 1) as f64,
                value,
                witness: Some((orbit[a].clone(), orbit[b].clone())),
            }
        })
        .collect();
    let ratio = rows
        .iter()
        .map(|r| r.value / r.scale)
        .fold(0.0, f64::max);
    let verdict = match per_lag.iter().find_map(|p| p.1) {
        Some((a, b, d)) => Verdict::Refuted {
            witness: Witness {
                src: orbit[a].clone(),
                dst: orbit[b].clone(),
                distance: d,
                note: format!("times {a} and {b}: distance exceeds {l} x {}", b - a),
            },
        },
        None => Verdict::CertifiedAtScale {
            sample_radius: horizon as f64,
        },
    };
    Ok(CoarseReport {
        property: Property::Lipschitz,
        subject: format!("orbit of {x} under {}", g.name()),
        rows,
        verdict,
        affine: Some(AffineBound { slope: l, offset: 0.0 }),
        notes: vec![format!("L = {l}, extremal ratio {ratio}")],
    })
}

/// A point of ∂F₂ known through a reduced prefix: the cylinder of all
/// infinite reduced words extending it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryDirection {
    prefix: FreeWord,
}

impl BoundaryDirection {
    pub fn new(prefix: FreeWord) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::EmptyInput("boundary prefix must be non-empty"));
        }
        Ok(BoundaryDirection { prefix })
    }

    pub fn prefix(&self) -> &FreeWord {
        &self.prefix
    }
}

/// A generator g with (g·z)[position] ≠ z[position] for every extension z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryWitness {
    pub generator: Letter,
    pub position: usize,
}

/// Picks g = a unless the prefix is a power of a or of A, in which case
/// g = b; the position is where the heads of g·z and z first disagree.
pub fn boundary_moves_witness(z: &BoundaryDirection) -> BoundaryWitness {
    let letters = z.prefix.letters();
    if z.prefix.is_letter_power(Letter::A) || z.prefix.is_letter_power(Letter::AInv) {
        return BoundaryWitness {
            generator: Letter::B,
            position: 0,
        };
    }
    let run = |l: Letter| letters.iter().take_while(|&&x| x == l).count();
    let position = match letters[0] {
        Letter::A => run(Letter::A),
        Letter::AInv => run(Letter::AInv) - 1,
        _ => 0,
    };
    BoundaryWitness {
        generator: Letter::A,
        position,
    }
}

/// Left multiplication by one letter only touches the head, so the reduced
/// product g·prefix is a prefix of g·z for every extension z. The witness
/// holds when that product and the prefix both reach `position` and differ
/// there.
pub fn verify_boundary_witness(z: &BoundaryDirection, w: BoundaryWitness) -> bool {
    let moved = FreeWord::letter(w.generator).multiply(&z.prefix);
    let (a, b) = (moved.letters(), z.prefix.letters());
    w.position < a.len() && w.position < b.len() && a[w.position] != b[w.position]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i64) -> Point {
        LatticePoint::new(vec![v]).into()
    }

    #[test]
    fn orbit_examples() {
        let s = SpaceHandle::integer_lattice(1);
        let plus = ActionSpec::translation(LatticePoint::new(vec![1]));
        let o = orbit(&plus, &s, &z(0), 5).unwrap();
        assert_eq!(o.points.len(), 6);
        assert_eq!(o.max_displacement, 5.0);
        let profile: Vec<u64> = o.escape_profile.iter().map(|r| r.last_time_within_r).collect();
        assert_eq!(profile, [0, 1, 2, 3, 4, 5]);

        let t = SpaceHandle::binary_tree();
        let o = orbit(&ActionSpec::odometer(), &t, &Point::Tree("*".parse().unwrap()), 4).unwrap();
        let names: Vec<String> = o.points.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["*", "(0)", "(1)", "(1,0)", "(1,1)"]);

        let z2 = SpaceHandle::integer_lattice(2);
        let a = ActionSpec::self_translation(&z2).unwrap();
        assert_eq!(a.semigroup, Semigroup::IntegerLattice(2));
        let o = orbit(&a, &z2, z2.basepoint(), 2).unwrap();
        assert_eq!(o.points.len(), 13);
    }

    #[test]
    fn cycle_detection() {
        let s = SpaceHandle::integer_lattice(1);
        let c = ActionSpec::cyclic(5).unwrap();
        match detect_coarse_fixed_point_finite(&c, &s, &z(0), 100).unwrap() {
            CycleVerdict::Cycle { m, n, orbit } => {
                assert_eq!((m, n), (5, 0));
                assert_eq!(orbit.len(), 5);
            }
            other => panic!("{other:?}"),
        }
        let plus = ActionSpec::translation(LatticePoint::new(vec![1]));
        assert!(matches!(
            detect_coarse_fixed_point_finite(&plus, &s, &z(0), 1000).unwrap(),
            CycleVerdict::InconclusiveAtHorizon { .. }
        ));
    }

    #[test]
    fn identity_certificate() {
        let s = SpaceHandle::integer_lattice(1);
        let ball = BallSpec { center: z(0), radius: 2.0 };
        let v = detect_coarse_fixed_point_isometry(&ActionSpec::identity(), &s, &z(0), &ball, 100, 50).unwrap();
        let cert = v.certificate().unwrap();
        assert_eq!(cert.l, 0.0);
        assert_eq!(cert.max_orbit_distance, 0.0);
        assert_eq!(cert.recompute_l(&ActionSpec::identity(), &s).unwrap(), 0.0);
    }

    #[test]
    fn translation_is_not_recurrent() {
        let s = SpaceHandle::integer_lattice(1);
        let plus = ActionSpec::translation(LatticePoint::new(vec![1]));
        let ball = BallSpec { center: z(0), radius: 3.0 };
        assert!(matches!(
            detect_coarse_fixed_point_isometry(&plus, &s, &z(0), &ball, 1000, 50).unwrap(),
            IsometryFixedPointVerdict::NotRecurrentAtHorizon { returns: 3, .. }
        ));
    }

    #[test]
    fn lipschitz_orbit() {
        let s = SpaceHandle::integer_lattice(1);
        let three = ActionSpec::translation(LatticePoint::new(vec![3]));
        let r = isometry_orbit_lipschitz(&three, &s, &z(0), 50).unwrap();
        assert!(r.verdict.is_certified());
        assert!(r.rows.iter().all(|row| row.value == 3.0 * row.scale));
        let r = isometry_orbit_lipschitz(&ActionSpec::identity(), &s, &z(0), 10).unwrap();
        assert!(r.rows.iter().all(|row| row.value == 0.0));
    }

    #[test]
    fn non_isometry_is_refuted() {
        let s = SpaceHandle::integer_lattice(1);
        let square = ActionSpec::natural(
            PointMap::new("x -> 2x + 1", |p| Ok(p.as_lattice()?.scale(2).add(&LatticePoint::new(vec![1])).into())),
            false,
        );
        let r = isometry_orbit_lipschitz(&square, &s, &z(0), 6).unwrap();
        assert!(r.verdict.is_refuted());
    }

    #[test]
    fn boundary_witness_examples() {
        let dir = |s: &str| BoundaryDirection::new(s.parse().unwrap()).unwrap();
        let w = boundary_moves_witness(&dir("ba"));
        assert_eq!(w, BoundaryWitness { generator: Letter::A, position: 0 });
        assert_eq!(boundary_moves_witness(&dir("aaa")).generator, Letter::B);
        assert_eq!(boundary_moves_witness(&dir("AA")), BoundaryWitness { generator: Letter::B, position: 0 });
        assert_eq!(boundary_moves_witness(&dir("aab")).position, 2);
        assert_eq!(boundary_moves_witness(&dir("AAb")).position, 1);
        for p in ["ba", "aaa", "AA", "aab", "AAb", "Ab", "B"] {
            assert!(verify_boundary_witness(&dir(p), boundary_moves_witness(&dir(p))), "{p}");
        }
        assert!(BoundaryDirection::new(FreeWord::identity()).is_err());
    }

    #[test]
    fn commutativity_of_lattice_translations() {
        let z2 = SpaceHandle::integer_lattice(2);
        let a = ActionSpec::self_translation(&z2).unwrap();
        assert_eq!(a.check_commutativity(&z2, 3.0).unwrap(), None);
        a.verify_isometry(&z2, 3.0).unwrap();
        let odo = ActionSpec::odometer();
        assert!(odo.verify_isometry(&SpaceHandle::binary_tree(), 3.0).is_err());
    }
}
