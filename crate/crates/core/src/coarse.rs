//! Finite-scale analyzers for coarse-map properties.
//!
//! Every verdict is qualified by the scale at which it was observed: a
//! finite sample can certify a property only "at scale", and a refutation
//! always carries a concrete pair that can be re-checked with a single
//! distance evaluation.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::spaces::{Point, SpaceHandle};

/// Default entourage radii for bornologous profiles.
pub const DEFAULT_RADII: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
/// Default sample ball radius for the lattices.
pub const DEFAULT_GROUP_SAMPLE: f64 = 8.0;
/// Default sample ball radius for F₂, whose balls grow like 3ʳ.
pub const DEFAULT_FREE_GROUP_SAMPLE: f64 = 5.0;
/// Default sample depth for the binary tree.
pub const DEFAULT_TREE_SAMPLE: f64 = 9.0;

type MapFn = dyn Fn(&Point) -> Result<Point> + Send + Sync;

/// A named map between point sets.
#[derive(Clone)]
pub struct PointMap {
    name: String,
    f: Arc<MapFn>,
}

impl PointMap {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    ) -> Self {
        PointMap {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        PointMap::new("identity", |p| Ok(p.clone()))
    }

    pub fn constant(p: Point) -> Self {
        PointMap::new(format!("constant {p}"), move |_| Ok(p.clone()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        (self.f)(p)
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &PointMap) -> PointMap {
        let (outer, inner_f) = (Arc::clone(&self.f), Arc::clone(&inner.f));
        PointMap {
            name: format!("{} . {}", self.name, inner.name),
            f: Arc::new(move |p| outer(&inner_f(p)?)),
        }
    }
}

impl fmt::Debug for PointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointMap({})", self.name)
    }
}

/// A named real-valued function on points.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
}

impl ScalarFunction {
    pub fn new(name: impl Into<String>, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFunction {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// Built-in functions by name:
    /// `constant`, `sin` (sine of the first lattice coordinate) and
    /// `sin-log-norm` (sin(log(1 + |x|)) with |x| the distance to the basepoint).
    pub fn builtin(name: &str, space: &SpaceHandle) -> Result<Self> {
        match name {
            "constant" => Ok(ScalarFunction::new("constant", |_| 1.0)),
            "sin" => {
                if !matches!(space.basepoint(), Point::Lattice(_)) {
                    return Err(Error::config("function", "`sin` needs a lattice model"));
                }
                Ok(ScalarFunction::new("sin", |p| match p {
                    Point::Lattice(x) => (x.coords[0] as f64).sin(),
                    _ => f64::NAN,
                }))
            }
            "sin-log-norm" => {
                let s = space.clone();
                Ok(ScalarFunction::new("sin-log-norm", move |p| {
                    let norm = s.distance(s.basepoint(), p).unwrap_or(f64::NAN);
                    norm.ln_1p().sin()
                }))
            }
            other => Err(Error::config("function", format!("unknown function {other:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, p: &Point) -> f64 {
        (self.f)(p)
    }
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFunction({})", self.name)
    }
}

/// The entourage E_R = {(x, y) : d(x, y) ≤ R}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ControlledSetSpec {
    radius: f64,
}

impl ControlledSetSpec {
    pub fn new(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(ControlledSetSpec { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, space: &SpaceHandle, x: &Point, y: &Point) -> Result<bool> {
        Ok(space.distance(x, y)? <= self.radius)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeRadius(r))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Bornologous,
    Proper,
    Close,
    Lipschitz,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Property::Bornologous => "bornologous",
            Property::Proper => "proper",
            Property::Close => "close",
            Property::Lipschitz => "lipschitz",
        };
        f.write_str(s)
    }
}

/// A concrete pair behind a refutation: `distance` is d(src, dst) in the
/// space named by `note`, re-checkable by one distance call.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub src: Point,
    pub dst: Point,
    pub distance: f64,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// Holds on the sample of the given radius; not a global statement.
    CertifiedAtScale { sample_radius: f64 },
    Refuted { witness: Witness },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::CertifiedAtScale { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::CertifiedAtScale { .. } => "certified-at-scale",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// One row of a scale table: input scale and the observed value, with the
/// pair that attains it.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleRow {
    pub scale: f64,
    pub value: f64,
    pub witness: Option<(Point, Point)>,
}

/// S(R) ≤ slope·R + offset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffineBound {
    pub slope: f64,
    pub offset: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoarseReport {
    pub property: Property,
    pub subject: String,
    pub rows: Vec<ScaleRow>,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineBound>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CoarseReport {
    /// Value recorded for scale `r`, if that scale was tabulated.
    pub fn value_at(&self, r: f64) -> Option<f64> {
        self.rows.iter().find(|row| row.scale == r).map(|row| row.value)
    }
}

/// Writes reports as CSV with columns
/// `property,R_or_B,value,witness_src,witness_dst`.
pub fn write_reports_csv<W: Write>(reports: &[CoarseReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["property", "R_or_B", "value", "witness_src", "witness_dst"])?;
    for report in reports {
        for row in &report.rows {
            let (src, dst) = match &row.witness {
                Some((a, b)) => (a.to_string(), b.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([
                report.property.to_string(),
                row.scale.to_string(),
                row.value.to_string(),
                src,
                dst,
            ])?;
        }
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv>".into(),
        source,
    })?;
    Ok(())
}

fn sorted_radii(radii: &[f64]) -> Result<Vec<f64>> {
    if radii.is_empty() {
        return Err(Error::EmptyInput("no radii given"));
    }
    for &r in radii {
        check_radius(r)?;
    }
    let mut rs = radii.to_vec();
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    Ok(rs)
}

/// Fits S(R) ≤ cR + b. Slope 1 is tried first; it is rejected only when the
/// excess S(R) − R is still strictly rising across the top radii, in which
/// case the least-squares slope is used. The offset is always the smallest
/// one making the bound hold on every row.
pub fn fit_affine(points: &[(f64, f64)]) -> Option<AffineBound> {
    if points.is_empty() {
        return None;
    }
    let min_offset = |c: f64| {
        points
            .iter()
            .map(|&(r, s)| s - c * r)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let excess: Vec<f64> = points.iter().map(|&(r, s)| s - r).collect();
    let tail = &excess[excess.len().saturating_sub(3)..];
    let still_rising = tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0]);
    if !still_rising {
        return Some(AffineBound {
            slope: 1.0,
            offset: min_offset(1.0),
        });
    }
    let n = points.len() as f64;
    let mean_r = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_s = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_r).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_r) * (p.1 - mean_s)).sum();
    let slope = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 1.0 };
    Some(AffineBound {
        slope,
        offset: min_offset(slope),
    })
}

type Best = Option<(f64, usize, usize)>;

fn better(a: Best, b: Best) -> Best {
    match (a, b) {
        (Some(x), Some(y)) => {
            if y.0 > x.0 {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// For each R: S(R) = max d(f(x), f(y)) over sample pairs with d(x, y) ≤ R.
///
/// The sample is the closed ball of radius `sample` around the source
/// basepoint.
pub fn bornologous_profile(
    f: &PointMap,
    source: &SpaceHandle,
    target: &SpaceHandle,
    radii: &[f64],
    sample: f64,
) -> Result<CoarseReport> {
    let radii = sorted_radii(radii)?;
    let points = source.closed_ball(source.basepoint(), sample)?;
    if points.is_empty() {
        return Err(Error::EmptyInput("sample ball is empty"));
    }
    let images = par::try_map(&points, |p| f.apply(p))?;
    let r_max = *radii.last().expect("non-empty");
    let per_point: Vec<Vec<Best>> = par::try_map_range(0..points.len(), |i| {
        let mut best: Vec<Best> = vec![Some((0.0, i, i)); radii.len()];
        for j in i + 1..points.len() {
            let d_in = source.distance(&points[i], &points[j])?;
            if d_in > r_max {
                continue;
            }
            let d_out = target.distance(&images[i], &images[j])?;
            for (k, &r) in radii.iter().enumerate() {
                if d_in <= r {
                    best[k] = better(best[k], Some((d_out, i, j)));
                }
            }
        }
        Ok::<_, Error>(best)
    })?;
    let rows: Vec<ScaleRow> = radii
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let best = per_point.iter().fold(None, |acc, b| better(acc, b[k]));
            let (value, i, j) = best.expect("every point pairs with itself");
            ScaleRow {
                scale: r,
                value,
                witness: Some((points[i].clone(), points[j].clone())),
            }
        })
        .collect();
    let affine = fit_affine(&rows.iter().map(|r| (r.scale, r.value)).collect::<Vec<_>>());
    Ok(CoarseReport {
        property: Property::Bornologous,
        subject: f.name().to_string(),
        rows,
        verdict: Verdict::CertifiedAtScale {
            sample_radius: sample,
        },
        affine,
        notes: vec![format!("{} sample points", points.len())],
    })
}

/// Counts |f⁻¹(ball(target basepoint, r))| inside the domain balls of radius
/// `domain` and `2·domain`.
///
/// Counts that agree at both horizons certify properness at scale. If the
/// domain grows while the image radius does not, a bounded set has
/// unboundedly many preimages at desk scale and the report is refuted with
/// a far domain point whose image stays near the target basepoint.
pub fn properness_table(
    f: &PointMap,
    source: &SpaceHandle,
    target: &SpaceHandle,
    radii: &[f64],
    domain: f64,
) -> Result<CoarseReport> {
    let radii = sorted_radii(radii)?;
    check_radius(domain)?;
    let outer = (2.0 * domain).max(domain + 1.0);
    let points = source.closed_ball(source.basepoint(), outer)?;
    let data: Vec<(f64, f64, Point)> = par::try_map(&points, |p| {
        let img = f.apply(p)?;
        Ok::<_, Error>((
            source.distance(source.basepoint(), p)?,
            target.distance(target.basepoint(), &img)?,
            img,
        ))
    })?;
    let inner_count = data.iter().filter(|d| d.0 <= domain).count();
    let image_radius = |horizon: f64| {
        data.iter()
            .filter(|d| d.0 <= horizon)
            .map(|d| d.1)
            .fold(0.0, f64::max)
    };
    let (img_inner, img_outer) = (image_radius(domain), image_radius(outer));

    let mut rows = Vec::with_capacity(radii.len());
    let mut stable = true;
    let mut notes = vec![format!(
        "domain horizons {domain} and {outer}: {inner_count} and {} points; image radii {img_inner} and {img_outer}",
        points.len()
    )];
    for &r in &radii {
        let small = data.iter().filter(|d| d.0 <= domain && d.1 <= r).count();
        let big = data.iter().filter(|d| d.1 <= r).count();
        if small != big {
            stable = false;
            notes.push(format!("r = {r}: preimage grew from {small} to {big}"));
        }
        rows.push(ScaleRow {
            scale: r,
            value: big as f64,
            witness: None,
        });
    }

    let verdict = if points.len() > inner_count && img_outer <= img_inner {
        let (i, d) = data
            .iter()
            .enumerate()
            .filter(|(_, d)| d.0 > domain)
            .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .expect("outer shell is non-empty");
        Verdict::Refuted {
            witness: Witness {
                src: target.basepoint().clone(),
                dst: d.2.clone(),
                distance: d.1,
                note: format!(
                    "{} at distance {} from the domain basepoint maps within {} of the target basepoint",
                    points[i], d.0, img_outer
                ),
            },
        }
    } else if stable {
        Verdict::CertifiedAtScale {
            sample_radius: outer,
        }
    } else {
        Verdict::Inconclusive {
            reason: "preimage counts still growing with the domain horizon".into(),
        }
    };
    Ok(CoarseReport {
        property: Property::Proper,
        subject: f.name().to_string(),
        rows,
        verdict,
        affine: None,
        notes,
    })
}

/// sup d(f(x), g(x)) over balls of radius sample/4, sample/2 and sample.
///
/// The maps are declared close at scale when the sup over the two largest
/// balls agrees.
pub fn closeness_bound(
    f: &PointMap,
    g: &PointMap,
    space: &SpaceHandle,
    sample: f64,
) -> Result<CoarseReport> {
    check_radius(sample)?;
    let mut radii = vec![sample / 4.0, sample / 2.0, sample];
    if space.is_discrete() {
        for r in &mut radii {
            *r = r.floor();
        }
    }
    radii.dedup();
    let points = space.closed_ball(space.basepoint(), sample)?;
    let data: Vec<(f64, f64, Point, Point)> = par::try_map(&points, |p| {
        let (fp, gp) = (f.apply(p)?, g.apply(p)?);
        Ok::<_, Error>((space.distance(space.basepoint(), p)?, space.distance(&fp, &gp)?, fp, gp))
    })?;
    let rows: Vec<ScaleRow> = radii
        .iter()
        .map(|&r| {
            let best = data
                .iter()
                .filter(|d| d.0 <= r)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            ScaleRow {
                scale: r,
                value: best.map_or(0.0, |b| b.1),
                witness: best.map(|b| (b.2.clone(), b.3.clone())),
            }
        })
        .collect();
    let n = rows.len();
    let verdict = if n == 1 || rows[n - 1].value == rows[n - 2].value {
        Verdict::CertifiedAtScale {
            sample_radius: sample,
        }
    } else {
        Verdict::Inconclusive {
            reason: format!(
                "sup grew from {} to {} between radii {} and {}",
                rows[n - 2].value,
                rows[n - 1].value,
                rows[n - 2].scale,
                rows[n - 1].scale
            ),
        }
    };
    Ok(CoarseReport {
        property: Property::Close,
        subject: format!("{} vs {}", f.name(), g.name()),
        rows,
        verdict,
        affine: None,
        notes: Vec::new(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HigsonRow {
    pub ball: f64,
    pub defect: f64,
    pub witness: Option<(Point, Point)>,
}

/// sup |f(y) − f(x)| over window pairs with d(x, y) ≤ R lying outside B×B.
#[derive(Clone, Debug, Serialize)]
pub struct HigsonDefectTable {
    pub function: String,
    pub radius: f64,
    pub window: f64,
    pub rows: Vec<HigsonRow>,
}

impl HigsonDefectTable {
    /// CSV with the same columns as coarse reports, property `higson`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["property", "R_or_B", "value", "witness_src", "witness_dst"])?;
        for row in &self.rows {
            let (src, dst) = match &row.witness {
                Some((a, b)) => (a.to_string(), b.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([
                "higson".to_string(),
                row.ball.to_string(),
                row.defect.to_string(),
                src,
                dst,
            ])?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv>".into(),
            source,
        })?;
        Ok(())
    }
}

/// Tabulates the Higson defect of `f` for the entourage of radius `radius`.
///
/// A pair is excluded only when both coordinates lie in the ball of radius
/// B; pairs with one coordinate inside are counted. Pairs are drawn from the
/// closed ball of radius `window` around the basepoint.
pub fn higson_defect(
    f: &ScalarFunction,
    space: &SpaceHandle,
    radius: f64,
    balls: &[f64],
    window: f64,
) -> Result<HigsonDefectTable> {
    let entourage = ControlledSetSpec::new(radius)?;
    let balls = sorted_radii(balls)?;
    let largest = *balls.last().expect("non-empty");
    if !(window > largest) {
        return Err(Error::WindowTooSmall {
            window,
            largest_ball: largest,
        });
    }
    let base = space.basepoint();
    let points = space.closed_ball(base, window)?;
    type Entry = Option<(f64, Point, Point)>;
    let per_point: Vec<Vec<Entry>> = par::try_map(&points, |x| {
        let nx = space.distance(base, x)?;
        let fx = f.eval(x);
        let mut best: Vec<Entry> = vec![None; balls.len()];
        for y in space.closed_ball(x, entourage.radius())? {
            let ny = space.distance(base, &y)?;
            if ny > window {
                continue;
            }
            let escape = nx.max(ny);
            let defect = (f.eval(&y) - fx).abs();
            for (k, &b) in balls.iter().enumerate() {
                if escape > b && best[k].as_ref().is_none_or(|e| defect > e.0) {
                    best[k] = Some((defect, x.clone(), y.clone()));
                }
            }
        }
        Ok::<_, Error>(best)
    })?;
    let rows = balls
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let best = per_point
                .iter()
                .filter_map(|v| v[k].as_ref())
                .fold(None::<&(f64, Point, Point)>, |acc, e| match acc {
                    Some(a) if a.0 >= e.0 => Some(a),
                    _ => Some(e),
                });
            HigsonRow {
                ball: b,
                defect: best.map_or(0.0, |e| e.0),
                witness: best.map(|e| (e.1.clone(), e.2.clone())),
            }
        })
        .collect();
    Ok(HigsonDefectTable {
        function: f.name().to_string(),
        radius,
        window,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::LatticePoint;

    fn z1() -> SpaceHandle {
        SpaceHandle::integer_lattice(1)
    }

    fn scale(k: i64) -> PointMap {
        PointMap::new(format!("x -> {k}x"), move |p| Ok(p.as_lattice()?.scale(k).into()))
    }

    #[test]
    fn identity_profile_is_exact() {
        let r = bornologous_profile(&PointMap::identity(), &z1(), &z1(), &[1.0, 2.0, 4.0], 8.0).unwrap();
        for row in &r.rows {
            assert_eq!(row.value, row.scale);
        }
        assert_eq!(r.affine, Some(AffineBound { slope: 1.0, offset: 0.0 }));
        assert!(r.verdict.is_certified());
    }

    #[test]
    fn doubling_falls_back_to_least_squares() {
        let r = bornologous_profile(&scale(2), &z1(), &z1(), &[1.0, 2.0, 4.0, 8.0], 10.0).unwrap();
        let a = r.affine.unwrap();
        assert_eq!(a.slope, 2.0);
        assert_eq!(a.offset, 0.0);
    }

    #[test]
    fn fit_prefers_unit_slope() {
        let a = fit_affine(&[(1.0, 3.0), (2.0, 4.0), (4.0, 6.0)]).unwrap();
        assert_eq!(a, AffineBound { slope: 1.0, offset: 2.0 });
        assert_eq!(fit_affine(&[]), None);
    }

    #[test]
    fn empty_radii_and_negative_sample() {
        assert!(bornologous_profile(&PointMap::identity(), &z1(), &z1(), &[], 4.0).is_err());
        assert!(matches!(
            bornologous_profile(&PointMap::identity(), &z1(), &z1(), &[1.0], -1.0),
            Err(Error::NegativeRadius(_))
        ));
    }

    #[test]
    fn properness_identity_and_constant() {
        let r = properness_table(&PointMap::identity(), &z1(), &z1(), &[5.0], 10.0).unwrap();
        assert_eq!(r.value_at(5.0), Some(11.0));
        assert!(r.verdict.is_certified());
        let c = PointMap::constant(LatticePoint::new(vec![0]).into());
        let r = properness_table(&c, &z1(), &z1(), &[1.0], 10.0).unwrap();
        assert!(r.verdict.is_refuted());
    }

    #[test]
    fn closeness_of_a_map_with_itself() {
        let r = closeness_bound(&scale(3), &scale(3), &z1(), 20.0).unwrap();
        assert!(r.rows.iter().all(|row| row.value == 0.0));
        assert!(r.verdict.is_certified());
        let r = closeness_bound(&scale(2), &PointMap::identity(), &z1(), 20.0).unwrap();
        assert!(matches!(r.verdict, Verdict::Inconclusive { .. }));
    }

    #[test]
    fn higson_constant_and_window() {
        let c = ScalarFunction::builtin("constant", &z1()).unwrap();
        let t = higson_defect(&c, &z1(), 3.0, &[10.0, 20.0], 40.0).unwrap();
        assert!(t.rows.iter().all(|r| r.defect == 0.0));
        assert!(matches!(
            higson_defect(&c, &z1(), 3.0, &[10.0, 20.0], 20.0),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn higson_counts_pairs_with_one_end_inside() {
        // f jumps between 5 and 6: the pair (5, 6) has one end in B(0, 5).
        let step = ScalarFunction::new("step", |p| {
            if p.as_lattice().unwrap().coords[0] >= 6 {
                1.0
            } else {
                0.0
            }
        });
        let t = higson_defect(&step, &z1(), 1.0, &[5.0, 6.0], 20.0).unwrap();
        assert_eq!(t.rows[0].defect, 1.0);
        assert_eq!(t.rows[1].defect, 0.0);
    }

    #[test]
    fn csv_columns() {
        let r = bornologous_profile(&PointMap::identity(), &z1(), &z1(), &[1.0], 2.0).unwrap();
        let mut buf = Vec::new();
        write_reports_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("property,R_or_B,value,witness_src,witness_dst\n"));
        assert!(text.contains("bornologous,1,1,"));
    }
}
