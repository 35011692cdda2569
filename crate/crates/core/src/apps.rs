//! Distance applications: two lines, three anchors, points on a curve, and
//! triple points of three unit-circle families. Every count is exact; all
//! comparisons with asymptotic bounds are report-only.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::rational::{frac, int};
use crate::algebra::{det_bareiss, Poly, Rational};
use crate::error::{Error, Result};
use crate::fit::{fit_counts, Fit};
use crate::grid::IndexedSet;
use crate::report::SCHEMA_VERSION;
use crate::seed::stage_rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarPoint {
    pub x: Rational,
    pub y: Rational,
}

impl Serialize for PlanarPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x.to_string(), self.y.to_string()].serialize(s)
    }
}

impl PlanarPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        PlanarPoint { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Self {
        PlanarPoint::new(int(x), int(y))
    }

    pub fn dist2(&self, other: &PlanarPoint) -> Rational {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }
}

impl std::fmt::Display for PlanarPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Twice the signed area of `(p, q, r)`.
pub fn orientation(p: &PlanarPoint, q: &PlanarPoint, r: &PlanarPoint) -> Rational {
    (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x)
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesEntry {
    pub n: usize,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentSeries {
    pub entries: Vec<SeriesEntry>,
    /// Absent when fewer than two sizes have a positive count.
    pub fit: Option<Fit>,
}

impl ExponentSeries {
    pub fn from_counts(pairs: &[(usize, usize)]) -> Self {
        let positive: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(_, c)| c > 0).collect();
        ExponentSeries {
            entries: pairs.iter().map(|&(n, count)| SeriesEntry { n, count }).collect(),
            fit: fit_counts(&positive).ok(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRecord {
    pub schema: u32,
    pub name: &'static str,
    pub parameters: BTreeMap<String, String>,
    pub n: Vec<usize>,
    #[serde(rename = "exactCount")]
    pub exact_count: usize,
    /// Asymptotic shape without constants; report-only.
    #[serde(rename = "boundValue")]
    pub bound_value: f64,
    pub tallies: BTreeMap<&'static str, usize>,
    pub checks: BTreeMap<&'static str, bool>,
    pub warnings: Vec<String>,
    #[serde(rename = "exponentSeries", skip_serializing_if = "Option::is_none")]
    pub exponent_series: Option<ExponentSeries>,
}

impl ExperimentRecord {
    fn new(name: &'static str, n: Vec<usize>, exact_count: usize, bound_value: f64) -> Self {
        ExperimentRecord {
            schema: SCHEMA_VERSION,
            name,
            parameters: BTreeMap::new(),
            n,
            exact_count,
            bound_value,
            tallies: BTreeMap::new(),
            checks: BTreeMap::new(),
            warnings: Vec::new(),
            exponent_series: None,
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|&v| v)
    }

    pub fn with_series(mut self, series: ExponentSeries) -> Self {
        self.exponent_series = Some(series);
        self
    }
}

/// Squared distances between `s·u` and `t·v` for unit vectors at angle θ.
pub fn two_lines_values(cos_theta: &Rational, a: &IndexedSet, b: &IndexedSet) -> BTreeSet<Rational> {
    let two_c = cos_theta * int(2);
    a.elements()
        .par_iter()
        .flat_map_iter(|s| {
            let two_c = &two_c;
            b.elements().iter().map(move |t| s * s + t * t - two_c * s * t)
        })
        .collect()
}

pub fn two_lines_experiment(
    cos_theta: &Rational,
    a: &IndexedSet,
    b: &IndexedSet,
) -> Result<ExperimentRecord> {
    if cos_theta.is_zero() || cos_theta.abs() >= Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "cos θ = {cos_theta} must lie in (-1, 1) \\ {{0}}"
        )));
    }
    let count = two_lines_values(cos_theta, a, b).len();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let bound = (na * nb).powf(0.75).min(na * na);
    Ok(ExperimentRecord::new("two-lines", vec![a.len(), b.len()], count, bound).param("cosTheta", cos_theta))
}

/// Cayley–Menger determinant of `{p1, p2, p3, p}` in `x, y, z` standing for
/// the squared distances `|p - p1|², |p - p2|², |p - p3|²`. Vanishes exactly
/// on the realizable triples.
pub fn cayley_menger_surface(p1: &PlanarPoint, p2: &PlanarPoint, p3: &PlanarPoint) -> Result<Poly> {
    if orientation(p1, p2, p3).is_zero() {
        return Err(Error::InvalidArgument(format!(
            "anchors {p1}, {p2}, {p3} are collinear"
        )));
    }
    let vars = ["x", "y", "z"];
    let owned: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let c = |r: Rational| Poly::constant(&vars, r);
    let r = |name: &str| Poly::var(&vars, name).expect("listed variable");
    let (d12, d13, d23) = (p1.dist2(p2), p1.dist2(p3), p2.dist2(p3));
    let m = vec![
        vec![c(int(0)), c(int(1)), c(int(1)), c(int(1)), c(int(1))],
        vec![c(int(1)), c(int(0)), c(d12.clone()), c(d13.clone()), r("x")],
        vec![c(int(1)), c(d12), c(int(0)), c(d23.clone()), r("y")],
        vec![c(int(1)), c(d13), c(d23), c(int(0)), r("z")],
        vec![c(int(1)), r("x"), r("y"), r("z"), c(int(0))],
    ];
    Ok(det_bareiss(m, &owned))
}

fn dedup(points: &[PlanarPoint]) -> Vec<PlanarPoint> {
    let mut seen = HashSet::new();
    points.iter().filter(|p| seen.insert(*p)).cloned().collect()
}

/// Distances from three non-collinear anchors to `points`.
pub fn three_points_experiment(
    p1: &PlanarPoint,
    p2: &PlanarPoint,
    p3: &PlanarPoint,
    points: &[PlanarPoint],
) -> Result<ExperimentRecord> {
    let f = cayley_menger_surface(p1, p2, p3)?;
    let pts = dedup(points);
    let triples: Vec<[Rational; 3]> = pts
        .iter()
        .map(|p| [p.dist2(p1), p.dist2(p2), p.dist2(p3)])
        .collect();
    let off_surface = triples
        .par_iter()
        .filter(|t| !f.evaluate(&t[..]).expect("arity 3").is_zero())
        .count();
    let distinct: BTreeSet<&Rational> = triples.iter().flatten().collect();
    let d_sizes: Vec<usize> = (0..3)
        .map(|i| triples.iter().map(|t| &t[i]).collect::<BTreeSet<_>>().len())
        .collect();
    let n = pts.len();
    let mut rec = ExperimentRecord::new(
        "three-points",
        vec![n],
        distinct.len(),
        (n as f64).powf(7.0 / 12.0),
    )
    .param("p1", p1)
    .param("p2", p2)
    .param("p3", p3);
    rec.tallies.insert("duplicates", points.len() - n);
    rec.tallies.insert("D1", d_sizes[0]);
    rec.tallies.insert("D2", d_sizes[1]);
    rec.tallies.insert("D3", d_sizes[2]);
    rec.tallies.insert("off_surface", off_surface);
    rec.checks.insert("triples_on_surface", off_surface == 0);
    Ok(rec)
}

/// Warns when `gamma` is itself a line or a circle. Components of a
/// reducible `gamma` are not inspected.
fn curve_warnings(gamma: &Poly) -> Vec<String> {
    let d = gamma.total_degree();
    let circle = d == 2 && {
        let (xx, yy, xy) = (
            gamma.coefficient(&[2, 0]),
            gamma.coefficient(&[0, 2]),
            gamma.coefficient(&[1, 1]),
        );
        xy.is_zero() && !xx.is_zero() && xx == yy
    };
    match d {
        1 => vec![format!("{gamma} is a line")],
        _ if circle => vec![format!("{gamma} is a circle or a point")],
        _ => Vec::new(),
    }
}

/// Distinct pairwise distances among points of `Z(gamma)`.
pub fn curve_distance_experiment(gamma: &Poly, points: &[PlanarPoint]) -> Result<ExperimentRecord> {
    if gamma.nvars() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected a curve in two variables, got {:?}",
            gamma.vars()
        )));
    }
    for p in points {
        if !gamma.evaluate(&[p.x.clone(), p.y.clone()])?.is_zero() {
            return Err(Error::OffCurve(p.x.to_string(), p.y.to_string()));
        }
    }
    let pts = dedup(points);
    let distances: BTreeSet<Rational> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let pts = &pts;
            (i + 1..pts.len()).map(move |j| pts[i].dist2(&pts[j]))
        })
        .collect();
    let n = pts.len();
    let mut rec =
        ExperimentRecord::new("curve", vec![n], distances.len(), (n as f64).powf(1.5)).param("gamma", gamma);
    rec.tallies.insert("duplicates", points.len() - n);
    rec.warnings = curve_warnings(gamma);
    Ok(rec)
}

/// `p + ((1 - t²)/(1 + t²), 2t/(1 + t²))`, a rational point at unit
/// distance from `p`.
pub fn unit_offset(p: &PlanarPoint, t: &Rational) -> PlanarPoint {
    let den = Rational::one() + t * t;
    PlanarPoint::new(&p.x + (Rational::one() - t * t) / &den, &p.y + t * int(2) / den)
}

/// Circumcenter and squared circumradius, or `None` when collinear.
pub fn circumcircle(a: &PlanarPoint, b: &PlanarPoint, c: &PlanarPoint) -> Option<(PlanarPoint, Rational)> {
    let d = orientation(a, b, c) * int(2);
    if d.is_zero() {
        return None;
    }
    let (bx, by) = (&b.x - &a.x, &b.y - &a.y);
    let (cx, cy) = (&c.x - &a.x, &c.y - &a.y);
    let b2 = &bx * &bx + &by * &by;
    let c2 = &cx * &cx + &cy * &cy;
    let ux = (&cy * &b2 - &by * &c2) / &d;
    let uy = (&bx * &c2 - &cx * &b2) / &d;
    let r2 = &ux * &ux + &uy * &uy;
    Some((PlanarPoint::new(&a.x + ux, &a.y + uy), r2))
}

/// Whether unit circles about three distinct centers share a point, decided
/// from the two intersections of the first pair without radicals.
pub fn unit_circles_meet(o1: &PlanarPoint, o2: &PlanarPoint, o3: &PlanarPoint) -> bool {
    let d2 = o1.dist2(o2);
    if d2.is_zero() || d2 > int(4) {
        return false;
    }
    // intersections m ± h·perp(o2 - o1)/d with h² = 1 - d²/4
    let h2 = Rational::one() - &d2 / int(4);
    let mx = (&o1.x + &o2.x) / int(2) - &o3.x;
    let my = (&o1.y + &o2.y) / int(2) - &o3.y;
    let q = &mx * &mx + &my * &my + &h2 - Rational::one();
    let w = -&mx * (&o2.y - &o1.y) + &my * (&o2.x - &o1.x);
    &q * &q * &d2 == h2 * int(4) * &w * &w
}

#[derive(Clone, Debug, Default)]
struct CircleTally {
    triples: usize,
    degenerate: usize,
    coincident: usize,
    oracle_disagreements: usize,
    centers: BTreeSet<PlanarPoint>,
}

/// Triple points of three unit-circle families about `anchors[i]`, one
/// circle per `t` in `params[i]`. A triple point is identified by its
/// circumcenter; center triples that coincide or are collinear are tallied.
pub fn unit_circle_triple_points(
    anchors: [&PlanarPoint; 3],
    params: [&[Rational]; 3],
) -> Result<ExperimentRecord> {
    let [p1, p2, p3] = anchors;
    if p1 == p2 || p1 == p3 || p2 == p3 {
        return Err(Error::InvalidArgument("anchors must be distinct".into()));
    }
    let centers: Vec<Vec<PlanarPoint>> = (0..3)
        .map(|i| {
            let mut c: Vec<PlanarPoint> = params[i].iter().map(|t| unit_offset(anchors[i], t)).collect();
            c.sort();
            c.dedup();
            c
        })
        .collect();
    let tallies: Vec<CircleTally> = centers[0]
        .par_iter()
        .map(|o1| {
            let mut t = CircleTally::default();
            for o2 in &centers[1] {
                for o3 in &centers[2] {
                    if o1 == o2 || o1 == o3 || o2 == o3 {
                        t.coincident += 1;
                        continue;
                    }
                    let Some((center, r2)) = circumcircle(o1, o2, o3) else {
                        t.degenerate += 1;
                        continue;
                    };
                    let meets = r2.is_one();
                    if meets != unit_circles_meet(o1, o2, o3) {
                        t.oracle_disagreements += 1;
                    }
                    if meets {
                        t.triples += 1;
                        t.centers.insert(center);
                    }
                }
            }
            t
        })
        .collect();
    let mut total = CircleTally::default();
    for t in tallies {
        total.triples += t.triples;
        total.degenerate += t.degenerate;
        total.coincident += t.coincident;
        total.oracle_disagreements += t.oracle_disagreements;
        total.centers.extend(t.centers);
    }
    let n = centers.iter().map(Vec::len).max().unwrap_or(0);
    let mut rec = ExperimentRecord::new(
        "circles",
        centers.iter().map(Vec::len).collect(),
        total.centers.len(),
        (n as f64).powf(12.0 / 7.0),
    )
    .param("p1", p1)
    .param("p2", p2)
    .param("p3", p3)
    .param("grouping", "triple points identified by circumcenter");
    rec.tallies.insert("center_triples", total.triples);
    rec.tallies.insert("degenerate", total.degenerate);
    rec.tallies.insert("coincident", total.coincident);
    rec.tallies
        .insert("oracle_disagreements", total.oracle_disagreements);
    rec.checks
        .insert("oracle_agreement", total.oracle_disagreements == 0);
    Ok(rec)
}

/// Points `(t, y(t))` of a curve of degree one in `y`, for `t = 1, 2, …`,
/// skipping parameters where the `y`-coefficient vanishes.
pub fn points_on_curve(gamma: &Poly, n: usize) -> Result<Vec<PlanarPoint>> {
    if gamma.nvars() != 2 || gamma.degree_in(1) != 1 {
        return Err(Error::InvalidArgument(format!(
            "cannot parametrize {gamma}: points are generated only for curves of degree one in y"
        )));
    }
    let x = gamma.vars()[0].clone();
    let [c0, c1] = [0, 1].map(|k| gamma.coeffs_in(1)[k].clone());
    let mut out = Vec::with_capacity(n);
    let mut t = 0i64;
    while out.len() < n {
        t += 1;
        let eval = |p: &Poly| {
            p.substitute(&x, &int(t))
                .expect("present")
                .constant_value()
                .expect("constant")
        };
        let lead = eval(&c1);
        if lead.is_zero() {
            continue;
        }
        out.push(PlanarPoint::new(int(t), -eval(&c0) / lead));
    }
    Ok(out)
}

/// `t = 0, 1, …, n - 1`.
pub fn default_params(n: usize) -> Vec<Rational> {
    (0..n as i64).map(int).collect()
}

/// `n` points `(t, (2t + 1)/3)`, `t = 1..=n`.
pub fn line_points(n: usize) -> Vec<PlanarPoint> {
    (1..=n as i64)
        .map(|t| PlanarPoint::new(int(t), frac(2 * t + 1, 3)))
        .collect()
}

/// `(t, t³)`, `t = 1..=n`.
pub fn cubic_points(n: usize) -> Vec<PlanarPoint> {
    (1..=n as i64).map(|t| PlanarPoint::ints(t, t * t * t)).collect()
}

/// `n` distinct points with coordinates `p/q`, `|p| ≤ 1000`, `1 ≤ q ≤ 20`.
pub fn random_points(n: usize, seed: u64) -> Vec<PlanarPoint> {
    let mut rng = stage_rng(seed, "apps/points");
    let mut out = BTreeSet::new();
    while out.len() < n {
        let mut coord = || frac(rng.gen_range(-1000..=1000), rng.gen_range(1..=20));
        let p = PlanarPoint::new(coord(), coord());
        out.insert(p);
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchors() -> [PlanarPoint; 3] {
        [
            PlanarPoint::ints(0, 0),
            PlanarPoint::ints(1, 0),
            PlanarPoint::ints(0, 1),
        ]
    }

    #[test]
    fn two_lines_example() {
        let s = IndexedSet::range(1, 2);
        let r = two_lines_experiment(&frac(3, 5), &s, &s).unwrap();
        assert_eq!(r.exact_count, 3);
        let one = IndexedSet::range(1, 1);
        assert_eq!(
            two_lines_experiment(&frac(3, 5), &one, &one).unwrap().exact_count,
            1
        );
        for bad in [int(0), int(1), int(-1)] {
            assert!(two_lines_experiment(&bad, &s, &s).is_err());
        }
    }

    #[test]
    fn two_lines_symmetric() {
        let a = IndexedSet::from_ints([1, 3, 4, 9]).unwrap();
        let b = IndexedSet::range(2, 7);
        let c = frac(1, 3);
        assert_eq!(
            two_lines_values(&c, &a, &b).len(),
            two_lines_values(&c, &b, &a).len()
        );
    }

    #[test]
    fn cayley_menger_examples() {
        let [p1, p2, p3] = anchors();
        let f = cayley_menger_surface(&p1, &p2, &p3).unwrap();
        assert!(f.evaluate(&[int(0), int(1), int(1)]).unwrap().is_zero());
        assert!(f.evaluate(&[int(2), int(1), int(1)]).unwrap().is_zero());
        assert!(!f.evaluate(&[int(0), int(0), int(0)]).unwrap().is_zero());
        let line = cayley_menger_surface(&p1, &p2, &PlanarPoint::ints(2, 0));
        assert!(line.is_err());
    }

    #[test]
    fn three_points_memberships() {
        let [p1, p2, p3] = anchors();
        let pts = random_points(50, 11);
        let r = three_points_experiment(&p1, &p2, &p3, &pts).unwrap();
        assert!(r.passed());
        assert_eq!(r.tallies["off_surface"], 0);
        let r = three_points_experiment(&p1, &p2, &p3, std::slice::from_ref(&p1)).unwrap();
        assert!(r.exact_count >= 1);
        assert_eq!(r.n, vec![1]);
    }

    #[test]
    fn curve_example() {
        let gamma = crate::expr::parse_over("y - x^3", &["x", "y"]).unwrap();
        let r = curve_distance_experiment(&gamma, &cubic_points(3)).unwrap();
        assert_eq!(r.exact_count, 3);
        assert_eq!(
            curve_distance_experiment(&gamma, &cubic_points(1))
                .unwrap()
                .exact_count,
            0
        );
        let off = [PlanarPoint::ints(1, 2)];
        assert!(matches!(
            curve_distance_experiment(&gamma, &off),
            Err(Error::OffCurve(..))
        ));
        let circle = crate::expr::parse_over("x^2 + y^2 - 25", &["x", "y"]).unwrap();
        let r = curve_distance_experiment(&circle, &[PlanarPoint::ints(3, 4)]).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn parametrized_curve_points() {
        let gamma = crate::expr::parse_over("y - x^3", &["x", "y"]).unwrap();
        assert_eq!(points_on_curve(&gamma, 3).unwrap(), cubic_points(3));
        let hyper = crate::expr::parse_over("(x - 2)*y - 1", &["x", "y"]).unwrap();
        let pts = points_on_curve(&hyper, 3).unwrap();
        assert_eq!(pts[1], PlanarPoint::new(int(3), int(1)));
        assert!(points_on_curve(&crate::expr::parse_over("y^2 - x", &["x", "y"]).unwrap(), 2).is_err());
    }

    #[test]
    fn inscribed_centers() {
        // a triangle inscribed in the unit circle about the origin
        let o = [
            PlanarPoint::ints(1, 0),
            unit_offset(&PlanarPoint::ints(0, 0), &int(2)),
            unit_offset(&PlanarPoint::ints(0, 0), &frac(-1, 3)),
        ];
        let (center, r2) = circumcircle(&o[0], &o[1], &o[2]).unwrap();
        assert!(r2.is_one());
        assert_eq!(center, PlanarPoint::ints(0, 0));
        assert!(unit_circles_meet(&o[0], &o[1], &o[2]));
    }

    #[test]
    fn collinear_centers_are_tallied() {
        let p = [
            PlanarPoint::ints(0, 0),
            PlanarPoint::ints(1, 0),
            PlanarPoint::ints(2, 0),
        ];
        // t = 0 puts each center one unit to the right: all on y = 0
        let t = [int(0)];
        let r = unit_circle_triple_points([&p[0], &p[1], &p[2]], [&t, &t, &t]).unwrap();
        assert_eq!(r.exact_count, 0);
        assert_eq!(r.tallies["degenerate"], 1);
        assert!(unit_circle_triple_points([&p[0], &p[0], &p[2]], [&t, &t, &t]).is_err());
    }

    #[test]
    fn predicate_matches_pairwise_oracle() {
        let p = [
            PlanarPoint::ints(0, 0),
            PlanarPoint::ints(1, 0),
            PlanarPoint::ints(0, 1),
        ];
        let ts: Vec<Rational> = (-4..=4).flat_map(|n| [int(n), frac(n, 3)]).collect();
        let r = unit_circle_triple_points([&p[0], &p[1], &p[2]], [&ts, &ts, &ts]).unwrap();
        assert!(r.passed());
        assert!(r.tallies["center_triples"] > 0 || r.tallies["degenerate"] > 0);
    }

    #[test]
    fn planted_triple_point() {
        // t = -1 offsets by (0, -1): centers (1,0), (0,1), (-1,0) about the origin
        let p = [
            PlanarPoint::ints(1, 1),
            PlanarPoint::ints(0, 2),
            PlanarPoint::ints(-1, 1),
        ];
        let t = [int(-1), int(3)];
        let r = unit_circle_triple_points([&p[0], &p[1], &p[2]], [&t, &t, &t]).unwrap();
        assert!(r.passed());
        assert!(r.exact_count >= 1);
        let one = [int(-1)];
        let r = unit_circle_triple_points([&p[0], &p[1], &p[2]], [&one, &one, &one]).unwrap();
        assert_eq!((r.exact_count, r.tallies["center_triples"]), (1, 1));
    }
}
