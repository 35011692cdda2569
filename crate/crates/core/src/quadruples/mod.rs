//! Proximate quadruples on monotone pieces and plane curves, and proximate
//! 5-tuples on surfaces through heavy fibers.
//!
//! Every extraction reduces to one scan over an ordered piece: a primary
//! index that is strictly increasing and a secondary index that is weakly
//! monotone. Graph pieces scan along `A`; vertical and critical-column
//! pieces scan along `B` with `A` fixed.

pub mod audit;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::rational::{exceeds, int};
use crate::algebra::{Poly, Rational};
use crate::error::{Error, Result};
use crate::grid::{intersect_grid, GridIntersection, IndexedSet};
use crate::monotone::{assign_branches, Decomposition, Label};
use crate::report::ser_rational;

/// `Forbid(a) ⊂ A` for every `a` of an indexed set. Missing entries are empty.
#[derive(Clone, Debug, PartialEq)]
pub struct ForbidMap {
    raw: BTreeMap<Rational, BTreeSet<Rational>>,
    by_index: Vec<Vec<usize>>,
}

impl ForbidMap {
    pub fn empty(set: &IndexedSet) -> Self {
        ForbidMap {
            raw: BTreeMap::new(),
            by_index: vec![Vec::new(); set.len()],
        }
    }

    /// Every key and every forbidden element must belong to `set`.
    pub fn new(
        set: &IndexedSet,
        entries: impl IntoIterator<Item = (Rational, Vec<Rational>)>,
    ) -> Result<Self> {
        let mut out = Self::empty(set);
        for (key, values) in entries {
            let i = set.index_of(&key)?;
            for v in values {
                let j = set.index_of(&v)?;
                if out.raw.entry(key.clone()).or_default().insert(v) {
                    out.by_index[i].push(j);
                }
            }
            out.by_index[i].sort_unstable();
        }
        Ok(out)
    }

    /// Adds `a ∈ Forbid(a)` for every `a`, excluding the diagonal pairs.
    pub fn with_diagonal(&self, set: &IndexedSet) -> Self {
        let mut out = self.clone();
        for (i, a) in set.elements().iter().enumerate() {
            if out.raw.entry(a.clone()).or_default().insert(a.clone()) {
                out.by_index[i].push(i);
                out.by_index[i].sort_unstable();
            }
        }
        out
    }

    pub fn forbids(&self, i: usize, j: usize) -> bool {
        self.by_index[i].binary_search(&j).is_ok()
    }

    pub fn max_size(&self) -> usize {
        self.by_index.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn raw(&self) -> &BTreeMap<Rational, BTreeSet<Rational>> {
        &self.raw
    }
}

/// `1 + ` the largest forbidden set in either map.
pub fn default_capacity(fa: &ForbidMap, fb: &ForbidMap) -> usize {
    1 + fa.max_size().max(fb.max_size())
}

fn check_capacity(s: usize, maps: [&ForbidMap; 2]) -> Result<()> {
    if s == 0 {
        return Err(Error::InvalidArgument("S must be at least 1".into()));
    }
    for m in maps {
        if m.max_size() >= s {
            return Err(Error::ForbidCapacity {
                size: m.max_size(),
                capacity: s,
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProximateQuadruple {
    #[serde(serialize_with = "ser_rational")]
    pub a: Rational,
    #[serde(rename = "a'", serialize_with = "ser_rational")]
    pub a2: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub b: Rational,
    #[serde(rename = "b'", serialize_with = "ser_rational")]
    pub b2: Rational,
    #[serde(rename = "gapA")]
    pub gap_a: usize,
    #[serde(rename = "gapB")]
    pub gap_b: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProximateTuple5 {
    #[serde(serialize_with = "ser_rational")]
    pub a: Rational,
    #[serde(rename = "a'", serialize_with = "ser_rational")]
    pub a2: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub b: Rational,
    #[serde(rename = "b'", serialize_with = "ser_rational")]
    pub b2: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub c: Rational,
    #[serde(rename = "gapA")]
    pub gap_a: usize,
    #[serde(rename = "gapB")]
    pub gap_b: usize,
}

impl ProximateTuple5 {
    pub fn lift(q: ProximateQuadruple, c: Rational) -> Self {
        ProximateTuple5 {
            a: q.a,
            a2: q.a2,
            b: q.b,
            b2: q.b2,
            c,
            gap_a: q.gap_a,
            gap_b: q.gap_b,
        }
    }
}

/// Anchor bookkeeping of one or more scans.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanStats {
    pub anchors: usize,
    pub x_skips: usize,
    pub y_skips: usize,
    /// Anchors dropped for a big skip in either coordinate.
    pub skipped: usize,
    /// Anchors where every candidate in the window is forbidden.
    pub blocked: usize,
    pub emitted: usize,
}

impl ScanStats {
    fn absorb(&mut self, o: &ScanStats) {
        self.anchors += o.anchors;
        self.x_skips += o.x_skips;
        self.y_skips += o.y_skips;
        self.skipped += o.skipped;
        self.blocked += o.blocked;
        self.emitted += o.emitted;
    }
}

/// One coordinate of an ordered piece: set indices, gap limit and forbid map.
struct Track<'a> {
    idx: Vec<usize>,
    limit: &'a Rational,
    forbid: &'a ForbidMap,
}

/// Scan over anchors `i = S·j` with `i + S < len`. Returns (anchor, partner)
/// positions; the partner is the smallest `k ∈ (i, i+S]` avoiding both
/// forbidden sets.
fn scan(primary: &Track, secondary: &Track, s: usize) -> (Vec<(usize, usize)>, ScanStats) {
    let len = primary.idx.len();
    let mut stats = ScanStats::default();
    let mut out = Vec::new();
    let mut i = 0;
    while i + s < len {
        stats.anchors += 1;
        let (p, q) = (&primary.idx, &secondary.idx);
        let x_skip = exceeds(p[i + s] - p[i], primary.limit);
        let y_skip = exceeds(q[i + s].abs_diff(q[i]), secondary.limit);
        stats.x_skips += usize::from(x_skip);
        stats.y_skips += usize::from(y_skip);
        if x_skip || y_skip {
            stats.skipped += 1;
        } else {
            let k = (i + 1..=i + s)
                .find(|&k| !primary.forbid.forbids(p[i], p[k]) && !secondary.forbid.forbids(q[i], q[k]));
            match k {
                Some(k) => out.push((i, k)),
                None => stats.blocked += 1,
            }
        }
        i += s;
    }
    stats.emitted = out.len();
    (out, stats)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Graph over `x`: `A`-index strictly increasing.
    Graph,
    /// Column `x = const`: `B`-index strictly increasing.
    Column,
}

/// Points of one monotone piece as `(A-index, B-index)`, in scan order.
#[derive(Clone, Debug)]
pub struct Piece {
    pub orientation: Orientation,
    pub points: Vec<(usize, usize)>,
}

struct Context<'a> {
    a: &'a IndexedSet,
    b: &'a IndexedSet,
    fa: &'a ForbidMap,
    fb: &'a ForbidMap,
    limit_a: &'a Rational,
    limit_b: &'a Rational,
    s: usize,
}

fn scan_piece(piece: &Piece, cx: &Context) -> (Vec<ProximateQuadruple>, ScanStats) {
    let ai: Vec<usize> = piece.points.iter().map(|p| p.0).collect();
    let bi: Vec<usize> = piece.points.iter().map(|p| p.1).collect();
    let ta = Track {
        idx: ai,
        limit: cx.limit_a,
        forbid: cx.fa,
    };
    let tb = Track {
        idx: bi,
        limit: cx.limit_b,
        forbid: cx.fb,
    };
    let (pairs, stats) = match piece.orientation {
        Orientation::Graph => scan(&ta, &tb, cx.s),
        Orientation::Column => {
            let (pairs, mut st) = scan(&tb, &ta, cx.s);
            std::mem::swap(&mut st.x_skips, &mut st.y_skips);
            (pairs, st)
        }
    };
    let quads = pairs
        .into_iter()
        .map(|(i, k)| {
            let (p, q) = (piece.points[i], piece.points[k]);
            ProximateQuadruple {
                a: cx.a.get(p.0).clone(),
                a2: cx.a.get(q.0).clone(),
                b: cx.b.get(p.1).clone(),
                b2: cx.b.get(q.1).clone(),
                gap_a: p.0.abs_diff(q.0),
                gap_b: p.1.abs_diff(q.1),
            }
        })
        .collect();
    (quads, stats)
}

/// `4·S·c·n / |G|`, or zero for empty `G`.
fn gap_limit(s: usize, c_dec: usize, n: usize, g: usize) -> Rational {
    if g == 0 {
        return Rational::zero();
    }
    Rational::new((4 * s * c_dec * n).into(), g.into())
}

/// Outcome of quadruple extraction over one curve.
#[derive(Clone, Debug, Serialize)]
pub struct QuadrupleRun {
    pub quadruples: Vec<ProximateQuadruple>,
    pub stats: ScanStats,
    #[serde(rename = "G")]
    pub g_size: usize,
    #[serde(rename = "S")]
    pub s: usize,
    pub c_dec: usize,
    /// Points in critical columns, scanned as column pieces.
    pub residual_points: usize,
    #[serde(serialize_with = "ser_rational")]
    pub limit_a: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub limit_b: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub guarantee: Rational,
}

impl QuadrupleRun {
    pub fn meets_guarantee(&self) -> bool {
        int(self.stats.emitted as i64) >= self.guarantee
    }
}

fn index_points(
    points: &[(Rational, Rational)],
    a: &IndexedSet,
    b: &IndexedSet,
) -> Result<Vec<(usize, usize)>> {
    points
        .iter()
        .map(|(x, y)| Ok((a.index_of(x)?, b.index_of(y)?)))
        .collect()
}

/// Scan of one monotone piece. The guarantee is `|G|/(2S) - 1` with gap
/// limits `4S|A|/|G|` and `4S|B|/|G|`.
pub fn extract_monotone_quadruples(
    piece: &[(Rational, Rational)],
    a: &IndexedSet,
    b: &IndexedSet,
    s: usize,
    fa: &ForbidMap,
    fb: &ForbidMap,
) -> Result<QuadrupleRun> {
    check_capacity(s, [fa, fb])?;
    let pts = index_points(piece, a, b)?;
    if pts.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Unsorted("A-indices must be strictly increasing".into()));
    }
    let up = pts.windows(2).all(|w| w[0].1 <= w[1].1);
    let down = pts.windows(2).all(|w| w[0].1 >= w[1].1);
    if !up && !down {
        return Err(Error::Unsorted("B-indices must be weakly monotone".into()));
    }
    let g = pts.len();
    let (limit_a, limit_b) = (gap_limit(s, 1, a.len(), g), gap_limit(s, 1, b.len(), g));
    let cx = Context {
        a,
        b,
        fa,
        fb,
        limit_a: &limit_a,
        limit_b: &limit_b,
        s,
    };
    let piece = Piece {
        orientation: Orientation::Graph,
        points: pts,
    };
    let (quadruples, stats) = scan_piece(&piece, &cx);
    Ok(QuadrupleRun {
        quadruples,
        stats,
        g_size: g,
        s,
        c_dec: 1,
        residual_points: 0,
        guarantee: Rational::new(g.into(), (2 * s).into()) - int(1),
        limit_a,
        limit_b,
    })
}

/// Monotone pieces of `Z(g)` holding `points`, with the number of points in
/// critical columns.
pub fn curve_pieces(
    g: &Poly,
    a: &IndexedSet,
    b: &IndexedSet,
    points: &[(Rational, Rational)],
) -> Result<(Vec<Piece>, usize)> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if g.is_constant() {
        return Err(Error::Degenerate("curve polynomial is a nonzero constant".into()));
    }
    let idx = index_points(points, a, b)?;
    let d = Decomposition::new(g)?;
    let assignment = assign_branches(&d, g, points)?;
    let mut pieces = Vec::new();
    for (label, members) in assignment.pieces() {
        let orientation = match label {
            Label::Branch { .. } => Orientation::Graph,
            _ => Orientation::Column,
        };
        let mut pts: Vec<(usize, usize)> = members.iter().map(|&i| idx[i]).collect();
        pts.sort_unstable();
        pieces.push(Piece {
            orientation,
            points: pts,
        });
    }
    let residual = assignment.residual();
    let mut columns: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &i in &residual {
        columns.entry(idx[i].0).or_default().push(idx[i]);
    }
    for (_, mut pts) in columns {
        pts.sort_unstable();
        pieces.push(Piece {
            orientation: Orientation::Column,
            points: pts,
        });
    }
    Ok((pieces, residual.len()))
}

/// Quadruples on a plane curve: one scan per monotone piece with the
/// run-wide gap limits `4·S·c_dec·|A|/|G|`; guarantee `|G|/(2·S·c_dec) - c_dec`.
pub fn extract_curve_quadruples(
    g: &Poly,
    a: &IndexedSet,
    b: &IndexedSet,
    points: &[(Rational, Rational)],
    s: usize,
    fa: &ForbidMap,
    fb: &ForbidMap,
) -> Result<QuadrupleRun> {
    check_capacity(s, [fa, fb])?;
    let (pieces, residual) = curve_pieces(g, a, b, points)?;
    let n = points.len();
    let c_dec = pieces.len();
    let (limit_a, limit_b) = (gap_limit(s, c_dec, a.len(), n), gap_limit(s, c_dec, b.len(), n));
    let cx = Context {
        a,
        b,
        fa,
        fb,
        limit_a: &limit_a,
        limit_b: &limit_b,
        s,
    };
    let mut quadruples = Vec::new();
    let mut stats = ScanStats::default();
    for p in &pieces {
        let (q, st) = scan_piece(p, &cx);
        quadruples.extend(q);
        stats.absorb(&st);
    }
    let guarantee = if c_dec == 0 {
        Rational::zero()
    } else {
        Rational::new(n.into(), (2 * s * c_dec).into()) - int(c_dec as i64)
    };
    Ok(QuadrupleRun {
        quadruples,
        stats,
        g_size: n,
        s,
        c_dec,
        residual_points: residual,
        limit_a,
        limit_b,
        guarantee,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HeavyFibers {
    /// `|G| / (2|C|)`.
    #[serde(serialize_with = "ser_rational")]
    pub threshold: Rational,
    /// Indices into `C` of the fibers at or above the threshold.
    pub selected: Vec<usize>,
    /// Total size of the selected fibers; at least `|G|/2`.
    pub retained: usize,
}

/// Fibers with `count ≥ |G|/(2|C|)`, compared exactly as `2|C|·count ≥ |G|`.
pub fn heavy_fibers(g: &GridIntersection) -> Result<HeavyFibers> {
    heavy_from_counts(&g.fiber_counts)
}

pub fn heavy_from_counts(fibers: &[usize]) -> Result<HeavyFibers> {
    let total: usize = fibers.iter().sum();
    if total == 0 {
        return Err(Error::EmptyGrid);
    }
    let nc = fibers.len();
    let selected: Vec<usize> = (0..nc).filter(|&k| 2 * nc * fibers[k] >= total).collect();
    Ok(HeavyFibers {
        threshold: Rational::new(total.into(), (2 * nc).into()),
        retained: selected.iter().map(|&k| fibers[k]).sum(),
        selected,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberRun {
    #[serde(serialize_with = "ser_rational")]
    pub c: Rational,
    pub size: usize,
    pub pieces: usize,
    pub residual_points: usize,
    pub stats: ScanStats,
}

#[derive(Clone, Debug, Serialize)]
pub struct TupleRun {
    pub tuples: Vec<ProximateTuple5>,
    #[serde(rename = "G")]
    pub g_size: usize,
    pub heavy: HeavyFibers,
    pub fibers: Vec<FiberRun>,
    pub stats: ScanStats,
    #[serde(rename = "S")]
    pub s: usize,
    pub c_dec: usize,
    #[serde(serialize_with = "ser_rational")]
    pub limit_a: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub limit_b: Rational,
    /// `|G|/(4·S·c_dec) - |C|·c_dec`.
    #[serde(serialize_with = "ser_rational")]
    pub guarantee: Rational,
}

impl TupleRun {
    pub fn meets_guarantee(&self) -> bool {
        int(self.stats.emitted as i64) >= self.guarantee
    }
}

/// Computes `G` and extracts 5-tuples from its heavy fibers.
pub fn extract_proximate_tuples(
    f: &Poly,
    a: &IndexedSet,
    b: &IndexedSet,
    c: &IndexedSet,
    s: usize,
    fa: &ForbidMap,
    fb: &ForbidMap,
) -> Result<TupleRun> {
    check_surface(f)?;
    let g = intersect_grid(f, a, b, c)?;
    extract_tuples_from_grid(&g, s, fa, fb)
}

/// Refuses surfaces whose fibers do not depend on the fiber value.
pub fn check_surface(f: &Poly) -> Result<()> {
    if f.nvars() == 3 && !f.is_zero() && !f.depends_on(2) {
        return Err(Error::Cylinder(f.vars()[2].clone()));
    }
    Ok(())
}

/// As [`extract_proximate_tuples`] on a precomputed grid. Every heavy fiber
/// `f(x, y, c) = 0` is decomposed first so that `c_dec` (the largest piece
/// count) fixes the gap limits `4·S·c_dec·|A||C|/|G|` before any scan.
pub fn extract_tuples_from_grid(
    g: &GridIntersection,
    s: usize,
    fa: &ForbidMap,
    fb: &ForbidMap,
) -> Result<TupleRun> {
    check_capacity(s, [fa, fb])?;
    check_surface(&g.surface)?;
    let heavy = heavy_fibers(g)?;
    let zname = g.surface.vars()[2].clone();
    let prepared: Vec<(usize, Vec<Piece>, usize)> = heavy
        .selected
        .par_iter()
        .map(|&k| {
            let ck = g.c.get(k);
            let curve = g.surface.substitute(&zname, ck)?;
            if curve.is_zero() {
                return Err(Error::PlaneFiber(ck.to_string()));
            }
            let pts: Vec<(Rational, Rational)> = g
                .fiber(k)
                .into_iter()
                .map(|(i, j)| (g.a.get(i).clone(), g.b.get(j).clone()))
                .collect();
            let (pieces, residual) = curve_pieces(&curve, &g.a, &g.b, &pts)?;
            Ok((k, pieces, residual))
        })
        .collect::<Result<_>>()?;
    let c_dec = prepared.iter().map(|p| p.1.len()).max().unwrap_or(0);
    let n = g.len();
    let nc = g.c.len();
    let limit_a = gap_limit(s, c_dec, g.a.len() * nc, n);
    let limit_b = gap_limit(s, c_dec, g.b.len() * nc, n);
    let cx = Context {
        a: &g.a,
        b: &g.b,
        fa,
        fb,
        limit_a: &limit_a,
        limit_b: &limit_b,
        s,
    };
    let runs: Vec<(Vec<ProximateTuple5>, FiberRun)> = prepared
        .par_iter()
        .map(|(k, pieces, residual)| {
            let ck = g.c.get(*k).clone();
            let mut stats = ScanStats::default();
            let mut tuples = Vec::new();
            for p in pieces {
                let (q, st) = scan_piece(p, &cx);
                stats.absorb(&st);
                tuples.extend(q.into_iter().map(|q| ProximateTuple5::lift(q, ck.clone())));
            }
            let run = FiberRun {
                c: ck,
                size: g.fiber_counts[*k],
                pieces: pieces.len(),
                residual_points: *residual,
                stats,
            };
            (tuples, run)
        })
        .collect();
    let mut stats = ScanStats::default();
    let mut tuples = Vec::new();
    let mut fibers = Vec::new();
    for (t, r) in runs {
        stats.absorb(&r.stats);
        tuples.extend(t);
        fibers.push(r);
    }
    let guarantee = Rational::new(n.into(), (4 * s * c_dec.max(1)).into()) - int((nc * c_dec) as i64);
    Ok(TupleRun {
        tuples,
        g_size: n,
        heavy,
        fibers,
        stats,
        s,
        c_dec,
        limit_a,
        limit_b,
        guarantee,
    })
}

#[derive(Serialize)]
struct QuadrupleRow<'a> {
    a: String,
    #[serde(rename = "a'")]
    a2: String,
    b: String,
    #[serde(rename = "b'")]
    b2: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<&'a str>,
    #[serde(rename = "gapA")]
    gap_a: usize,
    #[serde(rename = "gapB")]
    gap_b: usize,
}

fn write_csv<'a>(rows: impl IntoIterator<Item = QuadrupleRow<'a>>, header: &[&str]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// CSV with columns `a, a', b, b', gapA, gapB`.
pub fn quadruples_csv(quads: &[ProximateQuadruple]) -> String {
    write_csv(
        quads.iter().map(|q| QuadrupleRow {
            a: q.a.to_string(),
            a2: q.a2.to_string(),
            b: q.b.to_string(),
            b2: q.b2.to_string(),
            c: None,
            gap_a: q.gap_a,
            gap_b: q.gap_b,
        }),
        &["a", "a'", "b", "b'", "gapA", "gapB"],
    )
}

/// CSV with columns `a, a', b, b', c, gapA, gapB`.
pub fn tuples_csv(tuples: &[ProximateTuple5]) -> String {
    let cs: Vec<String> = tuples.iter().map(|t| t.c.to_string()).collect();
    write_csv(
        tuples.iter().zip(&cs).map(|(t, c)| QuadrupleRow {
            a: t.a.to_string(),
            a2: t.a2.to_string(),
            b: t.b.to_string(),
            b2: t.b2.to_string(),
            c: Some(c),
            gap_a: t.gap_a,
            gap_b: t.gap_b,
        }),
        &["a", "a'", "b", "b'", "c", "gapA", "gapB"],
    )
}
