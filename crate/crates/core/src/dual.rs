//! Dual curves `γ_{a,a'}` (and `γ*_{b,b'}`) as `z`-resultants, popular
//! components and dangerous pairs, the point/curve system `(P, Γ)` with its
//! incidence count, and the end-to-end bound chain.
//!
//! Components are the atoms of a gcd-free basis of the squarefree keys: a
//! pairwise coprime family such that every key is a product of atoms. The
//! popularity of an atom is the number of pairs whose key it divides.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::sturm::rational_roots;
use crate::algebra::{bivariate_gcd, resultant_in_z, squarefree_full, Poly, Rational};
use crate::error::{Error, Result};
use crate::expander::{graph_form, separability_test, Verdict};
use crate::grid::{intersect_grid, GridIntersection, IndexedSet};
use crate::quadruples::{check_surface, extract_tuples_from_grid, ForbidMap, ScanStats};
use crate::report::{ser_opt_poly, ser_poly, ser_rational, SCHEMA_VERSION};

/// Which coordinate is fixed pairwise: `A` gives `γ_{a,a'}` in `(y, y')`,
/// `B` gives `γ*_{b,b'}` in `(x, x')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn fixed(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }

    fn names(self) -> [&'static str; 2] {
        match self {
            Side::A => ["y", "y'"],
            Side::B => ["x", "x'"],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualCurve {
    pub side: Side,
    #[serde(serialize_with = "ser_pair")]
    pub pair: (Rational, Rational),
    #[serde(serialize_with = "ser_poly")]
    pub defining: Poly,
    /// Normalized squarefree part; `None` when degenerate.
    #[serde(serialize_with = "ser_opt_poly")]
    pub squarefree_key: Option<Poly>,
    /// The resultant vanishes identically (shared `z`-content).
    pub degenerate: bool,
}

fn ser_pair<S: serde::Serializer>(p: &(Rational, Rational), s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&p.0.to_string())?;
    t.serialize_element(&p.1.to_string())?;
    t.end()
}

/// `f` with the `side` coordinate fixed to `v`, over `[name, "z"]`.
fn slice(f: &Poly, side: Side, v: &Rational, name: &str) -> Result<Poly> {
    let fixed = f.vars()[side.fixed()].clone();
    let sub = f.substitute(&fixed, v)?;
    let out = Poly::from_terms(&[name, "z"], sub.terms().clone());
    if out.is_zero() {
        return Err(Error::Degenerate(format!("slice at {v} vanishes identically")));
    }
    if !out.depends_on(1) {
        return Err(Error::DegreeZero("z".into()));
    }
    Ok(out)
}

fn require_trivariate(f: &Poly) -> Result<()> {
    if f.nvars() != 3 {
        return Err(Error::InvalidArgument(format!(
            "expected a trivariate polynomial, got variables {:?}",
            f.vars()
        )));
    }
    Ok(())
}

pub fn dual_curve_on(f: &Poly, side: Side, v: &Rational, v2: &Rational) -> Result<DualCurve> {
    require_trivariate(f)?;
    let [n1, n2] = side.names();
    let g1 = slice(f, side, v, n1)?;
    let g2 = slice(f, side, v2, n2)?;
    let defining = resultant_in_z(&g1, &g2)?;
    let degenerate = defining.is_zero();
    let squarefree_key = if degenerate {
        None
    } else {
        Some(squarefree_full(&defining)?)
    };
    Ok(DualCurve {
        side,
        pair: (v.clone(), v2.clone()),
        defining,
        squarefree_key,
        degenerate,
    })
}

/// `γ_{a,a'}`: the resultant in `z` of `f(a, y, z)` and `f(a', y', z)`.
pub fn dual_curve(f: &Poly, a: &Rational, a2: &Rational) -> Result<DualCurve> {
    dual_curve_on(f, Side::A, a, a2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Safety {
    Safe,
    Dangerous,
}

#[derive(Clone, Debug, Serialize)]
pub struct SafetyCertificate {
    #[serde(serialize_with = "ser_pair")]
    pub pair: (Rational, Rational),
    pub verdict: Safety,
    /// A popular component of the pair's curve, if any.
    #[serde(serialize_with = "ser_opt_poly")]
    pub witness: Option<Poly>,
    /// Popularity of the witness, or the largest popularity among the
    /// curve's components for safe pairs.
    pub popularity: usize,
    /// The curve could not be formed; such pairs are dangerous.
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    #[serde(serialize_with = "ser_poly")]
    pub key: Poly,
    pub popularity: usize,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub side: Side,
    /// `(deg f)^4 + 1`.
    pub threshold: usize,
    pub certificates: Vec<SafetyCertificate>,
    pub components: Vec<Component>,
    /// Curves by index pair into the classified set.
    pub curves: BTreeMap<(usize, usize), DualCurve>,
}

impl Classification {
    pub fn dangerous_count(&self) -> usize {
        self.certificates
            .iter()
            .filter(|c| c.verdict == Safety::Dangerous)
            .count()
    }
}

/// Univariate images used to rule out common factors cheaply. For variable
/// `v`, the other variable is fixed at a point where the leading coefficient
/// in `v` of every key is nonzero, so a common factor involving `v` survives
/// as a common factor of the images. Factors of keys inherit this. Images are
/// primitive integer polynomials reduced mod a prime; by Gauss's lemma a
/// factor keeps positive degree mod p whenever the leading coefficient does.
struct Probe {
    at: [Rational; 2],
}

const MODULUS: u64 = (1 << 61) - 1;

#[derive(Clone)]
enum Image {
    /// Degree zero in the variable: no factor can involve it.
    Absent,
    /// Low-to-high coefficients mod `MODULUS`, nonzero leading coefficient.
    Mod(Vec<u64>),
    /// The leading coefficient vanished mod `MODULUS`.
    Unknown,
}

struct Atom {
    poly: Poly,
    images: [Image; 2],
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce(n: &num_bigint::BigInt) -> u64 {
    use num_traits::ToPrimitive;
    let m = num_bigint::BigInt::from(MODULUS);
    let r = ((n % &m) + &m) % &m;
    r.to_u64().expect("reduced")
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Degree of the gcd over `F_p`, or `None` if both inputs vanish.
fn gcd_degree_mod(a: &[u64], b: &[u64]) -> Option<usize> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), MODULUS - 2);
        while a.len() >= b.len() {
            let q = mulmod(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (i, &c) in b.iter().enumerate() {
                let t = mulmod(q, c);
                a[shift + i] = (a[shift + i] + MODULUS - t) % MODULUS;
            }
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().checked_sub(1)
}

impl Probe {
    fn new(keys: &[&Poly]) -> Self {
        let at = [0, 1].map(|v| {
            (1..)
                .map(|k| Rational::new((2 * k + 1).into(), 3.into()))
                .find(|r| {
                    keys.iter().all(|p| {
                        let d = p.degree_in(v) as usize;
                        d == 0 || !Self::fix(&p.coeffs_in(v)[d], 1 - v, r).is_zero()
                    })
                })
                .expect("nonzero leading coefficients have finitely many roots")
        });
        Probe { at }
    }

    fn fix(p: &Poly, var: usize, r: &Rational) -> Poly {
        p.substitute(&p.vars()[var].clone(), r).expect("present")
    }

    fn atom(&self, poly: Poly) -> Atom {
        let images = [0, 1].map(|v| {
            if poly.degree_in(v) == 0 {
                return Image::Absent;
            }
            let u = Self::fix(&poly, 1 - v, &self.at[v])
                .to_univariate(0)
                .expect("univariate")
                .primitive_integer();
            let coeffs: Vec<u64> = u.coeffs().iter().map(|c| reduce(c.numer())).collect();
            match coeffs.last() {
                Some(&lead) if lead != 0 => Image::Mod(coeffs),
                _ => Image::Unknown,
            }
        });
        Atom { poly, images }
    }
}

impl Atom {
    /// `true` only if the two polynomials certainly share no factor.
    fn surely_coprime(&self, other: &Atom) -> bool {
        self.images.iter().zip(&other.images).all(|pair| match pair {
            (Image::Absent, _) | (_, Image::Absent) => true,
            (Image::Mod(p), Image::Mod(q)) => gcd_degree_mod(p, q) == Some(0),
            _ => false,
        })
    }
}

/// Pairwise coprime refinement: every input is a product of the output.
fn gcd_free_basis(keys: &[&Poly]) -> Vec<Poly> {
    let probe = Probe::new(keys);
    let mut basis: Vec<Atom> = Vec::new();
    for k in keys {
        if k.is_constant() {
            continue;
        }
        let mut rest = probe.atom((*k).clone());
        let mut next = Vec::with_capacity(basis.len() + 1);
        for e in basis {
            if rest.poly.is_constant() || rest.surely_coprime(&e) {
                next.push(e);
                continue;
            }
            let g = bivariate_gcd(&rest.poly, &e.poly).expect("nonzero operands");
            if g.is_constant() {
                next.push(e);
                continue;
            }
            let cofactor = e.poly.div_exact(&g).expect("gcd divides");
            rest = probe.atom(rest.poly.div_exact(&g).expect("gcd divides"));
            next.push(probe.atom(g));
            if !cofactor.is_constant() {
                next.push(probe.atom(cofactor.normalized()));
            }
        }
        if !rest.poly.is_constant() {
            next.push(probe.atom(rest.poly.normalized()));
        }
        basis = next;
    }
    basis.into_iter().map(|a| a.poly).collect()
}

/// Dual curves for every ordered pair of distinct elements, with popular
/// components detected among the pairs at hand.
pub fn classify_pairs(f: &Poly, set: &IndexedSet, side: Side) -> Result<Classification> {
    require_trivariate(f)?;
    if set.len() < 2 {
        return Err(Error::InvalidArgument(
            "classification needs at least 2 elements".into(),
        ));
    }
    let n = set.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let built: Vec<Option<DualCurve>> = pairs
        .par_iter()
        .map(|&(i, j)| dual_curve_on(f, side, set.get(i), set.get(j)).ok())
        .collect();

    let mut distinct: BTreeMap<String, &Poly> = BTreeMap::new();
    for c in built.iter().flatten() {
        if let Some(k) = &c.squarefree_key {
            distinct.entry(k.to_string()).or_insert(k);
        }
    }
    let keys: Vec<&Poly> = distinct.values().copied().collect();
    let basis = gcd_free_basis(&keys);
    // atoms of each distinct key
    let probe = Probe::new(&keys);
    let atoms: Vec<Atom> = basis.iter().map(|b| probe.atom(b.clone())).collect();
    let atoms_of: BTreeMap<String, Vec<usize>> = distinct
        .iter()
        .map(|(s, k)| {
            let key = probe.atom((*k).clone());
            let atoms = (0..basis.len())
                .filter(|&t| !key.surely_coprime(&atoms[t]) && k.div_exact(&basis[t]).is_some())
                .collect();
            (s.clone(), atoms)
        })
        .collect();
    let mut popularity = vec![0usize; basis.len()];
    for c in built.iter().flatten() {
        if let Some(k) = &c.squarefree_key {
            for &t in &atoms_of[&k.to_string()] {
                popularity[t] += 1;
            }
        }
    }
    let d = f.total_degree() as usize;
    let threshold = d.pow(4) + 1;

    let mut certificates = Vec::with_capacity(pairs.len());
    let mut curves = BTreeMap::new();
    for (&(i, j), c) in pairs.iter().zip(built) {
        let pair = (set.get(i).clone(), set.get(j).clone());
        let cert = match &c {
            Some(curve) if !curve.degenerate => {
                let atoms = &atoms_of[&curve.squarefree_key.as_ref().unwrap().to_string()];
                let popular = atoms.iter().find(|&&t| popularity[t] >= threshold);
                match popular {
                    Some(&t) => SafetyCertificate {
                        pair,
                        verdict: Safety::Dangerous,
                        witness: Some(basis[t].clone()),
                        popularity: popularity[t],
                        degenerate: false,
                    },
                    None => SafetyCertificate {
                        pair,
                        verdict: Safety::Safe,
                        witness: None,
                        popularity: atoms.iter().map(|&t| popularity[t]).max().unwrap_or(0),
                        degenerate: false,
                    },
                }
            }
            _ => SafetyCertificate {
                pair,
                verdict: Safety::Dangerous,
                witness: None,
                popularity: 0,
                degenerate: true,
            },
        };
        certificates.push(cert);
        if let Some(curve) = c {
            curves.insert((i, j), curve);
        }
    }
    let components = basis
        .into_iter()
        .zip(popularity)
        .map(|(key, popularity)| Component { key, popularity })
        .collect();
    Ok(Classification {
        side,
        threshold,
        certificates,
        components,
        curves,
    })
}

#[derive(Clone, Debug)]
pub struct ForbidReport {
    pub map: ForbidMap,
    pub max_size: usize,
    /// Smallest admissible `S`: `1 + max_size`.
    pub s: usize,
}

/// `Forbid(a) = {a' : (a, a') dangerous}`.
pub fn forbid_from_certificates(certs: &[SafetyCertificate], set: &IndexedSet) -> Result<ForbidReport> {
    let mut entries: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
    for c in certs.iter().filter(|c| c.verdict == Safety::Dangerous) {
        entries
            .entry(c.pair.0.clone())
            .or_default()
            .push(c.pair.1.clone());
    }
    let map = ForbidMap::new(set, entries)?;
    let max_size = map.max_size();
    Ok(ForbidReport {
        map,
        max_size,
        s: max_size + 1,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemPoint {
    #[serde(serialize_with = "ser_rational")]
    pub b: Rational,
    #[serde(rename = "b'", serialize_with = "ser_rational")]
    pub b2: Rational,
    pub gap: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemCurve {
    #[serde(serialize_with = "ser_rational")]
    pub a: Rational,
    #[serde(rename = "a'", serialize_with = "ser_rational")]
    pub a2: Rational,
    pub gap: usize,
    /// Squarefree defining polynomial in `(y, y')`.
    #[serde(serialize_with = "ser_poly")]
    pub key: Poly,
}

/// `P` and `Γ`. Curves are indexed by their pair `(a, a')`, so two pairs
/// with the same curve count twice.
#[derive(Clone, Debug, Serialize)]
pub struct IncidenceSystem {
    pub points: Vec<SystemPoint>,
    pub curves: Vec<SystemCurve>,
    #[serde(rename = "K", serialize_with = "ser_rational")]
    pub k: Rational,
    /// `K|A||C|/|G|`.
    #[serde(serialize_with = "ser_rational")]
    pub radius_a: Rational,
    /// `K|B||C|/|G|`.
    #[serde(serialize_with = "ser_rational")]
    pub radius_b: Rational,
    /// `2K|A|²|C|/|G| + |A|`.
    #[serde(serialize_with = "ser_rational")]
    pub gamma_ceiling: Rational,
    /// `2K|B|²|C|/|G| + |B|`.
    #[serde(serialize_with = "ser_rational")]
    pub p_ceiling: Rational,
    pub distinct_curves: usize,
    /// Admissible pairs whose curve could not be formed.
    pub degenerate_pairs: usize,
}

impl IncidenceSystem {
    pub fn within_ceilings(&self) -> bool {
        Rational::from_integer(self.curves.len().into()) <= self.gamma_ceiling
            && Rational::from_integer(self.points.len().into()) <= self.p_ceiling
    }
}

fn within(gap: usize, radius: &Rational) -> bool {
    Rational::from_integer(gap.into()) <= *radius
}

/// Builds `(P, Γ)` from `G`; `known` supplies already computed curves keyed
/// by `A`-index pair.
pub fn build_incidence_system_with(
    g: &GridIntersection,
    k: &Rational,
    fa: &ForbidMap,
    fb: &ForbidMap,
    known: &BTreeMap<(usize, usize), DualCurve>,
) -> Result<IncidenceSystem> {
    if g.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if *k <= Rational::from_integer(0.into()) {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let (na, nb, nc) = (g.a.len(), g.b.len(), g.c.len());
    let size = Rational::from_integer(g.len().into());
    let radius = |n: usize| k * Rational::from_integer((n * nc).into()) / &size;
    let (radius_a, radius_b) = (radius(na), radius(nb));
    let ceiling = |n: usize, r: &Rational| {
        r * Rational::from_integer((2 * n).into()) + Rational::from_integer(n.into())
    };

    let points: Vec<SystemPoint> = (0..nb)
        .flat_map(|i| (0..nb).map(move |j| (i, j)))
        .filter(|&(i, j)| !fb.forbids(i, j) && within(i.abs_diff(j), &radius_b))
        .map(|(i, j)| SystemPoint {
            b: g.b.get(i).clone(),
            b2: g.b.get(j).clone(),
            gap: i.abs_diff(j),
        })
        .collect();

    let admissible: Vec<(usize, usize)> = (0..na)
        .flat_map(|i| (0..na).map(move |j| (i, j)))
        .filter(|&(i, j)| !fa.forbids(i, j) && within(i.abs_diff(j), &radius_a))
        .collect();
    let built: Vec<Option<SystemCurve>> = admissible
        .par_iter()
        .map(|&(i, j)| {
            let fresh;
            let curve = match known.get(&(i, j)) {
                Some(c) => c,
                None => {
                    fresh = dual_curve(&g.surface, g.a.get(i), g.a.get(j)).ok()?;
                    &fresh
                }
            };
            curve.squarefree_key.as_ref().map(|key| SystemCurve {
                a: g.a.get(i).clone(),
                a2: g.a.get(j).clone(),
                gap: i.abs_diff(j),
                key: key.clone(),
            })
        })
        .collect();
    let degenerate_pairs = built.iter().filter(|c| c.is_none()).count();
    let curves: Vec<SystemCurve> = built.into_iter().flatten().collect();
    let distinct_curves = curves
        .iter()
        .map(|c| c.key.to_string())
        .collect::<BTreeSet<_>>()
        .len();
    Ok(IncidenceSystem {
        points,
        curves,
        gamma_ceiling: ceiling(na, &radius_a),
        p_ceiling: ceiling(nb, &radius_b),
        k: k.clone(),
        radius_a,
        radius_b,
        distinct_curves,
        degenerate_pairs,
    })
}

pub fn build_incidence_system(
    g: &GridIntersection,
    k: &Rational,
    fa: &ForbidMap,
    fb: &ForbidMap,
) -> Result<IncidenceSystem> {
    build_incidence_system_with(g, k, fa, fb, &BTreeMap::new())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IncidenceCount {
    pub count: usize,
    /// `|P|^{2/3}|Γ|^{2/3} + |P| + |Γ|`.
    pub st_shape: f64,
    /// `count / st_shape`, absent when the shape is zero.
    pub st_ratio: Option<f64>,
}

pub fn st_shape(p: usize, gamma: usize) -> f64 {
    let (p, g) = (p as f64, gamma as f64);
    (p * g).powf(2.0 / 3.0) + p + g
}

/// Exact evaluation of every curve at every point.
pub fn count_incidences(sys: &IncidenceSystem) -> IncidenceCount {
    let count = sys
        .curves
        .par_iter()
        .map(|c| {
            sys.points
                .iter()
                .filter(|p| {
                    c.key
                        .evaluate(&[p.b.clone(), p.b2.clone()])
                        .expect("arity 2")
                        .numer()
                        .sign()
                        == num_bigint::Sign::NoSign
                })
                .count()
        })
        .sum();
    let shape = st_shape(sys.points.len(), sys.curves.len());
    IncidenceCount {
        count,
        st_shape: shape,
        st_ratio: (shape > 0.0).then(|| count as f64 / shape),
    }
}

/// Independent count: per curve and per first coordinate `b`, the rational
/// roots of `key(b, ·)` are matched against the points over `b`.
pub fn count_incidences_by_roots(sys: &IncidenceSystem) -> usize {
    let mut by_b: BTreeMap<&Rational, Vec<&Rational>> = BTreeMap::new();
    for p in &sys.points {
        by_b.entry(&p.b).or_default().push(&p.b2);
    }
    sys.curves
        .par_iter()
        .map(|c| {
            let yname = c.key.vars()[0].clone();
            by_b.iter()
                .map(|(b, b2s)| {
                    let u = c
                        .key
                        .substitute(&yname, b)
                        .expect("present")
                        .to_univariate(0)
                        .expect("univariate");
                    if u.is_zero() {
                        return b2s.len();
                    }
                    let roots: HashSet<Rational> = rational_roots(&u).into_iter().collect();
                    b2s.iter().filter(|v| roots.contains(**v)).count()
                })
                .sum::<usize>()
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainConstants {
    pub c_dec: usize,
    #[serde(rename = "K", serialize_with = "ser_rational")]
    pub k: Rational,
    #[serde(rename = "S")]
    pub s: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub schema: u32,
    #[serde(serialize_with = "ser_poly")]
    pub surface: Poly,
    /// Position `i` of the internal coordinates is user coordinate
    /// `permutation[i]`; chosen so that `|A| ≤ |B| ≤ |C|`.
    pub permutation: [usize; 3],
    pub sizes: [usize; 3],
    #[serde(rename = "G")]
    pub g: usize,
    /// Extracted 5-tuples.
    pub tuples: usize,
    /// Distinct `((a, a'), (b, b'))` among tuples whose pairs are in `(Γ, P)`.
    pub tuple_incidences: usize,
    /// Tuples with a pair outside the gap radius of `(Γ, P)`.
    pub tuples_outside_radius: usize,
    pub tuple_stats: ScanStats,
    #[serde(serialize_with = "ser_rational")]
    pub tuple_guarantee: Rational,
    pub heavy_retained: usize,
    #[serde(rename = "P")]
    pub p: usize,
    #[serde(rename = "Gamma")]
    pub gamma: usize,
    pub distinct_curves: usize,
    #[serde(rename = "I")]
    pub i: usize,
    pub st_shape: f64,
    pub st_ratio: Option<f64>,
    /// `|G| / ((|A||B||C|)^{4/7} + |B||C|^{1/2})`.
    #[serde(rename = "fitted_C")]
    pub fitted_c: f64,
    pub dangerous: [usize; 2],
    pub constants: ChainConstants,
    pub checks: BTreeMap<&'static str, bool>,
    pub warnings: Vec<String>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&v| v)
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|(_, &v)| !v).map(|(&k, _)| k).collect()
    }
}

/// Permutation sorting the three sets by size (stable).
fn role_permutation(sizes: [usize; 3]) -> [usize; 3] {
    let mut perm = [0, 1, 2];
    perm.sort_by_key(|&i| sizes[i]);
    perm
}

fn structure_warnings(f: &Poly) -> Result<Vec<String>> {
    let mut warnings = Vec::new();
    let mut graph = false;
    for v in 0..3 {
        let perm: [usize; 3] = match v {
            0 => [1, 2, 0],
            1 => [0, 2, 1],
            _ => [0, 1, 2],
        };
        if let Some(h) = graph_form(&f.permute(&perm)) {
            graph = true;
            if separability_test(&h)?.verdict == Verdict::SpecialCandidate {
                warnings.push(format!(
                    "surface has the form h - {} with h = {} a special-form candidate; \
                     the bound chain is not expected to hold",
                    f.vars()[v],
                    h
                ));
            }
        }
    }
    if !graph {
        warnings.push("surface is not of the form h(x, y) - z; additive structure not checked".into());
    }
    Ok(warnings)
}

/// Runs `G → certificates → Forbid → 5-tuples → (P, Γ) → I` and checks the
/// exact links of the chain. `s` is raised to `1 + max |Forbid|` when
/// smaller; `k` defaults to `4·S·c_dec`.
pub fn verify_chain(
    f: &Poly,
    a: &IndexedSet,
    b: &IndexedSet,
    c: &IndexedSet,
    s: Option<usize>,
    k: Option<Rational>,
) -> Result<ChainReport> {
    require_trivariate(f)?;
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    for v in 0..3 {
        if !f.depends_on(v) {
            return Err(Error::Cylinder(f.vars()[v].clone()).at_stage("ingest"));
        }
    }
    let user_sets = [a, b, c];
    let perm = role_permutation([a.len(), b.len(), c.len()]);
    let fp = f.permute(&perm);
    let (a, b, c) = (user_sets[perm[0]], user_sets[perm[1]], user_sets[perm[2]]);
    let warnings = structure_warnings(f).map_err(|e| e.at_stage("ingest"))?;
    check_surface(&fp).map_err(|e| e.at_stage("ingest"))?;

    let g = intersect_grid(&fp, a, b, c).map_err(|e| e.at_stage("grid"))?;
    let mut checks = BTreeMap::new();
    let sizes = [a.len(), b.len(), c.len()];
    if g.is_empty() {
        return Ok(ChainReport {
            schema: SCHEMA_VERSION,
            surface: f.clone(),
            permutation: perm,
            sizes,
            g: 0,
            tuples: 0,
            tuple_incidences: 0,
            tuples_outside_radius: 0,
            tuple_stats: ScanStats::default(),
            tuple_guarantee: Rational::from_integer(0.into()),
            heavy_retained: 0,
            p: 0,
            gamma: 0,
            distinct_curves: 0,
            i: 0,
            st_shape: 0.0,
            st_ratio: None,
            fitted_c: 0.0,
            dangerous: [0, 0],
            constants: ChainConstants {
                c_dec: 0,
                k: k.unwrap_or_else(|| Rational::from_integer(0.into())),
                s: s.unwrap_or(1),
            },
            checks,
            warnings,
        });
    }

    let cls_a = classify_pairs(&fp, a, Side::A).map_err(|e| e.at_stage("classify"))?;
    let cls_b = classify_pairs(&fp, b, Side::B).map_err(|e| e.at_stage("classify"))?;
    let forbid_a = forbid_from_certificates(&cls_a.certificates, a).map_err(|e| e.at_stage("forbid"))?;
    let forbid_b = forbid_from_certificates(&cls_b.certificates, b).map_err(|e| e.at_stage("forbid"))?;
    // γ_{a,a} always contains the diagonal, a popular curve
    let fa = forbid_a.map.with_diagonal(a);
    let fb = forbid_b.map.with_diagonal(b);
    let s_min = 1 + fa.max_size().max(fb.max_size());
    let s = s.unwrap_or(s_min).max(s_min);

    let run = extract_tuples_from_grid(&g, s, &fa, &fb).map_err(|e| e.at_stage("tuples"))?;
    let c_dec = run.c_dec;
    let k = k.unwrap_or_else(|| Rational::from_integer((4 * s * c_dec).into()));

    let sys =
        build_incidence_system_with(&g, &k, &fa, &fb, &cls_a.curves).map_err(|e| e.at_stage("incidence"))?;
    let inc = count_incidences(&sys);
    let by_roots = count_incidences_by_roots(&sys);

    // the chain links, checked exactly
    let index_a = |v: &Rational| a.position(v).expect("tuple element in A");
    let index_b = |v: &Rational| b.position(v).expect("tuple element in B");
    let curve_key: BTreeMap<(Rational, Rational), &Poly> = sys
        .curves
        .iter()
        .map(|cv| ((cv.a.clone(), cv.a2.clone()), &cv.key))
        .collect();
    let point_set: HashSet<(Rational, Rational)> =
        sys.points.iter().map(|p| (p.b.clone(), p.b2.clone())).collect();
    let mut realized = BTreeSet::new();
    let mut outside = 0;
    let mut all_incident = true;
    let mut all_safe = true;
    let mut all_vanish = true;
    for t in &run.tuples {
        let (ia, ia2, ib, ib2) = (index_a(&t.a), index_a(&t.a2), index_b(&t.b), index_b(&t.b2));
        all_safe &= !forbid_a.map.forbids(ia, ia2) && !forbid_b.map.forbids(ib, ib2);
        all_vanish &= cls_a.curves.get(&(ia, ia2)).is_some_and(|cv| {
            cv.defining
                .evaluate(&[t.b.clone(), t.b2.clone()])
                .expect("arity")
                .numer()
                .sign()
                == num_bigint::Sign::NoSign
        });
        if !within(t.gap_a, &sys.radius_a) || !within(t.gap_b, &sys.radius_b) {
            outside += 1;
            continue;
        }
        let key = curve_key.get(&(t.a.clone(), t.a2.clone()));
        let incident = point_set.contains(&(t.b.clone(), t.b2.clone()))
            && key.is_some_and(|k| {
                k.evaluate(&[t.b.clone(), t.b2.clone()])
                    .expect("arity")
                    .numer()
                    .sign()
                    == num_bigint::Sign::NoSign
            });
        all_incident &= incident;
        realized.insert((t.a.clone(), t.a2.clone(), t.b.clone(), t.b2.clone()));
    }

    let necessity = resultant_necessity(&g, &cls_a.curves);
    let retained = run.heavy.retained;
    checks.insert("heavy_retention", 2 * retained >= g.len());
    checks.insert(
        "tuple_ledger",
        Rational::from_integer((run.stats.emitted + run.stats.blocked).into()) >= run.guarantee,
    );
    checks.insert("safe_tuples", all_safe);
    checks.insert("tuples_on_dual_curves", all_vanish);
    checks.insert("resultant_necessity", necessity);
    checks.insert("tuples_are_incidences", all_incident);
    checks.insert("tuples_le_incidences", realized.len() <= inc.count);
    checks.insert("incidence_cross_check", by_roots == inc.count);
    checks.insert("gamma_p_ceilings", sys.within_ceilings());

    let (na, nb, nc) = (a.len() as f64, b.len() as f64, c.len() as f64);
    let fitted_c = g.len() as f64 / ((na * nb * nc).powf(4.0 / 7.0) + nb * nc.sqrt());
    Ok(ChainReport {
        schema: SCHEMA_VERSION,
        surface: f.clone(),
        permutation: perm,
        sizes,
        g: g.len(),
        tuples: run.tuples.len(),
        tuple_incidences: realized.len(),
        tuples_outside_radius: outside,
        tuple_stats: run.stats,
        tuple_guarantee: run.guarantee.clone(),
        heavy_retained: retained,
        p: sys.points.len(),
        gamma: sys.curves.len(),
        distinct_curves: sys.distinct_curves,
        i: inc.count,
        st_shape: inc.st_shape,
        st_ratio: inc.st_ratio,
        fitted_c,
        dangerous: [cls_a.dangerous_count(), cls_b.dangerous_count()],
        constants: ChainConstants { c_dec, k, s },
        checks,
        warnings,
    })
}

/// Every `(a, b, c), (a', b', c) ∈ G` puts `(b, b')` on `γ_{a,a'}`.
pub fn resultant_necessity(g: &GridIntersection, known: &BTreeMap<(usize, usize), DualCurve>) -> bool {
    (0..g.c.len()).into_par_iter().all(|k| {
        let fiber = g.fiber(k);
        let mut local: BTreeMap<(usize, usize), Option<Poly>> = BTreeMap::new();
        for &(i, j) in &fiber {
            for &(i2, j2) in &fiber {
                let curve = local.entry((i, i2)).or_insert_with(|| match known.get(&(i, i2)) {
                    Some(c) => Some(c.defining.clone()),
                    None => dual_curve(&g.surface, g.a.get(i), g.a.get(i2))
                        .ok()
                        .map(|c| c.defining),
                });
                if let Some(p) = curve {
                    let v = p
                        .evaluate(&[g.b.get(j).clone(), g.b.get(j2).clone()])
                        .expect("arity");
                    if v.numer().sign() != num_bigint::Sign::NoSign {
                        return false;
                    }
                }
            }
        }
        true
    })
}
