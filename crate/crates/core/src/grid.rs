//! Indexed real sets and the exact grid intersection `G = (A×B×C) ∩ Z(f)`.
//!
//! Indices are 0-based; the usual 1-based `Index` differs by a constant
//! offset, which cancels in every index-gap formula.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::rational::int;
use crate::algebra::sturm::rational_roots;
use crate::algebra::{Poly, Rational, UPoly};
use crate::error::{Error, Result};
use crate::report::{ser_poly, ser_rational, SCHEMA_VERSION};

/// Finite strictly increasing sequence of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexedSet {
    elements: Vec<Rational>,
}

impl IndexedSet {
    /// Sorts the input; duplicates are an error.
    pub fn strict(values: impl IntoIterator<Item = Rational>) -> Result<Self> {
        let (set, dups) = Self::permissive(values);
        match dups.first() {
            Some(d) => Err(Error::DuplicateElement(d.to_string())),
            None => Ok(set),
        }
    }

    /// Sorts and deduplicates; returns the dropped duplicates.
    pub fn permissive(values: impl IntoIterator<Item = Rational>) -> (Self, Vec<Rational>) {
        let mut v: Vec<Rational> = values.into_iter().collect();
        v.sort();
        let mut dups = Vec::new();
        let mut elements: Vec<Rational> = Vec::with_capacity(v.len());
        for x in v {
            if elements.last() == Some(&x) {
                dups.push(x);
            } else {
                elements.push(x);
            }
        }
        (IndexedSet { elements }, dups)
    }

    /// `{lo, lo+1, …, hi}`.
    pub fn range(lo: i64, hi: i64) -> Self {
        IndexedSet {
            elements: (lo..=hi).map(int).collect(),
        }
    }

    pub fn from_ints(values: impl IntoIterator<Item = i64>) -> Result<Self> {
        Self::strict(values.into_iter().map(int))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Rational] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.elements[i]
    }

    pub fn position(&self, a: &Rational) -> Option<usize> {
        self.elements.binary_search(a).ok()
    }

    pub fn contains(&self, a: &Rational) -> bool {
        self.position(a).is_some()
    }

    /// Position of `a` in increasing order.
    pub fn index_of(&self, a: &Rational) -> Result<usize> {
        self.position(a)
            .ok_or_else(|| Error::ElementAbsent(a.to_string()))
    }
}

pub fn index_of(s: &IndexedSet, a: &Rational) -> Result<usize> {
    s.index_of(a)
}

/// `|i - j|`, the proximity measure between two indexed elements.
pub fn index_gap(i: usize, j: usize) -> usize {
    i.abs_diff(j)
}

#[derive(Clone, Debug)]
pub struct GridIntersection {
    /// Index triples `(i, j, k)` into `(A, B, C)`, sorted lexicographically.
    pub triples: Vec<[usize; 3]>,
    /// Number of triples with third index `k`.
    pub fiber_counts: Vec<usize>,
    pub a: IndexedSet,
    pub b: IndexedSet,
    pub c: IndexedSet,
    pub surface: Poly,
}

impl GridIntersection {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn point(&self, t: &[usize; 3]) -> [Rational; 3] {
        [
            self.a.get(t[0]).clone(),
            self.b.get(t[1]).clone(),
            self.c.get(t[2]).clone(),
        ]
    }

    /// Points `(i, j)` of the fiber over `C[k]`, sorted.
    pub fn fiber(&self, k: usize) -> Vec<(usize, usize)> {
        self.triples
            .iter()
            .filter(|t| t[2] == k)
            .map(|t| (t[0], t[1]))
            .collect()
    }

    /// CSV with columns `a, b, c`, one row per point of `G`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["a", "b", "c"]).expect("in-memory write");
        for t in &self.triples {
            w.write_record(self.point(t).iter().map(|r| r.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn report(&self) -> GridReport {
        let degree = self.surface.total_degree();
        let n = self.a.len();
        let equal = n == self.b.len() && n == self.c.len();
        GridReport {
            schema: SCHEMA_VERSION,
            surface: self.surface.clone(),
            count: self.len(),
            degree,
            ceiling: equal.then(|| degree as u128 * (n as u128) * (n as u128)),
            fibers: self
                .c
                .elements()
                .iter()
                .zip(&self.fiber_counts)
                .map(|(c, &count)| FiberEntry { c: c.clone(), count })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberEntry {
    #[serde(serialize_with = "ser_rational")]
    pub c: Rational,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub schema: u32,
    #[serde(serialize_with = "ser_poly")]
    pub surface: Poly,
    pub count: usize,
    pub degree: u32,
    pub ceiling: Option<u128>,
    pub fibers: Vec<FiberEntry>,
}

fn require_trivariate(f: &Poly) -> Result<()> {
    if f.nvars() != 3 {
        return Err(Error::InvalidArgument(format!(
            "expected a trivariate polynomial, got variables {:?}",
            f.vars()
        )));
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(())
}

/// Exact `G = (A×B×C) ∩ Z(f)`. For each `(a, b)` the univariate slice
/// `f(a, b, z)` is formed and its rational roots are looked up in `C`.
pub fn intersect_grid(f: &Poly, a: &IndexedSet, b: &IndexedSet, c: &IndexedSet) -> Result<GridIntersection> {
    require_trivariate(f)?;
    let z_coeffs = f.coeffs_in(2);
    let rows: Vec<Vec<[usize; 3]>> = (0..a.len())
        .into_par_iter()
        .map(|i| {
            let ai = a.get(i);
            let slices: Vec<Poly> = z_coeffs
                .iter()
                .map(|p| p.substitute("x", ai).expect("x present"))
                .collect();
            let mut row = Vec::new();
            for j in 0..b.len() {
                let bj = b.get(j);
                let u = UPoly::new(
                    slices
                        .iter()
                        .map(|s| s.evaluate(&[bj.clone(), int(0)]).expect("arity 2"))
                        .collect(),
                );
                if u.is_zero() {
                    row.extend((0..c.len()).map(|k| [i, j, k]));
                    continue;
                }
                let mut ks: Vec<usize> = rational_roots(&u).iter().filter_map(|r| c.position(r)).collect();
                ks.sort_unstable();
                row.extend(ks.into_iter().map(|k| [i, j, k]));
            }
            row
        })
        .collect();
    let triples: Vec<[usize; 3]> = rows.into_iter().flatten().collect();
    let mut fiber_counts = vec![0; c.len()];
    for t in &triples {
        fiber_counts[t[2]] += 1;
    }
    Ok(GridIntersection {
        triples,
        fiber_counts,
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        surface: f.clone(),
    })
}

/// `(A×B) ∩ Z(g)` for a curve `g(x, y)`, sorted by `x` then `y`.
pub fn curve_points(g: &Poly, a: &IndexedSet, b: &IndexedSet) -> Result<Vec<(Rational, Rational)>> {
    if g.nvars() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected a curve in two variables, got {:?}",
            g.vars()
        )));
    }
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let x = g.vars()[0].clone();
    let rows: Vec<Vec<(Rational, Rational)>> = a
        .elements()
        .par_iter()
        .map(|ai| {
            let u = g
                .substitute(&x, ai)
                .expect("present")
                .to_univariate(0)
                .expect("univariate");
            let ys: Vec<&Rational> = if u.is_zero() {
                b.elements().iter().collect()
            } else {
                let mut ys: Vec<&Rational> = rational_roots(&u)
                    .iter()
                    .filter_map(|r| b.position(r).map(|j| b.get(j)))
                    .collect();
                ys.sort();
                ys
            };
            ys.into_iter().map(|y| (ai.clone(), y.clone())).collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SchwartzZippelAudit {
    pub count: usize,
    pub degree: u32,
    /// `deg(f)·N²` when `|A| = |B| = |C| = N`; otherwise the generalized
    /// `deg(f)·|A||B||C| / min(|A|,|B|,|C|)`, reported only.
    pub ceiling: u128,
    pub ratio: f64,
    pub equal_sizes: bool,
    /// `Some(count <= ceiling)` in asserting mode, `None` in report-only mode.
    pub holds: Option<bool>,
}

pub fn schwartz_zippel_audit(g: &GridIntersection) -> SchwartzZippelAudit {
    let sizes = [g.a.len(), g.b.len(), g.c.len()];
    let equal = sizes[0] == sizes[1] && sizes[1] == sizes[2];
    let degree = g.surface.total_degree();
    let min = *sizes.iter().min().unwrap() as u128;
    let prod: u128 = sizes.iter().map(|&s| s as u128).product();
    let ceiling = (degree as u128 * prod).checked_div(min).unwrap_or(0);
    let ratio = if g.is_empty() {
        0.0
    } else {
        g.len() as f64 / ceiling as f64
    };
    SchwartzZippelAudit {
        count: g.len(),
        degree,
        ceiling,
        ratio,
        equal_sizes: equal,
        holds: equal.then_some(g.len() as u128 <= ceiling),
    }
}

/// Additive-structure witness `f = x + y - z` on `A = B = {1..N}`,
/// `C = {2..N+1}`.
#[derive(Clone, Debug)]
pub struct ExtremalWitness {
    pub a: IndexedSet,
    pub b: IndexedSet,
    pub c: IndexedSet,
    pub f: Poly,
    /// `|G|` by direct enumeration of pairs with `a + b ∈ C`.
    pub count: usize,
    /// `N(N+1)/2`, the number of lattice pairs with `a + b ≤ N + 1`.
    pub closed_form: usize,
}

impl ExtremalWitness {
    /// `(N-2)²/8` as an exact rational.
    pub fn guarantee(&self) -> Rational {
        let n = self.a.len() as i64;
        Rational::new(((n - 2) * (n - 2)).into(), 8.into())
    }

    pub fn meets_guarantee(&self) -> bool {
        int(self.count as i64) >= self.guarantee()
    }
}

pub fn gen_extremal_additive(n: usize) -> Result<ExtremalWitness> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2, got {n}")));
    }
    let ni = n as i64;
    let a = IndexedSet::range(1, ni);
    let c = IndexedSet::range(2, ni + 1);
    let f = crate::expr::parse_over("x + y - z", &["x", "y", "z"])?;
    // pairs (a, s - a) with s in C and 1 <= s - a <= N
    let mut count = 0usize;
    for s in 2..=ni + 1 {
        for x in 1..=ni {
            let y = s - x;
            if (1..=ni).contains(&y) {
                count += 1;
            }
        }
    }
    Ok(ExtremalWitness {
        b: a.clone(),
        a,
        c,
        f,
        count,
        closed_form: n * (n + 1) / 2,
    })
}
