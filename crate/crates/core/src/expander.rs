//! Image sizes `|h(A×B)|`, the separability detector for the special forms
//! `a(b(x) + c(y))` and `a(b(x)·c(y))`, and growth-exponent experiments.

use std::collections::HashSet;

use num_traits::One;
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::rational::int;
use crate::algebra::{Poly, Rational, UPoly};
use crate::error::{Error, Result};
use crate::fit::{fit_counts, Fit};
use crate::grid::IndexedSet;
use crate::report::{ser_poly, SCHEMA_VERSION};
use crate::seed::stage_rng;

fn require_bivariate(h: &Poly) -> Result<()> {
    if h.nvars() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected a bivariate polynomial, got variables {:?}",
            h.vars()
        )));
    }
    Ok(())
}

/// `|{h(a, b) : a ∈ A, b ∈ B}|`, deduplicated in canonical rational form.
pub fn image_size(h: &Poly, a: &IndexedSet, b: &IndexedSet) -> Result<usize> {
    require_bivariate(h)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("image_size needs nonempty A and B"));
    }
    let xname = h.vars()[0].clone();
    let rows: Vec<Vec<Rational>> = a
        .elements()
        .par_iter()
        .map(|ai| {
            let slice: UPoly = h
                .substitute(&xname, ai)
                .expect("x present")
                .to_univariate(0)
                .expect("univariate in y");
            b.elements().iter().map(|bj| slice.eval(bj)).collect()
        })
        .collect();
    let values: HashSet<&Rational> = rows.iter().flatten().collect();
    Ok(values.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SpecialCandidate,
    NonSpecial,
}

#[derive(Clone, Debug, Serialize)]
pub struct Separability {
    pub verdict: Verdict,
    /// `W = r²(p·p_xy − p_x·p_y) − p²(r·r_xy − r_x·r_y)` with `p = h_x`,
    /// `r = h_y`; zero exactly when `p/r` separates multiplicatively.
    #[serde(serialize_with = "ser_poly")]
    pub witness: Poly,
}

pub fn separability_test(h: &Poly) -> Result<Separability> {
    require_bivariate(h)?;
    if !h.depends_on(0) || !h.depends_on(1) {
        return Ok(Separability {
            verdict: Verdict::SpecialCandidate,
            witness: Poly::zero_owned(h.vars().to_vec()),
        });
    }
    let p = h.derivative(0);
    let r = h.derivative(1);
    let mixed = |q: &Poly| {
        let qx = q.derivative(0);
        let qy = q.derivative(1);
        &(q * &qx.derivative(1)) - &(&qx * &qy)
    };
    let w = &(&(&r * &r) * &mixed(&p)) - &(&(&p * &p) * &mixed(&r));
    Ok(Separability {
        verdict: if w.is_zero() {
            Verdict::SpecialCandidate
        } else {
            Verdict::NonSpecial
        },
        witness: w,
    })
}

/// `h(αx + β, γy + δ)`.
pub fn affine_image(h: &Poly, alpha: &Rational, beta: &Rational, gamma: &Rational, delta: &Rational) -> Poly {
    let vars: Vec<&str> = h.vars().iter().map(String::as_str).collect();
    let lin = |idx: usize, m: &Rational, c: &Rational| {
        let mut e = vec![0; 2];
        e[idx] = 1;
        Poly::from_terms(&vars, [(e, m.clone()), (vec![0, 0], c.clone())])
    };
    let (u, v) = (lin(0, alpha, beta), lin(1, gamma, delta));
    let mut out = Poly::zero(&vars);
    for (e, c) in h.terms() {
        let term = (&u.pow(e[0]) * &v.pow(e[1])).scale(c);
        out = &out + &term;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `{1, …, N}`.
    Interval,
    /// `{1, 2, 4, …, 2^(N-1)}`.
    Geometric,
    /// `N` distinct integers drawn uniformly from `{1, …, 4N²}`.
    Random { seed: u64 },
}

impl Family {
    pub fn generate(&self, n: usize) -> IndexedSet {
        match self {
            Family::Interval => IndexedSet::range(1, n as i64),
            Family::Geometric => {
                let mut v = Vec::with_capacity(n);
                let mut x = Rational::one();
                for _ in 0..n {
                    v.push(x.clone());
                    x *= int(2);
                }
                IndexedSet::strict(v).expect("distinct powers")
            }
            Family::Random { seed } => {
                let mut rng = stage_rng(*seed, &format!("family/{n}"));
                let top = (4 * n * n).max(1);
                let picks = sample(&mut rng, top, n.min(top));
                IndexedSet::strict(picks.into_iter().map(|i| int(i as i64 + 1))).expect("distinct samples")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthEntry {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "sizeA")]
    pub size_a: usize,
    #[serde(rename = "sizeB")]
    pub size_b: usize,
    pub image: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthSeries {
    pub entries: Vec<GrowthEntry>,
    pub fit: Fit,
}

/// Image sizes on `family(N)` for each `N`, with the fitted exponent of
/// `|h(A×A)|` against `N`.
pub fn growth_experiment(h: &Poly, family: Family, ns: &[usize]) -> Result<GrowthSeries> {
    require_bivariate(h)?;
    if !h.depends_on(0) || !h.depends_on(1) {
        return Err(Error::InvalidArgument("h must depend on both x and y".into()));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("sizes must be strictly increasing".into()));
    }
    if ns.first() == Some(&0) {
        return Err(Error::InvalidArgument("sizes must be positive".into()));
    }
    let entries: Vec<GrowthEntry> = ns
        .iter()
        .map(|&n| {
            let s = family.generate(n);
            Ok(GrowthEntry {
                n,
                size_a: s.len(),
                size_b: s.len(),
                image: image_size(h, &s, &s)?,
            })
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = entries.iter().map(|e| (e.n, e.image)).collect();
    let fit = fit_counts(&pairs)?;
    Ok(GrowthSeries { entries, fit })
}

impl GrowthSeries {
    /// CSV with columns `N, sizeA, sizeB, image`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for e in &self.entries {
            w.serialize(e).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthSummary {
    pub schema: u32,
    #[serde(serialize_with = "ser_poly")]
    pub h: Poly,
    pub family: Family,
    pub exponent: f64,
    pub residual: f64,
    pub verdict: Verdict,
    pub entries: Vec<GrowthEntry>,
}

pub fn growth_summary(h: &Poly, family: Family, series: &GrowthSeries) -> Result<GrowthSummary> {
    Ok(GrowthSummary {
        schema: SCHEMA_VERSION,
        h: h.clone(),
        family,
        exponent: series.fit.slope,
        residual: series.fit.residual,
        verdict: separability_test(h)?.verdict,
        entries: series.entries.clone(),
    })
}

/// `h` over the first two variables when `f = λ·(h(x, y) - z)` for a
/// nonzero constant `λ`.
pub fn graph_form(f: &Poly) -> Option<Poly> {
    if f.nvars() != 3 || f.degree_in(2) != 1 {
        return None;
    }
    let coeffs = f.coeffs_in(2);
    let lead = coeffs[1].constant_value()?;
    let h = coeffs[0].scale(&(-Rational::one() / lead));
    let names: Vec<String> = f.vars()[..2].to_vec();
    let h = h.embed(&names).ok()?;
    if h.is_zero() {
        return Some(Poly::zero_owned(names));
    }
    Some(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::frac;
    use crate::expr::parse_over;

    fn h(s: &str) -> Poly {
        parse_over(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn image_examples() {
        let s5 = IndexedSet::range(1, 5);
        assert_eq!(image_size(&h("x + y"), &s5, &s5).unwrap(), 9);
        let s3 = IndexedSet::range(1, 3);
        assert_eq!(image_size(&h("x*y"), &s3, &s3).unwrap(), 6);
        let s2 = IndexedSet::range(1, 2);
        assert_eq!(image_size(&h("x*(x + y)"), &s2, &s2).unwrap(), 4);
        let empty = IndexedSet::range(1, 0);
        assert!(image_size(&h("x"), &empty, &s2).is_err());
    }

    #[test]
    fn injective_on_grid() {
        let n = 12;
        let s = IndexedSet::range(1, n);
        let p = h(&format!("x + {}*y", n + 1));
        assert_eq!(image_size(&p, &s, &s).unwrap(), (n * n) as usize);
    }

    #[test]
    fn separability_examples() {
        assert_eq!(
            separability_test(&h("x + y")).unwrap().verdict,
            Verdict::SpecialCandidate
        );
        assert_eq!(
            separability_test(&h("x*y")).unwrap().verdict,
            Verdict::SpecialCandidate
        );
        let s = separability_test(&h("x^2 + x*y")).unwrap();
        assert_eq!(s.verdict, Verdict::NonSpecial);
        assert_eq!(s.witness, h("-2*x^2"));
        assert_eq!(
            separability_test(&h("x^2")).unwrap().verdict,
            Verdict::SpecialCandidate
        );
    }

    #[test]
    fn special_forms_with_nontrivial_outer_map() {
        for s in [
            "(x^2 + y^3)^2 + 1",
            "(x*y^2 + 3*y^2)^3",
            "x^2 + y^3",
            "(x + 1)*(y^2 - 2)",
        ] {
            assert_eq!(
                separability_test(&h(s)).unwrap().verdict,
                Verdict::SpecialCandidate,
                "{s}"
            );
        }
        for s in ["x^2 + x*y", "x^3 + x*y + y", "(x - y)^2 + x"] {
            assert_eq!(
                separability_test(&h(s)).unwrap().verdict,
                Verdict::NonSpecial,
                "{s}"
            );
        }
    }

    #[test]
    fn affine_images() {
        let p = h("x*y + x");
        let q = affine_image(&p, &int(2), &int(1), &frac(1, 2), &int(-3));
        // (2x+1)(y/2-3) + 2x + 1
        assert_eq!(q, h("x*y - 6*x + 1/2*y + 2*x - 3 + 1"));
    }

    #[test]
    fn families() {
        assert_eq!(
            Family::Geometric.generate(4).elements(),
            &[int(1), int(2), int(4), int(8)]
        );
        let r = Family::Random { seed: 9 }.generate(10);
        assert_eq!(r.len(), 10);
        assert_eq!(r, Family::Random { seed: 9 }.generate(10));
    }

    #[test]
    fn growth_of_sums() {
        let g = growth_experiment(&h("x + y"), Family::Interval, &[16, 32, 64, 128]).unwrap();
        assert!((g.fit.slope - 1.0).abs() <= 0.05);
        assert_eq!(g.entries[0].image, 31);
        assert!(g.to_csv().starts_with("N,sizeA,sizeB,image\n16,16,16,31\n"));
        assert!(growth_experiment(&h("x^2"), Family::Interval, &[4, 8]).is_err());
        assert!(growth_experiment(&h("x + y"), Family::Interval, &[8]).is_err());
    }

    #[test]
    fn graph_form_detection() {
        let f = parse_over("z - x^2 - x*y", &["x", "y", "z"]).unwrap();
        assert_eq!(graph_form(&f).unwrap(), h("x^2 + x*y"));
        let f = parse_over("2*x + 2*y - 2*z", &["x", "y", "z"]).unwrap();
        assert_eq!(graph_form(&f).unwrap(), h("x + y"));
        let f = parse_over("z^2 - x*y", &["x", "y", "z"]).unwrap();
        assert!(graph_form(&f).is_none());
        let f = parse_over("x*z - y", &["x", "y", "z"]).unwrap();
        assert!(graph_form(&f).is_none());
    }
}
