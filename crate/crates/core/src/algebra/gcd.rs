//! Multivariate gcd over the rationals by recursive primitive
//! pseudo-remainder sequences, plus content and squarefree parts.

use super::poly::Poly;
use crate::error::{Error, Result};

/// Highest-index variable that occurs in `p` or `q`.
fn main_var(p: &Poly, q: &Poly) -> Option<usize> {
    (0..p.nvars()).rev().find(|&i| p.depends_on(i) || q.depends_on(i))
}

/// gcd of the coefficients of `p` as a polynomial in variable `idx`.
pub fn content_in(p: &Poly, idx: usize) -> Poly {
    let mut acc: Option<Poly> = None;
    for c in p.coeffs_in(idx).into_iter().filter(|c| !c.is_zero()) {
        acc = Some(match acc {
            None => c.normalized(),
            Some(a) => gcd_inner(&a, &c),
        });
        if acc.as_ref().is_some_and(|a| a.is_constant()) {
            return p.one_like();
        }
    }
    acc.unwrap_or_else(|| p.one_like())
}

pub fn primitive_part_in(p: &Poly, idx: usize) -> Poly {
    let c = content_in(p, idx);
    p.div_exact(&c).expect("content divides")
}

/// Pseudo-remainder of `a` by `b` with respect to variable `idx`.
fn prem(a: &Poly, b: &Poly, idx: usize) -> Poly {
    let db = b.degree_in(idx);
    let lb = b.coeffs_in(idx).pop().expect("nonzero divisor");
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(idx) >= db {
        let dr = r.degree_in(idx);
        let lr = r.coeffs_in(idx).pop().unwrap();
        let mut shift = vec![0; a.nvars()];
        shift[idx] = dr - db;
        let mono = Poly::from_terms(
            &a.vars().iter().map(String::as_str).collect::<Vec<_>>(),
            [(shift, num_traits::One::one())],
        );
        r = &(&lb * &r) - &(&(&lr * &mono) * b);
    }
    r
}

fn gcd_inner(p: &Poly, q: &Poly) -> Poly {
    if p.is_zero() {
        return q.normalized();
    }
    if q.is_zero() {
        return p.normalized();
    }
    if p.is_constant() || q.is_constant() {
        return p.one_like();
    }
    // Linear fast path: a degree-1 polynomial is irreducible.
    for (lin, other) in [(p, q), (q, p)] {
        if lin.total_degree() == 1 {
            return if other.div_exact(lin).is_some() {
                lin.normalized()
            } else {
                p.one_like()
            };
        }
    }
    let m = main_var(p, q).expect("nonconstant");
    if !p.depends_on(m) {
        return gcd_inner(p, &content_in(q, m));
    }
    if !q.depends_on(m) {
        return gcd_inner(&content_in(p, m), q);
    }
    let (cp, cq) = (content_in(p, m), content_in(q, m));
    let c = gcd_inner(&cp, &cq);
    let mut a = p.div_exact(&cp).unwrap();
    let mut b = q.div_exact(&cq).unwrap();
    if a.degree_in(m) < b.degree_in(m) {
        std::mem::swap(&mut a, &mut b);
    }
    let g = loop {
        let r = prem(&a, &b, m);
        if r.is_zero() {
            break b;
        }
        if !r.depends_on(m) {
            break p.one_like();
        }
        a = b;
        b = primitive_part_in(&r, m);
    };
    (&c * &primitive_part_in(&g, m)).normalized()
}

/// Greatest common divisor over the rationals, normalized to a primitive
/// integer polynomial with positive graded-lex leading coefficient.
pub fn gcd(p: &Poly, q: &Poly) -> Result<Poly> {
    if p.vars() != q.vars() {
        return Err(Error::VariableMismatch(p.vars().to_vec(), q.vars().to_vec()));
    }
    if p.is_zero() && q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(gcd_inner(p, q))
}

/// `p / gcd(p, dp/dvar)`, normalized: the squarefree part with respect to
/// `var` over the field of rational functions in the other variables.
pub fn squarefree_part(p: &Poly, var: &str) -> Result<Poly> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let idx = p.var_index(var)?;
    if !p.depends_on(idx) {
        return Ok(p.one_like());
    }
    let g = gcd_inner(p, &p.derivative(idx));
    Ok(p.div_exact(&g).expect("gcd divides").normalized())
}

/// Squarefree part in all variables jointly (repeated factors of any kind
/// reduced to multiplicity one, constant factors dropped).
pub fn squarefree_full(p: &Poly) -> Result<Poly> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(squarefree_full_inner(p))
}

fn squarefree_full_inner(p: &Poly) -> Poly {
    let Some(m) = (0..p.nvars()).rev().find(|&i| p.depends_on(i)) else {
        return p.one_like();
    };
    let cont = content_in(p, m);
    let pp = p.div_exact(&cont).unwrap();
    let g = gcd_inner(&pp, &pp.derivative(m));
    let sf = pp.div_exact(&g).unwrap();
    (&squarefree_full_inner(&cont) * &sf).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    const YY: [&str; 2] = ["y", "y'"];

    fn y() -> Poly {
        Poly::var(&YY, "y").unwrap()
    }
    fn yp() -> Poly {
        Poly::var(&YY, "y'").unwrap()
    }
    fn k(n: i64) -> Poly {
        Poly::constant(&YY, int(n))
    }

    #[test]
    fn shared_linear_factor() {
        let d = &y() - &yp();
        let p = &d * &(&y() + &k(1));
        let q = &d * &(&yp() - &k(3));
        assert_eq!(gcd(&p, &q).unwrap().to_string(), "y - y'");
    }

    #[test]
    fn difference_of_squares() {
        let p = &y().pow(2) - &yp().pow(2);
        assert_eq!(gcd(&p, &(&y() - &yp())).unwrap().to_string(), "y - y'");
    }

    #[test]
    fn coprime_gives_unit() {
        let g = gcd(&(&y() - &yp()), &(&(&y() + &yp()) + &k(1))).unwrap();
        assert_eq!(g.to_string(), "1");
        // nonlinear coprime pair exercises the pseudo-remainder loop
        let p = &(&y().pow(2) * &yp()) + &k(1);
        let q = &(&yp().pow(2) * &y()) - &k(2);
        assert_eq!(gcd(&p, &q).unwrap().to_string(), "1");
    }

    #[test]
    fn nonlinear_common_factor() {
        let c = &(&y().pow(2) + &(&y() * &yp())) - &k(2);
        let p = &c * &(&yp().pow(2) + &k(1));
        let q = &c * &(&y() - &k(3));
        assert_eq!(gcd(&p, &q).unwrap(), c.normalized());
    }

    #[test]
    fn zero_inputs() {
        assert_eq!(gcd(&k(0), &k(0)), Err(Error::ZeroPolynomial));
        assert_eq!(gcd(&k(0), &(&y() * &k(-2))).unwrap().to_string(), "y");
    }

    #[test]
    fn squarefree_examples() {
        let z = Poly::var(&["z"], "z").unwrap();
        let one = Poly::constant(&["z"], int(1));
        let two = Poly::constant(&["z"], int(2));
        let sq = (&z - &one).pow(2);
        assert_eq!(squarefree_part(&sq, "z").unwrap().to_string(), "z - 1");
        let p = &z.pow(2) - &two;
        assert_eq!(squarefree_part(&p, "z").unwrap().to_string(), "z^2 - 2");
        let q = &y() * &(&y() - &yp()).pow(2);
        assert_eq!(squarefree_part(&q, "y").unwrap().to_string(), "y^2 - y*y'");
        assert_eq!(squarefree_part(&k(0), "y"), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn squarefree_full_keeps_content_factors() {
        let p = &(&yp() - &k(1)).pow(2) * &(&y() - &yp()).pow(3);
        let sf = squarefree_full(&p).unwrap();
        assert_eq!(sf, (&(&yp() - &k(1)) * &(&y() - &yp())).normalized());
    }
}
