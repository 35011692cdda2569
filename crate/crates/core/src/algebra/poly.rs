//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A polynomial carries its ordered variable list; exponent vectors are
//! positional against that list. Arithmetic between polynomials requires
//! identical variable lists (use [`Poly::embed`] to align them first).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{common_denominator, numerator_gcd, Rational};
use super::univariate::UPoly;
use crate::error::{Error, Result};

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: Vec<String>,
    terms: BTreeMap<Exponents, Rational>,
}

/// Graded lexicographic order, earlier variables more significant.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl Poly {
    pub fn zero(vars: &[&str]) -> Poly {
        Poly::zero_owned(vars.iter().map(|s| s.to_string()).collect())
    }

    pub fn zero_owned(vars: Vec<String>) -> Poly {
        Poly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[&str], c: Rational) -> Poly {
        let mut p = Poly::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    /// The variable `name` as a polynomial over `vars`.
    pub fn var(vars: &[&str], name: &str) -> Result<Poly> {
        let idx = vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Poly::zero(vars);
        p.add_term(e, Rational::one());
        Ok(p)
    }

    pub fn from_terms(vars: &[&str], terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Poly {
        let mut p = Poly::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent arity");
            p.add_term(e, c);
        }
        p
    }

    fn same_shape(&self, terms: BTreeMap<Exponents, Rational>) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms,
        }
    }

    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Rational> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Rational::zero))
    }

    pub fn coefficient(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|e| e[idx]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, idx: usize) -> bool {
        self.degree_in(idx) > 0
    }

    /// Leading term in lexicographic order (first variable most significant).
    pub fn lex_leading(&self) -> Option<(&Exponents, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn grlex_leading(&self) -> Option<(&Exponents, &Rational)> {
        self.terms.iter().max_by(|a, b| grlex_cmp(a.0, b.0))
    }

    fn check_vars(&self, other: &Poly) {
        assert_eq!(
            self.vars, other.vars,
            "polynomial arithmetic on different variable lists"
        );
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero_owned(self.vars.clone());
        }
        self.same_shape(self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::zero_owned(self.vars.clone());
        acc.add_term(vec![0; self.nvars()], Rational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// self - coef * x^shift * d, in place.
    fn sub_scaled_shifted(&mut self, d: &Poly, shift: &[u32], coef: &Rational) {
        for (e, c) in &d.terms {
            let ne: Exponents = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            self.add_term(ne, -(c * coef));
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        self.check_vars(d);
        let (dl_e, dl_c) = d.lex_leading()?;
        let (dl_e, dl_c) = (dl_e.clone(), dl_c.clone());
        let mut r = self.clone();
        let mut q = Poly::zero_owned(self.vars.clone());
        while let Some((e, c)) = r.lex_leading() {
            if e.iter().zip(&dl_e).any(|(a, b)| a < b) {
                return None;
            }
            let shift: Exponents = e.iter().zip(&dl_e).map(|(a, b)| a - b).collect();
            let coef = c / &dl_c;
            r.sub_scaled_shifted(d, &shift, &coef);
            q.add_term(shift, coef);
        }
        Some(q)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars() {
            return Err(Error::Arity {
                expected: self.nvars(),
                got: point.len(),
            });
        }
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Fixes `name := value`; the variable is removed and the order of the
    /// remaining variables is preserved.
    pub fn substitute(&self, name: &str, value: &Rational) -> Result<Poly> {
        let idx = self.var_index(name)?;
        let mut vars = self.vars.clone();
        vars.remove(idx);
        let mut out = Poly::zero_owned(vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne.remove(idx);
            out.add_term(ne, c * num_traits::pow(value.clone(), k as usize));
        }
        Ok(out)
    }

    pub fn derivative(&self, idx: usize) -> Poly {
        let mut out = Poly::zero_owned(self.vars.clone());
        for (e, c) in &self.terms {
            if e[idx] > 0 {
                let mut ne = e.clone();
                ne[idx] -= 1;
                out.add_term(ne, c * Rational::from_integer(BigInt::from(e[idx])));
            }
        }
        out
    }

    pub fn derivative_by(&self, name: &str) -> Result<Poly> {
        Ok(self.derivative(self.var_index(name)?))
    }

    /// Coefficients of powers of variable `idx`, each over the same variable
    /// list with exponent 0 in `idx`. Empty for the zero polynomial.
    pub fn coeffs_in(&self, idx: usize) -> Vec<Poly> {
        let n = if self.is_zero() {
            0
        } else {
            self.degree_in(idx) as usize + 1
        };
        let mut out = vec![Poly::zero_owned(self.vars.clone()); n];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = std::mem::replace(&mut ne[idx], 0);
            out[k as usize].add_term(ne, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(vars: &[String], idx: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero_owned(vars.to_vec());
        for (k, p) in coeffs.iter().enumerate() {
            for (e, c) in &p.terms {
                let mut ne = e.clone();
                ne[idx] += k as u32;
                out.add_term(ne, c.clone());
            }
        }
        out
    }

    /// Re-expresses over `new_vars`, which must contain every variable this
    /// polynomial actually uses.
    pub fn embed(&self, new_vars: &[String]) -> Result<Poly> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, v) in self.vars.iter().enumerate() {
            match new_vars.iter().position(|w| w == v) {
                Some(j) => map.push(Some(j)),
                None if !self.depends_on(i) => map.push(None),
                None => return Err(Error::UnknownVariable(v.clone())),
            }
        }
        let mut out = Poly::zero_owned(new_vars.to_vec());
        for (e, c) in &self.terms {
            let mut ne = vec![0; new_vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    ne[j] = k;
                }
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    pub fn rename(&self, from: &str, to: &str) -> Result<Poly> {
        let idx = self.var_index(from)?;
        let mut p = self.clone();
        p.vars[idx] = to.to_string();
        Ok(p)
    }

    /// Moves variable roles while names stay attached to positions: the
    /// variable at position `i` of the result plays the role of the old
    /// variable at position `perm[i]`. With `perm = [1, 0, 2]`,
    /// `f(x, y, z)` becomes `f(y, x, z)`.
    pub fn permute(&self, perm: &[usize]) -> Poly {
        assert_eq!(perm.len(), self.nvars(), "permutation arity");
        let mut out = Poly::zero_owned(self.vars.clone());
        for (e, c) in &self.terms {
            let ne: Exponents = perm.iter().map(|&i| e[i]).collect();
            out.add_term(ne, c.clone());
        }
        out
    }

    pub fn to_univariate(&self, idx: usize) -> Option<UPoly> {
        let mut coeffs = vec![Rational::zero(); self.degree_in(idx) as usize + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(i, &k)| i != idx && k > 0) {
                return None;
            }
            coeffs[e[idx] as usize] = c.clone();
        }
        Some(UPoly::new(coeffs))
    }

    pub fn from_univariate(vars: &[String], idx: usize, u: &UPoly) -> Poly {
        let mut out = Poly::zero_owned(vars.to_vec());
        for (k, c) in u.coeffs().iter().enumerate() {
            let mut e = vec![0; vars.len()];
            e[idx] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    /// Primitive integer form with positive graded-lex leading coefficient.
    pub fn normalized(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let den = Rational::from_integer(common_denominator(self.terms.values()));
        let scaled: Vec<Rational> = self.terms.values().map(|c| c * &den).collect();
        let g = numerator_gcd(&scaled);
        let mut factor = den / Rational::from_integer(g);
        if self.grlex_leading().unwrap().1.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn one_like(&self) -> Poly {
        let mut p = Poly::zero_owned(self.vars.clone());
        p.add_term(vec![0; self.nvars()], Rational::one());
        p
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

// Monomial product adds exponents.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let mut out = Poly::zero_owned(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for Poly {
    /// Parser-compatible rendering, terms in descending graded-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Exponents, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| grlex_cmp(b.0, a.0));
        for (n, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&k| k == 0);
            if is_const || !mag.is_one() {
                factors.push(mag.to_string());
            }
            for (v, &k) in self.vars.iter().zip(e.iter()) {
                match k {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{k}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.vars.join(","), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    const XYZ: [&str; 3] = ["x", "y", "z"];

    fn v(name: &str) -> Poly {
        Poly::var(&XYZ, name).unwrap()
    }

    fn c(n: i64) -> Poly {
        Poly::constant(&XYZ, int(n))
    }

    #[test]
    fn evaluate_examples() {
        let f = &(&v("x") + &v("y")) - &v("z");
        assert_eq!(f.evaluate(&[int(1), int(2), int(3)]).unwrap(), int(0));
        assert_eq!(
            Poly::zero(&XYZ).evaluate(&[int(4), int(5), int(6)]).unwrap(),
            int(0)
        );
        let d = &v("x") - &v("y");
        let mrwz = &(&d.pow(2) + &v("x")) - &v("z");
        assert_eq!(mrwz.evaluate(&[int(2), int(1), int(3)]).unwrap(), int(0));
        assert!(matches!(f.evaluate(&[int(1)]), Err(Error::Arity { .. })));
    }

    #[test]
    fn substitute_examples() {
        let f = &(&v("x") + &v("y")) - &v("z");
        let g = f.substitute("z", &int(5)).unwrap();
        assert_eq!(g.vars(), &["x".to_string(), "y".to_string()]);
        assert_eq!(g.to_string(), "x + y - 5");
        let h = &v("z").pow(2) - &(&v("x") * &v("y"));
        assert_eq!(h.substitute("x", &int(0)).unwrap().to_string(), "z^2");
        let d = &v("x") - &v("y");
        let mrwz = &(&d.pow(2) + &v("x")) - &v("z");
        assert_eq!(
            mrwz.substitute("z", &int(1)).unwrap().to_string(),
            "x^2 - 2*x*y + y^2 + x - 1"
        );
        assert!(matches!(
            f.substitute("w", &int(1)),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn exact_division() {
        let a = &v("x") - &v("y");
        let b = &(&v("x") * &v("z")) + &c(3);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert!(prod.div_exact(&(&v("x") + &c(1))).is_none());
    }

    #[test]
    fn normalization_is_primitive_and_positive() {
        let p = (&v("y") - &(&v("x") * &c(2))).scale(&Rational::new((-3).into(), 4.into()));
        // grlex: x before y, so -2x leads; normalized leading coefficient positive
        assert_eq!(p.normalized().to_string(), "2*x - y");
    }

    #[test]
    fn coefficient_split_roundtrip() {
        let p = &(&v("x").pow(2) * &v("z")) + &(&v("y") * &v("z").pow(3));
        let cs = p.coeffs_in(2);
        assert_eq!(cs.len(), 4);
        assert_eq!(Poly::from_coeffs_in(p.vars(), 2, &cs), p);
    }

    #[test]
    fn permute_swaps_roles() {
        let f = &v("x") - &(&v("y").pow(2) * &c(3));
        let g = f.permute(&[1, 0, 2]);
        assert_eq!(g.to_string(), "-3*x^2 + y");
    }

    #[test]
    fn embed_and_rename() {
        let p = Poly::var(&["y", "z"], "y").unwrap();
        let q = p.rename("y", "w").unwrap();
        let e = q.embed(&["w".into(), "y".into(), "z".into()]).unwrap();
        assert_eq!(e.to_string(), "w");
        assert!(p.embed(&["z".into()]).is_err());
    }
}
