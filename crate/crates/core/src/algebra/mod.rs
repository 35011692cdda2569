//! Exact rational scalars and polynomials: evaluation, substitution,
//! resultants, gcds, squarefree parts and real root isolation.

pub mod gcd;
pub mod poly;
pub mod rational;
pub mod resultant;
pub mod sturm;
pub mod univariate;

pub use gcd::{gcd as bivariate_gcd, squarefree_full, squarefree_part};
pub use poly::Poly;
pub use rational::Rational;
pub use resultant::{det_bareiss, resultant, resultant_in, resultant_in_z};
pub use sturm::{isolate_real_roots, rational_roots, IsolatingInterval};
pub use univariate::UPoly;

use crate::error::{Error, Result};

/// Exact value of `p` at `point`.
pub fn evaluate(p: &Poly, point: &[Rational]) -> Result<Rational> {
    p.evaluate(point)
}

/// Fixes one variable of `f`.
pub fn substitute(f: &Poly, variable: &str, value: &Rational) -> Result<Poly> {
    f.substitute(variable, value)
}

/// Real root isolation of a univariate polynomial.
pub fn sturm_isolate(p: &Poly) -> Result<Vec<IsolatingInterval>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let idx = (0..p.nvars()).find(|&i| p.depends_on(i)).unwrap_or(0);
    let u = p
        .to_univariate(idx)
        .ok_or_else(|| Error::InvalidArgument("polynomial is not univariate".into()))?;
    isolate_real_roots(&u)
}
