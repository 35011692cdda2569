//! Sturm-sequence real root counting and isolation.

use num_traits::{One, Zero};
use serde::Serialize;

use super::rational::{sign, Rational};
use super::univariate::UPoly;
use crate::error::{Error, Result};

/// Half-open interval `(lower, upper]` holding exactly one real root of the
/// associated squarefree polynomial. A rational root is reported through
/// `exact_hit`, in which case both endpoints equal it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsolatingInterval {
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub lower: Rational,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub upper: Rational,
    #[serde(serialize_with = "crate::report::ser_opt_rational")]
    pub exact_hit: Option<Rational>,
}

impl IsolatingInterval {
    fn exact(r: Rational) -> Self {
        IsolatingInterval {
            lower: r.clone(),
            upper: r.clone(),
            exact_hit: Some(r),
        }
    }

    /// Whether `x` lies in the interval (closed at `upper`, and equal to the
    /// hit for exact intervals).
    pub fn contains(&self, x: &Rational) -> bool {
        match &self.exact_hit {
            Some(r) => r == x,
            None => &self.lower < x && x <= &self.upper,
        }
    }
}

/// Sturm chain of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<UPoly>,
}

impl SturmChain {
    pub fn new(p: &UPoly) -> Self {
        let mut chain = vec![p.clone()];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(d);
            loop {
                let n = chain.len();
                let r = chain[n - 2].rem(&chain[n - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push(-&r);
            }
        }
        SturmChain { chain }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let d = p.degree().unwrap_or(0);
            let s = sign(p.lead().unwrap());
            if d % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| sign(p.lead().unwrap())))
    }

    /// Number of distinct roots in `(lo, hi]`.
    pub fn count_between(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo).saturating_sub(self.variations_at(hi))
    }
}

fn nonzero_squarefree(p: &UPoly) -> Result<UPoly> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(p.squarefree())
}

/// Number of distinct real roots of `p`.
pub fn count_real_roots(p: &UPoly) -> Result<usize> {
    let sf = nonzero_squarefree(p)?;
    let chain = SturmChain::new(&sf);
    Ok(chain.variations_at_neg_inf() - chain.variations_at_pos_inf())
}

/// Number of distinct real roots of `p` strictly below `y`.
pub fn count_roots_below(p: &UPoly, y: &Rational) -> Result<usize> {
    let sf = nonzero_squarefree(p)?;
    if sf.degree() == Some(0) {
        return Ok(0);
    }
    let chain = SturmChain::new(&sf);
    let at_or_below = chain.variations_at_neg_inf() - chain.variations_at(y);
    let on = usize::from(sf.eval(y).is_zero());
    Ok(at_or_below - on)
}

/// Isolates every distinct real root of `p`, in increasing order.
pub fn isolate_real_roots(p: &UPoly) -> Result<Vec<IsolatingInterval>> {
    let sf = nonzero_squarefree(p)?;
    if sf.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let chain = SturmChain::new(&sf);
    let bound = sf.cauchy_bound();
    let lead = sf.primitive_integer().lead().unwrap().clone();
    let mut out = Vec::new();
    let lo = -bound.clone();
    let (vlo, vhi) = (chain.variations_at(&lo), chain.variations_at(&bound));
    bisect(&sf, &chain, &lead, lo, bound, vlo, vhi, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn bisect(
    sf: &UPoly,
    chain: &SturmChain,
    lead: &Rational,
    lo: Rational,
    hi: Rational,
    vlo: usize,
    vhi: usize,
    out: &mut Vec<IsolatingInterval>,
) {
    match vlo.saturating_sub(vhi) {
        0 => {}
        1 => out.push(finalize(sf, chain, lead, lo, hi, vlo)),
        _ => {
            let mid = (&lo + &hi) / Rational::from_integer(2.into());
            let vmid = chain.variations_at(&mid);
            bisect(sf, chain, lead, lo, mid.clone(), vlo, vmid, out);
            bisect(sf, chain, lead, mid, hi, vmid, vhi, out);
        }
    }
}

/// Refines `(lo, hi]` until it is narrower than `1/lead`; a rational root
/// `r` of the primitive integer form has `lead * r` integral, so at most one
/// candidate remains and is tested exactly.
fn finalize(
    sf: &UPoly,
    chain: &SturmChain,
    lead: &Rational,
    mut lo: Rational,
    mut hi: Rational,
    mut vlo: usize,
) -> IsolatingInterval {
    let two = Rational::from_integer(2.into());
    loop {
        if sf.eval(&hi).is_zero() {
            return IsolatingInterval::exact(hi);
        }
        if (&hi - &lo) * lead < Rational::one() {
            break;
        }
        let mid = (&lo + &hi) / &two;
        let vmid = chain.variations_at(&mid);
        if vlo - vmid == 1 {
            hi = mid;
        } else {
            lo = mid;
            vlo = vmid;
        }
    }
    let m = (&hi * lead).floor();
    let cand = m / lead;
    if cand > lo && sf.eval(&cand).is_zero() {
        return IsolatingInterval::exact(cand);
    }
    IsolatingInterval {
        lower: lo,
        upper: hi,
        exact_hit: None,
    }
}

/// Rational roots of `p` (empty for the zero polynomial).
pub fn rational_roots(p: &UPoly) -> Vec<Rational> {
    match p.degree() {
        None | Some(0) => Vec::new(),
        Some(1) => {
            let c = p.coeffs();
            vec![-&c[0] / &c[1]]
        }
        _ => isolate_real_roots(p)
            .unwrap_or_default()
            .into_iter()
            .filter_map(|i| i.exact_hit)
            .collect(),
    }
}

/// Position of the root isolated by `iv` relative to `x`.
pub fn compare_root(p: &UPoly, iv: &IsolatingInterval, x: &Rational) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if let Some(r) = &iv.exact_hit {
        return r.cmp(x);
    }
    if x <= &iv.lower {
        return Ordering::Greater;
    }
    if x > &iv.upper {
        return Ordering::Less;
    }
    let sf = p.squarefree();
    if sf.eval(x).is_zero() {
        return Ordering::Equal;
    }
    let chain = SturmChain::new(&sf);
    if chain.count_between(&iv.lower, x) == 1 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}
