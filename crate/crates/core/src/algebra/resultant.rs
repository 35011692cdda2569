//! Sylvester resultants via fraction-free (Bareiss) elimination.

use super::poly::Poly;
use crate::error::{Error, Result};

/// Determinant of a square matrix of polynomials sharing one variable list.
/// Every division in the elimination is exact.
pub fn det_bareiss(mut m: Vec<Vec<Poly>>, vars: &[String]) -> Poly {
    let n = m.len();
    let one = Poly::zero_owned(vars.to_vec()).one_like();
    if n == 0 {
        return one;
    }
    let mut negate = false;
    let mut prev = one;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Poly::zero_owned(vars.to_vec()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss step divides exactly");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

/// Variables of `p` then those of `q` not already present, skipping `elim`.
fn union_vars(p: &Poly, q: &Poly, elim: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for v in p.vars().iter().chain(q.vars()) {
        if v != elim && !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

/// Sylvester matrix of `p`, `q` (as polynomials in `elim`) over the joint
/// variable list with `elim` appended last.
fn sylvester(p: &Poly, q: &Poly, elim: &str) -> Result<(Vec<Vec<Poly>>, Vec<String>)> {
    let mut vars = union_vars(p, q, elim);
    vars.push(elim.to_string());
    let idx = vars.len() - 1;
    let pe = p.embed(&vars)?;
    let qe = q.embed(&vars)?;
    let pc = pe.coeffs_in(idx);
    let qc = qe.coeffs_in(idx);
    let (m, n) = (pc.len() - 1, qc.len() - 1);
    let size = m + n;
    let zero = Poly::zero_owned(vars.clone());
    let mut mat = vec![vec![zero; size]; size];
    for r in 0..n {
        for (k, c) in pc.iter().rev().enumerate() {
            mat[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in qc.iter().rev().enumerate() {
            mat[n + r][r + k] = c.clone();
        }
    }
    Ok((mat, vars))
}

/// Resultant with respect to `elim`, extending the Sylvester determinant to
/// degree-0 inputs by `Res(c, q) = c^deg(q)`. The result lives on the joint
/// variable list of `p` and `q` without `elim`.
pub fn resultant(p: &Poly, q: &Poly, elim: &str) -> Result<Poly> {
    let vars = union_vars(p, q, elim);
    let mut with_elim = vars.clone();
    with_elim.push(elim.to_string());
    let idx = vars.len();
    let pe = p.embed(&with_elim)?;
    let qe = q.embed(&with_elim)?;
    if pe.is_zero() || qe.is_zero() {
        return Ok(Poly::zero_owned(vars));
    }
    let (dp, dq) = (pe.degree_in(idx), qe.degree_in(idx));
    let project = |x: &Poly| x.embed(&vars).expect("eliminated variable absent");
    if dp == 0 {
        return Ok(project(&pe.pow(dq)));
    }
    if dq == 0 {
        return Ok(project(&qe.pow(dp)));
    }
    let (mat, all) = sylvester(&pe, &qe, elim)?;
    let det = det_bareiss(mat, &all);
    Ok(project(&det))
}

/// Resultant of `g1(u, z)` and `g2(v, z)` with respect to `z`: the Sylvester
/// determinant, a polynomial in the remaining variables that vanishes
/// wherever a common `z`-root exists.
pub fn resultant_in_z(g1: &Poly, g2: &Poly) -> Result<Poly> {
    resultant_in(g1, g2, "z")
}

/// As [`resultant_in_z`] for an arbitrary elimination variable; both inputs
/// must have positive degree in it.
pub fn resultant_in(g1: &Poly, g2: &Poly, elim: &str) -> Result<Poly> {
    if g1.is_zero() && g2.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    for g in [g1, g2] {
        let positive = g.var_index(elim).map(|i| g.depends_on(i)).unwrap_or(false);
        if !positive {
            return Err(Error::DegreeZero(elim.to_string()));
        }
    }
    resultant(g1, g2, elim)
}
