//! Decomposition of a real plane curve `g(x, y) = 0` into graphs of weakly
//! monotone functions of `x`, and assignment of curve points to those graphs.
//!
//! The cut points are the real roots of three generators after vertical
//! lines (the `y`-content) are split off and `g` is made squarefree in `y`:
//! the discriminant `Res_y(g, g_y)`, the horizontal-tangent resultant
//! `Res_y(k, k_x)` (with `k` stripped of `x`-free factors, which are
//! horizontal lines) and the leading `y`-coefficient. Between consecutive cut
//! points the real roots of `g(x0, ·)` are continuous, non-crossing and free
//! of critical points, so the `i`-th root from below traces a monotone graph.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::gcd::{content_in, gcd, squarefree_part};
use crate::algebra::sturm::{count_real_roots, count_roots_below, isolate_real_roots, SturmChain};
use crate::algebra::{resultant, IsolatingInterval, Poly, Rational, UPoly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalTag {
    VerticalTangent,
    HorizontalTangent,
    LeadingVanish,
    VerticalLine,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalValue {
    pub interval: IsolatingInterval,
    pub tags: Vec<CriticalTag>,
}

/// Sorted, pairwise disjoint critical `x`-values of a curve.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalValueSet {
    pub values: Vec<CriticalValue>,
}

impl CriticalValueSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rational critical values (those isolated exactly).
    pub fn rational_values(&self) -> Vec<Rational> {
        self.values
            .iter()
            .filter_map(|v| v.interval.exact_hit.clone())
            .collect()
    }
}

/// A curve prepared for point assignment.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// `y`-content of `g`: a polynomial in `x` whose roots are vertical lines.
    pub vertical: UPoly,
    /// `g` without content, squarefree in `y`; same zero set off the lines.
    pub core: Poly,
    /// Squarefree product of all cut-point generators.
    pub cut: UPoly,
    pub critical: CriticalValueSet,
    cut_chain: SturmChain,
}

fn require_bivariate(g: &Poly) -> Result<()> {
    if g.nvars() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected a bivariate polynomial, got variables {:?}",
            g.vars()
        )));
    }
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(())
}

fn in_x(p: &Poly) -> UPoly {
    p.to_univariate(0).expect("polynomial in x only")
}

/// Whether the unique root of `cut` isolated by `iv` is also a root of `p`.
fn shares_root(p: &UPoly, iv: &IsolatingInterval) -> bool {
    if p.degree().unwrap_or(0) == 0 {
        return false;
    }
    match &iv.exact_hit {
        Some(r) => p.eval(r).is_zero(),
        None => SturmChain::new(&p.squarefree()).count_between(&iv.lower, &iv.upper) > 0,
    }
}

impl Decomposition {
    pub fn new(g: &Poly) -> Result<Self> {
        require_bivariate(g)?;
        let content = content_in(g, 1);
        let g1 = g.div_exact(&content).expect("content divides");
        let vertical = in_x(&content);
        let core = if g1.depends_on(1) {
            squarefree_part(&g1, &g1.vars()[1].clone())?
        } else {
            g1.one_like()
        };

        let mut generators: Vec<(CriticalTag, UPoly)> = Vec::new();
        if core.depends_on(1) {
            let yname = core.vars()[1].clone();
            let gy = core.derivative(1);
            let d1 = resultant(&core, &gy, &yname)?;
            if d1.is_zero() {
                return Err(Error::Invariant(
                    "discriminant vanishes on a squarefree curve".into(),
                ));
            }
            generators.push((CriticalTag::VerticalTangent, in_x(&d1)));

            let gx = core.derivative(0);
            let k = core.div_exact(&gcd(&core, &gx)?).expect("gcd divides");
            let kx = k.derivative(0);
            if !kx.is_zero() {
                let d2 = resultant(&k, &kx, &yname)?;
                if d2.is_zero() {
                    return Err(Error::Invariant(
                        "horizontal-tangent resultant vanishes identically".into(),
                    ));
                }
                generators.push((CriticalTag::HorizontalTangent, in_x(&d2)));
            }
            let lead = core.coeffs_in(1).pop().expect("nonzero");
            generators.push((CriticalTag::LeadingVanish, in_x(&lead)));
        }
        generators.push((CriticalTag::VerticalLine, vertical.clone()));

        let mut product = UPoly::constant(Rational::from_integer(1.into()));
        for (_, p) in &generators {
            product = &product * p;
        }
        let cut = product.squarefree();
        let intervals = if cut.degree().unwrap_or(0) == 0 {
            Vec::new()
        } else {
            isolate_real_roots(&cut)?
        };
        let values = intervals
            .into_iter()
            .map(|interval| {
                let mut tags: Vec<CriticalTag> = generators
                    .iter()
                    .filter(|(_, p)| shares_root(p, &interval))
                    .map(|(t, _)| *t)
                    .collect();
                tags.sort();
                tags.dedup();
                CriticalValue { interval, tags }
            })
            .collect();
        Ok(Decomposition {
            cut_chain: SturmChain::new(&cut),
            vertical,
            core,
            cut,
            critical: CriticalValueSet { values },
        })
    }

    /// Number of open cells (`critical values + 1`).
    pub fn cell_count(&self) -> usize {
        self.critical.len() + 1
    }

    /// Cell holding `x`, or `None` when `x` is a critical value.
    pub fn cell_of(&self, x: &Rational) -> Option<usize> {
        if self.cut.eval(x).is_zero() {
            return None;
        }
        if self.cut.degree().unwrap_or(0) == 0 {
            return Some(0);
        }
        Some(self.cut_chain.variations_at_neg_inf() - self.cut_chain.variations_at(x))
    }

    /// Number of real points of the curve over a non-critical `x`.
    pub fn branch_count(&self, x: &Rational) -> usize {
        let slice = self.core_slice(x);
        if slice.is_zero() {
            return 0;
        }
        count_real_roots(&slice).unwrap_or(0)
    }

    fn core_slice(&self, x: &Rational) -> UPoly {
        let name = self.core.vars()[0].clone();
        self.core
            .substitute(&name, x)
            .expect("x present")
            .to_univariate(0)
            .expect("univariate in y")
    }

    /// A rational strictly inside each cell, in cell order.
    pub fn cell_samples(&self) -> Vec<Rational> {
        let one = Rational::from_integer(1.into());
        let vals: Vec<IsolatingInterval> = self.critical.values.iter().map(|v| v.interval.clone()).collect();
        if vals.is_empty() {
            return vec![Rational::zero()];
        }
        let mut out = vec![&vals[0].lower - &one];
        for w in vals.windows(2) {
            out.push(self.separator(w[0].clone(), w[1].clone()));
        }
        out.push(&vals[vals.len() - 1].upper + &one);
        out
    }

    /// A rational strictly between the roots isolated by `left < right`.
    fn separator(&self, mut left: IsolatingInterval, mut right: IsolatingInterval) -> Rational {
        let two = Rational::from_integer(2.into());
        loop {
            if left.upper < right.lower {
                return (&left.upper + &right.lower) / &two;
            }
            for iv in [&mut left, &mut right] {
                if iv.exact_hit.is_none() {
                    let mid = (&iv.lower + &iv.upper) / &two;
                    if self.cut_chain.count_between(&iv.lower, &mid) == 1 {
                        iv.upper = mid;
                    } else {
                        iv.lower = mid;
                    }
                }
            }
        }
    }

    /// Structural piece bound: sum over cells of the branch count, plus one
    /// piece per vertical line.
    pub fn piece_bound(&self) -> usize {
        let branches: usize = self.cell_samples().iter().map(|x| self.branch_count(x)).sum();
        let lines = self
            .critical
            .values
            .iter()
            .filter(|v| v.tags.contains(&CriticalTag::VerticalLine))
            .count();
        branches + lines
    }

    /// Label of a point known to lie on the curve.
    pub fn label(&self, x: &Rational, y: &Rational) -> Label {
        if !self.vertical.is_zero() && self.vertical.eval(x).is_zero() {
            return Label::Vertical { x: x.clone() };
        }
        match self.cell_of(x) {
            None => Label::Residual,
            Some(cell) => {
                let branch = count_roots_below(&self.core_slice(x), y).expect("nonzero slice");
                Label::Branch { cell, branch }
            }
        }
    }
}

/// Cut points of the monotone decomposition of `g`.
pub fn critical_x_values(g: &Poly) -> Result<CriticalValueSet> {
    let d = Decomposition::new(g)?;
    if !d.core.depends_on(1) {
        return Err(Error::PureVertical);
    }
    Ok(d.critical)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Label {
    /// `branch`-th real root from below over open cell `cell`.
    Branch { cell: usize, branch: usize },
    /// Vertical line `x = const`.
    Vertical {
        #[serde(serialize_with = "crate::report::ser_rational")]
        x: Rational,
    },
    /// Point in a critical column.
    Residual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
    Vertical,
}

#[derive(Clone, Debug)]
pub struct PieceAssignment {
    pub points: Vec<(Rational, Rational)>,
    pub labels: Vec<Label>,
    /// Direction of every non-residual piece that holds a point.
    pub directions: BTreeMap<Label, Direction>,
}

impl PieceAssignment {
    /// Point indices per non-residual piece, sorted by `(x, y)`.
    pub fn pieces(&self) -> BTreeMap<Label, Vec<usize>> {
        let mut out: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
        for (i, l) in self.labels.iter().enumerate() {
            if *l != Label::Residual {
                out.entry(l.clone()).or_default().push(i);
            }
        }
        for members in out.values_mut() {
            members.sort_by(|&a, &b| self.points[a].cmp(&self.points[b]));
        }
        out
    }

    pub fn residual(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == Label::Residual)
            .collect()
    }

    pub fn piece_count(&self) -> usize {
        self.directions.len()
    }
}

fn direction_of(points: &[(Rational, Rational)], members: &[usize], label: &Label) -> Direction {
    if matches!(label, Label::Vertical { .. }) {
        return Direction::Vertical;
    }
    let (first, last) = (&points[members[0]].1, &points[*members.last().unwrap()].1);
    match first.cmp(last) {
        std::cmp::Ordering::Less => Direction::Increasing,
        std::cmp::Ordering::Greater => Direction::Decreasing,
        std::cmp::Ordering::Equal => Direction::Constant,
    }
}

/// Assigns each point of `Z(g)` to its monotone piece.
pub fn assign_branches(
    decomposition: &Decomposition,
    g: &Poly,
    points: &[(Rational, Rational)],
) -> Result<PieceAssignment> {
    let mut labels = Vec::with_capacity(points.len());
    for (x, y) in points {
        if !g.evaluate(&[x.clone(), y.clone()])?.is_zero() {
            return Err(Error::OffCurve(x.to_string(), y.to_string()));
        }
        labels.push(decomposition.label(x, y));
    }
    let mut out = PieceAssignment {
        points: points.to_vec(),
        labels,
        directions: BTreeMap::new(),
    };
    out.directions = out
        .pieces()
        .into_iter()
        .map(|(l, m)| {
            let d = direction_of(&out.points, &m, &l);
            (l, d)
        })
        .collect();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityAudit {
    pub ok: bool,
    pub violations: Vec<Label>,
}

/// Checks every piece against its recorded direction: graph pieces need
/// strictly increasing `x` and weakly monotone `y`; vertical pieces need a
/// single `x`.
pub fn monotonicity_audit(assignment: &PieceAssignment) -> MonotonicityAudit {
    let mut violations = Vec::new();
    for (label, members) in assignment.pieces() {
        let pts: Vec<&(Rational, Rational)> = members.iter().map(|&i| &assignment.points[i]).collect();
        let ok = match assignment.directions.get(&label) {
            None => false,
            Some(Direction::Vertical) => pts.windows(2).all(|w| w[0].0 == w[1].0),
            Some(dir) => pts.windows(2).all(|w| {
                w[0].0 < w[1].0
                    && match dir {
                        Direction::Increasing => w[0].1 <= w[1].1,
                        Direction::Decreasing => w[0].1 >= w[1].1,
                        _ => w[0].1 == w[1].1,
                    }
            }),
        };
        if !ok {
            violations.push(label);
        }
    }
    MonotonicityAudit {
        ok: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{frac, int};
    use crate::expr::parse_over;

    fn g2(s: &str) -> Poly {
        parse_over(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn circle_critical_values() {
        let c = critical_x_values(&g2("x^2 + y^2 - 1")).unwrap();
        assert_eq!(c.rational_values(), vec![int(-1), int(0), int(1)]);
        assert!(c.values[0].tags.contains(&CriticalTag::VerticalTangent));
        assert!(c.values[1].tags.contains(&CriticalTag::HorizontalTangent));
    }

    #[test]
    fn cubic_and_parabola() {
        assert_eq!(
            critical_x_values(&g2("y - x^3")).unwrap().rational_values(),
            vec![int(0)]
        );
        assert_eq!(
            critical_x_values(&g2("y^2 - x")).unwrap().rational_values(),
            vec![int(0)]
        );
    }

    #[test]
    fn pure_vertical_rejected() {
        assert_eq!(critical_x_values(&g2("x^2 - 4")).err(), Some(Error::PureVertical));
        assert_eq!(
            critical_x_values(&Poly::zero(&["x", "y"])).err(),
            Some(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn irrational_cut_points() {
        // leading coefficient vanishes at ±√2; y = 1/(x^2 - 2) is flat at 0
        let c = critical_x_values(&g2("(x^2 - 2)*y - 1")).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.rational_values(), vec![int(0)]);
        assert!(c.values[0].tags.contains(&CriticalTag::LeadingVanish));
        assert_eq!(c.values[1].tags, vec![CriticalTag::HorizontalTangent]);
    }

    #[test]
    fn circle_branches() {
        let g = g2("x^2 + y^2 - 1");
        let d = Decomposition::new(&g).unwrap();
        let pts = vec![
            (frac(3, 5), frac(4, 5)),
            (frac(3, 5), frac(-4, 5)),
            (int(1), int(0)),
        ];
        let a = assign_branches(&d, &g, &pts).unwrap();
        assert_eq!(a.labels[0], Label::Branch { cell: 2, branch: 1 });
        assert_eq!(a.labels[1], Label::Branch { cell: 2, branch: 0 });
        assert_eq!(a.labels[2], Label::Residual);
        assert!(assign_branches(&d, &g, &[(int(0), int(0))]).is_err());
    }

    #[test]
    fn cubic_single_branch() {
        let g = g2("y - x^3");
        let d = Decomposition::new(&g).unwrap();
        let pts: Vec<_> = (1..5).map(|t| (int(t), int(t * t * t))).collect();
        let a = assign_branches(&d, &g, &pts).unwrap();
        assert_eq!(a.piece_count(), 1);
        assert_eq!(a.directions.values().next(), Some(&Direction::Increasing));
        assert!(monotonicity_audit(&a).ok);
    }

    fn circle_points(n: i64) -> Vec<(Rational, Rational)> {
        (0..n)
            .map(|i| {
                let t = frac(i - n / 2, 7);
                let d = &t * &t + int(1);
                ((int(1) - &t * &t) / &d, int(2) * &t / &d)
            })
            .collect()
    }

    #[test]
    fn circle_audit_and_tamper() {
        let g = g2("x^2 + y^2 - 1");
        let d = Decomposition::new(&g).unwrap();
        let pts = circle_points(40);
        let mut a = assign_branches(&d, &g, &pts).unwrap();
        assert!(monotonicity_audit(&a).ok);
        assert!(a.piece_count() <= d.piece_bound());
        // move one upper-branch point onto the lower branch of its cell
        let i = (0..pts.len())
            .find(|&i| matches!(a.labels[i], Label::Branch { branch: 1, .. }))
            .unwrap();
        if let Label::Branch { cell, .. } = a.labels[i] {
            a.labels[i] = Label::Branch { cell, branch: 0 };
        }
        let lower = a.pieces().into_keys().any(|l| a.labels[i] == l);
        assert!(lower);
        assert!(!monotonicity_audit(&a).ok);
    }

    #[test]
    fn empty_assignment_passes() {
        let g = g2("y - x");
        let d = Decomposition::new(&g).unwrap();
        let a = assign_branches(&d, &g, &[]).unwrap();
        assert!(monotonicity_audit(&a).ok);
    }

    #[test]
    fn vertical_lines_and_horizontal_factors() {
        // (x - 1) * (y - 2) * (y - x): a vertical line, a horizontal line, a diagonal
        let g = g2("(x - 1)*(y - 2)*(y - x)");
        let d = Decomposition::new(&g).unwrap();
        let pts = vec![
            (int(1), int(5)),
            (int(1), int(-3)),
            (int(3), int(2)),
            (int(4), int(2)),
            (int(3), int(3)),
            (int(4), int(4)),
        ];
        let a = assign_branches(&d, &g, &pts).unwrap();
        assert_eq!(a.labels[0], Label::Vertical { x: int(1) });
        assert_eq!(a.labels[0], a.labels[1]);
        assert_eq!(a.directions[&a.labels[2]], Direction::Constant);
        assert_eq!(a.directions[&a.labels[4]], Direction::Increasing);
        assert!(monotonicity_audit(&a).ok);
    }

    #[test]
    fn branch_count_constant_per_cell() {
        let g = g2("y^3 - 3*x*y + x^3 - 1/2");
        let d = Decomposition::new(&g).unwrap();
        for (cell, s) in d.cell_samples().iter().enumerate() {
            assert_eq!(d.cell_of(s), Some(cell));
        }
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for k in -140..140 {
            let x = frac(k, 37);
            if let Some(cell) = d.cell_of(&x) {
                let n = d.branch_count(&x);
                assert_eq!(*seen.entry(cell).or_insert(n), n);
            }
        }
        assert!(seen.len() >= 3);
    }
}
