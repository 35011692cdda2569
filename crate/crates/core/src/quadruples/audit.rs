//! Re-validation of extracted quadruples and tuples from raw data only.
//!
//! Deliberately self-contained: indices are recomputed by ranking, forbidden
//! sets are read from plain maps and membership from plain point sets, so a
//! defect in the extractor cannot hide itself here.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use super::{ProximateQuadruple, ProximateTuple5};
use crate::algebra::Rational;

pub type RawForbid = BTreeMap<Rational, BTreeSet<Rational>>;

#[derive(Clone, Debug, Default, Serialize)]
pub struct AuditReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Rank of `v` in a strictly increasing `set`, or `None` if absent.
fn rank(set: &[Rational], v: &Rational) -> Option<usize> {
    set.binary_search(v).ok()
}

fn check_sorted(name: &str, set: &[Rational], failures: &mut Vec<String>) {
    if set.windows(2).any(|w| w[0] >= w[1]) {
        failures.push(format!(
            "{name} is not strictly increasing; ranks are meaningless"
        ));
    }
}

fn forbidden(map: &RawForbid, key: &Rational, value: &Rational) -> bool {
    map.get(key).is_some_and(|s| s.contains(value))
}

/// Sets and limits shared by both audits.
pub struct AuditFrame<'a> {
    pub a: &'a [Rational],
    pub b: &'a [Rational],
    pub forbid_a: &'a RawForbid,
    pub forbid_b: &'a RawForbid,
    pub limit_a: &'a Rational,
    pub limit_b: &'a Rational,
}

impl AuditFrame<'_> {
    fn check_sets(&self, failures: &mut Vec<String>) {
        check_sorted("A", self.a, failures);
        check_sorted("B", self.b, failures);
    }

    fn check_pair_data(
        &self,
        tag: &str,
        (a, a2, b, b2): (&Rational, &Rational, &Rational, &Rational),
        (gap_a, gap_b): (usize, usize),
        failures: &mut Vec<String>,
    ) {
        if forbidden(self.forbid_a, a, a2) {
            failures.push(format!("{tag}: a' = {a2} is in Forbid({a})"));
        }
        if forbidden(self.forbid_b, b, b2) {
            failures.push(format!("{tag}: b' = {b2} is in Forbid({b})"));
        }
        for (name, set, x, y, stored, limit) in [
            ("A", self.a, a, a2, gap_a, self.limit_a),
            ("B", self.b, b, b2, gap_b, self.limit_b),
        ] {
            match (rank(set, x), rank(set, y)) {
                (Some(i), Some(j)) => {
                    let gap = i.abs_diff(j);
                    if gap != stored {
                        failures.push(format!("{tag}: stored {name}-gap {stored}, actual {gap}"));
                    }
                    if Rational::from_integer(gap.into()) > *limit {
                        failures.push(format!("{tag}: {name}-gap {gap} exceeds {limit}"));
                    }
                }
                _ => failures.push(format!("{tag}: element outside {name}")),
            }
        }
    }

    pub fn audit_quadruples(
        &self,
        quads: &[ProximateQuadruple],
        points: &[(Rational, Rational)],
    ) -> AuditReport {
        let members: HashSet<&(Rational, Rational)> = points.iter().collect();
        let mut failures = Vec::new();
        self.check_sets(&mut failures);
        let mut seen = HashSet::new();
        for (n, q) in quads.iter().enumerate() {
            let tag = format!("quadruple {n}");
            for p in [(q.a.clone(), q.b.clone()), (q.a2.clone(), q.b2.clone())] {
                if !members.contains(&p) {
                    failures.push(format!("{tag}: ({}, {}) not in G", p.0, p.1));
                }
            }
            self.check_pair_data(
                &tag,
                (&q.a, &q.a2, &q.b, &q.b2),
                (q.gap_a, q.gap_b),
                &mut failures,
            );
            if !seen.insert((&q.a, &q.a2, &q.b, &q.b2)) {
                failures.push(format!("{tag}: duplicate"));
            }
        }
        AuditReport {
            checked: quads.len(),
            failures,
        }
    }

    pub fn audit_tuples(
        &self,
        tuples: &[ProximateTuple5],
        points: &[(Rational, Rational, Rational)],
    ) -> AuditReport {
        let members: HashSet<&(Rational, Rational, Rational)> = points.iter().collect();
        let mut failures = Vec::new();
        self.check_sets(&mut failures);
        let mut seen = HashSet::new();
        for (n, t) in tuples.iter().enumerate() {
            let tag = format!("tuple {n}");
            for p in [
                (t.a.clone(), t.b.clone(), t.c.clone()),
                (t.a2.clone(), t.b2.clone(), t.c.clone()),
            ] {
                if !members.contains(&p) {
                    failures.push(format!("{tag}: ({}, {}, {}) not in G", p.0, p.1, p.2));
                }
            }
            self.check_pair_data(
                &tag,
                (&t.a, &t.a2, &t.b, &t.b2),
                (t.gap_a, t.gap_b),
                &mut failures,
            );
            if !seen.insert((&t.a, &t.a2, &t.b, &t.b2, &t.c)) {
                failures.push(format!("{tag}: duplicate"));
            }
        }
        AuditReport {
            checked: tuples.len(),
            failures,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    #[test]
    fn detects_each_violation_kind() {
        let a: Vec<Rational> = (1..=4).map(int).collect();
        let mut fa = RawForbid::new();
        fa.entry(int(1)).or_default().insert(int(3));
        let fb = RawForbid::new();
        let lim = int(1);
        let frame = AuditFrame {
            a: &a,
            b: &a,
            forbid_a: &fa,
            forbid_b: &fb,
            limit_a: &lim,
            limit_b: &lim,
        };
        let pts: Vec<_> = (1..=4).map(|i| (int(i), int(i))).collect();
        let good = ProximateQuadruple {
            a: int(1),
            a2: int(2),
            b: int(1),
            b2: int(2),
            gap_a: 1,
            gap_b: 1,
        };
        assert!(frame.audit_quadruples(std::slice::from_ref(&good), &pts).ok());
        let forbidden = ProximateQuadruple {
            a2: int(3),
            b2: int(3),
            gap_a: 2,
            gap_b: 2,
            ..good.clone()
        };
        let r = frame.audit_quadruples(&[forbidden], &pts);
        assert!(r.failures.iter().any(|f| f.contains("Forbid")));
        assert!(r.failures.iter().any(|f| f.contains("exceeds")));
        let off = ProximateQuadruple {
            b2: int(1),
            gap_b: 0,
            ..good.clone()
        };
        assert!(frame.audit_quadruples(&[off], &pts).failures[0].contains("not in G"));
        let lying = ProximateQuadruple {
            gap_a: 0,
            ..good.clone()
        };
        assert!(!frame.audit_quadruples(&[lying], &pts).ok());
        assert!(!frame.audit_quadruples(&[good.clone(), good.clone()], &pts).ok());
        let unsorted: Vec<Rational> = a.iter().rev().cloned().collect();
        let frame = AuditFrame {
            a: &unsorted,
            ..frame
        };
        assert!(!frame.audit_quadruples(&[good], &pts).ok());
    }
}
