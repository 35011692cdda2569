use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use proxgrid::algebra::rational::int;
use proxgrid::algebra::{Poly, Rational};
use proxgrid::apps::{self, ExperimentRecord, ExponentSeries, PlanarPoint};
use proxgrid::dual::verify_chain;
use proxgrid::expander::{growth_experiment, growth_summary, separability_test, Family, Separability};
use proxgrid::expr::parse_over;
use proxgrid::grid::{
    curve_points, gen_extremal_additive, intersect_grid, schwartz_zippel_audit, GridReport, IndexedSet,
    SchwartzZippelAudit,
};
use proxgrid::io::{parse_points, parse_values, read_points, read_set};
use proxgrid::quadruples::audit::{AuditFrame, AuditReport};
use proxgrid::quadruples::{
    extract_curve_quadruples, extract_tuples_from_grid, quadruples_csv, tuples_csv, ForbidMap, QuadrupleRun,
    TupleRun,
};
use proxgrid::report::{ser_poly, ser_rational, to_json, SCHEMA_VERSION};
use proxgrid::{Error, Result};

use crate::{Anchors, Cli, Command, Format, PointFamily, SetFamily, Sets};

const XY: [&str; 2] = ["x", "y"];
const XYZ: [&str; 3] = ["x", "y", "z"];

/// Rendered report plus the names of failed checks.
pub struct Outcome {
    pub text: String,
    pub failed: Vec<String>,
}

fn failed_names<'a>(checks: impl IntoIterator<Item = (&'a str, bool)>) -> Vec<String> {
    checks
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(k, _)| k.to_string())
        .collect()
}

fn render<T: Serialize>(format: Format, value: &T, csv: Option<String>) -> Result<String> {
    match (format, csv) {
        (Format::Json, _) => Ok(to_json(value)),
        (Format::Csv, Some(text)) => Ok(text),
        (Format::Csv, None) => Err(Error::InvalidArgument("this command has no CSV output".into())),
    }
}

fn resolve_sets(sets: &Sets, roles: usize) -> Result<Vec<IndexedSet>> {
    if let Some(n) = sets.n {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        return Ok(vec![IndexedSet::range(1, n as i64); roles]);
    }
    let read: Vec<IndexedSet> = sets.sets.iter().map(|p| read_set(p)).collect::<Result<_>>()?;
    match read.len() {
        1 => Ok(vec![read[0].clone(); roles]),
        k if k == roles => Ok(read),
        k => Err(Error::InvalidArgument(format!(
            "expected 1 or {roles} set files, got {k}"
        ))),
    }
}

fn parse_rational(text: &str, what: &str) -> Result<Rational> {
    match parse_values(text)?[..] {
        [ref r] => Ok(r.clone()),
        _ => Err(Error::InvalidArgument(format!(
            "{what}: expected one rational, got `{text}`"
        ))),
    }
}

fn parse_point(text: &str) -> Result<PlanarPoint> {
    match parse_points(text)?[..] {
        [ref p] => Ok(p.clone()),
        _ => Err(Error::InvalidArgument(format!(
            "expected a point `x y`, got `{text}`"
        ))),
    }
}

fn anchor_points(a: &Anchors) -> Result<[PlanarPoint; 3]> {
    Ok([parse_point(&a.p1)?, parse_point(&a.p2)?, parse_point(&a.p3)?])
}

/// `--Ns` if given, else `--N`.
fn sizes(n: Option<usize>, ns: &[usize]) -> Result<Vec<usize>> {
    let out = if ns.is_empty() {
        n.into_iter().collect()
    } else {
        ns.to_vec()
    };
    if out.is_empty() {
        return Err(Error::InvalidArgument(
            "one of --N, --Ns or --points is required".into(),
        ));
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("sizes must be strictly increasing".into()));
    }
    Ok(out)
}

/// One record per size; the last one carries the exponent series.
fn series_record(
    ns: &[usize],
    mut run: impl FnMut(usize) -> Result<ExperimentRecord>,
) -> Result<ExperimentRecord> {
    let mut pairs = Vec::with_capacity(ns.len());
    let mut last = None;
    let mut failed = false;
    for &n in ns {
        let rec = run(n)?;
        pairs.push((n, rec.exact_count));
        failed |= !rec.passed();
        last = Some(rec);
    }
    let mut rec = last.expect("nonempty sizes");
    if failed {
        rec.checks.insert("all_sizes_passed", false);
    }
    if ns.len() > 1 {
        rec = rec.with_series(ExponentSeries::from_counts(&pairs));
    }
    Ok(rec)
}

fn experiment(format: Format, rec: ExperimentRecord) -> Result<Outcome> {
    Ok(Outcome {
        failed: failed_names(rec.checks.iter().map(|(k, v)| (*k, *v))),
        text: render(format, &rec, None)?,
    })
}

#[derive(Serialize)]
struct CountReport {
    #[serde(flatten)]
    grid: GridReport,
    schwartz_zippel: SchwartzZippelAudit,
}

#[derive(Serialize)]
struct ExtremalReport {
    schema: u32,
    #[serde(rename = "N")]
    n: usize,
    count: usize,
    closed_form: usize,
    #[serde(serialize_with = "ser_rational")]
    guarantee: Rational,
    #[serde(serialize_with = "ser_rational")]
    quarter_n_squared: Rational,
    checks: BTreeMap<&'static str, bool>,
}

#[derive(Serialize)]
struct QuadruplesReport {
    schema: u32,
    #[serde(serialize_with = "ser_poly")]
    curve: Poly,
    run: QuadrupleRun,
    audit: AuditReport,
    checks: BTreeMap<&'static str, bool>,
}

#[derive(Serialize)]
struct TuplesReport {
    schema: u32,
    #[serde(serialize_with = "ser_poly")]
    surface: Poly,
    run: TupleRun,
    audit: AuditReport,
    checks: BTreeMap<&'static str, bool>,
}

#[derive(Serialize)]
struct DetectReport {
    schema: u32,
    #[serde(serialize_with = "ser_poly")]
    h: Poly,
    #[serde(flatten)]
    result: Separability,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut out = dispatch(cli)?;
    if cli.inject_violation {
        out.failed.push("injected_violation".into());
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::Count { poly, sets } => {
            let f = parse_over(poly, &XYZ)?;
            let s = resolve_sets(sets, 3)?;
            let g = intersect_grid(&f, &s[0], &s[1], &s[2])?;
            let report = CountReport {
                grid: g.report(),
                schwartz_zippel: schwartz_zippel_audit(&g),
            };
            Ok(Outcome {
                failed: failed_names([("schwartz_zippel", report.schwartz_zippel.holds != Some(false))]),
                text: render(format, &report, Some(g.to_csv()))?,
            })
        }
        Command::Extremal { n } => {
            let w = gen_extremal_additive(*n)?;
            let report = ExtremalReport {
                schema: SCHEMA_VERSION,
                n: *n,
                count: w.count,
                closed_form: w.closed_form,
                guarantee: w.guarantee(),
                quarter_n_squared: Rational::new((n * n).into(), 4.into()),
                checks: BTreeMap::from([
                    ("closed_form", w.count == w.closed_form),
                    ("meets_guarantee", w.meets_guarantee()),
                ]),
            };
            Ok(Outcome {
                failed: failed_names(report.checks.iter().map(|(k, v)| (*k, *v))),
                text: render(format, &report, None)?,
            })
        }
        Command::Quadruples { poly, sets, s } => {
            let g = parse_over(poly, &XY)?;
            let sets = resolve_sets(sets, 2)?;
            let (a, b) = (&sets[0], &sets[1]);
            let points = curve_points(&g, a, b)?;
            if points.is_empty() {
                return Err(Error::EmptyGrid);
            }
            let (fa, fb) = (ForbidMap::empty(a), ForbidMap::empty(b));
            let run = extract_curve_quadruples(&g, a, b, &points, *s, &fa, &fb)?;
            let audit = AuditFrame {
                a: a.elements(),
                b: b.elements(),
                forbid_a: fa.raw(),
                forbid_b: fb.raw(),
                limit_a: &run.limit_a,
                limit_b: &run.limit_b,
            }
            .audit_quadruples(&run.quadruples, &points);
            let accounted = int((run.stats.emitted + run.stats.blocked) as i64);
            let checks = BTreeMap::from([
                ("audit", audit.ok()),
                ("quadruple_ledger", accounted >= run.guarantee),
            ]);
            let failed = failed_names(checks.iter().map(|(k, v)| (*k, *v)));
            let csv = quadruples_csv(&run.quadruples);
            let report = QuadruplesReport {
                schema: SCHEMA_VERSION,
                curve: g,
                run,
                audit,
                checks,
            };
            Ok(Outcome {
                failed,
                text: render(format, &report, Some(csv))?,
            })
        }
        Command::Tuples { poly, sets, s } => {
            let f = parse_over(poly, &XYZ)?;
            let sets = resolve_sets(sets, 3)?;
            let g = intersect_grid(&f, &sets[0], &sets[1], &sets[2])?;
            let (fa, fb) = (ForbidMap::empty(&sets[0]), ForbidMap::empty(&sets[1]));
            let run = extract_tuples_from_grid(&g, *s, &fa, &fb)?;
            let points: Vec<(Rational, Rational, Rational)> = g
                .triples
                .iter()
                .map(|t| {
                    let [x, y, z] = g.point(t);
                    (x, y, z)
                })
                .collect();
            let audit = AuditFrame {
                a: sets[0].elements(),
                b: sets[1].elements(),
                forbid_a: fa.raw(),
                forbid_b: fb.raw(),
                limit_a: &run.limit_a,
                limit_b: &run.limit_b,
            }
            .audit_tuples(&run.tuples, &points);
            let accounted = int((run.stats.emitted + run.stats.blocked) as i64);
            let checks = BTreeMap::from([
                ("audit", audit.ok()),
                ("tuple_ledger", accounted >= run.guarantee),
            ]);
            let failed = failed_names(checks.iter().map(|(k, v)| (*k, *v)));
            let csv = tuples_csv(&run.tuples);
            let report = TuplesReport {
                schema: SCHEMA_VERSION,
                surface: f,
                run,
                audit,
                checks,
            };
            Ok(Outcome {
                failed,
                text: render(format, &report, Some(csv))?,
            })
        }
        Command::Chain { poly, sets, s, k } => {
            let f = parse_over(poly, &XYZ)?;
            let sets = resolve_sets(sets, 3)?;
            let k = k.as_deref().map(|t| parse_rational(t, "--K")).transpose()?;
            if k.as_ref().is_some_and(|k| k <= &Rational::zero()) {
                return Err(Error::InvalidArgument("K must be positive".into()));
            }
            let report = verify_chain(&f, &sets[0], &sets[1], &sets[2], *s, k)?;
            Ok(Outcome {
                failed: report.failed_checks().into_iter().map(String::from).collect(),
                text: render(format, &report, None)?,
            })
        }
        Command::Expand {
            poly,
            family,
            ns,
            seed,
        } => {
            let h = parse_over(poly, &XY)?;
            let family = match family {
                SetFamily::Interval => Family::Interval,
                SetFamily::Geometric => Family::Geometric,
                SetFamily::Random => Family::Random { seed: *seed },
            };
            let series = growth_experiment(&h, family, ns)?;
            let summary = growth_summary(&h, family, &series)?;
            Ok(Outcome {
                failed: Vec::new(),
                text: render(format, &summary, Some(series.to_csv()))?,
            })
        }
        Command::Detect { poly } => {
            let h = parse_over(poly, &XY)?;
            let report = DetectReport {
                schema: SCHEMA_VERSION,
                result: separability_test(&h)?,
                h,
            };
            Ok(Outcome {
                failed: Vec::new(),
                text: render(format, &report, None)?,
            })
        }
        Command::AppTwoLines { cos_theta, sets } => {
            let cos = parse_rational(cos_theta, "--cos")?;
            let sets = resolve_sets(sets, 2)?;
            experiment(format, apps::two_lines_experiment(&cos, &sets[0], &sets[1])?)
        }
        Command::AppThreePoints {
            anchors,
            points,
            n,
            ns,
            family,
            seed,
        } => {
            let [p1, p2, p3] = anchor_points(anchors)?;
            let rec = match points {
                Some(path) => apps::three_points_experiment(&p1, &p2, &p3, &read_points(path)?)?,
                None => series_record(&sizes(*n, ns)?, |n| {
                    let pts = match family {
                        PointFamily::Random => apps::random_points(n, *seed),
                        PointFamily::Line => apps::line_points(n),
                    };
                    apps::three_points_experiment(&p1, &p2, &p3, &pts)
                })?,
            };
            experiment(format, rec)
        }
        Command::AppCurve { poly, points, n, ns } => {
            let gamma = parse_over(poly, &XY)?;
            let rec = match points {
                Some(path) => apps::curve_distance_experiment(&gamma, &read_points(path)?)?,
                None => series_record(&sizes(*n, ns)?, |n| {
                    apps::curve_distance_experiment(&gamma, &apps::points_on_curve(&gamma, n)?)
                })?,
            };
            experiment(format, rec)
        }
        Command::AppCircles { anchors, n, ns } => {
            let [p1, p2, p3] = anchor_points(anchors)?;
            let rec = series_record(&sizes(*n, ns)?, |n| {
                let t = apps::default_params(n);
                apps::unit_circle_triple_points([&p1, &p2, &p3], [&t, &t, &t])
            })?;
            experiment(format, rec)
        }
    }
}
