//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails. Every instance is drawn from a fixed seed.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use proxgrid::algebra::rational::{frac, int};
use proxgrid::algebra::{resultant, Poly, Rational};
use proxgrid::apps::{cayley_menger_surface, orientation, random_points, PlanarPoint};
use proxgrid::dual::{verify_chain, ChainReport};
use proxgrid::expander::{affine_image, growth_experiment, separability_test, Family, Verdict};
use proxgrid::expr::parse_over;
use proxgrid::grid::{gen_extremal_additive, intersect_grid, schwartz_zippel_audit, IndexedSet};
use proxgrid::quadruples::audit::AuditFrame;
use proxgrid::quadruples::{extract_monotone_quadruples, extract_tuples_from_grid, ForbidMap, TupleRun};
use proxgrid::seed::stage_rng;

const SEED: u64 = 20_240_601;
const XYZ: [&str; 3] = ["x", "y", "z"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(stage: &str) -> ChaCha8Rng {
    stage_rng(SEED, stage)
}

fn f3(s: &str) -> Poly {
    parse_over(s, &XYZ).unwrap()
}

/// Random polynomial over `vars` of total degree at most `deg`.
fn random_poly(rng: &mut ChaCha8Rng, vars: &[&str], deg: u32, terms: usize) -> Poly {
    let mut out = Poly::zero(vars);
    for _ in 0..terms {
        let mut e = vec![0u32; vars.len()];
        let mut budget = rng.gen_range(0..=deg);
        while budget > 0 {
            e[rng.gen_range(0..vars.len())] += 1;
            budget -= 1;
        }
        out.add_term(e, int(rng.gen_range(-5..=5)));
    }
    out
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> IndexedSet {
    let mut pool: Vec<i64> = (lo..=hi).collect();
    pool.shuffle(rng);
    IndexedSet::from_ints(pool.into_iter().take(n)).unwrap()
}

fn schwartz_zippel() -> Outcome {
    let mut rng = rng("acceptance/schwartz-zippel");
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for t in 0..50 {
        let n = rng.gen_range(1..=20);
        let f = loop {
            let f = if rng.gen_bool(0.5) {
                // graph surfaces have many grid points
                &Poly::var(&XYZ, "z").unwrap()
                    - &random_poly(&mut rng, &["x", "y"], 3, 4)
                        .embed(&XYZ.map(String::from))
                        .unwrap()
            } else {
                random_poly(&mut rng, &XYZ, 3, 6)
            };
            if !f.is_zero() {
                break f;
            }
        };
        let sets: Vec<IndexedSet> = (0..3).map(|_| random_set(&mut rng, n, -12, 12)).collect();
        let g = intersect_grid(&f, &sets[0], &sets[1], &sets[2]).unwrap();
        let audit = schwartz_zippel_audit(&g);
        worst = worst.max(audit.ratio);
        if audit.holds != Some(true) {
            failures.push(format!("instance {t}: |G| = {} > {}", audit.count, audit.ceiling));
        }
    }
    outcome(
        failures.is_empty(),
        format!("50 instances, max |G|/ceiling = {worst:.3} {failures:?}"),
    )
}

fn extremal_witness() -> Outcome {
    let mut failures = Vec::new();
    for n in 2..=512usize {
        let w = gen_extremal_additive(n).unwrap();
        if !w.meets_guarantee() {
            failures.push(format!("N = {n}: {} < (N-2)²/8", w.count));
        }
        if n >= 4 && 4 * w.count < n * n {
            failures.push(format!("N = {n}: {} < N²/4", w.count));
        }
        if w.count != w.closed_form {
            failures.push(format!(
                "N = {n}: count {} differs from closed form {}",
                w.count, w.closed_form
            ));
        }
        if n <= 24 {
            let g = intersect_grid(&w.f, &w.a, &w.b, &w.c).unwrap();
            if g.len() != w.count {
                failures.push(format!(
                    "N = {n}: grid oracle {} differs from {}",
                    g.len(),
                    w.count
                ));
            }
        }
    }
    outcome(failures.is_empty(), format!("N = 2..512 {failures:?}"))
}

fn lemma_scan() -> Outcome {
    let mut rng = rng("acceptance/scan");
    let mut failures = Vec::new();
    let (mut largest, mut emitted, mut blocked) = (0, 0, 0);
    for t in 0..200 {
        // log-uniform |G| in [2, 10^4]
        let g = (2f64 * 5000f64.powf(rng.gen::<f64>())).round() as usize;
        let s = rng.gen_range(1..=8usize);
        let na = rng.gen_range(g..=2 * g);
        let nb = rng.gen_range(1..=2 * g);
        let a = IndexedSet::range(0, na as i64 - 1);
        let b = IndexedSet::range(0, nb as i64 - 1);
        let mut ai: Vec<usize> = rand::seq::index::sample(&mut rng, na, g).into_vec();
        ai.sort_unstable();
        let mut bi: Vec<usize> = (0..g).map(|_| rng.gen_range(0..nb)).collect();
        bi.sort_unstable();
        if rng.gen_bool(0.5) {
            bi.reverse();
        }
        let forbid = |rng: &mut ChaCha8Rng, set: &IndexedSet| {
            let keys = rng.gen_range(0..=set.len().min(64));
            let entries: Vec<(Rational, Vec<Rational>)> = (0..keys)
                .map(|_| {
                    let k = rng.gen_range(0..set.len());
                    let size = rng.gen_range(0..s).min(set.len());
                    let vals = rand::seq::index::sample(rng, set.len(), size)
                        .into_iter()
                        .map(|j| set.get(j).clone())
                        .collect();
                    (set.get(k).clone(), vals)
                })
                // one draw per key keeps every set below S
                .collect::<BTreeMap<_, _>>()
                .into_iter()
                .collect();
            ForbidMap::new(set, entries).unwrap()
        };
        let fa = forbid(&mut rng, &a);
        let fb = forbid(&mut rng, &b);
        let piece: Vec<(Rational, Rational)> = ai
            .iter()
            .zip(&bi)
            .map(|(&i, &j)| (a.get(i).clone(), b.get(j).clone()))
            .collect();
        let run = extract_monotone_quadruples(&piece, &a, &b, s, &fa, &fb).unwrap();
        let frame = AuditFrame {
            a: a.elements(),
            b: b.elements(),
            forbid_a: fa.raw(),
            forbid_b: fb.raw(),
            limit_a: &run.limit_a,
            limit_b: &run.limit_b,
        };
        let audit = frame.audit_quadruples(&run.quadruples, &piece);
        if !audit.ok() {
            failures.push(format!("config {t}: {}", audit.failures[0]));
        }
        if !run.meets_guarantee() {
            failures.push(format!(
                "config {t}: |G| = {g}, S = {s}: {} < {} ({} blocked)",
                run.stats.emitted, run.guarantee, run.stats.blocked
            ));
        }
        largest = largest.max(g);
        emitted += run.stats.emitted;
        blocked += run.stats.blocked;
    }
    outcome(
        failures.is_empty(),
        format!(
            "200 configs, max |G| = {largest}, {emitted} quadruples, {blocked} blocked anchors {failures:?}"
        ),
    )
}

/// Chain runs shared by criteria 4, 5, 6 and 11.
fn chain_runs() -> Vec<(String, ChainReport)> {
    let mut runs = Vec::new();
    let s16 = IndexedSet::range(1, 16);
    let f = f3("z - x^2 - x*y");
    runs.push((
        "z - x^2 - x*y, N = 16".to_string(),
        verify_chain(&f, &s16, &s16, &s16, Some(1), Some(int(4))).unwrap(),
    ));
    let mut rng = rng("acceptance/surfaces");
    while runs.len() < 21 {
        let n = rng.gen_range(8..=24usize);
        let h = random_poly(&mut rng, &["x", "y"], 2, 4);
        if !h.depends_on(0) || !h.depends_on(1) {
            continue;
        }
        let xyz: Vec<String> = XYZ.map(String::from).to_vec();
        let q = if rng.gen_bool(0.5) { "1" } else { "x + 1" };
        let q = parse_over(q, &XYZ).unwrap();
        let f = &(&q * &Poly::var(&XYZ, "z").unwrap()) - &h.embed(&xyz).unwrap();
        let a = random_set(&mut rng, n, 1, 2 * n as i64);
        let b = random_set(&mut rng, n, 1, 2 * n as i64);
        // C holds the N most popular values, so fibers are heavy
        let mut popularity: BTreeMap<Rational, usize> = BTreeMap::new();
        for x in a.elements() {
            for y in b.elements() {
                let v = h.evaluate(&[x.clone(), y.clone()]).unwrap()
                    / q.evaluate(&[x.clone(), int(0), int(0)]).unwrap();
                *popularity.entry(v).or_default() += 1;
            }
        }
        if popularity.len() < n {
            continue;
        }
        let mut ranked: Vec<(Rational, usize)> = popularity.into_iter().collect();
        ranked.sort_by(|l, r| r.1.cmp(&l.1).then_with(|| l.0.cmp(&r.0)));
        let c = IndexedSet::strict(ranked.into_iter().take(n).map(|(v, _)| v)).unwrap();
        // the chain presumes some fiber with two points differing in both
        // coordinates, and a surface outside the special forms
        let g = intersect_grid(&f, &a, &b, &c).unwrap();
        let crossing = (0..c.len()).any(|k| {
            let fiber = g.fiber(k);
            fiber
                .iter()
                .any(|p| fiber.iter().any(|q| p.0 != q.0 && p.1 != q.1))
        });
        if !crossing {
            continue;
        }
        let report = verify_chain(&f, &a, &b, &c, None, None).unwrap();
        if report.warnings.iter().any(|w| w.contains("special-form")) {
            continue;
        }
        runs.push((format!("{f}, N = {n}"), report));
    }
    runs
}

fn heavy_retention(runs: &[(String, ChainReport)]) -> Outcome {
    let bad: Vec<&str> = runs
        .iter()
        .filter(|(_, r)| 2 * r.heavy_retained < r.g || r.checks.get("heavy_retention") != Some(&true))
        .map(|(n, _)| n.as_str())
        .collect();
    outcome(bad.is_empty(), format!("{} chain runs {bad:?}", runs.len()))
}

/// Surfaces `z - h` with many collisions, where the ledger bound is positive.
fn dense_tuple_runs() -> Vec<(String, TupleRun)> {
    let mut rng = rng("acceptance/dense-surfaces");
    let shapes = ["x + {}*y", "{}*x + y^2", "x^2 + {}*y", "x + {}*y + x*y"];
    (0..20)
        .map(|t| {
            let n = rng.gen_range(16..=24usize);
            let k = rng.gen_range(1..=3);
            let h = shapes[t % shapes.len()].replace("{}", &k.to_string());
            let f = f3(&format!("z - ({h})"));
            let s = rng.gen_range(1..=3usize);
            let a = IndexedSet::range(1, n as i64);
            let hp = parse_over(&h, &["x", "y"]).unwrap();
            let mut popularity: BTreeMap<Rational, usize> = BTreeMap::new();
            for x in a.elements() {
                for y in a.elements() {
                    *popularity
                        .entry(hp.evaluate(&[x.clone(), y.clone()]).unwrap())
                        .or_default() += 1;
                }
            }
            let mut ranked: Vec<(Rational, usize)> = popularity.into_iter().collect();
            ranked.sort_by(|l, r| r.1.cmp(&l.1).then_with(|| l.0.cmp(&r.0)));
            let c = IndexedSet::strict(ranked.into_iter().take(n).map(|(v, _)| v)).unwrap();
            let g = intersect_grid(&f, &a, &a, &c).unwrap();
            let e = ForbidMap::empty(&a);
            let run = extract_tuples_from_grid(&g, s, &e, &e).unwrap();
            (format!("{f}, N = {n}, S = {s}"), run)
        })
        .collect()
}

fn tuple_ledger(runs: &[(String, ChainReport)]) -> Outcome {
    let mut bad = Vec::new();
    let mut chain_best: Option<Rational> = None;
    for (name, r) in runs.iter().skip(1) {
        if chain_best.as_ref().is_none_or(|b| r.tuple_guarantee > *b) {
            chain_best = Some(r.tuple_guarantee.clone());
        }
        if int(r.tuples as i64) < r.tuple_guarantee {
            bad.push(format!(
                "{name}: {} < {} (c_dec = {}, S = {}, blocked = {})",
                r.tuples, r.tuple_guarantee, r.constants.c_dec, r.constants.s, r.tuple_stats.blocked
            ));
        }
    }
    let dense = dense_tuple_runs();
    let mut positive = 0;
    let mut tightest = f64::INFINITY;
    for (name, run) in &dense {
        if run.guarantee > Rational::zero() {
            positive += 1;
            tightest =
                tightest.min(run.tuples.len() as f64 / proxgrid::algebra::rational::to_f64(&run.guarantee));
        }
        if !run.meets_guarantee() || run.heavy.retained * 2 < run.g_size {
            bad.push(format!(
                "{name}: {} < {} (c_dec = {})",
                run.tuples.len(),
                run.guarantee,
                run.c_dec
            ));
        }
    }
    let chain_best = chain_best.map_or("none".to_string(), |b| b.to_string());
    outcome(
        bad.is_empty(),
        format!(
            "20 chain surfaces (largest bound {chain_best}), 20 dense surfaces ({positive} with positive bound, \
             min count/bound {tightest:.2}) {bad:?}"
        ),
    )
}

fn incidence_exactness(runs: &[(String, ChainReport)]) -> Outcome {
    let mut bad = Vec::new();
    let mut tuples = 0;
    for (name, r) in runs {
        tuples += r.tuples;
        for key in [
            "tuples_le_incidences",
            "tuples_on_dual_curves",
            "tuples_are_incidences",
            "resultant_necessity",
        ] {
            if r.checks.get(key) != Some(&true) {
                bad.push(format!("{name}: {key}"));
            }
        }
        if r.tuple_incidences > r.i {
            bad.push(format!("{name}: {} > I = {}", r.tuple_incidences, r.i));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} runs, {tuples} tuples {bad:?}", runs.len()),
    )
}

/// `lc · ∏ (z - (r + u·y))` over `[y, z]` and its roots over `[y]`.
fn factored(rng: &mut ChaCha8Rng) -> (Poly, Rational, Vec<Poly>) {
    let yz = ["y", "z"];
    let z = Poly::var(&yz, "z").unwrap();
    let y = Poly::var(&yz, "y").unwrap();
    let lc = loop {
        let v = frac(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        if !v.is_zero() {
            break v;
        }
    };
    let mut p = Poly::constant(&yz, lc.clone());
    let mut roots = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let r = frac(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        let u = int(rng.gen_range(-2..=2));
        p = &p * &(&z - &(&Poly::constant(&yz, r.clone()) + &y.scale(&u)));
        roots.push(&Poly::constant(&["y"], r) + &Poly::var(&["y"], "y").unwrap().scale(&u));
    }
    (p, lc, roots)
}

fn resultant_oracle() -> Outcome {
    let mut rng = rng("acceptance/resultant");
    let mut bad = Vec::new();
    for t in 0..100 {
        let (p, lp, alphas) = factored(&mut rng);
        let (q, lq, betas) = factored(&mut rng);
        let res = resultant(&p, &q, "z").unwrap();
        let mut oracle = Poly::constant(
            &["y"],
            num_traits::pow(lp, betas.len()) * num_traits::pow(lq, alphas.len()),
        );
        for a in &alphas {
            for b in &betas {
                oracle = &oracle * &(a - b);
            }
        }
        if res != oracle {
            bad.push(t);
        }
    }
    outcome(bad.is_empty(), format!("100 factored instances {bad:?}"))
}

fn expander_dichotomy() -> Outcome {
    let ns = [16, 32, 64, 128, 256];
    let sum = growth_experiment(&parse_over("x + y", &["x", "y"]).unwrap(), Family::Interval, &ns).unwrap();
    let prod = growth_experiment(
        &parse_over("x*(x + y)", &["x", "y"]).unwrap(),
        Family::Interval,
        &ns,
    )
    .unwrap();
    // |{a + b}| on {1..N} is 2N - 1
    let closed = sum.entries.iter().all(|e| e.image == 2 * e.size_a - 1);
    let pass = closed && (0.95..=1.05).contains(&sum.fit.slope) && prod.fit.slope >= 1.45;
    let sizes: Vec<usize> = prod.entries.iter().map(|e| e.image).collect();
    outcome(
        pass,
        format!(
            "x+y slope {:.4}, x(x+y) slope {:.4}, x(x+y) images {sizes:?}",
            sum.fit.slope, prod.fit.slope
        ),
    )
}

fn separability_corpus() -> Outcome {
    let xy = ["x", "y"];
    let special = ["x + y", "x*y", "x^2 + y^3", "(x + 1)*(y^2 - 2)"];
    let non_special = ["x^2 + x*y", "x^3 + x*y + y"];
    let mut bad = Vec::new();
    let mut corpus = Vec::new();
    for (list, want) in [
        (&special[..], Verdict::SpecialCandidate),
        (&non_special[..], Verdict::NonSpecial),
    ] {
        for s in list {
            let h = parse_over(s, &xy).unwrap();
            if separability_test(&h).unwrap().verdict != want {
                bad.push(format!("{s}: expected {want:?}"));
            }
            corpus.push((h, want));
        }
    }
    let mut rng = rng("acceptance/affine");
    let mut coeff = || loop {
        let v = frac(rng.gen_range(-7..=7), rng.gen_range(1..=5));
        if !v.is_zero() {
            break v;
        }
    };
    for t in 0..20 {
        let (h, want) = &corpus[t % corpus.len()];
        let (al, be, ga, de) = (coeff(), coeff(), coeff(), coeff());
        let img = affine_image(h, &al, &be, &ga, &de);
        if separability_test(&img).unwrap().verdict != *want {
            bad.push(format!("affine image {t} of {h}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("6 corpus entries, 20 affine images {bad:?}"),
    )
}

fn cayley_menger() -> Outcome {
    let mut rng = rng("acceptance/cayley-menger");
    let mut coord = || frac(rng.gen_range(-50..=50), rng.gen_range(1..=7));
    let anchors = loop {
        let p: Vec<PlanarPoint> = (0..3).map(|_| PlanarPoint::new(coord(), coord())).collect();
        if !orientation(&p[0], &p[1], &p[2]).is_zero() {
            break p;
        }
    };
    let f = cayley_menger_surface(&anchors[0], &anchors[1], &anchors[2]).unwrap();
    let points = random_points(200, SEED);
    let mut realized_bad = 0;
    let mut perturbed_bad = 0;
    for (i, p) in points.iter().enumerate() {
        let mut r: Vec<Rational> = anchors.iter().map(|a| p.dist2(a)).collect();
        if !f.evaluate(&r).unwrap().is_zero() {
            realized_bad += 1;
        }
        r[i % 3] += Rational::one();
        if f.evaluate(&r).unwrap().is_zero() {
            perturbed_bad += 1;
        }
    }
    outcome(
        realized_bad == 0 && perturbed_bad == 0,
        format!("200 realized ({realized_bad} nonzero), 200 perturbed ({perturbed_bad} zero)"),
    )
}

fn st_shape(runs: &[(String, ChainReport)]) -> Outcome {
    let mut bad = Vec::new();
    let mut ratios = Vec::new();
    for (name, r) in runs {
        match r.st_ratio {
            Some(v) if v.is_finite() && v > 0.0 => ratios.push(v),
            other => bad.push(format!(
                "{name}: {other:?} (|G| = {}, |P| = {}, |Γ| = {})",
                r.g, r.p, r.gamma
            )),
        }
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    outcome(
        bad.is_empty(),
        format!("I/shape in [{lo:.4}, {hi:.4}] over {} runs {bad:?}", runs.len()),
    )
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |id: usize, name: &str, elapsed: Duration, o: Outcome| {
        all &= o.pass;
        println!(
            "criterion {id:>2} {} {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
    };
    macro_rules! run {
        ($id:expr, $name:expr, $body:expr) => {{
            let t = Instant::now();
            let o = $body;
            report($id, $name, t.elapsed(), o);
        }};
    }
    run!(1, "Schwartz-Zippel ceiling", schwartz_zippel());
    run!(2, "extremal witness", extremal_witness());
    run!(3, "monotone scan guarantee", lemma_scan());
    let t = Instant::now();
    let runs = chain_runs();
    println!("chain runs: {} in {:.1}s", runs.len(), t.elapsed().as_secs_f64());
    run!(4, "heavy-fiber retention", heavy_retention(&runs));
    run!(5, "5-tuple ledger bound", tuple_ledger(&runs));
    run!(6, "tuple incidence exactness", incidence_exactness(&runs));
    run!(7, "resultant oracle", resultant_oracle());
    run!(8, "expander dichotomy", expander_dichotomy());
    run!(9, "separability corpus", separability_corpus());
    run!(10, "Cayley-Menger soundness", cayley_menger());
    run!(11, "ST-shape ratio", st_shape(&runs));
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
