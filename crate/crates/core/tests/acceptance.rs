//! The ten acceptance criteria. Each prints one PASS or FAIL line; run with `--nocapture` to
//! see them.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use diffqe::algebra::decompose::minimal_primes;
use diffqe::algebra::factor::factor;
use diffqe::algebra::groebner::{groebner_basis, normal_form};
use diffqe::algebra::{Field, Ideal, MPoly, MonoOrder, Ring};
use diffqe::catalog::{catalog, grid_fields, BOOLEAN_PAIRS, DECOMPOSITION, QE_FORMULAS};
use diffqe::logic::{galois_to_fo, witness_extension, Oracle};
use diffqe::points::{enumerate_realisations, DiffField, DEFAULT_BUDGET};
use diffqe::qe::{
    direct_image, direct_image_finite_etale, frobenius_scan, frobenius_scan_pair, quantifier_eliminate, Case,
    DirectImageTask,
};
use diffqe::strat::Stratification;
use diffqe::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Oracle budget for the elimination round trip.
const QE_BUDGET: u128 = 1 << 27;

/// Criteria that cannot be met as stated; see the README.
const KNOWN_FAILING: &[u32] = &[9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sorted(mut v: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    v.sort();
    v.dedup();
    v
}

fn eval(a: &Stratification, k: &DiffField) -> Vec<Vec<u32>> {
    sorted(a.evaluate(k, DEFAULT_BUDGET).unwrap().points)
}

fn decomposition_soundness() -> Outcome {
    let b = catalog();
    let mut bad = Vec::new();
    let mut checks = 0;
    for name in DECOMPOSITION {
        let p = b.presentation(name).unwrap();
        let comps = p.direct_decompose().unwrap();
        for k in grid_fields(p, &[2, 3, 5, 7], &[1, 2, 3]) {
            let want = enumerate_realisations(p, &k, DEFAULT_BUDGET).unwrap();
            let mut got = Vec::new();
            for c in &comps {
                got.extend(enumerate_realisations(c, &k, DEFAULT_BUDGET).unwrap());
            }
            checks += 1;
            if sorted(got) != sorted(want) {
                bad.push(format!("{name}@{}^{}", k.q(), k.m));
            }
        }
    }
    outcome(bad.is_empty(), format!("{} presentations, {checks} fields, mismatches {bad:?}", DECOMPOSITION.len()))
}

fn kummer_counts() -> Outcome {
    let b = catalog();
    let non = b.stratification("kummer_non").unwrap();
    let res = b.stratification("kummer_res").unwrap();
    let both = non.or(res).unwrap();
    let mut bad = Vec::new();
    for q in [3u64, 5, 7, 9, 11, 13] {
        let k = DiffField::from_q(q, 1).unwrap();
        let half = (q as usize - 1) / 2;
        let counts = (eval(non, &k).len(), eval(res, &k).len(), eval(&both, &k).len());
        if counts != (half, half, q as usize - 1) {
            bad.push(format!("q={q}: {counts:?}"));
        }
    }
    outcome(bad.is_empty(), format!("q in 3..13, wrong counts {bad:?}"))
}

fn lift_independence() -> Outcome {
    let b = catalog();
    let mut violations = Vec::new();
    let mut points = 0;
    let mut ramified = 0;
    for (name, c) in &b.covers {
        for k in grid_fields(&c.base, &[2, 3, 4, 5, 7, 8, 9, 11, 13], &[1, 2]) {
            for x in enumerate_realisations(&c.base, &k, DEFAULT_BUDGET).unwrap() {
                match c.all_substitutions(&k, &x) {
                    Ok(subs) => {
                        points += 1;
                        let class = c.twisted_closure(&BTreeSet::from([subs[0]]));
                        if !subs.iter().all(|g| class.contains(g)) {
                            violations.push(format!("{name}@{}^{} {x:?}", k.q(), k.m));
                        }
                    }
                    Err(Error::NonEtale(_)) | Err(Error::LiftNotFound(_)) if k.p <= 3 => ramified += 1,
                    Err(e) => violations.push(format!("{name}@{}^{} {x:?}: {e}", k.q(), k.m)),
                }
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!("{points} base points, {ramified} skipped in ramified characteristic, violations {violations:?}"),
    )
}

fn boolean_laws() -> Outcome {
    let b = catalog();
    let mut bad = Vec::new();
    let mut checks = 0;
    for (x, y) in BOOLEAN_PAIRS {
        let (a, c) = (b.stratification(x).unwrap(), b.stratification(y).unwrap());
        let (and, or, not) = (a.and(c).unwrap(), a.or(c).unwrap(), a.not());
        for k in grid_fields(&a.ambient, &[3, 5, 7, 9, 11, 13], &[1, 2]) {
            let (ea, ec) = (eval(a, &k), eval(c, &k));
            let all = sorted(enumerate_realisations(&a.ambient, &k, DEFAULT_BUDGET).unwrap());
            let inter: Vec<_> = ea.iter().filter(|p| ec.contains(p)).cloned().collect();
            let union = sorted(ea.iter().chain(&ec).cloned().collect());
            let comp: Vec<_> = all.iter().filter(|p| !ea.contains(p)).cloned().collect();
            checks += 1;
            if eval(&and, &k) != inter || eval(&or, &k) != union || eval(&not, &k) != comp {
                bad.push(format!("({x}, {y})@{}^{}", k.q(), k.m));
            }
        }
    }
    outcome(bad.is_empty(), format!("{} pairs, {checks} fields, failures {bad:?}", BOOLEAN_PAIRS.len()))
}

fn translation_soundness() -> Outcome {
    let b = catalog();
    let mut bad = Vec::new();
    let mut checks = 0;
    for (name, a) in &b.stratifications {
        let f = galois_to_fo(a).unwrap();
        let ext = witness_extension(a);
        let vars: Vec<String> = (1..=a.ambient.n()).map(|i| format!("v{i}")).collect();
        for k in grid_fields(&a.ambient, &[3, 5, 7, 9, 11, 13], &[1]) {
            if k.order().pow(a.ambient.n() as u32) * k.order().pow(ext) > 1 << 24 {
                continue;
            }
            let o = Oracle::with_extension(&k, ext, DEFAULT_BUDGET).unwrap();
            checks += 1;
            if sorted(o.realisations(&f, &vars).unwrap()) != eval(a, &k) {
                bad.push(format!("{name}@{}", k.q()));
            }
        }
    }
    outcome(bad.is_empty(), format!("{} stratifications, {checks} fields, mismatches {bad:?}", b.stratifications.len()))
}

fn finite_etale_image() -> Outcome {
    let b = catalog();
    let f = b.morphism("square").unwrap();
    let top = b.stratification("gm_top").unwrap();
    let out = direct_image_finite_etale(f, top).unwrap();
    let mut bad = Vec::new();
    let mut checks = 0;
    for k in grid_fields(&f.source, &[3, 5, 7, 9, 25, 27, 49], &[1, 2, 3]) {
        if k.order() > 2_000 {
            continue;
        }
        let gf = k.gf().unwrap();
        let want = sorted(eval(top, &k).iter().map(|x| vec![gf.mul(x[0], x[0])]).collect());
        checks += 1;
        if eval(&out, &k) != want {
            bad.push(format!("{}^{}", k.q(), k.m));
        }
    }
    outcome(bad.is_empty(), format!("characteristics 3, 5, 7, {checks} fields, mismatches {bad:?}"))
}

fn pointwise_image(f: &diffqe::presentation::Morphism, a: &Stratification, k: &DiffField) -> Vec<Vec<u32>> {
    let gf = k.gf().unwrap();
    let maps: Vec<_> = f.f0.iter().map(|g| gf.compile(g).unwrap()).collect();
    sorted(eval(a, k).iter().map(|x| maps.iter().map(|g| g.eval(&gf, x)).collect()).collect())
}

fn fibration_image() -> Outcome {
    let b = catalog();
    let qs = [3u64, 5, 7, 9, 11, 13];
    let f = b.morphism("plane_projection").unwrap();
    let a = b.stratification("plane_kummer").unwrap();
    let task = DirectImageTask { morphism: f.clone(), input: a.clone(), case: Case::Fibration };
    let out = direct_image(&task).unwrap().output;
    let mut bad = Vec::new();
    for &q in &qs {
        let k = DiffField::from_q(q, 1).unwrap();
        if eval(&out, &k) != pointwise_image(f, a, &k) {
            bad.push(q);
        }
    }
    let g = b.morphism("curve_fibration").unwrap();
    let c = b.stratification("curve_top").unwrap();
    let task = DirectImageTask { morphism: g.clone(), input: c.clone(), case: Case::Fibration };
    let out2 = direct_image(&task).unwrap().output;
    let report = frobenius_scan_pair("curve_fibration", &[2, 3, 4, 5, 7, 8, 9, 11, 13], &[1], |k| {
        Ok((eval(&out2, k), pointwise_image(g, c, k)))
    })
    .unwrap();
    let ok = bad.is_empty() && report.n.is_some_and(|n| n <= 13);
    outcome(
        ok,
        format!("pulled-back Kummer mismatches {bad:?}; curve fibration N = {:?}, failures {:?}", report.n, report.failures),
    )
}

fn qe_round_trip() -> Outcome {
    let b = catalog();
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, min_ext) in QE_FORMULAS {
        let f = b.formula(name).unwrap();
        let start = Instant::now();
        let r = quantifier_eliminate(f, &Field::Rationals, None).unwrap();
        let elapsed = start.elapsed();
        let ext = num_integer::lcm(witness_extension(&r.stratification), *min_ext);
        let cost = |q: u64, m: u32| (q as u128).pow(m * (ext + r.vars.len() as u32));
        let scan = |m: u32| {
            let qs: Vec<u64> = [2u64, 3, 4, 5, 7, 8, 9, 11, 13].into_iter().filter(|&q| cost(q, m) <= QE_BUDGET).collect();
            frobenius_scan_pair(name, &qs, &[m], |k| {
                let want = Oracle::with_extension(k, ext, QE_BUDGET)?.realisations(f, &r.vars)?;
                Ok((r.realisations(k, QE_BUDGET)?, want))
            })
            .unwrap()
        };
        // m = 2 runs on the affordable part of the grid and may only fail where m = 1 does
        let (one, two) = (scan(1), scan(2));
        let bad_q = |r: &diffqe::qe::FrobReport| r.failures.iter().map(|f| f.0).collect::<BTreeSet<_>>();
        let pass = one.grid.last().is_some_and(|g| g.0 == 13)
            && one.n.is_some_and(|n| n <= 13)
            && bad_q(&two).is_subset(&bad_q(&one))
            && elapsed < Duration::from_secs(60);
        ok &= pass;
        lines.push(format!(
            "{name}: N={:?}, m=2 on q<={} fails at {:?}",
            one.n,
            two.grid.last().map_or(0, |g| g.0),
            bad_q(&two)
        ));
    }
    outcome(ok && QE_FORMULAS.len() >= 4, lines.join("; "))
}

fn lang_weil() -> Outcome {
    let b = catalog();
    let qs = [2u64, 3, 4, 5, 7, 8, 9, 11, 13];
    let scan = || {
        let mut reports = Vec::new();
        for (name, p) in &b.presentations {
            if !p.is_h_direct().unwrap_or(false) || p.is_empty() || p.field != Field::Rationals {
                continue;
            }
            reports.push(frobenius_scan(name, p, &qs, 6, DEFAULT_BUDGET).unwrap());
        }
        reports
    };
    let first = scan();
    let stable = first == scan();
    let missing: Vec<String> = first.iter().filter(|r| r.n.is_none()).map(|r| r.instance.clone()).collect();
    let lines: Vec<String> = first.iter().map(|r| format!("{}: N={:?}", r.instance, r.n)).collect();
    outcome(stable && missing.is_empty(), format!("stable={stable}; {}", lines.join(", ")))
}

fn random_poly(ring: &diffqe::algebra::RingRef, rng: &mut ChaCha8Rng) -> MPoly {
    let n = ring.vars.len();
    let mut text = String::new();
    for _ in 0..rng.gen_range(1..=4) {
        let c: i64 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut term = c.to_string();
        let mut deg = 0;
        for v in &ring.vars {
            let e = rng.gen_range(0..=2u32).min(4 - deg);
            deg += e;
            if e > 0 {
                term.push_str(&format!("*{v}^{e}"));
            }
        }
        text.push_str(&format!(" + {term}"));
    }
    let _ = n;
    MPoly::parse(ring, &text).unwrap()
}

fn algebra_substrate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_501);
    let fields = [Field::Rationals, Field::Prime(5), Field::Prime(7)];
    let mut bad = Vec::new();
    let mut incomplete = 0;
    for case in 0..100 {
        let field = fields[case % 3].clone();
        let nv = rng.gen_range(1..=3);
        let ring = Ring::new(field, (0..nv).map(|i| ["x", "y", "z"][i].to_string()).collect());
        let gens: Vec<MPoly> = (0..rng.gen_range(1..=2)).map(|_| random_poly(&ring, &mut rng)).collect();
        // two bases of the same ideal contain each other
        let g1 = groebner_basis(&gens, &MonoOrder::GrevLex);
        let g2 = groebner_basis(&gens, &MonoOrder::Lex);
        let inside = |a: &[MPoly], b: &[MPoly], o: &MonoOrder| a.iter().all(|f| normal_form(f, b, o).is_zero());
        if !inside(&g1, &g2, &MonoOrder::Lex) || !inside(&g2, &g1, &MonoOrder::GrevLex) || !inside(&gens, &g1, &MonoOrder::GrevLex) {
            bad.push(format!("groebner #{case}"));
        }
        // factors multiply back to the polynomial
        let f = &gens[0];
        if !f.is_zero() {
            let fac = factor(f).unwrap();
            let mut prod = MPoly::constant(&ring, fac.unit.clone());
            for (p, e) in &fac.factors {
                prod = prod.mul(&p.pow(*e));
            }
            if prod != *f {
                bad.push(format!("factor #{case}"));
            }
        }
        // the minimal primes cut out the radical
        let ideal = Ideal::new(&ring, gens.clone());
        match minimal_primes(&ideal) {
            Ok(primes) => {
                let in_all = gens.iter().all(|g| primes.iter().all(|p| p.contains(g)));
                let mut products = vec![MPoly::one(&ring)];
                for p in &primes {
                    products = products.iter().flat_map(|a| p.gens().iter().map(move |g| a.mul(g))).take(64).collect();
                }
                let in_radical = primes.is_empty() || products.iter().all(|h| ideal.radical_contains(h));
                if !in_all || !in_radical {
                    bad.push(format!("decompose #{case}"));
                }
            }
            Err(Error::DecompositionIncomplete(_)) => incomplete += 1,
            Err(e) => bad.push(format!("decompose #{case}: {e}")),
        }
    }
    outcome(bad.is_empty(), format!("100 instances, {incomplete} reported incomplete, failures {bad:?}"))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, Option<u64>, fn() -> Outcome); 10] = [
        (1, "decomposition soundness", Some(10), decomposition_soundness),
        (2, "Kummer counts", Some(5), kummer_counts),
        (3, "lift independence", None, lift_independence),
        (4, "Boolean laws", None, boolean_laws),
        (5, "translation soundness", Some(30), translation_soundness),
        (6, "finite-etale direct image", None, finite_etale_image),
        (7, "fibration direct image", None, fibration_image),
        (8, "QE round trip", None, qe_round_trip),
        (9, "twisted Lang-Weil harness", None, lang_weil),
        (10, "algebra substrate", Some(60), algebra_substrate),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = out.pass && limit.map_or(true, |l| secs < l as f64);
        println!("{} {id:>2} {name} ({secs:.2}s): {}", if pass { "PASS" } else { "FAIL" }, out.detail);
        if pass == KNOWN_FAILING.contains(&id) {
            unexpected.push(id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}
