//! Acceptance criteria 1–10. Each test prints one `PASS`/`FAIL` line to the
//! raw stderr handle (not captured by the test harness), then asserts.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use twistred::exterior::eval_on;
use twistred::field::finite_difference_check;
use twistred::reduction::{intermediate_identities, reduce, CheckConfig, ReduceOptions};
use twistred::report::Entries;
use twistred::scenario::{self, find, registry, RunOptions};
use twistred::search::{common_root_search, random_koszul_tuple, skew_tuple};
use twistred::skew::{horizontal_space_dim, SkewMatrix};
use twistred::torsion::{lt_check, pfaffian_identity, torsion_classes, verify_torsion_equations};
use twistred::torus::{stream_rng, MomentLevel};
use twistred::twist::{alpha_from_skew, hirzebruch_twist, veronese_pullback};
use twistred::{Form, TangentVector, C64, I};

fn verdict(n: usize, title: &str, ok: bool, detail: &str) {
    let line = format!(
        "acceptance criterion {n:>2} [{}] {title}: {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn failures(e: &Entries) -> String {
    e.failures()
        .map(|f| format!("{} = {:.3e}", f.name, f.value))
        .collect::<Vec<_>>()
        .join("; ")
}

fn max_over(e: &Entries, pred: impl Fn(&str) -> bool) -> (usize, f64) {
    e.iter()
        .filter(|x| pred(&x.name))
        .fold((0, 0.0f64), |(n, m), x| (n + 1, m.max(x.value)))
}

fn within(t: Instant, limit: Duration) -> bool {
    t.elapsed() <= limit
}

#[test]
fn criterion_01_cp3_family() {
    let t = Instant::now();
    let mut sc = find("cp3-generic").unwrap();
    sc.instances = 20;
    sc.seed = 101;
    sc.checks.audit = false;
    sc.checks.intermediate = false;
    sc.checks.symbolic = false;
    sc.checks.torsion = false;
    sc.checks.pfaffian_identity = false;
    sc.checks.basis_change = None;
    let rep = scenario::run(&sc, &RunOptions::default()).unwrap();
    let (n_su, su) = max_over(&rep.entries, |n| n.contains("] SU:"));
    let (n_basic, basic) = max_over(&rep.entries, |n| n.contains("] basic:"));
    let ok = rep.passed && n_su == 40 && n_basic == 80 && su < 1e-10 && basic < 1e-10 && within(t, Duration::from_secs(60));
    verdict(
        1,
        "CP^3 family, 20 matrices x 50 points",
        ok,
        &format!(
            "SU max {su:.2e} ({n_su} checks), basic max {basic:.2e} ({n_basic} checks), {:.1}s {}",
            t.elapsed().as_secs_f64(),
            failures(&rep.entries)
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_02_intermediate_chain() {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut fails = String::new();
    let level = MomentLevel::unit_sphere(4);
    let llt = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 2]);
    let generic = SkewMatrix::random(4, &mut stream_rng(7, 0)).unwrap();
    for m in [&llt, &generic] {
        for normalize in [false, true] {
            let tf = alpha_from_skew(m);
            let opts = ReduceOptions {
                normalize,
                ..ReduceOptions::default()
            };
            let red = reduce(&level, vec![tf], &opts).unwrap();
            let pts = red.sample(50, 3, |_| true).unwrap();
            let e = intermediate_identities(&red, &pts, &CheckConfig::default()).unwrap();
            let (n, m) = max_over(&e, |n| n.starts_with("chain:") || n.starts_with("pipeline:"));
            worst = worst.max(m);
            count = count.max(n);
            fails.push_str(&failures(&e));
        }
    }
    let ok = count >= 5 && worst < 1e-10 && fails.is_empty();
    verdict(2, "intermediate chain on CP^3", ok, &format!("{count} identities, max {worst:.2e} {fails}"));
    assert!(ok);
}

#[test]
fn criterion_03_pfaffian() {
    let mut rng = stream_rng(303, 0);
    let mut worst_identity = 0.0f64;
    let mut nonzero_pf = 0;
    for _ in 0..20 {
        let m = SkewMatrix::random_integer(4, 3, &mut rng).unwrap();
        if m.pfaffian().norm() > 0.0 {
            nonzero_pf += 1;
        }
        worst_identity = worst_identity.max(pfaffian_identity(&m).unwrap().max_coeff());
    }
    let mut worst_det = 0.0f64;
    for n in [2, 4, 6, 8] {
        for _ in 0..10 {
            let m = SkewMatrix::random(n, &mut rng).unwrap();
            let (pf, det) = (m.pfaffian(), m.det());
            worst_det = worst_det.max((pf * pf - det).norm() / det.norm());
        }
    }
    let ok = worst_identity == 0.0 && worst_det < 1e-10 && nonzero_pf > 0;
    verdict(
        3,
        "Pfaffian identity and Pf^2 = det",
        ok,
        &format!("identity max coeff {worst_identity:e} on 20 integer matrices ({nonzero_pf} with Pf != 0), Pf^2/det max rel {worst_det:.2e} up to 8x8"),
    );
    assert!(ok);
}

#[test]
fn criterion_04_torsion() {
    let level = MomentLevel::unit_sphere(4);
    let mut rng = stream_rng(404, 0);
    let mut lt = Vec::new();
    while lt.len() < 10 {
        let s = C64::new(rng.random_range(0.5..1.5), rng.random_range(-0.5..0.5));
        lt.push(SkewMatrix::random_lt(4, s, &mut rng).unwrap());
    }
    let mut non_lt = Vec::new();
    while non_lt.len() < 10 {
        let m = SkewMatrix::random(4, &mut rng).unwrap();
        if m.pfaffian().norm() >= 0.1 {
            non_lt.push(m);
        }
    }
    let (mut eq_worst, mut d_eta, mut w2, mut classified) = (0.0f64, 0.0f64, 0.0f64, 0);
    let mut fails = String::new();
    for (k, m) in lt.iter().chain(&non_lt).enumerate() {
        let expect_lt = k < 10;
        let t = torsion_classes(m).unwrap();
        let pts = level.sample(50, k as u64, |_| true).unwrap();
        let e = verify_torsion_equations(&t, &level, &pts, 20, k as u64, 1e-8).unwrap();
        fails.push_str(&failures(&e));
        let (n_eq, w) = max_over(&e, |n| {
            n.starts_with("torsion: d omega =") || n.starts_with("torsion: d Omega =") || n.ends_with("= W1 omega^3")
        });
        if n_eq != 4 {
            fails.push_str("missing structure equation entries; ");
        }
        eq_worst = eq_worst.max(w);
        let r = lt_check(&t, &level, &pts, 20, k as u64).unwrap();
        if r.lt_by_matrix == expect_lt && r.lt_by_torsion == expect_lt {
            classified += 1;
        }
        if expect_lt {
            d_eta = d_eta.max(r.d_eta.unwrap_or(f64::INFINITY));
            w2 = w2.max(r.w2_closed_form.unwrap_or(f64::INFINITY));
        }
    }
    let ok = fails.is_empty() && eq_worst < 1e-8 && classified == 20 && d_eta < 1e-10 && w2 < 1e-8;
    verdict(
        4,
        "torsion classes and LT criterion",
        ok,
        &format!(
            "structure/trace max {eq_worst:.2e}, LT classified {classified}/20, d eta {d_eta:.2e}, W2 closed form {w2:.2e} {fails}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_05_cp7() {
    let t = Instant::now();
    let mut sc = find("cp7").unwrap();
    sc.points = 50;
    let rep = scenario::run(&sc, &RunOptions::default()).unwrap();
    let get = |n: &str| rep.entries.get(n).map(|e| e.value).unwrap_or(f64::NAN);
    let classes = get("audit: passing convention classes");
    let (n_su, su) = max_over(&rep.entries, |n| n.starts_with("SU:"));
    let clusters = get("collinearity: eigenvalue clusters");
    let doubles = get("collinearity: clusters of multiplicity 2");
    let p1 = get("probe: path 1 -> dz4^conj(dz4)");
    let p2 = get("probe: path 2 -> dz3^conj(dz3)");
    let diff = get("probe: limit difference");
    let ok = rep.passed
        && classes == 1.0
        && n_su == 2
        && su < 1e-8
        && clusters == 4.0
        && doubles == 4.0
        && p1 < 1e-4
        && p2 < 1e-4
        && diff > 1.0
        && within(t, Duration::from_secs(300));
    verdict(
        5,
        "CP^7 two-twist reduction",
        ok,
        &format!(
            "{classes} passing convention class, SU max {su:.2e}, {clusters} clusters ({doubles} double), probe {p1:.1e}/{p2:.1e}, difference {diff:.3}, {:.1}s {}",
            t.elapsed().as_secs_f64(),
            failures(&rep.entries)
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_06_hirzebruch() {
    let mut detail = String::new();
    let mut ok = true;
    for n in [-1i64, 0, 1, 2] {
        let h = hirzebruch_twist(n).unwrap();
        let zero = C64::default();
        let charges_ok = h.alpha1.charge() == [2.0 * I, zero, zero] && h.alpha2.charge() == [I * n as f64, 2.0 * I, zero];
        let rep = scenario::run(&find(&scenario::hirzebruch_name(n)).unwrap(), &RunOptions::default()).unwrap();
        let (nc, charge) = max_over(&rep.entries, |x| x.starts_with("hirzebruch: alpha"));
        let (ns, su) = max_over(&rep.entries, |x| x.starts_with("SU:"));
        let this = charges_ok && rep.passed && nc == 6 && charge < 1e-10 && ns == 2 && su < 1e-8 && rep.scenario.points == 50;
        ok &= this;
        detail.push_str(&format!("n={n}: charge {charge:.1e}, SU {su:.1e} {}; ", failures(&rep.entries)));
    }
    verdict(6, "Hirzebruch CP^1-bundles", ok, &detail);
    assert!(ok);
}

#[test]
fn criterion_07_classification_support() {
    let dims: Vec<(usize, usize)> = [2, 4, 6, 8].iter().map(|&n| (n, horizontal_space_dim(n, 2).unwrap())).collect();
    let ok = dims.iter().all(|&(n, d)| d == n * (n - 1) / 2);
    verdict(7, "horizontal charge-2 space dimension", ok, &format!("{dims:?}"));
    assert!(ok);
}

#[test]
fn criterion_08_nonexistence_corroboration() {
    let mut koszul_max = 0.0f64;
    for k in 0..10 {
        let r = common_root_search(&random_koszul_tuple(4, 808, k), 32, k).unwrap();
        koszul_max = koszul_max.max(r.min_value);
    }
    let mut rng = stream_rng(808, 100);
    let (mut margin, mut bound_min) = (f64::INFINITY, f64::INFINITY);
    for k in 0..10 {
        let m = SkewMatrix::random(4, &mut rng).unwrap();
        let r = common_root_search(&skew_tuple(&m), 32, k).unwrap();
        let b = m.sigma_min().powi(2);
        margin = margin.min(r.min_value - (b - 1e-8));
        bound_min = bound_min.min(b - 1e-8);
    }
    let ok = koszul_max < 1e-6 && margin >= 0.0 && bound_min > 0.0;
    verdict(
        8,
        "common-root search",
        ok,
        &format!("Koszul max of minima {koszul_max:.2e}; skew tuples min - (sigma^2 - 1e-8) >= {margin:.2e}, sigma^2 - 1e-8 >= {bound_min:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_09_veronese() {
    let t = Instant::now();
    let mut rng = stream_rng(909, 0);
    let mut identical = true;
    for _ in 0..5 {
        let m = SkewMatrix::random(4, &mut rng).unwrap();
        let (a, b) = (veronese_pullback(1, &m).unwrap(), alpha_from_skew(&m));
        identical &= a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| x.sub(y).is_zero()) && a.charge() == b.charge();
    }
    let sc = find("veronese-2").unwrap();
    let rep = scenario::run(&sc, &RunOptions::default()).unwrap();
    let (_, su) = max_over(&rep.entries, |n| n.starts_with("SU:"));
    let charge = rep.entries.get("twist: charge e1").map(|e| e.value).unwrap_or(f64::NAN);
    let ok = identical
        && rep.passed
        && sc.points == 25
        && sc.checks.zero_distance.is_some()
        && su < 1e-7
        && within(t, Duration::from_secs(600));
    verdict(
        9,
        "Veronese pullback",
        ok,
        &format!(
            "degree 1 identical: {identical}; degree 2 charge {charge:.1e}, SU max {su:.2e}, {:.1}s {}",
            t.elapsed().as_secs_f64(),
            failures(&rep.entries)
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_infrastructure_oracles() {
    let mut fd_worst = 0.0f64;
    let mut fields = 0;
    for sc in registry() {
        let (level, fs) = scenario::scenario_fields(&sc, sc.seed).unwrap();
        let pts = level.sample(10, 1010, |_| true).unwrap();
        for (_, f) in &fs {
            fields += 1;
            for z in &pts {
                fd_worst = fd_worst.max(finite_difference_check(f, z, 1e-5).unwrap());
            }
        }
    }

    let mut oracle_worst = 0.0f64;
    let mut dd_worst = 0.0f64;
    let mut anti_worst = 0.0f64;
    for k in 0..200u64 {
        let mut rng = stream_rng(1010, k);
        let dim = 1 + (k as usize % 3);
        // eval_on against the Leibniz sum
        let grade = rng.random_range(0..=2 * dim);
        let terms: Vec<_> = (0..4).map(|_| (random_index(dim, grade, &mut rng), rc(&mut rng))).collect();
        let a = Form::from_terms(dim, terms).unwrap();
        let vs: Vec<TangentVector> = (0..grade).map(|_| random_vector(dim, &mut rng)).collect();
        let want = brute_eval(&a, &vs);
        oracle_worst = oracle_worst.max((eval_on(&a, &vs).unwrap() - want).norm() / want.norm().max(1.0));
        // d∘d and the contraction anti-derivation law on random fields
        let dim = 2 + (k as usize % 2);
        let (p, q) = (1 + (k as usize % 2), 1 + (k as usize / 2 % 2));
        let f = random_field(dim, p, &mut rng);
        let g = random_field(dim, q, &mut rng);
        let v = random_vector_field(dim, &mut rng);
        let z = random_point(dim, &mut rng);
        let df = f.d();
        dd_worst = dd_worst.max(residual_at(&df.d(), &[&df], &z));
        let lhs = f.wedge(&g).unwrap().contract(&v).unwrap();
        let sign = C64::new(if p % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        let rhs = f
            .contract(&v)
            .unwrap()
            .wedge(&g)
            .unwrap()
            .add(&f.wedge(&g.contract(&v).unwrap()).unwrap().scale(sign));
        anti_worst = anti_worst.max(residual_at(&lhs.sub(&rhs), &[&lhs, &rhs], &z));
    }
    let ok = fd_worst < 1e-6 && oracle_worst < 1e-13 && dd_worst < 1e-10 && anti_worst < 1e-10;
    verdict(
        10,
        "infrastructure oracles",
        ok,
        &format!(
            "d vs finite differences max {fd_worst:.2e} over {fields} scenario fields x 10 points; eval_on oracle {oracle_worst:.1e}, d∘d {dd_worst:.1e}, anti-derivation {anti_worst:.1e} on 200 random fields"
        ),
    );
    assert!(ok);
}

#[test]
fn negative_controls_are_detected() {
    let mut detail = String::new();
    let mut ok = true;
    for (name, first) in [
        ("cp3-bad-charge", "charge-sum precondition"),
        ("cp7-non-orthogonal", "orthogonality precondition"),
        ("cp3-singular", "twist: min |alpha|^2 zero search"),
    ] {
        let rep = scenario::run(&find(name).unwrap(), &RunOptions::default()).unwrap();
        let got = rep.first_failure().map(|e| e.name.clone()).unwrap_or_default();
        ok &= rep.exit_code() == 2 && got == first;
        detail.push_str(&format!("{name}: {got}; "));
    }
    verdict(0, "negative controls fail where expected", ok, &detail);
    assert!(ok);
}
