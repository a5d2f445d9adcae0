//! Acceptance criteria, one PASS/FAIL line each.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use charp_hodge::cartier::{inverse_cartier, verify_lemma32, verify_lemma33, verify_theorem, LiftData};
use charp_hodge::cech::{bundle_iso_check, GluedHiggsBundle};
use charp_hodge::harness::random::{perturb_lifts, random_in_algebra, random_nilpotent, random_sections, rng_for};
use charp_hodge::higgs::{armodule_to_higgs, higgs_to_armodule, trunc_exp, HiggsLocal};
use charp_hodge::matrix::{FormMatrix, Matrix};
use charp_hodge::pullback::{
    check_direct_sum_compat, check_tensor_compat, compare_representatives, compare_tp1_tp2, prop28_report, tp1, tp2,
    tp3, PullbackContext, SymPower,
};
use charp_hodge::registry::{examples, find};
use charp_hodge::ring::{Modulus, Ring, RingElem, Var};
use charp_hodge::scenario::Scenario;
use charp_hodge::Error;

const SEED: u64 = 20260101;

type Outcome = Result<(), String>;

fn load(name: &str, p: u64) -> Scenario {
    find(name).unwrap_or_else(|| panic!("missing example {name}")).load(p).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn poly_ring(p: u64, names: &[&str]) -> Ring {
    Ring::polynomial(names.iter().map(|n| Var::ordinary(n)).collect(), Modulus::new(p, 1).unwrap()).unwrap()
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn identity_frames(b: &GluedHiggsBundle) -> Vec<Matrix> {
    b.covering().charts().iter().map(|c| Matrix::identity(c, b.rank())).collect()
}

/// `k!^{-1} mod p` by Fermat, without the library's factorial helpers.
fn inv_factorial_mod(k: u64, p: u64) -> i64 {
    let f = (1..=k).fold(1u64, |acc, i| acc * i % p);
    let mut out = 1u64;
    let (mut base, mut e) = (f, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            out = out * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    out as i64
}

fn naive_exp(a: &Matrix, r: usize) -> Matrix {
    let p = a.ring().p();
    let mut sum = Matrix::identity(a.ring(), a.rows());
    let mut power = Matrix::identity(a.ring(), a.rows());
    for k in 1..=r {
        power = power.mul(a);
        sum = sum.add(&power.scale_int(inv_factorial_mod(k as u64, p)));
    }
    sum
}

fn random_p1_bundle(s: &Scenario, n: usize, rng: &mut ChaCha8Rng) -> GluedHiggsBundle {
    let p = s.prime;
    let mut block = vec![vec![0i64; n]; n];
    let size = n.min(p as usize);
    for i in 0..size {
        for j in i + 1..size {
            block[i][j] = rng.gen_range(0..p) as i64;
        }
    }
    let locals = (0..2)
        .map(|c| {
            let ring = s.x.chart(c);
            let sign = if c == 0 { 1 } else { -1 };
            let rows = block.iter().map(|row| row.iter().map(|&k| ring.constant(sign * k)).collect()).collect();
            HiggsLocal::new(FormMatrix::from_components(ring, vec![Matrix::from_rows(ring, rows)])).unwrap()
        })
        .collect();
    let transitions = s.x.pairs().iter().map(|pr| Matrix::identity(&pr.ring, n)).collect();
    GluedHiggsBundle::glue(s.x.clone(), locals, transitions).unwrap()
}

fn criterion1() -> Outcome {
    for p in [3, 5, 7] {
        let mut rng = rng_for(SEED, "acceptance/1", p);
        let rings = [poly_ring(p, &["x"]), poly_ring(p, &["x", "y"])];
        for case in 0..100 {
            let ring = &rings[case % 2];
            let n = rng.gen_range(1..=4);
            let base = random_nilpotent(ring, n, &mut rng);
            let comps: Vec<Matrix> = (0..ring.nvars()).map(|_| random_in_algebra(&base, &mut rng, 2)).collect();
            let e = HiggsLocal::new(FormMatrix::from_components(ring, comps.clone())).map_err(|e| e.to_string())?;
            let r = rng.gen_range(e.exponent()..p as usize);
            let m = higgs_to_armodule(&e, r).map_err(|e| e.to_string())?;
            let actions_match = (0..ring.nvars()).all(|v| *m.action(v) == comps[v]);
            let back = armodule_to_higgs(&m);
            let again = higgs_to_armodule(&back, r).map_err(|e| e.to_string())?;
            ensure(actions_match && back == e && again == m, || format!("p = {p}, case {case}"))?;
        }
    }
    Ok(())
}

fn criterion2() -> Outcome {
    for p in [3, 5, 7] {
        let ring = poly_ring(p, &["x"]);
        let mut rng = rng_for(SEED, "acceptance/2", p);
        let r = p as usize - 1;
        for case in 0..500 {
            let n = rng.gen_range(1..=4);
            let base = random_nilpotent(&ring, n, &mut rng);
            let a = random_in_algebra(&base, &mut rng, 3);
            let b = random_in_algebra(&base, &mut rng, 3);
            let ea = trunc_exp(&a, r).map_err(|e| e.to_string())?;
            let eb = trunc_exp(&b, r).map_err(|e| e.to_string())?;
            let ok = ea == naive_exp(&a, r)
                && ea.mul(&naive_exp(&a.neg(), r)).is_identity()
                && naive_exp(&a.add(&b), r) == ea.mul(&eb)
                && trunc_exp(&a.add(&b), r).map_err(|e| e.to_string())? == naive_exp(&a.add(&b), r);
            ensure(ok, || format!("p = {p}, case {case}"))?;
        }
        let n = Matrix::unit(&ring, 2, 0, 1);
        ensure(matches!(trunc_exp(&n, p as usize), Err(Error::FactorialNotInvertible { .. })), || {
            format!("p = {p}: r = p accepted")
        })?;
    }
    Ok(())
}

fn criterion3() -> Outcome {
    let p = 5;
    let mut rng = rng_for(SEED, "acceptance/3", p);
    for name in ["p1-log-rank2", "affine-2chart"] {
        let s = load(name, p);
        let ctx = PullbackContext::new(s.f.clone(), s.tau.clone()).map_err(|e| e.to_string())?;
        for r in 1..=2 {
            let c = compare_tp1_tp2(&s.higgs, &ctx, r).map_err(|e| e.to_string())?;
            let b1 = tp1(&s.higgs, &ctx, r).map_err(|e| e.to_string())?;
            let b2 = tp2(&s.higgs, &ctx, r).map_err(|e| e.to_string())?;
            let b3 = tp3(&s.higgs, &ctx, r).map_err(|e| e.to_string())?;
            let direct = bundle_iso_check(&b1, &b2, &c.witness);
            let third = bundle_iso_check(&b2, &b3, &identity_frames(&b2));
            let sections = random_sections(&s.f, &mut rng).map_err(|e| e.to_string())?;
            let rep = compare_representatives(&s.higgs, &ctx, &sections, r).map_err(|e| e.to_string())?;
            ensure(c.check.ok && direct.ok && third.ok && rep.check.ok, || format!("{name}, r = {r}"))?;
        }
    }
    Ok(())
}

fn criterion4() -> Outcome {
    for p in [3, 5, 7] {
        let s = load("p1-log-rank2", p);
        let mut rng = rng_for(SEED, "acceptance/4", p);
        for case in 0..10 {
            let lifts = perturb_lifts(&s.lifts, &mut rng).map_err(|e| e.to_string())?;
            let tau = lifts.f.obstruction().map_err(|e| e.to_string())?;
            let ctx = PullbackContext::new(s.f.clone(), tau).map_err(|e| e.to_string())?;
            let (n1, n2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let e1 = random_p1_bundle(&s, n1, &mut rng);
            let e2 = random_p1_bundle(&s, n2, &mut rng);
            let r = e1.exponent().max(e2.exponent()).max(1);
            let ranks = tp2(&e1, &ctx, r).map_err(|e| e.to_string())?.rank() == n1
                && tp2(&e2, &ctx, r).map_err(|e| e.to_string())?.rank() == n2;
            let sum = check_direct_sum_compat(&e1, &e2, &ctx, r).map_err(|e| e.to_string())?;
            ensure(ranks && sum.check.ok, || format!("p = {p}, case {case}"))?;
        }
    }
    let s = load("tensor-pair", 5);
    let ctx = PullbackContext::new(s.f.clone(), s.tau.clone()).map_err(|e| e.to_string())?;
    let e2 = s.higgs2.as_ref().ok_or("tensor-pair has no second bundle")?;
    let t = check_tensor_compat(&s.higgs, e2, &ctx, 1, 1).map_err(|e| e.to_string())?;
    ensure(t.check.ok, || format!("tensor-pair: {:?}", t.check.failure))
}

fn criterion5() -> Outcome {
    let mut failures = Vec::new();
    for p in [5, 7] {
        let s = load("prop28-curve", p);
        let ctx = PullbackContext::new(s.f.clone(), s.tau.clone()).map_err(|e| e.to_string())?;
        let pair = &s.f.target().pairs()[0].ring;
        let chart = s.f.target().chart(0);
        let a = pair.parse("1/x").map_err(|e| e.to_string())?;

        let one = prop28_report(&ctx, 1, 2 * p as u32, SEED).map_err(|e| e.to_string())?;
        if !(one.explicit.ok && one.search.found()) {
            failures.push(format!("p = {p}: no isomorphism at r = 1"));
        }

        let two = prop28_report(&ctx, 2, 2 * p as u32, SEED).map_err(|e| e.to_string())?;
        let half = chart.constant(inv_factorial_mod(2, p));
        let gluing = Matrix::from_rows(pair, vec![
            vec![pair.one(), a.clone(), &(&a * &a) * &pair.constant(inv_factorial_mod(2, p))],
            vec![pair.zero(), pair.one(), a.clone()],
            vec![pair.zero(), pair.zero(), pair.one()],
        ]);
        let superdiag = |u: RingElem, v: RingElem| {
            Matrix::from_rows(chart, vec![
                vec![chart.zero(), u, chart.zero()],
                vec![chart.zero(), chart.zero(), v],
                vec![chart.zero(), chart.zero(), chart.zero()],
            ])
        };
        let higgs_f = superdiag(chart.one(), chart.one());
        let higgs_e = superdiag(half, chart.one());
        for (label, got, want) in [
            ("gluing of F^2", &two.gluing_f, &gluing),
            ("gluing of E^2", &two.gluing_e, &gluing),
            ("Higgs field of F^2", &two.higgs_f, &higgs_f),
            ("Higgs field of E^2", &two.higgs_e, &higgs_e),
        ] {
            if got != want {
                failures.push(format!("p = {p}: {label} is {got:?}, expected {want:?}"));
            }
        }
        if let Some(level) = two.search.found_at {
            failures.push(format!("p = {p}: isomorphism F^2 -> E^2 found at degree {level}"));
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))
}

fn criterion6() -> Outcome {
    for p in [3, 5, 7] {
        let s = load("prop28-curve", p);
        let ctx = PullbackContext::new(s.f.clone(), s.tau.clone()).map_err(|e| e.to_string())?;
        for r in (1..=2).filter(|&r| (r as u64) < p) {
            let f = SymPower::new(&ctx, r).and_then(|sp| sp.filtration(&ctx)).map_err(|e| e.to_string())?;
            ensure(f.ok(), || format!("p = {p}, r = {r}"))?;
        }
    }
    Ok(())
}

fn criterion7() -> Outcome {
    for p in [3, 5] {
        for ex in examples() {
            let s = load(ex.name, p);
            for c in 0..s.x.num_charts() {
                let v = verify_lemma32(&s.higgs, &s.lifts, c).map_err(|e| e.to_string())?;
                ensure(v.ok, || format!("{} chart {c}, p = {p}: {:?}", ex.name, v.failure))?;
            }
        }
    }
    Ok(())
}

fn perturbations(s: &Scenario, label: &str) -> Result<Vec<LiftData>, String> {
    (0..20)
        .map(|k| {
            let mut rng = rng_for(SEED + k, label, s.prime);
            perturb_lifts(&s.lifts, &mut rng).map_err(|e| e.to_string())
        })
        .collect()
}

fn criterion8() -> Outcome {
    for p in [3, 5, 7] {
        for name in ["affine-2chart", "p1-log-rank2"] {
            let s = load(name, p);
            for (k, lifts) in perturbations(&s, "acceptance/8")?.iter().enumerate() {
                let v = verify_lemma33(lifts).map_err(|e| e.to_string())?;
                ensure(v.ok, || format!("{name}, p = {p}, seed {k}: {:?}", v.failure))?;
            }
        }
    }
    Ok(())
}

fn criterion9() -> Outcome {
    for p in [3, 5, 7] {
        for name in ["affine-2chart", "p1-log-rank2", "affine-global-lift"] {
            let s = load(name, p);
            let t = verify_theorem(&s.higgs, &s.lifts).map_err(|e| e.to_string())?;
            let shape = if name == "affine-global-lift" {
                t.ob_f_zero && t.nu_zero && t.witness.iter().all(Matrix::is_identity)
            } else {
                !t.ob_f_zero
            };
            ensure(t.ok() && shape, || format!("{name}, p = {p}: given lifts"))?;
            for (k, lifts) in perturbations(&s, "acceptance/9")?.iter().enumerate() {
                let tk = verify_theorem(&s.higgs, lifts).map_err(|e| e.to_string())?;
                ensure(tk.ok() == t.ok(), || format!("{name}, p = {p}, seed {k}: truth value changed"))?;
            }
        }
    }
    Ok(())
}

fn criterion10() -> Outcome {
    for p in [3, 5] {
        for ex in examples() {
            let s = load(ex.name, p);
            let mut all = vec![s.lifts.clone()];
            all.extend(perturbations(&s, "acceptance/10")?.into_iter().take(3));
            for (k, lifts) in all.iter().enumerate() {
                let t = verify_theorem(&s.higgs, lifts).map_err(|e| e.to_string())?;
                let cx = inverse_cartier(&s.higgs, &lifts.fx).map_err(|e| e.to_string())?;
                for (label, b) in [("C^-1(E)", &cx), ("V1", &t.v1), ("V2", &t.v2)] {
                    let curved = b.locals().iter().any(|a| a.curvature().iter().any(|(_, m)| !m.is_zero()));
                    ensure(!curved && b.is_flat(), || format!("{}, p = {p}, lifts {k}: {label} is curved", ex.name))?;
                }
            }
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 10] = [
        (1, "Higgs modules and A_r-modules correspond", criterion1),
        (2, "truncated exponential laws", criterion2),
        (3, "tp1 and tp2 agree via the exponential witness", criterion3),
        (4, "rank, direct sum and tensor compatibility", criterion4),
        (5, "F^r and E^r matrices and isomorphism claims", criterion5),
        (6, "filtration of Sym^r(E_tau)", criterion6),
        (7, "local intertwining of Cartier connections", criterion7),
        (8, "cochain identity for the Frobenius obstructions", criterion8),
        (9, "twisted functoriality of the inverse Cartier transform", criterion9),
        (10, "flatness of inverse Cartier outputs", criterion10),
    ];
    let mut failed = 0;
    for (n, title, run) in criteria {
        let start = std::time::Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(()) => println!("criterion {n}: PASS {title} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL {title} ({secs:.2}s): {why}");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
