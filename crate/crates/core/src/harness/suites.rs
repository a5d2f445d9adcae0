//! Acceptance suites run by `verify`.

use std::sync::Arc;

use rand::Rng;
use serde_json::{json, Value};

use super::checks::{prop28_claims, prop28_display};
use super::random::{perturb_lifts, random_in_algebra, random_nilpotent, random_sections, rng_for};
use super::Options;
use crate::cartier::{inverse_cartier, verify_lemma32, verify_lemma33, verify_theorem, LiftData};
use crate::cech::{bundle_iso_check, GluedHiggsBundle};
use crate::error::{Error, Result};
use crate::higgs::{armodule_to_higgs, higgs_to_armodule, trunc_exp, HiggsLocal};
use crate::matrix::{FormMatrix, Matrix};
use crate::pullback::{
    check_direct_sum_compat, check_tensor_compat, compare_representatives, compare_tp1_tp2, prop28_report, tp2, tp3,
    PullbackContext, SymPower,
};
use crate::registry::{examples, find};
use crate::ring::{Modulus, Ring, Var};
use crate::scenario::Scenario;

pub const SUITES: &[&str] =
    &["exp-algebra", "lemma22", "prop24", "prop25", "prop28", "lemma26", "lemma32", "lemma33", "theorem", "flatness"];

const EXP_CASES: usize = 500;
const ROUND_TRIP_CASES: usize = 100;
const RANDOM_BUNDLES: usize = 10;
const LIFT_SEEDS: usize = 20;
const MAX_LISTED_FAILURES: usize = 10;

/// Outcome of one suite at one prime.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub suite: String,
    pub prime: u64,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(suite: &str, prime: u64) -> SuiteOutcome {
        SuiteOutcome { suite: suite.into(), prime, cases: 0, passed: 0, failures: Vec::new() }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.cases
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(what());
        }
    }

    fn record_result(&mut self, res: Result<bool>, what: impl Fn() -> String) {
        match res {
            Ok(ok) => self.record(ok, what),
            Err(e) => self.record(false, || format!("{}: {e}", what())),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "prime": self.prime,
            "cases": self.cases,
            "passed": self.passed,
            "result": self.ok(),
            "failures": self.failures,
        })
    }
}

pub fn run_suite(name: &str, p: u64, opts: &Options) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new(name, p);
    match name {
        "exp-algebra" => exp_algebra(&mut out, p, opts)?,
        "lemma22" => lemma22(&mut out, p, opts)?,
        "prop24" => prop24(&mut out, p, opts),
        "prop25" => prop25(&mut out, p, opts)?,
        "prop28" => prop28(&mut out, p, opts),
        "lemma26" => lemma26(&mut out, p),
        "lemma32" => lemma32(&mut out, p),
        "lemma33" => lemma33(&mut out, p, opts),
        "theorem" => theorem(&mut out, p, opts),
        "flatness" => flatness(&mut out, p, opts),
        other => return Err(Error::Invalid(format!("unknown suite `{other}`"))),
    }
    Ok(out)
}

fn polynomial_ring(p: u64, names: &[&str]) -> Result<Ring> {
    Ring::polynomial(names.iter().map(|n| Var::ordinary(n)).collect(), Modulus::new(p, 1)?)
}

fn load(name: &str, p: u64) -> Result<Scenario> {
    let ex = find(name).ok_or_else(|| Error::Invalid(format!("no example `{name}`")))?;
    ex.load(p).map_err(|e| e.error)
}

fn exp_algebra(out: &mut SuiteOutcome, p: u64, opts: &Options) -> Result<()> {
    let ring = polynomial_ring(p, &["x"])?;
    let mut rng = rng_for(opts.seed, "exp-algebra", p);
    let r = p as usize - 1;
    for case in 0..EXP_CASES {
        let n = rng.gen_range(1..=4);
        let base = random_nilpotent(&ring, n, &mut rng);
        let a = random_in_algebra(&base, &mut rng, 3);
        let b = random_in_algebra(&base, &mut rng, 3);
        let res = (|| {
            let ea = trunc_exp(&a, r)?;
            let inverse_ok = ea.mul(&trunc_exp(&a.neg(), r)?).is_identity();
            let sum_ok = trunc_exp(&a.add(&b), r)? == ea.mul(&trunc_exp(&b, r)?);
            Ok(inverse_ok && sum_ok)
        })();
        out.record_result(res, || format!("case {case}"));
    }
    let n = random_nilpotent(&ring, 2, &mut rng);
    let rejected = matches!(trunc_exp(&n, p as usize), Err(Error::FactorialNotInvertible { .. }));
    out.record(rejected, || format!("exp with r = {p} was not rejected"));
    Ok(())
}

fn lemma22(out: &mut SuiteOutcome, p: u64, opts: &Options) -> Result<()> {
    let mut rng = rng_for(opts.seed, "lemma22", p);
    let rings = [polynomial_ring(p, &["x"])?, polynomial_ring(p, &["x", "y"])?];
    for case in 0..ROUND_TRIP_CASES {
        let ring = &rings[rng.gen_range(0..rings.len())];
        let n = rng.gen_range(1..=4);
        let base = random_nilpotent(ring, n, &mut rng);
        let comps = (0..ring.nvars()).map(|_| random_in_algebra(&base, &mut rng, 2)).collect();
        let res = (|| {
            let e = HiggsLocal::new(FormMatrix::from_components(ring, comps))?;
            let r = rng.gen_range(e.exponent()..p as usize);
            let module = higgs_to_armodule(&e, r)?;
            let back = armodule_to_higgs(&module);
            Ok(back == e && higgs_to_armodule(&back, r)? == module)
        })();
        out.record_result(res, || format!("case {case}"));
    }
    Ok(())
}

fn prop24(out: &mut SuiteOutcome, p: u64, opts: &Options) {
    let mut rng = rng_for(opts.seed, "prop24", p);
    for name in ["p1-log-rank2", "affine-2chart"] {
        for r in (1..=2).filter(|&r| (r as u64) < p) {
            let res = (|| {
                let s = load(name, p)?;
                let ctx = PullbackContext::new(s.f.clone(), s.tau.clone())?;
                let c = compare_tp1_tp2(&s.higgs, &ctx, r)?;
                let b2 = tp2(&s.higgs, &ctx, r)?;
                let b3 = tp3(&s.higgs, &ctx, r)?;
                let id: Vec<Matrix> = b2.covering().charts().iter().map(|c| Matrix::identity(c, b2.rank())).collect();
                let sections = random_sections(&s.f, &mut rng)?;
                let rep = compare_representatives(&s.higgs, &ctx, &sections, r)?;
                Ok(c.check.ok && bundle_iso_check(&b2, &b3, &id).ok && rep.check.ok)
            })();
            out.record_result(res, || format!("{name} r = {r}"));
        }
    }
}

/// A rank-`n` log Higgs bundle on the two-chart projective line with
/// constant nilpotent field `N dlog x`.
pub(crate) fn random_p1_bundle(cov: &Arc<crate::cech::Covering>, n: usize, rng: &mut impl Rng) -> Result<GluedHiggsBundle> {
    let p = cov.p();
    let mut base = vec![vec![0i64; n]; n];
    let mut start = 0;
    while start < n {
        let size = rng.gen_range(1..=(n - start).min(p as usize));
        for i in start..start + size {
            for j in i + 1..start + size {
                base[i][j] = rng.gen_range(0..p) as i64;
            }
        }
        start += size;
    }
    let locals = (0..2)
        .map(|c| {
            let ring = cov.chart(c);
            let sign = if c == 0 { 1 } else { -1 };
            let rows = base.iter().map(|row| row.iter().map(|&k| ring.constant(sign * k)).collect()).collect();
            HiggsLocal::new(FormMatrix::from_components(ring, vec![Matrix::from_rows(ring, rows)]))
        })
        .collect::<Result<Vec<_>>>()?;
    let transitions = cov.pairs().iter().map(|pr| Matrix::identity(&pr.ring, n)).collect();
    GluedHiggsBundle::glue(cov.clone(), locals, transitions)
}

fn prop25(out: &mut SuiteOutcome, p: u64, opts: &Options) -> Result<()> {
    let mut rng = rng_for(opts.seed, "prop25", p);
    let base = load("p1-log-rank2", p)?;
    for case in 0..RANDOM_BUNDLES {
        let res = (|| {
            let lifts = perturb_lifts(&base.lifts, &mut rng)?;
            let ctx = PullbackContext::new(base.f.clone(), lifts.f.obstruction()?)?;
            let n1 = rng.gen_range(1..=3);
            let n2 = rng.gen_range(1..=3);
            let e1 = random_p1_bundle(&base.x, n1, &mut rng)?;
            let e2 = random_p1_bundle(&base.x, n2, &mut rng)?;
            let r = e1.exponent().max(e2.exponent()).max(1);
            let rank_ok = tp2(&e1, &ctx, r)?.rank() == n1 && tp2(&e2, &ctx, r)?.rank() == n2;
            Ok(rank_ok && check_direct_sum_compat(&e1, &e2, &ctx, r)?.check.ok)
        })();
        out.record_result(res, || format!("random bundles, case {case}"));
    }
    let res = (|| {
        let s = load("tensor-pair", p)?;
        let ctx = PullbackContext::new(s.f.clone(), s.tau.clone())?;
        let e2 = s.higgs2.as_ref().ok_or_else(|| Error::Invalid("tensor-pair has no second bundle".into()))?;
        Ok(check_tensor_compat(&s.higgs, e2, &ctx, 1, 1)?.check.ok)
    })();
    out.record_result(res, || "tensor-pair with r1 = r2 = 1".into());
    Ok(())
}

fn prop28(out: &mut SuiteOutcome, p: u64, opts: &Options) {
    let cap = opts.degree_cap.unwrap_or(2 * p as u32);
    for r in (1..=2).filter(|&r| (r as u64) < p) {
        let res: Result<Vec<_>> = (|| {
            let s = load("prop28-curve", p)?;
            let ctx = PullbackContext::new(s.f.clone(), s.tau.clone())?;
            let rep = prop28_report(&ctx, r, cap, opts.seed)?;
            let display = prop28_display(&ctx.tau_vector(0)[0], s.f.target().chart(0), r)?;
            Ok(prop28_claims(&rep, Some(&display)))
        })();
        match res {
            Ok(claims) => {
                for (claim, ok) in claims {
                    out.record(ok, || format!("r = {r}: {claim}"));
                }
            }
            Err(e) => out.record(false, || format!("r = {r}: {e}")),
        }
    }
}

fn lemma26(out: &mut SuiteOutcome, p: u64) {
    for name in ["prop28-curve", "affine-2chart"] {
        for r in (1..=2).filter(|&r| (r as u64) < p) {
            let res = (|| {
                let s = load(name, p)?;
                let ctx = PullbackContext::new(s.f.clone(), s.tau.clone())?;
                Ok(SymPower::new(&ctx, r)?.filtration(&ctx)?.ok())
            })();
            out.record_result(res, || format!("{name} r = {r}"));
        }
    }
}

fn lemma32(out: &mut SuiteOutcome, p: u64) {
    for ex in examples() {
        match ex.load(p) {
            Ok(s) => {
                for c in 0..s.x.num_charts() {
                    let res = verify_lemma32(&s.higgs, &s.lifts, c).map(|v| v.ok);
                    out.record_result(res, || format!("{} chart {c}", ex.name));
                }
            }
            Err(e) => out.record(false, || format!("{}: {e}", ex.name)),
        }
    }
}

fn perturbed(s: &Scenario, label: &str, p: u64, opts: &Options) -> Vec<Result<LiftData>> {
    let mut rng = rng_for(opts.seed, label, p);
    (0..LIFT_SEEDS).map(|_| perturb_lifts(&s.lifts, &mut rng)).collect()
}

fn lemma33(out: &mut SuiteOutcome, p: u64, opts: &Options) {
    for name in ["affine-2chart", "p1-log-rank2"] {
        let s = match load(name, p) {
            Ok(s) => s,
            Err(e) => {
                out.record(false, || format!("{name}: {e}"));
                continue;
            }
        };
        out.record_result(verify_lemma33(&s.lifts).map(|v| v.ok), || format!("{name} given lifts"));
        for (k, lifts) in perturbed(&s, &format!("lemma33/{name}"), p, opts).into_iter().enumerate() {
            let res = lifts.and_then(|l| verify_lemma33(&l)).map(|v| v.ok);
            out.record_result(res, || format!("{name} perturbation {k}"));
        }
    }
}

fn theorem(out: &mut SuiteOutcome, p: u64, opts: &Options) {
    for name in ["affine-2chart", "p1-log-rank2", "affine-global-lift"] {
        let s = match load(name, p) {
            Ok(s) => s,
            Err(e) => {
                out.record(false, || format!("{name}: {e}"));
                continue;
            }
        };
        let base = verify_theorem(&s.higgs, &s.lifts);
        let base_ok = match &base {
            Ok(t) => {
                let degenerate = t.ob_f_zero && t.nu_zero;
                let expected = if name == "affine-global-lift" { degenerate } else { !t.ob_f_zero };
                t.ok() && expected && (!degenerate || t.witness.iter().all(Matrix::is_identity))
            }
            Err(_) => false,
        };
        out.record(base_ok, || format!("{name} given lifts"));
        for (k, lifts) in perturbed(&s, &format!("theorem/{name}"), p, opts).into_iter().enumerate() {
            let res = lifts.and_then(|l| verify_theorem(&s.higgs, &l)).map(|t| t.ok() == base_ok);
            out.record_result(res, || format!("{name} perturbation {k}"));
        }
    }
}

fn flatness(out: &mut SuiteOutcome, p: u64, opts: &Options) {
    for ex in examples() {
        let s = match ex.load(p) {
            Ok(s) => s,
            Err(e) => {
                out.record(false, || format!("{}: {e}", ex.name));
                continue;
            }
        };
        let mut all = vec![Ok(s.lifts.clone())];
        all.extend(perturbed(&s, &format!("flatness/{}", ex.name), p, opts).into_iter().take(3));
        for (k, lifts) in all.into_iter().enumerate() {
            let res = lifts.and_then(|l| {
                let t = verify_theorem(&s.higgs, &l)?;
                let cx = inverse_cartier(&s.higgs, &l.fx)?;
                Ok(cx.is_flat() && t.v1.is_flat() && t.v2.is_flat())
            });
            out.record_result(res, || format!("{} lifts {k}", ex.name));
        }
    }
}
