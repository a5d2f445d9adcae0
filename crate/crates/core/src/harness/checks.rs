//! The checks a scenario can request.

use serde_json::{json, Value};

use super::random::{random_sections, rng_for};
use super::Options;
use crate::cartier::{inverse_cartier, verify_descent, verify_lemma32, verify_lemma33, verify_theorem};
use crate::cech::{bundle_iso_check, GluedHiggsBundle, IsoCheck};
use crate::error::{Error, Result};
use crate::higgs::{armodule_to_higgs, higgs_to_armodule, inv_factorial};
use crate::matrix::Matrix;
use crate::pullback::{
    check_direct_sum_compat, check_tensor_compat, compare_representatives, compare_tp1_tp2, frame_change, prop28_report,
    tp2, tp3, ExtensionE, Prop28Report, PullbackContext, SymPower,
};
use crate::ring::RingElem;
use crate::scenario::Scenario;

/// Result of one check on one scenario.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub check: String,
    pub ok: bool,
    pub summary: String,
    pub detail: Value,
}

impl CheckOutcome {
    fn new(check: &str, ok: bool, summary: impl Into<String>, detail: Value) -> CheckOutcome {
        CheckOutcome { check: check.into(), ok, summary: summary.into(), detail }
    }

    pub fn to_json(&self) -> Value {
        json!({"check": self.check, "result": self.ok, "summary": self.summary, "detail": self.detail})
    }
}

/// Whether a computation error reflects the input rather than a failed identity.
pub fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::ExponentTooLarge { .. }
            | Error::FactorialNotInvertible { .. }
            | Error::CocycleFailure(_)
            | Error::ShapeMismatch(_)
            | Error::Parse(_)
            | Error::Invalid(_)
            | Error::NotAFrobeniusLift(_)
            | Error::LogViolation { .. }
    )
}

/// The order used for twisted pullbacks of the scenario's bundle.
pub fn order(s: &Scenario) -> usize {
    s.r.unwrap_or_else(|| s.higgs.exponent().max(1))
}

fn context(s: &Scenario) -> Result<PullbackContext> {
    PullbackContext::new(s.f.clone(), s.tau.clone())
}

fn identity_witness(b: &GluedHiggsBundle) -> Vec<Matrix> {
    b.covering().charts().iter().map(|c| Matrix::identity(c, b.rank())).collect()
}

fn iso_json(c: &IsoCheck) -> Value {
    json!({"result": c.ok, "failure": c.failure})
}

pub fn run_check(s: &Scenario, name: &str, opts: &Options) -> Result<CheckOutcome> {
    match name {
        "lemma22" => lemma22(s),
        "tp-compare" => tp_compare(s),
        "representative" => representative(s, opts),
        "tensor" => tensor(s),
        "direct-sum" => direct_sum(s),
        "extension" => extension(s),
        "sym-filtration" => sym_filtration(s),
        "prop28" => prop28(s, opts),
        "lemma32" => lemma32(s),
        "lemma33" => {
            let v = verify_lemma33(&s.lifts)?;
            Ok(CheckOutcome::new(name, v.ok, v.failure.clone().unwrap_or_else(|| v.statement.clone()), v.to_json()))
        }
        "descent" => {
            let v = verify_descent(&s.higgs, &s.lifts)?;
            Ok(CheckOutcome::new(name, v.ok, v.failure.clone().unwrap_or_else(|| v.statement.clone()), v.to_json()))
        }
        "theorem" => theorem(s),
        "flatness" => flatness(s),
        other => Err(Error::Invalid(format!("unknown check `{other}`"))),
    }
}

fn lemma22(s: &Scenario) -> Result<CheckOutcome> {
    let r = order(s);
    let mut charts = Vec::new();
    let mut ok = true;
    for (c, local) in s.higgs.locals().iter().enumerate() {
        let module = higgs_to_armodule(local, r)?;
        let back = armodule_to_higgs(&module);
        let again = higgs_to_armodule(&back, r)?;
        let good = back == *local && again == module;
        ok &= good;
        charts.push(json!({"chart": c, "result": good}));
    }
    Ok(CheckOutcome::new("lemma22", ok, format!("Higgs fields and A_{r}-modules correspond on every chart"), json!({"r": r, "charts": charts})))
}

fn tp_compare(s: &Scenario) -> Result<CheckOutcome> {
    let ctx = context(s)?;
    let r = order(s);
    let c = compare_tp1_tp2(&s.higgs, &ctx, r)?;
    let b2 = tp2(&s.higgs, &ctx, r)?;
    let b3 = tp3(&s.higgs, &ctx, r)?;
    let c3 = bundle_iso_check(&b2, &b3, &identity_witness(&b2));
    let ok = c.check.ok && c3.ok;
    let summary = c.check.failure.clone().or_else(|| c3.failure.clone()).unwrap_or_else(|| c.statement.clone());
    Ok(CheckOutcome::new("tp-compare", ok, summary, json!({"r": r, "tp1_tp2": c.to_json(), "tp2_tp3": iso_json(&c3)})))
}

fn representative(s: &Scenario, opts: &Options) -> Result<CheckOutcome> {
    let ctx = context(s)?;
    let mut rng = rng_for(opts.seed, "representative", s.prime);
    let sections = random_sections(&s.f, &mut rng)?;
    let c = compare_representatives(&s.higgs, &ctx, &sections, order(s))?;
    Ok(CheckOutcome::new("representative", c.check.ok, c.check.failure.clone().unwrap_or(c.statement.clone()), c.to_json()))
}

fn second_bundle<'a>(s: &'a Scenario, check: &str) -> Result<&'a GluedHiggsBundle> {
    s.higgs2.as_ref().ok_or_else(|| Error::Invalid(format!("check `{check}` needs \"higgs2\"")))
}

fn tensor(s: &Scenario) -> Result<CheckOutcome> {
    let ctx = context(s)?;
    let e2 = second_bundle(s, "tensor")?;
    let r1 = s.higgs.exponent().max(1);
    let r2 = e2.exponent().max(1);
    let c = check_tensor_compat(&s.higgs, e2, &ctx, r1, r2)?;
    Ok(CheckOutcome::new("tensor", c.check.ok, c.check.failure.clone().unwrap_or(c.statement.clone()), json!({"r1": r1, "r2": r2, "comparison": c.to_json()})))
}

fn direct_sum(s: &Scenario) -> Result<CheckOutcome> {
    let ctx = context(s)?;
    let e2 = s.higgs2.as_ref().unwrap_or(&s.higgs);
    let r = order(s).max(e2.exponent());
    let c = check_direct_sum_compat(&s.higgs, e2, &ctx, r)?;
    let rank_ok = tp2(&s.higgs, &ctx, r)?.rank() == s.higgs.rank();
    let ok = c.check.ok && rank_ok;
    Ok(CheckOutcome::new(
        "direct-sum",
        ok,
        c.check.failure.clone().unwrap_or(c.statement.clone()),
        json!({"r": r, "rank_preserved": rank_ok, "comparison": c.to_json()}),
    ))
}

fn extension(s: &Scenario) -> Result<CheckOutcome> {
    let ctx = context(s)?;
    let e = ExtensionE::build(&ctx)?;
    let ok = e.theta_is_nonzero() && e.theta_squares_to_zero();
    Ok(CheckOutcome::new(
        "extension",
        ok,
        "E_tau is a rank m+1 Higgs module with theta nonzero and theta^2 = 0",
        json!({
            "split": e.is_split(),
            "theta_nonzero": e.theta_is_nonzero(),
            "theta_squared_zero": e.theta_squares_to_zero(),
            "bundle": e.bundle().to_json(),
        }),
    ))
}

fn sym_filtration(s: &Scenario) -> Result<CheckOutcome> {
    let ctx = context(s)?;
    let mut ok = true;
    let mut levels = Vec::new();
    for r in 1..=order(s) {
        let fil = SymPower::new(&ctx, r)?.filtration(&ctx)?;
        ok &= fil.ok();
        levels.push(json!({"r": r, "filtration": fil.to_json()}));
    }
    Ok(CheckOutcome::new("sym-filtration", ok, "graded pieces of Sym^r(E_tau) match f^*A_r", json!(levels)))
}

/// Reference gluing and Higgs matrices for the curve case, in the frame
/// convention: gluing `a^(j-i)/(j-i)!`, Higgs superdiagonals `1` for `F^r`
/// and `1/(r-k)` for `E^r`.
pub struct Prop28Display {
    pub gluing: Matrix,
    pub higgs_f: Matrix,
    pub higgs_e: Matrix,
}

pub fn prop28_display(a: &RingElem, chart: &crate::ring::Ring, r: usize) -> Result<Prop28Display> {
    let pair = a.ring();
    let n = r + 1;
    let mut gluing = Matrix::zero(pair, n, n);
    let mut higgs_f = Matrix::zero(chart, n, n);
    let mut higgs_e = Matrix::zero(chart, n, n);
    for i in 0..n {
        for j in i..n {
            gluing.set(i, j, &a.pow((j - i) as u32) * &inv_factorial(pair, j - i)?);
        }
        if i + 1 < n {
            higgs_f.set(i, i + 1, chart.one());
            let k = chart.constant((r - i) as i64);
            higgs_e.set(i, i + 1, k.try_inverse().ok_or_else(|| Error::NotUnit(k.to_string()))?);
        }
    }
    Ok(Prop28Display { gluing, higgs_f, higgs_e })
}

/// Booleans for each claim about the comparison at order `r`.
pub fn prop28_claims(rep: &Prop28Report, display: Option<&Prop28Display>) -> Vec<(&'static str, bool)> {
    let mut out = Vec::new();
    if let Some(d) = display {
        out.push(("gluingF matches display", rep.gluing_f == d.gluing));
        out.push(("gluingE matches display", rep.gluing_e == d.gluing));
        out.push(("higgsF matches display", rep.higgs_f == d.higgs_f));
        out.push(("higgsE matches display", rep.higgs_e == d.higgs_e));
    }
    if rep.r <= 1 {
        out.push(("isomorphic for r <= 1", rep.explicit.ok && rep.search.found()));
    } else {
        out.push(("no isomorphism within the degree cap", !rep.search.found()));
    }
    out
}

fn prop28(s: &Scenario, opts: &Options) -> Result<CheckOutcome> {
    let ctx = context(s)?;
    let cap = opts.degree_cap.or(s.cap).unwrap_or(2 * s.prime as u32);
    let y = s.f.target();
    let trivial_frame = !y.pairs().is_empty() && frame_change(&s.f, 0)?.is_identity();
    let mut ok = true;
    let mut levels = Vec::new();
    let mut failed = Vec::new();
    for r in 1..=order(s) {
        let rep = prop28_report(&ctx, r, cap, opts.seed)?;
        let display = if trivial_frame {
            Some(prop28_display(&ctx.tau_vector(0)[0], y.chart(0), r)?)
        } else {
            None
        };
        let claims = prop28_claims(&rep, display.as_ref());
        for (claim, good) in &claims {
            if !good {
                ok = false;
                failed.push(format!("r = {r}: {claim}"));
            }
        }
        let mut j = rep.to_json();
        j["claims"] = claims.iter().map(|(c, g)| json!({"claim": c, "result": g})).collect();
        if let Some(d) = &display {
            j["display"] = json!({"gluing": d.gluing.to_json(), "higgsF": d.higgs_f.to_json(), "higgsE": d.higgs_e.to_json()});
        }
        levels.push(j);
    }
    let summary = if failed.is_empty() { "F^r and E^r compare as displayed".to_string() } else { failed.join("; ") };
    Ok(CheckOutcome::new("prop28", ok, summary, json!({"cap": cap, "levels": levels})))
}

fn lemma32(s: &Scenario) -> Result<CheckOutcome> {
    let mut ok = true;
    let mut charts = Vec::new();
    let mut failure = None;
    for c in 0..s.x.num_charts() {
        let v = verify_lemma32(&s.higgs, &s.lifts, c)?;
        if !v.ok && failure.is_none() {
            failure = Some(format!("chart {c}: {}", v.failure.clone().unwrap_or_default()));
        }
        ok &= v.ok;
        charts.push(v.to_json());
    }
    Ok(CheckOutcome::new("lemma32", ok, failure.unwrap_or_else(|| "exp(theta . nu) intertwines the connections on every chart".into()), json!(charts)))
}

fn theorem(s: &Scenario) -> Result<CheckOutcome> {
    let t = verify_theorem(&s.higgs, &s.lifts)?;
    let degenerate = t.ob_f_zero && t.nu_zero;
    let witness_identity = t.witness.iter().all(Matrix::is_identity);
    let ok = t.ok() && (!degenerate || witness_identity);
    let summary = if ok {
        if degenerate {
            "untwisted case: identity witness".to_string()
        } else {
            "C^{-1}_Y f°(E) is isomorphic to f^* C^{-1}_X(E)".to_string()
        }
    } else {
        t.iso.failure.clone().or(t.descent.failure.clone()).or(t.lemma33.failure.clone()).unwrap_or_else(|| "a sub-check failed".into())
    };
    let mut j = t.to_json();
    j["witness_is_identity"] = json!(witness_identity);
    Ok(CheckOutcome::new("theorem", ok, summary, j))
}

fn flatness(s: &Scenario) -> Result<CheckOutcome> {
    let cx = inverse_cartier(&s.higgs, &s.lifts.fx)?;
    let t = verify_theorem(&s.higgs, &s.lifts)?;
    let items = [("C^{-1}_X(E)", &cx), ("C^{-1}_Y(f°E)", &t.v1), ("f^* C^{-1}_X(E)", &t.v2)];
    let mut ok = true;
    let mut detail = Vec::new();
    let mut failure = None;
    for (name, b) in items {
        let fail = b.curvature_failure();
        if fail.is_some() && failure.is_none() {
            failure = Some(format!("{name}: {}", fail.clone().unwrap_or_default()));
        }
        ok &= fail.is_none();
        detail.push(json!({"bundle": name, "flat": fail.is_none(), "failure": fail}));
    }
    Ok(CheckOutcome::new("flatness", ok, failure.unwrap_or_else(|| "all connections are flat".into()), json!(detail)))
}
