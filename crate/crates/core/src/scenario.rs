//! Scenario files: JSON descriptions of coverings, a morphism with its lifts,
//! Higgs bundles and the checks to run.
//!
//! ```json
//! {
//!   "name": "example", "prime": 5,
//!   "X": covering, "Y": covering, "f": [hom, ..],
//!   "lifts": {"FX": [hom, ..], "FY": [hom, ..], "f": [hom, ..]},
//!   "higgs": {"rank": 2, "locals": [{"x": matrix}, ..], "transitions": [matrix, ..]},
//!   "higgs2": {..}, "tau": [{"x": elem}, ..], "r": 1, "cap": 10,
//!   "checks": ["theorem"]
//! }
//! ```
//!
//! A covering is `{"charts": [ring, ..], "overlaps": [{"pair": [i, j],
//! "ring": ring, "restrict_i": hom, "restrict_j": hom}, ..], "triples":
//! [{"idx": [i, j, k], "ring": ring, "restrict": [hom, hom, hom]}, ..]}`.
//! `Y` defaults to `X`, `f` to the identity, the Frobenius lifts to
//! `x -> x^p`, the lifts of `f` to coefficient residues and `tau` to
//! `ob(f)`. Transitions default to the identity.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::cartier::LiftData;
use crate::cech::{
    CoverMap, Covering, DerivationCochain, FrobeniusLifts, GluedHiggsBundle, MorphismLifts, PairOverlap, Restriction,
    TripleOverlap,
};
use crate::error::Error;
use crate::higgs::HiggsLocal;
use crate::matrix::{FormMatrix, Matrix};
use crate::ring::json::{elem_from_json, hom_from_json, hom_to_json, ring_from_json, ring_to_json};
use crate::ring::{Modulus, Ring, RingHom, TwistedDerivation, MAX_PRIME};

/// Checks a scenario may request, in the order they are documented.
pub const CHECKS: &[&str] = &[
    "lemma22",
    "tp-compare",
    "representative",
    "tensor",
    "direct-sum",
    "extension",
    "sym-filtration",
    "prop28",
    "lemma32",
    "lemma33",
    "descent",
    "theorem",
    "flatness",
];

/// A scenario input error with the JSON location where it was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub location: String,
    pub error: Error,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.error)
    }
}

impl std::error::Error for InputError {}

type Parsed<T> = std::result::Result<T, InputError>;

trait Locate<T> {
    fn at(self, loc: impl fmt::Display) -> Parsed<T>;
}

impl<T> Locate<T> for crate::Result<T> {
    fn at(self, loc: impl fmt::Display) -> Parsed<T> {
        self.map_err(|error| InputError { location: loc.to_string(), error })
    }
}

fn missing(loc: &str, what: &str) -> InputError {
    InputError { location: loc.into(), error: Error::Parse(format!("missing {what}")) }
}

fn field<'a>(v: &'a Value, key: &str, loc: &str) -> Parsed<&'a Value> {
    v.get(key).ok_or_else(|| missing(loc, &format!("\"{key}\"")))
}

fn array<'a>(v: &'a Value, loc: &str) -> Parsed<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| InputError { location: loc.into(), error: Error::Parse(format!("expected an array, found {v}")) })
}

fn index(v: &Value, loc: &str) -> Parsed<usize> {
    v.as_u64()
        .map(|k| k as usize)
        .ok_or_else(|| InputError { location: loc.into(), error: Error::Parse(format!("expected an index, found {v}")) })
}

/// A parsed and validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub prime: u64,
    pub x: Arc<Covering>,
    pub y: Arc<Covering>,
    pub f: Arc<CoverMap>,
    pub lifts: LiftData,
    pub higgs: GluedHiggsBundle,
    pub higgs2: Option<GluedHiggsBundle>,
    pub tau: DerivationCochain,
    pub r: Option<usize>,
    pub cap: Option<u32>,
    pub checks: Vec<String>,
}

pub fn covering_from_json(v: &Value, modulus: Modulus, loc: &str) -> Parsed<Covering> {
    let charts = array(field(v, "charts", loc)?, &format!("{loc}.charts"))?
        .iter()
        .enumerate()
        .map(|(c, r)| ring_from_json(r, modulus).at(format!("{loc}.charts[{c}]")))
        .collect::<Parsed<Vec<Ring>>>()?;
    let mut pairs = Vec::new();
    if let Some(ov) = v.get("overlaps") {
        for (k, o) in array(ov, &format!("{loc}.overlaps"))?.iter().enumerate() {
            let here = format!("{loc}.overlaps[{k}]");
            let pair = array(field(o, "pair", &here)?, &here)?;
            if pair.len() != 2 {
                return Err(InputError { location: here, error: Error::Parse("\"pair\" needs two chart indices".into()) });
            }
            let (i, j) = (index(&pair[0], &here)?, index(&pair[1], &here)?);
            if i >= charts.len() || j >= charts.len() || i == j {
                return Err(InputError { location: here, error: Error::Invalid(format!("bad chart pair ({i}, {j})")) });
            }
            let ring = ring_from_json(field(o, "ring", &here)?, modulus).at(format!("{here}.ring"))?;
            let ri = hom_from_json(&charts[i], &ring, field(o, "restrict_i", &here)?).at(format!("{here}.restrict_i"))?;
            let rj = hom_from_json(&charts[j], &ring, field(o, "restrict_j", &here)?).at(format!("{here}.restrict_j"))?;
            pairs.push(PairOverlap {
                i,
                j,
                ring,
                restrict_i: Restriction::new(ri).at(format!("{here}.restrict_i"))?,
                restrict_j: Restriction::new(rj).at(format!("{here}.restrict_j"))?,
            });
        }
    }
    let mut triples = Vec::new();
    if let Some(tv) = v.get("triples") {
        for (k, t) in array(tv, &format!("{loc}.triples"))?.iter().enumerate() {
            let here = format!("{loc}.triples[{k}]");
            let idx = array(field(t, "idx", &here)?, &here)?
                .iter()
                .map(|x| index(x, &here))
                .collect::<Parsed<Vec<usize>>>()?;
            if idx.len() != 3 || idx.iter().any(|&c| c >= charts.len()) {
                return Err(InputError { location: here, error: Error::Parse("\"idx\" needs three chart indices".into()) });
            }
            let ring = ring_from_json(field(t, "ring", &here)?, modulus).at(format!("{here}.ring"))?;
            let homs = array(field(t, "restrict", &here)?, &here)?;
            if homs.len() != 3 {
                return Err(InputError { location: here, error: Error::Parse("\"restrict\" needs three homs".into()) });
            }
            let mut rs = Vec::new();
            for (s, h) in homs.iter().enumerate() {
                let hom = hom_from_json(&charts[idx[s]], &ring, h).at(format!("{here}.restrict[{s}]"))?;
                rs.push(Restriction::new(hom).at(format!("{here}.restrict[{s}]"))?);
            }
            let restrict: [Restriction; 3] = rs.try_into().expect("three restrictions");
            triples.push(TripleOverlap { idx: [idx[0], idx[1], idx[2]], ring, restrict });
        }
    }
    Covering::new(charts, pairs, triples).at(loc)
}

pub fn covering_to_json(c: &Covering) -> Value {
    json!({
        "charts": c.charts().iter().map(ring_to_json).collect::<Vec<_>>(),
        "overlaps": c.pairs().iter().map(|p| json!({
            "pair": [p.i, p.j],
            "ring": ring_to_json(&p.ring),
            "restrict_i": hom_to_json(&p.restrict_i.hom),
            "restrict_j": hom_to_json(&p.restrict_j.hom),
        })).collect::<Vec<_>>(),
        "triples": c.triples().iter().map(|t| json!({
            "idx": t.idx,
            "ring": ring_to_json(&t.ring),
            "restrict": t.restrict.iter().map(|r| hom_to_json(&r.hom)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn homs_from_json(v: &Value, sources: &[Ring], targets: &[Ring], loc: &str) -> Parsed<Vec<RingHom>> {
    let arr = array(v, loc)?;
    if arr.len() != sources.len() {
        return Err(InputError {
            location: loc.into(),
            error: Error::ShapeMismatch(format!("{} homs for {} charts", arr.len(), sources.len())),
        });
    }
    arr.iter()
        .enumerate()
        .map(|(c, h)| hom_from_json(&sources[c], &targets[c], h).at(format!("{loc}[{c}]")))
        .collect()
}

/// Parses `{"rank", "locals", "transitions"}` on a covering.
pub fn higgs_from_json(v: &Value, cov: &Arc<Covering>, loc: &str) -> Parsed<GluedHiggsBundle> {
    let rank = index(field(v, "rank", loc)?, &format!("{loc}.rank"))?;
    let locals_v = array(field(v, "locals", loc)?, &format!("{loc}.locals"))?;
    if locals_v.len() != cov.num_charts() {
        return Err(InputError {
            location: format!("{loc}.locals"),
            error: Error::ShapeMismatch(format!("{} local fields for {} charts", locals_v.len(), cov.num_charts())),
        });
    }
    let locals = locals_v
        .iter()
        .enumerate()
        .map(|(c, l)| {
            let here = format!("{loc}.locals[{c}]");
            let theta = FormMatrix::from_json(cov.chart(c), rank, l).at(&here)?;
            HiggsLocal::new(theta).at(here)
        })
        .collect::<Parsed<Vec<_>>>()?;
    let mut transitions: Vec<Option<Matrix>> = vec![None; cov.pairs().len()];
    if let Some(tv) = v.get("transitions") {
        let arr = array(tv, &format!("{loc}.transitions"))?;
        for (k, t) in arr.iter().enumerate() {
            let here = format!("{loc}.transitions[{k}]");
            let (idx, m, flip) = match t.get("pair") {
                Some(pv) => {
                    let pair = array(pv, &here)?;
                    if pair.len() != 2 {
                        return Err(InputError { location: here, error: Error::Parse("\"pair\" needs two indices".into()) });
                    }
                    let (i, j) = (index(&pair[0], &here)?, index(&pair[1], &here)?);
                    let found = cov.pairs().iter().position(|p| (p.i, p.j) == (i.min(j), i.max(j)));
                    let idx = found.ok_or_else(|| InputError {
                        location: here.clone(),
                        error: Error::Invalid(format!("no overlap ({i}, {j})")),
                    })?;
                    (idx, field(t, "matrix", &here)?, i > j)
                }
                None => (k, t, false),
            };
            if idx >= transitions.len() {
                return Err(InputError { location: here, error: Error::ShapeMismatch("more transitions than overlaps".into()) });
            }
            let mut mat = Matrix::from_json(&cov.pairs()[idx].ring, m).at(&here)?;
            if flip {
                mat = mat.try_inverse().ok_or_else(|| InputError {
                    location: here.clone(),
                    error: Error::NotUnit("transition matrix".into()),
                })?;
            }
            transitions[idx] = Some(mat);
        }
    }
    let transitions = transitions
        .into_iter()
        .enumerate()
        .map(|(k, t)| t.unwrap_or_else(|| Matrix::identity(&cov.pairs()[k].ring, rank)))
        .collect();
    GluedHiggsBundle::glue(cov.clone(), locals, transitions).at(loc)
}

/// Parses and validates a scenario. `prime` replaces the prime of the file.
pub fn parse_scenario(v: &Value, prime: Option<u64>) -> Parsed<Scenario> {
    let name = v.get("name").and_then(Value::as_str).unwrap_or("scenario").to_string();
    let p = match prime {
        Some(p) => p,
        None => field(v, "prime", "scenario")?
            .as_u64()
            .ok_or_else(|| InputError { location: "prime".into(), error: Error::Parse("expected an integer".into()) })?,
    };
    if p > MAX_PRIME {
        return Err(InputError { location: "prime".into(), error: Error::Invalid(format!("primes above {MAX_PRIME} are not supported")) });
    }
    let md1 = Modulus::new(p, 1).at("prime")?;
    let x = Arc::new(covering_from_json(field(v, "X", "scenario")?, md1, "X")?);
    let y = match v.get("Y") {
        Some(yv) => Arc::new(covering_from_json(yv, md1, "Y")?),
        None => x.clone(),
    };
    if x.num_charts() != y.num_charts() {
        return Err(InputError { location: "Y".into(), error: Error::ShapeMismatch("X and Y need the same number of charts".into()) });
    }
    let f_homs = match v.get("f") {
        Some(fv) => homs_from_json(fv, x.charts(), y.charts(), "f")?,
        None => {
            if !Arc::ptr_eq(&x, &y) {
                return Err(missing("scenario", "\"f\" (needed when Y is given)"));
            }
            x.charts().iter().map(RingHom::identity).collect()
        }
    };
    let f = Arc::new(CoverMap::new(x.clone(), y.clone(), f_homs).at("f")?);

    let lifts_v = v.get("lifts").cloned().unwrap_or(json!({}));
    let x2 = x.lifted().at("X")?;
    let y2 = y.lifted().at("Y")?;
    let fx = match lifts_v.get("FX") {
        Some(h) => FrobeniusLifts::new(x.clone(), homs_from_json(h, x2.charts(), x2.charts(), "lifts.FX")?).at("lifts.FX")?,
        None => FrobeniusLifts::standard(x.clone()).at("lifts.FX")?,
    };
    let fy = match lifts_v.get("FY") {
        Some(h) => FrobeniusLifts::new(y.clone(), homs_from_json(h, y2.charts(), y2.charts(), "lifts.FY")?).at("lifts.FY")?,
        None => FrobeniusLifts::standard(y.clone()).at("lifts.FY")?,
    };
    let fl = match lifts_v.get("f") {
        Some(h) => MorphismLifts::new(f.clone(), homs_from_json(h, x2.charts(), y2.charts(), "lifts.f")?).at("lifts.f")?,
        None => MorphismLifts::naive(f.clone()).at("lifts.f")?,
    };
    for (c, l) in fx.lifts().iter().enumerate() {
        crate::cartier::frobenius_lift_check(l).at(format!("lifts.FX[{c}]"))?;
    }
    for (c, l) in fy.lifts().iter().enumerate() {
        crate::cartier::frobenius_lift_check(l).at(format!("lifts.FY[{c}]"))?;
    }
    let lifts = LiftData::new(fx, fy, fl).at("lifts")?;

    let higgs = higgs_from_json(field(v, "higgs", "scenario")?, &x, "higgs")?;
    let higgs2 = v.get("higgs2").map(|h| higgs_from_json(h, &x, "higgs2")).transpose()?;

    let tau = match v.get("tau") {
        Some(tv) => {
            let arr = array(tv, "tau")?;
            if arr.len() != x.pairs().len() {
                return Err(InputError { location: "tau".into(), error: Error::ShapeMismatch("one entry per overlap".into()) });
            }
            let entries = arr
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    let here = format!("tau[{k}]");
                    let ring = &x.pairs()[k].ring;
                    let target = &y.pairs()[k].ring;
                    let o = e.as_object().ok_or_else(|| InputError {
                        location: here.clone(),
                        error: Error::Parse(format!("expected {{variable: value}}, found {e}")),
                    })?;
                    let mut vals = vec![target.zero(); ring.nvars()];
                    for (key, val) in o {
                        let w = ring.var_index(key).ok_or_else(|| InputError {
                            location: here.clone(),
                            error: Error::Parse(format!("unknown variable `{key}`")),
                        })?;
                        vals[w] = elem_from_json(target, val).at(&here)?;
                    }
                    TwistedDerivation::new(f.pair_at(k).clone(), vals).at(&here)
                })
                .collect::<Parsed<Vec<_>>>()?;
            DerivationCochain::new(f.clone(), entries).at("tau")?
        }
        None => lifts.f.obstruction().at("lifts.f")?,
    };
    if let Some(msg) = tau.cocycle_failure() {
        return Err(InputError { location: "tau".into(), error: Error::CocycleFailure(msg) });
    }

    let r = v.get("r").map(|rv| index(rv, "r")).transpose()?;
    if let Some(r) = r {
        check_order(&higgs, r, p, "higgs")?;
        if let Some(h2) = &higgs2 {
            check_order(h2, r, p, "higgs2")?;
        }
    }
    for (c, l) in higgs.locals().iter().enumerate() {
        if l.exponent() as u64 >= p {
            return Err(InputError {
                location: format!("higgs.locals[{c}]"),
                error: Error::ExponentTooLarge { exponent: l.exponent(), bound: p as usize - 1, p, location: Some(format!("chart {c}")) },
            });
        }
    }
    let cap = v
        .get("cap")
        .map(|c| c.as_u64().map(|k| k as u32).ok_or_else(|| missing("cap", "an integer")))
        .transpose()?;
    let mut checks = Vec::new();
    if let Some(cv) = v.get("checks") {
        for (k, c) in array(cv, "checks")?.iter().enumerate() {
            let s = c.as_str().filter(|s| CHECKS.contains(s)).ok_or_else(|| InputError {
                location: format!("checks[{k}]"),
                error: Error::Parse(format!("unknown check {c}; known checks are {}", CHECKS.join(", "))),
            })?;
            checks.push(s.to_string());
        }
    }
    Ok(Scenario { name, prime: p, x, y, f, lifts, higgs, higgs2, tau, r, cap, checks })
}

fn check_order(e: &GluedHiggsBundle, r: usize, p: u64, loc: &str) -> Parsed<()> {
    for (c, l) in e.locals().iter().enumerate() {
        if r as u64 >= p || l.exponent() > r {
            return Err(InputError {
                location: format!("{loc}.locals[{c}]"),
                error: Error::ExponentTooLarge {
                    exponent: l.exponent().max(r),
                    bound: (p as usize - 1).min(r),
                    p,
                    location: Some(format!("chart {c}")),
                },
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::find;

    fn base(name: &str) -> Value {
        find(name).unwrap().scenario(5)
    }

    fn location(v: &Value) -> String {
        parse_scenario(v, None).expect_err("input should be rejected").location
    }

    #[test]
    fn round_trips_through_json() {
        let s = parse_scenario(&base("affine-2chart"), None).unwrap();
        let again = covering_from_json(&covering_to_json(&s.x), Modulus::new(5, 1).unwrap(), "X").unwrap();
        assert_eq!(again.num_charts(), s.x.num_charts());
        assert_eq!(again.pairs().len(), s.x.pairs().len());
    }

    #[test]
    fn prime_override_wins() {
        let mut v = base("affine-3chart");
        v.as_object_mut().unwrap().remove("lifts");
        let s = parse_scenario(&v, Some(7)).unwrap();
        assert_eq!(s.prime, 7);
        assert_eq!(s.x.p(), 7);
    }

    #[test]
    fn order_at_least_p_is_located() {
        let mut v = base("affine-2chart");
        v["r"] = json!(5);
        assert_eq!(location(&v), "higgs.locals[0]");
    }

    #[test]
    fn unknown_check_is_located() {
        let mut v = base("affine-2chart");
        v["checks"] = json!(["theorem", "bogus"]);
        assert_eq!(location(&v), "checks[1]");
    }

    #[test]
    fn broken_tau_cocycle_is_rejected() {
        let mut v = base("affine-3chart");
        v["tau"] = json!([{"x": "1"}, {"x": "0"}, {"x": "0"}]);
        let err = parse_scenario(&v, None).err().unwrap();
        assert_eq!(err.location, "tau");
        assert!(matches!(err.error, Error::CocycleFailure(_)));
    }

    #[test]
    fn missing_higgs_and_bad_prime() {
        let mut v = base("affine-2chart");
        v.as_object_mut().unwrap().remove("higgs");
        assert!(parse_scenario(&v, None).is_err());
        let mut v = base("affine-2chart");
        v["prime"] = json!(9);
        assert_eq!(location(&v), "prime");
    }

    #[test]
    fn non_frobenius_lift_is_located() {
        let mut v = base("affine-2chart");
        v["lifts"]["FX"][0] = json!(["x^5 + x"]);
        assert!(location(&v).starts_with("lifts.FX"));
    }
}
