//! Frobenius lifts modulo `p^2`, the local inverse Cartier transform, the
//! homotopy `nu_f` and the verification of twisted functoriality.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::cech::{
    bundle_iso_check, pushforward_cochain, restrict_derivation, CoverMap, DerivationCochain, FrobeniusLifts,
    GluedConnectionBundle, GluedHiggsBundle, IsoCheck, MorphismLifts, Pushforward,
};
use crate::error::{Error, Result};
use crate::higgs::trunc_exp;
use crate::matrix::{FormMatrix, Matrix};
use crate::pullback::{tp2, PullbackContext};
use crate::ring::{differential, hom_difference_derivation, pullback_form, LogOneForm, RingHom, TwistedDerivation};

/// Validates a level-2 endomorphism as a logarithmic Frobenius lift: it
/// reduces to the `p`-power map, respects the log shape, and on each log
/// variable `dF/p (dlog x) = dlog x + dh` where `F(x) = x^p (1 + p h)`.
pub fn frobenius_lift_check(lift: &RingHom) -> Result<()> {
    let ring = lift.source();
    if ring.level() != 2 || !lift.target().same(ring) {
        return Err(Error::NotAFrobeniusLift(format!("{lift} is not an endomorphism of a ring over Z/p^2")));
    }
    let red = ring.reduced();
    let frob = RingHom::frobenius(&red);
    let reduced = lift.reduce_mod_p();
    if let Some(v) = (0..ring.nvars()).find(|&v| reduced.image(v) != frob.image(v)) {
        return Err(Error::NotAFrobeniusLift(format!(
            "`{}` maps to {}, which is not {} mod p",
            ring.vars()[v].name,
            lift.image(v),
            frob.image(v)
        )));
    }
    for (v, var) in ring.vars().iter().enumerate() {
        if !var.log {
            continue;
        }
        let xp = ring.var(v).pow(ring.p() as u32);
        let ratio = lift
            .image(v)
            .div_log_shaped(&xp)
            .ok_or_else(|| Error::LogViolation { var: var.name.clone(), image: lift.image(v).to_string() })?;
        let h = (&ratio - &ring.one()).divide_by_p()?;
        let lhs = df_over_p(lift, &LogOneForm::basis(&red, v))?;
        let rhs = LogOneForm::basis(&red, v).add(&differential(&h));
        if lhs != rhs {
            return Err(Error::NotAFrobeniusLift(format!("dF/p on dlog {} is {lhs}, expected {rhs}", var.name)));
        }
    }
    Ok(())
}

/// `dF/p`: the pullback of a lift of `omega` along `F`, divided by `p`.
pub fn df_over_p(lift: &RingHom, omega: &LogOneForm) -> Result<LogOneForm> {
    let up = omega.lift();
    if !up.ring().same(lift.source()) {
        return Err(Error::ShapeMismatch(format!("form over {} given to a lift of {}", omega.ring(), lift.source())));
    }
    pullback_form(lift, &up).divide_by_p()
}

/// `sum_v F(theta_v) dF/p(e_v)` for a Higgs field on the chart of `lift`.
pub fn cartier_connection(theta: &FormMatrix, lift: &RingHom) -> Result<FormMatrix> {
    let ring = theta.ring();
    let frob = RingHom::frobenius(ring);
    let mut out = FormMatrix::zero(ring, theta.rows(), theta.cols());
    for (v, comp) in theta.components().iter().enumerate() {
        if comp.is_zero() {
            continue;
        }
        let fc = comp.apply_hom(&frob);
        let zeta = df_over_p(lift, &LogOneForm::basis(ring, v))?;
        let comps = zeta.coeffs().iter().map(|c| fc.scale(c)).collect();
        out = out.add(&FormMatrix::from_components(ring, comps));
    }
    Ok(out)
}

/// The inverse Cartier transform of a glued Higgs bundle: local connections
/// `d + sum_v F(theta_v) dF_i/p(e_v)` glued by
/// `exp(theta_j . ob(F)_ij) F(T_ij)`.
pub fn inverse_cartier(e: &GluedHiggsBundle, lifts: &FrobeniusLifts) -> Result<GluedConnectionBundle> {
    let cov = e.covering();
    let p = cov.p();
    for (c, l) in e.locals().iter().enumerate() {
        if l.exponent() as u64 >= p {
            return Err(Error::ExponentTooLarge {
                exponent: l.exponent(),
                bound: p as usize - 1,
                p,
                location: Some(format!("chart {c}")),
            });
        }
    }
    let locals = (0..cov.num_charts())
        .map(|c| cartier_connection(e.local(c).theta(), lifts.lift(c)))
        .collect::<Result<Vec<_>>>()?;
    let ob = lifts.obstruction()?;
    let frob = lifts.frobenius();
    let transitions = cov
        .pairs()
        .iter()
        .enumerate()
        .map(|(idx, pr)| {
            let n = e.local_on_pair(pr.j, idx).contract(&ob.entries()[idx]);
            Ok(trunc_exp(&n, p as usize - 1)?.mul(&e.transitions()[idx].apply_hom(frob.pair_at(idx))))
        })
        .collect::<Result<Vec<_>>>()?;
    GluedConnectionBundle::glue(cov.clone(), locals, transitions)
}

/// Lifts of `f: Y -> X` and of Frobenius on both sides.
#[derive(Clone, Debug)]
pub struct LiftData {
    pub fx: FrobeniusLifts,
    pub fy: FrobeniusLifts,
    pub f: MorphismLifts,
}

impl LiftData {
    /// Validates that the coverings match and that `f` commutes with
    /// Frobenius modulo `p`.
    pub fn new(fx: FrobeniusLifts, fy: FrobeniusLifts, f: MorphismLifts) -> Result<LiftData> {
        let map = f.map();
        if !Arc::ptr_eq(map.source(), fx.covering()) && map.source().charts() != fx.covering().charts() {
            return Err(Error::ShapeMismatch("Frobenius lifts of X are on another covering".into()));
        }
        if !Arc::ptr_eq(map.target(), fy.covering()) && map.target().charts() != fy.covering().charts() {
            return Err(Error::ShapeMismatch("Frobenius lifts of Y are on another covering".into()));
        }
        let left = map.then(fy.frobenius());
        let right = fx.frobenius().then(map);
        if !left.same_as(&right) {
            return Err(Error::Invalid("f does not commute with Frobenius".into()));
        }
        Ok(LiftData { fx, fy, f })
    }

    pub fn map(&self) -> &Arc<CoverMap> {
        self.f.map()
    }

    /// `g = F_X then f`, the base of `nu`.
    pub fn g(&self) -> CoverMap {
        self.fx.frobenius().then(self.f.map())
    }
}

/// `nu_i = (F_Y f - f F_X)/p` on chart `i`, twisted along `g`.
#[derive(Clone, Debug)]
pub struct NuField {
    pub chart: usize,
    pub nu: TwistedDerivation,
}

impl NuField {
    /// Checks `nu(dx) = (a(x) - b(x))/p` on ordinary variables and
    /// `a(x) = b(x)(1 + p nu(dlog x))` on log variables.
    pub fn holds_on_generators(&self, lifts: &LiftData) -> bool {
        let (a, b) = nu_homs(lifts, self.chart);
        let ring = a.source();
        let target = a.target();
        ring.vars().iter().enumerate().all(|(v, var)| {
            let val = self.nu.value(v).lift();
            if var.log {
                *a.image(v) == b.image(v) * &(&target.one() + &val.scale(ring.p() as i64))
            } else {
                (a.image(v) - b.image(v)) == val.scale(ring.p() as i64)
            }
        })
    }
}

fn nu_homs(lifts: &LiftData, c: usize) -> (RingHom, RingHom) {
    let f = lifts.f.lift(c);
    (f.then(lifts.fy.lift(c)), lifts.fx.lift(c).then(f))
}

pub fn compute_nu(lifts: &LiftData, chart: usize) -> Result<NuField> {
    let (a, b) = nu_homs(lifts, chart);
    let nu = hom_difference_derivation(&a, &b).map_err(|e| match e {
        Error::NotLiftPair(v) => Error::NotDivisible(format!("nu on chart {chart}: lifts disagree mod p on `{v}`")),
        other => other,
    })?;
    Ok(NuField { chart, nu })
}

/// A checked identity with a trace of both sides.
#[derive(Clone, Debug, Default)]
pub struct Verification {
    pub statement: String,
    pub ok: bool,
    pub trace: Vec<Value>,
    pub failure: Option<String>,
}

impl Verification {
    fn new(statement: &str) -> Verification {
        Verification { statement: statement.into(), ok: true, ..Default::default() }
    }

    fn record(&mut self, ok: bool, entry: Value, location: impl FnOnce() -> String) {
        if !ok && self.ok {
            self.ok = false;
            self.failure = Some(location());
        }
        self.trace.push(entry);
    }

    pub fn to_json(&self) -> Value {
        json!({"statement": self.statement, "result": self.ok, "failure": self.failure, "trace": self.trace})
    }
}

fn nu_witness(e: &GluedHiggsBundle, nus: &[NuField]) -> Result<Vec<Matrix>> {
    let p = e.covering().p() as usize;
    nus.iter().map(|n| trunc_exp(&e.local(n.chart).theta().contract(&n.nu), p - 1)).collect()
}

/// On chart `c`: `nabla_2 (M s) = M nabla_1 s` for each basis section `s`,
/// where `M = exp(theta . nu_c)`, `nabla_1` is the inverse Cartier
/// connection of `f^* theta` built with `F_Y`, and `nabla_2` is the pullback
/// of the one built with `F_X`.
pub fn verify_lemma32(e: &GluedHiggsBundle, lifts: &LiftData, c: usize) -> Result<Verification> {
    let f = lifts.map();
    let theta = e.local(c).theta();
    let a1 = cartier_connection(&theta.pullback(f.chart(c)), lifts.fy.lift(c))?;
    let a2 = cartier_connection(theta, lifts.fx.lift(c))?.pullback(f.chart(c));
    let nu = compute_nu(lifts, c)?;
    let m = trunc_exp(&theta.contract(&nu.nu), f.source().p() as usize - 1)?;
    let lhs = m.differential().add(&a2.right_mul(&m));
    let rhs = a1.left_mul(&m);
    let mut out = Verification::new("exp(nu . theta) intertwines the two connections");
    for k in 0..m.cols() {
        let col = |fm: &FormMatrix| -> Vec<Value> {
            fm.components().iter().map(|comp| Value::Array((0..comp.rows()).map(|r| json!(comp.get(r, k).to_string())).collect())).collect()
        };
        let (l, r) = (col(&lhs), col(&rhs));
        let ok = l == r;
        out.record(ok, json!({"chart": c, "section": k, "nabla2_of_M_s": l, "M_of_nabla1_s": r, "equal": ok}), || {
            format!("chart {c}, section {k}")
        });
    }
    Ok(out)
}

/// The obstruction cochains of the lift data, transported to cochains along
/// `g`, and the restrictions of `nu` to overlaps.
pub struct Lemma33Terms {
    pub nu_difference: DerivationCochain,
    pub frobenius_y: DerivationCochain,
    pub morphism: DerivationCochain,
    pub frobenius_x: DerivationCochain,
}

pub fn lemma33_terms(lifts: &LiftData) -> Result<Lemma33Terms> {
    let f = lifts.map();
    let g = Arc::new(lifts.g());
    let x = f.source();
    let y = f.target();
    let nus = (0..x.num_charts()).map(|c| compute_nu(lifts, c)).collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::new();
    for (idx, (px, py)) in x.pairs().iter().zip(y.pairs()).enumerate() {
        let base = g.pair_at(idx);
        let ni = restrict_derivation(&nus[px.i].nu, &px.restrict_i.hom, &py.restrict_i.hom, base)?;
        let nj = restrict_derivation(&nus[px.j].nu, &px.restrict_j.hom, &py.restrict_j.hom, base)?;
        entries.push(ni.sub(&nj));
    }
    let nu_difference = DerivationCochain::new(g, entries)?;
    let frobenius_y = pushforward_cochain(&lifts.fy.obstruction()?, Pushforward::TangentMapF(f));
    let morphism = pushforward_cochain(&lifts.f.obstruction()?, Pushforward::FrobeniusY(lifts.fy.frobenius()));
    let frobenius_x = pushforward_cochain(&lifts.fx.obstruction()?, Pushforward::PullbackByF(f));
    Ok(Lemma33Terms { nu_difference, frobenius_y, morphism, frobenius_x })
}

/// `nu_i - nu_j = ob(F_Y)_ij + ob(f)_ij - ob(F_X)_ij` as cochains along `g`.
pub fn verify_lemma33(lifts: &LiftData) -> Result<Verification> {
    let t = lemma33_terms(lifts)?;
    let rhs = t.frobenius_y.add(&t.morphism).sub(&t.frobenius_x);
    let mut out = Verification::new("nu_i - nu_j = ob(F_Y) + ob(f) - ob(F_X)");
    let pairs = lifts.map().source().pairs();
    for (idx, pr) in pairs.iter().enumerate() {
        let (l, r) = (&t.nu_difference.entries()[idx], &rhs.entries()[idx]);
        let ok = l.same_as(r);
        out.record(
            ok,
            json!({
                "pair": [pr.i, pr.j],
                "nu_difference": l.to_string(),
                "ob_FY": t.frobenius_y.entries()[idx].to_string(),
                "ob_f": t.morphism.entries()[idx].to_string(),
                "ob_FX": t.frobenius_x.entries()[idx].to_string(),
                "equal": ok,
            }),
            || format!("overlap ({}, {})", pr.i, pr.j),
        );
    }
    Ok(out)
}

/// The transition of `C^{-1}_Y(tp2(E, ob(f)))` on overlap `idx`:
/// `exp(ob(F_Y) . f^* theta_j) F_Y^*(exp(ob(f) . theta_j)) g^*(T_ij)`.
fn descent_a(e: &GluedHiggsBundle, lifts: &LiftData, idx: usize) -> Result<Matrix> {
    let p = e.covering().p() as usize;
    let x = e.covering();
    let pr = &x.pairs()[idx];
    let f = lifts.map();
    let theta_j = e.local_on_pair(pr.j, idx);
    let ob_fy = lifts.fy.obstruction()?;
    let ob_f = lifts.f.obstruction()?;
    let first = trunc_exp(&theta_j.pullback(f.pair_at(idx)).contract(&ob_fy.entries()[idx]), p - 1)?;
    let second = trunc_exp(&theta_j.contract(&ob_f.entries()[idx]), p - 1)?.apply_hom(lifts.fy.frobenius().pair_at(idx));
    let g = lifts.g();
    Ok(first.mul(&second).mul(&e.transitions()[idx].apply_hom(g.pair_at(idx))))
}

/// The transition of `f^* C^{-1}_X(E)` on overlap `idx`:
/// `f^*(exp(ob(F_X) . theta_j)) g^*(T_ij)`.
fn descent_b(e: &GluedHiggsBundle, lifts: &LiftData, idx: usize) -> Result<Matrix> {
    let p = e.covering().p() as usize;
    let pr = &e.covering().pairs()[idx];
    let theta_j = e.local_on_pair(pr.j, idx);
    let ob_fx = lifts.fx.obstruction()?;
    let b = trunc_exp(&theta_j.contract(&ob_fx.entries()[idx]), p - 1)?.apply_hom(lifts.map().pair_at(idx));
    let g = lifts.g();
    Ok(b.mul(&e.transitions()[idx].apply_hom(g.pair_at(idx))))
}

/// `b_ij exp(nu_i theta) = exp(nu_j theta) a_ij` on every overlap, and the
/// transitions of `C^{-1}_Y(tp2(E, ob(f)))` equal `a_ij`.
pub fn verify_descent(e: &GluedHiggsBundle, lifts: &LiftData) -> Result<Verification> {
    let x = e.covering();
    let nus = (0..x.num_charts()).map(|c| compute_nu(lifts, c)).collect::<Result<Vec<_>>>()?;
    let witness = nu_witness(e, &nus)?;
    let v1 = theorem_v1(e, lifts)?;
    let y = lifts.map().target();
    let mut out = Verification::new("b_ij exp(nu_i theta) = exp(nu_j theta) a_ij");
    for (idx, py) in y.pairs().iter().enumerate() {
        let a = descent_a(e, lifts, idx)?;
        let b = descent_b(e, lifts, idx)?;
        let mi = witness[py.i].apply_hom(&py.restrict_i.hom);
        let mj = witness[py.j].apply_hom(&py.restrict_j.hom);
        let lhs = b.mul(&mi);
        let rhs = mj.mul(&a);
        let square = lhs == rhs;
        let built = v1.transitions()[idx] == a;
        out.record(
            square && built,
            json!({
                "pair": [py.i, py.j],
                "a": a.to_json(),
                "b": b.to_json(),
                "b_exp_nu_i": lhs.to_json(),
                "exp_nu_j_a": rhs.to_json(),
                "square": square,
                "a_matches_construction": built,
            }),
            || format!("overlap ({}, {})", py.i, py.j),
        );
    }
    Ok(out)
}

fn theorem_v1(e: &GluedHiggsBundle, lifts: &LiftData) -> Result<GluedConnectionBundle> {
    let ctx = PullbackContext::new(lifts.map().clone(), lifts.f.obstruction()?)?;
    let p = e.covering().p() as usize;
    let twisted = tp2(e, &ctx, p - 1)?;
    inverse_cartier(&twisted, &lifts.fy)
}

/// The comparison `C^{-1}_Y(f°E) = f^* C^{-1}_X(E)` with all sub-checks.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub v1: GluedConnectionBundle,
    pub v2: GluedConnectionBundle,
    pub witness: Vec<Matrix>,
    pub iso: IsoCheck,
    pub ob_f_zero: bool,
    pub nu_zero: bool,
    pub flat: bool,
    pub lemma32: Vec<Verification>,
    pub lemma33: Verification,
    pub descent: Verification,
}

impl TheoremReport {
    pub fn ok(&self) -> bool {
        self.iso.ok && self.flat && self.lemma32.iter().all(|v| v.ok) && self.lemma33.ok && self.descent.ok
    }

    pub fn to_json(&self) -> Value {
        json!({
            "statement": "C^{-1}_Y f°(E) is isomorphic to f^* C^{-1}_X(E)",
            "result": self.ok(),
            "iso": self.iso.ok,
            "failure": self.iso.failure,
            "witness": self.witness.iter().map(Matrix::to_json).collect::<Vec<_>>(),
            "ob_f_zero": self.ob_f_zero,
            "nu_zero": self.nu_zero,
            "flat": self.flat,
            "lemma32": self.lemma32.iter().map(Verification::to_json).collect::<Vec<_>>(),
            "lemma33": self.lemma33.to_json(),
            "descent": self.descent.to_json(),
        })
    }
}

pub fn verify_theorem(e: &GluedHiggsBundle, lifts: &LiftData) -> Result<TheoremReport> {
    let x = e.covering();
    let v1 = theorem_v1(e, lifts)?;
    let v2 = inverse_cartier(e, &lifts.fx)?.pullback(lifts.map())?;
    let nus = (0..x.num_charts()).map(|c| compute_nu(lifts, c)).collect::<Result<Vec<_>>>()?;
    let witness = nu_witness(e, &nus)?;
    let iso = bundle_iso_check(&v1, &v2, &witness);
    let lemma32 = (0..x.num_charts()).map(|c| verify_lemma32(e, lifts, c)).collect::<Result<Vec<_>>>()?;
    let lemma33 = verify_lemma33(lifts)?;
    let descent = verify_descent(e, lifts)?;
    Ok(TheoremReport {
        flat: v1.is_flat() && v2.is_flat(),
        ob_f_zero: lifts.f.obstruction()?.is_zero(),
        nu_zero: nus.iter().all(|n| n.nu.is_zero()),
        v1,
        v2,
        witness,
        iso,
        lemma32,
        lemma33,
        descent,
    })
}
