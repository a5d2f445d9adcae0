//! Twisted pullbacks of nilpotent Higgs bundles along a morphism `f: Y -> X`
//! and a cocycle `tau` of derivations valued in `f^* T_X`.
//!
//! Three constructions are provided. [`tp1`] tensors `f^* E` over `f^* A_r`
//! with the rank-one module [`LineModuleF`], [`tp2`] regludes the local
//! pullbacks by `exp(tau_ij . theta)`, and [`tp3`] tensors with
//! `Sym^r(E_tau)` from [`ExtensionE`].

mod extension;
mod prop28;
mod relative;

pub use extension::{ExtensionE, SymFiltration, SymPower};
pub use prop28::{prop28_report, IsoSearch, Prop28Report};
pub use relative::{relative_iso_check, RelativeHiggsBundle};

use std::sync::Arc;

use serde_json::{json, Value};

use crate::cech::{bundle_iso_check, CoverMap, DerivationCochain, GluedHiggsBundle, IsoCheck};
use crate::error::{Error, Result};
use crate::higgs::{trunc_exp, ArModule, HiggsLocal, TruncSymAlgebra};
use crate::matrix::Matrix;
use crate::ring::{RingElem, RingHom, TwistedDerivation};

/// A morphism `f: Y -> X`, given on rings as a cover map from the covering
/// of `X` to the covering of `Y`, with a cocycle `tau` along it.
#[derive(Clone, Debug)]
pub struct PullbackContext {
    f: Arc<CoverMap>,
    tau: DerivationCochain,
}

impl PullbackContext {
    pub fn new(f: Arc<CoverMap>, tau: DerivationCochain) -> Result<PullbackContext> {
        if !tau.map().same_as(&f) {
            return Err(Error::ShapeMismatch("the cochain is not twisted along the given morphism".into()));
        }
        if let Some(msg) = tau.cocycle_failure() {
            return Err(Error::CocycleFailure(msg));
        }
        Ok(PullbackContext { f, tau })
    }

    /// The context with `tau = 0`.
    pub fn untwisted(f: Arc<CoverMap>) -> PullbackContext {
        let tau = DerivationCochain::zero(f.clone());
        PullbackContext { f, tau }
    }

    /// Builds `tau` from its values on the basis forms of each overlap.
    pub fn from_values(f: Arc<CoverMap>, values: Vec<Vec<RingElem>>) -> Result<PullbackContext> {
        let entries = values
            .into_iter()
            .enumerate()
            .map(|(idx, v)| TwistedDerivation::new(f.pair_at(idx).clone(), v))
            .collect::<Result<Vec<_>>>()?;
        let tau = DerivationCochain::new(f.clone(), entries)?;
        PullbackContext::new(f, tau)
    }

    pub fn map(&self) -> &Arc<CoverMap> {
        &self.f
    }

    pub fn tau(&self) -> &DerivationCochain {
        &self.tau
    }

    /// The same morphism with another cocycle.
    pub fn with_tau(&self, tau: DerivationCochain) -> Result<PullbackContext> {
        PullbackContext::new(self.f.clone(), tau)
    }

    /// Number of tangent directions of `X`.
    pub fn tangent_rank(&self) -> usize {
        self.f.source().chart(0).nvars()
    }

    /// `u_w = tau_ij(e^j_w)` for the basis forms of chart `j` on overlap `idx`.
    pub fn tau_vector(&self, idx: usize) -> Vec<RingElem> {
        let p = &self.f.source().pairs()[idx];
        let t = &self.tau.entries()[idx];
        (0..self.tangent_rank()).map(|w| t.apply_form(p.restrict_j.hom.basis_pullback(w))).collect()
    }

    /// The pullback of `E` as an `f^* Omega_X`-valued Higgs bundle, with no
    /// twisting.
    pub fn relative_pullback(&self, e: &GluedHiggsBundle) -> Result<RelativeHiggsBundle> {
        let actions = (0..self.f.source().num_charts())
            .map(|c| e.local(c).theta().components().iter().map(|m| m.apply_hom(self.f.chart(c))).collect())
            .collect();
        let transitions = e.transitions().iter().enumerate().map(|(k, t)| t.apply_hom(self.f.pair_at(k))).collect();
        RelativeHiggsBundle::glue(self.f.clone(), actions, transitions)
    }
}

/// Rows are the chart basis forms written in the basis of the overlap.
fn basis_matrix(rho: &RingHom) -> Matrix {
    let n = rho.source().nvars();
    Matrix::from_rows(rho.target(), (0..n).map(|w| rho.basis_pullback(w).coeffs().to_vec()).collect())
}

/// The matrix `K` over `Y_ij` with `a^j = K a^i` for tangent coordinates in
/// the frames of charts `i` and `j`, pulled back along `f`.
pub fn frame_change(f: &CoverMap, idx: usize) -> Result<Matrix> {
    let p = &f.source().pairs()[idx];
    let pi = basis_matrix(&p.restrict_i.hom);
    let pj = basis_matrix(&p.restrict_j.hom);
    let inv = pi.try_inverse().ok_or_else(|| Error::NotUnit(format!("Jacobian of chart {} on ({}, {})", p.i, p.i, p.j)))?;
    Ok(pj.mul(&inv).apply_hom(f.pair_at(idx)))
}

fn check_order(e: &GluedHiggsBundle, r: usize) -> Result<()> {
    let p = e.covering().p();
    if r as u64 >= p {
        return Err(Error::ExponentTooLarge { exponent: r, bound: p as usize - 1, p, location: Some("chart 0".into()) });
    }
    for (c, l) in e.locals().iter().enumerate() {
        if l.exponent() > r {
            return Err(Error::ExponentTooLarge { exponent: l.exponent(), bound: r, p, location: Some(format!("chart {c}")) });
        }
    }
    Ok(())
}

fn plain_locals(e: &GluedHiggsBundle, f: &CoverMap) -> Result<Vec<HiggsLocal>> {
    e.locals().iter().enumerate().map(|(c, l)| HiggsLocal::new(l.theta().pullback(f.chart(c)))).collect()
}

/// Reglues `f^* E` by the action of elements `c_ij` of `f^* A_r`, written in
/// the frame of chart `j`: the transition on `(i, j)` becomes
/// `rho_j(c_ij) f^*(T_ij)`.
fn twist_by_elements(e: &GluedHiggsBundle, ctx: &PullbackContext, r: usize, elems: &[Vec<RingElem>]) -> Result<GluedHiggsBundle> {
    let f = &ctx.f;
    let x = f.source();
    let y = f.target();
    let mut transitions = Vec::with_capacity(x.pairs().len());
    for (idx, (px, py)) in x.pairs().iter().zip(y.pairs()).enumerate() {
        let h = px.restrict_j.hom.then(f.pair_at(idx));
        let actions = e.local(px.j).theta().components().iter().map(|m| m.apply_hom(&h)).collect();
        let algebra = TruncSymAlgebra::with_generators(&py.ring, ctx.tangent_rank(), r);
        let module = ArModule::from_generators(algebra, actions).map_err(|err| err.at(format!("chart {}", px.j)))?;
        let g = module.act_elem(&elems[idx]);
        transitions.push(g.mul(&e.transitions()[idx].apply_hom(f.pair_at(idx))));
    }
    GluedHiggsBundle::glue(y.clone(), plain_locals(e, f)?, transitions)
}

/// The rank-one `f^* A_r`-module `F^r_tau`, glued from `f^* A_r` by
/// multiplication with `exp(sum_w u_w D_w)` after the change of frame.
#[derive(Clone, Debug)]
pub struct LineModuleF {
    r: usize,
    bundle: RelativeHiggsBundle,
    generators: Vec<Vec<RingElem>>,
}

impl LineModuleF {
    pub fn new(ctx: &PullbackContext, r: usize) -> Result<LineModuleF> {
        let f = &ctx.f;
        let y = f.target();
        let m = ctx.tangent_rank();
        let mut transitions = Vec::new();
        let mut generators = Vec::new();
        for (idx, py) in y.pairs().iter().enumerate() {
            let alg = TruncSymAlgebra::with_generators(&py.ring, m, r);
            let c = alg.exp_elem(&alg.linear_elem(&ctx.tau_vector(idx)))?;
            let k = frame_change(f, idx)?;
            let sym = sym_of_frame(&alg, &k);
            transitions.push(alg.mul_matrix(&c).mul(&sym));
            generators.push(c);
        }
        let actions = (0..y.num_charts())
            .map(|c| {
                let alg = TruncSymAlgebra::with_generators(y.chart(c), m, r);
                (0..m).map(|w| alg.regular_action(w)).collect()
            })
            .collect();
        let bundle = RelativeHiggsBundle::glue(f.clone(), actions, transitions)?;
        Ok(LineModuleF { r, bundle, generators })
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn bundle(&self) -> &RelativeHiggsBundle {
        &self.bundle
    }

    /// The element `c_ij` with `g_i = c_ij g_j` for the local generators,
    /// read off from the first column of the transition.
    pub fn generator_transition(&self, idx: usize) -> Vec<RingElem> {
        let t = &self.bundle.transitions()[idx];
        (0..t.rows()).map(|a| t.get(a, 0).clone()).collect()
    }

    /// The elements used to build the transitions, for comparison with
    /// [`LineModuleF::generator_transition`].
    pub fn exponentials(&self) -> &[Vec<RingElem>] {
        &self.generators
    }
}

/// `Sym(K)` on `A_r`: the algebra map with `D^i_w -> sum_w' K[w'][w] D^j_w'`.
pub(crate) fn sym_of_frame(alg: &TruncSymAlgebra, k: &Matrix) -> Matrix {
    let images: Vec<Vec<RingElem>> = (0..k.cols())
        .map(|w| {
            let col: Vec<RingElem> = (0..k.rows()).map(|w2| k.get(w2, w).clone()).collect();
            alg.linear_elem(&col)
        })
        .collect();
    let ring = k.ring().clone();
    alg.substitution_matrix(&images, |_| alg.one_elem(&ring))
}

/// `F^r_tau (x)_{f^* A_r} f^* E`, pushed forward to a Higgs bundle on `Y`.
pub fn tp1(e: &GluedHiggsBundle, ctx: &PullbackContext, r: usize) -> Result<GluedHiggsBundle> {
    check_order(e, r)?;
    let line = LineModuleF::new(ctx, r)?;
    let elems: Vec<_> = (0..ctx.f.source().pairs().len()).map(|idx| line.generator_transition(idx)).collect();
    twist_by_elements(e, ctx, r, &elems)
}

/// Exponential twisting: local pullbacks `f^* E_c` glued by
/// `exp(theta_j . tau_ij) f^*(T_ij)`.
pub fn tp2(e: &GluedHiggsBundle, ctx: &PullbackContext, r: usize) -> Result<GluedHiggsBundle> {
    check_order(e, r)?;
    let x = ctx.f.source();
    let mut transitions = Vec::with_capacity(x.pairs().len());
    for (idx, px) in x.pairs().iter().enumerate() {
        let theta_j = e.local_on_pair(px.j, idx);
        let g = trunc_exp(&theta_j.contract(&ctx.tau.entries()[idx]), r)?;
        transitions.push(g.mul(&e.transitions()[idx].apply_hom(ctx.f.pair_at(idx))));
    }
    GluedHiggsBundle::glue(ctx.f.target().clone(), plain_locals(e, &ctx.f)?, transitions)
}

/// `Sym^r(E_tau) (x)_{f^* A_r} f^* E`, using the local generators
/// `e_0^r / r!` of `Sym^r(E_tau)`.
pub fn tp3(e: &GluedHiggsBundle, ctx: &PullbackContext, r: usize) -> Result<GluedHiggsBundle> {
    check_order(e, r)?;
    let ext = ExtensionE::build(ctx)?;
    let sym = ext.sym_power(r)?;
    let elems: Vec<_> = (0..ctx.f.source().pairs().len()).map(|idx| sym.generator_transition(idx)).collect::<Result<_>>()?;
    twist_by_elements(e, ctx, r, &elems)
}

/// Outcome of a comparison between two constructions, with its witness.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub statement: String,
    pub witness: Vec<Matrix>,
    pub check: IsoCheck,
}

impl Comparison {
    pub fn to_json(&self) -> Value {
        json!({
            "statement": self.statement,
            "witness": self.witness.iter().map(Matrix::to_json).collect::<Vec<_>>(),
            "result": self.check.ok,
            "failure": self.check.failure,
        })
    }
}

fn identity_witness(b: &GluedHiggsBundle) -> Vec<Matrix> {
    b.covering().charts().iter().map(|c| Matrix::identity(c, b.rank())).collect()
}

/// `tp1(E) = tp2(E)` through the identity on each chart.
pub fn compare_tp1_tp2(e: &GluedHiggsBundle, ctx: &PullbackContext, r: usize) -> Result<Comparison> {
    let a = tp1(e, ctx, r)?;
    let b = tp2(e, ctx, r)?;
    let witness = identity_witness(&a);
    let check = bundle_iso_check(&a, &b, &witness);
    Ok(Comparison { statement: "tp1 and tp2 are naturally isomorphic".into(), witness, check })
}

/// Replacing `tau` by `tau + (s_j - s_i)` changes `tp2` by the chartwise
/// isomorphism `exp(theta_c . s_c)`.
pub fn compare_representatives(
    e: &GluedHiggsBundle,
    ctx: &PullbackContext,
    s: &[TwistedDerivation],
    r: usize,
) -> Result<Comparison> {
    let delta = DerivationCochain::coboundary(ctx.f.clone(), s)?;
    let other = ctx.with_tau(ctx.tau.add(&delta))?;
    let a = tp2(e, ctx, r)?;
    let b = tp2(e, &other, r)?;
    let witness = e
        .locals()
        .iter()
        .zip(s)
        .map(|(l, sc)| trunc_exp(&l.theta().contract(sc), r))
        .collect::<Result<Vec<_>>>()?;
    let check = bundle_iso_check(&a, &b, &witness);
    Ok(Comparison { statement: "tp2 does not depend on the cocycle representative".into(), witness, check })
}

/// `tp2(E1 (x) E2)` against `tp2(E1) (x) tp2(E2)`, with orders `r1`, `r2`.
pub fn check_tensor_compat(
    e1: &GluedHiggsBundle,
    e2: &GluedHiggsBundle,
    ctx: &PullbackContext,
    r1: usize,
    r2: usize,
) -> Result<Comparison> {
    let p = e1.covering().p();
    if (r1 + r2) as u64 >= p {
        return Err(Error::ExponentTooLarge { exponent: r1 + r2, bound: p as usize - 1, p, location: Some("tensor product".into()) });
    }
    let lhs = tp2(&e1.tensor(e2)?, ctx, r1 + r2)?;
    let rhs = tp2(e1, ctx, r1)?.tensor(&tp2(e2, ctx, r2)?)?;
    let witness = identity_witness(&lhs);
    let check = bundle_iso_check(&lhs, &rhs, &witness);
    Ok(Comparison { statement: "twisted pullback commutes with tensor products".into(), witness, check })
}

/// `tp2(E1 + E2)` against `tp2(E1) + tp2(E2)` with block-diagonal identity.
pub fn check_direct_sum_compat(
    e1: &GluedHiggsBundle,
    e2: &GluedHiggsBundle,
    ctx: &PullbackContext,
    r: usize,
) -> Result<Comparison> {
    let lhs = tp2(&e1.direct_sum(e2)?, ctx, r)?;
    let rhs = tp2(e1, ctx, r)?.direct_sum(&tp2(e2, ctx, r)?)?;
    let witness = identity_witness(&lhs);
    let check = bundle_iso_check(&lhs, &rhs, &witness);
    Ok(Comparison { statement: "twisted pullback commutes with direct sums".into(), witness, check })
}
