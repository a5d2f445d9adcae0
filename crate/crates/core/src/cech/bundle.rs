use std::sync::Arc;

use serde_json::{json, Value};

use super::{CoverMap, Covering};
use crate::error::{Error, Result};
use crate::higgs::{direct_sum_higgs, tensor_higgs, HiggsLocal};
use crate::matrix::{FormMatrix, Matrix};

pub(crate) fn check_transitions(covering: &Covering, rank: usize, transitions: &[Matrix]) -> Result<()> {
    if transitions.len() != covering.pairs().len() {
        return Err(Error::ShapeMismatch(format!(
            "{} transitions for {} overlaps",
            transitions.len(),
            covering.pairs().len()
        )));
    }
    for (t, p) in transitions.iter().zip(covering.pairs()) {
        if t.rows() != rank || t.cols() != rank || !t.ring().same(&p.ring) {
            return Err(Error::ShapeMismatch(format!("transition on ({}, {}) has the wrong shape or ring", p.i, p.j)));
        }
        if !t.det().is_unit() {
            return Err(Error::NotUnit(format!("determinant of the transition on ({}, {})", p.i, p.j)));
        }
    }
    for (k, trip) in covering.triples().iter().enumerate() {
        let [i, j, l] = trip.idx;
        let maps = covering.pair_to_triple(k);
        let tij = transitions[covering.pair_index(i, j)].apply_hom(&maps[0]);
        let tjk = transitions[covering.pair_index(j, l)].apply_hom(&maps[1]);
        let tik = transitions[covering.pair_index(i, l)].apply_hom(&maps[2]);
        if tik != tjk.mul(&tij) {
            return Err(Error::CocycleFailure(format!("triple ({i}, {j}, {l})")));
        }
    }
    Ok(())
}

fn transitions_json(ts: &[Matrix], covering: &Covering) -> Value {
    Value::Array(
        ts.iter()
            .zip(covering.pairs())
            .map(|(t, p)| json!({"pair": [p.i, p.j], "matrix": t.to_json()}))
            .collect(),
    )
}

/// A Higgs bundle glued from free local pieces.
#[derive(Clone, Debug)]
pub struct GluedHiggsBundle {
    covering: Arc<Covering>,
    locals: Vec<HiggsLocal>,
    transitions: Vec<Matrix>,
}

impl GluedHiggsBundle {
    /// Validates the cocycle condition and the compatibility
    /// `theta_j T_ij = T_ij theta_i` on every overlap.
    pub fn glue(covering: Arc<Covering>, locals: Vec<HiggsLocal>, transitions: Vec<Matrix>) -> Result<GluedHiggsBundle> {
        if locals.len() != covering.num_charts() {
            return Err(Error::ShapeMismatch("one local Higgs field per chart".into()));
        }
        let rank = locals[0].rank();
        for (c, l) in locals.iter().enumerate() {
            if l.rank() != rank || !l.ring().same(covering.chart(c)) {
                return Err(Error::ShapeMismatch(format!("local Higgs field on chart {c} has the wrong rank or ring")));
            }
        }
        check_transitions(&covering, rank, &transitions)?;
        let bundle = GluedHiggsBundle { covering, locals, transitions };
        for (idx, p) in bundle.covering.pairs().iter().enumerate() {
            let t = &bundle.transitions[idx];
            let ti = bundle.local_on_pair(p.i, idx);
            let tj = bundle.local_on_pair(p.j, idx);
            if tj.right_mul(t) != ti.left_mul(t) {
                return Err(Error::HiggsMismatch(format!("({}, {})", p.i, p.j)));
            }
        }
        Ok(bundle)
    }

    pub fn covering(&self) -> &Arc<Covering> {
        &self.covering
    }

    pub fn locals(&self) -> &[HiggsLocal] {
        &self.locals
    }

    pub fn local(&self, c: usize) -> &HiggsLocal {
        &self.locals[c]
    }

    pub fn transitions(&self) -> &[Matrix] {
        &self.transitions
    }

    /// `T_ij`, inverted when `i > j`.
    pub fn transition(&self, i: usize, j: usize) -> Matrix {
        let t = &self.transitions[self.covering.pair_index(i, j)];
        if i < j {
            t.clone()
        } else {
            t.try_inverse().expect("transitions are invertible")
        }
    }

    pub fn rank(&self) -> usize {
        self.locals[0].rank()
    }

    /// The largest local exponent.
    pub fn exponent(&self) -> usize {
        self.locals.iter().map(HiggsLocal::exponent).max().unwrap_or(0)
    }

    /// The Higgs field of chart `c` restricted to overlap `idx`.
    pub fn local_on_pair(&self, c: usize, idx: usize) -> FormMatrix {
        let p = &self.covering.pairs()[idx];
        self.locals[c].theta().pullback(&p.restriction(c).hom)
    }

    /// The plain pullback along a cover map `X -> Y` on rings.
    pub fn pullback(&self, f: &CoverMap) -> Result<GluedHiggsBundle> {
        let locals = self
            .locals
            .iter()
            .enumerate()
            .map(|(c, l)| HiggsLocal::new(l.theta().pullback(f.chart(c))))
            .collect::<Result<Vec<_>>>()?;
        let transitions = self.transitions.iter().enumerate().map(|(k, t)| t.apply_hom(f.pair_at(k))).collect();
        GluedHiggsBundle::glue(f.target().clone(), locals, transitions)
    }

    pub fn tensor(&self, other: &GluedHiggsBundle) -> Result<GluedHiggsBundle> {
        let locals = self.locals.iter().zip(&other.locals).map(|(a, b)| tensor_higgs(a, b)).collect();
        let transitions = self.transitions.iter().zip(&other.transitions).map(|(a, b)| a.kron(b)).collect();
        GluedHiggsBundle::glue(self.covering.clone(), locals, transitions)
    }

    pub fn direct_sum(&self, other: &GluedHiggsBundle) -> Result<GluedHiggsBundle> {
        let locals = self.locals.iter().zip(&other.locals).map(|(a, b)| direct_sum_higgs(a, b)).collect();
        let transitions = self.transitions.iter().zip(&other.transitions).map(|(a, b)| a.block_diag(b)).collect();
        GluedHiggsBundle::glue(self.covering.clone(), locals, transitions)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank(),
            "locals": self.locals.iter().map(|l| l.theta().to_json()).collect::<Vec<_>>(),
            "transitions": transitions_json(&self.transitions, &self.covering),
        })
    }
}

/// A bundle with connection `d + A_i` on each chart, glued by transitions.
#[derive(Clone, Debug)]
pub struct GluedConnectionBundle {
    covering: Arc<Covering>,
    locals: Vec<FormMatrix>,
    transitions: Vec<Matrix>,
}

impl GluedConnectionBundle {
    /// Validates the cocycle condition and `A_j T = T A_i - dT` on overlaps.
    pub fn glue(covering: Arc<Covering>, locals: Vec<FormMatrix>, transitions: Vec<Matrix>) -> Result<GluedConnectionBundle> {
        if locals.len() != covering.num_charts() {
            return Err(Error::ShapeMismatch("one local connection per chart".into()));
        }
        let rank = locals[0].rows();
        for (c, a) in locals.iter().enumerate() {
            if a.rows() != rank || a.cols() != rank || !a.ring().same(covering.chart(c)) {
                return Err(Error::ShapeMismatch(format!("connection on chart {c} has the wrong rank or ring")));
            }
        }
        check_transitions(&covering, rank, &transitions)?;
        let bundle = GluedConnectionBundle { covering, locals, transitions };
        for (idx, p) in bundle.covering.pairs().iter().enumerate() {
            let t = &bundle.transitions[idx];
            let ai = bundle.local_on_pair(p.i, idx);
            let aj = bundle.local_on_pair(p.j, idx);
            if aj.right_mul(t) != ai.left_mul(t).sub(&t.differential()) {
                return Err(Error::GaugeMismatch(format!("({}, {})", p.i, p.j)));
            }
        }
        Ok(bundle)
    }

    pub fn covering(&self) -> &Arc<Covering> {
        &self.covering
    }

    pub fn locals(&self) -> &[FormMatrix] {
        &self.locals
    }

    pub fn local(&self, c: usize) -> &FormMatrix {
        &self.locals[c]
    }

    pub fn transitions(&self) -> &[Matrix] {
        &self.transitions
    }

    pub fn rank(&self) -> usize {
        self.locals[0].rows()
    }

    pub fn local_on_pair(&self, c: usize, idx: usize) -> FormMatrix {
        let p = &self.covering.pairs()[idx];
        self.locals[c].pullback(&p.restriction(c).hom)
    }

    /// First chart with nonzero curvature, if any.
    pub fn curvature_failure(&self) -> Option<String> {
        self.locals.iter().enumerate().find_map(|(c, a)| {
            a.curvature()
                .into_iter()
                .find(|(_, m)| !m.is_zero())
                .map(|((v, w), m)| format!("chart {c}, component ({v}, {w}): {m}"))
        })
    }

    pub fn is_flat(&self) -> bool {
        self.curvature_failure().is_none()
    }

    /// Pullback of connection matrices and transitions along a cover map.
    pub fn pullback(&self, f: &CoverMap) -> Result<GluedConnectionBundle> {
        let locals = self.locals.iter().enumerate().map(|(c, a)| a.pullback(f.chart(c))).collect();
        let transitions = self.transitions.iter().enumerate().map(|(k, t)| t.apply_hom(f.pair_at(k))).collect();
        GluedConnectionBundle::glue(f.target().clone(), locals, transitions)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank(),
            "locals": self.locals.iter().map(FormMatrix::to_json).collect::<Vec<_>>(),
            "transitions": transitions_json(&self.transitions, &self.covering),
        })
    }
}

/// Outcome of an isomorphism check, with the first failure located.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoCheck {
    pub ok: bool,
    pub failure: Option<String>,
}

impl IsoCheck {
    pub fn pass() -> IsoCheck {
        IsoCheck { ok: true, failure: None }
    }

    pub fn fail(msg: String) -> IsoCheck {
        IsoCheck { ok: false, failure: Some(msg) }
    }
}

/// Glued objects whose isomorphisms can be checked against a chartwise witness.
pub trait GluedBundle {
    fn covering(&self) -> &Arc<Covering>;
    fn rank(&self) -> usize;
    fn transition_at(&self, idx: usize) -> &Matrix;
    /// Whether `m: self -> other` intertwines the local structures on chart `c`.
    fn intertwines(&self, other: &Self, c: usize, m: &Matrix) -> bool;
}

impl GluedBundle for GluedHiggsBundle {
    fn covering(&self) -> &Arc<Covering> {
        &self.covering
    }

    fn rank(&self) -> usize {
        GluedHiggsBundle::rank(self)
    }

    fn transition_at(&self, idx: usize) -> &Matrix {
        &self.transitions[idx]
    }

    fn intertwines(&self, other: &Self, c: usize, m: &Matrix) -> bool {
        other.locals[c].theta().right_mul(m) == self.locals[c].theta().left_mul(m)
    }
}

impl GluedBundle for GluedConnectionBundle {
    fn covering(&self) -> &Arc<Covering> {
        &self.covering
    }

    fn rank(&self) -> usize {
        GluedConnectionBundle::rank(self)
    }

    fn transition_at(&self, idx: usize) -> &Matrix {
        &self.transitions[idx]
    }

    fn intertwines(&self, other: &Self, c: usize, m: &Matrix) -> bool {
        m.differential().add(&other.locals[c].right_mul(m)) == self.locals[c].left_mul(m)
    }
}

/// Checks that chartwise matrices `M_i` define an isomorphism `a -> b`:
/// each `M_i` is invertible and intertwines the local structures, and
/// `M_j T^a_ij = T^b_ij M_i` on every overlap.
pub fn bundle_iso_check<B: GluedBundle>(a: &B, b: &B, witness: &[Matrix]) -> IsoCheck {
    let cov = a.covering();
    if a.rank() != b.rank() || witness.len() != cov.num_charts() {
        return IsoCheck::fail("rank or chart count mismatch".into());
    }
    for (c, m) in witness.iter().enumerate() {
        if m.rows() != a.rank() || !m.ring().same(cov.chart(c)) {
            return IsoCheck::fail(format!("witness on chart {c} has the wrong shape or ring"));
        }
        if !m.det().is_unit() {
            return IsoCheck::fail(format!("witness on chart {c} is not invertible"));
        }
        if !a.intertwines(b, c, m) {
            return IsoCheck::fail(format!("witness on chart {c} does not intertwine the local structures"));
        }
    }
    for (idx, p) in cov.pairs().iter().enumerate() {
        let mi = witness[p.i].apply_hom(&p.restrict_i.hom);
        let mj = witness[p.j].apply_hom(&p.restrict_j.hom);
        if mj.mul(a.transition_at(idx)) != b.transition_at(idx).mul(&mi) {
            return IsoCheck::fail(format!("witness does not commute with transitions on overlap ({}, {})", p.i, p.j));
        }
    }
    IsoCheck::pass()
}
