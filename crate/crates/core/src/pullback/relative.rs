use std::sync::Arc;

use serde_json::{json, Value};

use super::frame_change;
use crate::cech::{check_transitions, CoverMap, IsoCheck};
use crate::error::{Error, Result};
use crate::higgs::HiggsLocal;
use crate::matrix::{FormMatrix, Matrix};

/// A bundle on the charts of `Y` whose Higgs field takes values in
/// `f^* Omega_X`: on chart `c` there is one matrix over `Y_c` for each
/// variable of `X_c`, in the frame of that chart.
#[derive(Clone, Debug)]
pub struct RelativeHiggsBundle {
    f: Arc<CoverMap>,
    actions: Vec<Vec<Matrix>>,
    transitions: Vec<Matrix>,
}

impl RelativeHiggsBundle {
    /// Validates the cocycle condition, commutativity of the actions and
    /// compatibility with the transitions after the change of tangent frame.
    pub fn glue(f: Arc<CoverMap>, actions: Vec<Vec<Matrix>>, transitions: Vec<Matrix>) -> Result<RelativeHiggsBundle> {
        let y = f.target().clone();
        if actions.len() != y.num_charts() {
            return Err(Error::ShapeMismatch("one list of actions per chart".into()));
        }
        let rank = transitions.first().map_or_else(|| actions[0][0].rows(), Matrix::rows);
        for (c, acts) in actions.iter().enumerate() {
            if acts.len() != f.source().chart(c).nvars() {
                return Err(Error::ShapeMismatch(format!("chart {c} needs one action per variable of the source chart")));
            }
            for (v, a) in acts.iter().enumerate() {
                if a.rows() != rank || a.cols() != rank || !a.ring().same(y.chart(c)) {
                    return Err(Error::ShapeMismatch(format!("action {v} on chart {c} has the wrong shape or ring")));
                }
                for (w, b) in acts.iter().enumerate().skip(v + 1) {
                    if !a.commutator(b).is_zero() {
                        return Err(Error::NotCommuting(v, w));
                    }
                }
            }
        }
        check_transitions(&y, rank, &transitions)?;
        let bundle = RelativeHiggsBundle { f, actions, transitions };
        for idx in 0..y.pairs().len() {
            bundle.compatibility_failure(idx)?;
        }
        Ok(bundle)
    }

    fn compatibility_failure(&self, idx: usize) -> Result<()> {
        let y = self.f.target();
        let p = &y.pairs()[idx];
        let t = &self.transitions[idx];
        let k = frame_change(&self.f, idx)?;
        let ai = self.actions_on_pair(p.i, idx);
        let aj = self.actions_on_pair(p.j, idx);
        for (w2, a) in ai.iter().enumerate() {
            let mut lhs = Matrix::zero(t.ring(), t.rows(), t.cols());
            for (w, b) in aj.iter().enumerate() {
                lhs = lhs.add(&b.scale(k.get(w, w2)));
            }
            if lhs.mul(t) != t.mul(a) {
                return Err(Error::HiggsMismatch(format!("({}, {})", p.i, p.j)));
            }
        }
        Ok(())
    }

    pub fn map(&self) -> &Arc<CoverMap> {
        &self.f
    }

    pub fn rank(&self) -> usize {
        self.transitions.first().map_or_else(|| self.actions[0][0].rows(), Matrix::rows)
    }

    pub fn actions(&self, c: usize) -> &[Matrix] {
        &self.actions[c]
    }

    pub fn transitions(&self) -> &[Matrix] {
        &self.transitions
    }

    /// The actions of chart `c` restricted to overlap `idx`.
    pub fn actions_on_pair(&self, c: usize, idx: usize) -> Vec<Matrix> {
        let p = &self.f.target().pairs()[idx];
        let rho = &p.restriction(c).hom;
        self.actions[c].iter().map(|a| a.apply_hom(rho)).collect()
    }

    /// Pushes the field forward along `f^* Omega_X -> Omega_Y`.
    pub fn pushforward(&self) -> Result<crate::cech::GluedHiggsBundle> {
        let y = self.f.target();
        let locals = (0..y.num_charts())
            .map(|c| {
                let ring = y.chart(c);
                let mut theta = FormMatrix::zero(ring, self.rank(), self.rank());
                for (w, a) in self.actions[c].iter().enumerate() {
                    let form = self.f.chart(c).basis_pullback(w);
                    let comps = form.coeffs().iter().map(|c| a.scale(c)).collect();
                    theta = theta.add(&FormMatrix::from_components(ring, comps));
                }
                HiggsLocal::new(theta)
            })
            .collect::<Result<Vec<_>>>()?;
        crate::cech::GluedHiggsBundle::glue(y.clone(), locals, self.transitions.clone())
    }

    pub fn to_json(&self) -> Value {
        let y = self.f.target();
        json!({
            "rank": self.rank(),
            "actions": self.actions.iter().map(|a| a.iter().map(Matrix::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "transitions": self.transitions.iter().zip(y.pairs()).map(|(t, p)| json!({"pair": [p.i, p.j], "matrix": t.to_json()})).collect::<Vec<_>>(),
        })
    }
}

/// Checks that chartwise matrices `M_c: a -> b` are invertible, intertwine
/// every action and commute with the transitions.
pub fn relative_iso_check(a: &RelativeHiggsBundle, b: &RelativeHiggsBundle, witness: &[Matrix]) -> IsoCheck {
    let y = a.f.target();
    if a.rank() != b.rank() || witness.len() != y.num_charts() {
        return IsoCheck::fail("rank or chart count mismatch".into());
    }
    for (c, m) in witness.iter().enumerate() {
        if m.rows() != a.rank() || m.cols() != a.rank() || !m.ring().same(y.chart(c)) {
            return IsoCheck::fail(format!("witness on chart {c} has the wrong shape or ring"));
        }
        if !m.det().is_unit() {
            return IsoCheck::fail(format!("witness on chart {c} is not invertible"));
        }
        for (w, (x, z)) in a.actions[c].iter().zip(&b.actions[c]).enumerate() {
            if z.mul(m) != m.mul(x) {
                return IsoCheck::fail(format!("witness on chart {c} does not intertwine action {w}"));
            }
        }
    }
    for (idx, p) in y.pairs().iter().enumerate() {
        let mi = witness[p.i].apply_hom(&p.restrict_i.hom);
        let mj = witness[p.j].apply_hom(&p.restrict_j.hom);
        if mj.mul(&a.transitions[idx]) != b.transitions[idx].mul(&mi) {
            return IsoCheck::fail(format!("witness does not commute with transitions on overlap ({}, {})", p.i, p.j));
        }
    }
    IsoCheck::pass()
}
