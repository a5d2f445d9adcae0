//! Finite affine coverings, Čech cochains of twisted derivations, glued
//! bundles and obstruction classes of local lifts.
//!
//! Conventions, used everywhere in the crate:
//!
//! | object | convention |
//! |---|---|
//! | transition `T_ij` | coordinate vectors satisfy `s_j = T_ij s_i` on `U_ij` |
//! | multiplicative cocycle | `T_ik = T_jk T_ij` on `U_ijk` |
//! | additive cochain | `t_ik = t_ij + t_jk`, stored for `i < j`, `t_ji = -t_ij` |
//! | Higgs compatibility | `theta_j T_ij = T_ij theta_i` |
//! | connection compatibility | `A_j T_ij = T_ij A_i - dT_ij` for `nabla = d + A` |
//! | obstruction entry | `(lift_i - lift_j) / p` on `U_ij` |
//! | morphism of bundles `M: A -> B` | `M_j T^A_ij = T^B_ij M_i` and `M` intertwines the local structures |

mod bundle;
mod cochain;

pub use bundle::{bundle_iso_check, GluedBundle, GluedConnectionBundle, GluedHiggsBundle, IsoCheck};
pub(crate) use bundle::check_transitions;
pub use cochain::{
    pushforward_cochain, restrict_derivation, DerivationCochain, FrobeniusLifts, MorphismLifts, Pushforward,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{Ring, RingHom};

/// How an overlap variable is expressed through a chart variable `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionKind {
    /// The restriction of `w` is the variable.
    Var,
    /// The restriction of `w` is the inverse of the variable.
    Inv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Section {
    pub chart_var: usize,
    pub kind: SectionKind,
}

/// For each variable of the target of `rho`, a source variable that restricts
/// to it or to its inverse.
pub fn find_sections(rho: &RingHom) -> Result<Vec<Section>> {
    let target = rho.target();
    let mut out = Vec::with_capacity(target.nvars());
    for v in 0..target.nvars() {
        let var = target.var(v);
        let found = (0..rho.source().nvars()).find_map(|w| {
            let img = rho.image(w);
            if *img == var {
                Some(Section { chart_var: w, kind: SectionKind::Var })
            } else if (img * &var).is_one() {
                Some(Section { chart_var: w, kind: SectionKind::Inv })
            } else {
                None
            }
        });
        match found {
            Some(s) => out.push(s),
            None => {
                return Err(Error::Invalid(format!(
                    "overlap variable `{}` of {target} is not the restriction of a chart variable or its inverse under {rho}",
                    target.vars()[v].name
                )))
            }
        }
    }
    Ok(out)
}

/// Transports a chart map `phi: C -> C'` to the overlaps: given restrictions
/// `from: C -> O` (with its sections) and `to: C' -> O'`, returns the unique
/// `O -> O'` compatible with `phi`.
pub fn transport(phi: &RingHom, from: &RingHom, sections: &[Section], to: &RingHom) -> Result<RingHom> {
    let mut imgs = Vec::with_capacity(sections.len());
    for s in sections {
        let img = to.apply(phi.image(s.chart_var));
        imgs.push(match s.kind {
            SectionKind::Var => img,
            SectionKind::Inv => img
                .try_inverse()
                .ok_or_else(|| Error::NotUnit(format!("{img} while transporting {phi} to {}", to.target())))?,
        });
    }
    let out = RingHom::new(from.target(), to.target(), imgs)?;
    for w in 0..phi.source().nvars() {
        if out.apply(from.image(w)) != to.apply(phi.image(w)) {
            return Err(Error::Invalid(format!(
                "{phi} does not descend to {} -> {}: variable `{}` disagrees",
                from.target(),
                to.target(),
                phi.source().vars()[w].name
            )));
        }
    }
    Ok(out)
}

/// A restriction `chart -> overlap` together with its sections.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub hom: RingHom,
    pub sections: Vec<Section>,
}

impl Restriction {
    pub fn new(hom: RingHom) -> Result<Restriction> {
        let sections = find_sections(&hom)?;
        Ok(Restriction { hom, sections })
    }

    fn lift(&self) -> Result<Restriction> {
        Restriction::new(self.hom.lift()?)
    }
}

#[derive(Clone, Debug)]
pub struct PairOverlap {
    pub i: usize,
    pub j: usize,
    pub ring: Ring,
    pub restrict_i: Restriction,
    pub restrict_j: Restriction,
}

impl PairOverlap {
    pub fn restriction(&self, c: usize) -> &Restriction {
        if c == self.i {
            &self.restrict_i
        } else {
            assert_eq!(c, self.j, "chart {c} does not meet overlap ({}, {})", self.i, self.j);
            &self.restrict_j
        }
    }
}

#[derive(Clone, Debug)]
pub struct TripleOverlap {
    pub idx: [usize; 3],
    pub ring: Ring,
    pub restrict: [Restriction; 3],
}

impl TripleOverlap {
    pub fn restriction(&self, c: usize) -> &Restriction {
        let pos = self.idx.iter().position(|&k| k == c).expect("chart meets triple overlap");
        &self.restrict[pos]
    }
}

/// Charts, pairwise overlaps `(i, j)` with `i < j`, and triple overlaps.
#[derive(Clone, Debug)]
pub struct Covering {
    charts: Vec<Ring>,
    pairs: Vec<PairOverlap>,
    triples: Vec<TripleOverlap>,
    pair_to_triple: Vec<[RingHom; 3]>,
}

impl Covering {
    /// Validates and assembles a covering. Every pair `i < j` needs an
    /// overlap, and every triple a triple overlap when there are three or
    /// more charts.
    pub fn new(charts: Vec<Ring>, mut pairs: Vec<PairOverlap>, mut triples: Vec<TripleOverlap>) -> Result<Covering> {
        let n = charts.len();
        if n == 0 {
            return Err(Error::Invalid("a covering needs at least one chart".into()));
        }
        let modulus = charts[0].modulus();
        if charts.iter().any(|c| c.modulus() != modulus) {
            return Err(Error::Invalid("charts at different levels".into()));
        }
        for p in pairs.iter_mut() {
            if p.i > p.j {
                std::mem::swap(&mut p.i, &mut p.j);
                std::mem::swap(&mut p.restrict_i, &mut p.restrict_j);
            }
        }
        pairs.sort_by_key(|p| (p.i, p.j));
        let expected: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let got: Vec<(usize, usize)> = pairs.iter().map(|p| (p.i, p.j)).collect();
        if got != expected {
            return Err(Error::Invalid(format!("overlaps {got:?} do not match the chart pairs {expected:?}")));
        }
        for p in &pairs {
            for (c, r) in [(p.i, &p.restrict_i), (p.j, &p.restrict_j)] {
                if !r.hom.source().same(&charts[c]) || !r.hom.target().same(&p.ring) {
                    return Err(Error::Invalid(format!("restriction from chart {c} to overlap ({}, {}) has wrong rings", p.i, p.j)));
                }
            }
            // Both restrictions must induce the same identification of the overlap.
            let id = RingHom::identity(&p.ring);
            let via_i = transport(&RingHom::identity(&charts[p.i]), &p.restrict_i.hom, &p.restrict_i.sections, &p.restrict_i.hom)?;
            if !via_i.same_as(&id) {
                return Err(Error::Invalid(format!("overlap ({}, {}) is not generated by chart {}", p.i, p.j, p.i)));
            }
        }
        for t in triples.iter_mut() {
            let mut order = [0usize, 1, 2];
            order.sort_by_key(|&k| t.idx[k]);
            let idx = order.map(|k| t.idx[k]);
            let restrict = order.map(|k| t.restrict[k].clone());
            t.idx = idx;
            t.restrict = restrict;
        }
        triples.sort_by_key(|t| t.idx);
        let expected: Vec<[usize; 3]> =
            (0..n).flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| [i, j, k]))).collect();
        let got: Vec<[usize; 3]> = triples.iter().map(|t| t.idx).collect();
        if got != expected {
            return Err(Error::Invalid(format!("triple overlaps {got:?} do not match the chart triples {expected:?}")));
        }
        let mut cov = Covering { charts, pairs, triples, pair_to_triple: Vec::new() };
        let mut maps = Vec::new();
        for t in &cov.triples {
            let [i, j, k] = t.idx;
            let mut three = Vec::new();
            for (a, b) in [(i, j), (j, k), (i, k)] {
                let pair = cov.pair(a, b);
                let via_a = transport(
                    &RingHom::identity(&cov.charts[a]),
                    &pair.restrict_i.hom,
                    &pair.restrict_i.sections,
                    &t.restriction(a).hom,
                )?;
                let via_b = transport(
                    &RingHom::identity(&cov.charts[b]),
                    &pair.restrict_j.hom,
                    &pair.restrict_j.sections,
                    &t.restriction(b).hom,
                )?;
                if !via_a.same_as(&via_b) {
                    return Err(Error::Invalid(format!("overlap ({a}, {b}) maps inconsistently into triple {:?}", t.idx)));
                }
                three.push(via_a);
            }
            maps.push([three[0].clone(), three[1].clone(), three[2].clone()]);
        }
        cov.pair_to_triple = maps;
        Ok(cov)
    }

    /// A single-chart covering.
    pub fn single(chart: Ring) -> Covering {
        Covering::new(vec![chart], Vec::new(), Vec::new()).expect("single chart")
    }

    pub fn charts(&self) -> &[Ring] {
        &self.charts
    }

    pub fn chart(&self, i: usize) -> &Ring {
        &self.charts[i]
    }

    pub fn num_charts(&self) -> usize {
        self.charts.len()
    }

    pub fn pairs(&self) -> &[PairOverlap] {
        &self.pairs
    }

    pub fn triples(&self) -> &[TripleOverlap] {
        &self.triples
    }

    pub fn p(&self) -> u64 {
        self.charts[0].p()
    }

    pub fn level(&self) -> u8 {
        self.charts[0].level()
    }

    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.pairs.iter().position(|p| p.i == i && p.j == j).unwrap_or_else(|| panic!("no overlap ({i}, {j})"))
    }

    pub fn pair(&self, i: usize, j: usize) -> &PairOverlap {
        &self.pairs[self.pair_index(i, j)]
    }

    /// The maps from overlaps `(i,j)`, `(j,k)`, `(i,k)` into triple overlap `t`.
    pub fn pair_to_triple(&self, t: usize) -> &[RingHom; 3] {
        &self.pair_to_triple[t]
    }

    /// The same covering with coefficients in `Z/p^2`.
    pub fn lifted(&self) -> Result<Covering> {
        if self.level() == 2 {
            return Ok(self.clone());
        }
        let charts = self.charts.iter().map(Ring::lifted).collect();
        let pairs = self
            .pairs
            .iter()
            .map(|p| {
                Ok(PairOverlap {
                    i: p.i,
                    j: p.j,
                    ring: p.ring.lifted(),
                    restrict_i: p.restrict_i.lift()?,
                    restrict_j: p.restrict_j.lift()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let triples = self
            .triples
            .iter()
            .map(|t| {
                Ok(TripleOverlap {
                    idx: t.idx,
                    ring: t.ring.lifted(),
                    restrict: [t.restrict[0].lift()?, t.restrict[1].lift()?, t.restrict[2].lift()?],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Covering::new(charts, pairs, triples)
    }
}

/// A morphism of coverings, given by ring maps `x_i -> y_i` on charts and the
/// induced maps on pair and triple overlaps.
#[derive(Clone, Debug)]
pub struct CoverMap {
    source: Arc<Covering>,
    target: Arc<Covering>,
    charts: Vec<RingHom>,
    pairs: Vec<RingHom>,
    triples: Vec<RingHom>,
}

impl CoverMap {
    /// Checks that the chart maps agree on overlaps.
    pub fn new(source: Arc<Covering>, target: Arc<Covering>, charts: Vec<RingHom>) -> Result<CoverMap> {
        if source.num_charts() != target.num_charts() || charts.len() != source.num_charts() {
            return Err(Error::ShapeMismatch("chart maps need matching chart counts".into()));
        }
        for (c, h) in charts.iter().enumerate() {
            if !h.source().same(source.chart(c)) || !h.target().same(target.chart(c)) {
                return Err(Error::ShapeMismatch(format!("chart map {c} has wrong rings")));
            }
        }
        let mut pairs = Vec::new();
        for (sp, tp) in source.pairs().iter().zip(target.pairs()) {
            let via_i = transport(&charts[sp.i], &sp.restrict_i.hom, &sp.restrict_i.sections, &tp.restrict_i.hom)
                .map_err(|e| e.at(format!("overlap ({}, {})", sp.i, sp.j)))?;
            let via_j = transport(&charts[sp.j], &sp.restrict_j.hom, &sp.restrict_j.sections, &tp.restrict_j.hom)
                .map_err(|e| e.at(format!("overlap ({}, {})", sp.i, sp.j)))?;
            if !via_i.same_as(&via_j) {
                return Err(Error::Invalid(format!(
                    "chart maps {} and {} disagree on overlap ({}, {}): {via_i} vs {via_j}",
                    sp.i, sp.j, sp.i, sp.j
                )));
            }
            pairs.push(via_i);
        }
        let mut triples = Vec::new();
        for (st, tt) in source.triples().iter().zip(target.triples()) {
            let c = st.idx[0];
            let r = st.restriction(c);
            triples.push(transport(&charts[c], &r.hom, &r.sections, &tt.restriction(c).hom)?);
        }
        Ok(CoverMap { source, target, charts, pairs, triples })
    }

    pub fn identity(cov: &Arc<Covering>) -> CoverMap {
        let charts = cov.charts().iter().map(RingHom::identity).collect();
        CoverMap::new(cov.clone(), cov.clone(), charts).expect("identity cover map")
    }

    /// The `p`-power map on a level-1 covering.
    pub fn frobenius(cov: &Arc<Covering>) -> CoverMap {
        let charts = cov.charts().iter().map(RingHom::frobenius).collect();
        CoverMap::new(cov.clone(), cov.clone(), charts).expect("Frobenius commutes with restrictions")
    }

    pub fn source(&self) -> &Arc<Covering> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Covering> {
        &self.target
    }

    pub fn chart(&self, i: usize) -> &RingHom {
        &self.charts[i]
    }

    pub fn charts(&self) -> &[RingHom] {
        &self.charts
    }

    /// The map on overlap `(i, j)`.
    pub fn pair(&self, i: usize, j: usize) -> &RingHom {
        &self.pairs[self.source.pair_index(i, j)]
    }

    pub fn pair_at(&self, idx: usize) -> &RingHom {
        &self.pairs[idx]
    }

    pub fn triple(&self, t: usize) -> &RingHom {
        &self.triples[t]
    }

    /// `self` followed by `next` on rings.
    pub fn then(&self, next: &CoverMap) -> CoverMap {
        CoverMap {
            source: self.source.clone(),
            target: next.target.clone(),
            charts: self.charts.iter().zip(&next.charts).map(|(a, b)| a.then(b)).collect(),
            pairs: self.pairs.iter().zip(&next.pairs).map(|(a, b)| a.then(b)).collect(),
            triples: self.triples.iter().zip(&next.triples).map(|(a, b)| a.then(b)).collect(),
        }
    }

    pub fn same_as(&self, other: &CoverMap) -> bool {
        self.charts.iter().zip(&other.charts).all(|(a, b)| a.same_as(b))
            && self.pairs.iter().zip(&other.pairs).all(|(a, b)| a.same_as(b))
    }
}
