use std::sync::Arc;

use super::{transport, CoverMap, Covering};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::{hom_difference_derivation, RingHom, TwistedDerivation};

/// Extends a derivation `delta: A -> B` along restrictions `rho_src: A -> A'`
/// and `rho_tgt: B -> B'` to the derivation `A' -> B'` twisted along `base`.
///
/// The values on the basis of `A'` solve `J delta' = rho_tgt(delta)`, where
/// `J` is the Jacobian of `rho_src` pushed through `base`.
pub fn restrict_derivation(
    delta: &TwistedDerivation,
    rho_src: &RingHom,
    rho_tgt: &RingHom,
    base: &RingHom,
) -> Result<TwistedDerivation> {
    if !rho_src.then(base).same_as(&delta.base().then(rho_tgt)) {
        return Err(Error::ShapeMismatch(format!(
            "restriction square does not commute for derivation along {}",
            delta.base()
        )));
    }
    let n = rho_src.source().nvars();
    if rho_src.target().nvars() != n {
        return Err(Error::ShapeMismatch("restriction changes the number of variables".into()));
    }
    let b2 = base.target();
    let jac = Matrix::from_rows(
        b2,
        (0..n).map(|w| rho_src.basis_pullback(w).coeffs().iter().map(|c| base.apply(c)).collect()).collect(),
    );
    let inv = jac
        .try_inverse()
        .ok_or_else(|| Error::NotUnit(format!("Jacobian of {rho_src}")))?;
    let rhs = Matrix::from_rows(b2, (0..n).map(|w| vec![rho_tgt.apply(delta.value(w))]).collect());
    let sol = inv.mul(&rhs);
    TwistedDerivation::new(base.clone(), (0..n).map(|u| sol.get(u, 0).clone()).collect())
}

/// A Čech 1-cochain of twisted derivations along a [`CoverMap`], stored on
/// overlaps `(i, j)` with `i < j`.
#[derive(Clone, Debug)]
pub struct DerivationCochain {
    map: Arc<CoverMap>,
    entries: Vec<TwistedDerivation>,
}

impl DerivationCochain {
    pub fn new(map: Arc<CoverMap>, entries: Vec<TwistedDerivation>) -> Result<DerivationCochain> {
        if entries.len() != map.source().pairs().len() {
            return Err(Error::ShapeMismatch("one cochain entry per overlap".into()));
        }
        for (idx, e) in entries.iter().enumerate() {
            if !e.base().same_as(map.pair_at(idx)) {
                let p = &map.source().pairs()[idx];
                return Err(Error::ShapeMismatch(format!(
                    "cochain entry on ({}, {}) is twisted along {} instead of {}",
                    p.i,
                    p.j,
                    e.base(),
                    map.pair_at(idx)
                )));
            }
        }
        Ok(DerivationCochain { map, entries })
    }

    pub fn zero(map: Arc<CoverMap>) -> DerivationCochain {
        let entries = (0..map.source().pairs().len()).map(|k| TwistedDerivation::zero(map.pair_at(k))).collect();
        DerivationCochain { map, entries }
    }

    /// `s_j - s_i` on each overlap, for chartwise derivations `s_c` along the
    /// chart maps.
    pub fn coboundary(map: Arc<CoverMap>, s: &[TwistedDerivation]) -> Result<DerivationCochain> {
        let (x, y) = (map.source().clone(), map.target().clone());
        let mut entries = Vec::new();
        for (idx, (px, py)) in x.pairs().iter().zip(y.pairs()).enumerate() {
            let base = map.pair_at(idx);
            let si = restrict_derivation(&s[px.i], &px.restrict_i.hom, &py.restrict_i.hom, base)?;
            let sj = restrict_derivation(&s[px.j], &px.restrict_j.hom, &py.restrict_j.hom, base)?;
            entries.push(sj.sub(&si));
        }
        DerivationCochain::new(map, entries)
    }

    pub fn map(&self) -> &Arc<CoverMap> {
        &self.map
    }

    pub fn entries(&self) -> &[TwistedDerivation] {
        &self.entries
    }

    /// The entry on `(i, j)`, with `t_ji = -t_ij`.
    pub fn entry(&self, i: usize, j: usize) -> TwistedDerivation {
        let e = &self.entries[self.map.source().pair_index(i, j)];
        if i < j {
            e.clone()
        } else {
            e.neg()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TwistedDerivation::is_zero)
    }

    pub fn add(&self, other: &DerivationCochain) -> DerivationCochain {
        DerivationCochain {
            map: self.map.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &DerivationCochain) -> DerivationCochain {
        DerivationCochain {
            map: self.map.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn same_as(&self, other: &DerivationCochain) -> bool {
        self.entries.len() == other.entries.len() && self.entries.iter().zip(&other.entries).all(|(a, b)| a.same_as(b))
    }

    /// First overlap where `self` and `other` differ, with both values.
    pub fn first_difference(&self, other: &DerivationCochain) -> Option<String> {
        let pairs = self.map.source().pairs();
        self.entries.iter().zip(&other.entries).zip(pairs).find_map(|((a, b), p)| {
            (!a.same_as(b)).then(|| format!("overlap ({}, {}): {a} vs {b}", p.i, p.j))
        })
    }

    /// The first triple overlap where `t_ik = t_ij + t_jk` fails.
    pub fn cocycle_failure(&self) -> Option<String> {
        let (x, y) = (self.map.source(), self.map.target());
        for (t, trip) in x.triples().iter().enumerate() {
            let [i, j, k] = trip.idx;
            let mx = x.pair_to_triple(t);
            let my = y.pair_to_triple(t);
            let base = self.map.triple(t);
            let restrict = |a: usize, b: usize, slot: usize| {
                restrict_derivation(&self.entry(a, b), &mx[slot], &my[slot], base)
            };
            let result = (|| -> Result<bool> {
                let ij = restrict(i, j, 0)?;
                let jk = restrict(j, k, 1)?;
                let ik = restrict(i, k, 2)?;
                Ok(ik.same_as(&ij.add(&jk)))
            })();
            match result {
                Ok(true) => {}
                Ok(false) => return Some(format!("triple ({i}, {j}, {k})")),
                Err(e) => return Some(format!("triple ({i}, {j}, {k}): {e}")),
            }
        }
        None
    }

    pub fn is_cocycle(&self) -> bool {
        self.cocycle_failure().is_none()
    }

    /// Entrywise `h o t`, a cochain along `self.map then h`.
    pub fn post_compose(&self, h: &CoverMap) -> DerivationCochain {
        let entries = self.entries.iter().enumerate().map(|(k, e)| e.post_compose(h.pair_at(k))).collect();
        DerivationCochain { map: Arc::new(self.map.then(h)), entries }
    }

    /// Entrywise `t o k^*` on forms, a cochain along `k then self.map`.
    pub fn pre_compose(&self, k: &CoverMap) -> DerivationCochain {
        let entries = self.entries.iter().enumerate().map(|(idx, e)| e.pre_compose(k.pair_at(idx))).collect();
        DerivationCochain { map: Arc::new(k.then(&self.map)), entries }
    }
}

/// The three transports of obstruction cochains into cochains along
/// `g = F_X then f`.
#[derive(Clone, Copy, Debug)]
pub enum Pushforward<'a> {
    /// `f^*` applied to a cochain along `F_X`.
    PullbackByF(&'a CoverMap),
    /// `F_Y^*` applied to a cochain along `f`.
    FrobeniusY(&'a CoverMap),
    /// A cochain along `F_Y` precomposed with `df`.
    TangentMapF(&'a CoverMap),
}

pub fn pushforward_cochain(c: &DerivationCochain, along: Pushforward<'_>) -> DerivationCochain {
    match along {
        Pushforward::PullbackByF(f) => c.post_compose(f),
        Pushforward::FrobeniusY(fy) => c.post_compose(fy),
        Pushforward::TangentMapF(f) => c.pre_compose(f),
    }
}

/// Transports a level-2 chart map to every overlap, from the side of its chart.
fn transport_lifts(src: &Covering, tgt: &Covering, lifts: &[RingHom]) -> Result<Vec<(RingHom, RingHom)>> {
    src.pairs()
        .iter()
        .zip(tgt.pairs())
        .map(|(ps, pt)| {
            let a = transport(&lifts[ps.i], &ps.restrict_i.hom, &ps.restrict_i.sections, &pt.restrict_i.hom)
                .map_err(|e| e.at(format!("lift on chart {} over ({}, {})", ps.i, ps.i, ps.j)))?;
            let b = transport(&lifts[ps.j], &ps.restrict_j.hom, &ps.restrict_j.sections, &pt.restrict_j.hom)
                .map_err(|e| e.at(format!("lift on chart {} over ({}, {})", ps.j, ps.i, ps.j)))?;
            Ok((a, b))
        })
        .collect()
}

fn obstruction(map: &Arc<CoverMap>, on_pairs: &[(RingHom, RingHom)]) -> Result<DerivationCochain> {
    let pairs = map.source().pairs();
    let entries = on_pairs
        .iter()
        .zip(pairs)
        .map(|((a, b), p)| {
            hom_difference_derivation(a, b).map_err(|e| match e {
                Error::NotLiftPair(v) => Error::NotLiftPair(format!("{v} on overlap ({}, {})", p.i, p.j)),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DerivationCochain::new(map.clone(), entries)
}

/// Chartwise level-2 Frobenius lifts of a level-1 covering.
#[derive(Clone, Debug)]
pub struct FrobeniusLifts {
    covering: Arc<Covering>,
    covering2: Arc<Covering>,
    lifts: Vec<RingHom>,
    frobenius: Arc<CoverMap>,
}

impl FrobeniusLifts {
    pub fn new(covering: Arc<Covering>, lifts: Vec<RingHom>) -> Result<FrobeniusLifts> {
        let covering2 = Arc::new(covering.lifted()?);
        if lifts.len() != covering.num_charts() {
            return Err(Error::ShapeMismatch("one Frobenius lift per chart".into()));
        }
        for (c, l) in lifts.iter().enumerate() {
            if !l.source().same(covering2.chart(c)) || !l.target().same(covering2.chart(c)) {
                return Err(Error::NotAFrobeniusLift(format!("lift on chart {c} is not an endomorphism of {}", covering2.chart(c))));
            }
            let frob = RingHom::frobenius(covering.chart(c));
            let red = l.reduce_mod_p();
            if let Some(v) = (0..frob.source().nvars()).find(|&v| red.image(v) != frob.image(v)) {
                return Err(Error::NotAFrobeniusLift(format!(
                    "chart {c}: `{}` maps to {} which is not {} mod p",
                    frob.source().vars()[v].name,
                    l.image(v),
                    frob.image(v)
                )));
            }
        }
        let frobenius = Arc::new(CoverMap::frobenius(&covering));
        Ok(FrobeniusLifts { covering, covering2, lifts, frobenius })
    }

    /// The lifts `x -> x^p` on every chart.
    pub fn standard(covering: Arc<Covering>) -> Result<FrobeniusLifts> {
        let cov2 = covering.lifted()?;
        let lifts = cov2
            .charts()
            .iter()
            .map(|r| RingHom::new(r, r, (0..r.nvars()).map(|v| r.var(v).pow(r.p() as u32)).collect()))
            .collect::<Result<Vec<_>>>()?;
        FrobeniusLifts::new(covering, lifts)
    }

    pub fn covering(&self) -> &Arc<Covering> {
        &self.covering
    }

    pub fn covering2(&self) -> &Arc<Covering> {
        &self.covering2
    }

    pub fn lifts(&self) -> &[RingHom] {
        &self.lifts
    }

    pub fn lift(&self, c: usize) -> &RingHom {
        &self.lifts[c]
    }

    pub fn frobenius(&self) -> &Arc<CoverMap> {
        &self.frobenius
    }

    /// `ob(F)_ij = (F_i - F_j)/p` on each overlap.
    pub fn obstruction(&self) -> Result<DerivationCochain> {
        let on_pairs = transport_lifts(&self.covering2, &self.covering2, &self.lifts)?;
        obstruction(&self.frobenius, &on_pairs)
    }
}

/// Chartwise level-2 lifts of a level-1 [`CoverMap`].
#[derive(Clone, Debug)]
pub struct MorphismLifts {
    map: Arc<CoverMap>,
    source2: Arc<Covering>,
    target2: Arc<Covering>,
    lifts: Vec<RingHom>,
}

impl MorphismLifts {
    pub fn new(map: Arc<CoverMap>, lifts: Vec<RingHom>) -> Result<MorphismLifts> {
        let source2 = Arc::new(map.source().lifted()?);
        let target2 = Arc::new(map.target().lifted()?);
        if lifts.len() != map.charts().len() {
            return Err(Error::ShapeMismatch("one morphism lift per chart".into()));
        }
        for (c, l) in lifts.iter().enumerate() {
            if !l.source().same(source2.chart(c)) || !l.target().same(target2.chart(c)) {
                return Err(Error::ShapeMismatch(format!("morphism lift on chart {c} has wrong rings")));
            }
            if !l.reduce_mod_p().same_as(map.chart(c)) {
                return Err(Error::NotLiftPair(format!("morphism lift on chart {c} does not reduce to {}", map.chart(c))));
            }
        }
        Ok(MorphismLifts { map, source2, target2, lifts })
    }

    /// Coefficient-residue lifts of the chart maps.
    pub fn naive(map: Arc<CoverMap>) -> Result<MorphismLifts> {
        let lifts = map.charts().iter().map(RingHom::lift).collect::<Result<Vec<_>>>()?;
        MorphismLifts::new(map, lifts)
    }

    pub fn map(&self) -> &Arc<CoverMap> {
        &self.map
    }

    pub fn lifts(&self) -> &[RingHom] {
        &self.lifts
    }

    pub fn lift(&self, c: usize) -> &RingHom {
        &self.lifts[c]
    }

    /// `ob(f)_ij = (f_i - f_j)/p` on each overlap.
    pub fn obstruction(&self) -> Result<DerivationCochain> {
        let on_pairs = transport_lifts(&self.source2, &self.target2, &self.lifts)?;
        obstruction(&self.map, &on_pairs)
    }
}
