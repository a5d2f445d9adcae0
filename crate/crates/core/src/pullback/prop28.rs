use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::extension::SymPower;
use super::relative::{relative_iso_check, RelativeHiggsBundle};
use super::{LineModuleF, PullbackContext};
use crate::cech::IsoCheck;
use crate::error::{Error, Result};
use crate::linalg::{coefficient_equations, nullspace_mod_p};
use crate::matrix::Matrix;
use crate::ring::{Poly, Ring, RingElem};

/// Number of random combinations of solutions tried at each degree level.
const RANDOM_TRIALS: usize = 24;

/// Outcome of the bounded-degree search for an isomorphism `F^r -> Sym^r`.
#[derive(Clone, Debug)]
pub struct IsoSearch {
    pub cap: u32,
    /// Degree level at which the first isomorphism was found.
    pub found_at: Option<u32>,
    pub witness: Option<Vec<Matrix>>,
    /// Dimension of the space of module maps at each level searched.
    pub nullities: Vec<usize>,
    pub candidates_tested: usize,
}

impl IsoSearch {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cap": self.cap,
            "found": self.found(),
            "found_at": self.found_at,
            "witness": self.witness.as_ref().map(|w| w.iter().map(Matrix::to_json).collect::<Vec<_>>()),
            "nullities": self.nullities,
            "candidates_tested": self.candidates_tested,
        })
    }
}

/// The comparison between `F^r_tau` and `E^r_tau = Sym^r(E_tau)` on a curve.
///
/// Gluing and Higgs matrices are given in the frame convention
/// `frame_i = M frame_j`, the transpose of the coordinate convention. The
/// matrices for `E^r` use the divided basis `e_0^{r-k} e^k / (r-k)!`.
#[derive(Clone, Debug)]
pub struct Prop28Report {
    pub r: usize,
    pub gluing_f: Matrix,
    pub gluing_e: Matrix,
    pub higgs_f: Matrix,
    pub higgs_e: Matrix,
    /// The diagonal degree-scaling map `F^r -> E^r`.
    pub explicit_witness: Vec<Matrix>,
    pub explicit: IsoCheck,
    pub search: IsoSearch,
}

impl Prop28Report {
    pub fn to_json(&self) -> Value {
        json!({
            "statement": "comparison of F^r_tau and E^r_tau",
            "r": self.r,
            "gluingF": self.gluing_f.to_json(),
            "gluingE": self.gluing_e.to_json(),
            "higgsF": self.higgs_f.to_json(),
            "higgsE": self.higgs_e.to_json(),
            "explicit_witness": self.explicit_witness.iter().map(Matrix::to_json).collect::<Vec<_>>(),
            "explicit_result": self.explicit.ok,
            "iso_search": self.search.to_json(),
            "cap": self.search.cap,
        })
    }
}

/// Builds both modules on a covering by one-variable charts, reports their
/// matrices on chart 0 and overlap `(0, 1)`, and searches for an isomorphism
/// with entries of degree at most `cap` in the chart coordinate and its
/// inverted polynomials.
pub fn prop28_report(ctx: &PullbackContext, r: usize, cap: u32, seed: u64) -> Result<Prop28Report> {
    let f = ctx.map();
    let curve = |rings: &[Ring]| rings.iter().all(|c| c.nvars() == 1);
    if !curve(f.source().charts()) || !curve(f.target().charts()) {
        return Err(Error::Invalid("the comparison of F^r and E^r needs one-variable charts".into()));
    }
    if f.target().pairs().is_empty() {
        return Err(Error::Invalid("the comparison of F^r and E^r needs an overlap".into()));
    }
    let line = LineModuleF::new(ctx, r)?;
    let sym = SymPower::new(ctx, r)?;
    let y = f.target();

    let d_pair = sym.divided_basis(&y.pairs()[0].ring)?;
    let d_pair_inv = d_pair.try_inverse().expect("diagonal of units");
    let d0 = sym.divided_basis(y.chart(0))?;
    let d0_inv = d0.try_inverse().expect("diagonal of units");

    let gluing_f = line.bundle().transitions()[0].transpose();
    let gluing_e = d_pair_inv.mul(&sym.bundle().transitions()[0]).mul(&d_pair).transpose();
    let higgs_f = line.bundle().actions(0)[0].transpose();
    let higgs_e = d0_inv.mul(&sym.bundle().actions(0)[0]).mul(&d0).transpose();

    let explicit_witness = y.charts().iter().map(|c| sym.divided_basis(c)).collect::<Result<Vec<_>>>()?;
    let explicit = relative_iso_check(line.bundle(), sym.bundle(), &explicit_witness);
    let search = search_isomorphism(line.bundle(), sym.bundle(), cap, seed);
    Ok(Prop28Report { r, gluing_f, gluing_e, higgs_f, higgs_e, explicit_witness, explicit, search })
}

struct Unknown {
    chart: usize,
    row: usize,
    col: usize,
    elem: RingElem,
}

/// `x^d / s^level` for `d <= 2 level`, where `s` is the product of the
/// inverted polynomials of the chart.
fn level_elements(ring: &Ring, level: u32) -> Vec<RingElem> {
    let ninv = ring.inverted().len();
    let top = if ninv == 0 { level } else { 2 * level };
    (0..=top)
        .map(|d| RingElem::from_parts(ring, Poly::monomial(vec![d], 1, ring.m()), vec![level; ninv]))
        .collect()
}

/// Searches level by level for chartwise maps `a -> b` that intertwine the
/// actions and transitions and are invertible.
pub fn search_isomorphism(a: &RelativeHiggsBundle, b: &RelativeHiggsBundle, cap: u32, seed: u64) -> IsoSearch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = IsoSearch { cap, found_at: None, witness: None, nullities: Vec::new(), candidates_tested: 0 };
    for level in 0..=cap {
        let unknowns = level_unknowns(a, level);
        let basis = module_maps(a, b, &unknowns);
        out.nullities.push(basis.len());
        if basis.is_empty() {
            continue;
        }
        let p = a.map().target().p();
        let mut candidates: Vec<Vec<u64>> = basis.clone();
        for _ in 0..RANDOM_TRIALS {
            let mut v = vec![0u64; unknowns.len()];
            for bv in &basis {
                let c = rng.gen_range(0..p);
                for (x, y) in v.iter_mut().zip(bv) {
                    *x = (*x + c * y) % p;
                }
            }
            candidates.push(v);
        }
        for cand in candidates {
            out.candidates_tested += 1;
            let witness = assemble(a, &unknowns, &cand);
            if relative_iso_check(a, b, &witness).ok {
                out.found_at = Some(level);
                out.witness = Some(witness);
                return out;
            }
        }
    }
    out
}

fn level_unknowns(a: &RelativeHiggsBundle, level: u32) -> Vec<Unknown> {
    let y = a.map().target();
    let n = a.rank();
    let mut out = Vec::new();
    for (c, ring) in y.charts().iter().enumerate() {
        let elems = level_elements(ring, level);
        for row in 0..n {
            for col in 0..n {
                for e in &elems {
                    out.push(Unknown { chart: c, row, col, elem: e.clone() });
                }
            }
        }
    }
    out
}

fn assemble(a: &RelativeHiggsBundle, unknowns: &[Unknown], coeffs: &[u64]) -> Vec<Matrix> {
    let y = a.map().target();
    let n = a.rank();
    let mut out: Vec<Matrix> = y.charts().iter().map(|c| Matrix::zero(c, n, n)).collect();
    for (u, &c) in unknowns.iter().zip(coeffs) {
        if c != 0 {
            let m = &mut out[u.chart];
            let e = m.get(u.row, u.col) + &u.elem.scale(c as i64);
            m.set(u.row, u.col, e);
        }
    }
    out
}

/// A basis of the solutions of the linear conditions for a module map,
/// as coefficient vectors over the unknowns.
fn module_maps(a: &RelativeHiggsBundle, b: &RelativeHiggsBundle, unknowns: &[Unknown]) -> Vec<Vec<u64>> {
    let y = a.map().target();
    let n = a.rank();
    let p = y.p();
    let mut constraints: BTreeMap<(usize, usize, usize), Vec<(usize, RingElem)>> = BTreeMap::new();
    let mut record = |key: (usize, usize, usize), k: usize, m: &Matrix| {
        for r in 0..n {
            for c in 0..n {
                let e = m.get(r, c);
                if !e.is_zero() {
                    constraints.entry((key.0, key.1, key.2 * n * n + r * n + c)).or_default().push((k, e.clone()));
                }
            }
        }
    };
    for (k, u) in unknowns.iter().enumerate() {
        let m = Matrix::unit(y.chart(u.chart), n, u.row, u.col).scale(&u.elem);
        for (w, (xa, xb)) in a.actions(u.chart).iter().zip(b.actions(u.chart)).enumerate() {
            record((0, u.chart, w), k, &xb.mul(&m).sub(&m.mul(xa)));
        }
        for (idx, pr) in y.pairs().iter().enumerate() {
            if pr.i == u.chart {
                let mi = m.apply_hom(&pr.restrict_i.hom);
                record((1, idx, 0), k, &b.transitions()[idx].mul(&mi).neg());
            }
            if pr.j == u.chart {
                let mj = m.apply_hom(&pr.restrict_j.hom);
                record((1, idx, 0), k, &mj.mul(&a.transitions()[idx]));
            }
        }
    }
    let mut rows = Vec::new();
    for elems in constraints.values() {
        for eq in coefficient_equations(elems, p) {
            let mut row = vec![0u64; unknowns.len()];
            for (k, c) in eq {
                row[k] = (row[k] + c) % p;
            }
            if row.iter().any(|&x| x != 0) {
                rows.push(row);
            }
        }
    }
    nullspace_mod_p(&rows, unknowns.len(), p)
}
