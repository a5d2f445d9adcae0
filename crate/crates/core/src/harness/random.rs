//! Seeded generators for randomized suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartier::LiftData;
use crate::cech::{CoverMap, FrobeniusLifts, MorphismLifts};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::ring::{Ring, RingElem, RingHom, TwistedDerivation};

/// A generator determined by the seed, a label and the prime.
pub fn rng_for(seed: u64, label: &str, p: u64) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes().chain(p.to_le_bytes()).chain(seed.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn exponent_vectors(nvars: usize, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=max_deg - used).map(move |k| {
                    let mut next = e.clone();
                    next.push(k);
                    next
                })
            })
            .collect();
    }
    out
}

/// A polynomial in the variables of `ring` of total degree at most `max_deg`.
pub fn random_poly(ring: &Ring, rng: &mut impl Rng, max_deg: u32) -> RingElem {
    let p = ring.p();
    let mut acc = ring.zero();
    for exps in exponent_vectors(ring.nvars(), max_deg) {
        let c = rng.gen_range(0..p) as i64;
        if c == 0 {
            continue;
        }
        let mono = exps.iter().enumerate().fold(ring.one(), |m, (v, &k)| &m * &ring.var(v).pow(k));
        acc = &acc + &mono.scale(c);
    }
    acc
}

/// Block-diagonal, strictly upper triangular, with blocks of size at most
/// `p` so that the `p`-th power vanishes.
pub fn random_nilpotent(ring: &Ring, n: usize, rng: &mut impl Rng) -> Matrix {
    let p = ring.p() as usize;
    let mut m = Matrix::zero(ring, n, n);
    let mut start = 0;
    while start < n {
        let size = rng.gen_range(1..=(n - start).min(p));
        for i in start..start + size {
            for j in i + 1..start + size {
                m.set(i, j, random_poly(ring, rng, 1));
            }
        }
        start += size;
    }
    m
}

/// `c_1 N + c_2 N^2 + ...`, a random element of the non-unital algebra
/// generated by `n`. Such elements commute with each other.
pub fn random_in_algebra(n: &Matrix, rng: &mut impl Rng, terms: u32) -> Matrix {
    let p = n.ring().p();
    let mut acc = Matrix::zero(n.ring(), n.rows(), n.cols());
    let mut power = n.clone();
    for _ in 0..terms {
        acc = acc.add(&power.scale_int(rng.gen_range(0..p) as i64));
        power = power.mul(n);
    }
    acc
}

/// Replaces `x -> a` by `x -> a + p g` on ordinary variables and by
/// `x -> a (1 + p g)` on log variables.
pub fn perturb_hom(h: &RingHom, rng: &mut impl Rng) -> Result<RingHom> {
    let target = h.target();
    let p = target.p() as i64;
    let images = h
        .images()
        .iter()
        .zip(h.source().vars())
        .map(|(img, var)| {
            let g = random_poly(target, rng, 2).scale(p);
            if var.log {
                img * &(&target.one() + &g)
            } else {
                img + &g
            }
        })
        .collect();
    RingHom::new(h.source(), target, images)
}

/// Independently re-chosen local lifts of Frobenius on both sides and of `f`.
pub fn perturb_lifts(lifts: &LiftData, rng: &mut impl Rng) -> Result<LiftData> {
    let fx = lifts.fx.lifts().iter().map(|h| perturb_hom(h, rng)).collect::<Result<Vec<_>>>()?;
    let fy = lifts.fy.lifts().iter().map(|h| perturb_hom(h, rng)).collect::<Result<Vec<_>>>()?;
    let f = lifts.f.lifts().iter().map(|h| perturb_hom(h, rng)).collect::<Result<Vec<_>>>()?;
    LiftData::new(
        FrobeniusLifts::new(lifts.fx.covering().clone(), fx)?,
        FrobeniusLifts::new(lifts.fy.covering().clone(), fy)?,
        MorphismLifts::new(lifts.map().clone(), f)?,
    )
}

/// Random chartwise twisted derivations along `f`.
pub fn random_sections(f: &CoverMap, rng: &mut impl Rng) -> Result<Vec<TwistedDerivation>> {
    f.charts()
        .iter()
        .map(|h| {
            let values = (0..h.source().nvars()).map(|_| random_poly(h.target(), rng, 2)).collect();
            TwistedDerivation::new(h.clone(), values)
        })
        .collect()
}
