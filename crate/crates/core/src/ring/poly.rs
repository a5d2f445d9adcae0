//! Sparse multivariate polynomials with coefficients in `Z/m`.
//!
//! Polynomials do not carry their modulus; every arithmetic call takes it
//! explicitly. [`crate::ring::RingElem`] is the modulus-aware wrapper.

use std::collections::BTreeMap;

/// Exponent vector indexed by declared variable order.
pub type Monomial = Vec<u32>;

/// Lexicographic order on exponent vectors (first variable most significant)
/// is exactly the `Ord` of `Vec<u32>`, so a `BTreeMap` keeps terms sorted and
/// the leading term is the last entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, u64>,
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i64, (a % m) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i64) as u64)
}

pub(crate) fn reduce_signed(c: i64, m: u64) -> u64 {
    c.rem_euclid(m as i64) as u64
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: u64, m: u64) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c, m);
        p
    }

    pub fn one(nvars: usize, m: u64) -> Self {
        Poly::constant(nvars, 1, m)
    }

    pub fn var(nvars: usize, i: usize, m: u64) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, 1, m)
    }

    pub fn monomial(exps: Monomial, c: u64, m: u64) -> Self {
        let mut p = Poly::zero(exps.len());
        p.add_term(exps, c, m);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<u64> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then_some(*c)
            }
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, u64)> {
        self.terms.iter().next_back().map(|(e, c)| (e, *c))
    }

    pub fn coeff(&self, e: &[u32]) -> u64 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Monomial, c: u64, m: u64) {
        debug_assert_eq!(e.len(), self.nvars);
        let c = c % m;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = (*o.get() + c) % m;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly, m: u64) -> Poly {
        let mut out = self.clone();
        for (e, c) in other.terms.iter() {
            out.add_term(e.clone(), *c, m);
        }
        out
    }

    pub fn neg(&self, m: u64) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), (m - c) % m)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly, m: u64) -> Poly {
        let mut out = self.clone();
        for (e, c) in other.terms.iter() {
            out.add_term(e.clone(), m - c, m);
        }
        out
    }

    pub fn scale(&self, c: u64, m: u64) -> Poly {
        let c = c % m;
        let mut out = Poly::zero(self.nvars);
        if c == 0 {
            return out;
        }
        for (e, a) in self.terms.iter() {
            out.add_term(e.clone(), a * c, m);
        }
        out
    }

    pub fn mul(&self, other: &Poly, m: u64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in self.terms.iter() {
            for (e2, c2) in other.terms.iter() {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2, m);
            }
        }
        out
    }

    pub fn mul_monomial(&self, mono: &[u32]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(mono).map(|(a, b)| a + b).collect(), *c))
                .collect(),
        }
    }

    pub fn pow(&self, mut n: u32, m: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars, m);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, m);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, m);
            }
        }
        acc
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize, m: u64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in self.terms.iter() {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * (e[i] as u64 % m), m);
        }
        out
    }

    /// `x_i * d/dx_i`, the coefficient of `dlog x_i`.
    pub fn euler_derivative(&self, i: usize, m: u64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in self.terms.iter() {
            out.add_term(e.clone(), c * (e[i] as u64 % m), m);
        }
        out
    }

    pub fn reduce(&self, m: u64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in self.terms.iter() {
            out.add_term(e.clone(), *c, m);
        }
        out
    }

    /// Divides every coefficient by `p`; `None` if some coefficient is not a multiple.
    pub fn divide_exact_scalar(&self, p: u64) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms.iter() {
            if c % p != 0 {
                return None;
            }
            terms.insert(e.clone(), c / p);
        }
        Some(Poly { nvars: self.nvars, terms })
    }

    /// Smallest exponent of variable `i` over all terms (0 for the zero polynomial).
    pub fn min_exponent(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).min().unwrap_or(0)
    }

    pub fn div_monomial(&self, mono: &[u32]) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms.iter() {
            let mut e2 = e.clone();
            for (a, b) in e2.iter_mut().zip(mono) {
                if *a < *b {
                    return None;
                }
                *a -= b;
            }
            terms.insert(e2, *c);
        }
        Some(Poly { nvars: self.nvars, terms })
    }

    /// Multivariate division by `g` under lex order. `g` must have a unit
    /// leading coefficient, so the remainder is zero exactly when `g` divides
    /// `self`.
    pub fn div_rem(&self, g: &Poly, m: u64) -> (Poly, Poly) {
        let (lm, lc) = g.leading().expect("division by zero polynomial");
        let lm = lm.clone();
        let lc_inv = mod_inverse(lc, m).expect("leading coefficient must be a unit");
        let mut q = Poly::zero(self.nvars);
        let mut rem = Poly::zero(self.nvars);
        let mut r = self.clone();
        while let Some((e, c)) = r.terms.iter().next_back().map(|(e, c)| (e.clone(), *c)) {
            if e.iter().zip(&lm).all(|(a, b)| a >= b) {
                let shift: Monomial = e.iter().zip(&lm).map(|(a, b)| a - b).collect();
                let f = c * lc_inv % m;
                q.add_term(shift.clone(), f, m);
                let sub = g.mul_monomial(&shift).scale(f, m);
                r = r.sub(&sub, m);
            } else {
                r.terms.remove(&e);
                rem.add_term(e, c, m);
            }
        }
        (q, rem)
    }

    /// Exact quotient by `g`, or `None` when `g` does not divide.
    pub fn div_exact(&self, g: &Poly, m: u64) -> Option<Poly> {
        if let Some((lm, 1)) = g.leading() {
            if g.num_terms() == 1 {
                return self.div_monomial(lm);
            }
        }
        let (q, r) = self.div_rem(g, m);
        r.is_zero().then_some(q)
    }

    pub fn map_coeffs(&self, m: u64, f: impl Fn(u64) -> u64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in self.terms.iter() {
            out.add_term(e.clone(), f(*c), m);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod() {
        assert_eq!(mod_inverse(2, 7), Some(4));
        assert_eq!(mod_inverse(5, 25), None);
        assert_eq!(mod_inverse(6, 25).map(|x| x * 6 % 25), Some(1));
    }

    #[test]
    fn division_by_monic() {
        let m = 25;
        // (x - 1)(x + 2) = x^2 + x - 2
        let g = Poly::var(1, 0, m).sub(&Poly::one(1, m), m);
        let h = Poly::var(1, 0, m).add(&Poly::constant(1, 2, m), m);
        let prod = g.mul(&h, m);
        assert_eq!(prod.div_exact(&g, m), Some(h.clone()));
        assert_eq!(prod.add(&Poly::one(1, m), m).div_exact(&g, m), None);
    }

    #[test]
    fn division_two_variables() {
        let m = 9;
        let x = Poly::var(2, 0, m);
        let y = Poly::var(2, 1, m);
        let g = x.mul(&y, m).add(&Poly::one(2, m), m);
        let q = x.add(&y.pow(3, m), m);
        assert_eq!(g.mul(&q, m).div_exact(&g, m), Some(q));
    }

    #[test]
    fn scalar_division() {
        let m = 9;
        let p = Poly::var(1, 0, m).scale(3, m).add(&Poly::constant(1, 6, m), m);
        assert_eq!(p.divide_exact_scalar(3), Some(Poly::var(1, 0, m).add(&Poly::constant(1, 2, m), m)));
        assert_eq!(Poly::var(1, 0, m).divide_exact_scalar(3), None);
    }
}
