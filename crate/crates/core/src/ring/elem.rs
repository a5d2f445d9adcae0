use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::{mod_inverse, reduce_signed, Poly};
use super::{Ring, Var};
use crate::error::{Error, Result};

/// An element `num / prod(g_k^den_k)` of a localized polynomial ring.
///
/// Kept in canonical form: `num` has no zero coefficients and no inverted
/// element with positive exponent in `den` divides `num`. Equality is decided
/// by cross-multiplication, so it is correct even when the inverted list has
/// common factors.
#[derive(Clone)]
pub struct RingElem {
    ring: Ring,
    num: Poly,
    den: Vec<u32>,
}

/// Decomposition `e = x^mono * unit` with `mono` over the log variables.
#[derive(Clone, Debug)]
pub struct LogSplit {
    pub mono: Vec<u32>,
    pub unit: RingElem,
    pub unit_inv: RingElem,
}

impl RingElem {
    pub fn zero(ring: &Ring) -> Self {
        RingElem { ring: ring.clone(), num: Poly::zero(ring.nvars()), den: vec![0; ring.inverted().len()] }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, 1)
    }

    pub fn constant(ring: &Ring, c: i64) -> Self {
        let m = ring.m();
        RingElem {
            ring: ring.clone(),
            num: Poly::constant(ring.nvars(), reduce_signed(c, m), m),
            den: vec![0; ring.inverted().len()],
        }
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        RingElem {
            ring: ring.clone(),
            num: Poly::var(ring.nvars(), i, ring.m()),
            den: vec![0; ring.inverted().len()],
        }
    }

    pub fn from_poly(ring: &Ring, num: Poly) -> Self {
        assert_eq!(num.nvars(), ring.nvars());
        RingElem { num: num.reduce(ring.m()), den: vec![0; ring.inverted().len()], ring: ring.clone() }
    }

    /// Builds `num / prod(g_k^den_k)` and normalizes.
    pub fn from_parts(ring: &Ring, num: Poly, den: Vec<u32>) -> Self {
        assert_eq!(den.len(), ring.inverted().len(), "denominator arity");
        RingElem { num: num.reduce(ring.m()), den, ring: ring.clone() }.normalize()
    }

    /// `1 / g_k` for the k-th inverted element.
    pub fn inverted_generator(ring: &Ring, k: usize) -> Self {
        let mut den = vec![0; ring.inverted().len()];
        den[k] = 1;
        RingElem { ring: ring.clone(), num: Poly::one(ring.nvars(), ring.m()), den }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &[u32] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.iter().all(|&d| d == 0) && self.num.as_constant() == Some(1)
    }

    /// Constant value if this element is a constant.
    pub fn as_constant(&self) -> Option<u64> {
        if self.den.iter().all(|&d| d == 0) {
            self.num.as_constant()
        } else {
            None
        }
    }

    fn check_ring(&self, other: &RingElem) {
        assert!(
            self.ring.same(&other.ring),
            "ring mismatch: {} vs {}",
            self.ring,
            other.ring
        );
    }

    pub(crate) fn den_poly(ring: &Ring, den: &[u32]) -> Poly {
        let m = ring.m();
        let mut acc = Poly::one(ring.nvars(), m);
        for (g, &e) in ring.inverted().iter().zip(den) {
            if e > 0 {
                acc = acc.mul(&g.pow(e, m), m);
            }
        }
        acc
    }

    /// Numerator after rewriting over the denominator `den`, which must
    /// dominate this element's denominator componentwise.
    pub fn numerator_over(&self, den: &[u32]) -> Option<Poly> {
        let mut extra = Vec::with_capacity(den.len());
        for (&d, &s) in den.iter().zip(&self.den) {
            if d < s {
                return None;
            }
            extra.push(d - s);
        }
        Some(self.num.mul(&Self::den_poly(&self.ring, &extra), self.ring.m()))
    }

    fn max_den(a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
    }

    pub(crate) fn add_raw(&self, other: &RingElem) -> RingElem {
        self.check_ring(other);
        let m = self.ring.m();
        if self.den == other.den {
            return RingElem { ring: self.ring.clone(), num: self.num.add(&other.num, m), den: self.den.clone() };
        }
        let d = Self::max_den(&self.den, &other.den);
        let a = self.numerator_over(&d).unwrap();
        let b = other.numerator_over(&d).unwrap();
        RingElem { ring: self.ring.clone(), num: a.add(&b, m), den: d }
    }

    pub(crate) fn mul_raw(&self, other: &RingElem) -> RingElem {
        self.check_ring(other);
        let m = self.ring.m();
        RingElem {
            ring: self.ring.clone(),
            num: self.num.mul(&other.num, m),
            den: self.den.iter().zip(&other.den).map(|(a, b)| a + b).collect(),
        }
    }

    /// Cancels inverted factors that divide the numerator.
    pub fn normalize(mut self) -> RingElem {
        let m = self.ring.m();
        if self.num.is_zero() {
            self.den.iter_mut().for_each(|d| *d = 0);
            return self;
        }
        for k in 0..self.den.len() {
            while self.den[k] > 0 {
                match self.num.div_exact(&self.ring.inverted()[k], m) {
                    Some(q) => {
                        self.num = q;
                        self.den[k] -= 1;
                    }
                    None => break,
                }
            }
        }
        self
    }

    pub fn scale(&self, c: i64) -> RingElem {
        let m = self.ring.m();
        RingElem { ring: self.ring.clone(), num: self.num.scale(reduce_signed(c, m), m), den: self.den.clone() }
            .normalize()
    }

    pub fn pow(&self, n: u32) -> RingElem {
        let mut acc = RingElem::one(&self.ring);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_raw(&base).normalize();
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_raw(&base).normalize();
            }
        }
        acc
    }

    /// Integer power; negative exponents require a unit.
    pub fn pow_i(&self, n: i64) -> Result<RingElem> {
        if n >= 0 {
            Ok(self.pow(n as u32))
        } else {
            Ok(self.try_inverse().ok_or_else(|| Error::NotUnit(self.to_string()))?.pow((-n) as u32))
        }
    }

    /// Level-2 element reduced coefficientwise modulo `p`.
    pub fn reduce_mod_p(&self) -> RingElem {
        let r = self.ring.reduced();
        RingElem { num: self.num.reduce(r.m()), den: self.den.clone(), ring: r }.normalize()
    }

    /// Lift to level 2 by coefficient residues.
    pub fn lift(&self) -> RingElem {
        let r = self.ring.lifted();
        RingElem { num: self.num.clone(), den: self.den.clone(), ring: r }
    }

    /// `e / p` for a level-2 element all of whose numerator coefficients are
    /// multiples of `p`. The result lives at level 1.
    pub fn divide_by_p(&self) -> Result<RingElem> {
        assert_eq!(self.ring.level(), 2, "divide_by_p needs a level-2 element");
        let p = self.ring.p();
        let num = self.num.divide_exact_scalar(p).ok_or_else(|| Error::NotDivisible(self.to_string()))?;
        let r = self.ring.reduced();
        Ok(RingElem { num: num.reduce(r.m()), den: self.den.clone(), ring: r }.normalize())
    }

    /// Multiplicative inverse when this element is a unit.
    pub fn try_inverse(&self) -> Option<RingElem> {
        if self.ring.level() == 2 {
            let v = self.reduce_mod_p().try_inverse()?.lift();
            // Newton step: e v = 1 + p w  =>  v (2 - e v) = v (1 - p w) = e^-1.
            let ev = self.mul_raw(&v).normalize();
            let two = RingElem::constant(&self.ring, 2);
            let inv = v.mul_raw(&(&two - &ev)).normalize();
            debug_assert!((&inv * self).is_one_eq());
            return Some(inv);
        }
        if self.num.is_zero() {
            return None;
        }
        let m = self.ring.m();
        let mut n = self.num.clone();
        let mut exps = vec![0u32; self.den.len()];
        for (k, g) in self.ring.inverted().iter().enumerate() {
            while let Some(q) = n.div_exact(g, m) {
                n = q;
                exps[k] += 1;
            }
        }
        let c = n.as_constant()?;
        let cinv = mod_inverse(c, m)?;
        let num = Self::den_poly(&self.ring, &self.den).scale(cinv, m);
        Some(RingElem { ring: self.ring.clone(), num, den: exps }.normalize())
    }

    pub fn is_unit(&self) -> bool {
        self.try_inverse().is_some()
    }

    fn is_one_eq(&self) -> bool {
        *self == RingElem::one(&self.ring)
    }

    /// Writes `e = (monomial in log variables) * unit`, or `None` if impossible.
    pub fn log_split(&self) -> Option<LogSplit> {
        let n = self.ring.nvars();
        let mut mono = vec![0u32; n];
        for (i, v) in self.ring.vars().iter().enumerate() {
            if v.log {
                mono[i] = self.num.min_exponent(i);
            }
        }
        let num = self.num.div_monomial(&mono)?;
        let unit = RingElem { ring: self.ring.clone(), num, den: self.den.clone() }.normalize();
        let unit_inv = unit.try_inverse()?;
        Some(LogSplit { mono, unit, unit_inv })
    }

    /// Quotient `self / other` when `other` is a log monomial times a unit and
    /// the monomial divides `self`.
    pub fn div_log_shaped(&self, other: &RingElem) -> Option<RingElem> {
        let split = other.log_split()?;
        let num = self.num.div_monomial(&split.mono)?;
        let q = RingElem { ring: self.ring.clone(), num, den: self.den.clone() }.normalize();
        Some(&q * &split.unit_inv)
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> RingElem {
        let m = self.ring.m();
        let active: Vec<usize> = (0..self.den.len()).filter(|&k| self.den[k] > 0).collect();
        if active.is_empty() {
            return RingElem { ring: self.ring.clone(), num: self.num.derivative(i, m), den: self.den.clone() }
                .normalize();
        }
        // d(n/s) = (dn * G - n * sum_k s_k dg_k G/g_k) / (s G),  G = prod over active g_k.
        let inv = self.ring.inverted();
        let big_g = active.iter().fold(Poly::one(self.ring.nvars(), m), |acc, &k| acc.mul(&inv[k], m));
        let mut num = self.num.derivative(i, m).mul(&big_g, m);
        for &k in &active {
            let others = active
                .iter()
                .filter(|&&l| l != k)
                .fold(Poly::one(self.ring.nvars(), m), |acc, &l| acc.mul(&inv[l], m));
            let term = self.num.mul(&inv[k].derivative(i, m), m).mul(&others, m).scale(self.den[k] as u64, m);
            num = num.sub(&term, m);
        }
        let mut den = self.den.clone();
        for &k in &active {
            den[k] += 1;
        }
        RingElem { ring: self.ring.clone(), num, den }.normalize()
    }

    /// Coefficient of the basis form of variable `i` in `d(self)`:
    /// `de/dx_i` for ordinary variables, `x_i de/dx_i` for log variables.
    pub fn form_coefficient(&self, i: usize) -> RingElem {
        let d = self.partial(i);
        if self.ring.vars()[i].log {
            &d * &RingElem::var(&self.ring, i)
        } else {
            d
        }
    }
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        if !self.ring.same(&other.ring) {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        let d = Self::max_den(&self.den, &other.den);
        self.numerator_over(&d) == other.numerator_over(&d)
    }
}

impl Eq for RingElem {}

impl<'a> Add<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        self.add_raw(rhs).normalize()
    }
}

impl<'a> Sub<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        self.add_raw(&-rhs).normalize()
    }
}

impl<'a> Mul<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        self.mul_raw(rhs).normalize()
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem { ring: self.ring.clone(), num: self.num.neg(self.ring.m()), den: self.den.clone() }
    }
}

impl Add for RingElem {
    type Output = RingElem;
    fn add(self, rhs: RingElem) -> RingElem {
        &self + &rhs
    }
}

impl Sub for RingElem {
    type Output = RingElem;
    fn sub(self, rhs: RingElem) -> RingElem {
        &self - &rhs
    }
}

impl Mul for RingElem {
    type Output = RingElem;
    fn mul(self, rhs: RingElem) -> RingElem {
        &self * &rhs
    }
}

fn signed(c: u64, m: u64) -> i64 {
    if c > m / 2 {
        c as i64 - m as i64
    } else {
        c as i64
    }
}

pub(crate) fn format_poly(p: &Poly, vars: &[Var], m: u64) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (idx, (e, c)) in p.terms().rev().enumerate() {
        let c = signed(c, m);
        let is_const = e.iter().all(|&x| x == 0);
        let mag = c.unsigned_abs();
        if idx == 0 {
            if c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0 { " - " } else { " + " });
        }
        let mut factors = Vec::new();
        if mag != 1 || is_const {
            factors.push(mag.to_string());
        }
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => factors.push(vars[i].name.clone()),
                _ => factors.push(format!("{}^{}", vars[i].name, k)),
            }
        }
        s.push_str(&factors.join("*"));
    }
    s
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.ring.vars();
        let m = self.ring.m();
        let num = format_poly(&self.num, vars, m);
        let dens: Vec<String> = self
            .den
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(k, &d)| {
                let g = format_poly(&self.ring.inverted()[k], vars, m);
                let g = if self.ring.inverted()[k].num_terms() > 1 { format!("({g})") } else { g };
                if d == 1 {
                    g
                } else {
                    format!("{g}^{d}")
                }
            })
            .collect();
        if dens.is_empty() {
            write!(f, "{num}")
        } else {
            let num = if self.num.num_terms() > 1 { format!("({num})") } else { num };
            write!(f, "{num}/{}", dens.join("*"))
        }
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use crate::ring::{Modulus, Ring, Var};

    fn ring(p: u64, level: u8, vars: &[(&str, bool)], inv: &[&str]) -> Ring {
        let md = Modulus::new(p, level).unwrap();
        let vs: Vec<Var> = vars.iter().map(|(n, l)| Var { name: n.to_string(), log: *l }).collect();
        let base = Ring::polynomial(vs.clone(), md).unwrap();
        let inv = inv.iter().map(|s| base.el(s).num().clone()).collect();
        Ring::new(vs, inv, md).unwrap()
    }

    #[test]
    fn reduce_mod_p_examples() {
        let r = ring(5, 2, &[("x", false)], &[]);
        assert!(r.zero().reduce_mod_p().is_zero());
        assert_eq!(r.el("7*x").reduce_mod_p(), r.reduced().el("2*x"));
        let r3 = ring(3, 2, &[("x", false)], &[]);
        assert_eq!(r3.el("x^3 + 3*x").reduce_mod_p(), r3.reduced().el("x^3"));
    }

    #[test]
    fn divide_by_p_examples() {
        let r = ring(5, 2, &[("x", false)], &[]);
        assert!(r.zero().divide_by_p().unwrap().is_zero());
        assert_eq!(r.el("5*x^2").divide_by_p().unwrap(), r.reduced().el("x^2"));
        assert!(r.el("x + 5").divide_by_p().is_err());
        // (x+1)^3 - (x^3+1) over Z/9, expanded by the binomial theorem: 3x^2 + 3x.
        let r3 = ring(3, 2, &[("x", false)], &[]);
        let e = &r3.el("(x+1)^3") - &r3.el("x^3 + 1");
        assert_eq!(e, r3.el("3*x^2 + 3*x"));
        assert_eq!(e.divide_by_p().unwrap(), r3.reduced().el("x^2 + x"));
    }

    #[test]
    fn fractions_cancel_and_compare() {
        let r = ring(5, 1, &[("x", false)], &["x", "x - 1"]);
        let a = r.el("(x^2 - x)/x");
        assert_eq!(a, r.el("x - 1"));
        assert!(a.den().iter().all(|&d| d == 0));
        let b = &r.el("1/x") + &r.el("1/(x-1)");
        assert_eq!(b, r.el("(2*x - 1)/(x*(x-1))"));
    }

    #[test]
    fn inverses_at_both_levels() {
        let r2 = ring(5, 2, &[("x", false)], &["x"]);
        let u = r2.el("x^3 * (1 + 5*x)");
        let ui = u.try_inverse().unwrap();
        assert!((&u * &ui).is_one());
        assert!(r2.el("x + 1").try_inverse().is_none());
        let r1 = r2.reduced();
        assert_eq!(r1.el("3*x^2").try_inverse().unwrap(), r1.el("2/x^2"));
    }

    #[test]
    fn log_split_shapes() {
        let r = ring(5, 2, &[("x", true)], &[]);
        let s = r.el("x^5 + 5*x^6").log_split().unwrap();
        assert_eq!(s.mono, vec![5]);
        assert_eq!(s.unit, r.el("1 + 5*x"));
        assert!(r.el("x^5 + 5").log_split().is_none());
        assert!(r.el("x^5 + 5*x").log_split().is_none());
    }

    #[test]
    fn partial_quotient_rule() {
        let r = ring(7, 1, &[("x", false)], &["x - 1"]);
        let e = r.el("x^2/(x-1)");
        // (2x(x-1) - x^2)/(x-1)^2 = (x^2 - 2x)/(x-1)^2
        assert_eq!(e.partial(0), r.el("(x^2 - 2*x)/(x-1)^2"));
    }
}
