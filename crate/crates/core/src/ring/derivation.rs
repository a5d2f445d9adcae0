use std::fmt;

use super::{differential, LogOneForm, RingElem, RingHom};
use crate::error::{Error, Result};

/// A derivation `delta: A -> B` twisted along `base: A -> B`, i.e.
/// `delta(uv) = base(u) delta(v) + base(v) delta(u)`, stored by its values on
/// the basis forms of `A` (`dx` or `dlog x`).
#[derive(Clone)]
pub struct TwistedDerivation {
    base: RingHom,
    values: Vec<RingElem>,
}

impl TwistedDerivation {
    pub fn new(base: RingHom, values: Vec<RingElem>) -> Result<Self> {
        if values.len() != base.source().nvars() {
            return Err(Error::ShapeMismatch("derivation needs one value per source variable".into()));
        }
        if values.iter().any(|v| !v.ring().same(base.target())) {
            return Err(Error::ShapeMismatch("derivation values must lie in the target ring".into()));
        }
        Ok(TwistedDerivation { base, values })
    }

    pub fn zero(base: &RingHom) -> Self {
        let values = vec![base.target().zero(); base.source().nvars()];
        TwistedDerivation { base: base.clone(), values }
    }

    pub fn base(&self) -> &RingHom {
        &self.base
    }

    pub fn values(&self) -> &[RingElem] {
        &self.values
    }

    pub fn value(&self, v: usize) -> &RingElem {
        &self.values[v]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// `delta(sum c_v e_v) = sum base(c_v) delta(e_v)`.
    pub fn apply_form(&self, omega: &LogOneForm) -> RingElem {
        let mut acc = self.base.target().zero();
        for (c, val) in omega.coeffs().iter().zip(&self.values) {
            if c.is_zero() || val.is_zero() {
                continue;
            }
            acc = &acc + &(&self.base.apply(c) * val);
        }
        acc
    }

    /// `delta(d e)`.
    pub fn apply(&self, e: &RingElem) -> RingElem {
        self.apply_form(&differential(e))
    }

    fn check_compatible(&self, other: &TwistedDerivation) {
        assert!(self.base.same_as(&other.base), "derivations twisted along different maps");
    }

    pub fn add(&self, other: &TwistedDerivation) -> TwistedDerivation {
        self.check_compatible(other);
        TwistedDerivation {
            base: self.base.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &TwistedDerivation) -> TwistedDerivation {
        self.check_compatible(other);
        TwistedDerivation {
            base: self.base.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> TwistedDerivation {
        TwistedDerivation { base: self.base.clone(), values: self.values.iter().map(|a| -a).collect() }
    }

    /// `h o delta`, twisted along `base then h`.
    pub fn post_compose(&self, h: &RingHom) -> TwistedDerivation {
        TwistedDerivation { base: self.base.then(h), values: self.values.iter().map(|a| h.apply(a)).collect() }
    }

    /// `delta o k^*` on forms, twisted along `k then base`.
    pub fn pre_compose(&self, k: &RingHom) -> TwistedDerivation {
        let values = (0..k.source().nvars()).map(|v| self.apply_form(k.basis_pullback(v))).collect();
        TwistedDerivation { base: k.then(&self.base), values }
    }

    /// Equality of bases and values.
    pub fn same_as(&self, other: &TwistedDerivation) -> bool {
        self.base.same_as(&other.base) && self.values == other.values
    }
}

/// The divided difference `(a - b) / p` of two level-2 homs that agree modulo
/// `p`, as a derivation twisted along their common reduction.
///
/// On a log variable the value on `dlog x` is `(a(x)/b(x) - 1)/p`, which
/// makes `delta(dx) = base(x) delta(dlog x)` agree with `(a(x) - b(x))/p`.
pub fn hom_difference_derivation(a: &RingHom, b: &RingHom) -> Result<TwistedDerivation> {
    assert_eq!(a.source().level(), 2, "lift pair must be level-2 homs");
    if !a.source().same(b.source()) || !a.target().same(b.target()) {
        return Err(Error::ShapeMismatch("lift pair with different source or target".into()));
    }
    let base = a.reduce_mod_p();
    let bred = b.reduce_mod_p();
    let mut values = Vec::with_capacity(a.source().nvars());
    for (v, var) in a.source().vars().iter().enumerate() {
        if base.image(v) != bred.image(v) {
            return Err(Error::NotLiftPair(var.name.clone()));
        }
        let (ax, bx) = (a.image(v), b.image(v));
        let val = if var.log {
            let ratio = ax
                .div_log_shaped(bx)
                .ok_or_else(|| Error::LogViolation { var: var.name.clone(), image: bx.to_string() })?;
            (&ratio - &a.target().one()).divide_by_p()?
        } else {
            (ax - bx).divide_by_p()?
        };
        values.push(val);
    }
    Ok(TwistedDerivation { base, values })
}

impl fmt::Display for TwistedDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (var, val)) in self.base.source().vars().iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let basis = if var.log { format!("dlog {}", var.name) } else { format!("d{}", var.name) };
            write!(f, "{basis} -> {val}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for TwistedDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Modulus, Ring, Var};

    fn line(p: u64, log: bool) -> Ring {
        let v = if log { Var::log("x") } else { Var::ordinary("x") };
        Ring::polynomial(vec![v], Modulus::new(p, 2).unwrap()).unwrap()
    }

    #[test]
    fn equal_homs_give_zero() {
        let r = line(5, false);
        let a = RingHom::from_strs(&r, &r, &["x^5 + 5*x"]).unwrap();
        assert!(hom_difference_derivation(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn divided_difference_values() {
        // (x^5 + 5x - x^5)/5 = x over Z/25.
        let r = line(5, false);
        let a = RingHom::from_strs(&r, &r, &["x^5 + 5*x"]).unwrap();
        let b = RingHom::from_strs(&r, &r, &["x^5"]).unwrap();
        let d = hom_difference_derivation(&a, &b).unwrap();
        assert_eq!(d.value(0), &r.reduced().el("x"));
        // (x^3 + 3x^2 - x^3)/3 = x^2 over Z/9.
        let r3 = line(3, false);
        let a = RingHom::from_strs(&r3, &r3, &["x^3 + 3*x^2"]).unwrap();
        let b = RingHom::from_strs(&r3, &r3, &["x^3"]).unwrap();
        assert_eq!(hom_difference_derivation(&a, &b).unwrap().value(0), &r3.reduced().el("x^2"));
    }

    #[test]
    fn not_a_lift_pair() {
        let r = line(5, false);
        let a = RingHom::from_strs(&r, &r, &["x^5"]).unwrap();
        let b = RingHom::from_strs(&r, &r, &["x^5 + x"]).unwrap();
        assert!(matches!(hom_difference_derivation(&a, &b), Err(Error::NotLiftPair(_))));
    }

    #[test]
    fn log_variable_value() {
        // a(x) = x^5 (1 + 5x), b(x) = x^5: delta(dlog x) = x and delta(dx) = x^5 * x.
        let r = line(5, true);
        let a = RingHom::from_strs(&r, &r, &["x^5*(1 + 5*x)"]).unwrap();
        let b = RingHom::from_strs(&r, &r, &["x^5"]).unwrap();
        let d = hom_difference_derivation(&a, &b).unwrap();
        let r1 = r.reduced();
        assert_eq!(d.value(0), &r1.el("x"));
        assert_eq!(d.apply(&r1.el("x")), r1.el("x^6"));
    }
}
