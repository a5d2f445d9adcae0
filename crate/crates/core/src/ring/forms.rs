use std::fmt;

use super::{Ring, RingElem, RingHom};
use crate::error::Result;

/// A logarithmic one-form `sum_v c_v e_v` where `e_v = dlog x_v` for log
/// variables and `e_v = dx_v` otherwise.
#[derive(Clone, PartialEq, Eq)]
pub struct LogOneForm {
    ring: Ring,
    coeffs: Vec<RingElem>,
}

impl LogOneForm {
    pub fn zero(ring: &Ring) -> Self {
        LogOneForm { ring: ring.clone(), coeffs: vec![ring.zero(); ring.nvars()] }
    }

    /// The basis form `e_v`.
    pub fn basis(ring: &Ring, v: usize) -> Self {
        let mut f = Self::zero(ring);
        f.coeffs[v] = ring.one();
        f
    }

    pub fn from_coeffs(ring: &Ring, coeffs: Vec<RingElem>) -> Self {
        assert_eq!(coeffs.len(), ring.nvars());
        LogOneForm { ring: ring.clone(), coeffs }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    pub fn coeff(&self, v: usize) -> &RingElem {
        &self.coeffs[v]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &LogOneForm) -> LogOneForm {
        LogOneForm {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &LogOneForm) -> LogOneForm {
        LogOneForm {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &RingElem) -> LogOneForm {
        LogOneForm { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn reduce_mod_p(&self) -> LogOneForm {
        LogOneForm {
            ring: self.ring.reduced(),
            coeffs: self.coeffs.iter().map(|c| c.reduce_mod_p()).collect(),
        }
    }

    pub fn lift(&self) -> LogOneForm {
        LogOneForm { ring: self.ring.lifted(), coeffs: self.coeffs.iter().map(|c| c.lift()).collect() }
    }

    /// Coefficientwise division by `p` of a level-2 form.
    pub fn divide_by_p(&self) -> Result<LogOneForm> {
        Ok(LogOneForm {
            ring: self.ring.reduced(),
            coeffs: self.coeffs.iter().map(|c| c.divide_by_p()).collect::<Result<_>>()?,
        })
    }
}

/// `d e` in the log basis; on a log variable `d x = x dlog x`.
pub fn differential(e: &RingElem) -> LogOneForm {
    let ring = e.ring();
    LogOneForm { ring: ring.clone(), coeffs: (0..ring.nvars()).map(|v| e.form_coefficient(v)).collect() }
}

/// `du / u` for `u` a log monomial times a unit; `None` otherwise.
pub(crate) fn dlog(u: &RingElem) -> Option<LogOneForm> {
    let split = u.log_split()?;
    let ring = u.ring();
    let mut form = differential(&split.unit).scale(&split.unit_inv);
    for (v, &k) in split.mono.iter().enumerate() {
        if k > 0 {
            form.coeffs[v] = &form.coeffs[v] + &ring.constant(k as i64);
        }
    }
    Some(form)
}

/// `h^* omega`: `h^*(f e_v) = h(f) h^*(e_v)`.
pub fn pullback_form(h: &RingHom, omega: &LogOneForm) -> LogOneForm {
    assert!(omega.ring.same(h.source()), "form over {} pulled back along hom from {}", omega.ring, h.source());
    let mut out = LogOneForm::zero(h.target());
    for (v, c) in omega.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out = out.add(&h.basis_pullback(v).scale(&h.apply(c)));
    }
    out
}

impl fmt::Display for LogOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let var = &self.ring.vars()[v];
            let basis = if var.log { format!("dlog {}", var.name) } else { format!("d{}", var.name) };
            write!(f, "({c}) {basis}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LogOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Modulus, Var};

    #[test]
    fn differential_examples() {
        let md = Modulus::new(5, 1).unwrap();
        let r = Ring::polynomial(vec![Var::ordinary("x"), Var::ordinary("y")], md).unwrap();
        assert!(differential(&r.constant(3)).is_zero());
        let d = differential(&r.el("x*y"));
        assert_eq!(d.coeffs(), &[r.el("y"), r.el("x")]);
        let rl = Ring::polynomial(vec![Var::log("x")], md).unwrap();
        assert_eq!(differential(&rl.el("x^2")).coeff(0), &rl.el("2*x^2"));
    }

    #[test]
    fn pullback_examples() {
        let md = Modulus::new(5, 1).unwrap();
        let r = Ring::polynomial(vec![Var::ordinary("x")], md).unwrap();
        let id = RingHom::identity(&r);
        let w = LogOneForm::from_coeffs(&r, vec![r.el("x + 2")]);
        assert_eq!(pullback_form(&id, &w), w);
        let sq = RingHom::from_strs(&r, &r, &["x^2"]).unwrap();
        assert_eq!(pullback_form(&sq, &LogOneForm::basis(&r, 0)).coeff(0), &r.el("2*x"));
        let rl = Ring::polynomial(vec![Var::log("x")], md).unwrap();
        let sql = RingHom::from_strs(&rl, &rl, &["x^2"]).unwrap();
        assert_eq!(pullback_form(&sql, &LogOneForm::basis(&rl, 0)).coeff(0), &rl.el("2"));
    }

    #[test]
    fn dlog_of_inverse_coordinate() {
        // y -> 1/x on the overlap k[x, 1/x]: dlog y pulls back to -dlog x.
        let md = Modulus::new(7, 1).unwrap();
        let base = Ring::polynomial(vec![Var::log("x")], md).unwrap();
        let ov = Ring::new(vec![Var::log("x")], vec![base.el("x").num().clone()], md).unwrap();
        let chart = Ring::polynomial(vec![Var::log("y")], md).unwrap();
        let h = RingHom::from_strs(&chart, &ov, &["1/x"]).unwrap();
        assert_eq!(h.basis_pullback(0).coeff(0), &ov.el("-1"));
    }
}
