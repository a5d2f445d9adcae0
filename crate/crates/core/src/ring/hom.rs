use std::fmt;

use super::forms::{dlog, differential, LogOneForm};
use super::{Poly, Ring, RingElem};
use crate::error::{Error, Result};

/// A ring homomorphism given by the images of the source variables.
///
/// Construction checks that every inverted element of the source maps to a
/// unit and that every log variable maps to a log monomial times a unit. The
/// pullbacks of the basis forms are computed once at construction.
#[derive(Clone)]
pub struct RingHom {
    source: Ring,
    target: Ring,
    images: Vec<RingElem>,
    inv_images: Vec<RingElem>,
    basis_pullbacks: Vec<LogOneForm>,
}

impl RingHom {
    pub fn new(source: &Ring, target: &Ring, images: Vec<RingElem>) -> Result<RingHom> {
        if images.len() != source.nvars() {
            return Err(Error::ShapeMismatch(format!(
                "{} images for {} variables of {source}",
                images.len(),
                source.nvars()
            )));
        }
        if source.modulus() != target.modulus() {
            return Err(Error::ShapeMismatch(format!("hom between different levels: {source} -> {target}")));
        }
        for im in &images {
            if !im.ring().same(target) {
                return Err(Error::ShapeMismatch(format!("image {im} not in {target}")));
            }
        }
        let mut hom = RingHom {
            source: source.clone(),
            target: target.clone(),
            images,
            inv_images: Vec::new(),
            basis_pullbacks: Vec::new(),
        };
        for g in source.inverted() {
            let img = hom.eval_poly(g);
            let inv = img.try_inverse().ok_or_else(|| Error::NotUnit(format!("image {img} of an inverted element")))?;
            hom.inv_images.push(inv);
        }
        for (v, var) in source.vars().iter().enumerate() {
            let img = &hom.images[v];
            let form = if var.log {
                dlog(img).ok_or_else(|| Error::LogViolation { var: var.name.clone(), image: img.to_string() })?
            } else {
                differential(img)
            };
            hom.basis_pullbacks.push(form);
        }
        Ok(hom)
    }

    /// Builds a hom from images written in the expression syntax.
    pub fn from_strs(source: &Ring, target: &Ring, images: &[&str]) -> Result<RingHom> {
        let imgs = images.iter().map(|s| target.parse(s)).collect::<Result<Vec<_>>>()?;
        RingHom::new(source, target, imgs)
    }

    pub fn identity(ring: &Ring) -> RingHom {
        let imgs = (0..ring.nvars()).map(|i| ring.var(i)).collect();
        RingHom::new(ring, ring, imgs).expect("identity is a valid hom")
    }

    /// The absolute Frobenius `x -> x^p` of a level-1 ring.
    pub fn frobenius(ring: &Ring) -> RingHom {
        assert_eq!(ring.level(), 1, "the p-power map is a ring map only at level 1");
        let imgs = (0..ring.nvars()).map(|i| ring.var(i).pow(ring.p() as u32)).collect();
        RingHom::new(ring, ring, imgs).expect("Frobenius is a valid hom")
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn images(&self) -> &[RingElem] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &RingElem {
        &self.images[i]
    }

    /// `h*(e_v)` for the basis form `e_v` (`dx_v` or `dlog x_v`) of the source.
    pub fn basis_pullback(&self, v: usize) -> &LogOneForm {
        &self.basis_pullbacks[v]
    }

    fn eval_poly(&self, p: &Poly) -> RingElem {
        let n = self.source.nvars();
        let mut powers: Vec<Vec<RingElem>> = (0..n).map(|_| vec![RingElem::one(&self.target)]).collect();
        let mut acc = RingElem::zero(&self.target);
        for (e, c) in p.terms() {
            let mut term = RingElem::constant(&self.target, c as i64);
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[v].len() <= k as usize {
                    let next = &powers[v][powers[v].len() - 1] * &self.images[v];
                    powers[v].push(next);
                }
                term = term.mul_raw(&powers[v][k as usize]);
            }
            acc = acc.add_raw(&term);
        }
        acc.normalize()
    }

    pub fn apply(&self, e: &RingElem) -> RingElem {
        assert!(e.ring().same(&self.source), "element of {} given to hom from {}", e.ring(), self.source);
        let mut out = self.eval_poly(e.num());
        for (k, &d) in e.den().iter().enumerate() {
            if d > 0 {
                out = out.mul_raw(&self.inv_images[k].pow(d));
            }
        }
        out.normalize()
    }

    /// `self` followed by `next`: `x -> next(self(x))`.
    pub fn then(&self, next: &RingHom) -> RingHom {
        assert!(self.target.same(&next.source), "composition mismatch: {} vs {}", self.target, next.source);
        let imgs = self.images.iter().map(|e| next.apply(e)).collect();
        RingHom::new(&self.source, &next.target, imgs).expect("composite of valid homs is valid")
    }

    /// Coefficientwise reduction of a level-2 hom.
    pub fn reduce_mod_p(&self) -> RingHom {
        let imgs = self.images.iter().map(|e| e.reduce_mod_p()).collect();
        RingHom::new(&self.source.reduced(), &self.target.reduced(), imgs).expect("reduction of a valid hom is valid")
    }

    /// Level-2 hom with coefficient-residue lifts of the images.
    pub fn lift(&self) -> Result<RingHom> {
        let imgs = self.images.iter().map(|e| e.lift()).collect();
        RingHom::new(&self.source.lifted(), &self.target.lifted(), imgs)
    }

    pub fn same_as(&self, other: &RingHom) -> bool {
        self.source.same(&other.source) && self.target.same(&other.target) && self.images == other.images
    }
}

impl fmt::Display for RingHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, img)) in self.source.vars().iter().zip(&self.images).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {}", v.name, img)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for RingHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Modulus, Var};

    #[test]
    fn unit_invariant_checked() {
        let md = Modulus::new(5, 1).unwrap();
        let a = Ring::polynomial(vec![Var::ordinary("x")], md).unwrap();
        let x = a.var(0).num().clone();
        let ax = Ring::new(vec![Var::ordinary("x")], vec![x.clone()], md).unwrap();
        // x -> x + 1 does not send the inverted x to a unit of k[x, 1/x].
        assert!(matches!(RingHom::from_strs(&ax, &ax, &["x + 1"]), Err(Error::NotUnit(_))));
        assert!(RingHom::from_strs(&ax, &ax, &["x^2"]).is_ok());
        assert!(RingHom::from_strs(&a, &ax, &["1/x"]).is_ok());
    }

    #[test]
    fn log_shape_checked() {
        let md = Modulus::new(5, 2).unwrap();
        let a = Ring::polynomial(vec![Var::log("x")], md).unwrap();
        assert!(RingHom::from_strs(&a, &a, &["x^5*(1 + 5*x)"]).is_ok());
        assert!(matches!(RingHom::from_strs(&a, &a, &["x^5 + 5"]), Err(Error::LogViolation { .. })));
    }

    #[test]
    fn apply_on_fractions_and_compose() {
        let md = Modulus::new(7, 1).unwrap();
        let xs = vec![Var::ordinary("x")];
        let base = Ring::polynomial(xs.clone(), md).unwrap();
        let r = Ring::new(xs, vec![base.el("x").num().clone()], md).unwrap();
        let h = RingHom::from_strs(&r, &r, &["x^2"]).unwrap();
        assert_eq!(h.apply(&r.el("(x + 1)/x")), r.el("(x^2 + 1)/x^2"));
        let hh = h.then(&h);
        assert_eq!(hh.image(0), &r.el("x^4"));
        let frob = RingHom::frobenius(&r);
        assert_eq!(frob.apply(&r.el("1/x + 2")), r.el("1/x^7 + 2"));
    }
}
