//! Exact arithmetic in localized polynomial rings over `Z/p` and `Z/p^2`.
//!
//! A [`Ring`] is `(Z/p^level)[x_1..x_n][g_1^-1..g_k^-1]` where each `g_i` has
//! unit leading coefficient in lex order, so it is a nonzerodivisor at both
//! levels. Variables flagged `log` carry forms in the `dlog x` basis.

mod derivation;
mod elem;
mod forms;
mod hom;
pub mod json;
pub mod parse;
mod poly;

use std::fmt;
use std::sync::{Arc, OnceLock};

pub use derivation::{hom_difference_derivation, TwistedDerivation};
pub use elem::{LogSplit, RingElem};
pub use forms::{differential, pullback_form, LogOneForm};
pub use hom::RingHom;
pub use poly::{Monomial, Poly};
pub(crate) use poly::{mod_inverse, reduce_signed};

use crate::error::{Error, Result};

pub const MAX_PRIME: u64 = 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
    level: u8,
}

impl Modulus {
    pub fn new(p: u64, level: u8) -> Result<Self> {
        if !(3..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::Invalid(format!("p = {p} must be an odd prime at most {MAX_PRIME}")));
        }
        if !(1..=2).contains(&level) {
            return Err(Error::Invalid(format!("level {level} must be 1 or 2")));
        }
        Ok(Modulus { p, level })
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn level(self) -> u8 {
        self.level
    }

    /// `p^level`, the coefficient modulus.
    pub fn m(self) -> u64 {
        if self.level == 1 {
            self.p
        } else {
            self.p * self.p
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub log: bool,
}

impl Var {
    pub fn ordinary(name: &str) -> Self {
        Var { name: name.to_string(), log: false }
    }

    pub fn log(name: &str) -> Self {
        Var { name: name.to_string(), log: true }
    }
}

struct RingData {
    vars: Vec<Var>,
    inverted: Vec<Poly>,
    modulus: Modulus,
    reduced: OnceLock<Ring>,
    lifted: OnceLock<Ring>,
}

/// Shared handle to a ring. Cheap to clone; equality is structural.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl Ring {
    /// Builds a ring. `inverted` polynomials are given with coefficients modulo
    /// `p^level` and must have leading coefficient 1.
    pub fn new(vars: Vec<Var>, inverted: Vec<Poly>, modulus: Modulus) -> Result<Ring> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::Invalid(format!("duplicate variable name `{}`", v.name)));
            }
            if v.name.is_empty() || !v.name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::Invalid(format!("bad variable name `{}`", v.name)));
            }
        }
        let m = modulus.m();
        let inverted: Vec<Poly> = inverted.into_iter().map(|g| g.reduce(m)).collect();
        for g in &inverted {
            if g.nvars() != vars.len() {
                return Err(Error::Invalid("inverted element has wrong arity".into()));
            }
            match g.leading() {
                Some((e, 1)) if e.iter().any(|&x| x > 0) => {}
                _ => {
                    return Err(Error::Invalid(
                        "inverted elements must be non-constant with leading coefficient 1".into(),
                    ))
                }
            }
        }
        Ok(Ring(Arc::new(RingData {
            vars,
            inverted,
            modulus,
            reduced: OnceLock::new(),
            lifted: OnceLock::new(),
        })))
    }

    /// Polynomial ring with no inverted elements.
    pub fn polynomial(vars: Vec<Var>, modulus: Modulus) -> Result<Ring> {
        Ring::new(vars, Vec::new(), modulus)
    }

    pub fn vars(&self) -> &[Var] {
        &self.0.vars
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v.name == name)
    }

    pub fn inverted(&self) -> &[Poly] {
        &self.0.inverted
    }

    pub fn modulus(&self) -> Modulus {
        self.0.modulus
    }

    pub fn p(&self) -> u64 {
        self.0.modulus.p
    }

    pub fn level(&self) -> u8 {
        self.0.modulus.level
    }

    pub fn m(&self) -> u64 {
        self.0.modulus.m()
    }

    pub fn same(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.modulus == other.0.modulus
                && self.0.vars == other.0.vars
                && self.0.inverted == other.0.inverted)
    }

    /// The level-1 ring obtained by reducing coefficients modulo `p`.
    pub fn reduced(&self) -> Ring {
        if self.level() == 1 {
            return self.clone();
        }
        self.0
            .reduced
            .get_or_init(|| {
                let md = Modulus { p: self.p(), level: 1 };
                let r = Ring::new(self.0.vars.clone(), self.0.inverted.clone(), md)
                    .expect("reduction of a valid ring is valid");
                let _ = r.0.lifted.set(self.clone());
                r
            })
            .clone()
    }

    /// The level-2 ring this ring reduces from. Rings built directly at level 1
    /// are lifted by taking coefficient residues in `[0, p)`.
    pub fn lifted(&self) -> Ring {
        if self.level() == 2 {
            return self.clone();
        }
        self.0
            .lifted
            .get_or_init(|| {
                let md = Modulus { p: self.p(), level: 2 };
                let r = Ring::new(self.0.vars.clone(), self.0.inverted.clone(), md)
                    .expect("lift of a valid ring is valid");
                let _ = r.0.reduced.set(self.clone());
                r
            })
            .clone()
    }

    /// Same variables and inverted elements at a given level.
    pub fn at_level(&self, level: u8) -> Ring {
        if level == 1 {
            self.reduced()
        } else {
            self.lifted()
        }
    }

    pub fn zero(&self) -> RingElem {
        RingElem::zero(self)
    }

    pub fn one(&self) -> RingElem {
        RingElem::one(self)
    }

    pub fn var(&self, i: usize) -> RingElem {
        RingElem::var(self, i)
    }

    pub fn constant(&self, c: i64) -> RingElem {
        RingElem::constant(self, c)
    }

    /// Parses an element written in the expression syntax of [`parse`].
    pub fn parse(&self, s: &str) -> Result<RingElem> {
        parse::parse_elem(self, s)
    }

    /// Parses, panicking on error. For literals in tests and examples.
    pub fn el(&self, s: &str) -> RingElem {
        self.parse(s).unwrap_or_else(|e| panic!("bad element `{s}`: {e}"))
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.modulus();
        if m.level == 1 {
            write!(f, "F_{}[", m.p)?;
        } else {
            write!(f, "Z/{}[", m.m())?;
        }
        for (i, v) in self.vars().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}{}", v.name, if v.log { "(log)" } else { "" })?;
        }
        write!(f, "]")?;
        if !self.inverted().is_empty() {
            write!(f, "[")?;
            for (i, g) in self.inverted().iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "1/({})", elem::format_poly(g, self.vars(), self.m()))?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}
