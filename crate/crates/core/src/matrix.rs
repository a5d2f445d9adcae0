//! Matrices over a [`Ring`] and matrices of logarithmic one-forms.

use std::collections::HashMap;
use std::fmt;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::ring::json::{elem_from_json, elem_to_json};
use crate::ring::{Ring, RingElem, RingHom, TwistedDerivation};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<RingElem>,
}

impl Matrix {
    pub fn zero(ring: &Ring, rows: usize, cols: usize) -> Matrix {
        Matrix { ring: ring.clone(), rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Matrix {
        let mut m = Matrix::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<RingElem>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { ring: ring.clone(), rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Rows of expression strings; handy for literals.
    pub fn from_strs(ring: &Ring, rows: &[&[&str]]) -> Result<Matrix> {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_rows(ring, rows))
    }

    /// The elementary matrix with a single `1` at `(i, j)`.
    pub fn unit(ring: &Ring, n: usize, i: usize, j: usize) -> Matrix {
        let mut m = Matrix::zero(ring, n, n);
        m.set(i, j, ring.one());
        m
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: RingElem) {
        self.data[i * self.cols + j] = e;
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[RingElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RingElem::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            }))
    }

    pub fn map(&self, f: impl Fn(&RingElem) -> RingElem) -> Matrix {
        let data: Vec<RingElem> = self.data.iter().map(f).collect();
        let ring = data.first().map_or_else(|| self.ring.clone(), |e| e.ring().clone());
        Matrix { ring, rows: self.rows, cols: self.cols, data }
    }

    fn map_into(&self, ring: &Ring, f: impl Fn(&RingElem) -> RingElem) -> Matrix {
        Matrix { ring: ring.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn zip(&self, other: &Matrix, f: impl Fn(&RingElem, &RingElem) -> RingElem) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Matrix {
        self.map_into(&self.ring, |a| -a)
    }

    pub fn scale(&self, c: &RingElem) -> Matrix {
        self.map_into(&self.ring, |a| a * c)
    }

    pub fn scale_int(&self, c: i64) -> Matrix {
        self.map_into(&self.ring, |a| a.scale(c))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols);
        let mut out = Matrix::zero(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add_raw(&a.mul_raw(b));
                }
            }
        }
        out.data = out.data.into_iter().map(RingElem::normalize).collect();
        out
    }

    pub fn pow(&self, n: u32) -> Matrix {
        let mut acc = Matrix::identity(&self.ring, self.rows);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Kronecker product; basis `e_i (x) f_j` is index `i * other.rows + j`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zero(&self.ring, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zero(&self.ring, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn apply_hom(&self, h: &RingHom) -> Matrix {
        self.map_into(h.target(), |a| h.apply(a))
    }

    pub fn reduce_mod_p(&self) -> Matrix {
        self.map_into(&self.ring.reduced(), RingElem::reduce_mod_p)
    }

    pub fn lift(&self) -> Matrix {
        self.map_into(&self.ring.lifted(), RingElem::lift)
    }

    /// Determinant by cofactor expansion with memoized minors.
    pub fn det(&self) -> RingElem {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return self.ring.one();
        }
        let mut memo: HashMap<u64, RingElem> = HashMap::new();
        self.det_minor(0, (1u64 << n) - 1, &mut memo)
    }

    fn det_minor(&self, row: usize, cols: u64, memo: &mut HashMap<u64, RingElem>) -> RingElem {
        if row == self.rows {
            return self.ring.one();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = self.ring.zero();
        let mut sign = 1;
        for j in 0..self.cols {
            if cols & (1 << j) == 0 {
                continue;
            }
            let a = self.get(row, j);
            if !a.is_zero() {
                let sub = self.det_minor(row + 1, cols & !(1 << j), memo);
                let t = a * &sub;
                acc = if sign > 0 { &acc + &t } else { &acc - &t };
            }
            sign = -sign;
        }
        memo.insert(cols, acc.clone());
        acc
    }

    /// The inverse, if the determinant is a unit.
    pub fn try_inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        if let Some(inv) = self.unipotent_inverse() {
            return Some(inv);
        }
        let n = self.rows;
        let det_inv = self.det().try_inverse()?;
        let mut out = Matrix::zero(&self.ring, n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(j, i);
                let c = minor.det();
                let c = if (i + j) % 2 == 0 { c } else { -&c };
                out.set(i, j, &c * &det_inv);
            }
        }
        Some(out)
    }

    /// `(I + N)^-1 = I - N + N^2 - ...` when `N = self - I` is nilpotent.
    fn unipotent_inverse(&self) -> Option<Matrix> {
        let n = self.rows;
        let id = Matrix::identity(&self.ring, n);
        let nil = self.sub(&id);
        let mut term = id.clone();
        let mut acc = id;
        for k in 1..=n {
            term = term.mul(&nil);
            if term.is_zero() {
                return Some(acc);
            }
            acc = if k % 2 == 1 { acc.sub(&term) } else { acc.add(&term) };
        }
        if term.is_zero() {
            Some(acc)
        } else {
            None
        }
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Matrix {
        let rows = (0..self.rows)
            .filter(|&i| i != skip_row)
            .map(|i| (0..self.cols).filter(|&j| j != skip_col).map(|j| self.get(i, j).clone()).collect())
            .collect();
        Matrix::from_rows(&self.ring, rows)
    }

    /// The form matrix `dM` in the log basis of the ring.
    pub fn differential(&self) -> FormMatrix {
        let comps = (0..self.ring.nvars()).map(|v| self.map_into(&self.ring, |a| a.form_coefficient(v))).collect();
        FormMatrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, comps }
    }

    pub fn to_json(&self) -> Value {
        Value::Array((0..self.rows).map(|i| Value::Array(self.row(i).iter().map(elem_to_json).collect())).collect())
    }

    pub fn from_json(ring: &Ring, v: &Value) -> Result<Matrix> {
        let rows = v.as_array().ok_or_else(|| Error::Parse(format!("expected matrix rows, found {v}")))?;
        let mut out = Vec::new();
        for r in rows {
            let r = r.as_array().ok_or_else(|| Error::Parse(format!("expected matrix row, found {r}")))?;
            out.push(r.iter().map(|e| elem_from_json(ring, e)).collect::<Result<Vec<_>>>()?);
        }
        let c = out.first().map_or(0, Vec::len);
        if out.iter().any(|r| r.len() != c) {
            return Err(Error::ShapeMismatch(format!("ragged matrix {v}")));
        }
        Ok(Matrix::from_rows(ring, out))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A matrix of one-forms `sum_v M_v e_v`, stored as one coefficient matrix
/// per basis form `e_v` of the ring.
#[derive(Clone, PartialEq, Eq)]
pub struct FormMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    comps: Vec<Matrix>,
}

impl FormMatrix {
    pub fn zero(ring: &Ring, rows: usize, cols: usize) -> FormMatrix {
        FormMatrix { ring: ring.clone(), rows, cols, comps: vec![Matrix::zero(ring, rows, cols); ring.nvars()] }
    }

    pub fn from_components(ring: &Ring, comps: Vec<Matrix>) -> FormMatrix {
        assert_eq!(comps.len(), ring.nvars(), "one component per variable");
        let (rows, cols) = comps.first().map_or((0, 0), |m| (m.rows, m.cols));
        assert!(comps.iter().all(|m| m.rows == rows && m.cols == cols), "component shapes differ");
        FormMatrix { ring: ring.clone(), rows, cols, comps }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn components(&self) -> &[Matrix] {
        &self.comps
    }

    pub fn component(&self, v: usize) -> &Matrix {
        &self.comps[v]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Matrix::is_zero)
    }

    pub fn add(&self, other: &FormMatrix) -> FormMatrix {
        self.zip(other, Matrix::add)
    }

    pub fn sub(&self, other: &FormMatrix) -> FormMatrix {
        self.zip(other, Matrix::sub)
    }

    fn zip(&self, other: &FormMatrix, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> FormMatrix {
        let comps: Vec<Matrix> = self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect();
        FormMatrix::from_components(&self.ring, comps)
    }

    fn each(&self, f: impl Fn(&Matrix) -> Matrix) -> FormMatrix {
        let comps: Vec<Matrix> = self.comps.iter().map(f).collect();
        let (rows, cols) = comps.first().map_or((self.rows, self.cols), |m| (m.rows, m.cols));
        FormMatrix { ring: self.ring.clone(), rows, cols, comps }
    }

    /// `M * self`.
    pub fn left_mul(&self, m: &Matrix) -> FormMatrix {
        self.each(|c| m.mul(c))
    }

    /// `self * M`.
    pub fn right_mul(&self, m: &Matrix) -> FormMatrix {
        self.each(|c| c.mul(m))
    }

    pub fn scale(&self, c: &RingElem) -> FormMatrix {
        self.each(|m| m.scale(c))
    }

    pub fn reduce_mod_p(&self) -> FormMatrix {
        let comps: Vec<Matrix> = self.comps.iter().map(Matrix::reduce_mod_p).collect();
        FormMatrix { ring: self.ring.reduced(), rows: self.rows, cols: self.cols, comps }
    }

    /// Pullback `h^*`: entries are mapped by `h` and each basis form `e_v` is
    /// replaced by its pullback, expressed in the target basis.
    pub fn pullback(&self, h: &RingHom) -> FormMatrix {
        let target = h.target();
        let mut out = FormMatrix::zero(target, self.rows, self.cols);
        for (v, comp) in self.comps.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            let mapped = comp.apply_hom(h);
            let form = h.basis_pullback(v);
            for (w, c) in form.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out.comps[w] = out.comps[w].add(&mapped.scale(c));
                }
            }
        }
        out
    }

    /// `delta(self) = sum_v base(M_v) delta(e_v)`, a matrix over the target of
    /// the derivation's base map.
    pub fn contract(&self, delta: &TwistedDerivation) -> Matrix {
        let base = delta.base();
        assert!(base.source().same(&self.ring), "contracting a form matrix over {} with a derivation from {}", self.ring, base.source());
        let mut out = Matrix::zero(base.target(), self.rows, self.cols);
        for (v, comp) in self.comps.iter().enumerate() {
            let val = delta.value(v);
            if comp.is_zero() || val.is_zero() {
                continue;
            }
            out = out.add(&comp.apply_hom(base).scale(val));
        }
        out
    }

    /// Components of `dA + A ^ A` on `e_v ^ e_w` for `v < w`. The basis forms
    /// are closed, and the dual derivations `x d/dx` and `d/dy` commute.
    pub fn curvature(&self) -> Vec<((usize, usize), Matrix)> {
        let n = self.ring.nvars();
        let mut out = Vec::new();
        for v in 0..n {
            for w in v + 1..n {
                let dv_aw = self.comps[w].map_into(&self.ring, |a| a.form_coefficient(v));
                let dw_av = self.comps[v].map_into(&self.ring, |a| a.form_coefficient(w));
                let c = dv_aw.sub(&dw_av).add(&self.comps[v].commutator(&self.comps[w]));
                out.push(((v, w), c));
            }
        }
        out
    }

    pub fn is_flat(&self) -> bool {
        self.curvature().iter().all(|(_, c)| c.is_zero())
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (var, c) in self.ring.vars().iter().zip(&self.comps) {
            m.insert(var.name.clone(), c.to_json());
        }
        Value::Object(m)
    }

    /// Parses `{var: matrix}`; absent variables get zero components.
    pub fn from_json(ring: &Ring, rank: usize, v: &Value) -> Result<FormMatrix> {
        let o = v.as_object().ok_or_else(|| Error::Parse(format!("expected {{variable: matrix}}, found {v}")))?;
        let mut out = FormMatrix::zero(ring, rank, rank);
        for (k, val) in o {
            let i = ring.var_index(k).ok_or_else(|| Error::Parse(format!("unknown variable `{k}`")))?;
            let m = Matrix::from_json(ring, val)?;
            if m.rows != rank || m.cols != rank {
                return Err(Error::ShapeMismatch(format!("component `{k}` is {}x{}, expected rank {rank}", m.rows, m.cols)));
            }
            out.comps[i] = m;
        }
        Ok(out)
    }
}

impl fmt::Display for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (var, c) in self.ring.vars().iter().zip(&self.comps) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let basis = if var.log { format!("dlog {}", var.name) } else { format!("d{}", var.name) };
            write!(f, "{c} {basis}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Modulus, Var};

    fn ring() -> Ring {
        let md = Modulus::new(7, 1).unwrap();
        let base = Ring::polynomial(vec![Var::ordinary("x")], md).unwrap();
        Ring::new(vec![Var::ordinary("x")], vec![base.el("x").num().clone()], md).unwrap()
    }

    #[test]
    fn inverse_and_det() {
        let r = ring();
        let m = Matrix::from_strs(&r, &[&["x", "1"], &["0", "2"]]).unwrap();
        assert_eq!(m.det(), r.el("2*x"));
        let inv = m.try_inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let u = Matrix::from_strs(&r, &[&["1", "x", "x^2"], &["0", "1", "x"], &["0", "0", "1"]]).unwrap();
        assert!(u.mul(&u.try_inverse().unwrap()).is_identity());
        let sing = Matrix::from_strs(&r, &[&["x + 1", "0"], &["0", "1"]]).unwrap();
        assert!(sing.try_inverse().is_none());
    }

    #[test]
    fn kron_shapes() {
        let r = ring();
        let a = Matrix::from_strs(&r, &[&["0", "1"], &["0", "0"]]).unwrap();
        let i3 = Matrix::identity(&r, 3);
        let k = a.kron(&i3);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        assert!(k.mul(&k).is_zero());
        assert_eq!(a.block_diag(&i3).det(), r.zero());
    }

    #[test]
    fn pullback_and_curvature() {
        let r = ring();
        let h = RingHom::from_strs(&r, &r, &["x^2"]).unwrap();
        let theta = FormMatrix::from_components(&r, vec![Matrix::from_strs(&r, &[&["0", "x"], &["0", "0"]]).unwrap()]);
        let pulled = theta.pullback(&h);
        assert_eq!(pulled.component(0).get(0, 1), &r.el("2*x^3"));
        assert!(theta.is_flat());
    }
}
