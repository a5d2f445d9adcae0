//! Nilpotent Higgs fields on a single chart, the truncated symmetric algebra
//! `A_r = Sym(T) / Sym^{>r}(T)`, and truncated exponentials.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matrix::{FormMatrix, Matrix};
use crate::ring::{Ring, RingElem, MAX_PRIME};

/// A free Higgs module `(O^n, theta)` with `theta = sum_v theta_v e_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiggsLocal {
    theta: FormMatrix,
    exponent: usize,
}

impl HiggsLocal {
    /// Validates commutativity and nilpotency, recording the exponent.
    pub fn new(theta: FormMatrix) -> Result<HiggsLocal> {
        let exponent = check_nilpotent(&theta)?;
        Ok(HiggsLocal { theta, exponent })
    }

    pub fn zero(ring: &Ring, rank: usize) -> HiggsLocal {
        HiggsLocal { theta: FormMatrix::zero(ring, rank, rank), exponent: 0 }
    }

    pub fn ring(&self) -> &Ring {
        self.theta.ring()
    }

    pub fn rank(&self) -> usize {
        self.theta.rows()
    }

    pub fn theta(&self) -> &FormMatrix {
        &self.theta
    }

    /// Smallest `r` with every product of `r + 1` components zero.
    pub fn exponent(&self) -> usize {
        self.exponent
    }
}

/// The exponent of a Higgs field: the smallest `r` such that all products of
/// `r + 1` components vanish.
pub fn check_nilpotent(theta: &FormMatrix) -> Result<usize> {
    let comps = theta.components();
    for v in 0..comps.len() {
        for w in v + 1..comps.len() {
            if !comps[v].commutator(&comps[w]).is_zero() {
                return Err(Error::NotCommuting(v, w));
            }
        }
    }
    if comps.iter().all(Matrix::is_zero) {
        return Ok(0);
    }
    let bound = theta.rows() * comps.len();
    let ring = theta.ring();
    let n = theta.rows();
    let mut layer: Vec<(usize, Matrix)> = vec![(0, Matrix::identity(ring, n))];
    for k in 1..=bound + 1 {
        let mut next = Vec::new();
        for (last, m) in &layer {
            for (v, c) in comps.iter().enumerate().skip(*last) {
                let prod = m.mul(c);
                if !prod.is_zero() {
                    next.push((v, prod));
                }
            }
        }
        if next.is_empty() {
            return Ok(k - 1);
        }
        layer = next;
    }
    Err(Error::NotNilpotent { bound })
}

/// `A_r` over a ring on `m` generators: free on monomials `D^a` with
/// `|a| <= r`, ordered by total degree and then lex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSymAlgebra {
    ring: Ring,
    r: usize,
    m: usize,
    basis: Vec<Vec<u32>>,
}

impl TruncSymAlgebra {
    /// The algebra on the duals of the variables of `ring`.
    pub fn new(ring: &Ring, r: usize) -> TruncSymAlgebra {
        TruncSymAlgebra::with_generators(ring, ring.nvars(), r)
    }

    /// The algebra on `m` generators with coefficients in `ring`, as for a
    /// pullback `f^* A_r`.
    pub fn with_generators(ring: &Ring, m: usize, r: usize) -> TruncSymAlgebra {
        let mut basis = Vec::new();
        for d in 0..=r {
            let mut layer = Vec::new();
            monomials_of_degree(m, d as u32, &mut vec![0; m], 0, &mut layer);
            layer.sort_by(|a, b| b.cmp(a));
            basis.extend(layer);
        }
        TruncSymAlgebra { ring: ring.clone(), r, m, basis }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn num_generators(&self) -> usize {
        self.m
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, mono: &[u32]) -> Option<usize> {
        self.basis.iter().position(|b| b == mono)
    }

    /// Index of the degree-one generator `D_v`.
    pub fn generator(&self, v: usize) -> usize {
        let mut e = vec![0; self.m];
        e[v] = 1;
        self.index_of(&e).expect("generators lie in A_r for r >= 1")
    }

    /// Product of two basis monomials, or `None` when it has degree above `r`.
    pub fn mul_basis(&self, a: usize, b: usize) -> Option<usize> {
        let prod: Vec<u32> = self.basis[a].iter().zip(&self.basis[b]).map(|(x, y)| x + y).collect();
        self.index_of(&prod)
    }

    /// Product of two elements given by coefficient vectors over `ring`.
    pub fn mul_elems(&self, a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
        let ring = a.first().map_or_else(|| self.ring.clone(), |e| e.ring().clone());
        let mut out = vec![ring.zero(); self.dim()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                if let Some(k) = self.mul_basis(i, j) {
                    out[k] = &out[k] + &(x * y);
                }
            }
        }
        out
    }

    /// The unit element with coefficients in `ring`.
    pub fn one_elem(&self, ring: &Ring) -> Vec<RingElem> {
        let mut out = vec![ring.zero(); self.dim()];
        out[0] = ring.one();
        out
    }

    /// `sum_w u_w D_w` with coefficients in the ring of `u`.
    pub fn linear_elem(&self, u: &[RingElem]) -> Vec<RingElem> {
        let ring = u[0].ring().clone();
        let mut out = vec![ring.zero(); self.dim()];
        if self.r == 0 {
            return out;
        }
        for (w, c) in u.iter().enumerate() {
            out[self.generator(w)] = c.clone();
        }
        out
    }

    /// `a^n` in the algebra.
    pub fn pow_elem(&self, a: &[RingElem], n: usize) -> Vec<RingElem> {
        let ring = a[0].ring().clone();
        let mut acc = self.one_elem(&ring);
        for _ in 0..n {
            acc = self.mul_elems(&acc, a);
        }
        acc
    }

    /// `exp(a) = sum_k a^k / k!` for `a` without constant term.
    pub fn exp_elem(&self, a: &[RingElem]) -> Result<Vec<RingElem>> {
        check_order(self.r, self.ring.p())?;
        assert!(a[0].is_zero(), "exponential of an element with nonzero constant term");
        let ring = a[0].ring().clone();
        let mut acc = self.one_elem(&ring);
        let mut power = acc.clone();
        for k in 1..=self.r {
            power = self.mul_elems(&power, a);
            let c = inv_factorial(&ring, k)?;
            for (x, y) in acc.iter_mut().zip(&power) {
                *x = &*x + &(y * &c);
            }
        }
        Ok(acc)
    }

    /// The matrix of the algebra map sending `D_v` to `images[v]`, applied to
    /// each basis monomial: column `a` holds the coefficients of the image of
    /// basis element `a`, optionally multiplied by `weight(a)`.
    pub fn substitution_matrix(
        &self,
        images: &[Vec<RingElem>],
        weight: impl Fn(&[u32]) -> Vec<RingElem>,
    ) -> Matrix {
        let ring = images
            .first()
            .map(|v| v[0].ring().clone())
            .unwrap_or_else(|| self.ring.clone());
        let n = self.dim();
        let mut m = Matrix::zero(&ring, n, n);
        for (a, mono) in self.basis.iter().enumerate() {
            let mut col = weight(mono);
            for (v, &k) in mono.iter().enumerate() {
                for _ in 0..k {
                    col = self.mul_elems(&col, &images[v]);
                }
            }
            for (i, c) in col.into_iter().enumerate() {
                m.set(i, a, c);
            }
        }
        m
    }

    /// Multiplication by the element `c` on the monomial basis.
    pub fn mul_matrix(&self, c: &[RingElem]) -> Matrix {
        let ring = c[0].ring().clone();
        let n = self.dim();
        let mut m = Matrix::zero(&ring, n, n);
        for j in 0..n {
            let mut e = vec![ring.zero(); n];
            e[j] = ring.one();
            for (i, x) in self.mul_elems(c, &e).into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    /// Multiplication by `D_v` on `A_r` in the monomial basis; column `j` is
    /// the image of basis element `j`.
    pub fn regular_action(&self, v: usize) -> Matrix {
        let n = self.dim();
        let g = self.generator(v);
        let mut m = Matrix::zero(&self.ring, n, n);
        for j in 0..n {
            if let Some(i) = self.mul_basis(g, j) {
                m.set(i, j, self.ring.one());
            }
        }
        m
    }
}

fn monomials_of_degree(m: usize, d: u32, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Vec<u32>>) {
    if m == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == m - 1 {
        cur[pos] = d;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in 0..=d {
        cur[pos] = k;
        monomials_of_degree(m, d - k, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

/// A free `O`-module of rank `n` with an `A_r`-module structure, recorded as
/// the structure map on every basis monomial of `A_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArModule {
    algebra: TruncSymAlgebra,
    actions: Vec<Matrix>,
    structure: Vec<Matrix>,
}

impl ArModule {
    /// Builds the module from generator actions, extending multiplicatively,
    /// and validates commutativity and the truncation.
    pub fn from_generators(algebra: TruncSymAlgebra, actions: Vec<Matrix>) -> Result<ArModule> {
        let ring = algebra.ring.clone();
        if actions.len() != algebra.m {
            return Err(Error::ShapeMismatch("one action per generator".into()));
        }
        for v in 0..actions.len() {
            for w in v + 1..actions.len() {
                if !actions[v].commutator(&actions[w]).is_zero() {
                    return Err(Error::NotCommuting(v, w));
                }
            }
        }
        let n = actions.first().map_or(0, Matrix::rows);
        let structure = algebra
            .basis
            .iter()
            .map(|mono: &Vec<u32>| {
                let mut acc = Matrix::identity(&ring, n);
                for (v, &k) in mono.iter().enumerate() {
                    for _ in 0..k {
                        acc = acc.mul(&actions[v]);
                    }
                }
                acc
            })
            .collect();
        let module = ArModule { algebra, actions, structure };
        if let Some(bad) = module.truncation_violation() {
            return Err(Error::ExponentTooLarge {
                exponent: module.algebra.r + 1,
                bound: module.algebra.r,
                p: ring.p(),
                location: Some(format!("degree {} monomial {:?} acts nontrivially", module.algebra.r + 1, bad)),
            });
        }
        Ok(module)
    }

    pub fn algebra(&self) -> &TruncSymAlgebra {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.structure.first().map_or(0, Matrix::rows)
    }

    /// The action of the basis monomial with the given index.
    pub fn act(&self, idx: usize) -> &Matrix {
        &self.structure[idx]
    }

    /// The action of an element `sum_a c_a D^a`.
    pub fn act_elem(&self, c: &[RingElem]) -> Matrix {
        let ring = self.algebra.ring.clone();
        let mut acc = Matrix::zero(&ring, self.rank(), self.rank());
        for (x, m) in c.iter().zip(&self.structure) {
            if !x.is_zero() {
                acc = acc.add(&m.scale(x));
            }
        }
        acc
    }

    /// The action of the degree-one generator `D_v`.
    pub fn action(&self, v: usize) -> &Matrix {
        &self.actions[v]
    }

    /// First monomial of degree `r + 1` that does not act as zero.
    pub fn truncation_violation(&self) -> Option<Vec<u32>> {
        let m = self.algebra.m;
        let mut top = Vec::new();
        monomials_of_degree(m, self.algebra.r as u32 + 1, &mut vec![0; m], 0, &mut top);
        for mono in top {
            let v = mono.iter().position(|&k| k > 0).expect("positive degree");
            let mut rest = mono.clone();
            rest[v] -= 1;
            let idx = self.algebra.index_of(&rest).expect("degree r lies in A_r");
            if !self.actions[v].mul(&self.structure[idx]).is_zero() {
                return Some(mono);
            }
        }
        None
    }

    /// Checks that the structure map is a ring map `A_r -> End(O^n)`.
    pub fn is_multiplicative(&self) -> bool {
        let n = self.algebra.dim();
        for a in 0..n {
            for b in a..n {
                let prod = self.structure[a].mul(&self.structure[b]);
                let ok = match self.algebra.mul_basis(a, b) {
                    Some(c) => prod == self.structure[c],
                    None => prod.is_zero(),
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}

fn check_order(r: usize, p: u64) -> Result<()> {
    if r as u64 >= p {
        return Err(Error::FactorialNotInvertible { r, p });
    }
    Ok(())
}

/// The `A_r`-module attached to a Higgs field of exponent at most `r`:
/// `D_v` acts by `theta_v`.
pub fn higgs_to_armodule(e: &HiggsLocal, r: usize) -> Result<ArModule> {
    let p = e.ring().p();
    if e.exponent() > r || r as u64 >= p {
        return Err(Error::ExponentTooLarge { exponent: e.exponent(), bound: r.min(p as usize - 1), p, location: None });
    }
    ArModule::from_generators(TruncSymAlgebra::new(e.ring(), r), e.theta().components().to_vec())
}

/// Restriction of the structure map to the degree-one part.
pub fn armodule_to_higgs(m: &ArModule) -> HiggsLocal {
    let ring = m.algebra.ring.clone();
    let comps = (0..ring.nvars()).map(|v| m.action(v).clone()).collect();
    HiggsLocal::new(FormMatrix::from_components(&ring, comps)).expect("an A_r-module gives a nilpotent Higgs field")
}

fn inverse_factorials(m: u64) -> &'static [u64] {
    static TABLES: OnceLock<Vec<(u64, Vec<u64>)>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        let mut out = Vec::new();
        for p in (3..=MAX_PRIME).filter(|&p| crate::ring::is_prime(p)) {
            for modulus in [p, p * p] {
                let mut t = vec![1u64];
                let mut fact = 1u64;
                for n in 1..p {
                    fact = fact * n % modulus;
                    t.push(crate::ring::mod_inverse(fact, modulus).expect("n! is a unit for n < p"));
                }
                out.push((modulus, t));
            }
        }
        out
    });
    &tables.iter().find(|(k, _)| *k == m).expect("modulus of a valid ring").1
}

/// `1 / n!` in the coefficient ring of `ring`, for `n < p`.
pub fn inv_factorial(ring: &Ring, n: usize) -> Result<RingElem> {
    check_order(n, ring.p())?;
    Ok(ring.constant(inverse_factorials(ring.m())[n] as i64))
}

/// `sum_{n <= r} N^n / n!`, requiring `r < p` and `N^{r+1} = 0`.
pub fn trunc_exp(n: &Matrix, r: usize) -> Result<Matrix> {
    let ring = n.ring();
    check_order(r, ring.p())?;
    assert!(n.is_square(), "exponential of a non-square matrix");
    let table = inverse_factorials(ring.m());
    let mut acc = Matrix::identity(ring, n.rows());
    let mut power = acc.clone();
    for k in 1..=r {
        power = power.mul(n);
        if power.is_zero() {
            return Ok(acc);
        }
        acc = acc.add(&power.scale_int(table[k] as i64));
    }
    if !power.mul(n).is_zero() {
        return Err(Error::NotNilpotentEnough { order: r });
    }
    Ok(acc)
}

/// `theta_1 (x) 1 + 1 (x) theta_2` on the tensor product.
pub fn tensor_higgs(a: &HiggsLocal, b: &HiggsLocal) -> HiggsLocal {
    let ring = a.ring();
    let ia = Matrix::identity(ring, a.rank());
    let ib = Matrix::identity(ring, b.rank());
    let comps = a
        .theta
        .components()
        .iter()
        .zip(b.theta.components())
        .map(|(x, y)| x.kron(&ib).add(&ia.kron(y)))
        .collect();
    HiggsLocal::new(FormMatrix::from_components(ring, comps)).expect("tensor of commuting nilpotent fields")
}

pub fn direct_sum_higgs(a: &HiggsLocal, b: &HiggsLocal) -> HiggsLocal {
    let ring = a.ring();
    let comps = a.theta.components().iter().zip(b.theta.components()).map(|(x, y)| x.block_diag(y)).collect();
    HiggsLocal::new(FormMatrix::from_components(ring, comps)).expect("sum of commuting nilpotent fields")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Modulus, Var};

    fn line(p: u64) -> Ring {
        Ring::polynomial(vec![Var::ordinary("x")], Modulus::new(p, 1).unwrap()).unwrap()
    }

    fn single(r: &Ring, m: Matrix) -> HiggsLocal {
        HiggsLocal::new(FormMatrix::from_components(r, vec![m])).unwrap()
    }

    #[test]
    fn exponents() {
        let r = line(5);
        assert_eq!(HiggsLocal::zero(&r, 2).exponent(), 0);
        assert_eq!(single(&r, Matrix::unit(&r, 2, 0, 1)).exponent(), 1);
        let j3 = Matrix::unit(&r, 3, 0, 1).add(&Matrix::unit(&r, 3, 1, 2));
        assert_eq!(single(&r, j3).exponent(), 2);
        let not_nil = Matrix::identity(&r, 2);
        assert!(matches!(
            HiggsLocal::new(FormMatrix::from_components(&r, vec![not_nil])),
            Err(Error::NotNilpotent { .. })
        ));
    }

    #[test]
    fn algebra_dimension() {
        let md = Modulus::new(7, 1).unwrap();
        let r = Ring::polynomial(vec![Var::ordinary("x"), Var::log("y")], md).unwrap();
        assert_eq!(TruncSymAlgebra::new(&r, 3).dim(), 10);
        assert_eq!(TruncSymAlgebra::new(&line(7), 4).dim(), 5);
    }

    #[test]
    fn exp_examples() {
        let r = line(7);
        assert!(trunc_exp(&Matrix::zero(&r, 3, 3), 2).unwrap().is_identity());
        let n = Matrix::from_strs(&r, &[&["0", "x"], &["0", "0"]]).unwrap();
        assert_eq!(trunc_exp(&n, 1).unwrap(), Matrix::from_strs(&r, &[&["1", "x"], &["0", "1"]]).unwrap());
        let j3 = Matrix::unit(&r, 3, 0, 1).add(&Matrix::unit(&r, 3, 1, 2));
        assert_eq!(trunc_exp(&j3, 2).unwrap().get(0, 2), &r.constant(4));
        assert!(matches!(trunc_exp(&j3, 1), Err(Error::NotNilpotentEnough { .. })));
        assert!(matches!(trunc_exp(&j3, 7), Err(Error::FactorialNotInvertible { .. })));
    }

    #[test]
    fn armodule_round_trip() {
        let r = line(5);
        let e = single(&r, Matrix::unit(&r, 2, 0, 1));
        let m = higgs_to_armodule(&e, 1).unwrap();
        assert!(m.is_multiplicative());
        assert_eq!(armodule_to_higgs(&m), e);
        let j3 = Matrix::unit(&r, 3, 0, 1).add(&Matrix::unit(&r, 3, 1, 2));
        assert!(higgs_to_armodule(&single(&r, j3), 1).is_err());
        let z = HiggsLocal::zero(&r, 2);
        assert_eq!(armodule_to_higgs(&higgs_to_armodule(&z, 0).unwrap()), z);
    }

    #[test]
    fn tensor_and_sum() {
        let r = line(5);
        let e = single(&r, Matrix::unit(&r, 2, 0, 1));
        let t = tensor_higgs(&e, &e);
        assert_eq!((t.rank(), t.exponent()), (4, 2));
        let s = direct_sum_higgs(&e, &HiggsLocal::zero(&r, 3));
        assert_eq!((s.rank(), s.exponent()), (5, 1));
    }
}
