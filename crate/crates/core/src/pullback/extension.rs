use serde_json::{json, Value};

use super::relative::{relative_iso_check, RelativeHiggsBundle};
use super::{frame_change, sym_of_frame, PullbackContext};
use crate::cech::IsoCheck;
use crate::error::{Error, Result};
use crate::higgs::{inv_factorial, TruncSymAlgebra};
use crate::matrix::Matrix;
use crate::ring::{Ring, RingElem};

/// The extension `0 -> f^* T_X -> E_tau -> O_Y -> 0` attached to `tau`, with
/// the Higgs field sending the lift `e_0` of `1` to the tangent generators.
///
/// In coordinates `(c_0, c_T)` the transition on `(i, j)` is
/// `[[1, 0], [u, K]]`, where `u = tau_ij(e^j)` and `K` is the change of
/// tangent frame.
#[derive(Clone, Debug)]
pub struct ExtensionE {
    ctx: PullbackContext,
    bundle: RelativeHiggsBundle,
}

impl ExtensionE {
    pub fn build(ctx: &PullbackContext) -> Result<ExtensionE> {
        let f = ctx.map();
        let y = f.target();
        let m = ctx.tangent_rank();
        let mut transitions = Vec::new();
        for (idx, py) in y.pairs().iter().enumerate() {
            let u = ctx.tau_vector(idx);
            let k = frame_change(f, idx)?;
            let mut t = Matrix::zero(&py.ring, m + 1, m + 1);
            t.set(0, 0, py.ring.one());
            for w in 0..m {
                t.set(w + 1, 0, u[w].clone());
                for w2 in 0..m {
                    t.set(w + 1, w2 + 1, k.get(w, w2).clone());
                }
            }
            transitions.push(t);
        }
        let actions = y.charts().iter().map(|ring| (0..m).map(|w| Matrix::unit(ring, m + 1, w + 1, 0)).collect()).collect();
        let bundle = RelativeHiggsBundle::glue(f.clone(), actions, transitions)?;
        Ok(ExtensionE { ctx: ctx.clone(), bundle })
    }

    pub fn bundle(&self) -> &RelativeHiggsBundle {
        &self.bundle
    }

    /// Whether every transition is block diagonal.
    pub fn is_split(&self) -> bool {
        self.bundle.transitions().iter().all(|t| (1..t.rows()).all(|w| t.get(w, 0).is_zero()))
    }

    pub fn theta_is_nonzero(&self) -> bool {
        (0..self.ctx.map().target().num_charts()).any(|c| self.bundle.actions(c).iter().any(|a| !a.is_zero()))
    }

    /// `theta_v theta_w = 0` for all directions on every chart.
    pub fn theta_squares_to_zero(&self) -> bool {
        (0..self.ctx.map().target().num_charts()).all(|c| {
            let acts = self.bundle.actions(c);
            acts.iter().all(|a| acts.iter().all(|b| a.mul(b).is_zero()))
        })
    }

    pub fn sym_power(&self, r: usize) -> Result<SymPower> {
        SymPower::new(&self.ctx, r)
    }
}

/// `Sym^r(E_tau)` in the monomial basis `e_0^{r - |a|} e^a`, indexed by the
/// basis of `A_r`.
#[derive(Clone, Debug)]
pub struct SymPower {
    r: usize,
    m: usize,
    bundle: RelativeHiggsBundle,
}

impl SymPower {
    pub fn new(ctx: &PullbackContext, r: usize) -> Result<SymPower> {
        let f = ctx.map();
        let y = f.target();
        let p = y.p();
        if r as u64 >= p {
            return Err(Error::FactorialNotInvertible { r, p });
        }
        let m = ctx.tangent_rank();
        let mut transitions = Vec::new();
        for (idx, py) in y.pairs().iter().enumerate() {
            let alg = TruncSymAlgebra::with_generators(&py.ring, m, r);
            let u = ctx.tau_vector(idx);
            let k = frame_change(f, idx)?;
            let shifted = {
                let mut x = alg.linear_elem(&u);
                x[0] = py.ring.one();
                x
            };
            let images: Vec<Vec<RingElem>> = (0..m)
                .map(|w| alg.linear_elem(&(0..m).map(|w2| k.get(w2, w).clone()).collect::<Vec<_>>()))
                .collect();
            let weight = |mono: &[u32]| alg.pow_elem(&shifted, r - degree(mono));
            transitions.push(alg.substitution_matrix(&images, weight));
        }
        let actions = y.charts().iter().map(|ring| sym_actions(ring, m, r)).collect();
        let bundle = RelativeHiggsBundle::glue(f.clone(), actions, transitions)?;
        Ok(SymPower { r, m, bundle })
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn bundle(&self) -> &RelativeHiggsBundle {
        &self.bundle
    }

    fn algebra(&self, ring: &Ring) -> TruncSymAlgebra {
        TruncSymAlgebra::with_generators(ring, self.m, self.r)
    }

    /// The element `c_ij` of `f^* A_r` with `g_i = c_ij g_j` for the local
    /// generators `g = e_0^r / r!`, using `e_0^{r-|a|} e^a = (r-|a|)! D^a g`.
    pub fn generator_transition(&self, idx: usize) -> Result<Vec<RingElem>> {
        let t = &self.bundle.transitions()[idx];
        let ring = t.ring().clone();
        let alg = self.algebra(&ring);
        let scale = inv_factorial(&ring, self.r)?;
        Ok(alg
            .basis()
            .iter()
            .enumerate()
            .map(|(a, mono)| &(t.get(a, 0) * &scale) * &ring.constant(factorial(self.r - degree(mono))))
            .collect())
    }

    /// `diag(1 / (r - |a|)!)`, taking coordinates in the divided basis
    /// `e_0^{r-|a|} e^a / (r-|a|)!` to monomial coordinates.
    pub fn divided_basis(&self, ring: &Ring) -> Result<Matrix> {
        let alg = self.algebra(ring);
        let n = alg.dim();
        let mut d = Matrix::zero(ring, n, n);
        for (a, mono) in alg.basis().iter().enumerate() {
            d.set(a, a, inv_factorial(ring, self.r - degree(mono))?);
        }
        Ok(d)
    }

    /// The decreasing filtration by tangent degree and its comparison with
    /// `f^* A_r`.
    pub fn filtration(&self, ctx: &PullbackContext) -> Result<SymFiltration> {
        let f = ctx.map();
        let y = f.target();
        let alg = self.algebra(y.chart(0));
        let degrees: Vec<usize> = alg.basis().iter().map(|b| degree(b)).collect();
        let levels: Vec<Vec<usize>> =
            (0..=self.r).map(|k| (0..degrees.len()).filter(|&a| degrees[a] >= k).collect()).collect();

        let mut stable = true;
        for t in self.bundle.transitions() {
            for a in 0..degrees.len() {
                stable &= (0..degrees.len()).all(|b| degrees[b] >= degrees[a] || t.get(b, a).is_zero());
            }
        }
        for c in 0..y.num_charts() {
            for act in self.bundle.actions(c) {
                for a in 0..degrees.len() {
                    stable &= (0..degrees.len()).all(|b| degrees[b] > degrees[a] || act.get(b, a).is_zero());
                }
            }
        }

        let graded_transitions: Vec<Matrix> = self
            .bundle
            .transitions()
            .iter()
            .map(|t| {
                let mut g = t.clone();
                for a in 0..degrees.len() {
                    for b in 0..degrees.len() {
                        if degrees[a] != degrees[b] {
                            g.set(b, a, t.ring().zero());
                        }
                    }
                }
                g
            })
            .collect();
        let graded_actions = (0..y.num_charts()).map(|c| self.bundle.actions(c).to_vec()).collect();
        let graded = RelativeHiggsBundle::glue(f.clone(), graded_actions, graded_transitions)?;

        let a_actions = y
            .charts()
            .iter()
            .map(|ring| {
                let alg = self.algebra(ring);
                (0..self.m).map(|w| alg.regular_action(w)).collect()
            })
            .collect();
        let a_transitions = (0..y.pairs().len())
            .map(|idx| Ok(sym_of_frame(&self.algebra(&y.pairs()[idx].ring), &frame_change(f, idx)?)))
            .collect::<Result<Vec<_>>>()?;
        let algebra_bundle = RelativeHiggsBundle::glue(f.clone(), a_actions, a_transitions)?;

        let witness: Vec<Matrix> = y
            .charts()
            .iter()
            .map(|ring| {
                let n = degrees.len();
                let mut w = Matrix::zero(ring, n, n);
                for (a, &d) in degrees.iter().enumerate() {
                    w.set(a, a, ring.constant(factorial(self.r - d)));
                }
                w
            })
            .collect();
        let check = relative_iso_check(&graded, &algebra_bundle, &witness);
        let graded_ranks = (0..=self.r).map(|k| degrees.iter().filter(|&&d| d == k).count()).collect();
        let expected_ranks = (0..=self.r).map(|k| binomial(self.m + k - 1, k)).collect();
        Ok(SymFiltration { levels, graded_ranks, expected_ranks, stable, witness, check })
    }
}

/// The filtration `F^0 > F^1 > ... > F^r > 0` of `Sym^r(E_tau)`, where
/// `F^k` is spanned by monomials of tangent degree at least `k`.
#[derive(Clone, Debug)]
pub struct SymFiltration {
    /// Basis indices spanning each `F^k`.
    pub levels: Vec<Vec<usize>>,
    pub graded_ranks: Vec<usize>,
    /// Ranks of the degree pieces of `f^* A_r`.
    pub expected_ranks: Vec<usize>,
    /// Whether each `F^k` is preserved by transitions and the Higgs field.
    pub stable: bool,
    /// Chartwise map from the associated graded to `f^* A_r`.
    pub witness: Vec<Matrix>,
    pub check: IsoCheck,
}

impl SymFiltration {
    pub fn ok(&self) -> bool {
        self.stable && self.check.ok && self.graded_ranks == self.expected_ranks
    }

    pub fn to_json(&self) -> Value {
        json!({
            "statement": "Sym^r(E_tau) is filtered with graded pieces those of f^*A_r",
            "levels": self.levels,
            "graded_ranks": self.graded_ranks,
            "expected_ranks": self.expected_ranks,
            "stable": self.stable,
            "witness": self.witness.iter().map(Matrix::to_json).collect::<Vec<_>>(),
            "result": self.ok(),
            "failure": self.check.failure,
        })
    }
}

fn degree(mono: &[u32]) -> usize {
    mono.iter().map(|&k| k as usize).sum()
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `theta_v(e_0^{r-k} e^a) = (r - k) e_0^{r-k-1} e^{a + e_v}`.
fn sym_actions(ring: &Ring, m: usize, r: usize) -> Vec<Matrix> {
    let alg = TruncSymAlgebra::with_generators(ring, m, r);
    let n = alg.dim();
    (0..m)
        .map(|v| {
            let mut act = Matrix::zero(ring, n, n);
            for (a, mono) in alg.basis().iter().enumerate() {
                let k = degree(mono);
                if k < r {
                    let mut next = mono.clone();
                    next[v] += 1;
                    let b = alg.index_of(&next).expect("degree at most r");
                    act.set(b, a, ring.constant((r - k) as i64));
                }
            }
            act
        })
        .collect()
}
