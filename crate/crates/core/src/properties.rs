//! Randomized laws of the ring kernel, the Higgs algebra, gluing, twisted
//! pullbacks and the Cartier comparison.

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cartier::{inverse_cartier, verify_theorem};
use crate::cech::{bundle_iso_check, pushforward_cochain, GluedHiggsBundle, Pushforward};
use crate::harness::suites::random_p1_bundle;
use crate::harness::random::{perturb_lifts, random_in_algebra, random_nilpotent, random_poly, random_sections, rng_for};
use crate::higgs::{armodule_to_higgs, higgs_to_armodule, trunc_exp, HiggsLocal};
use crate::matrix::{FormMatrix, Matrix};
use crate::pullback::{
    check_direct_sum_compat, compare_representatives, compare_tp1_tp2, tp1, tp2, tp3, ExtensionE, PullbackContext,
    SymPower,
};
use crate::registry::find;
use crate::ring::{differential, hom_difference_derivation, pullback_form, Modulus, Ring, RingElem, RingHom, Var};
use crate::scenario::Scenario;

fn primes() -> impl Strategy<Value = u64> {
    prop_oneof![Just(3u64), Just(5), Just(7)]
}

fn rng(seed: u64) -> ChaCha8Rng {
    rng_for(seed, "properties", 0)
}

fn ring(p: u64, level: u8, names: &[&str], inverted: &[&str]) -> Ring {
    let md = Modulus::new(p, level).unwrap();
    let vars: Vec<Var> = names.iter().map(|n| Var::ordinary(n)).collect();
    let poly = Ring::polynomial(vars.clone(), md).unwrap();
    let inv = inverted.iter().map(|s| poly.el(s).num().clone()).collect();
    Ring::new(vars, inv, md).unwrap()
}

/// A random fraction with denominator a product of inverted generators.
fn random_fraction(r: &Ring, rng: &mut ChaCha8Rng) -> RingElem {
    let mut e = random_poly(r, rng, 2);
    for k in 0..r.inverted().len() {
        let d = RingElem::inverted_generator(r, k);
        for _ in 0..rng.gen_range(0..3) {
            e = &e * &d;
        }
    }
    e
}

fn scenario(name: &str, p: u64) -> Scenario {
    find(name).unwrap().load(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn canonical_form_is_idempotent(p in primes(), seed in any::<u64>()) {
        let r = ring(p, 2, &["x", "y"], &["x", "x - 1"]);
        let e = random_fraction(&r, &mut rng(seed));
        let once = e.clone().normalize();
        let twice = once.clone().normalize();
        prop_assert_eq!(once.num(), twice.num());
        prop_assert_eq!(once.den(), twice.den());
    }

    #[test]
    fn ring_axioms(p in primes(), level in 1u8..=2, seed in any::<u64>()) {
        let r = ring(p, level, &["x", "y"], &["x", "y + 1"]);
        let mut g = rng(seed);
        let (a, b, c) = (random_fraction(&r, &mut g), random_fraction(&r, &mut g), random_fraction(&r, &mut g));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn differential_is_a_derivation_and_commutes_with_pullback(p in primes(), seed in any::<u64>()) {
        let r = ring(p, 1, &["x", "y"], &["x"]);
        let mut g = rng(seed);
        let (u, v) = (random_fraction(&r, &mut g), random_fraction(&r, &mut g));
        let lhs = differential(&(&u * &v));
        let rhs = differential(&u).scale(&v).add(&differential(&v).scale(&u));
        prop_assert!(lhs == rhs);

        let target = ring(p, 1, &["s", "t"], &[]);
        let images = vec![target.var(0).pow(2) + target.one(), random_poly(&target, &mut g, 2)];
        let source = ring(p, 1, &["x", "y"], &[]);
        let h = RingHom::new(&source, &target, images).unwrap();
        let e = random_poly(&source, &mut g, 3);
        prop_assert!(pullback_form(&h, &differential(&e)) == differential(&h.apply(&e)));
    }

    #[test]
    fn divided_differences_are_twisted_derivations(p in primes(), seed in any::<u64>()) {
        let mut g = rng(seed);
        let src = ring(p, 2, &["x", "y"], &[]);
        let tgt = ring(p, 2, &["s"], &[]);
        let a_imgs: Vec<RingElem> = (0..2).map(|_| random_poly(&tgt, &mut g, 2)).collect();
        let b_imgs: Vec<RingElem> =
            a_imgs.iter().map(|e| e + &random_poly(&tgt, &mut g, 2).scale(p as i64)).collect();
        let a = RingHom::new(&src, &tgt, a_imgs).unwrap();
        let b = RingHom::new(&src, &tgt, b_imgs).unwrap();
        let delta = hom_difference_derivation(&a, &b).unwrap();
        let src1 = src.reduced();
        let (u, v) = (random_poly(&src1, &mut g, 2), random_poly(&src1, &mut g, 2));
        let base = delta.base();
        let leibniz = &(&base.apply(&u) * &delta.apply(&v)) + &(&base.apply(&v) * &delta.apply(&u));
        prop_assert_eq!(delta.apply(&(&u * &v)), leibniz);
        let ul = u.lift();
        let direct = (&a.apply(&ul) - &b.apply(&ul)).divide_by_p().unwrap();
        prop_assert_eq!(delta.apply(&u), direct);
    }

    #[test]
    fn divide_by_p_inverts_multiplication_by_p(p in primes(), seed in any::<u64>()) {
        let r = ring(p, 2, &["x", "y"], &["x"]);
        let e = random_fraction(&r, &mut rng(seed));
        prop_assert_eq!(e.scale(p as i64).divide_by_p().unwrap(), e.reduce_mod_p());
    }

    #[test]
    fn truncated_exponential_laws(p in primes(), seed in any::<u64>()) {
        let mut g = rng(seed);
        let r1 = ring(p, 1, &["x"], &["x"]);
        let n = g.gen_range(1..=4);
        let base = random_nilpotent(&r1, n, &mut g);
        let a = random_in_algebra(&base, &mut g, 3);
        let b = random_in_algebra(&base, &mut g, 3);
        let r = p as usize - 1;
        let ea = trunc_exp(&a, r).unwrap();
        prop_assert!(ea.mul(&trunc_exp(&a.neg(), r).unwrap()).is_identity());
        prop_assert_eq!(trunc_exp(&a.add(&b), r).unwrap(), ea.mul(&trunc_exp(&b, r).unwrap()));
        prop_assert!(trunc_exp(&a, p as usize).is_err());
    }

    #[test]
    fn higgs_and_ar_modules_correspond(p in primes(), seed in any::<u64>()) {
        let mut g = rng(seed);
        let r2 = ring(p, 1, &["x", "y"], &[]);
        let n = g.gen_range(1..=4);
        let base = random_nilpotent(&r2, n, &mut g);
        let comps = (0..2).map(|_| random_in_algebra(&base, &mut g, 2)).collect();
        let e = HiggsLocal::new(FormMatrix::from_components(&r2, comps)).unwrap();
        let r = g.gen_range(e.exponent()..p as usize);
        let m = higgs_to_armodule(&e, r).unwrap();
        prop_assert!(m.truncation_violation().is_none());
        prop_assert!(m.is_multiplicative());
        prop_assert!(m.action(0).commutator(m.action(1)).is_zero());
        let back = armodule_to_higgs(&m);
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(higgs_to_armodule(&back, r).unwrap(), m);
    }

    #[test]
    fn obstructions_are_cocycles_and_transport_to_cocycles(p in primes(), seed in any::<u64>()) {
        let s = scenario("affine-3chart", p);
        let lifts = perturb_lifts(&s.lifts, &mut rng(seed)).unwrap();
        let ob_f = lifts.f.obstruction().unwrap();
        let ob_fx = lifts.fx.obstruction().unwrap();
        let ob_fy = lifts.fy.obstruction().unwrap();
        for c in [&ob_f, &ob_fx, &ob_fy] {
            prop_assert!(c.cocycle_failure().is_none());
        }
        let f: &crate::cech::CoverMap = lifts.map();
        let moved = [
            pushforward_cochain(&ob_fx, Pushforward::PullbackByF(f)),
            pushforward_cochain(&ob_f, Pushforward::FrobeniusY(lifts.fy.frobenius())),
            pushforward_cochain(&ob_fy, Pushforward::TangentMapF(f)),
        ];
        for c in &moved {
            prop_assert!(c.cocycle_failure().is_none());
        }
    }

    #[test]
    fn gluing_accepts_exactly_cocycles(p in primes(), a in 0u64..7, b in 0u64..7, k in 0u64..7, swap in any::<bool>()) {
        let s = scenario("affine-3chart", p);
        let cov = s.x.clone();
        let mat = |i: usize, j: usize, m: [[u64; 2]; 2]| {
            let ring = &cov.pair(i, j).ring;
            let rows = m.iter().map(|row| row.iter().map(|&c| ring.constant(c as i64)).collect()).collect();
            Matrix::from_rows(ring, rows)
        };
        let mul = |x: [[u64; 2]; 2], y: [[u64; 2]; 2]| {
            let mut z = [[0u64; 2]; 2];
            for i in 0..2 { for j in 0..2 { z[i][j] = (x[i][0] * y[0][j] + x[i][1] * y[1][j]) % p; } }
            z
        };
        let t01 = [[1, a % p], [0, 1]];
        let t12 = [[1, 0], [b % p, 1]];
        let mut t02 = if swap { mul(t01, t12) } else { mul(t12, t01) };
        t02[0][0] = (t02[0][0] + k) % p;
        let oracle = t02 == mul(t12, t01);
        let mut transitions = vec![Matrix::identity(&cov.pairs()[0].ring, 2); cov.pairs().len()];
        transitions[cov.pair_index(0, 1)] = mat(0, 1, t01);
        transitions[cov.pair_index(1, 2)] = mat(1, 2, t12);
        transitions[cov.pair_index(0, 2)] = mat(0, 2, t02);
        let locals = cov.charts().iter().map(|r| HiggsLocal::zero(r, 2)).collect();
        let glued = GluedHiggsBundle::glue(cov.clone(), locals, transitions);
        prop_assert_eq!(glued.is_ok(), oracle);
    }

    #[test]
    fn gluing_accepts_exactly_intertwining_fields(p in primes(), c in 0i64..7, lower in any::<bool>()) {
        let s = scenario("affine-2chart", p);
        let cov = s.x.clone();
        let pr = &cov.pairs()[0].ring;
        let mut t = Matrix::identity(pr, 2);
        if lower { t.set(1, 0, pr.constant(c)); } else { t.set(0, 1, pr.constant(c)); }
        let theta = |r: &Ring| Matrix::from_rows(r, vec![vec![r.zero(), r.var(0)], vec![r.zero(), r.zero()]]);
        let oracle = !lower || (c as u64).is_multiple_of(p);
        let locals = cov
            .charts()
            .iter()
            .map(|r| HiggsLocal::new(FormMatrix::from_components(r, vec![theta(r)])).unwrap())
            .collect();
        let glued = GluedHiggsBundle::glue(cov.clone(), locals, vec![t]);
        prop_assert_eq!(glued.is_ok(), oracle);
    }

    #[test]
    fn twisted_pullbacks_preserve_rank_and_sums(p in primes(), seed in any::<u64>()) {
        let mut g = rng(seed);
        let s = scenario("p1-log-rank2", p);
        let lifts = perturb_lifts(&s.lifts, &mut g).unwrap();
        let ctx = PullbackContext::new(s.f.clone(), lifts.f.obstruction().unwrap()).unwrap();
        let (n1, n2) = (g.gen_range(1..=3), g.gen_range(1..=3));
        let e1 = random_p1_bundle(&s.x, n1, &mut g).unwrap();
        let e2 = random_p1_bundle(&s.x, n2, &mut g).unwrap();
        let r = e1.exponent().max(e2.exponent()).max(1);
        for e in [&e1, &e2] {
            prop_assert_eq!(tp1(e, &ctx, r).unwrap().rank(), e.rank());
            prop_assert_eq!(tp2(e, &ctx, r).unwrap().rank(), e.rank());
            prop_assert_eq!(tp3(e, &ctx, r).unwrap().rank(), e.rank());
        }
        prop_assert!(check_direct_sum_compat(&e1, &e2, &ctx, r).unwrap().check.ok);
    }

    #[test]
    fn tp1_tp2_and_representatives(p in primes(), seed in any::<u64>()) {
        let mut g = rng(seed);
        let s = scenario("affine-2chart", p);
        let values = (0..s.y.pairs().len())
            .map(|k| vec![random_fraction(&s.y.pairs()[k].ring, &mut g)])
            .collect();
        let ctx = PullbackContext::from_values(s.f.clone(), values).unwrap();
        let r = g.gen_range(1..p as usize);
        prop_assert!(compare_tp1_tp2(&s.higgs, &ctx, r).unwrap().check.ok);
        let sections = random_sections(&s.f, &mut g).unwrap();
        prop_assert!(compare_representatives(&s.higgs, &ctx, &sections, r).unwrap().check.ok);
    }

    #[test]
    fn extension_and_filtration(p in primes(), seed in any::<u64>()) {
        let mut g = rng(seed);
        let s = scenario("affine-2chart", p);
        let values = vec![vec![random_fraction(&s.y.pairs()[0].ring, &mut g)]];
        let ctx = PullbackContext::from_values(s.f.clone(), values).unwrap();
        let e = ExtensionE::build(&ctx).unwrap();
        prop_assert!(e.theta_is_nonzero());
        prop_assert!(e.theta_squares_to_zero());
        for r in 1..p as usize {
            prop_assert!(SymPower::new(&ctx, r).unwrap().filtration(&ctx).unwrap().ok());
        }
    }

    #[test]
    fn lift_choices_do_not_change_the_comparison(p in primes(), seed in any::<u64>(), which in 0usize..3) {
        let name = ["affine-2chart", "p1-log-rank2", "p1-frobenius-pullback"][which];
        let s = scenario(name, p);
        let lifts = perturb_lifts(&s.lifts, &mut rng(seed)).unwrap();
        let t = verify_theorem(&s.higgs, &lifts).unwrap();
        prop_assert!(t.ok());
        prop_assert!(inverse_cartier(&s.higgs, &lifts.fx).unwrap().is_flat());
        prop_assert!(t.v1.is_flat() && t.v2.is_flat());
    }
}

#[test]
fn untwisted_comparison_is_an_equality() {
    for p in [3, 5, 7] {
        let s = scenario("affine-global-lift", p);
        let t = verify_theorem(&s.higgs, &s.lifts).unwrap();
        assert!(t.ob_f_zero && t.nu_zero);
        assert!(t.witness.iter().all(Matrix::is_identity));
        assert_eq!(t.v1.transitions(), t.v2.transitions());
        assert_eq!(t.v1.locals(), t.v2.locals());
        let id: Vec<Matrix> = s.y.charts().iter().map(|c| Matrix::identity(c, 2)).collect();
        assert!(bundle_iso_check(&t.v1, &t.v2, &id).ok);
    }
}
