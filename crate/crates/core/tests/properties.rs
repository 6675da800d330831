use proptest::prelude::*;

use hurwitz_tr::algebra::{series_reversion, trace_over_roots, MPoly, Mono, Poly, TruncatedSeries, Var, Q};
use hurwitz_tr::algebra::rational::q;
use hurwitz_tr::hurwitz::{frobenius_pure, pure_hurwitz, FactorizationQuery};
use hurwitz_tr::operators::{apply_recursion, euler};
use hurwitz_tr::symfun::{character, content_product, flow_p, partitions_of, partitions_up_to, rho_coeff, rho_inv, schur_p, Partition, Weight};
use hurwitz_tr::tau::{exp_trunc, fgn_oracle, t_weight, tau_expand, Model, Sign};
use hurwitz_tr::verify::random_curves;

fn rat() -> impl Strategy<Value = Q> {
    (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn nonzero_rat() -> impl Strategy<Value = Q> {
    rat().prop_map(|x| if x == q(0) { q(1) } else { x })
}

/// Random polynomial in x1, x2 with exponents up to (4, 3).
fn poly2() -> impl Strategy<Value = MPoly> {
    prop::collection::vec(((0i32..=4, 0i32..=3), rat()), 0..8).prop_map(|ts| {
        let mut p = MPoly::zero();
        for ((a, b), c) in ts {
            p.add_term(Mono::var(Var::X(1), a).mul(&Mono::var(Var::X(2), b)), c);
        }
        p
    })
}

fn series(p: MPoly) -> TruncatedSeries {
    TruncatedSeries::new(vec![(Var::X(1), 4), (Var::X(2), 3)], p)
}

fn partition_of(n: u32) -> impl Strategy<Value = Partition> {
    let all = partitions_of(n, None);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn profiles() -> impl Strategy<Value = Vec<Partition>> {
    (2u32..=5, 2usize..=4).prop_flat_map(|(n, k)| prop::collection::vec(partition_of(n), k))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn series_ring_axioms(a in poly2(), b in poly2(), c in poly2()) {
        let (a, b, c) = (series(a), series(b), series(c));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn unit_times_inverse_is_one(c0 in nonzero_rat(), rest in poly2()) {
        let f = series(&MPoly::constant(c0) + &rest.retain(|m| m.total(|_| true) > 0));
        let one = f.mul(&f.inverse().unwrap()).unwrap();
        prop_assert_eq!(one.poly, MPoly::one());
    }

    #[test]
    fn reversion_composes_to_identity(a1 in nonzero_rat(), tail in prop::collection::vec(rat(), 5)) {
        let x = Var::X(1);
        let mut f = MPoly::term(Mono::var(x, 1), a1);
        for (k, c) in tail.into_iter().enumerate() {
            f.add_term(Mono::var(x, k as i32 + 2), c);
        }
        let g = series_reversion(&TruncatedSeries::new(vec![(x, 6)], f.clone()), 6).unwrap();
        let fg = f.subs(x, &g.poly).trunc_var(x, 6);
        prop_assert_eq!(fg, MPoly::var(x));
    }

    #[test]
    fn trace_over_rational_roots(roots in prop::collection::btree_set(-6i64..=6, 1..5), num in prop::collection::vec(rat(), 1..5)) {
        let roots: Vec<Q> = roots.into_iter().map(q).collect();
        let p = roots.iter().fold(Poly::one(), |acc, r| &acc * &Poly::linear_root(r));
        let num = Poly::new(num);
        // den = x² + 1 has no rational roots
        let den = Poly::new(vec![q(1), q(0), q(1)]);
        let direct = roots.iter().fold(q(0), |acc, r| acc + num.eval(r) / den.eval(r));
        prop_assert_eq!(trace_over_roots(&p, &num, &den).unwrap(), direct);
    }

    #[test]
    fn hurwitz_is_invariant_under_profile_order(ps in profiles(), seed in any::<u64>()) {
        let mut shuffled = ps.clone();
        let k = shuffled.len();
        shuffled.rotate_left((seed % k as u64) as usize);
        shuffled.swap(0, (seed as usize / 7) % k);
        for transitive in [false, true] {
            let a = pure_hurwitz(&FactorizationQuery::new(ps.clone(), transitive)).unwrap();
            let b = pure_hurwitz(&FactorizationQuery::new(shuffled.clone(), transitive)).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn trivial_profile_can_be_inserted(ps in profiles()) {
        let n = ps[0].weight();
        let mut more = ps.clone();
        more.push(Partition::ones(n));
        let a = pure_hurwitz(&FactorizationQuery::new(ps, false)).unwrap();
        let b = pure_hurwitz(&FactorizationQuery::new(more, false)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn hurwitz_matches_character_sum(ps in profiles()) {
        let a = pure_hurwitz(&FactorizationQuery::new(ps.clone(), false)).unwrap();
        prop_assert_eq!(a, frobenius_pure(&ps).unwrap());
    }

    #[test]
    fn recursion_operator_commutator(coeffs in prop::collection::vec(rat(), 1..6), minus in any::<bool>()) {
        let m = Model::symbolic(Weight::symbolic(2), 2);
        let mut f = MPoly::zero();
        for (k, c) in coeffs.into_iter().enumerate() {
            f.add_term(Mono::var(Var::X(1), k as i32), c);
        }
        let sign = if minus { Sign::Minus } else { Sign::Plus };
        let r = apply_recursion(sign, &f, &m);
        let comm = &euler(&r) - &apply_recursion(sign, &euler(&f), &m);
        prop_assert_eq!(comm, r);
    }

    #[test]
    fn tau_constant_term_and_grading(g in prop::collection::vec(nonzero_rat(), 1..=2)) {
        let m = Model::new(Weight::numeric(&g), (1..=3).map(|i| MPoly::var(Var::S(i))).collect(), MPoly::var(Var::Gamma));
        let tau = tau_expand(&m, 4).unwrap().expansion;
        prop_assert_eq!(tau.constant_term(), q(1));
        for mono in tau.terms.keys() {
            prop_assert_eq!(mono.exp(Var::Gamma), t_weight(mono));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    #[test]
    fn random_admissible_curves(seed in any::<u64>(), z in rat()) {
        let f = random_curves(seed, 1).remove(0);
        let c = f.curve().unwrap();
        prop_assert_eq!(c.phi.degree(), c.lm() as i64);
        let gs = c.gs.eval(&z);
        prop_assume!(gs != q(0));
        // X Y = S and X′ = φ/(γG(S)²) at a sample point
        prop_assert_eq!(c.x.eval(&z).unwrap() * c.y.eval(&z), c.s_poly.eval(&z));
        prop_assert_eq!(c.x.derivative().eval(&z).unwrap(), c.phi.eval(&z) / (&c.gamma * &gs * &gs));
        prop_assert!(c.sheet_residual(6).unwrap().is_zero());
    }

    #[test]
    fn connected_correlator_is_symmetric(g in prop::collection::vec(nonzero_rat(), 1..=2), s in prop::collection::vec(rat(), 2)) {
        let m = Model::numeric(&g, &s, q(1));
        let f = fgn_oracle(0, 3, 5, &m).unwrap();
        let swap12 = f.rename(|v| match v { Var::X(1) => Var::X(2), Var::X(2) => Var::X(1), v => v });
        let cycle = f.rename(|v| match v { Var::X(1) => Var::X(2), Var::X(2) => Var::X(3), Var::X(3) => Var::X(1), v => v });
        prop_assert_eq!(&swap12, &f);
        prop_assert_eq!(&cycle, &f);
    }
}

#[test]
fn character_orthogonality() {
    for n in 1..=6 {
        let ls = partitions_of(n, None);
        for a in &ls {
            for b in &ls {
                let s = ls.iter().fold(q(0), |acc, mu| acc + character(a, mu).unwrap() * character(b, mu).unwrap() / mu.z_q());
                assert_eq!(s, if a == b { q(1) } else { q(0) }, "{a:?} {b:?}");
            }
        }
    }
}

#[test]
fn cauchy_littlewood_through_degree_six() {
    let (pt, ps) = (flow_p(Var::T), flow_p(Var::S));
    let mut arg = MPoly::zero();
    for i in 1..=6u8 {
        arg += &(&MPoly::var(Var::T(i)) * &MPoly::var(Var::S(i))).scale(&q(i as i64));
    }
    let lhs = exp_trunc(&arg, t_weight, 6);
    let rhs = partitions_up_to(6).iter().fold(MPoly::one(), |acc, l| {
        if l.weight() == 0 {
            acc
        } else {
            &acc + &(&schur_p(l, &pt) * &schur_p(l, &ps))
        }
    });
    assert_eq!(lhs, rhs);
}

#[test]
fn content_product_at_beta_zero() {
    let w = Weight::symbolic(2);
    for l in partitions_up_to(6) {
        assert_eq!(content_product(&l, &w).subs(Var::Beta, &MPoly::zero()), MPoly::one(), "{l:?}");
    }
}

#[test]
fn rho_consecutive_ratio() {
    let w = Weight::symbolic(2);
    let gamma = MPoly::var(Var::Gamma);
    let b = 8;
    for j in -5..=5 {
        let ratio = (&rho_coeff(j, &w, &gamma, b) * &rho_inv(j - 1, &w, &gamma, b)).trunc_var(Var::Beta, b);
        let want = (&gamma * &w.eval(&MPoly::var(Var::Beta).scale(&q(j as i64)))).trunc_var(Var::Beta, b);
        assert_eq!(ratio, want, "j = {j}");
    }
}
