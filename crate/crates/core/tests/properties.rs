use std::collections::HashMap;
use std::sync::OnceLock;

use bpcobar::algebra::{AlgebraConfig, Exps, GammaElement, Mono};
use bpcobar::cobar::Comodule;
use bpcobar::groups::{e7_groups, sphere_e2_order};
use bpcobar::hopf::{Hopf, RPoly};
use bpcobar::lattice::enumerate_words;
use bpcobar::plocal::{nu_rat, rat, Nu, PLocal, Rational};
use bpcobar::solver::{derive_t_chain, solve, SolveRequest};
use bpcobar::tensor::{CobarElement, Target, Word};
use proptest::prelude::*;

const P: u64 = 3;

fn hopf() -> &'static Hopf {
    static H: OnceLock<Hopf> = OnceLock::new();
    H.get_or_init(|| Hopf::new(AlgebraConfig::default()).unwrap())
}

fn y7() -> &'static Comodule {
    static M: OnceLock<Comodule> = OnceLock::new();
    M.get_or_init(|| derive_t_chain(hopf()).unwrap().y7_even(&HashMap::new()))
}

fn rational() -> impl Strategy<Value = Rational> {
    (-200i64..200, 1i64..60).prop_map(|(n, d)| rat(n, d))
}

fn plocal() -> impl Strategy<Value = PLocal> {
    (-200i64..200, prop::sample::select(vec![1i64, 2, 4, 5, 7, 8, 10, 11, 13]))
        .prop_map(|(n, d)| PLocal::frac(n, d, P).unwrap())
}

fn finite(n: Nu) -> Option<i64> {
    n.finite()
}

/// Exponent vectors over v1, v2 (or h1, h2) of degree at most `max`.
fn exps(max: u32) -> impl Strategy<Value = Exps> {
    (0u16..10, 0u16..3).prop_filter_map("degree", move |(a, b)| {
        let e = Exps::from_slice(&[a, b]);
        (e.degree(&hopf().cfg) <= max).then_some(e)
    })
}

fn mono(max: u32) -> impl Strategy<Value = Mono> {
    (exps(max), exps(max)).prop_filter_map("degree", move |(v, h)| {
        let m = Mono::new(v, h);
        (m.degree(&hopf().cfg) <= max).then_some(m)
    })
}

/// The canonical two-slot words in (psi (x) 1) psi and (1 (x) psi) psi.
fn iterated_coproducts(h: &Hopf, m: &Mono) -> (CobarElement, CobarElement) {
    let psi = h.coproduct_mono(m);
    let mut left = CobarElement::zero();
    let mut right = CobarElement::zero();
    for (w, c) in &psi.terms {
        for (w2, c2) in &h.coproduct_mono(&w.slots[0]).terms {
            left.add_term(Word::new(vec![w2.slots[0], w2.slots[1], w.slots[1]], Exps::ZERO, Target::Formal), c * c2);
        }
        for (w2, c2) in &h.coproduct_mono(&w.slots[1]).terms {
            right.add_term(Word::new(vec![w.slots[0], w2.slots[0], w2.slots[1]], Exps::ZERO, Target::Formal), c * c2);
        }
    }
    (h.canonicalize(&left), h.canonicalize(&right))
}

/// Sum of random multiples of words of one shape and internal degree, with no
/// trivial slot.
fn homogeneous(target: Target, s: usize, deg: u32, picks: &[(usize, i64)]) -> CobarElement {
    let h = hopf();
    let words: Vec<Word> = enumerate_words(h, 2, s, target, deg, 50_000)
        .unwrap()
        .into_iter()
        .filter(|w| !w.has_trivial_slot())
        .collect();
    let mut e = CobarElement::zero();
    if words.is_empty() {
        return e;
    }
    for &(i, c) in picks {
        e.add_term(words[i % words.len()].clone(), PLocal::from_int(c));
    }
    h.canonicalize(&e)
}

fn picks() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..10_000, -5i64..6), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn valuation_is_multiplicative(a in rational(), b in rational()) {
        let va = finite(nu_rat(&a, P));
        let vb = finite(nu_rat(&b, P));
        let vab = finite(nu_rat(&(&a * &b), P));
        match (va, vb) {
            (Some(x), Some(y)) => prop_assert_eq!(vab, Some(x + y)),
            _ => prop_assert_eq!(vab, None),
        }
    }

    #[test]
    fn valuation_of_sum_is_at_least_the_minimum(a in rational(), b in rational()) {
        let s = &a + &b;
        if let (Some(x), Some(y), Some(z)) = (finite(nu_rat(&a, P)), finite(nu_rat(&b, P)), finite(nu_rat(&s, P))) {
            prop_assert!(z >= x.min(y));
            if x != y {
                prop_assert_eq!(z, x.min(y));
            }
        }
    }

    #[test]
    fn plocal_ring_axioms(a in plocal(), b in plocal(), c in plocal()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, PLocal::zero());
        prop_assert!(PLocal::new((&a * &b).into_rational(), P).is_ok());
        if b.nu(P) == Nu::Finite(0) {
            prop_assert!(a.checked_div(&b, P).is_ok());
        }
    }

    #[test]
    fn right_unit_is_a_ring_map(a in exps(36), b in exps(36)) {
        let h = hopf();
        let prod = h.eta_mono(&a).mul(&h.eta_mono(&b), &h.cfg);
        prop_assume!(!prod.truncated);
        prop_assert_eq!(h.eta_mono(&a.add(&b)).terms, prod.terms);
    }

    #[test]
    fn coproduct_of_right_unit(a in exps(36)) {
        let h = hopf();
        let eta = h.eta_mono(&a);
        prop_assert_eq!(h.coproduct(&eta).terms, h.right_embed(&eta).terms);
    }

    #[test]
    fn coproduct_is_coassociative_and_counital(m in mono(36)) {
        let h = hopf();
        let (l, r) = iterated_coproducts(h, &m);
        prop_assert_eq!(l.terms, r.terms);
        let psi = h.coproduct_mono(&m);
        let g = GammaElement::mono(m, PLocal::one());
        prop_assert_eq!(h.counit_slot(&psi, 0).terms, g.terms.clone());
        prop_assert_eq!(h.counit_slot(&psi, 1).terms, g.terms);
    }

    #[test]
    fn t_and_h_bases_round_trip(v in exps(24), t in exps(24), c in -9i64..10) {
        prop_assume!(c != 0);
        let h = hopf();
        let mut r = RPoly::default();
        r.terms.insert(vec![v, t], rat(c, 1));
        prop_assert_eq!(h.h_to_t(&h.t_to_h(&r)), r.clone());
        prop_assert_eq!(h.t_to_h(&h.h_to_t(&r)), r);
    }

    #[test]
    fn d_squared_vanishes_on_spheres(n in 1u32..6, s in 0usize..3, deg in 1u32..10, ps in picks()) {
        let h = hopf();
        let m = Comodule::sphere(2 * n + 1);
        let x = homogeneous(Target::Iota(2 * n + 1), s, 4 * deg, &ps);
        prop_assume!(!x.is_zero());
        let dd = h.differential(&h.differential(&x, &m).unwrap(), &m).unwrap();
        prop_assert!(dd.is_zero(), "d(d({})) = {}", x, dd);
    }

    #[test]
    fn d_squared_vanishes_on_y7(g in prop::sample::select(vec![10u32, 14, 18, 22, 26, 34]), s in 0usize..3, deg in 1u32..10, ps in picks()) {
        let h = hopf();
        let x = homogeneous(Target::X(g), s, 4 * deg, &ps);
        prop_assume!(!x.is_zero());
        let dd = h.differential(&h.differential(&x, y7()).unwrap(), y7()).unwrap();
        prop_assert!(dd.is_zero(), "d(d({})) = {}", x, dd);
    }

    #[test]
    fn leibniz_over_y7(g in prop::sample::select(vec![14u32, 18, 26, 34]), deg in 1u32..6, ps in picks()) {
        let h = hopf();
        let gamma = homogeneous(Target::Formal, 1, 4 * deg, &ps);
        prop_assume!(!gamma.is_zero());
        let x = Target::X(g);
        let retarget = |e: &CobarElement, t: Target| {
            let mut r = CobarElement::zero();
            for (w, c) in &e.terms {
                r.add_term(Word::new(w.slots.clone(), w.tv, t), c.clone());
            }
            r
        };
        let lhs = h.differential(&retarget(&gamma, x), y7()).unwrap();
        let mut rhs = retarget(&h.differential(&gamma, &Comodule::sphere(1)).unwrap(), x);
        let dx = h.differential(&CobarElement::module(Exps::ZERO, x, PLocal::one()), y7()).unwrap();
        let mut joined = CobarElement::zero();
        for (w1, c1) in &gamma.terms {
            for (w2, c2) in &dx.terms {
                joined.add_term(Word::new(vec![w1.slots[0], w2.slots[0]], Exps::ZERO, w2.target), -(c1 * c2));
            }
        }
        rhs.add_assign(&h.canonicalize(&joined));
        prop_assert_eq!(lhs.terms, rhs.terms);
    }

    #[test]
    fn solver_recovers_a_cobounding_element(deg in 2u32..7, coeffs in prop::collection::vec(-4i64..5, 12)) {
        let h = hopf();
        let basis: Vec<Mono> = enumerate_words(h, 2, 1, Target::Formal, 4 * deg, 1000)
            .unwrap()
            .into_iter()
            .filter(|w| w.tv.is_zero() && !w.slots[0].h.is_zero())
            .map(|w| w.slots[0])
            .collect();
        let mut t = GammaElement::zero();
        for (m, c) in basis.iter().zip(&coeffs) {
            t.add_term(*m, PLocal::from_int(*c));
        }
        prop_assume!(!t.is_zero());
        let target = h.reduced_coproduct(&t).unwrap();
        prop_assume!(!target.is_zero());
        let sol = solve(h, &SolveRequest { target: target.clone(), basis: basis.clone(), threaded: vec![] }).unwrap();
        prop_assert_eq!(h.reduced_coproduct(&sol.particular_element()).unwrap().terms, target.terms);
        for k in &sol.homogeneous_basis {
            prop_assert!(h.reduced_coproduct(&sol.combine(k)).unwrap().is_zero());
        }
        prop_assert_eq!(sol.particular.len(), basis.len());
    }

    #[test]
    fn sphere_order_is_monotone_and_bounded(n in 1u32..20, m in -500i64..500) {
        prop_assume!(m != 0);
        let e = sphere_e2_order(n, m, P);
        prop_assert!(e <= sphere_e2_order(n + 1, m, P));
        prop_assert!(e <= n);
        prop_assert!(e as i64 <= finite(bpcobar::plocal::nu_i64(m, P)).unwrap() + 1);
    }

    #[test]
    fn e7_branches(j in -3_000_000i64..3_000_000, delta in prop::sample::select(vec![2i64, 5, 8])) {
        let (even, odd) = e7_groups(j, delta).unwrap();
        if j % 2 == 0 {
            prop_assert!(even.is_zero() && odd.is_zero());
            return Ok(());
        }
        let r9 = j.rem_euclid(9);
        if r9 != 2 {
            prop_assert_eq!(&even, &odd);
        }
        let (small, lo, hi) = match (j.rem_euclid(3), r9) {
            (0, _) => (1, 4, 10),
            (_, 1 | 7) => (1, 5, 8),
            (_, 4) => (1, 5, 14),
            (_, 5 | 8) => (2, 4, 19),
            _ => (2, 4, 13),
        };
        prop_assert_eq!(odd.factors[1], small);
        prop_assert!((lo..=hi).contains(&odd.factors[0]));
        if r9 == 2 {
            prop_assert_eq!(even.factors[1], 3);
            prop_assert!((3..=12).contains(&even.factors[0]));
            prop_assert_eq!(even.ambiguous_alternatives.is_some(), even.factors[0] == 12);
        }
    }
}
