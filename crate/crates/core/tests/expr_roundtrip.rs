use std::collections::HashMap;

use bpcobar::algebra::{AlgebraConfig, Exps, Mono};
use bpcobar::expr::{parse, print, print_factored};
use bpcobar::plocal::{rat, PLocal};
use bpcobar::tensor::{CobarElement, Target, Word};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn cfg() -> AlgebraConfig {
    AlgebraConfig::default()
}

fn exps() -> impl Strategy<Value = Exps> {
    (0u16..4, 0u16..2, 0u16..2).prop_map(|(a, b, c)| Exps::from_slice(&[a, b, c]))
}

fn target() -> impl Strategy<Value = Target> {
    prop_oneof![
        Just(Target::Formal),
        (1u32..40).prop_map(|n| Target::Iota(2 * n + 1)),
        (1u32..40).prop_map(|n| Target::X(2 * n)),
    ]
}

/// Left-canonical words within the degree cap.
fn word() -> impl Strategy<Value = Word> {
    (0usize..4, target(), exps(), prop::collection::vec((exps(), exps()), 3))
        .prop_filter_map("non-canonical or too large", |(s, t, tv, ms)| {
            let w = if s == 0 {
                if t == Target::Formal {
                    return None;
                }
                Word::new(vec![], tv, t)
            } else {
                let slots = ms[..s]
                    .iter()
                    .enumerate()
                    .map(|(i, (v, h))| Mono::new(if i == 0 { *v } else { Exps::ZERO }, *h))
                    .collect();
                Word::new(slots, Exps::ZERO, t)
            };
            (w.degree(&cfg()) <= cfg().degree_cap).then_some(w)
        })
}

fn coeff() -> impl Strategy<Value = PLocal> {
    (-40i64..40, prop::sample::select(vec![1i64, 2, 4, 5, 7, 10, 11]))
        .prop_filter_map("zero", |(n, d)| (n != 0).then(|| PLocal::new(rat(n, d), 3).unwrap()))
}

fn element() -> impl Strategy<Value = CobarElement> {
    prop::collection::vec((word(), coeff()), 0..6).prop_map(|ts| {
        let mut e = CobarElement::zero();
        for (w, c) in ts {
            e.add_term(w, c);
        }
        e
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_then_parse_is_identity(e in element()) {
        let text = print(&e);
        let back = parse(&text, &cfg(), 3).unwrap();
        prop_assert_eq!(&back.terms, &e.terms, "{}", text);
        let back = parse(&print_factored(&e), &cfg(), 3).unwrap();
        prop_assert_eq!(&back.terms, &e.terms, "{}", print_factored(&e));
    }
}

#[test]
fn printing_is_injective() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = element();
    let mut seen: HashMap<String, CobarElement> = HashMap::new();
    for _ in 0..500 {
        let e = strategy.new_tree(&mut runner).unwrap().current();
        let text = print(&e);
        if let Some(old) = seen.insert(text.clone(), e.clone()) {
            assert_eq!(old.terms, e.terms, "{text}");
        }
    }
    assert!(seen.len() > 100);
}
