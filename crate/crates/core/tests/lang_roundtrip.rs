use depmark_core::lang::{parse, parse_unvalidated, serialize};
use depmark_core::{bundled, MarkovModel, RateExpr, State, StateClass, Transition, TransitionKind};
use proptest::prelude::*;

#[test]
fn minimal_round_trip() {
    let text = "param L = 0.5; state 1 \"up\" class=operational; \
                state 2 \"down\" class=fail_safe; trans 1 -> 2 rate = L;";
    let m = parse(text).unwrap();
    assert_eq!(parse(&serialize(&m)).unwrap(), m);
}

#[test]
fn bundled_round_trips() {
    for text in [bundled::DFWCS, bundled::DFWCS_PID, bundled::TOY_TWOSTATE] {
        let m = parse(text).unwrap();
        let again = parse(&serialize(&m)).unwrap();
        assert_eq!(again, m);
    }
    let m = parse(bundled::DFWCS).unwrap();
    let again = parse(&serialize(&m)).unwrap();
    assert_eq!(again.states.len(), 7);
    assert_eq!(again.transitions.len(), 13);
}

#[test]
fn serialization_is_deterministic() {
    let m = parse(bundled::DFWCS).unwrap();
    assert_eq!(serialize(&m), serialize(&m.clone()));
    let mut shuffled = m.clone();
    shuffled.states.reverse();
    shuffled.transitions.reverse();
    let a = serialize(&m);
    let b = serialize(&shuffled);
    // Reversal flips the relative order of duplicate arcs only; DFWCS has none.
    assert_eq!(a, b);
}

fn arb_expr() -> impl Strategy<Value = RateExpr> {
    let leaf = prop_oneof![
        (0.0f64..10.0).prop_map(RateExpr::Constant),
        prop::sample::select(vec!["A", "B", "C"]).prop_map(RateExpr::param),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RateExpr::sum(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RateExpr::difference(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| RateExpr::product(a, b)),
        ]
    })
}

fn arb_class() -> impl Strategy<Value = StateClass> {
    prop::sample::select(StateClass::ALL.to_vec())
}

fn arb_model() -> impl Strategy<Value = MarkovModel> {
    (
        prop::collection::btree_set(1u32..50, 1..6),
        prop::collection::vec((arb_class(), "[a-zA-Z0-9 _\"\\\\-]{1,12}"), 6),
        prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>(), arb_expr(), any::<bool>()), 0..8),
        (1e-9f64..10.0, 0.0f64..=1.0, 0.0f64..100.0),
        prop::option::of(0.0f64..1e5),
        any::<prop::sample::Index>(),
    )
        .prop_map(|(ids, meta, arcs, (a, c, b), horizon, init_pick)| {
            let ids: Vec<u32> = ids.into_iter().collect();
            let states = ids
                .iter()
                .zip(meta)
                .map(|(&id, (class, label))| State::new(id, label, class))
                .collect();
            let transitions = arcs
                .into_iter()
                .map(|(f, t, e, repair)| {
                    let mut tr = Transition::new(ids[f.index(ids.len())], ids[t.index(ids.len())], e);
                    if repair {
                        tr.kind = TransitionKind::Repair;
                    }
                    tr
                })
                .collect();
            let mut m = MarkovModel {
                states,
                transitions,
                horizon,
                ..Default::default()
            };
            m.params.set("A", a);
            m.params.set("B", b);
            m.params.set("C", c);
            m.coverage_params.insert("C".into());
            let first = ids[init_pick.index(ids.len())];
            m.initial.insert(first, 0.25);
            let second = ids[(init_pick.index(ids.len()) + 1) % ids.len()];
            *m.initial.entry(second).or_insert(0.0) += 0.75;
            m
        })
}

proptest! {
    #[test]
    fn parse_serialize_identity(m in arb_model()) {
        let text = serialize(&m);
        let back = parse_unvalidated(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, m.canonical());
    }

    #[test]
    fn parser_is_total(text in "\\PC{0,200}") {
        let lines = text.split('\n').count() as u32;
        if let Err(errs) = parse(&text) {
            prop_assert!(!errs.0.is_empty());
            for e in &errs.0 {
                prop_assert!(!e.message.is_empty());
                prop_assert!(e.span.line >= 1 && e.span.line <= lines, "{:?} lines={}", e.span, lines);
                prop_assert!(e.span.column >= 1);
            }
        }
    }

    #[test]
    fn parser_is_total_on_grammar_soup(
        words in prop::collection::vec(
            prop::sample::select(vec![
                "param", "state", "trans", "init", "option", "class", "rate", "kind", "=", ";",
                "->", "+", "-", "*", "(", ")", "1", "2", "0.5", "1e-3", "\"x\"", "C", "coverage",
                "operational", "fail_safe", "repair", "horizon", "#", "\n",
            ]),
            0..60,
        )
    ) {
        let text = words.join(" ");
        let lines = text.split('\n').count() as u32;
        if let Err(errs) = parse(&text) {
            for e in &errs.0 {
                prop_assert!(e.span.line >= 1 && e.span.line <= lines);
            }
        }
    }
}
