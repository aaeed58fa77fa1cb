use std::collections::BTreeSet;

use mucheck::formula::{alternation_depth, closure, negate, parse_formula, Formula, FormulaError, ModalOp, NodeKind};
use mucheck::rational::Rational;
use proptest::prelude::*;

fn modal_op() -> impl Strategy<Value = ModalOp> {
    let coalition = proptest::collection::btree_set(prop::sample::select(vec!["a", "b", "c"]), 0..=3)
        .prop_map(|s| s.into_iter().map(String::from).collect::<BTreeSet<String>>());
    let prob = (0i64..=6, 1i64..=6).prop_filter_map("probability", |(n, d)| (n <= d).then(|| Rational::new(n, d)));
    prop_oneof![
        Just(ModalOp::Diamond),
        Just(ModalOp::Box),
        (0u64..20).prop_map(ModalOp::GradedDia),
        (0u64..20).prop_map(ModalOp::GradedBox),
        prob.clone().prop_map(ModalOp::ProbDia),
        prob.prop_map(ModalOp::ProbBox),
        Just(ModalOp::MonDia),
        Just(ModalOp::MonBox),
        coalition.clone().prop_map(ModalOp::CoalDia),
        coalition.prop_map(ModalOp::CoalBox),
    ]
}

/// Closed formulas with distinct binder names. Variables are chosen by
/// de Bruijn-like index into the binders in scope.
fn formula() -> impl Strategy<Value = Formula> {
    #[derive(Clone, Debug)]
    enum Raw {
        Leaf(u8),
        Var(usize),
        And(Box<Raw>, Box<Raw>),
        Or(Box<Raw>, Box<Raw>),
        Modal(ModalOp, Box<Raw>),
        Fix(bool, Box<Raw>),
    }
    let leaf = prop_oneof![(0u8..8).prop_map(Raw::Leaf), (0usize..4).prop_map(Raw::Var)];
    let raw = leaf.prop_recursive(5, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Raw::And(Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Raw::Or(Box::new(l), Box::new(r))),
            (modal_op(), inner.clone()).prop_map(|(op, a)| Raw::Modal(op, Box::new(a))),
            (any::<bool>(), inner).prop_map(|(mu, b)| Raw::Fix(mu, Box::new(b))),
        ]
    });
    fn build(raw: &Raw, scope: &mut Vec<String>, fresh: &mut usize) -> Formula {
        match raw {
            Raw::Leaf(k) => match k {
                0 => Formula::Top,
                1 => Formula::Bot,
                2 => Formula::atom("p"),
                3 => Formula::neg_atom("p"),
                4 => Formula::atom("q"),
                5 => Formula::neg_atom("q"),
                6 => Formula::atom("r"),
                _ => Formula::neg_atom("r"),
            },
            Raw::Var(i) if !scope.is_empty() => Formula::var(scope[scope.len() - 1 - i % scope.len()].clone()),
            Raw::Var(_) => Formula::atom("p"),
            Raw::And(l, r) => Formula::and(build(l, scope, fresh), build(r, scope, fresh)),
            Raw::Or(l, r) => Formula::or(build(l, scope, fresh), build(r, scope, fresh)),
            Raw::Modal(op, a) => Formula::modal(op.clone(), build(a, scope, fresh)),
            Raw::Fix(mu, b) => {
                *fresh += 1;
                let x = format!("X{fresh}");
                scope.push(x.clone());
                let body = build(b, scope, fresh);
                scope.pop();
                if *mu {
                    Formula::mu(x, body)
                } else {
                    Formula::nu(x, body)
                }
            }
        }
    }
    raw.prop_map(|r| build(&r, &mut Vec::new(), &mut 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(f in formula()) {
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text), Ok(f), "text: {}", text);
    }

    #[test]
    fn negation_is_an_involution(f in formula()) {
        prop_assert_eq!(negate(&negate(&f)), f);
    }

    #[test]
    fn closure_is_no_larger_than_the_formula(f in formula()) {
        let cl = closure(&f).unwrap();
        prop_assert!(cl.len() <= f.size());
        prop_assert_eq!(cl.formula_of(cl.root), f);
    }

    #[test]
    fn priorities_respect_fixpoint_kind_and_nesting(f in formula()) {
        let cl = closure(&f).unwrap();
        for n in 0..cl.len() {
            let p = cl.priority(n);
            match cl.kind(n) {
                NodeKind::Fix(kind, _) => {
                    prop_assert_eq!(p % 2, kind.parity());
                    prop_assert!(p >= 1);
                    for inner in cl.dependents(n) {
                        prop_assert!(cl.priority(inner) <= p);
                    }
                }
                _ => prop_assert_eq!(p, 0),
            }
            prop_assert!(p as usize <= cl.ad + 1);
        }
    }

    #[test]
    fn dual_graph_is_the_closure_of_the_negation(f in formula()) {
        let cl = closure(&f).unwrap();
        let dual = cl.dual();
        prop_assert_eq!(dual.formula_of(dual.root), negate(&f));
        prop_assert_eq!(dual.ad, cl.ad);
        let negated = closure(&negate(&f)).unwrap();
        prop_assert_eq!(negated.len(), dual.len());
        prop_assert_eq!(negated.ad, dual.ad);
    }
}

#[test]
fn closure_of_nested_fixpoints() {
    // X = νX.μY.(◇X ∨ ◇Y), Y = μY.(◇X ∨ ◇Y): {X, Y, ◇X ∨ ◇Y, ◇X, ◇Y}
    let f = parse_formula("nu X. mu Y. <>X | <>Y").unwrap();
    let cl = closure(&f).unwrap();
    assert_eq!(cl.len(), 5);
    assert_eq!(cl.ad, 2);
    let fix: Vec<(u32, bool)> = (0..cl.len())
        .filter(|&n| cl.is_fixpoint(n))
        .map(|n| (cl.priority(n), matches!(cl.kind(n), NodeKind::Fix(k, _) if k.parity() == 0)))
        .collect();
    assert!(fix.contains(&(2, true)), "{fix:?}");
    assert!(fix.contains(&(1, false)), "{fix:?}");
}

#[test]
fn alternation_depths() {
    let ad = |s: &str| alternation_depth(&parse_formula(s).unwrap()).unwrap();
    assert_eq!(ad("p & <>q"), 0);
    assert_eq!(ad("mu X. p | <>X"), 1);
    assert_eq!(ad("nu X. mu Y. <>X | <>Y"), 2);
    // independent nesting does not alternate
    assert_eq!(ad("nu X. (mu Y. p | <>Y) & []X"), 1);
    assert_eq!(ad("mu X. nu Y. mu Z. <>X | []Y & <>Z"), 3);
}

#[test]
fn chi_formulas_have_one_alternation_per_priority() {
    // the top priority is rounded up to odd
    for k in 0..6 {
        let f = mucheck::benchgen::chi_formula(k, mucheck::benchgen::Lift::None);
        assert_eq!(alternation_depth(&f).unwrap(), (k | 1) as usize + 1);
    }
}

#[test]
fn errors() {
    assert_eq!(closure(&Formula::var("X")), Err(FormulaError::UnboundVariable("X".into())));
    assert!(matches!(parse_formula("mu X. p |"), Err(FormulaError::Syntax { .. })));
    assert!(matches!(parse_formula("<g -1> p"), Err(FormulaError::Syntax { .. })));
    assert!(matches!(parse_formula("<p 3/2> p"), Err(FormulaError::Syntax { .. })));
}
