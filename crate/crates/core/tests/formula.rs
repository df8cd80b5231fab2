use proptest::prelude::*;
use udcr::formula::*;

fn formula() -> impl Strategy<Value = CnfFormula> {
    (3usize..9).prop_flat_map(|n| {
        let clause = (proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 3), any::<[bool; 3]>())
            .prop_map(|(vars, signs)| {
                let mut t = [0i64; 3];
                for k in 0..3 {
                    t[k] = if signs[k] { vars[k] as i64 } else { -(vars[k] as i64) };
                }
                t
            });
        proptest::collection::vec(clause, 1..7)
            .prop_map(move |ts| CnfFormula::from_triples(n, &ts).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn graph_has_literal_and_cycle_edges(f in formula()) {
        let g = build_variable_clause_graph(&f);
        let n = f.num_vars;
        prop_assert_eq!(g.edge_count(), 3 * f.num_clauses() + n);
        prop_assert_eq!(g.nodes.len(), n + f.num_clauses());
        for i in 1..=n {
            prop_assert!(g.has_edge(GraphNode::Var(i), GraphNode::Var(i % n + 1)));
        }
    }

    #[test]
    fn dimacs_round_trips(f in formula()) {
        prop_assert_eq!(parse_cnf(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn layouts_are_crossing_free_and_consistent(f in formula()) {
        match compute_comb_layout(&f, None) {
            Ok(l) => {
                prop_assert_eq!(crossing_count(&f, &l), 0);
                prop_assert!(l.check(&f).is_ok());
                prop_assert_eq!(CombLayout::from_json(&l.to_json()).unwrap(), l.clone());
                // The hint path reproduces the same layout.
                prop_assert_eq!(compute_comb_layout(&f, Some(&l.sides)).unwrap(), l);
            }
            Err(e) => {
                let is_not_layoutable = matches!(e, LayoutError::NotLayoutable(_));
                prop_assert!(is_not_layoutable);
            }
        }
    }

    #[test]
    fn layoutable_formulas_respect_the_clause_cap(f in formula()) {
        if compute_comb_layout(&f, None).is_ok() {
            prop_assert!(f.num_clauses() <= max_layoutable_clauses(f.num_vars));
        }
    }

    #[test]
    fn first_unsatisfied_agrees_with_evaluation(f in formula(), mask in any::<u16>()) {
        let a: Vec<bool> = (0..f.num_vars).map(|i| mask >> i & 1 == 1).collect();
        let first = f.first_unsatisfied(&a);
        prop_assert_eq!(first.is_none(), f.is_satisfied(&a));
        if let Some(j) = first {
            prop_assert!(!f.clauses[j].satisfied(&a));
            prop_assert!(f.clauses[..j].iter().all(|c| c.satisfied(&a)));
        }
    }
}

#[test]
fn pairwise_crossing_triangle_is_not_layoutable() {
    // Spans [1,4], [2,5], [3,6] cross pairwise, so two must share a side.
    let f = CnfFormula::from_triples(6, &[[1, 2, 4], [2, 3, 5], [3, 4, 6]]).unwrap();
    let r = compute_comb_layout(&f, None);
    assert!(matches!(r, Err(LayoutError::NotLayoutable(_))), "{r:?}");
    // Any two of them fit, one on each side.
    let g = CnfFormula::from_triples(6, &[[1, 2, 4], [2, 3, 5]]).unwrap();
    assert_eq!(compute_comb_layout(&g, None).unwrap().sides, [Side::Below, Side::Above]);
}

#[test]
fn three_clauses_on_the_same_variables_are_not_layoutable() {
    let f = CnfFormula::from_triples(3, &[[1, 2, 3], [-1, 2, 3], [1, -2, 3]]).unwrap();
    assert!(matches!(compute_comb_layout(&f, None), Err(LayoutError::NotLayoutable(_))));
    let g = CnfFormula::from_triples(3, &[[1, 2, 3], [-1, 2, 3]]).unwrap();
    assert!(compute_comb_layout(&g, None).is_ok());
}

#[test]
fn bad_hint_is_not_layoutable() {
    let f = CnfFormula::from_triples(4, &[[1, 2, 3], [2, 3, 4]]).unwrap();
    let r = compute_comb_layout(&f, Some(&[Side::Above, Side::Above]));
    assert!(matches!(r, Err(LayoutError::NotLayoutable(_))));
    assert!(compute_comb_layout(&f, Some(&[Side::Above, Side::Below])).is_ok());
    assert!(matches!(compute_comb_layout(&f, Some(&[Side::Above])), Err(LayoutError::Mismatch(_))));
}

#[test]
fn nested_family_fills_the_cap() {
    assert!(nested_family(2, 1).is_none());
    for n in 3..=10 {
        let cap = max_layoutable_clauses(n);
        assert!(nested_family(n, cap + 1).is_none());
        let (f, sides) = nested_family(n, cap).unwrap();
        let l = compute_comb_layout(&f, Some(&sides)).unwrap();
        assert_eq!(crossing_count(&f, &l), 0);
    }
}

#[test]
fn parse_errors() {
    assert!(matches!(parse_cnf("p cnf 3 1\n1 1 2 0\n"), Err(FormulaError::Arity { .. })));
    assert!(matches!(parse_cnf("p cnf 3 1\n1 2 4 0\n"), Err(FormulaError::Range { .. })));
    assert!(matches!(parse_cnf("p cnf 3 1\n1 x 2 0\n"), Err(FormulaError::Syntax { .. })));
}
