mod common;

use common::*;
use udcr::formula::{compute_comb_layout, nested_family, Side};
use udcr::reduction::*;
use udcr::verifier::{verify, Mode};

#[test]
fn sample_reference_assignment_verifies() {
    let f = sample();
    let r = compile(&f, &compute_comb_layout(&f, None).unwrap()).unwrap();
    let p = realize(&r, &SAMPLE_ASSIGNMENT).unwrap();
    let report = verify(&r.caterpillar(), &p, Mode::Exact);
    assert!(report.passed());
    assert!(report.violations.is_empty());
    assert_eq!(p.len(), r.stats.node_count);
}

#[test]
fn sample_realizes_exactly_the_satisfying_assignments() {
    let f = sample();
    let r = compile(&f, &compute_comb_layout(&f, None).unwrap()).unwrap();
    let c = r.caterpillar();
    let mut satisfying = 0;
    for mask in 0..16 {
        let a = assignment(mask, 4);
        match realize(&r, &a) {
            Ok(_) => {
                assert!(f.is_satisfied(&a), "{a:?}");
                satisfying += 1;
            }
            Err(RealizeError::Unsatisfied(j)) => assert_eq!(f.first_unsatisfied(&a), Some(j)),
            Err(e) => panic!("{a:?}: {e}"),
        }
        // The drawing itself fails exactly when the assignment does.
        let p = draw(&r, &a).unwrap();
        assert_eq!(verify(&c, &p, Mode::Exact).passed(), f.is_satisfied(&a), "{a:?}");
    }
    assert_eq!(satisfying, 10);
}

#[test]
fn sample_all_false_names_clause_2() {
    let f = sample();
    let r = compile(&f, &compute_comb_layout(&f, None).unwrap()).unwrap();
    let e = realize(&r, &[false; 4]).unwrap_err();
    assert_eq!(e, RealizeError::Unsatisfied(1));
    assert!(e.to_string().contains("clause 2"));
}

#[test]
fn wrong_assignment_length() {
    let f = sample();
    let r = compile(&f, &compute_comb_layout(&f, None).unwrap()).unwrap();
    assert!(matches!(realize(&r, &[true; 3]), Err(RealizeError::Assignment { expected: 4, got: 3 })));
}

#[test]
fn random_formulas_realize_iff_satisfied() {
    for (f, l) in random_layoutable(11, 24, 6, 5) {
        let r = compile(&f, &l).unwrap();
        let c = r.caterpillar();
        for mask in 0..1u32 << f.num_vars {
            let a = assignment(mask, f.num_vars);
            let p = draw(&r, &a).unwrap();
            assert_eq!(
                verify(&c, &p, Mode::Exact).passed(),
                f.is_satisfied(&a),
                "{} {a:?}",
                f.to_dimacs()
            );
            assert_eq!(realize(&r, &a).is_ok(), f.is_satisfied(&a));
        }
    }
}

#[test]
fn compile_is_deterministic() {
    let f = sample();
    let l = compute_comb_layout(&f, None).unwrap();
    let a = compile(&f, &l).unwrap().to_json();
    let b = compile(&f, &l).unwrap().to_json();
    assert_eq!(a, b);
    let r = ReductionOutput::from_json(&a).unwrap();
    assert_eq!(r.to_json(), a);
}

#[test]
fn size_bound_and_monotonicity() {
    for n in 3..=10 {
        let mut prev = 0;
        for m in 1..=10 {
            let Some((f, sides)) = nested_family(n, m) else { break };
            let l = compute_comb_layout(&f, Some(&sides)).unwrap();
            let r = compile(&f, &l).unwrap();
            let nodes = r.stats.node_count;
            assert!(nodes <= size_bound(n, m), "n={n} m={m}: {nodes} > {}", size_bound(n, m));
            assert!(nodes >= prev, "n={n} m={m}: {nodes} < {prev}");
            prev = nodes;
        }
    }
}

#[test]
fn size_bound_holds_on_random_formulas() {
    for (f, l) in random_layoutable(5, 60, 10, 10) {
        let r = compile(&f, &l).unwrap();
        assert!(r.stats.node_count <= size_bound(f.num_vars, f.num_clauses()));
    }
}

#[test]
fn mismatched_layout_is_rejected() {
    let f = sample();
    let mut l = compute_comb_layout(&f, None).unwrap();
    l.sides.pop();
    assert!(matches!(compile(&f, &l), Err(ReductionError::LayoutMismatch(_))));
}

#[test]
fn too_many_connectors_is_a_capacity_error() {
    // Variable n occurs in every clause, 65 of them below the line.
    let n = MAX_CONNECTORS + 3;
    let (f, sides) = nested_family(n, 2 * MAX_CONNECTORS + 1).unwrap();
    assert_eq!(sides.iter().filter(|s| **s == Side::Below).count(), MAX_CONNECTORS + 1);
    let l = compute_comb_layout(&f, Some(&sides)).unwrap();
    assert!(matches!(compile(&f, &l), Err(ReductionError::Capacity(_))));
}

#[test]
fn plan_switches_follow_the_assignment() {
    let f = sample();
    let r = compile(&f, &compute_comb_layout(&f, None).unwrap()).unwrap();
    let on = r.switch_states(&SAMPLE_ASSIGNMENT);
    assert_eq!(on.get("x1"), Some(&true));
    assert_eq!(on.get("x2"), Some(&false));
    assert_eq!(r.stats.gadget_counts.get("clause"), Some(&3));
    assert_eq!(r.stats.gadget_counts.get("variable"), Some(&4));
}
