mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use udcr::formula::compute_comb_layout;
use udcr::gadgets::library;
use udcr::hexlattice::{Direction, LatticePoint};
use udcr::reduction::{compile, realize};
use udcr::verifier::{verify, verify_embedding, Mode, Placement, ViolationKind};

/// Every stored gadget state with its embedding.
fn samples() -> Vec<(udcr::caterpillar::IndexedEmbedding, Placement)> {
    let mut out = Vec::new();
    for t in library() {
        let emb = t.embedding();
        for s in t.states.values() {
            out.push((emb.clone(), s.placement.clone()));
        }
    }
    out
}

fn perturb(p: &Placement, node: usize, d: Direction, steps: i64) -> Placement {
    let mut q = p.clone();
    let id = q.positions.keys().nth(node % q.len()).unwrap().clone();
    let mut at = q.get(&id).unwrap();
    for _ in 0..steps {
        at = at.step(d);
    }
    q.insert(id, at);
    q
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn exact_and_tolerant_agree_at_zero_eps(
        sample in 0usize..64,
        node in 0usize..10_000,
        d in 0i64..6,
        steps in 0i64..3,
    ) {
        let all = samples();
        let (emb, p) = &all[sample % all.len()];
        let q = perturb(p, node, Direction::new(d), steps);
        let exact = verify_embedding(emb, &q, Mode::Exact);
        let tolerant = verify_embedding(emb, &q, Mode::Tolerant(0.0));
        prop_assert_eq!(exact.passed(), tolerant.passed());
        for kind in [ViolationKind::MissingNode, ViolationKind::AdjacencyGap, ViolationKind::Overlap, ViolationKind::RotationMismatch] {
            prop_assert_eq!(exact.count(kind), tolerant.count(kind));
        }
    }

    #[test]
    fn verdict_is_rotation_equivariant(
        sample in 0usize..64,
        node in 0usize..10_000,
        d in 0i64..6,
        steps in 0i64..2,
        k in 0i64..6,
        cu in -5i64..5,
        cv in -5i64..5,
    ) {
        let all = samples();
        let (emb, p) = &all[sample % all.len()];
        let q = perturb(p, node, Direction::new(d), steps);
        let center = LatticePoint::new(2 * cu + cv.rem_euclid(2), cv);
        let r = q.rotate60(center, k);
        let a = verify_embedding(emb, &q, Mode::Exact);
        let b = verify_embedding(emb, &r, Mode::Exact);
        prop_assert_eq!(a.passed(), b.passed());
        prop_assert_eq!(a.violations.len(), b.violations.len());
        prop_assert_eq!(a.weak_contacts.len(), b.weak_contacts.len());
        let t = verify_embedding(emb, &r, Mode::Tolerant(1e-9));
        prop_assert_eq!(a.passed(), t.passed());
    }

    #[test]
    fn weak_contacts_never_fail(sample in 0usize..64) {
        let all = samples();
        let (emb, p) = &all[sample % all.len()];
        let r = verify_embedding(emb, p, Mode::Exact);
        prop_assert!(r.passed());
        for (a, b) in &r.weak_contacts {
            let (i, j) = (emb.index[a], emb.index[b]);
            prop_assert!(!emb.are_adjacent(i, j));
            prop_assert_eq!(udcr::hexlattice::squared_distance(p.get(a).unwrap(), p.get(b).unwrap()), 4);
        }
    }
}

#[test]
fn realized_sample_has_weak_contacts_and_passes() {
    let f = common::sample();
    let r = compile(&f, &compute_comb_layout(&f, None).unwrap()).unwrap();
    let p = realize(&r, &common::SAMPLE_ASSIGNMENT).unwrap();
    let report = verify(&r.caterpillar(), &p, Mode::Exact);
    assert!(report.passed());
    assert!(!report.weak_contacts.is_empty());
}

/// Fraction of single-disk moves (one lattice step in a random direction)
/// of a realized sample formula placement that the verifier rejects.
pub fn perturbation_detection_rate(trials: usize, seed: u64) -> f64 {
    let f = common::sample();
    let r = compile(&f, &compute_comb_layout(&f, None).unwrap()).unwrap();
    let c = r.caterpillar();
    let p = realize(&r, &common::SAMPLE_ASSIGNMENT).unwrap();
    let ids: Vec<String> = p.positions.keys().cloned().collect();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut detected = 0;
    for _ in 0..trials {
        let id = &ids[rng.gen_range(0..ids.len())];
        let mut q = p.clone();
        q.insert(id.clone(), p.get(id).unwrap().step(Direction::new(rng.gen_range(0..6))));
        if !verify(&c, &q, Mode::Exact).passed() {
            detected += 1;
        }
    }
    detected as f64 / trials as f64
}

#[test]
fn single_disk_perturbations_are_detected() {
    let rate = perturbation_detection_rate(1000, 3);
    eprintln!("detection rate {rate}");
    assert!(rate >= 0.99, "{rate}");
}
