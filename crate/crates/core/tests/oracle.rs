mod common;

use common::{fragments, sorted};
use udcr::oracle::{brute_force, search, Anchor, SearchSpec};
use udcr::verifier::{verify_embedding, Mode};

#[test]
fn search_equals_brute_force_on_small_fragments() {
    let frags = fragments();
    assert!(frags.len() >= 20, "only {} fragments", frags.len());
    for (name, spec) in frags {
        let s = search(&spec).unwrap();
        assert!(!s.truncated, "{name}");
        let b = brute_force(&spec).unwrap();
        assert_eq!(sorted(s.placements), sorted(b), "{name}");
    }
}

#[test]
fn search_results_verify() {
    let emb_check = |spec: &SearchSpec| {
        let emb = spec.embedding();
        for p in search(spec).unwrap().placements {
            assert!(verify_embedding(&emb, &p, Mode::Exact).passed());
            for q in p.positions.values() {
                assert!(spec.bounds.contains(*q));
            }
        }
    };
    for (_, spec) in fragments() {
        emb_check(&spec);
    }
}

#[test]
fn pins_and_smaller_boxes_never_add_solutions() {
    for (name, spec) in fragments().into_iter().step_by(3) {
        let base = search(&spec).unwrap().count();
        let mut shrunk = spec.clone();
        shrunk.bounds = spec.bounds.expand(-1, 0);
        if !shrunk.bounds.is_empty() {
            if let Ok(r) = search(&shrunk) {
                assert!(r.count() <= base, "{name}");
            }
        }
        let last = spec.caterpillar.backbone.last().unwrap().clone();
        if let Some(p) = search(&spec).unwrap().placements.first() {
            let pinned = spec.clone().with_pin(last.clone(), p.get(&last).unwrap());
            assert!(search(&pinned).unwrap().count() <= base, "{name}");
        }
    }
}

#[test]
fn position_anchor_counts_six_facings() {
    // A rigid path has a trivial stabilizer, so dropping the facing
    // multiplies the count by six.
    for (name, spec) in fragments().into_iter().filter(|(n, _)| n.starts_with("rigid_path_2")) {
        let with_facing = search(&spec).unwrap().count();
        let a = spec.anchor.clone().unwrap();
        let mut loose = spec.clone();
        loose.anchor = Some(Anchor::position(a.node, a.at));
        loose.bounds = spec.bounds.expand(12, 6);
        let mut wide = spec.clone();
        wide.bounds = loose.bounds;
        let w = search(&wide).unwrap().count();
        assert_eq!(search(&loose).unwrap().count(), 6 * w, "{name}");
        assert!(with_facing >= 1);
    }
}
