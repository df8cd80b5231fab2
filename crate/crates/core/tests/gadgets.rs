use std::path::PathBuf;

use udcr::gadgets::*;
use udcr::hexlattice::{Direction, LatticePoint, Pose};
use udcr::oracle::{count_setups, count_states};
use udcr::verifier::{verify_embedding, Mode};

fn asset_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("assets/gadgets")
        .join(ASSET_VERSION)
}

#[test]
fn rigid_pieces_have_one_realization() {
    for k in 1..=4 {
        assert_eq!(count_states(&rigid_path(k).unwrap()), Ok(1), "path {k}");
    }
    assert_eq!(count_states(&rigid_turn(Turn::Left)), Ok(1));
    assert_eq!(count_states(&rigid_turn(Turn::Right)), Ok(1));
    assert_eq!(count_states(&rigidity_joint()), Ok(1));
}

#[test]
fn rigid_path_disk_counts() {
    assert_eq!(rigid_path(1).unwrap().disk_count(), 6);
    assert_eq!(rigid_path(2).unwrap().disk_count(), 9);
    assert!(rigid_path(0).is_err());
}

#[test]
fn weakened_joint_flexes() {
    let c = count_states(&rigidity_joint_weakened()).unwrap();
    assert!(c > 1);
    assert_eq!(c, 24);
}

#[test]
fn lock_is_unique_in_its_box() {
    assert_eq!(count_states(&two_path_lock()), Ok(1));
    assert_eq!(count_states(&two_path_lock_widened()), Ok(4));
}

#[test]
fn two_valued_gadgets() {
    let s = two_values_switch();
    assert_eq!(count_states(&s), Ok(2));
    assert_eq!(s.states.keys().collect::<Vec<_>>(), ["down", "up"]);
    let h = reduced_variable_hexagon();
    assert_eq!(count_states(&h), Ok(2));
    assert_eq!(h.states.keys().collect::<Vec<_>>(), ["ccw", "cw"]);
}

#[test]
fn clause_rejects_only_all_false() {
    let c = clause_gadget();
    let counts = count_setups(&c).unwrap();
    assert_eq!(counts.len(), 8);
    for combo in 0..8usize {
        let label = combination_label(combo & 4 != 0, combo & 2 != 0, combo & 1 != 0);
        assert_eq!(counts[&label], CLAUSE_COUNTS[combo], "{label}");
        assert_eq!(counts[&label] > 0, combo != 0, "{label}");
        assert_eq!(c.states.contains_key(&label), combo != 0);
    }
}

#[test]
fn stored_states_verify() {
    for t in library() {
        for (label, r) in t.verify_states() {
            assert!(r.passed(), "{} {label}: {:?}", t.id, r.violations);
        }
    }
}

#[test]
fn placement_is_rotation_equivariant() {
    let at = LatticePoint::new(7, -3);
    for t in [two_values_switch(), clause_gadget(), reduced_variable_hexagon()] {
        let emb = t.embedding();
        for label in t.states.keys() {
            for k in 0..6 {
                let pose = Pose::new(at, Direction::new(k));
                let p = t.place(label, pose).unwrap();
                assert!(verify_embedding(&emb, &p, Mode::Exact).passed(), "{} {label} {k}", t.id);
                let base = t.place(label, Pose::new(at, Direction::E)).unwrap();
                for (id, q) in &base.positions {
                    assert_eq!(p.get(id), Some(q.rotate60(at, k)));
                }
            }
        }
    }
}

#[test]
fn variable_hexagon_capacity() {
    assert!(matches!(variable_hexagon(0), Err(GadgetError::Capacity(_))));
    assert!(matches!(
        variable_hexagon(udcr::reduction::MAX_CONNECTORS + 1),
        Err(GadgetError::Capacity(_))
    ));
    let h = variable_hexagon(2).unwrap();
    assert_eq!(h.ports.len(), 2);
    for (label, r) in h.verify_states() {
        assert!(r.passed(), "{label}");
    }
    // Ports move by one disk between the two states.
    let a = h.port_pose("cw", "connector1", Pose::default()).unwrap();
    let b = h.port_pose("ccw", "connector1", Pose::default()).unwrap();
    assert_eq!((a.at.u - b.at.u).abs(), 2);
    assert_eq!(a.at.v, b.at.v);
}

#[test]
fn assets_match_constructors() {
    let dir = asset_dir();
    let update = std::env::var_os("UDCR_UPDATE_ASSETS").is_some();
    if update {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for t in library() {
        let path = dir.join(format!("{}.json", t.id));
        let json = t.to_json() + "\n";
        if update {
            std::fs::write(&path, &json).unwrap();
        }
        let stored = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(stored, json, "{} is stale", path.display());
        assert_eq!(GadgetTemplate::from_json(&stored).unwrap(), t);
    }
}
