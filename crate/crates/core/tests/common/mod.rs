#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use udcr::formula::{compute_comb_layout, CnfFormula, CombLayout};
use udcr::gadgets::library;
use udcr::gadgets::program::PathProgram;
use udcr::hexlattice::{LatticeBox, Pose};
use udcr::oracle::{Anchor, SearchSpec};
use udcr::verifier::Placement;

/// (¬x1 ∨ x2 ∨ x3) ∧ (x1 ∨ x2 ∨ x4) ∧ (¬x2 ∨ x3 ∨ x4)
pub fn sample() -> CnfFormula {
    CnfFormula::from_triples(4, &[[-1, 2, 3], [1, 2, 4], [-2, 3, 4]]).unwrap()
}

pub const SAMPLE_DIMACS: &str = "c three clauses over four variables\np cnf 4 3\n-1 2 3 0\n1 2 4 0\n-2 3 4 0\n";

/// x1 = T, x2 = F, x3 = T, x4 = F
pub const SAMPLE_ASSIGNMENT: [bool; 4] = [true, false, true, false];

pub fn assignment(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// `count` random formulas that have a comb layout, with 3..=max_n
/// variables and 1..=max_m clauses.
pub fn random_layoutable(seed: u64, count: usize, max_n: usize, max_m: usize) -> Vec<(CnfFormula, CombLayout)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(3..=max_n);
        let m = rng.gen_range(1..=max_m);
        let mut triples = Vec::new();
        for _ in 0..m {
            let mut vs: Vec<i64> = Vec::new();
            while vs.len() < 3 {
                let v = rng.gen_range(1..=n as i64);
                if !vs.contains(&v) {
                    vs.push(v);
                }
            }
            for v in vs.iter_mut() {
                if rng.gen_bool(0.5) {
                    *v = -*v;
                }
            }
            triples.push([vs[0], vs[1], vs[2]]);
        }
        let f = CnfFormula::from_triples(n, &triples).unwrap();
        if let Ok(l) = compute_comb_layout(&f, None) {
            out.push((f, l));
        }
    }
    out
}

/// Largest fragment (nodes, stubs included) compared against brute force.
pub const MAX_NODES: usize = 15;

/// Backbone prefixes of every gadget part with at most [`MAX_NODES`] nodes,
/// each with an anchored box around its default drawing.
pub fn fragments() -> Vec<(String, SearchSpec)> {
    let mut out = Vec::new();
    for t in library() {
        let state = t.states.values().next().unwrap();
        for (k, part) in t.parts.iter().enumerate() {
            for len in 1..=part.nodes.len() {
                let prefix = PathProgram {
                    nodes: part.nodes[..len].to_vec(),
                    ..part.clone()
                };
                let cat = prefix.fragment().caterpillar;
                if cat.node_count() > MAX_NODES {
                    break;
                }
                let d = prefix.draw(state.part_poses[k], &state.switches).unwrap();
                let first = &cat.backbone[0];
                let at = d.placement.get(first).unwrap();
                let Some(nb) = cat.rotation[first].first() else { continue };
                let facing = at.direction_to(d.placement.get(nb).unwrap()).unwrap();
                let bounds = LatticeBox::around(d.placement.positions.values().copied())
                    .unwrap()
                    .expand(2, 1);
                let spec = SearchSpec::new(cat.clone(), bounds)
                    .with_anchor(Anchor::pose(first.clone(), Pose::new(at, facing)))
                    .with_limit(1_000_000);
                out.push((format!("{}[{k}] prefix {len}", t.id), spec));
            }
        }
    }
    out
}

pub fn sorted(mut v: Vec<Placement>) -> Vec<Placement> {
    v.sort_by(|a, b| a.positions.iter().cmp(b.positions.iter()));
    v
}
