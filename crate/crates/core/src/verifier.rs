//! Decides whether a placement is a weak unit disk contact representation
//! of an embedded caterpillar.
//!
//! Checks run in order: every node placed, adjacent disks touch, no two
//! interiors overlap, and the counterclockwise order of neighbors around
//! each node is a cyclic shift of its stored rotation. Non-adjacent touching
//! pairs are allowed and only reported.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::caterpillar::{EmbeddedCaterpillar, IndexedEmbedding, NodeId};
use crate::hexlattice::{angular_cmp, squared_distance, LatticePoint, RealPoint, TOUCH};

pub const DEFAULT_EPS: f64 = 1e-9;

/// Exact lattice placement, serialized as `{"node": [u, v], ...}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Placement {
    pub positions: BTreeMap<NodeId, LatticePoint>,
}

impl Placement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: &str) -> Option<LatticePoint> {
        self.positions.get(id).copied()
    }

    pub fn insert(&mut self, id: impl Into<NodeId>, p: LatticePoint) {
        self.positions.insert(id.into(), p);
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn map_points(&self, f: impl Fn(LatticePoint) -> LatticePoint) -> Placement {
        Placement {
            positions: self.positions.iter().map(|(k, &p)| (k.clone(), f(p))).collect(),
        }
    }

    pub fn rotate60(&self, center: LatticePoint, k: i64) -> Placement {
        self.map_points(|p| p.rotate60(center, k))
    }

    pub fn translate(&self, by: LatticePoint) -> Placement {
        self.map_points(|p| p + by)
    }

    pub fn to_real(&self) -> RealPlacement {
        RealPlacement {
            positions: self
                .positions
                .iter()
                .map(|(k, p)| (k.clone(), p.to_cartesian()))
                .collect(),
        }
    }
}

/// Placement with real coordinates, for the tolerant verifier.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealPlacement {
    pub positions: BTreeMap<NodeId, RealPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Tolerant(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    MissingNode,
    AdjacencyGap,
    Overlap,
    RotationMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementViolation {
    pub kind: ViolationKind,
    pub nodes: Vec<NodeId>,
    /// Squared center distance for distance checks; 0 otherwise.
    pub measured: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub violations: Vec<PlacementViolation>,
    pub weak_contacts: Vec<(NodeId, NodeId)>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Two neighbors share a direction from the center, or (when both indices
/// are equal) one neighbor sits on the center itself.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("neighbors {0} and {1} lie in the same direction from the center")]
pub struct DegenerateDirection(pub usize, pub usize);

/// Sorts `neighbors` counterclockwise by direction from `center`, starting
/// at the positive x axis. Returns indices into `neighbors`.
pub fn neighbor_angles(center: LatticePoint, neighbors: &[LatticePoint]) -> Result<Vec<usize>, DegenerateDirection> {
    if let Some(k) = neighbors.iter().position(|&q| q == center) {
        return Err(DegenerateDirection(k, k));
    }
    let offs: Vec<LatticePoint> = neighbors.iter().map(|&q| q - center).collect();
    sort_ccw(&offs, |a, b| angular_cmp(*a, *b), |a, b| {
        // Same ray iff parallel and pointing the same way.
        a.u * b.v == a.v * b.u && a.u * b.u + 3 * a.v * b.v > 0
    })
}

/// Floating-point counterpart of [`neighbor_angles`].
pub fn neighbor_angles_real(center: RealPoint, neighbors: &[RealPoint]) -> Result<Vec<usize>, DegenerateDirection> {
    if let Some(k) = neighbors.iter().position(|&q| q.x == center.x && q.y == center.y) {
        return Err(DegenerateDirection(k, k));
    }
    let angles: Vec<f64> = neighbors
        .iter()
        .map(|q| {
            let a = (q.y - center.y).atan2(q.x - center.x);
            if a < 0.0 {
                a + std::f64::consts::TAU
            } else {
                a
            }
        })
        .collect();
    sort_ccw(&angles, |a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal), |a, b| a == b)
}

fn sort_ccw<T>(
    items: &[T],
    cmp: impl Fn(&T, &T) -> Ordering,
    same: impl Fn(&T, &T) -> bool,
) -> Result<Vec<usize>, DegenerateDirection> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.sort_by(|&a, &b| cmp(&items[a], &items[b]));
    for w in idx.windows(2) {
        if same(&items[w[0]], &items[w[1]]) {
            return Err(DegenerateDirection(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    Ok(idx)
}

/// True iff `b` is a cyclic rotation (not a reflection) of `a`.
pub fn is_cyclic_shift<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|s| (0..a.len()).all(|i| a[i] == b[(i + s) % a.len()]))
}

pub fn verify(c: &EmbeddedCaterpillar, p: &Placement, mode: Mode) -> VerificationReport {
    verify_embedding(&c.indexed(), p, mode)
}

pub fn verify_real(c: &EmbeddedCaterpillar, p: &RealPlacement, eps: f64) -> VerificationReport {
    verify_embedding_real(&c.indexed(), p, eps)
}

pub fn verify_embedding(emb: &IndexedEmbedding, p: &Placement, mode: Mode) -> VerificationReport {
    match mode {
        Mode::Exact => {
            let pos: Vec<Option<LatticePoint>> = emb.ids.iter().map(|id| p.get(id)).collect();
            ExactCheck { emb, pos: &pos }.run()
        }
        Mode::Tolerant(eps) => verify_embedding_real(emb, &p.to_real(), eps),
    }
}

pub fn verify_embedding_real(emb: &IndexedEmbedding, p: &RealPlacement, eps: f64) -> VerificationReport {
    let pos: Vec<Option<RealPoint>> = emb
        .ids
        .iter()
        .map(|id| p.positions.get(id).copied().filter(|q| q.is_finite()))
        .collect();
    TolerantCheck { emb, pos: &pos, eps }.run()
}

struct Collector<'a> {
    emb: &'a IndexedEmbedding,
    violations: Vec<PlacementViolation>,
    weak: Vec<(NodeId, NodeId)>,
}

impl<'a> Collector<'a> {
    fn push(&mut self, kind: ViolationKind, nodes: &[usize], measured: f64) {
        self.violations.push(PlacementViolation {
            kind,
            nodes: nodes.iter().map(|&i| self.emb.ids[i].clone()).collect(),
            measured,
        });
    }

    fn weak(&mut self, a: usize, b: usize) {
        let (x, y) = (&self.emb.ids[a], &self.emb.ids[b]);
        let pair = if x <= y { (x.clone(), y.clone()) } else { (y.clone(), x.clone()) };
        self.weak.push(pair);
    }

    fn missing(&mut self, placed: impl Fn(usize) -> bool) {
        for i in 0..self.emb.len() {
            if !placed(i) {
                self.push(ViolationKind::MissingNode, &[i], 0.0);
            }
        }
    }

    /// V4 given a ccw sorter for the placed neighbors of a node.
    fn rotations(&mut self, order: impl Fn(usize, &[usize]) -> Option<Result<Vec<usize>, DegenerateDirection>>) {
        for i in 0..self.emb.len() {
            let rot = &self.emb.rotation[i];
            if rot.len() < 2 {
                continue;
            }
            match order(i, rot) {
                None => {}
                Some(Ok(sorted)) => {
                    let geometric: Vec<usize> = sorted.iter().map(|&k| rot[k]).collect();
                    if !is_cyclic_shift(rot, &geometric) {
                        let mut nodes = vec![i];
                        nodes.extend(geometric);
                        self.push(ViolationKind::RotationMismatch, &nodes, 0.0);
                    }
                }
                Some(Err(DegenerateDirection(a, b))) => {
                    let mut nodes = vec![i, rot[a]];
                    if b != a {
                        nodes.push(rot[b]);
                    }
                    self.push(ViolationKind::RotationMismatch, &nodes, 0.0);
                }
            }
        }
    }

    fn finish(mut self) -> VerificationReport {
        self.weak.sort();
        self.weak.dedup();
        VerificationReport {
            verdict: if self.violations.is_empty() { Verdict::Pass } else { Verdict::Fail },
            violations: self.violations,
            weak_contacts: self.weak,
        }
    }
}

struct ExactCheck<'a> {
    emb: &'a IndexedEmbedding,
    pos: &'a [Option<LatticePoint>],
}

impl ExactCheck<'_> {
    fn run(self) -> VerificationReport {
        let mut out = Collector {
            emb: self.emb,
            violations: Vec::new(),
            weak: Vec::new(),
        };
        out.missing(|i| self.pos[i].is_some());

        for (a, b) in self.emb.edges() {
            if let (Some(p), Some(q)) = (self.pos[a], self.pos[b]) {
                let d = squared_distance(p, q);
                if d > TOUCH {
                    out.push(ViolationKind::AdjacencyGap, &[a, b], d as f64);
                }
            }
        }

        // On the lattice the only squared distance below 4 is 0, so overlap
        // means coincidence; touching pairs sit in the six neighbor cells.
        let mut cells: HashMap<LatticePoint, Vec<usize>> = HashMap::with_capacity(self.pos.len());
        for (i, p) in self.pos.iter().enumerate() {
            if let Some(p) = p {
                cells.entry(*p).or_default().push(i);
            }
        }
        let mut keys: Vec<&LatticePoint> = cells.keys().collect();
        keys.sort();
        for p in keys {
            let here = &cells[p];
            for x in 0..here.len() {
                for y in x + 1..here.len() {
                    out.push(ViolationKind::Overlap, &[here[x], here[y]], 0.0);
                }
            }
            // Off-lattice input (parity broken) can still come closer than 2.
            for du in -1..=1i64 {
                for dv in -1..=1i64 {
                    if (du, dv) == (0, 0) || (du + dv).rem_euclid(2) == 0 {
                        continue;
                    }
                    let q = LatticePoint { u: p.u + du, v: p.v + dv };
                    if q > *p {
                        if let Some(there) = cells.get(&q) {
                            for &a in here {
                                for &b in there {
                                    out.push(ViolationKind::Overlap, &[a, b], squared_distance(*p, q) as f64);
                                }
                            }
                        }
                    }
                }
            }
            for n in p.neighbors() {
                if n > *p {
                    if let Some(there) = cells.get(&n) {
                        for &a in here {
                            for &b in there {
                                if !self.emb.are_adjacent(a, b) {
                                    out.weak(a, b);
                                }
                            }
                        }
                    }
                }
            }
        }

        out.rotations(|i, rot| {
            let center = self.pos[i]?;
            let ns: Option<Vec<LatticePoint>> = rot.iter().map(|&j| self.pos[j]).collect();
            Some(neighbor_angles(center, &ns?))
        });
        out.finish()
    }
}

/// Bound on the floating-point error of `p.squared_distance(q)` near the
/// contact distance, so lattice input behaves at eps = 0 as it does exactly.
fn roundoff(p: RealPoint, q: RealPoint) -> f64 {
    let scale = p.x.abs().max(p.y.abs()).max(q.x.abs()).max(q.y.abs()).max(1.0);
    64.0 * f64::EPSILON * scale
}

struct TolerantCheck<'a> {
    emb: &'a IndexedEmbedding,
    pos: &'a [Option<RealPoint>],
    eps: f64,
}

impl TolerantCheck<'_> {
    fn run(self) -> VerificationReport {
        let eps = self.eps.max(0.0);
        let lo = (2.0 - eps).max(0.0).powi(2);
        let hi = (2.0 + eps).powi(2);
        let mut out = Collector {
            emb: self.emb,
            violations: Vec::new(),
            weak: Vec::new(),
        };
        out.missing(|i| self.pos[i].is_some());

        for (a, b) in self.emb.edges() {
            if let (Some(p), Some(q)) = (self.pos[a], self.pos[b]) {
                let d = p.squared_distance(q);
                if d > hi + roundoff(p, q) {
                    out.push(ViolationKind::AdjacencyGap, &[a, b], d);
                }
            }
        }

        // Uniform grid with cell side 2 + eps: any pair closer than that lies
        // in the same or an adjacent cell.
        let side = 2.0 + eps + 1e-6;
        let key = |p: RealPoint| ((p.x / side).floor() as i64, (p.y / side).floor() as i64);
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in self.pos.iter().enumerate() {
            if let Some(p) = p {
                grid.entry(key(*p)).or_default().push(i);
            }
        }
        for (i, p) in self.pos.iter().enumerate() {
            let Some(p) = p else { continue };
            let (cx, cy) = key(*p);
            for gx in cx - 1..=cx + 1 {
                for gy in cy - 1..=cy + 1 {
                    let Some(bucket) = grid.get(&(gx, gy)) else { continue };
                    for &j in bucket {
                        if j <= i {
                            continue;
                        }
                        let q = self.pos[j].unwrap();
                        let d = p.squared_distance(q);
                        let slack = roundoff(*p, q);
                        if d < lo - slack {
                            out.push(ViolationKind::Overlap, &[i, j], d);
                        } else if d <= hi + slack && !self.emb.are_adjacent(i, j) {
                            out.weak(i, j);
                        }
                    }
                }
            }
        }
        out.violations.sort_by(|a, b| (a.kind, &a.nodes).cmp(&(b.kind, &b.nodes)));

        out.rotations(|i, rot| {
            let center = self.pos[i]?;
            let ns: Option<Vec<RealPoint>> = rot.iter().map(|&j| self.pos[j]).collect();
            Some(neighbor_angles_real(center, &ns?))
        });
        out.finish()
    }
}
