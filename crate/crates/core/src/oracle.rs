//! Exhaustive backtracking search for every lattice placement of a small
//! embedded caterpillar.
//!
//! Nodes are placed group by group: when a node is expanded, all of its
//! still unplaced neighbors are assigned to free neighbor cells in an order
//! consistent with its rotation. Because the input is a tree, this reaches
//! every lattice realization exactly once.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::caterpillar::{EmbeddedCaterpillar, IndexedEmbedding, NodeId};
use crate::hexlattice::{Direction, LatticeBox, LatticePoint, Pose};
use crate::verifier::Placement;

pub const DEFAULT_LIMIT: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("infeasible anchor: {0}")]
    InfeasibleAnchor(String),
    #[error("search truncated after {0} solutions")]
    Truncated(usize),
    #[error("invalid search input: {0}")]
    Invalid(String),
}

/// Pins `node` at `at`; with a facing, also pins the node's first rotation
/// neighbor one step away in that direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    pub node: NodeId,
    pub at: LatticePoint,
    #[serde(default)]
    pub facing: Option<Direction>,
}

impl Anchor {
    pub fn pose(node: impl Into<NodeId>, pose: Pose) -> Self {
        Anchor {
            node: node.into(),
            at: pose.at,
            facing: Some(pose.facing),
        }
    }

    pub fn position(node: impl Into<NodeId>, at: LatticePoint) -> Self {
        Anchor {
            node: node.into(),
            at,
            facing: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchSpec {
    pub caterpillar: EmbeddedCaterpillar,
    /// Further trees searched jointly with the main one (they may touch but
    /// not overlap it). Used for gadgets made of several path pieces.
    #[serde(default)]
    pub companions: Vec<EmbeddedCaterpillar>,
    #[serde(default)]
    pub anchor: Option<Anchor>,
    pub bounds: LatticeBox,
    #[serde(default)]
    pub pinned: BTreeMap<NodeId, LatticePoint>,
    /// Travel-direction constraints: the first rotation neighbor of the node
    /// must lie in the given direction from it.
    #[serde(default)]
    pub headings: BTreeMap<NodeId, Direction>,
    #[serde(default = "default_limit")]
    pub limit: usize,
}

fn default_limit() -> usize {
    DEFAULT_LIMIT
}

impl SearchSpec {
    pub fn new(caterpillar: EmbeddedCaterpillar, bounds: LatticeBox) -> Self {
        SearchSpec {
            caterpillar,
            companions: Vec::new(),
            anchor: None,
            bounds,
            pinned: BTreeMap::new(),
            headings: BTreeMap::new(),
            limit: DEFAULT_LIMIT,
        }
    }

    pub fn with_anchor(mut self, anchor: Anchor) -> Self {
        self.anchor = Some(anchor);
        self
    }

    pub fn with_pin(mut self, node: impl Into<NodeId>, at: LatticePoint) -> Self {
        self.pinned.insert(node.into(), at);
        self
    }

    pub fn with_heading(mut self, node: impl Into<NodeId>, d: Direction) -> Self {
        self.headings.insert(node.into(), d);
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn embedding(&self) -> IndexedEmbedding {
        let mut all = vec![self.caterpillar.clone()];
        all.extend(self.companions.iter().cloned());
        IndexedEmbedding::from_caterpillars(&all)
    }
}

/// A search spec without its caterpillar: the file format of the CLI's
/// `search` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConstraints {
    #[serde(default)]
    pub companions: Vec<EmbeddedCaterpillar>,
    #[serde(default)]
    pub anchor: Option<Anchor>,
    pub bounds: LatticeBox,
    #[serde(default)]
    pub pinned: BTreeMap<NodeId, LatticePoint>,
    #[serde(default)]
    pub headings: BTreeMap<NodeId, Direction>,
    #[serde(default = "default_limit")]
    pub limit: usize,
}

impl SearchConstraints {
    pub fn into_spec(self, caterpillar: EmbeddedCaterpillar) -> SearchSpec {
        SearchSpec {
            caterpillar,
            companions: self.companions,
            anchor: self.anchor,
            bounds: self.bounds,
            pinned: self.pinned,
            headings: self.headings,
            limit: self.limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub placements: Vec<Placement>,
    pub truncated: bool,
}

impl SearchResult {
    pub fn count(&self) -> usize {
        self.placements.len()
    }
}

pub fn search(spec: &SearchSpec) -> Result<SearchResult, OracleError> {
    let emb = spec.embedding();
    let mut pins: Vec<Option<LatticePoint>> = vec![None; emb.len()];
    for (id, &p) in &spec.pinned {
        let &i = emb
            .index
            .get(id)
            .ok_or_else(|| OracleError::Invalid(format!("pin on unknown node {id}")))?;
        if !spec.bounds.contains(p) || !p.is_valid() {
            return Err(OracleError::InfeasibleAnchor(format!("pin {id} at {p} outside bounds")));
        }
        pins[i] = Some(p);
    }
    let mut heading: Vec<Option<usize>> = vec![None; emb.len()];
    for (id, d) in &spec.headings {
        let &i = emb
            .index
            .get(id)
            .ok_or_else(|| OracleError::Invalid(format!("heading on unknown node {id}")))?;
        if emb.rotation[i].is_empty() {
            return Err(OracleError::Invalid(format!("heading on isolated node {id}")));
        }
        heading[i] = Some(d.index());
    }
    let mut roots: Vec<usize> = Vec::new();
    if let Some(a) = &spec.anchor {
        let &i = emb
            .index
            .get(&a.node)
            .ok_or_else(|| OracleError::Invalid(format!("anchor on unknown node {}", a.node)))?;
        if !spec.bounds.contains(a.at) || !a.at.is_valid() {
            return Err(OracleError::InfeasibleAnchor(format!("anchor at {} outside bounds", a.at)));
        }
        if pins[i].is_some_and(|p| p != a.at) {
            return Err(OracleError::InfeasibleAnchor("anchor conflicts with a pin".into()));
        }
        pins[i] = Some(a.at);
        if let Some(f) = a.facing {
            let &first = emb.rotation[i]
                .first()
                .ok_or_else(|| OracleError::InfeasibleAnchor("anchored node has no neighbors".into()))?;
            let q = a.at.step(f);
            if !spec.bounds.contains(q) || pins[first].is_some_and(|p| p != q) {
                return Err(OracleError::InfeasibleAnchor("anchor facing leaves the bounds".into()));
            }
            pins[first] = Some(q);
        }
        roots.push(i);
    }
    if spec.bounds.is_empty() {
        return Err(OracleError::InfeasibleAnchor("empty bounds".into()));
    }

    // One root per connected component: the anchor, else a pinned node,
    // else the first backbone node (which then ranges over the bounds).
    let mut component = vec![usize::MAX; emb.len()];
    let mut order: Vec<usize> = Vec::new();
    let mut comp_roots: Vec<usize> = Vec::new();
    for bb in &emb.backbones {
        let Some(&start) = bb.first() else { continue };
        if component[start] != usize::MAX {
            continue;
        }
        let cid = comp_roots.len();
        let mut members = Vec::new();
        let mut stack = vec![start];
        component[start] = cid;
        while let Some(x) = stack.pop() {
            members.push(x);
            for &y in &emb.rotation[x] {
                if component[y] == usize::MAX {
                    component[y] = cid;
                    stack.push(y);
                }
            }
        }
        members.sort();
        let root = roots
            .iter()
            .copied()
            .find(|r| component[*r] == cid)
            .or_else(|| members.iter().copied().find(|&m| pins[m].is_some()))
            .unwrap_or(start);
        comp_roots.push(root);
        // BFS expansion order from the root.
        let mut seen = vec![false; 0];
        seen.resize(emb.len(), false);
        let mut q = VecDeque::from([root]);
        seen[root] = true;
        while let Some(x) = q.pop_front() {
            order.push(x);
            for &y in &emb.rotation[x] {
                if !seen[y] {
                    seen[y] = true;
                    q.push_back(y);
                }
            }
        }
    }
    if order.len() != emb.len() {
        return Err(OracleError::Invalid("nodes outside any backbone component".into()));
    }

    let mut reserved: HashMap<LatticePoint, usize> = HashMap::new();
    for (i, p) in pins.iter().enumerate() {
        if let Some(p) = p {
            if let Some(other) = reserved.insert(*p, i) {
                return Err(OracleError::InfeasibleAnchor(format!(
                    "{} and {} pinned to the same cell",
                    emb.ids[other], emb.ids[i]
                )));
            }
        }
    }

    let mut s = Search {
        emb: &emb,
        bounds: spec.bounds,
        pins,
        heading,
        reserved,
        is_root: {
            let mut r = vec![false; emb.len()];
            for &x in &comp_roots {
                r[x] = true;
            }
            r
        },
        pos: vec![None; emb.len()],
        occupied: HashMap::new(),
        order,
        limit: spec.limit,
        solutions: Vec::new(),
        truncated: false,
    };
    s.step(0);

    let mut sols = std::mem::take(&mut s.solutions);
    sols.sort();
    let placements = sols
        .into_iter()
        .map(|pts| Placement {
            positions: emb.ids.iter().cloned().zip(pts).collect(),
        })
        .collect();
    Ok(SearchResult {
        placements,
        truncated: s.truncated,
    })
}

struct Search<'a> {
    emb: &'a IndexedEmbedding,
    bounds: LatticeBox,
    pins: Vec<Option<LatticePoint>>,
    heading: Vec<Option<usize>>,
    reserved: HashMap<LatticePoint, usize>,
    is_root: Vec<bool>,
    pos: Vec<Option<LatticePoint>>,
    occupied: HashMap<LatticePoint, usize>,
    order: Vec<usize>,
    limit: usize,
    solutions: Vec<Vec<LatticePoint>>,
    truncated: bool,
}

impl Search<'_> {
    fn can_occupy(&self, node: usize, cell: LatticePoint) -> bool {
        self.bounds.contains(cell)
            && !self.occupied.contains_key(&cell)
            && self.reserved.get(&cell).is_none_or(|&r| r == node)
            && self.pins[node].is_none_or(|p| p == cell)
    }

    fn put(&mut self, node: usize, cell: LatticePoint) {
        self.pos[node] = Some(cell);
        self.occupied.insert(cell, node);
    }

    fn take(&mut self, node: usize) {
        if let Some(c) = self.pos[node].take() {
            self.occupied.remove(&c);
        }
    }

    fn step(&mut self, k: usize) {
        if self.truncated {
            return;
        }
        if k == self.order.len() {
            if self.solutions.len() >= self.limit {
                self.truncated = true;
                return;
            }
            self.solutions.push(self.pos.iter().map(|p| p.unwrap()).collect());
            return;
        }
        let x = self.order[k];
        if self.pos[x].is_none() {
            // Only component roots reach here unplaced.
            debug_assert!(self.is_root[x]);
            let cells: Vec<LatticePoint> = match self.pins[x] {
                Some(p) => vec![p],
                None => cells_in(self.bounds),
            };
            for c in cells {
                if self.can_occupy(x, c) {
                    self.put(x, c);
                    self.expand(k, x);
                    self.take(x);
                }
            }
        } else {
            self.expand(k, x);
        }
    }

    /// Places all unplaced neighbors of `x` consistently with its rotation.
    fn expand(&mut self, k: usize, x: usize) {
        let rot = self.emb.rotation[x].clone();
        let center = self.pos[x].unwrap();
        let d = rot.len();
        if d == 0 {
            self.step(k + 1);
            return;
        }
        // Fixed direction of each already placed neighbor.
        let mut fixed: Vec<Option<usize>> = Vec::with_capacity(d);
        for &n in &rot {
            match self.pos[n] {
                Some(p) => match center.direction_to(p) {
                    Some(dir) => fixed.push(Some(dir.index())),
                    None => return,
                },
                None => fixed.push(None),
            }
        }
        if d > 6 {
            return;
        }
        let bases: Vec<usize> = match (fixed[0], self.heading[x]) {
            (Some(b), Some(h)) if b != h => return,
            (Some(b), _) => vec![b],
            (None, Some(h)) => vec![h],
            (None, None) => (0..6).collect(),
        };
        let mut dirs = vec![0usize; d];
        for base in bases {
            dirs[0] = base;
            self.assign(k, x, center, &rot, &fixed, &mut dirs, 1, 0);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &mut self,
        k: usize,
        x: usize,
        center: LatticePoint,
        rot: &[usize],
        fixed: &[Option<usize>],
        dirs: &mut Vec<usize>,
        i: usize,
        prev_off: usize,
    ) {
        if self.truncated {
            return;
        }
        let d = rot.len();
        if i == d {
            // Place the unplaced neighbors, recurse, then undo.
            let mut placed = Vec::new();
            let mut ok = true;
            for (j, &n) in rot.iter().enumerate() {
                if fixed[j].is_none() {
                    let cell = center.step(Direction::ALL[dirs[j]]);
                    if self.can_occupy(n, cell) {
                        self.put(n, cell);
                        placed.push(n);
                    } else {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.step(k + 1);
            }
            for n in placed {
                self.take(n);
            }
            return;
        }
        let base = dirs[0];
        // Leave room for the remaining d - i - 1 neighbors.
        let max_off = 6 - (d - i);
        for off in prev_off + 1..=max_off {
            let dir = (base + off) % 6;
            if let Some(f) = fixed[i] {
                if f != dir {
                    continue;
                }
            }
            dirs[i] = dir;
            self.assign(k, x, center, rot, fixed, dirs, i + 1, off);
        }
    }
}

fn cells_in(b: LatticeBox) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for v in b.min.v..=b.max.v {
        for u in b.min.u..=b.max.u {
            let p = LatticePoint { u, v };
            if p.is_valid() {
                out.push(p);
            }
        }
    }
    out
}

/// Independent brute-force enumerator used to cross-check [`search`]: nodes
/// are placed one at a time in backbone order, leaves right after their
/// backbone node, each in one of the six cells around its tree parent;
/// only injectivity, bounds and pins prune partial placements, and complete
/// ones are kept iff the exact verifier passes them.
pub fn brute_force(spec: &SearchSpec) -> Result<Vec<Placement>, OracleError> {
    use crate::verifier::{verify_embedding, Mode};

    let emb = spec.embedding();
    let mut pins: BTreeMap<usize, LatticePoint> = BTreeMap::new();
    for (id, p) in &spec.pinned {
        let i = *emb
            .index
            .get(id)
            .ok_or_else(|| OracleError::Invalid(format!("pin on unknown node {id}")))?;
        pins.insert(i, *p);
    }
    if let Some(a) = &spec.anchor {
        let i = *emb
            .index
            .get(&a.node)
            .ok_or_else(|| OracleError::Invalid(format!("anchor on unknown node {}", a.node)))?;
        pins.insert(i, a.at);
        if let Some(f) = a.facing {
            if let Some(&first) = emb.rotation[i].first() {
                pins.insert(first, a.at.step(f));
            }
        }
    }

    // Placement order and tree parent of each node in that order.
    let mut order: Vec<(usize, Option<usize>)> = Vec::new();
    for bb in &emb.backbones {
        for (j, &b) in bb.iter().enumerate() {
            order.push((b, if j == 0 { None } else { Some(bb[j - 1]) }));
            for &n in &emb.rotation[b] {
                if emb.parent[n] == Some(b) {
                    order.push((n, Some(b)));
                }
            }
        }
    }

    let mut pos: Vec<Option<LatticePoint>> = vec![None; emb.len()];
    let mut used: HashMap<LatticePoint, usize> = HashMap::new();
    let mut out = Vec::new();

    fn rec(
        k: usize,
        order: &[(usize, Option<usize>)],
        spec: &SearchSpec,
        emb: &IndexedEmbedding,
        pins: &BTreeMap<usize, LatticePoint>,
        pos: &mut Vec<Option<LatticePoint>>,
        used: &mut HashMap<LatticePoint, usize>,
        out: &mut Vec<Placement>,
    ) {
        if k == order.len() {
            let p = Placement {
                positions: emb.ids.iter().cloned().zip(pos.iter().map(|p| p.unwrap())).collect(),
            };
            let headings_ok = spec.headings.iter().all(|(id, d)| {
                let i = emb.index[id];
                let first = emb.rotation[i][0];
                pos[i].unwrap().step(*d) == pos[first].unwrap()
            });
            if headings_ok && verify_embedding(emb, &p, Mode::Exact).passed() {
                out.push(p);
            }
            return;
        }
        let (n, parent) = order[k];
        let candidates: Vec<LatticePoint> = match parent {
            Some(par) => pos[par].unwrap().neighbors().to_vec(),
            None => cells_in(spec.bounds),
        };
        for c in candidates {
            if !spec.bounds.contains(c) || used.contains_key(&c) {
                continue;
            }
            if pins.get(&n).is_some_and(|&p| p != c) {
                continue;
            }
            if pins.iter().any(|(&m, &p)| p == c && m != n) {
                continue;
            }
            pos[n] = Some(c);
            used.insert(c, n);
            rec(k + 1, order, spec, emb, pins, pos, used, out);
            used.remove(&c);
            pos[n] = None;
        }
    }
    rec(0, &order, spec, &emb, &pins, &mut pos, &mut used, &mut out);
    out.sort_by(|a, b| {
        let ka: Vec<LatticePoint> = emb.ids.iter().map(|id| a.positions[id]).collect();
        let kb: Vec<LatticePoint> = emb.ids.iter().map(|id| b.positions[id]).collect();
        ka.cmp(&kb)
    });
    Ok(out)
}


/// Number of realizations of a gadget template under one of its setups.
pub fn count_setup(
    template: &crate::gadgets::GadgetTemplate,
    setup: &str,
    limit: usize,
) -> Result<usize, OracleError> {
    let spec = template
        .search_spec(setup, limit)
        .ok_or_else(|| OracleError::Invalid(format!("{} has no setup {setup}", template.id)))?;
    let r = search(&spec)?;
    if r.truncated {
        return Err(OracleError::Truncated(r.count()));
    }
    Ok(r.count())
}

/// Realization count of a template under its `default` setup.
pub fn count_states(template: &crate::gadgets::GadgetTemplate) -> Result<usize, OracleError> {
    count_setup(template, "default", DEFAULT_LIMIT)
}

/// Realization counts for every setup of a template.
pub fn count_setups(
    template: &crate::gadgets::GadgetTemplate,
) -> Result<BTreeMap<String, usize>, OracleError> {
    template
        .setups
        .keys()
        .map(|k| Ok((k.clone(), count_setup(template, k, DEFAULT_LIMIT)?)))
        .collect()
}
