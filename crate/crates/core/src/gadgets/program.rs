//! Path programs: a backbone described node by node, from which both the
//! embedded caterpillar and its lattice placements are generated.
//!
//! Each backbone node lists its neighbors other than its predecessor in
//! counterclockwise order, together with the cell offset of each one,
//! counted counterclockwise from the cell of the predecessor (1..=5). The
//! rotation at every node is therefore the same in every drawing; only the
//! offsets change with switch states.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::caterpillar::{CaterpillarFragment, EmbeddedCaterpillar, NodeId, Port};
use crate::hexlattice::{Direction, LatticePoint, Pose};
use crate::verifier::Placement;

use super::GadgetError;

/// Switch settings; keys that are absent read as `false`.
pub type SwitchStates = BTreeMap<String, bool>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Item {
    Leaf(String),
    Next,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Offsets {
    Fixed(Vec<u8>),
    Switched { key: String, off: Vec<u8>, on: Vec<u8> },
    /// One of several offset lists, indexed by the binary number whose bit
    /// `i` is the state of `keys[i]`.
    Select { keys: Vec<String>, options: Vec<Vec<u8>> },
}

impl Offsets {
    pub fn resolve(&self, states: &SwitchStates) -> &[u8] {
        match self {
            Offsets::Fixed(v) => v,
            Offsets::Switched { key, off, on } => {
                if states.get(key).copied().unwrap_or(false) {
                    on
                } else {
                    off
                }
            }
            Offsets::Select { keys, options } => {
                let i = keys
                    .iter()
                    .enumerate()
                    .filter(|(_, k)| states.get(*k).copied().unwrap_or(false))
                    .fold(0usize, |acc, (b, _)| acc | (1 << b));
                &options[i.min(options.len() - 1)]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: NodeId,
    pub items: Vec<Item>,
    pub offsets: Offsets,
    /// Gadget role, used for rendering.
    pub role: String,
}

impl NodeSpec {
    pub fn leaf_count(&self) -> usize {
        self.items.iter().filter(|i| matches!(i, Item::Leaf(_))).count()
    }

    pub fn has_next(&self) -> bool {
        self.items.contains(&Item::Next)
    }

    pub fn leaf_id(&self, name: &str) -> NodeId {
        format!("{}/{}", self.name, name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Start {
    /// The first node has no predecessor; its offsets count from the cell
    /// behind the start pose and may use offset 0.
    Free,
    /// The first node's predecessor is an entry stub one step behind it.
    Entry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathProgram {
    pub prefix: String,
    pub start: Start,
    pub nodes: Vec<NodeSpec>,
}

/// Result of drawing a program at a pose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Drawing {
    pub placement: Placement,
    /// Position and incoming direction of every backbone node.
    pub backbone: Vec<Pose>,
    /// Where a spliced successor's first node would go, if the last node
    /// has a `Next` item.
    pub exit: Option<Pose>,
}

impl PathProgram {
    pub fn new(prefix: impl Into<String>, start: Start) -> Self {
        PathProgram {
            prefix: prefix.into(),
            start,
            nodes: Vec::new(),
        }
    }

    pub fn entry_stub(&self) -> NodeId {
        format!("{}/entry", self.prefix)
    }

    pub fn exit_stub(&self) -> NodeId {
        format!("{}/exit", self.prefix)
    }

    pub fn has_exit(&self) -> bool {
        self.nodes.last().is_some_and(NodeSpec::has_next)
    }

    /// Appends `other`, whose first node continues from this program's last
    /// node. `other` must start with an entry.
    pub fn append(&mut self, other: PathProgram) -> Result<(), GadgetError> {
        if other.start != Start::Entry {
            return Err(GadgetError::Program(format!("{} does not start with an entry", other.prefix)));
        }
        if !self.nodes.is_empty() && !self.has_exit() {
            return Err(GadgetError::Program(format!("{} has no exit", self.prefix)));
        }
        self.nodes.extend(other.nodes);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.iter().map(|n| 1 + n.leaf_count()).sum()
    }

    pub fn switch_keys(&self) -> Vec<String> {
        let mut keys: Vec<String> = self
            .nodes
            .iter()
            .flat_map(|n| match &n.offsets {
                Offsets::Switched { key, .. } => vec![key.clone()],
                Offsets::Select { keys, .. } => keys.clone(),
                Offsets::Fixed(_) => vec![],
            })
            .collect();
        keys.sort();
        keys.dedup();
        keys
    }

    /// Rotation of node `k`: predecessor first (if any), then its items.
    fn rotation_of(&self, k: usize) -> Vec<NodeId> {
        let node = &self.nodes[k];
        let mut rot = Vec::with_capacity(node.items.len() + 1);
        if k > 0 {
            rot.push(self.nodes[k - 1].name.clone());
        } else if self.start == Start::Entry {
            rot.push(self.entry_stub());
        }
        for it in &node.items {
            rot.push(match it {
                Item::Leaf(l) => node.leaf_id(l),
                Item::Next => {
                    if k + 1 < self.nodes.len() {
                        self.nodes[k + 1].name.clone()
                    } else {
                        self.exit_stub()
                    }
                }
            });
        }
        rot
    }

    /// The caterpillar described by the program, with port stubs.
    pub fn fragment(&self) -> CaterpillarFragment {
        let mut c = EmbeddedCaterpillar::default();
        for (k, node) in self.nodes.iter().enumerate() {
            c.backbone.push(node.name.clone());
            let mut leaves: Vec<NodeId> = Vec::new();
            if k == 0 && self.start == Start::Entry {
                leaves.push(self.entry_stub());
            }
            for it in &node.items {
                match it {
                    Item::Leaf(l) => leaves.push(node.leaf_id(l)),
                    Item::Next if k + 1 == self.nodes.len() => leaves.push(self.exit_stub()),
                    Item::Next => {}
                }
            }
            for l in &leaves {
                c.rotation.insert(l.clone(), vec![node.name.clone()]);
            }
            if !leaves.is_empty() {
                c.leaves.insert(node.name.clone(), leaves);
            }
            c.rotation.insert(node.name.clone(), self.rotation_of(k));
        }
        let first = self.nodes.first().map(|n| n.name.clone());
        let last = self.nodes.last().map(|n| n.name.clone());
        let entry = match (self.start, first) {
            (Start::Entry, Some(node)) => Some(Port {
                node,
                stub: self.entry_stub(),
            }),
            _ => None,
        };
        let exit = match (self.has_exit(), last) {
            (true, Some(node)) => Some(Port {
                node,
                stub: self.exit_stub(),
            }),
            _ => None,
        };
        CaterpillarFragment::new(c, entry, exit)
    }

    /// Gadget role of every node, leaves and stubs included.
    pub fn roles(&self) -> BTreeMap<NodeId, String> {
        let mut out = BTreeMap::new();
        for node in &self.nodes {
            out.insert(node.name.clone(), node.role.clone());
            for it in &node.items {
                if let Item::Leaf(l) = it {
                    out.insert(node.leaf_id(l), node.role.clone());
                }
            }
        }
        if let (Some(first), Start::Entry) = (self.nodes.first(), self.start) {
            out.insert(self.entry_stub(), first.role.clone());
        }
        if let (Some(last), true) = (self.nodes.last(), self.has_exit()) {
            out.insert(self.exit_stub(), last.role.clone());
        }
        out
    }

    /// The caterpillar without port stubs.
    pub fn caterpillar(&self) -> EmbeddedCaterpillar {
        self.fragment().into_closed()
    }

    /// Draws the program with its first node at `pose.at`, entered in
    /// direction `pose.facing`. Stubs are included in the placement.
    pub fn draw(&self, pose: Pose, states: &SwitchStates) -> Result<Drawing, GadgetError> {
        let mut placement = Placement::new();
        let mut backbone = Vec::with_capacity(self.nodes.len());
        let mut at = pose.at;
        let mut facing = pose.facing;
        let mut exit = None;
        if self.start == Start::Entry {
            placement.insert(self.entry_stub(), at.step(facing.opposite()));
        }
        for (k, node) in self.nodes.iter().enumerate() {
            placement.insert(node.name.clone(), at);
            backbone.push(Pose::new(at, facing));
            let offs = node.offsets.resolve(states);
            if offs.len() != node.items.len() {
                return Err(GadgetError::Program(format!(
                    "{}: {} offsets for {} items",
                    node.name,
                    offs.len(),
                    node.items.len()
                )));
            }
            let min = if k == 0 && self.start == Start::Free { 0 } else { 1 };
            let mut prev: Option<u8> = None;
            for &o in offs {
                if o < min || o > 5 || prev.is_some_and(|p| o <= p) {
                    return Err(GadgetError::Program(format!("{}: bad offsets {offs:?}", node.name)));
                }
                prev = Some(o);
            }
            let back = facing.opposite();
            let mut next = None;
            for (it, &o) in node.items.iter().zip(offs) {
                let dir = back.rotate(o as i64);
                let cell = at.step(dir);
                match it {
                    Item::Leaf(l) => placement.insert(node.leaf_id(l), cell),
                    Item::Next => next = Some((cell, dir)),
                }
            }
            match next {
                Some((cell, dir)) => {
                    if k + 1 == self.nodes.len() {
                        placement.insert(self.exit_stub(), cell);
                        exit = Some(Pose::new(cell, dir));
                    }
                    at = cell;
                    facing = dir;
                }
                None if k + 1 < self.nodes.len() => {
                    return Err(GadgetError::Program(format!("{} has no successor", node.name)));
                }
                None => {}
            }
        }
        Ok(Drawing {
            placement,
            backbone,
            exit,
        })
    }
}

/// Incremental construction of path programs from a small vocabulary of
/// steps.
#[derive(Clone, Debug)]
pub struct Builder {
    program: PathProgram,
    role: String,
    counter: usize,
}

pub const STRAIGHT: [u8; 3] = [2, 3, 4];

impl Builder {
    pub fn new(prefix: impl Into<String>, start: Start) -> Self {
        Builder {
            program: PathProgram::new(prefix, start),
            role: "rigid".into(),
            counter: 0,
        }
    }

    pub fn role(&mut self, role: &str) -> &mut Self {
        self.role = role.to_string();
        self
    }

    fn fresh(&mut self) -> NodeId {
        let name = format!("{}/b{}", self.program.prefix, self.counter);
        self.counter += 1;
        name
    }

    pub fn push(&mut self, items: Vec<Item>, offsets: Offsets) -> &mut Self {
        let name = self.fresh();
        let role = self.role.clone();
        self.program.nodes.push(NodeSpec {
            name,
            items,
            offsets,
            role,
        });
        self
    }

    /// Pushes a node whose items are given as a pattern string: `n` for the
    /// successor, any other letter for a leaf.
    pub fn node(&mut self, pattern: &str, offsets: &[u8]) -> &mut Self {
        let items = pattern_items(pattern);
        self.push(items, Offsets::Fixed(offsets.to_vec()))
    }

    pub fn switched(&mut self, pattern: &str, key: &str, off: &[u8], on: &[u8]) -> &mut Self {
        let items = pattern_items(pattern);
        self.push(
            items,
            Offsets::Switched {
                key: key.to_string(),
                off: off.to_vec(),
                on: on.to_vec(),
            },
        )
    }

    /// The rigid start: five leaves and the successor straight ahead.
    pub fn start_star(&mut self) -> &mut Self {
        self.node("abcnde", &[0, 1, 2, 3, 4, 5])
    }

    /// `n` nodes of the three-wide rigid strip going straight.
    pub fn straight(&mut self, n: usize) -> &mut Self {
        for _ in 0..n {
            self.node("anb", &STRAIGHT);
        }
        self
    }

    /// Rigid 60° turn to the left.
    pub fn left(&mut self) -> &mut Self {
        self.node("abn", &STRAIGHT)
    }

    /// Rigid 60° turn to the right.
    pub fn right(&mut self) -> &mut Self {
        self.node("nab", &STRAIGHT)
    }

    /// Follows a string of `s`, `l`, `r` steps.
    pub fn trace(&mut self, steps: &str) -> &mut Self {
        for c in steps.chars() {
            match c {
                's' => self.straight(1),
                'l' => self.left(),
                'r' => self.right(),
                _ => self,
            };
        }
        self
    }

    /// Follows a step code: `s`, `l`, `r` as in [`Builder::trace`], and
    /// `(d0 d1 ...)` for a node whose successor sits at offset `d0` and whose
    /// leaves sit at the remaining offsets.
    pub fn code(&mut self, code: &str) -> Result<&mut Self, GadgetError> {
        let mut rest = code;
        while let Some(c) = rest.chars().next() {
            if c == '(' {
                let end = rest
                    .find(')')
                    .ok_or_else(|| GadgetError::Program(format!("unclosed node in `{code}`")))?;
                let digits: Vec<u8> = rest[1..end]
                    .chars()
                    .map(|d| d.to_digit(10).map(|x| x as u8))
                    .collect::<Option<_>>()
                    .ok_or_else(|| GadgetError::Program(format!("bad node in `{code}`")))?;
                let (&next, _) = digits
                    .split_first()
                    .ok_or_else(|| GadgetError::Program(format!("empty node in `{code}`")))?;
                let mut offs = digits.clone();
                offs.sort_unstable();
                let pattern: String = offs
                    .iter()
                    .enumerate()
                    .map(|(k, &o)| if o == next { 'n' } else { (b'a' + k as u8) as char })
                    .collect();
                self.node(&pattern, &offs);
                rest = &rest[end + 1..];
            } else {
                if !"slr".contains(c) {
                    return Err(GadgetError::Program(format!("bad step `{c}` in `{code}`")));
                }
                self.trace(&c.to_string());
                rest = &rest[1..];
            }
        }
        Ok(self)
    }

    /// Two-values switch: the pivot gives its left leaf to the following
    /// node. With `key` on, everything after the second node is shifted by
    /// the step 120° counterclockwise from the incoming direction.
    pub fn switch_left(&mut self, key: &str) -> &mut Self {
        let saved = std::mem::replace(&mut self.role, "switch".into());
        self.switched("an", key, &[2, 3], &[2, 4]);
        self.switched("anbc", key, &[2, 3, 4, 5], &[1, 2, 3, 4]);
        self.role = saved;
        self
    }

    /// Mirror image of [`Builder::switch_left`]: shift 120° clockwise.
    pub fn switch_right(&mut self, key: &str) -> &mut Self {
        let saved = std::mem::replace(&mut self.role, "switch".into());
        self.switched("na", key, &[3, 4], &[2, 4]);
        self.switched("cbna", key, &[1, 2, 3, 4], &[2, 3, 4, 5]);
        self.role = saved;
        self
    }

    /// Ends the path with a node holding only its two forward leaves.
    pub fn cap(&mut self) -> &mut Self {
        self.node("ab", &[2, 4])
    }

    pub fn finish(&self) -> PathProgram {
        self.program.clone()
    }

    pub fn program(&self) -> &PathProgram {
        &self.program
    }
}

fn pattern_items(pattern: &str) -> Vec<Item> {
    pattern
        .chars()
        .map(|c| if c == 'n' { Item::Next } else { Item::Leaf(c.to_string()) })
        .collect()
}

/// Offset of a lattice point expressed in the frame of `pose`.
pub fn local_offset(pose: Pose, p: LatticePoint) -> LatticePoint {
    (p - pose.at).rotate60(LatticePoint::ORIGIN, -(pose.facing.index() as i64))
}

pub fn facing_after(pose: Pose, turn: i64) -> Direction {
    pose.facing.rotate(turn)
}

/// A builder that also tracks where the next node goes (with every switch
/// off), so that nodes can be written with absolute directions. With
/// `mirror` set, every direction and turn is reflected in the horizontal
/// axis.
#[derive(Clone, Debug)]
pub struct Turtle {
    pub builder: Builder,
    pub pose: Pose,
    pub mirror: bool,
}

impl Turtle {
    pub fn new(prefix: impl Into<String>, start: Start, pose: Pose) -> Self {
        Turtle {
            builder: Builder::new(prefix, start),
            pose,
            mirror: false,
        }
    }

    fn flip(&self, d: Direction) -> Direction {
        if self.mirror {
            Direction::new(-(d.index() as i64))
        } else {
            d
        }
    }

    /// Moves the pose along the last pushed node's successor.
    fn advance(&mut self) {
        let node = self.builder.program().nodes.last().expect("node pushed");
        let offs = node.offsets.resolve(&SwitchStates::new()).to_vec();
        let back = self.pose.facing.opposite();
        for (it, o) in node.items.iter().zip(offs) {
            if *it == Item::Next {
                let dir = back.rotate(o as i64);
                self.pose = Pose::new(self.pose.at.step(dir), dir);
            }
        }
    }

    pub fn trace(&mut self, steps: &str) -> &mut Self {
        for c in steps.chars() {
            let c = match (self.mirror, c) {
                (true, 'l') => 'r',
                (true, 'r') => 'l',
                (_, c) => c,
            };
            self.builder.trace(&c.to_string());
            self.advance();
        }
        self
    }

    pub fn start_star(&mut self) -> &mut Self {
        self.builder.start_star();
        self.advance();
        self
    }

    /// Switch whose shift is horizontal for the current heading: `plus`
    /// shifts everything after it one step east, otherwise west.
    pub fn shift(&mut self, key: &str, plus: bool) -> Result<&mut Self, GadgetError> {
        let h = self.pose.facing.index();
        let left = match (h, plus) {
            (4, true) | (1, false) => true,
            (2, true) | (5, false) => false,
            _ => {
                return Err(GadgetError::Program(format!(
                    "no horizontal switch heading {h} (plus = {plus})"
                )))
            }
        };
        let saved = self.pose;
        if left {
            self.builder.switch_left(key);
        } else {
            self.builder.switch_right(key);
        }
        // The two switch nodes keep the heading in the off state.
        let d = saved.facing;
        self.pose = Pose::new(saved.at.step(d).step(d), d);
        Ok(self)
    }

    fn offsets_of(&self, dirs: &[Direction]) -> Vec<u8> {
        let back = self.pose.facing.opposite();
        dirs.iter()
            .map(|&d| ((self.flip(d).index() + 6 - back.index()) % 6) as u8)
            .collect()
    }

    fn items_for(&self, next: Option<Direction>, leaves: &[Direction]) -> (Vec<Item>, Vec<u8>) {
        let mut all: Vec<(u8, bool)> = self
            .offsets_of(leaves)
            .into_iter()
            .map(|o| (o, false))
            .collect();
        if let Some(n) = next {
            all.push((self.offsets_of(&[n])[0], true));
        }
        all.sort();
        let mut items = Vec::new();
        let mut offs = Vec::new();
        let mut leaf = b'a';
        for (o, is_next) in all {
            if is_next {
                items.push(Item::Next);
            } else {
                items.push(Item::Leaf((leaf as char).to_string()));
                leaf += 1;
            }
            offs.push(o);
        }
        (items, offs)
    }

    /// A node with explicit successor direction and leaf directions.
    pub fn node(&mut self, next: Option<Direction>, leaves: &[Direction]) -> &mut Self {
        let (items, offs) = self.items_for(next, leaves);
        self.builder.push(items, Offsets::Fixed(offs));
        if next.is_some() {
            self.advance();
        }
        self
    }

    /// A node with one leaf whose direction is chosen by `keys` (see
    /// [`Offsets::Select`]). The successor direction is fixed.
    pub fn select(
        &mut self,
        next: Direction,
        leaves: &[Direction],
        keys: &[&str],
        choices: &[Direction],
    ) -> Result<&mut Self, GadgetError> {
        let mut opts = Vec::new();
        let mut items = Vec::new();
        for &c in choices {
            let mut ls = leaves.to_vec();
            ls.push(c);
            let (its, offs) = self.items_for(Some(next), &ls);
            if items.is_empty() {
                items = its;
            } else if items != its {
                return Err(GadgetError::Program("select choices change the rotation".into()));
            }
            opts.push(offs);
        }
        self.builder.push(
            items,
            Offsets::Select {
                keys: keys.iter().map(|k| k.to_string()).collect(),
                options: opts,
            },
        );
        self.advance();
        Ok(self)
    }

    pub fn finish(&self) -> PathProgram {
        self.builder.finish()
    }
}
