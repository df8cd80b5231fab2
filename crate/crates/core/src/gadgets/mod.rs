//! Gadget templates: caterpillar fragments with one lattice placement per
//! discrete state, and the oracle setups that count their realizations.
//!
//! Every template is generated from path programs. The JSON files under
//! `assets/gadgets/v1` are the serialized output of these constructors.

pub mod program;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::caterpillar::{CaterpillarFragment, EmbeddedCaterpillar, IndexedEmbedding, NodeId};
use crate::hexlattice::{Direction, LatticeBox, LatticePoint, Pose};
use crate::oracle::{Anchor, SearchSpec};
use crate::verifier::{verify_embedding, Mode, Placement, VerificationReport};

use program::{Builder, Item, Offsets, PathProgram, Start, SwitchStates, Turtle};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GadgetError {
    #[error("malformed program: {0}")]
    Program(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

/// Version directory of the shipped template assets.
pub const ASSET_VERSION: &str = "v1";

/// One discrete state: switch settings, where each part is drawn, and the
/// resulting placement (relative to the template's anchor at the origin
/// facing east).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateState {
    pub switches: SwitchStates,
    pub part_poses: Vec<Pose>,
    pub placement: Placement,
    pub entry: Pose,
    pub exit: Option<Pose>,
    pub footprint: LatticeBox,
}

/// Boundary conditions for counting realizations with the oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSetup {
    pub anchor: Option<Anchor>,
    pub bounds: LatticeBox,
    #[serde(default)]
    pub pinned: BTreeMap<NodeId, LatticePoint>,
    #[serde(default)]
    pub headings: BTreeMap<NodeId, Direction>,
    /// Realization count the template claims for this setup.
    pub expected: usize,
}

/// A named port: a backbone node whose pose is reported per state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplatePort {
    pub label: String,
    pub node: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetTemplate {
    pub id: String,
    /// Path pieces; the first is the main fragment, the others are searched
    /// as companions.
    pub parts: Vec<PathProgram>,
    pub states: BTreeMap<String, TemplateState>,
    pub setups: BTreeMap<String, OracleSetup>,
    #[serde(default)]
    pub ports: Vec<TemplatePort>,
}

impl GadgetTemplate {
    pub fn fragment(&self) -> CaterpillarFragment {
        self.parts[0].fragment()
    }

    /// Caterpillars of all parts, port stubs included.
    pub fn caterpillars(&self) -> Vec<EmbeddedCaterpillar> {
        self.parts.iter().map(|p| p.fragment().caterpillar).collect()
    }

    pub fn embedding(&self) -> IndexedEmbedding {
        IndexedEmbedding::from_caterpillars(&self.caterpillars())
    }

    pub fn disk_count(&self) -> usize {
        self.parts.iter().map(|p| p.fragment().disk_count()).sum()
    }

    pub fn state(&self, label: &str) -> Option<&TemplateState> {
        self.states.get(label)
    }

    /// The state's placement with the template anchored at `pose`.
    pub fn place(&self, label: &str, pose: Pose) -> Option<Placement> {
        let s = self.states.get(label)?;
        Some(s.placement.map_points(|p| pose.apply(p)))
    }

    /// Where the successor of the template attaches when it is anchored at
    /// `pose`.
    pub fn exit_at(&self, label: &str, pose: Pose) -> Option<Pose> {
        Some(pose.apply_pose(self.states.get(label)?.exit?))
    }

    pub fn port_pose(&self, label: &str, port: &str, pose: Pose) -> Option<Pose> {
        let s = self.states.get(label)?;
        let node = &self.ports.iter().find(|p| p.label == port)?.node;
        let (k, part) = self
            .parts
            .iter()
            .enumerate()
            .find(|(_, p)| p.nodes.iter().any(|n| &n.name == node))?;
        let d = part.draw(s.part_poses[k], &s.switches).ok()?;
        let i = part.nodes.iter().position(|n| &n.name == node)?;
        Some(pose.apply_pose(d.backbone[i]))
    }

    /// Exact verification of every stored state.
    pub fn verify_states(&self) -> BTreeMap<String, VerificationReport> {
        let emb = self.embedding();
        self.states
            .iter()
            .map(|(k, s)| (k.clone(), verify_embedding(&emb, &s.placement, Mode::Exact)))
            .collect()
    }

    /// Search input for one of the template's setups.
    pub fn search_spec(&self, setup: &str, limit: usize) -> Option<SearchSpec> {
        let s = self.setups.get(setup)?;
        let mut cats = self.caterpillars();
        let main = cats.remove(0);
        let mut spec = SearchSpec::new(main, s.bounds).with_limit(limit);
        spec.companions = cats;
        spec.anchor = s.anchor.clone();
        spec.pinned = s.pinned.clone();
        spec.headings = s.headings.clone();
        Some(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("template serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn draw_state(parts: &[PathProgram], poses: &[Pose], switches: &SwitchStates) -> Result<TemplateState, GadgetError> {
    let mut placement = Placement::new();
    let mut exit = None;
    let mut entry = poses[0];
    for (k, (p, pose)) in parts.iter().zip(poses).enumerate() {
        let d = p.draw(*pose, switches)?;
        if k == 0 {
            exit = d.exit;
            entry = d.backbone[0];
        }
        for (id, q) in d.placement.positions {
            placement.insert(id, q);
        }
    }
    let footprint = LatticeBox::around(placement.positions.values().copied())
        .ok_or_else(|| GadgetError::Program("empty gadget".into()))?;
    Ok(TemplateState {
        switches: switches.clone(),
        part_poses: poses.to_vec(),
        placement,
        entry,
        exit,
        footprint,
    })
}

/// Anchor on the first backbone node, facing its first rotation neighbor.
fn first_node_anchor(part: &PathProgram, state: &TemplateState) -> Anchor {
    let cat = part.fragment().caterpillar;
    let first = cat.backbone[0].clone();
    let at = state.placement.get(&first).expect("first node placed");
    let nb = state.placement.get(&cat.rotation[&first][0]).expect("neighbor placed");
    Anchor::pose(first, Pose::new(at, at.direction_to(nb).expect("touching")))
}

/// Template with a single part, every state drawn at the default pose, and
/// one anchored setup over the states' common footprint plus a margin.
fn single(id: &str, part: PathProgram, states: &[(&str, SwitchStates)], expected: usize) -> GadgetTemplate {
    let mut st = BTreeMap::new();
    for (label, sw) in states {
        st.insert(
            label.to_string(),
            draw_state(std::slice::from_ref(&part), &[Pose::default()], sw).expect("gadget draws"),
        );
    }
    let first = st.values().next().expect("one state");
    let anchor = first_node_anchor(&part, first);
    let bounds = st
        .values()
        .map(|s| s.footprint)
        .reduce(LatticeBox::union)
        .expect("one state")
        .expand(4, 2);
    let setup = OracleSetup {
        anchor: Some(anchor),
        bounds,
        pinned: BTreeMap::new(),
        headings: BTreeMap::new(),
        expected,
    };
    GadgetTemplate {
        id: id.to_string(),
        parts: vec![part],
        states: st,
        setups: [("default".to_string(), setup)].into_iter().collect(),
        ports: Vec::new(),
    }
}

fn off() -> SwitchStates {
    SwitchStates::new()
}

fn all_on(p: &PathProgram) -> SwitchStates {
    p.switch_keys().into_iter().map(|k| (k, true)).collect()
}

/// A straight rigid strip: a start node with five leaves, then
/// `length - 1` nodes with one leaf on each side.
pub fn rigid_path(length: usize) -> Result<GadgetTemplate, GadgetError> {
    if length == 0 {
        return Err(GadgetError::Program("rigid path needs at least one node".into()));
    }
    let mut b = Builder::new("path", Start::Free);
    b.start_star().straight(length - 1);
    Ok(single(&format!("rigid_path_{length}"), b.finish(), &[("rigid", off())], 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Turn {
    Left,
    Right,
}

/// A rigid strip turning by 60 degrees.
pub fn rigid_turn(direction: Turn) -> GadgetTemplate {
    let mut b = Builder::new("turn", Start::Free);
    b.start_star().straight(1);
    match direction {
        Turn::Left => b.left(),
        Turn::Right => b.right(),
    };
    b.straight(1);
    let id = match direction {
        Turn::Left => "rigid_turn_left",
        Turn::Right => "rigid_turn_right",
    };
    single(id, b.finish(), &[("rigid", off())], 1)
}

/// A strip with one leafless node (a slack edge), followed by a node with
/// four leaves that fills all six of its neighbor cells.
pub fn rigidity_joint() -> GadgetTemplate {
    joint("rigidity_joint", "abncd", &[1, 2, 3, 4, 5], 1)
}

/// [`rigidity_joint`] with one of the four leaves removed.
pub fn rigidity_joint_weakened() -> GadgetTemplate {
    joint("rigidity_joint_weakened", "abnc", &[1, 2, 3, 4], 24)
}

fn joint(id: &str, pattern: &str, offsets: &[u8], expected: usize) -> GadgetTemplate {
    let mut b = Builder::new("joint", Start::Free);
    b.start_star().straight(2);
    b.node("n", &[3]);
    b.node(pattern, offsets);
    b.straight(2);
    single(id, b.finish(), &[("rigid", off())], expected)
}

fn bump(k: usize, top: usize) -> String {
    format!("l{}r{}r{}l", "s".repeat(k - 1), "s".repeat(top), "s".repeat(k - 1))
}

/// Rows between the two paths of the lock.
pub const LOCK_SEPARATION: i64 = 7;

fn lock_parts() -> (PathProgram, PathProgram, Pose) {
    let mut lo = Builder::new("lower", Start::Free);
    lo.start_star()
        .trace(&format!("ss{}sss{}ss", bump(3, 1), bump(3, 1)));
    let lo = lo.finish();
    let n = lo.nodes.len() - 1;
    let b = bump(3, 1);
    let before = (n / 2).saturating_sub(b.len() / 2);
    let after = n - before - b.len();
    let mut up = Builder::new("upper", Start::Free);
    up.start_star()
        .trace(&format!("{}{}{}", "s".repeat(before), b, "s".repeat(after)));
    let up = up.finish();
    (lo, up, Pose::new(LatticePoint::new(43, LOCK_SEPARATION), Direction::W))
}

fn lock_with_slack(extra_rows: i64, expected: usize) -> GadgetTemplate {
    let (lo, up, up_pose) = lock_parts();
    let parts = vec![lo, up];
    let poses = [Pose::default(), up_pose];
    let state = draw_state(&parts, &poses, &off()).expect("lock draws");
    let anchor = first_node_anchor(&parts[0], &state);
    let mut bounds = state.footprint.expand(1, 0);
    bounds.max.v += extra_rows;
    let up_first = parts[1].nodes[0].name.clone();
    let up_second = state
        .placement
        .get(&parts[1].fragment().caterpillar.rotation[&up_first][0])
        .expect("placed");
    let heading = state.placement.get(&up_first).unwrap().direction_to(up_second).unwrap();
    let setup = OracleSetup {
        anchor: Some(anchor),
        bounds,
        pinned: BTreeMap::new(),
        headings: [(up_first, heading)].into_iter().collect(),
        expected,
    };
    let id = if extra_rows == 0 {
        "two_path_lock".to_string()
    } else {
        "two_path_lock_widened".to_string()
    };
    GadgetTemplate {
        id,
        parts,
        states: [("locked".to_string(), state)].into_iter().collect(),
        setups: [("default".to_string(), setup)].into_iter().collect(),
        ports: Vec::new(),
    }
}

/// Two antiparallel paths whose bumps interlock. The oracle box allows no
/// vertical slack beyond the drawn separation.
pub fn two_path_lock() -> GadgetTemplate {
    lock_with_slack(0, 1)
}

/// Extra rows above the lock in [`two_path_lock_widened`].
pub const LOCK_SLACK: i64 = 2;

/// The lock in a box with [`LOCK_SLACK`] spare rows: the paths can slide
/// apart, so it has several realizations.
pub fn two_path_lock_widened() -> GadgetTemplate {
    lock_with_slack(LOCK_SLACK, 4)
}

/// A rigid strip with one switch: the pivot's left leaf can belong to
/// either of two nodes, which moves the rest of the strip by one step.
pub fn two_values_switch() -> GadgetTemplate {
    let mut b = Builder::new("switch", Start::Free);
    b.start_star().straight(1).switch_left("up").straight(1);
    let p = b.finish();
    let on = all_on(&p);
    single("two_values_switch", p, &[("down", off()), ("up", on)], 2)
}

/// Shrunken variable gadget: a strip with two switches on one key whose
/// middle section can only sit in one of two places once both ends are
/// fixed.
pub fn reduced_variable_hexagon() -> GadgetTemplate {
    let mut b = Builder::new("hexagon", Start::Free);
    b.start_star()
        .trace("ssl")
        .switch_left("x")
        .trace("sl")
        .switch_right("x")
        .trace("lss");
    let p = b.finish();
    let on = all_on(&p);
    let mut t = single("reduced_variable_hexagon", p.clone(), &[("cw", off()), ("ccw", on)], 2);
    let cw = &t.states["cw"];
    let last = p.nodes.last().unwrap().name.clone();
    let pins = [
        (last.clone(), cw.placement.get(&last).unwrap()),
        (p.exit_stub(), cw.placement.get(&p.exit_stub()).unwrap()),
    ];
    let setup = t.setups.get_mut("default").unwrap();
    setup.pinned.extend(pins);
    t
}

/// Full variable block as used by the reduction, with `connectors` ports
/// on its top strand. States `ccw` (true) and `cw` (false).
pub fn variable_hexagon(connectors: usize) -> Result<GadgetTemplate, GadgetError> {
    use crate::reduction::{descent, lead_in, turn_back, turn_up, MAX_CONNECTORS, PARAMS};
    if connectors == 0 || connectors > MAX_CONNECTORS {
        return Err(GadgetError::Capacity(format!(
            "{connectors} connectors; a block carries 1..={MAX_CONNECTORS}"
        )));
    }
    let spacing = 2 * PARAMS.gap;
    let width = PARAMS.min_block.max(2 * PARAMS.margin + connectors * spacing);
    let mut t = Turtle::new("hexagon", Start::Free, Pose::default());
    t.builder.role("variable");
    lead_in(&mut t, "x")?;
    t.trace(&"s".repeat(width + 4));
    turn_up(&mut t, "x")?;
    t.trace(&"s".repeat(width));
    turn_back(&mut t, "x")?;
    t.trace(&"s".repeat(PARAMS.margin));
    let mut ports = Vec::new();
    for k in 0..connectors {
        ports.push(TemplatePort {
            label: format!("connector{}", k + 1),
            node: t.builder.program().nodes.len().to_string(),
        });
        t.trace(&"s".repeat(spacing));
    }
    let rest = width + 8 - PARAMS.margin - connectors * spacing;
    t.trace(&"s".repeat(rest));
    descent(&mut t, "x", None)?;
    t.builder.cap();
    let p = t.finish();
    for port in ports.iter_mut() {
        let i: usize = port.node.parse().unwrap();
        port.node = p.nodes[i].name.clone();
    }
    let on = all_on(&p);
    let mut g = single(&format!("variable_hexagon_{connectors}"), p, &[("cw", off()), ("ccw", on)], 2);
    // The full block is not rigid on its own; its oracle claim is made by
    // the reduced hexagon.
    g.setups.clear();
    g.ports = ports;
    Ok(g)
}

/// Code of the three clause parts, each after a start node.
const CLAUSE_LEFT: &str = "(34)(3)(34)(3)(345)(1234)(2)(34)(34)";
const CLAUSE_MIDDLE: &str = "(3)(35)(35)(34)(134)(234)(34)(34)";
const CLAUSE_RIGHT_HEAD: &str = "sssss(42)";
const CLAUSE_RIGHT_TAIL: &str = "(423)(32)(32)(32)";

/// Nodes left free (with their leaves) when the clause oracle runs; all
/// other disks are pinned to the combination's drawing.
pub const CLAUSE_FREE: [&str; 5] = ["left/b6", "left/b7", "middle/b4", "right/b6", "right/b7"];

/// Realizations of the free set per combination, indexed by `4l + 2m + r`.
/// Several local wiggles exist once a literal is true; none when all are
/// false.
pub const CLAUSE_COUNTS: [usize; 8] = [0, 10, 2, 10, 12, 20, 10, 10];

/// Free-leaf choice at the hub for a combination of literal values:
/// the notch takes W if the right literal is true, else NW if the left one
/// is, else SW.
pub fn clause_hub_choice(left: bool, middle: bool, right: bool) -> SwitchStates {
    let f0 = right;
    let f1 = !right && !left && middle;
    [("f0".to_string(), f0), ("f1".to_string(), f1)].into_iter().collect()
}

fn clause_parts() -> Result<Vec<PathProgram>, GadgetError> {
    let mut l = Builder::new("left", Start::Free);
    l.role("clause").start_star().code(CLAUSE_LEFT)?;
    let mut m = Builder::new("middle", Start::Free);
    m.role("clause").start_star().code(CLAUSE_MIDDLE)?;
    let mut r = Builder::new("right", Start::Free);
    r.role("clause").start_star().code(CLAUSE_RIGHT_HEAD)?;
    // The hub: successor at offset 4, free leaf at 1, 2 or 3.
    r.push(
        vec![Item::Leaf("f".into()), Item::Next],
        Offsets::Select {
            keys: vec!["f0".into(), "f1".into()],
            options: vec![vec![1, 4], vec![2, 4], vec![3, 4]],
        },
    );
    r.code(CLAUSE_RIGHT_TAIL)?;
    Ok(vec![l.finish(), m.finish(), r.finish()])
}

/// Combination label `lmr`, one digit per literal, `1` for true.
pub fn combination_label(left: bool, middle: bool, right: bool) -> String {
    format!("{}{}{}", left as u8, middle as u8, right as u8)
}

fn clause_poses(left: bool, middle: bool, right: bool) -> Vec<Pose> {
    vec![
        Pose::new(LatticePoint::new(-15 - 2 * left as i64, 1), Direction::E),
        Pose::new(LatticePoint::new(-7 - 2 * middle as i64, -7), Direction::NE),
        Pose::new(LatticePoint::new(13 + 2 * right as i64, 1), Direction::W),
    ]
}

/// The clause: two parts entering from the left with one bulge each and a
/// part from the right whose hub node has one free leaf. A true literal
/// pulls its part one disk away from the hub. The hub sits at the origin.
pub fn clause_gadget() -> GadgetTemplate {
    let parts = clause_parts().expect("clause parts build");
    let mut states = BTreeMap::new();
    let mut setups = BTreeMap::new();
    for combo in 0..8u8 {
        let (l, m, r) = (combo & 4 != 0, combo & 2 != 0, combo & 1 != 0);
        let label = combination_label(l, m, r);
        let poses = clause_poses(l, m, r);
        let state = draw_state(&parts, &poses, &clause_hub_choice(l, m, r)).expect("clause draws");
        let mut pinned = BTreeMap::new();
        for (id, q) in &state.placement.positions {
            let free = CLAUSE_FREE
                .iter()
                .any(|f| id == f || (id.starts_with(&format!("{f}/")) && !id.ends_with("/exit")));
            if !free {
                pinned.insert(id.clone(), *q);
            }
        }
        setups.insert(
            label.clone(),
            OracleSetup {
                anchor: None,
                bounds: state.footprint.expand(2, 1),
                pinned,
                headings: BTreeMap::new(),
                expected: CLAUSE_COUNTS[combo as usize],
            },
        );
        if l || m || r {
            states.insert(label, state);
        }
    }
    let ports = ["left", "middle", "right"]
        .iter()
        .map(|p| TemplatePort {
            label: p.to_string(),
            node: format!("{p}/b0"),
        })
        .collect();
    GadgetTemplate {
        id: "clause".into(),
        parts,
        states,
        setups,
        ports,
    }
}

/// Every template shipped as an asset, by id.
pub fn library() -> Vec<GadgetTemplate> {
    let mut v: Vec<GadgetTemplate> = (1..=4).map(|k| rigid_path(k).expect("k >= 1")).collect();
    v.push(rigid_turn(Turn::Left));
    v.push(rigid_turn(Turn::Right));
    v.push(rigidity_joint());
    v.push(rigidity_joint_weakened());
    v.push(two_path_lock());
    v.push(two_path_lock_widened());
    v.push(two_values_switch());
    v.push(reduced_variable_hexagon());
    v.push(variable_hexagon(3).expect("within capacity"));
    v.push(clause_gadget());
    v
}
