//! The compiler from a formula and its comb layout to one embedded
//! caterpillar, plus the plan that turns a truth assignment into a
//! placement.
//!
//! The backbone is a single path. A short lead-in is followed by one block
//! per variable, left to right. A block is a three-strand zigzag (strands
//! A, B, C, bottom to top) whose switches are all keyed by the block's
//! variable; when the variable is true, A and C sit one disk east of their
//! false position, B one disk west, and the exit is unaffected. Connector
//! legs for clauses above the line leave strand C, legs for clauses below
//! leave strand A (drawn mirrored). Each leg climbs to its clause's level,
//! where the three legs of a clause meet at the clause hub.

pub mod legs;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::caterpillar::EmbeddedCaterpillar;
use crate::formula::{CnfFormula, CombLayout, LayoutError, Literal, Role, Side};
use crate::gadgets::program::{PathProgram, Start, SwitchStates, Turtle};
use crate::gadgets::GadgetError;
use crate::hexlattice::{LatticeBox, LatticePoint, Pose};
use crate::verifier::{verify, Mode, Placement};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    LayoutMismatch(#[from] LayoutError),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("construction error: {0}")]
    Construction(String),
}

impl From<GadgetError> for ReductionError {
    fn from(e: GadgetError) -> Self {
        match e {
            GadgetError::Capacity(s) => ReductionError::Capacity(s),
            GadgetError::Program(s) => ReductionError::Construction(s),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealizeError {
    /// 0-based index of the first clause the assignment leaves false.
    #[error("clause {} is unsatisfied", .0 + 1)]
    Unsatisfied(usize),
    #[error("assignment covers {got} variables, formula has {expected}")]
    Assignment { expected: usize, got: usize },
    #[error("placement failed verification with {0} violations")]
    Verification(usize),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

/// Geometry constants of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    /// Rows between a strand and the hub of a level-1 clause.
    pub base_height: i64,
    /// Extra rows per nesting level.
    pub level_step: i64,
    /// Straight nodes between consecutive legs on a strand.
    pub gap: usize,
    /// Straight nodes at either end of a strand before the first leg.
    pub margin: usize,
    /// Smallest block width parameter.
    pub min_block: usize,
    /// Largest disk count `compile` will produce.
    pub max_nodes: usize,
}

pub const PARAMS: Params = Params {
    base_height: 20,
    level_step: 8,
    gap: 4,
    margin: 3,
    min_block: 8,
    max_nodes: 2_000_000,
};

/// Constants `[A, B, C, D]` of the size bound
/// `node_count <= A m^2 + B n m + C (n + m) + D`, measured on
/// [`nested_family`](crate::formula::nested_family) for n, m up to 10 and
/// frozen with about 15% headroom.
pub const SIZE_BOUND: [usize; 4] = [40, 130, 250, 600];

pub fn size_bound(n: usize, m: usize) -> usize {
    let [a, b, c, d] = SIZE_BOUND;
    a * m * m + b * n * m + c * (n + m) + d
}

/// Boolean expression over the variables, used to drive switches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateExpr {
    Var(usize),
    Lit(Literal),
    Not(Box<StateExpr>),
    And(Vec<StateExpr>),
    Or(Vec<StateExpr>),
}

impl StateExpr {
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            StateExpr::Var(v) => assignment[v - 1],
            StateExpr::Lit(l) => l.value(assignment),
            StateExpr::Not(e) => !e.eval(assignment),
            StateExpr::And(es) => es.iter().all(|e| e.eval(assignment)),
            StateExpr::Or(es) => es.iter().any(|e| e.eval(assignment)),
        }
    }
}

/// One gadget instance along the backbone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetInstance {
    /// `lead_in`, `variable`, `connector` or `clause`.
    pub gadget: String,
    pub label: String,
    /// Anchor with every switch off.
    pub anchor: Pose,
    pub state: Option<StateExpr>,
    /// Backbone index range `[first, last)`.
    pub nodes: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub switches: BTreeMap<String, StateExpr>,
    pub gadgets: Vec<GadgetInstance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub node_count: usize,
    pub backbone_length: usize,
    pub gadget_counts: BTreeMap<String, usize>,
    /// Bounding box with every switch off.
    pub bounding_box: LatticeBox,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionOutput {
    pub formula: CnfFormula,
    pub layout: CombLayout,
    pub program: PathProgram,
    pub plan: Plan,
    pub stats: Stats,
}

impl ReductionOutput {
    pub fn caterpillar(&self) -> EmbeddedCaterpillar {
        self.program.caterpillar()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reduction serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn switch_states(&self, assignment: &[bool]) -> SwitchStates {
        self.plan
            .switches
            .iter()
            .map(|(k, e)| (k.clone(), e.eval(assignment)))
            .collect()
    }
}

/// One literal occurrence: a leg from its variable's block to the clause.
#[derive(Clone, Copy, Debug)]
struct Occurrence {
    clause: usize,
    role: Role,
    lit: Literal,
}

impl Occurrence {
    /// Legs whose tip must move west when the literal becomes true carry
    /// an inverting switch pair, since the block moves its strands east.
    fn inverted(&self) -> bool {
        match self.role {
            Role::Left | Role::Middle => !self.lit.negated,
            Role::Right => self.lit.negated,
        }
    }
}

fn var_key(v: usize) -> String {
    format!("x{v}")
}

fn hub_keys(clause: usize) -> [String; 2] {
    [format!("c{}.f0", clause + 1), format!("c{}.f1", clause + 1)]
}

/// Arm lengths of the second pass, per (clause, role).
#[derive(Clone, Copy, Debug)]
enum Arm {
    Probe,
    Left(i64),
    Right(i64),
}

struct Emitter<'a> {
    f: &'a CnfFormula,
    layout: &'a CombLayout,
    t: Turtle,
    gadgets: Vec<GadgetInstance>,
    bases: BTreeMap<(usize, Role), LatticePoint>,
}

impl Emitter<'_> {
    fn height(&self, clause: usize) -> i64 {
        PARAMS.base_height + (self.layout.levels[clause] as i64 - 1) * PARAMS.level_step
    }

    fn backbone_len(&self) -> usize {
        self.t.builder.program().nodes.len()
    }

    fn leg(&mut self, occ: Occurrence, arm: Arm) -> Result<(), ReductionError> {
        let key = var_key(occ.lit.var);
        let invert = occ.inverted().then_some(key.as_str());
        let y = self.height(occ.clause);
        let start = self.backbone_len();
        let anchor = self.t.pose;
        self.bases.insert((occ.clause, occ.role), anchor.at);
        self.t.builder.role("connector");
        match (occ.role, arm) {
            (Role::Middle, _) => legs::middle(&mut self.t, y, invert)?,
            (Role::Left, Arm::Left(a)) => legs::left(&mut self.t, y, a, invert)?,
            (Role::Left, _) => legs::left(&mut self.t, y, 2, invert)?,
            (Role::Right, arm) => {
                let hub = match arm {
                    Arm::Right(h) => h,
                    _ => -4 * y,
                };
                let [k0, k1] = hub_keys(occ.clause);
                legs::right(&mut self.t, y, hub, invert, [&k0, &k1])?
            }
        }
        self.t.builder.role("variable");
        self.gadgets.push(GadgetInstance {
            gadget: "connector".into(),
            label: format!("c{}:{}", occ.clause + 1, occ.lit),
            anchor,
            state: Some(StateExpr::Lit(occ.lit)),
            nodes: (start, self.backbone_len()),
        });
        Ok(())
    }

    /// A straight strand of `len` node widths carrying `legs`.
    fn strand(
        &mut self,
        len: usize,
        occs: &[Occurrence],
        mirror: bool,
        arms: &dyn Fn(&Occurrence) -> Arm,
    ) -> Result<(), ReductionError> {
        let x0 = self.t.pose.at.u;
        self.t.mirror = mirror;
        self.t.trace(&"s".repeat(PARAMS.margin));
        for occ in occs {
            self.leg(*occ, arms(occ))?;
            self.t.trace(&"s".repeat(PARAMS.gap));
        }
        let used = ((self.t.pose.at.u - x0) / 2) as usize;
        if used + PARAMS.margin > len {
            return Err(ReductionError::Construction(format!(
                "strand of width {len} cannot hold {} legs",
                occs.len()
            )));
        }
        self.t.trace(&"s".repeat(len - used));
        self.t.mirror = false;
        Ok(())
    }
}

/// Widths (in straight-node equivalents) of the three leg shapes.
pub(crate) fn leg_width(role: Role) -> usize {
    let mut t = Turtle::new("w", Start::Free, Pose::default());
    let y = PARAMS.base_height;
    let r = match role {
        Role::Left => legs::left(&mut t, y, 2, None),
        Role::Middle => legs::middle(&mut t, y, None),
        Role::Right => legs::right(&mut t, y, -4 * y, None, ["a", "b"]),
    };
    r.expect("sample leg builds");
    (t.pose.at.u / 2) as usize
}

fn strand_need(occs: &[Occurrence]) -> usize {
    2 * PARAMS.margin + occs.iter().map(|o| leg_width(o.role) + PARAMS.gap).sum::<usize>()
}

/// Block widths: strand A holds `n + 4` straight nodes, B `n`, C `n + 8`.
fn block_width(above: &[Occurrence], below: &[Occurrence]) -> usize {
    let need_c = strand_need(above).saturating_sub(8);
    let need_a = strand_need(below).saturating_sub(4);
    PARAMS.min_block.max(need_c).max(need_a)
}

/// Rigid start, then down to strand A of the first block.
pub(crate) fn lead_in(t: &mut Turtle, first: &str) -> Result<(), GadgetError> {
    t.start_star();
    t.trace("srsr");
    t.shift(first, true)?;
    t.trace("ll");
    Ok(())
}

/// From the end of strand A up to strand B, shifting west twice.
pub(crate) fn turn_up(t: &mut Turtle, key: &str) -> Result<(), GadgetError> {
    t.trace("l");
    t.shift(key, false)?;
    t.shift(key, false)?;
    t.trace("ll");
    Ok(())
}

/// From the start of strand B up to strand C, shifting east twice.
pub(crate) fn turn_back(t: &mut Turtle, key: &str) -> Result<(), GadgetError> {
    t.trace("r");
    t.shift(key, true)?;
    t.shift(key, true)?;
    t.trace("rr");
    Ok(())
}

/// From the end of strand C down to strand A of the next block, undoing
/// this block's shift and applying the next one's.
pub(crate) fn descent(t: &mut Turtle, key: &str, next: Option<&str>) -> Result<(), GadgetError> {
    t.trace("r");
    t.shift(key, false)?;
    t.trace("ssrslr");
    match next {
        Some(k) => {
            t.shift(k, true)?;
        }
        None => {
            t.trace("ss");
        }
    }
    t.trace("lls");
    Ok(())
}

/// Most connectors one variable block carries on one side.
pub const MAX_CONNECTORS: usize = 64;

fn occurrences(f: &CnfFormula, layout: &CombLayout, var: usize, side: Side) -> Vec<Occurrence> {
    let mut v: Vec<(usize, Occurrence)> = Vec::new();
    for (j, c) in f.clauses.iter().enumerate() {
        if layout.sides[j] != side {
            continue;
        }
        for (i, lit) in c.0.iter().enumerate() {
            if lit.var == var {
                v.push((
                    layout.slots[j][i],
                    Occurrence {
                        clause: j,
                        role: c.role_of(var).expect("variable occurs"),
                        lit: *lit,
                    },
                ));
            }
        }
    }
    v.sort_by_key(|(s, _)| *s);
    v.into_iter().map(|(_, o)| o).collect()
}

fn emit<'a>(
    f: &'a CnfFormula,
    layout: &'a CombLayout,
    arms: &dyn Fn(&Occurrence) -> Arm,
) -> Result<Emitter<'a>, ReductionError> {
    let mut e = Emitter {
        f,
        layout,
        t: Turtle::new("C", Start::Free, Pose::default()),
        gadgets: Vec::new(),
        bases: BTreeMap::new(),
    };
    let n = f.num_vars;
    e.t.builder.role("lead_in");
    lead_in(&mut e.t, &var_key(1))?;
    e.gadgets.push(GadgetInstance {
        gadget: "lead_in".into(),
        label: "lead-in".into(),
        anchor: Pose::default(),
        state: None,
        nodes: (0, e.backbone_len()),
    });
    for v in 1..=n {
        let key = var_key(v);
        let above = occurrences(e.f, e.layout, v, Side::Above);
        let below = occurrences(e.f, e.layout, v, Side::Below);
        if above.len().max(below.len()) > MAX_CONNECTORS {
            return Err(ReductionError::Capacity(format!(
                "x{v} has more than {MAX_CONNECTORS} connectors on one side"
            )));
        }
        let w = block_width(&above, &below);
        let start = e.backbone_len();
        let anchor = e.t.pose;
        e.t.builder.role("variable");
        e.strand(w + 4, &below, true, arms)?;
        turn_up(&mut e.t, &key)?;
        e.t.trace(&"s".repeat(w));
        turn_back(&mut e.t, &key)?;
        e.strand(w + 8, &above, false, arms)?;
        let next = (v < n).then(|| var_key(v + 1));
        descent(&mut e.t, &key, next.as_deref())?;
        e.gadgets.push(GadgetInstance {
            gadget: "variable".into(),
            label: key.clone(),
            anchor,
            state: Some(StateExpr::Var(v)),
            nodes: (start, e.backbone_len()),
        });
    }
    e.t.builder.cap();
    Ok(e)
}

/// Hub position of every clause, from the base of its middle leg.
fn hubs(f: &CnfFormula, layout: &CombLayout, bases: &BTreeMap<(usize, Role), LatticePoint>) -> Vec<LatticePoint> {
    (0..f.clauses.len())
        .map(|j| {
            let c = &f.clauses[j];
            let mid = c.literal_of(c.sorted_vars()[1]).expect("middle literal");
            let p = bases[&(j, Role::Middle)];
            let y = PARAMS.base_height + (layout.levels[j] as i64 - 1) * PARAMS.level_step;
            let du = y + if mid.negated { 2 } else { 0 };
            let dv = if layout.sides[j] == Side::Above { y } else { -y };
            LatticePoint::new(p.u + du, p.v + dv)
        })
        .collect()
}

/// Compiles `f` with `layout` into the caterpillar and its plan.
pub fn compile(f: &CnfFormula, layout: &CombLayout) -> Result<ReductionOutput, ReductionError> {
    layout.check(f)?;
    let probe = emit(f, layout, &|_| Arm::Probe)?;
    let hub = hubs(f, layout, &probe.bases);
    let bases = probe.bases.clone();
    let height = |j: usize| PARAMS.base_height + (layout.levels[j] as i64 - 1) * PARAMS.level_step;
    let arms = |o: &Occurrence| -> Arm {
        let h = hub[o.clause];
        let p = bases[&(o.clause, o.role)];
        match o.role {
            Role::Left => {
                let tip = h.u - p.u - if o.lit.negated { 5 } else { 3 };
                Arm::Left((tip - height(o.clause) - 7) / 2)
            }
            Role::Right => Arm::Right(h.u - p.u + if o.lit.negated { 2 } else { 0 }),
            Role::Middle => Arm::Probe,
        }
    };
    let e = emit(f, layout, &arms)?;
    if e.bases != probe.bases {
        return Err(ReductionError::Construction("leg bases moved between passes".into()));
    }
    let mut gadgets = e.gadgets;
    for (j, c) in f.clauses.iter().enumerate() {
        gadgets.push(GadgetInstance {
            gadget: "clause".into(),
            label: format!("c{}", j + 1),
            anchor: Pose::new(hub[j], crate::hexlattice::Direction::E),
            state: Some(StateExpr::Or(c.0.iter().map(|l| StateExpr::Lit(*l)).collect())),
            nodes: gadgets
                .iter()
                .filter(|g| g.gadget == "connector" && g.label.starts_with(&format!("c{}:", j + 1)))
                .fold((usize::MAX, 0), |(a, b), g| (a.min(g.nodes.0), b.max(g.nodes.1))),
        });
    }
    let mut switches = BTreeMap::new();
    for v in 1..=f.num_vars {
        switches.insert(var_key(v), StateExpr::Var(v));
    }
    for (j, c) in f.clauses.iter().enumerate() {
        let [l, m, r] = c.sorted_vars().map(|v| StateExpr::Lit(c.literal_of(v).unwrap()));
        let [k0, k1] = hub_keys(j);
        switches.insert(k0, r.clone());
        switches.insert(
            k1,
            StateExpr::And(vec![StateExpr::Not(Box::new(r)), StateExpr::Not(Box::new(l)), m]),
        );
    }
    let program = e.t.finish();
    let node_count = program.node_count();
    if node_count > PARAMS.max_nodes {
        return Err(ReductionError::Capacity(format!(
            "{node_count} disks exceed the limit of {}",
            PARAMS.max_nodes
        )));
    }
    let drawing = program.draw(Pose::default(), &SwitchStates::new())?;
    let bounding_box = LatticeBox::around(drawing.placement.positions.values().copied())
        .expect("nonempty construction");
    let mut gadget_counts = BTreeMap::new();
    for g in &gadgets {
        *gadget_counts.entry(g.gadget.clone()).or_insert(0) += 1;
    }
    gadget_counts.insert(
        "switch".into(),
        program.nodes.iter().filter(|n| n.role == "switch").count() / 2,
    );
    Ok(ReductionOutput {
        formula: f.clone(),
        layout: layout.clone(),
        stats: Stats {
            node_count,
            backbone_length: program.nodes.len(),
            gadget_counts,
            bounding_box,
        },
        program,
        plan: Plan { switches, gadgets },
    })
}

/// The placement for `assignment`, verified in exact mode. Fails with the
/// first unsatisfied clause if there is one.
pub fn realize(r: &ReductionOutput, assignment: &[bool]) -> Result<Placement, RealizeError> {
    if assignment.len() != r.formula.num_vars {
        return Err(RealizeError::Assignment {
            expected: r.formula.num_vars,
            got: assignment.len(),
        });
    }
    if let Some(j) = r.formula.first_unsatisfied(assignment) {
        return Err(RealizeError::Unsatisfied(j));
    }
    let placement = draw(r, assignment)?;
    let report = verify(&r.caterpillar(), &placement, Mode::Exact);
    if !report.passed() {
        return Err(RealizeError::Verification(report.violations.len()));
    }
    Ok(placement)
}

/// The drawing for `assignment` without checking it; for unsatisfying
/// assignments the hub of some clause has no room and the result fails
/// verification.
pub fn draw(r: &ReductionOutput, assignment: &[bool]) -> Result<Placement, RealizeError> {
    if assignment.len() != r.formula.num_vars {
        return Err(RealizeError::Assignment {
            expected: r.formula.num_vars,
            got: assignment.len(),
        });
    }
    let states = r.switch_states(assignment);
    Ok(r.program.draw(Pose::default(), &states)?.placement)
}
