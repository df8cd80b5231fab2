//! 3-CNF formulas, the variable-clause graph, and comb layouts (variables on
//! a line, clauses above or below at nesting levels).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("clause {clause} does not have exactly 3 distinct variables")]
    Arity { clause: usize },
    #[error("literal {literal} out of range 1..={num_vars}")]
    Range { literal: i64, num_vars: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("no comb layout under identity variable order: {0}")]
    NotLayoutable(String),
    #[error("layout does not match formula: {0}")]
    Mismatch(String),
    #[error("layout schema error: {0}")]
    Schema(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn from_dimacs(x: i64) -> Literal {
        Literal {
            var: x.unsigned_abs() as usize,
            negated: x < 0,
        }
    }

    pub fn value(&self, assignment: &[bool]) -> bool {
        assignment[self.var - 1] != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause(pub [Literal; 3]);

impl Clause {
    pub fn vars(&self) -> [usize; 3] {
        [self.0[0].var, self.0[1].var, self.0[2].var]
    }

    /// Leftmost and rightmost variable.
    pub fn span(&self) -> (usize, usize) {
        let v = self.vars();
        (*v.iter().min().unwrap(), *v.iter().max().unwrap())
    }

    /// Variables in increasing order.
    pub fn sorted_vars(&self) -> [usize; 3] {
        let mut v = self.vars();
        v.sort_unstable();
        v
    }

    pub fn literal_of(&self, var: usize) -> Option<Literal> {
        self.0.iter().copied().find(|l| l.var == var)
    }

    pub fn satisfied(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| l.value(assignment))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl CnfFormula {
    /// Builds a formula from DIMACS-style integer triples.
    pub fn from_triples(num_vars: usize, triples: &[[i64; 3]]) -> Result<CnfFormula, FormulaError> {
        let mut clauses = Vec::new();
        for (j, t) in triples.iter().enumerate() {
            clauses.push(make_clause(j + 1, t, num_vars)?);
        }
        if clauses.is_empty() {
            return Err(FormulaError::Syntax {
                line: 0,
                message: "formula has no clauses".into(),
            });
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Index (0-based) of the first clause the assignment leaves false.
    pub fn first_unsatisfied(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses.iter().position(|c| !c.satisfied(assignment))
    }

    pub fn is_satisfied(&self, assignment: &[bool]) -> bool {
        self.first_unsatisfied(assignment).is_none()
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c.0 {
                let x = l.var as i64;
                s.push_str(&format!("{} ", if l.negated { -x } else { x }));
            }
            s.push_str("0\n");
        }
        s
    }
}

fn make_clause(index: usize, lits: &[i64], num_vars: usize) -> Result<Clause, FormulaError> {
    for &x in lits {
        if x == 0 || x.unsigned_abs() as usize > num_vars {
            return Err(FormulaError::Range { literal: x, num_vars });
        }
    }
    let vars: BTreeSet<u64> = lits.iter().map(|x| x.unsigned_abs()).collect();
    if lits.len() != 3 || vars.len() != 3 {
        return Err(FormulaError::Arity { clause: index });
    }
    Ok(Clause([
        Literal::from_dimacs(lits[0]),
        Literal::from_dimacs(lits[1]),
        Literal::from_dimacs(lits[2]),
    ]))
}

/// Parses DIMACS CNF. Comment lines start with `c`; a `%` line ends the
/// input (as in the SATLIB benchmark files).
pub fn parse_cnf(text: &str) -> Result<CnfFormula, FormulaError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line_no, "duplicate header"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(syntax(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let n = parts[2]
                .parse::<usize>()
                .map_err(|_| syntax(line_no, "bad variable count"))?;
            let m = parts[3]
                .parse::<usize>()
                .map_err(|_| syntax(line_no, "bad clause count"))?;
            if n == 0 {
                return Err(syntax(line_no, "variable count must be positive"));
            }
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| syntax(line_no, "clause before header"))?;
        for tok in line.split_whitespace() {
            let x = tok
                .parse::<i64>()
                .map_err(|_| syntax(line_no, &format!("bad literal `{tok}`")))?;
            if x == 0 {
                clauses.push(make_clause(clauses.len() + 1, &current, n)?);
                current.clear();
            } else {
                if x.unsigned_abs() as usize > n {
                    return Err(FormulaError::Range { literal: x, num_vars: n });
                }
                current.push(x);
            }
        }
    }
    let (n, m) = header.ok_or_else(|| syntax(last_line, "missing header"))?;
    if !current.is_empty() {
        return Err(syntax(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(syntax(
            last_line,
            &format!("header announces {m} clauses, found {}", clauses.len()),
        ));
    }
    if m == 0 {
        return Err(syntax(last_line, "formula has no clauses"));
    }
    Ok(CnfFormula { num_vars: n, clauses })
}

fn syntax(line: usize, message: &str) -> FormulaError {
    FormulaError::Syntax {
        line,
        message: message.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GraphNode {
    Var(usize),
    Clause(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableClauseGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: BTreeSet<(GraphNode, GraphNode)>,
}

impl VariableClauseGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: GraphNode, b: GraphNode) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// Variables `Var(1..=n)`, clauses `Clause(1..=m)`, literal edges and the
/// variable cycle.
pub fn build_variable_clause_graph(f: &CnfFormula) -> VariableClauseGraph {
    let mut nodes: Vec<GraphNode> = (1..=f.num_vars).map(GraphNode::Var).collect();
    nodes.extend((1..=f.clauses.len()).map(GraphNode::Clause));
    let mut edges = BTreeSet::new();
    let mut add = |a: GraphNode, b: GraphNode| {
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    };
    for (j, c) in f.clauses.iter().enumerate() {
        for v in c.vars() {
            add(GraphNode::Var(v), GraphNode::Clause(j + 1));
        }
    }
    for i in 1..=f.num_vars {
        add(GraphNode::Var(i), GraphNode::Var(i % f.num_vars + 1));
    }
    VariableClauseGraph { nodes, edges }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

/// Position of a variable inside a clause, left to right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Left,
    Middle,
    Right,
}

impl Clause {
    pub fn role_of(&self, var: usize) -> Option<Role> {
        let s = self.sorted_vars();
        match s.iter().position(|&v| v == var)? {
            0 => Some(Role::Left),
            1 => Some(Role::Middle),
            _ => Some(Role::Right),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombLayout {
    /// Left-to-right variable order (always the identity).
    pub var_order: Vec<usize>,
    pub sides: Vec<Side>,
    /// 1-based nesting level per clause.
    pub levels: Vec<usize>,
    /// Per clause, the connector slot of each literal on its variable,
    /// counted left to right among that variable's connectors on the same side.
    pub slots: Vec<[usize; 3]>,
}

/// `inner` lies within one gap between consecutive variables of `outer`.
fn nested_in(inner: &Clause, outer: &Clause) -> bool {
    let (a, b) = inner.span();
    let o = outer.sorted_vars();
    o.windows(2).any(|w| w[0] <= a && b <= w[1])
}

fn crosses(c: &Clause, d: &Clause) -> bool {
    let (ca, cb) = c.span();
    let (da, db) = d.span();
    let disjoint = cb <= da || db <= ca;
    !(disjoint || nested_in(c, d) || nested_in(d, c))
}

fn sides_feasible(f: &CnfFormula, sides: &[Side], upto: usize) -> bool {
    for j in 0..upto {
        for k in 0..j {
            if sides[j] == sides[k] && crosses(&f.clauses[j], &f.clauses[k]) {
                return false;
            }
        }
    }
    true
}

/// Least levels: one more than the deepest clause nested inside.
fn least_levels(f: &CnfFormula, sides: &[Side]) -> Vec<usize> {
    let m = f.clauses.len();
    let mut order: Vec<usize> = (0..m).collect();
    let width = |j: usize| {
        let (a, b) = f.clauses[j].span();
        b - a
    };
    order.sort_by_key(|&j| (width(j), j));
    let mut levels = vec![1; m];
    for &j in &order {
        for k in 0..m {
            if k != j && sides[k] == sides[j] && nested_in(&f.clauses[k], &f.clauses[j]) {
                levels[j] = levels[j].max(levels[k] + 1);
            }
        }
    }
    levels
}

/// Connector order on one variable and side: clauses ending here by
/// increasing level, the clause having it in the middle, clauses starting
/// here by decreasing level.
fn slot_key(f: &CnfFormula, levels: &[usize], j: usize, var: usize) -> (u8, i64, usize) {
    match f.clauses[j].role_of(var).expect("variable occurs") {
        Role::Right => (0, levels[j] as i64, j),
        Role::Middle => (1, 0, j),
        Role::Left => (2, -(levels[j] as i64), j),
    }
}

fn compute_slots(f: &CnfFormula, sides: &[Side], levels: &[usize]) -> Vec<[usize; 3]> {
    let mut per: BTreeMap<(usize, Side), Vec<usize>> = BTreeMap::new();
    for (j, c) in f.clauses.iter().enumerate() {
        for v in c.vars() {
            per.entry((v, sides[j])).or_default().push(j);
        }
    }
    for ((v, _), list) in per.iter_mut() {
        list.sort_by_key(|&j| slot_key(f, levels, j, *v));
    }
    f.clauses
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let mut s = [0; 3];
            for (i, v) in c.vars().into_iter().enumerate() {
                s[i] = per[&(v, sides[j])].iter().position(|&k| k == j).unwrap();
            }
            s
        })
        .collect()
}

fn layout_for(f: &CnfFormula, sides: Vec<Side>) -> CombLayout {
    let levels = least_levels(f, &sides);
    let slots = compute_slots(f, &sides, &levels);
    CombLayout {
        var_order: (1..=f.num_vars).collect(),
        sides,
        levels,
        slots,
    }
}

/// Largest clause count for which every side assignment is tried.
pub const BRUTE_FORCE_MAX_CLAUSES: usize = 12;

/// Comb layout under the identity variable order. With a hint only levels
/// and slots are computed; without one the first feasible side assignment
/// is taken, enumerating with `Below` before `Above` and clause 1 most
/// significant (greedy first fit for more than
/// [`BRUTE_FORCE_MAX_CLAUSES`] clauses).
pub fn compute_comb_layout(f: &CnfFormula, hint: Option<&[Side]>) -> Result<CombLayout, LayoutError> {
    let m = f.clauses.len();
    if let Some(h) = hint {
        if h.len() != m {
            return Err(LayoutError::Mismatch(format!(
                "hint has {} sides for {m} clauses",
                h.len()
            )));
        }
        if !sides_feasible(f, h, m) {
            return Err(LayoutError::NotLayoutable(
                "two clauses on the same side cross".into(),
            ));
        }
        return Ok(layout_for(f, h.to_vec()));
    }
    if m <= BRUTE_FORCE_MAX_CLAUSES {
        for mask in 0u32..(1 << m) {
            let sides: Vec<Side> = (0..m)
                .map(|j| {
                    if mask >> (m - 1 - j) & 1 == 1 {
                        Side::Above
                    } else {
                        Side::Below
                    }
                })
                .collect();
            if sides_feasible(f, &sides, m) {
                return Ok(layout_for(f, sides));
            }
        }
        return Err(LayoutError::NotLayoutable(
            "every side assignment has crossing clauses".into(),
        ));
    }
    let mut sides = Vec::with_capacity(m);
    for j in 0..m {
        sides.push(Side::Below);
        if !sides_feasible(f, &sides, j + 1) {
            sides[j] = Side::Above;
            if !sides_feasible(f, &sides, j + 1) {
                return Err(LayoutError::NotLayoutable(format!(
                    "clause {} fits on neither side",
                    j + 1
                )));
            }
        }
    }
    Ok(layout_for(f, sides))
}

/// Most clauses a comb layout can hold over `n` variables: each side holds
/// at most `n - 2`.
pub fn max_layoutable_clauses(n: usize) -> usize {
    2 * n.saturating_sub(2)
}

/// Deterministic family of deeply nested formulas used to measure sizes.
/// Clause `j` (from 0) uses variables `k, k + 1, n` with `k = j / 2 + 1`
/// and goes below for even `j`, above for odd `j`; signs follow the bits
/// of `j`. Each side is one nesting chain, so the first `m` clauses of the
/// family for a given `n` always share a layout shape.
pub fn nested_family(n: usize, m: usize) -> Option<(CnfFormula, Vec<Side>)> {
    if n < 3 || m == 0 || m > max_layoutable_clauses(n) {
        return None;
    }
    let mut triples = Vec::with_capacity(m);
    let mut sides = Vec::with_capacity(m);
    for j in 0..m {
        let k = (j / 2 + 1) as i64;
        let sign = |bit: usize| if j >> bit & 1 == 1 { -1 } else { 1 };
        triples.push([sign(0) * k, sign(1) * (k + 1), sign(2) * n as i64]);
        sides.push(if j % 2 == 0 { Side::Below } else { Side::Above });
    }
    let f = CnfFormula::from_triples(n, &triples).ok()?;
    Some((f, sides))
}

impl CombLayout {
    /// Checks the layout against the formula: sizes, non-crossing sides,
    /// nesting levels, slot consistency.
    pub fn check(&self, f: &CnfFormula) -> Result<(), LayoutError> {
        let m = f.clauses.len();
        if self.var_order != (1..=f.num_vars).collect::<Vec<_>>() {
            return Err(LayoutError::Mismatch("variable order must be the identity".into()));
        }
        if self.sides.len() != m || self.levels.len() != m || self.slots.len() != m {
            return Err(LayoutError::Mismatch(format!("layout is not sized for {m} clauses")));
        }
        if self.levels.iter().any(|&l| l == 0 || l > m) {
            return Err(LayoutError::Mismatch("levels must lie in 1..=m".into()));
        }
        if !sides_feasible(f, &self.sides, m) {
            return Err(LayoutError::Mismatch("two clauses on the same side cross".into()));
        }
        for j in 0..m {
            for k in 0..m {
                if k != j
                    && self.sides[k] == self.sides[j]
                    && nested_in(&f.clauses[k], &f.clauses[j])
                    && self.levels[k] >= self.levels[j]
                {
                    return Err(LayoutError::Mismatch(format!(
                        "clause {} is nested in clause {} but not below it",
                        k + 1,
                        j + 1
                    )));
                }
            }
        }
        if self.slots != compute_slots(f, &self.sides, &self.levels) {
            return Err(LayoutError::Mismatch("connector slots are not in comb order".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = LayoutDoc {
            var_order: self.var_order.clone(),
            sides: self
                .sides
                .iter()
                .enumerate()
                .map(|(j, s)| (format!("c{}", j + 1), *s))
                .collect(),
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(j, l)| (format!("c{}", j + 1), *l))
                .collect(),
            slots: self
                .slots
                .iter()
                .enumerate()
                .map(|(j, s)| (format!("c{}", j + 1), s.to_vec()))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("layout serializes")
    }

    pub fn from_json(text: &str) -> Result<CombLayout, LayoutError> {
        let doc: LayoutDoc =
            serde_json::from_str(text).map_err(|e| LayoutError::Schema(e.to_string()))?;
        let m = doc.sides.len();
        let get = |j: usize| format!("c{}", j + 1);
        let mut sides = Vec::new();
        let mut levels = Vec::new();
        let mut slots = Vec::new();
        for j in 0..m {
            let key = get(j);
            let missing = || LayoutError::Schema(format!("missing entry for {key}"));
            sides.push(*doc.sides.get(&key).ok_or_else(missing)?);
            levels.push(*doc.levels.get(&key).ok_or_else(missing)?);
            let s = doc.slots.get(&key).ok_or_else(missing)?;
            let s: [usize; 3] = s
                .as_slice()
                .try_into()
                .map_err(|_| LayoutError::Schema(format!("{key} needs 3 slots")))?;
            slots.push(s);
        }
        Ok(CombLayout {
            var_order: doc.var_order,
            sides,
            levels,
            slots,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct LayoutDoc {
    var_order: Vec<usize>,
    sides: BTreeMap<String, Side>,
    levels: BTreeMap<String, usize>,
    slots: BTreeMap<String, Vec<usize>>,
}

/// Reads a hint file `{"sides": {"c1": "above", ...}}`.
pub fn parse_side_hint(text: &str, num_clauses: usize) -> Result<Vec<Side>, LayoutError> {
    #[derive(Deserialize)]
    struct Hint {
        sides: BTreeMap<String, Side>,
    }
    let h: Hint = serde_json::from_str(text).map_err(|e| LayoutError::Schema(e.to_string()))?;
    (0..num_clauses)
        .map(|j| {
            h.sides
                .get(&format!("c{}", j + 1))
                .copied()
                .ok_or_else(|| LayoutError::Schema(format!("hint misses c{}", j + 1)))
        })
        .collect()
}

/// Draws every connector as a vertical from its variable slot to the
/// clause's level plus the clause's horizontal bar, and counts pairs of
/// segments from different clauses that meet.
pub fn crossing_count(f: &CnfFormula, layout: &CombLayout) -> usize {
    let per_var = f.clauses.len() as i64 + 1;
    let mut verticals = Vec::new();
    let mut bars = Vec::new();
    for (j, c) in f.clauses.iter().enumerate() {
        let sign = if layout.sides[j] == Side::Above { 1 } else { -1 };
        let y = sign * layout.levels[j] as i64;
        let xs: Vec<i64> = c
            .vars()
            .iter()
            .zip(layout.slots[j])
            .map(|(&v, s)| v as i64 * 2 * per_var + s as i64)
            .collect();
        for &x in &xs {
            verticals.push((j, x, y));
        }
        bars.push((j, *xs.iter().min().unwrap(), *xs.iter().max().unwrap(), y));
    }
    let mut count = 0;
    for &(j, x, y) in &verticals {
        for &(k, a, b, h) in &bars {
            // Vertical from (x, 0) to (x, y) against bar [a, b] at height h.
            if j != k && a <= x && x <= b && h.signum() == y.signum() && h.abs() <= y.abs() {
                count += 1;
            }
        }
    }
    for (i, &(j, a, b, h)) in bars.iter().enumerate() {
        for &(k, c, d, g) in &bars[i + 1..] {
            if j != k && h == g && a <= d && c <= b {
                count += 1;
            }
        }
    }
    for (i, &(j, x, y)) in verticals.iter().enumerate() {
        for &(k, x2, y2) in &verticals[i + 1..] {
            if j != k && x == x2 && y.signum() == y2.signum() {
                count += 1;
            }
        }
    }
    count
}
