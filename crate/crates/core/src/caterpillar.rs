//! Embedded caterpillars: a backbone path, leaves hanging off it, and a
//! fixed counterclockwise neighbor order (rotation) at every node.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

pub type NodeId = String;

/// Largest degree a node can have in any weak unit disk contact representation.
pub const MAX_DEGREE: usize = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CaterpillarError {
    #[error("port error: {0}")]
    Port(String),
    #[error("schema error: {0}")]
    Schema(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedCaterpillar {
    pub backbone: Vec<NodeId>,
    #[serde(deserialize_with = "unique_keys")]
    pub leaves: BTreeMap<NodeId, Vec<NodeId>>,
    #[serde(deserialize_with = "unique_keys")]
    pub rotation: BTreeMap<NodeId, Vec<NodeId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateNode { node: NodeId },
    UnknownNode { node: NodeId },
    DegreeViolation { node: NodeId, degree: usize },
    RotationViolation { node: NodeId, detail: String },
    LeafViolation { node: NodeId, detail: String },
    BackboneViolation { node: NodeId, detail: String },
    NotATree { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode { node } => write!(f, "duplicate node {node}"),
            Violation::UnknownNode { node } => write!(f, "unknown node {node}"),
            Violation::DegreeViolation { node, degree } => {
                write!(f, "node {node} has degree {degree} > {MAX_DEGREE}")
            }
            Violation::RotationViolation { node, detail } => write!(f, "rotation at {node}: {detail}"),
            Violation::LeafViolation { node, detail } => write!(f, "leaf {node}: {detail}"),
            Violation::BackboneViolation { node, detail } => write!(f, "backbone at {node}: {detail}"),
            Violation::NotATree { detail } => write!(f, "not a tree: {detail}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl EmbeddedCaterpillar {
    /// All node ids: backbone first, then leaves in backbone order.
    pub fn node_ids(&self) -> Vec<&NodeId> {
        let mut out: Vec<&NodeId> = self.backbone.iter().collect();
        for b in &self.backbone {
            if let Some(ls) = self.leaves.get(b) {
                out.extend(ls.iter());
            }
        }
        let bb: BTreeSet<&NodeId> = self.backbone.iter().collect();
        for (k, ls) in &self.leaves {
            if !bb.contains(k) {
                out.extend(ls.iter());
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.backbone.len() + self.leaves.values().map(Vec::len).sum::<usize>()
    }

    pub fn degree(&self, node: &str) -> usize {
        self.rotation.get(node).map_or(0, Vec::len)
    }

    pub fn is_backbone(&self, node: &str) -> bool {
        self.backbone.iter().any(|b| b == node)
    }

    /// Undirected edges, each reported once with the endpoints sorted.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for w in self.backbone.windows(2) {
            out.push(sorted_pair(&w[0], &w[1]));
        }
        for (b, ls) in &self.leaves {
            for l in ls {
                out.push(sorted_pair(b, l));
            }
        }
        out.sort();
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        let mut seen = BTreeSet::new();
        for id in self.node_ids() {
            if !seen.insert(id.clone()) {
                violations.push(Violation::DuplicateNode { node: id.clone() });
            }
        }
        let bb: BTreeSet<&NodeId> = self.backbone.iter().collect();
        for b in self.leaves.keys() {
            if !bb.contains(b) {
                violations.push(Violation::LeafViolation {
                    node: b.clone(),
                    detail: "leaf list attached to a non-backbone node".into(),
                });
            }
        }

        // Expected adjacency from the declared backbone and leaves.
        let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for id in &seen {
            adj.entry(id.as_str()).or_default();
        }
        for (a, b) in self.declared_edges() {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }

        for id in &seen {
            let expected = &adj[id.as_str()];
            match self.rotation.get(id) {
                None => {
                    if !expected.is_empty() {
                        violations.push(Violation::RotationViolation {
                            node: id.clone(),
                            detail: "missing rotation".into(),
                        });
                    }
                }
                Some(rot) => {
                    let listed: BTreeSet<&str> = rot.iter().map(String::as_str).collect();
                    if listed.len() != rot.len() {
                        violations.push(Violation::RotationViolation {
                            node: id.clone(),
                            detail: "neighbor listed more than once".into(),
                        });
                    }
                    if &listed != expected {
                        let missing: Vec<&str> = expected.difference(&listed).copied().collect();
                        let extra: Vec<&str> = listed.difference(expected).copied().collect();
                        violations.push(Violation::RotationViolation {
                            node: id.clone(),
                            detail: format!("missing {missing:?}, unexpected {extra:?}"),
                        });
                    }
                }
            }
            let degree = expected.len();
            if degree > MAX_DEGREE {
                violations.push(Violation::DegreeViolation { node: id.clone(), degree });
            }
        }
        for id in self.rotation.keys() {
            if !seen.contains(id) {
                violations.push(Violation::UnknownNode { node: id.clone() });
            }
        }

        // Leaves have exactly one neighbor, their backbone parent.
        for ls in self.leaves.values() {
            for l in ls {
                if let Some(rot) = self.rotation.get(l) {
                    if rot.len() != 1 {
                        violations.push(Violation::LeafViolation {
                            node: l.clone(),
                            detail: format!("degree {} instead of 1", rot.len()),
                        });
                    }
                }
            }
        }

        if self.backbone.is_empty() {
            violations.push(Violation::BackboneViolation {
                node: String::new(),
                detail: "empty backbone".into(),
            });
        }

        // Tree check: connected with |E| = |V| - 1.
        let n = seen.len();
        let m = self.declared_edges().len();
        if n > 0 {
            let mut stack = vec![self.backbone.first().map(String::as_str).unwrap_or_else(|| seen.iter().next().unwrap().as_str())];
            let mut reached = BTreeSet::new();
            while let Some(x) = stack.pop() {
                if !reached.insert(x) {
                    continue;
                }
                if let Some(ns) = adj.get(x) {
                    stack.extend(ns.iter().copied());
                }
            }
            if reached.len() != n || m + 1 != n {
                violations.push(Violation::NotATree {
                    detail: format!("{n} nodes, {m} edges, {} reachable", reached.len()),
                });
            }
        }

        ValidationReport { violations }
    }

    fn declared_edges(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for w in self.backbone.windows(2) {
            out.push((w[0].as_str(), w[1].as_str()));
        }
        for (b, ls) in &self.leaves {
            for l in ls {
                out.push((b.as_str(), l.as_str()));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("caterpillar serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CaterpillarError> {
        let c: EmbeddedCaterpillar =
            serde_json::from_str(text).map_err(|e| CaterpillarError::Schema(e.to_string()))?;
        let mut seen = BTreeSet::new();
        for id in c.node_ids() {
            if !seen.insert(id) {
                return Err(CaterpillarError::Schema(format!("duplicate node id {id}")));
            }
        }
        for id in c.rotation.keys() {
            if !seen.contains(id) {
                return Err(CaterpillarError::Schema(format!("rotation for unknown node {id}")));
            }
        }
        Ok(c)
    }

    /// Dense integer view used by the verifier and the oracle.
    pub fn indexed(&self) -> IndexedEmbedding {
        IndexedEmbedding::from_caterpillars(std::slice::from_ref(self))
    }

    /// Renames every node by prepending `prefix/`.
    pub fn namespaced(&self, prefix: &str) -> EmbeddedCaterpillar {
        let f = |s: &String| format!("{prefix}/{s}");
        EmbeddedCaterpillar {
            backbone: self.backbone.iter().map(f).collect(),
            leaves: self
                .leaves
                .iter()
                .map(|(k, v)| (f(k), v.iter().map(f).collect()))
                .collect(),
            rotation: self
                .rotation
                .iter()
                .map(|(k, v)| (f(k), v.iter().map(f).collect()))
                .collect(),
        }
    }
}

fn sorted_pair(a: &str, b: &str) -> (NodeId, NodeId) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Rejects JSON objects that repeat a key.
fn unique_keys<'de, D, V>(d: D) -> Result<BTreeMap<String, V>, D::Error>
where
    D: Deserializer<'de>,
    V: Deserialize<'de>,
{
    struct V2<V>(PhantomData<V>);
    impl<'de, V: Deserialize<'de>> Visitor<'de> for V2<V> {
        type Value = BTreeMap<String, V>;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an object with unique keys")
        }
        fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
            let mut out = BTreeMap::new();
            while let Some((k, v)) = map.next_entry::<String, V>()? {
                if out.contains_key(&k) {
                    return Err(de::Error::custom(format!("duplicate node id {k}")));
                }
                out.insert(k, v);
            }
            Ok(out)
        }
    }
    d.deserialize_map(V2(PhantomData))
}

/// Dense view of one or more embedded trees: node `i` has neighbors
/// `rotation[i]` in counterclockwise order.
#[derive(Clone, Debug)]
pub struct IndexedEmbedding {
    pub ids: Vec<NodeId>,
    pub index: HashMap<NodeId, usize>,
    pub rotation: Vec<Vec<usize>>,
    /// Per component, its backbone node indices in order.
    pub backbones: Vec<Vec<usize>>,
    /// Backbone parent of each leaf, `None` for backbone nodes.
    pub parent: Vec<Option<usize>>,
}

impl IndexedEmbedding {
    /// Builds the index. Node ids must be globally unique; rotations that
    /// name unknown nodes are dropped from the index.
    pub fn from_caterpillars(cs: &[EmbeddedCaterpillar]) -> Self {
        let mut ids = Vec::new();
        let mut index = HashMap::new();
        let mut parent = Vec::new();
        let mut backbones = Vec::new();
        for c in cs {
            let mut bb = Vec::new();
            for b in &c.backbone {
                let i = ids.len();
                if index.insert(b.clone(), i).is_none() {
                    ids.push(b.clone());
                    parent.push(None);
                    bb.push(i);
                }
            }
            for b in &c.backbone {
                if let Some(ls) = c.leaves.get(b) {
                    let pi = index[b];
                    for l in ls {
                        let i = ids.len();
                        if index.insert(l.clone(), i).is_none() {
                            ids.push(l.clone());
                            parent.push(Some(pi));
                        }
                    }
                }
            }
            backbones.push(bb);
        }
        let mut rotation = vec![Vec::new(); ids.len()];
        for c in cs {
            for (k, rot) in &c.rotation {
                if let Some(&i) = index.get(k) {
                    rotation[i] = rot.iter().filter_map(|r| index.get(r).copied()).collect();
                }
            }
        }
        IndexedEmbedding {
            ids,
            index,
            rotation,
            backbones,
            parent,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, rot) in self.rotation.iter().enumerate() {
            for &j in rot {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.rotation[a].contains(&b)
    }
}

/// Where a fragment splices into a larger backbone: `node` is the backbone
/// end and `stub` a placeholder leaf of `node` standing in for the neighbor
/// it will be joined to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub node: NodeId,
    pub stub: NodeId,
}

/// A caterpillar with designated splice ports. Port stubs are ordinary
/// leaves in `caterpillar` so that the fragment can be placed and searched
/// on its own; splicing removes them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaterpillarFragment {
    pub caterpillar: EmbeddedCaterpillar,
    pub entry: Option<Port>,
    pub exit: Option<Port>,
}

impl CaterpillarFragment {
    pub fn new(caterpillar: EmbeddedCaterpillar, entry: Option<Port>, exit: Option<Port>) -> Self {
        CaterpillarFragment {
            caterpillar,
            entry,
            exit,
        }
    }

    pub fn stubs(&self) -> Vec<&NodeId> {
        self.entry.iter().chain(self.exit.iter()).map(|p| &p.stub).collect()
    }

    /// Number of real disks, not counting port stubs.
    pub fn disk_count(&self) -> usize {
        self.caterpillar.node_count() - self.stubs().len()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = self.caterpillar.validate();
        let bb = &self.caterpillar.backbone;
        let check = |port: &Port, expected: Option<&NodeId>, what: &str, out: &mut Vec<Violation>| {
            if Some(&port.node) != expected {
                out.push(Violation::BackboneViolation {
                    node: port.node.clone(),
                    detail: format!("{what} port is not at the {what} end of the backbone"),
                });
            }
            let ok = self
                .caterpillar
                .leaves
                .get(&port.node)
                .is_some_and(|ls| ls.contains(&port.stub));
            if !ok {
                out.push(Violation::LeafViolation {
                    node: port.stub.clone(),
                    detail: format!("{what} stub is not a leaf of its port node"),
                });
            }
        };
        if let Some(p) = &self.entry {
            check(p, bb.first(), "entry", &mut report.violations);
        }
        if let Some(p) = &self.exit {
            check(p, bb.last(), "exit", &mut report.violations);
        }
        report
    }

    pub fn namespaced(&self, prefix: &str) -> CaterpillarFragment {
        let f = |p: &Port| Port {
            node: format!("{prefix}/{}", p.node),
            stub: format!("{prefix}/{}", p.stub),
        };
        CaterpillarFragment {
            caterpillar: self.caterpillar.namespaced(prefix),
            entry: self.entry.as_ref().map(f),
            exit: self.exit.as_ref().map(f),
        }
    }

    /// The caterpillar with port stubs removed.
    pub fn into_closed(self) -> EmbeddedCaterpillar {
        let mut c = self.caterpillar;
        for p in self.entry.iter().chain(self.exit.iter()) {
            remove_stub(&mut c, p);
        }
        c
    }
}

fn remove_stub(c: &mut EmbeddedCaterpillar, p: &Port) {
    if let Some(ls) = c.leaves.get_mut(&p.node) {
        ls.retain(|l| l != &p.stub);
        if ls.is_empty() {
            c.leaves.remove(&p.node);
        }
    }
    if let Some(rot) = c.rotation.get_mut(&p.node) {
        rot.retain(|l| l != &p.stub);
    }
    c.rotation.remove(&p.stub);
}

/// Joins `a`'s exit to `b`'s entry with one new backbone edge placed in the
/// slots their stubs reserved.
pub fn splice(mut a: CaterpillarFragment, b: CaterpillarFragment) -> Result<CaterpillarFragment, CaterpillarError> {
    splice_into(&mut a, b)?;
    Ok(a)
}

/// In-place variant of [`splice`]; cost is linear in the size of `b`.
pub fn splice_into(a: &mut CaterpillarFragment, b: CaterpillarFragment) -> Result<(), CaterpillarError> {
    let exit = a
        .exit
        .clone()
        .ok_or_else(|| CaterpillarError::Port("left fragment has no exit port".into()))?;
    let entry = b
        .entry
        .clone()
        .ok_or_else(|| CaterpillarError::Port("right fragment has no entry port".into()))?;
    if a.caterpillar.backbone.last() != Some(&exit.node) {
        return Err(CaterpillarError::Port(format!("exit port {} is not the backbone end", exit.node)));
    }
    if b.caterpillar.backbone.first() != Some(&entry.node) {
        return Err(CaterpillarError::Port(format!("entry port {} is not the backbone start", entry.node)));
    }
    let exit_has_stub = a
        .caterpillar
        .rotation
        .get(&exit.node)
        .is_some_and(|r| r.contains(&exit.stub));
    let entry_has_stub = b
        .caterpillar
        .rotation
        .get(&entry.node)
        .is_some_and(|r| r.contains(&entry.stub));
    if !exit_has_stub || !entry_has_stub {
        return Err(CaterpillarError::Port("splice slot already occupied".into()));
    }
    for id in b.caterpillar.rotation.keys() {
        if a.caterpillar.rotation.contains_key(id) && id != &exit.stub {
            return Err(CaterpillarError::Port(format!("node id {id} occurs in both fragments")));
        }
    }

    let CaterpillarFragment {
        caterpillar: mut bc,
        exit: b_exit,
        ..
    } = b;
    // Drop the stubs, then fill their rotation slots with the new edge.
    for (c, port, other) in [
        (&mut a.caterpillar, &exit, &entry.node),
        (&mut bc, &entry, &exit.node),
    ] {
        if let Some(rot) = c.rotation.get_mut(&port.node) {
            for r in rot.iter_mut() {
                if r == &port.stub {
                    *r = other.clone();
                }
            }
        }
        c.rotation.remove(&port.stub);
        if let Some(ls) = c.leaves.get_mut(&port.node) {
            ls.retain(|l| l != &port.stub);
            if ls.is_empty() {
                c.leaves.remove(&port.node);
            }
        }
    }
    a.caterpillar.backbone.extend(bc.backbone);
    a.caterpillar.leaves.extend(bc.leaves);
    a.caterpillar.rotation.extend(bc.rotation);
    a.exit = b_exit;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> String {
        x.to_string()
    }

    /// One backbone node with five leaves and an exit stub (the rigid start).
    pub(crate) fn star_with_exit() -> CaterpillarFragment {
        let mut c = EmbeddedCaterpillar::default();
        c.backbone.push(s("b"));
        let leaves: Vec<String> = (1..=5).map(|i| format!("l{i}")).collect();
        let mut rot = vec![s("out")];
        rot.extend(leaves.iter().cloned());
        let mut all = leaves.clone();
        all.push(s("out"));
        c.leaves.insert(s("b"), all.clone());
        c.rotation.insert(s("b"), rot);
        for l in all {
            c.rotation.insert(l, vec![s("b")]);
        }
        CaterpillarFragment::new(c, None, Some(Port { node: s("b"), stub: s("out") }))
    }

    fn single_with_entry(name: &str) -> CaterpillarFragment {
        let mut c = EmbeddedCaterpillar::default();
        let stub = format!("{name}_in");
        c.backbone.push(s(name));
        c.leaves.insert(s(name), vec![stub.clone()]);
        c.rotation.insert(s(name), vec![stub.clone()]);
        c.rotation.insert(stub.clone(), vec![s(name)]);
        CaterpillarFragment::new(c, Some(Port { node: s(name), stub }), None)
    }

    fn link(name: &str) -> CaterpillarFragment {
        let mut c = EmbeddedCaterpillar::default();
        let (i, o) = (format!("{name}_in"), format!("{name}_out"));
        c.backbone.push(s(name));
        c.leaves.insert(s(name), vec![i.clone(), o.clone()]);
        c.rotation.insert(s(name), vec![i.clone(), o.clone()]);
        c.rotation.insert(i.clone(), vec![s(name)]);
        c.rotation.insert(o.clone(), vec![s(name)]);
        CaterpillarFragment::new(
            c,
            Some(Port { node: s(name), stub: i }),
            Some(Port { node: s(name), stub: o }),
        )
    }

    #[test]
    fn star_is_valid() {
        let f = star_with_exit();
        assert!(f.validate().is_valid(), "{:?}", f.validate());
        let closed = f.into_closed();
        assert!(closed.validate().is_valid());
        assert_eq!(closed.degree("b"), 5);
    }

    #[test]
    fn degree_seven_is_reported() {
        let mut c = EmbeddedCaterpillar::default();
        c.backbone.push(s("b"));
        let ls: Vec<String> = (0..7).map(|i| format!("l{i}")).collect();
        c.leaves.insert(s("b"), ls.clone());
        c.rotation.insert(s("b"), ls.clone());
        for l in ls {
            c.rotation.insert(l, vec![s("b")]);
        }
        let r = c.validate();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DegreeViolation { degree: 7, .. })));
    }

    #[test]
    fn rotation_omitting_neighbor_is_reported() {
        let mut c = star_with_exit().into_closed();
        c.rotation.get_mut("b").unwrap().retain(|x| x != "l3");
        let r = c.validate();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::RotationViolation { node, .. } if node == "b")));
    }

    #[test]
    fn smallest_splice() {
        let f = splice(star_with_exit(), single_with_entry("c")).unwrap();
        assert!(f.validate().is_valid(), "{:?}", f.validate());
        assert_eq!(f.caterpillar.backbone, vec![s("b"), s("c")]);
        assert_eq!(f.caterpillar.leaves["b"].len(), 5);
        assert_eq!(f.caterpillar.rotation["b"][0], "c");
        assert_eq!(f.caterpillar.rotation["c"], vec![s("b")]);
    }

    #[test]
    fn terminal_fragment_cannot_lead() {
        let err = splice(single_with_entry("c"), link("d")).unwrap_err();
        assert!(matches!(err, CaterpillarError::Port(_)));
        let err = splice(star_with_exit(), star_with_exit()).unwrap_err();
        assert!(matches!(err, CaterpillarError::Port(_)));
    }

    #[test]
    fn splice_is_associative_on_backbone() {
        let left = splice(splice(star_with_exit(), link("x")).unwrap(), link("y")).unwrap();
        let right = splice(star_with_exit(), splice(link("x"), link("y")).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(left.caterpillar.backbone, vec![s("b"), s("x"), s("y")]);
        assert!(left.validate().is_valid());
    }

    #[test]
    fn json_round_trip() {
        let c = star_with_exit().into_closed();
        let back = EmbeddedCaterpillar::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let doc = r#"{"backbone":["a","a"],"leaves":{},"rotation":{"a":[]}}"#;
        assert!(matches!(EmbeddedCaterpillar::from_json(doc), Err(CaterpillarError::Schema(_))));
        let doc = r#"{"backbone":["a"],"leaves":{"a":["b"]},"rotation":{"a":["b"],"b":["a"],"b":["a"]}}"#;
        assert!(matches!(EmbeddedCaterpillar::from_json(doc), Err(CaterpillarError::Schema(_))));
        let doc = r#"{"backbone":["a"],"leaves":{"a":["a"]},"rotation":{"a":["a"]}}"#;
        assert!(matches!(EmbeddedCaterpillar::from_json(doc), Err(CaterpillarError::Schema(_))));
    }

    #[test]
    fn non_caterpillar_shapes_rejected() {
        // A leaf hanging off a leaf.
        let doc = r#"{"backbone":["a"],"leaves":{"a":["b"],"b":["c"]},"rotation":{"a":["b"],"b":["a","c"],"c":["b"]}}"#;
        let c = EmbeddedCaterpillar::from_json(doc).unwrap();
        assert!(!c.validate().is_valid());
    }
}
