//! Labeled trivalent graphs and the split moves that evolve them.
//!
//! A graph stores oriented edges labeled by coefficient-group elements,
//! plus bookkeeping integers: every vertex and edge carries a distinct
//! label, and each vertex exposes three half-edge slots. Splits destroy
//! their support edge (and its vertices) and recreate them under fresh
//! labels; all other labels are inherited.
//!
//! Frozen conventions (used by both codec directions):
//!
//! | item | convention |
//! |------|------------|
//! | double-split config `l ∈ {0..3}` | `l = 2*ia + ib`; `ia` picks the moving half-edge among the two non-support slots at the initial vertex in ascending slot order, `ib` likewise at the terminal vertex |
//! | loop-split config | 0 = forward (stem times `g_e` on its loop side), 1 = backward (inverse factor) |
//! | slots at a vertex recreated by a double split | moved-in half-edge -> slot 1, surviving original -> slot 2, recreated support edge -> slot 3 |
//! | slots at a vertex recreated by a loop split | loop initial end -> slot 1, loop terminal end -> slot 2, stem -> slot 3 |
//! | labels created by a split | edge: max edge label + 1; vertices: max vertex label + 1 (initial side) and + 2 (terminal side) |

mod ball;
mod canon;
mod codec;
mod derive;

pub use ball::{enumerate_graph_ball, GraphBallReport};
pub use canon::{canonical_key, normalize_orientation};
pub use codec::{decode_derivation, encode_derivation, EncodingPair};
pub use derive::{
    canonical_derivation, canonical_derivation_traced, check_commute, is_canonical,
    is_split_ready, CanonicalDerivation, Derivation,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{Group, GroupElement};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {0} not found")]
    EdgeNotFound(u32),
    #[error("edge {0} is a loop; expected a non-loop edge")]
    UnexpectedLoop(u32),
    #[error("edge {0} is not a loop; expected a loop")]
    ExpectedLoop(u32),
    #[error("config {0} out of range for this split kind")]
    BadConfig(u8),
    #[error("graph invariant violated: {0}")]
    Invalid(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("stale support at step {0}: {1}")]
    StaleSupport(usize, String),
    #[error("derivation is not canonical")]
    NotCanonical,
    #[error("malformed encoding pair: {0}")]
    MalformedPair(String),
    #[error("ball enumeration exceeded the class guard ({0})")]
    ResourceGuard(u64),
    #[error(transparent)]
    Group(#[from] crate::group::GroupError),
}

/// Which end of an edge a half-edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum End {
    Init,
    Term,
}

/// A half-edge, named by its edge label and end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfRef {
    pub edge: u32,
    pub end: End,
}

/// Attachment point of a half-edge: vertex label plus slot index 0..3
/// (displayed as 1..3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Port {
    pub vertex: u32,
    pub slot: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRec {
    pub label: u32,
    pub slots: [HalfRef; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRec {
    pub label: u32,
    pub init: Port,
    pub term: Port,
    pub g: GroupElement,
}

impl EdgeRec {
    pub fn is_loop(&self) -> bool {
        self.init.vertex == self.term.vertex
    }

    pub fn port(&self, end: End) -> Port {
        match end {
            End::Init => self.init,
            End::Term => self.term,
        }
    }
}

/// A connected trivalent graph with oriented, group-labeled edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub group: Group,
    pub vertices: Vec<VertexRec>,
    pub edges: Vec<EdgeRec>,
}

/// Kind and data of a single split move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Double,
    Loop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Split {
    pub edge: u32,
    pub kind: SplitKind,
    pub config: u8,
}

impl LabeledGraph {
    pub fn vertex(&self, label: u32) -> Option<&VertexRec> {
        self.vertices.iter().find(|v| v.label == label)
    }

    pub fn edge(&self, label: u32) -> Option<&EdgeRec> {
        self.edges.iter().find(|e| e.label == label)
    }

    fn vertex_mut(&mut self, label: u32) -> &mut VertexRec {
        self.vertices.iter_mut().find(|v| v.label == label).expect("vertex")
    }

    fn edge_mut(&mut self, label: u32) -> &mut EdgeRec {
        self.edges.iter_mut().find(|e| e.label == label).expect("edge")
    }

    pub fn max_vertex_label(&self) -> u32 {
        self.vertices.iter().map(|v| v.label).max().unwrap_or(0)
    }

    pub fn max_edge_label(&self) -> u32 {
        self.edges.iter().map(|e| e.label).max().unwrap_or(0)
    }

    /// Rank of the fundamental group: E - V + 1 for a connected graph.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    /// The slot (0..3) holding the given half-edge at its vertex.
    pub fn slot_of(&self, half: HalfRef) -> Option<Port> {
        let e = self.edge(half.edge)?;
        Some(e.port(half.end))
    }

    /// Applies a split after checking kind and existence.
    pub fn apply(&self, split: &Split) -> Result<LabeledGraph, GraphError> {
        match split.kind {
            SplitKind::Double => self.double_split(split.edge, split.config),
            SplitKind::Loop => self.loop_split(split.edge, split.config),
        }
    }

    /// All splits available on this graph: 4 configs per non-loop edge,
    /// 2 per loop.
    pub fn available_splits(&self) -> Vec<Split> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.is_loop() {
                for config in 0..2 {
                    out.push(Split { edge: e.label, kind: SplitKind::Loop, config });
                }
            } else {
                for config in 0..4 {
                    out.push(Split { edge: e.label, kind: SplitKind::Double, config });
                }
            }
        }
        out
    }

    /// Double split along a non-loop edge. One chosen half-edge at each
    /// endpoint crosses to the other endpoint; crossing labels pick up a
    /// factor of the support label on the side facing the support.
    pub fn double_split(&self, edge: u32, config: u8) -> Result<LabeledGraph, GraphError> {
        if config > 3 {
            return Err(GraphError::BadConfig(config));
        }
        let e = self.edge(edge).ok_or(GraphError::EdgeNotFound(edge))?.clone();
        if e.is_loop() {
            return Err(GraphError::UnexpectedLoop(edge));
        }
        let u = e.init.vertex;
        let v = e.term.vertex;
        let g_e = e.g.clone();

        // Candidates in ascending slot order, excluding the support's own
        // half-edges.
        let candidates = |own_slot: u8| -> [u8; 2] {
            let mut slots = [0u8; 2];
            let mut k = 0;
            for s in 0..3u8 {
                if s != own_slot {
                    slots[k] = s;
                    k += 1;
                }
            }
            slots
        };
        let at_u = candidates(e.init.slot);
        let at_v = candidates(e.term.slot);
        let moving_u_slot = at_u[(config >> 1) as usize];
        let moving_v_slot = at_v[(config & 1) as usize];
        let staying_u_slot = at_u[1 - (config >> 1) as usize];
        let staying_v_slot = at_v[1 - (config & 1) as usize];

        let vert_u = self.vertex(u).expect("endpoint").clone();
        let vert_v = self.vertex(v).expect("endpoint").clone();
        let moved_from_u = vert_u.slots[moving_u_slot as usize];
        let moved_from_v = vert_v.slots[moving_v_slot as usize];
        let staying_at_u = vert_u.slots[staying_u_slot as usize];
        let staying_at_v = vert_v.slots[staying_v_slot as usize];

        let mut next = self.clone();

        // Label updates, both keyed to the original graph. Crossing from
        // the initial side: incoming half-edges append g_e, outgoing ones
        // prepend its inverse. Crossing from the terminal side: outgoing
        // prepend g_e, incoming append its inverse.
        {
            let a = next.edge_mut(moved_from_u.edge);
            a.g = match moved_from_u.end {
                End::Term => a.g.mul(&g_e)?,
                End::Init => g_e.inverse().mul(&a.g)?,
            };
        }
        {
            let b = next.edge_mut(moved_from_v.edge);
            b.g = match moved_from_v.end {
                End::Init => g_e.mul(&b.g)?,
                End::Term => b.g.mul(&g_e.inverse())?,
            };
        }

        let new_u_label = self.max_vertex_label() + 1;
        let new_v_label = self.max_vertex_label() + 2;
        let new_edge_label = self.max_edge_label() + 1;

        // Recreate the support edge under its fresh labels.
        {
            let rec = next.edge_mut(edge);
            rec.label = new_edge_label;
            rec.init = Port { vertex: new_u_label, slot: 2 };
            rec.term = Port { vertex: new_v_label, slot: 2 };
        }
        let f_init = HalfRef { edge: new_edge_label, end: End::Init };
        let f_term = HalfRef { edge: new_edge_label, end: End::Term };

        // New vertex at the initial side: moved-in, surviving, support.
        {
            let rec = next.vertex_mut(u);
            rec.label = new_u_label;
            rec.slots = [moved_from_v, staying_at_u, f_init];
        }
        {
            let rec = next.vertex_mut(v);
            rec.label = new_v_label;
            rec.slots = [moved_from_u, staying_at_v, f_term];
        }

        // Reattach ports of repositioned half-edges.
        next.set_port(moved_from_v, Port { vertex: new_u_label, slot: 0 });
        next.set_port(staying_at_u, Port { vertex: new_u_label, slot: 1 });
        next.set_port(moved_from_u, Port { vertex: new_v_label, slot: 0 });
        next.set_port(staying_at_v, Port { vertex: new_v_label, slot: 1 });

        Ok(next)
    }

    /// Loop split: the stem label picks up the loop label (or its
    /// inverse), and the loop edge and its vertex are recreated under
    /// fresh labels.
    pub fn loop_split(&self, edge: u32, config: u8) -> Result<LabeledGraph, GraphError> {
        if config > 1 {
            return Err(GraphError::BadConfig(config));
        }
        let e = self.edge(edge).ok_or(GraphError::EdgeNotFound(edge))?.clone();
        if !e.is_loop() {
            return Err(GraphError::ExpectedLoop(edge));
        }
        let w = e.init.vertex;
        let g_e = e.g.clone();
        let vert = self.vertex(w).expect("loop vertex").clone();
        let stem = *vert
            .slots
            .iter()
            .find(|h| h.edge != edge)
            .expect("trivalent loop vertex has a stem");

        let mut next = self.clone();
        {
            let a = next.edge_mut(stem.edge);
            // forward: term(a)=w -> g_a g_e; init(a)=w -> inv(g_e) g_a
            // backward: term(a)=w -> g_a inv(g_e); init(a)=w -> g_e g_a
            a.g = match (config, stem.end) {
                (0, End::Term) => a.g.mul(&g_e)?,
                (0, End::Init) => g_e.inverse().mul(&a.g)?,
                (1, End::Term) => a.g.mul(&g_e.inverse())?,
                (1, End::Init) => g_e.mul(&a.g)?,
                _ => unreachable!(),
            };
        }

        let new_v_label = self.max_vertex_label() + 1;
        let new_edge_label = self.max_edge_label() + 1;
        {
            let rec = next.edge_mut(edge);
            rec.label = new_edge_label;
            rec.init = Port { vertex: new_v_label, slot: 0 };
            rec.term = Port { vertex: new_v_label, slot: 1 };
        }
        {
            let rec = next.vertex_mut(w);
            rec.label = new_v_label;
            rec.slots = [
                HalfRef { edge: new_edge_label, end: End::Init },
                HalfRef { edge: new_edge_label, end: End::Term },
                stem,
            ];
        }
        next.set_port(stem, Port { vertex: new_v_label, slot: 2 });
        Ok(next)
    }

    fn set_port(&mut self, half: HalfRef, port: Port) {
        let rec = self.edge_mut(half.edge);
        match half.end {
            End::Init => rec.init = port,
            End::Term => rec.term = port,
        }
    }

    /// Structural validation: trivalence, label distinctness, slot/port
    /// consistency, connectedness, and the vertex/edge counts implied by
    /// the rank.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.rank();
        if self.vertices.len() != 2 * n - 2 || self.edges.len() != 3 * n - 3 {
            return Err(GraphError::Invalid(format!(
                "expected {} vertices / {} edges for rank {n}",
                2 * n - 2,
                3 * n - 3
            )));
        }
        let mut vlabels: Vec<u32> = self.vertices.iter().map(|v| v.label).collect();
        vlabels.sort_unstable();
        vlabels.dedup();
        if vlabels.len() != self.vertices.len() {
            return Err(GraphError::Invalid("duplicate vertex labels".into()));
        }
        let mut elabels: Vec<u32> = self.edges.iter().map(|e| e.label).collect();
        elabels.sort_unstable();
        elabels.dedup();
        if elabels.len() != self.edges.len() {
            return Err(GraphError::Invalid("duplicate edge labels".into()));
        }
        for v in &self.vertices {
            for (slot, half) in v.slots.iter().enumerate() {
                let e = self
                    .edge(half.edge)
                    .ok_or_else(|| GraphError::Invalid(format!("slot points to missing edge {}", half.edge)))?;
                let port = e.port(half.end);
                if port.vertex != v.label || port.slot != slot as u8 {
                    return Err(GraphError::Invalid(format!(
                        "slot {} of vertex {} disagrees with edge {}",
                        slot + 1,
                        v.label,
                        half.edge
                    )));
                }
            }
        }
        for e in &self.edges {
            if !self.group.contains(&e.g) {
                return Err(GraphError::Invalid(format!(
                    "edge {} label outside the coefficient group",
                    e.label
                )));
            }
            for end in [End::Init, End::Term] {
                let port = e.port(end);
                let v = self
                    .vertex(port.vertex)
                    .ok_or_else(|| GraphError::Invalid(format!("edge {} hangs on missing vertex", e.label)))?;
                if v.slots[port.slot as usize] != (HalfRef { edge: e.label, end }) {
                    return Err(GraphError::Invalid(format!(
                        "edge {} port disagrees with vertex {}",
                        e.label, port.vertex
                    )));
                }
            }
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut seen = vec![self.vertices[0].label];
        let mut stack = vec![self.vertices[0].label];
        while let Some(v) = stack.pop() {
            let rec = self.vertex(v).expect("vertex");
            for half in &rec.slots {
                let e = self.edge(half.edge).expect("edge");
                for w in [e.init.vertex, e.term.vertex] {
                    if !seen.contains(&w) {
                        seen.push(w);
                        stack.push(w);
                    }
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Dumbbell: two loops joined by a bar. Rank 2. Labels: loop at
    /// vertex 1, bar, loop at vertex 2.
    pub fn dumbbell(group: Group, labels: [GroupElement; 3]) -> LabeledGraph {
        let [l1, bar, l2] = labels;
        let g = LabeledGraph {
            group,
            vertices: vec![
                VertexRec {
                    label: 1,
                    slots: [
                        HalfRef { edge: 1, end: End::Init },
                        HalfRef { edge: 1, end: End::Term },
                        HalfRef { edge: 2, end: End::Init },
                    ],
                },
                VertexRec {
                    label: 2,
                    slots: [
                        HalfRef { edge: 3, end: End::Init },
                        HalfRef { edge: 3, end: End::Term },
                        HalfRef { edge: 2, end: End::Term },
                    ],
                },
            ],
            edges: vec![
                EdgeRec {
                    label: 1,
                    init: Port { vertex: 1, slot: 0 },
                    term: Port { vertex: 1, slot: 1 },
                    g: l1,
                },
                EdgeRec {
                    label: 2,
                    init: Port { vertex: 1, slot: 2 },
                    term: Port { vertex: 2, slot: 2 },
                    g: bar,
                },
                EdgeRec {
                    label: 3,
                    init: Port { vertex: 2, slot: 0 },
                    term: Port { vertex: 2, slot: 1 },
                    g: l2,
                },
            ],
        };
        debug_assert!(g.validate().is_ok());
        g
    }

    /// Theta: two vertices joined by three parallel edges, all oriented
    /// from vertex 1 to vertex 2. Rank 2.
    pub fn theta(group: Group, labels: [GroupElement; 3]) -> LabeledGraph {
        let mut vertices = Vec::new();
        for v in 1..=2u32 {
            vertices.push(VertexRec {
                label: v,
                slots: [
                    HalfRef { edge: 1, end: if v == 1 { End::Init } else { End::Term } },
                    HalfRef { edge: 2, end: if v == 1 { End::Init } else { End::Term } },
                    HalfRef { edge: 3, end: if v == 1 { End::Init } else { End::Term } },
                ],
            });
        }
        let edges = labels
            .into_iter()
            .enumerate()
            .map(|(i, g)| EdgeRec {
                label: i as u32 + 1,
                init: Port { vertex: 1, slot: i as u8 },
                term: Port { vertex: 2, slot: i as u8 },
                g,
            })
            .collect();
        let g = LabeledGraph { group, vertices, edges };
        debug_assert!(g.validate().is_ok());
        g
    }

    /// Builds a trivalent graph from a perfect pairing of half-edge stubs.
    /// Stub `3*v + s` is slot `s` of vertex `v`; pairs become edges
    /// oriented from the first stub, labeled in order.
    pub fn from_stub_pairing(
        group: Group,
        n_vertices: usize,
        pairing: &[(usize, usize)],
        labels: Vec<GroupElement>,
    ) -> Result<LabeledGraph, GraphError> {
        if pairing.len() != 3 * n_vertices / 2 || labels.len() != pairing.len() {
            return Err(GraphError::Invalid("stub pairing has wrong size".into()));
        }
        let mut used = vec![false; 3 * n_vertices];
        let placeholder = HalfRef { edge: 0, end: End::Init };
        let mut vertices: Vec<VertexRec> = (0..n_vertices)
            .map(|v| VertexRec { label: v as u32 + 1, slots: [placeholder; 3] })
            .collect();
        let mut edges = Vec::new();
        for (i, (&(a, b), g)) in pairing.iter().zip(labels).enumerate() {
            if a >= 3 * n_vertices || b >= 3 * n_vertices || used[a] || used[b] || a == b {
                return Err(GraphError::Invalid("bad stub pairing".into()));
            }
            used[a] = true;
            used[b] = true;
            let label = i as u32 + 1;
            let (va, sa) = (a / 3, (a % 3) as u8);
            let (vb, sb) = (b / 3, (b % 3) as u8);
            vertices[va].slots[sa as usize] = HalfRef { edge: label, end: End::Init };
            vertices[vb].slots[sb as usize] = HalfRef { edge: label, end: End::Term };
            edges.push(EdgeRec {
                label,
                init: Port { vertex: va as u32 + 1, slot: sa },
                term: Port { vertex: vb as u32 + 1, slot: sb },
                g,
            });
        }
        let g = LabeledGraph { group, vertices, edges };
        g.validate()?;
        Ok(g)
    }

    /// Spanning-tree cycle products: BFS tree from `root` taking edges in
    /// ascending label order, tree potentials multiplied along the way;
    /// one product per non-tree edge, in ascending edge-label order.
    pub fn fundamental_cycle_products(
        &self,
        root: u32,
    ) -> Result<Vec<(u32, GroupElement)>, GraphError> {
        let (tree, _) = self.spanning_tree(root)?;
        self.cycle_products_with_tree(root, &tree)
    }

    /// Cycle products relative to an explicit spanning tree.
    pub fn cycle_products_with_tree(
        &self,
        root: u32,
        tree: &[u32],
    ) -> Result<Vec<(u32, GroupElement)>, GraphError> {
        let mut potentials = vec![(root, self.group.identity())];
        let mut frontier = vec![root];
        while let Some(v) = frontier.pop() {
            let pv = potentials
                .iter()
                .find(|(u, _)| *u == v)
                .map(|(_, g)| g.clone())
                .expect("visited");
            for e in self.edges.iter().filter(|e| tree.contains(&e.label)) {
                let (to, step) = if e.init.vertex == v {
                    (e.term.vertex, e.g.clone())
                } else if e.term.vertex == v {
                    (e.init.vertex, e.g.inverse())
                } else {
                    continue;
                };
                if potentials.iter().any(|(u, _)| *u == to) {
                    continue;
                }
                potentials.push((to, pv.mul(&step)?));
                frontier.push(to);
            }
        }
        if potentials.len() != self.vertices.len() {
            return Err(GraphError::Invalid("tree does not span".into()));
        }
        let mut out = Vec::new();
        let mut edges: Vec<&EdgeRec> = self.edges.iter().collect();
        edges.sort_by_key(|e| e.label);
        for e in edges {
            if tree.contains(&e.label) {
                continue;
            }
            let pi = potentials
                .iter()
                .find(|(v, _)| *v == e.init.vertex)
                .map(|(_, g)| g.clone())
                .expect("connected");
            let pt = potentials
                .iter()
                .find(|(v, _)| *v == e.term.vertex)
                .map(|(_, g)| g.clone())
                .expect("connected");
            out.push((e.label, pi.mul(&e.g)?.mul(&pt.inverse())?));
        }
        Ok(out)
    }

    /// BFS spanning tree from `root`, exploring edges in ascending label
    /// order. Returns tree edge labels and the potential (path product
    /// from the root) at each vertex.
    pub fn spanning_tree(
        &self,
        root: u32,
    ) -> Result<(Vec<u32>, Vec<(u32, GroupElement)>), GraphError> {
        if self.vertex(root).is_none() {
            return Err(GraphError::Invalid(format!("no vertex labeled {root}")));
        }
        let mut tree = Vec::new();
        let mut potentials = vec![(root, self.group.identity())];
        let mut frontier = vec![root];
        let mut edges: Vec<&EdgeRec> = self.edges.iter().collect();
        edges.sort_by_key(|e| e.label);
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &v in &frontier {
                let pv = potentials
                    .iter()
                    .find(|(u, _)| *u == v)
                    .map(|(_, g)| g.clone())
                    .expect("visited");
                for e in &edges {
                    let (to, step) = if e.init.vertex == v {
                        (e.term.vertex, e.g.clone())
                    } else if e.term.vertex == v {
                        (e.init.vertex, e.g.inverse())
                    } else {
                        continue;
                    };
                    if potentials.iter().any(|(u, _)| *u == to) {
                        continue;
                    }
                    tree.push(e.label);
                    potentials.push((to, pv.mul(&step).expect("same group")));
                    next.push(to);
                }
            }
            frontier = next;
        }
        if potentials.len() != self.vertices.len() {
            return Err(GraphError::Disconnected);
        }
        Ok((tree, potentials))
    }
}

// ----- JSON serialization -----------------------------------------------

#[derive(Serialize, Deserialize)]
struct JsonVertex {
    label: u32,
    /// Edge labels at slots 1..3 (a loop lists its edge twice).
    slots: [u32; 3],
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    label: u32,
    /// [vertex label, slot 1..3]
    from: [u32; 2],
    to: [u32; 2],
    g: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    rank: usize,
    group: Group,
    vertices: Vec<JsonVertex>,
    edges: Vec<JsonEdge>,
}

pub fn element_to_json(g: &GroupElement) -> serde_json::Value {
    match g {
        GroupElement::Trivial => serde_json::json!(1),
        GroupElement::Free(w) => serde_json::json!(w.letters()),
        GroupElement::Cyclic { value, .. } => serde_json::json!(value),
    }
}

pub fn element_from_json(
    value: &serde_json::Value,
    group: &Group,
) -> Result<GroupElement, GraphError> {
    match group {
        Group::Trivial => match value.as_u64() {
            Some(1) => Ok(GroupElement::Trivial),
            _ => Err(GraphError::Invalid("trivial-group label must be 1".into())),
        },
        Group::Free { .. } => {
            let arr = value
                .as_array()
                .ok_or_else(|| GraphError::Invalid("free-group label must be an array".into()))?;
            let letters: Result<Vec<i32>, _> = arr
                .iter()
                .map(|x| {
                    x.as_i64()
                        .map(|v| v as i32)
                        .ok_or_else(|| GraphError::Invalid("bad free-word letter".into()))
                })
                .collect();
            Ok(GroupElement::Free(
                crate::group::FreeWord::from_letters(&letters?)
                    .map_err(|e| GraphError::Invalid(e.to_string()))?,
            ))
        }
        Group::Cyclic { order } => {
            let v = value
                .as_u64()
                .ok_or_else(|| GraphError::Invalid("cyclic label must be a residue".into()))?;
            Ok(GroupElement::Cyclic { value: (v % *order as u64) as u32, order: *order })
        }
    }
}

impl LabeledGraph {
    pub fn to_json(&self) -> serde_json::Value {
        let jg = JsonGraph {
            rank: self.rank(),
            group: self.group,
            vertices: self
                .vertices
                .iter()
                .map(|v| JsonVertex {
                    label: v.label,
                    slots: [v.slots[0].edge, v.slots[1].edge, v.slots[2].edge],
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| JsonEdge {
                    label: e.label,
                    from: [e.init.vertex, e.init.slot as u32 + 1],
                    to: [e.term.vertex, e.term.slot as u32 + 1],
                    g: element_to_json(&e.g),
                })
                .collect(),
        };
        serde_json::to_value(jg).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<LabeledGraph, GraphError> {
        let jg: JsonGraph = serde_json::from_value(value.clone())
            .map_err(|e| GraphError::Invalid(format!("bad graph JSON: {e}")))?;
        let mut edges = Vec::new();
        for e in &jg.edges {
            edges.push(EdgeRec {
                label: e.label,
                init: Port { vertex: e.from[0], slot: (e.from[1] - 1) as u8 },
                term: Port { vertex: e.to[0], slot: (e.to[1] - 1) as u8 },
                g: element_from_json(&e.g, &jg.group)?,
            });
        }
        let mut vertices = Vec::new();
        for v in &jg.vertices {
            let mut slots = [HalfRef { edge: 0, end: End::Init }; 3];
            for (s, slot_ref) in slots.iter_mut().enumerate() {
                let e_label = v.slots[s];
                let e = edges
                    .iter()
                    .find(|e| e.label == e_label)
                    .ok_or(GraphError::EdgeNotFound(e_label))?;
                let end = if e.init == (Port { vertex: v.label, slot: s as u8 }) {
                    End::Init
                } else if e.term == (Port { vertex: v.label, slot: s as u8 }) {
                    End::Term
                } else {
                    return Err(GraphError::Invalid(format!(
                        "edge {} does not attach to vertex {} slot {}",
                        e_label,
                        v.label,
                        s + 1
                    )));
                };
                *slot_ref = HalfRef { edge: e_label, end };
            }
            vertices.push(VertexRec { label: v.label, slots });
        }
        let g = LabeledGraph { group: jg.group, vertices, edges };
        g.validate()?;
        if g.rank() != jg.rank {
            return Err(GraphError::Invalid("declared rank disagrees with structure".into()));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FreeWord;

    fn trivial3() -> [GroupElement; 3] {
        [GroupElement::Trivial, GroupElement::Trivial, GroupElement::Trivial]
    }

    #[test]
    fn builders_validate() {
        let d = LabeledGraph::dumbbell(Group::Trivial, trivial3());
        d.validate().unwrap();
        assert_eq!(d.rank(), 2);
        let t = LabeledGraph::theta(Group::Trivial, trivial3());
        t.validate().unwrap();
        assert_eq!(t.rank(), 2);
    }

    #[test]
    fn double_split_preserves_shape_counts() {
        let d = LabeledGraph::dumbbell(Group::Trivial, trivial3());
        for config in 0..4 {
            let next = d.double_split(2, config).unwrap();
            next.validate().unwrap();
            assert_eq!(next.rank(), 2);
            assert!(next.max_vertex_label() <= 2 + 2);
            assert!(next.max_edge_label() <= 3 + 1);
        }
        assert_eq!(d.double_split(1, 0), Err(GraphError::UnexpectedLoop(1)));
        assert_eq!(d.double_split(9, 0), Err(GraphError::EdgeNotFound(9)));
    }

    #[test]
    fn double_split_on_dumbbell_bar_gives_theta() {
        let d = LabeledGraph::dumbbell(Group::Trivial, trivial3());
        let next = d.double_split(2, 0).unwrap();
        // Every edge now joins the two new vertices: a theta shape.
        assert!(next.edges.iter().all(|e| !e.is_loop()));
    }

    #[test]
    fn identity_support_label_leaves_labels_unchanged() {
        let group = Group::Free { rank: 2 };
        let x = GroupElement::Free(FreeWord::generator(0));
        let t = LabeledGraph::theta(
            group,
            [group.identity(), x.clone(), GroupElement::Free(FreeWord::generator(1))],
        );
        let next = t.double_split(1, 2).unwrap();
        let mut labels: Vec<&GroupElement> = next.edges.iter().map(|e| &e.g).collect();
        labels.sort_by_key(|g| g.serial());
        let mut expect: Vec<&GroupElement> = t.edges.iter().map(|e| &e.g).collect();
        expect.sort_by_key(|g| g.serial());
        assert_eq!(labels, expect);
    }

    #[test]
    fn loop_split_label_cases() {
        // Rank-1 labels: loop labeled x, stem labeled identity, with the
        // stem's terminal end on the loop vertex.
        let group = Group::Free { rank: 1 };
        let x = GroupElement::Free(FreeWord::generator(0));
        let d = LabeledGraph::dumbbell(group, [x.clone(), group.identity(), group.identity()]);
        // Stem edge 2 has its *init* end at vertex 1 (the loop-1 vertex).
        let fwd = d.loop_split(1, 0).unwrap();
        assert_eq!(fwd.edge(2).unwrap().g, x.inverse()); // init end: inv(g_e) g_a
        let bwd = d.loop_split(1, 1).unwrap();
        assert_eq!(bwd.edge(2).unwrap().g, x.clone()); // init end: g_e g_a
        // Loop 3 has the stem's *term* end: forward multiplies on the right.
        let fwd = d.loop_split(3, 0).unwrap();
        assert_eq!(fwd.edge(2).unwrap().g, group.identity());
        // Identity loop label: no change anywhere.
        let id_loop = LabeledGraph::dumbbell(group, [group.identity(), x.clone(), group.identity()]);
        let out = id_loop.loop_split(1, 0).unwrap();
        assert_eq!(out.edge(2).unwrap().g, x);
        // Forward then backward restores the stem label.
        let once = d.loop_split(1, 0).unwrap();
        let twice = once.loop_split(once.max_edge_label(), 1).unwrap();
        assert_eq!(twice.edge(2).unwrap().g, d.edge(2).unwrap().g);
        // Wrong kind.
        assert_eq!(d.loop_split(2, 0), Err(GraphError::ExpectedLoop(2)));
    }

    #[test]
    fn split_budget_labels() {
        let d = LabeledGraph::dumbbell(Group::Trivial, trivial3());
        let next = d.loop_split(1, 0).unwrap();
        next.validate().unwrap();
        assert_eq!(next.max_vertex_label(), 3);
        assert_eq!(next.max_edge_label(), 4);
    }

    #[test]
    fn theta_cycle_products_transport_under_splits() {
        // Splitting along the support preserves cycle products exactly
        // when the trees correspond: tree {support} before against tree
        // {recreated support} after. Checked with identity and
        // non-identity support labels, all four configurations.
        let group = Group::Free { rank: 3 };
        let x = GroupElement::Free(FreeWord::generator(0));
        let y = GroupElement::Free(FreeWord::generator(1));
        let z = GroupElement::Free(FreeWord::generator(2));
        for support_label in [group.identity(), z] {
            let t = LabeledGraph::theta(group, [support_label, x.clone(), y.clone()]);
            let before = t.cycle_products_with_tree(1, &[1]).unwrap();
            for config in 0..4 {
                let next = t.double_split(1, config).unwrap();
                let created = next.max_edge_label();
                let root = t.max_vertex_label() + 1; // init-side vertex
                let after = next.cycle_products_with_tree(root, &[created]).unwrap();
                let before_products: Vec<&GroupElement> =
                    before.iter().map(|(_, g)| g).collect();
                let after_products: Vec<&GroupElement> =
                    after.iter().map(|(_, g)| g).collect();
                assert_eq!(before_products, after_products, "config {config}");
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let group = Group::Cyclic { order: 3 };
        let g = LabeledGraph::theta(
            group,
            [
                GroupElement::Cyclic { value: 1, order: 3 },
                GroupElement::Cyclic { value: 2, order: 3 },
                GroupElement::Cyclic { value: 0, order: 3 },
            ],
        );
        let json = g.to_json();
        let back = LabeledGraph::from_json(&json).unwrap();
        assert_eq!(g, back);
    }
}
