//! Triangulations of punctured surfaces as labeled ribbon duals.
//!
//! A triangulation is stored through its dual graph: one trivalent vertex
//! per triangle, edges across shared sides, free-group labels obtained by
//! collapsing a spanning tree. The ribbon structure (counterclockwise
//! cyclic order of the three slots at each vertex) pins the surface
//! embedding; faces of the ribbon graph correspond to vertices of the
//! triangulation.
//!
//! All vertices of the triangulation are treated as marked points, so the
//! label group is the free group of rank 2g + n - 1, the rank of the dual
//! graph.

mod flip;

pub use flip::{
    enumerate_flip_ball, flip, tri_key, triangulations_equal, FlipBall, FlipBallReport,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeRec, End, GraphError, HalfRef, LabeledGraph, Port, VertexRec};
use crate::group::{FreeWord, Group, GroupElement};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TriError {
    #[error("closed surfaces are unsupported (need at least one puncture)")]
    ClosedSurface,
    #[error("non-manifold or incomplete gluing: {0}")]
    NonManifold(String),
    #[error("gluing data is inconsistent with the declared surface: {0}")]
    SurfaceMismatch(String),
    #[error("edge {0} is a loop in the dual; its two triangles coincide and it cannot be flipped")]
    LoopFlip(u32),
    #[error("triangulations live on different surfaces")]
    DifferentSurfaces,
    #[error("flip ball exceeded the class guard ({0})")]
    ResourceGuard(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Input format: triangles with sides 0..3 in counterclockwise order;
/// each gluing entry identifies two sides (reversing direction, so the
/// result is oriented).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GluingSpec {
    pub triangles: usize,
    pub gluing: Vec<[[usize; 2]; 2]>,
    pub genus: usize,
    pub punctures: usize,
    pub n: usize,
}

/// A homotopy class of triangulations, held as a well-labeled ribbon dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibbonTriangulation {
    pub graph: LabeledGraph,
    /// Counterclockwise cyclic order of slot indices (0..3) per vertex
    /// label. Freshly built duals and every flip image use (0,1,2).
    pub ribbon: Vec<(u32, [u8; 3])>,
    pub genus: usize,
    pub punctures: usize,
    pub n_vertices: usize,
    /// Face boundary products at construction time; conjugacy classes of
    /// these are preserved by flips (one per puncture/vertex).
    pub face_refs: Vec<GroupElement>,
}

impl RibbonTriangulation {
    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    pub fn cyclic_order(&self, vertex: u32) -> Option<[u8; 3]> {
        self.ribbon.iter().find(|(v, _)| *v == vertex).map(|(_, o)| *o)
    }

    /// Walks all ribbon faces; each face is the orbit of a half-edge
    /// under "cross the edge, then turn counterclockwise".
    pub fn faces(&self) -> Vec<Vec<HalfRef>> {
        let mut remaining: Vec<HalfRef> = Vec::new();
        for e in &self.graph.edges {
            remaining.push(HalfRef { edge: e.label, end: End::Init });
            remaining.push(HalfRef { edge: e.label, end: End::Term });
        }
        let mut faces = Vec::new();
        while let Some(start) = remaining.first().copied() {
            let mut face = Vec::new();
            let mut h = start;
            loop {
                face.push(h);
                remaining.retain(|x| *x != h);
                h = self.face_next(h);
                if h == start {
                    break;
                }
            }
            faces.push(face);
        }
        faces
    }

    /// Successor of a half-edge along its face: cross to the other end of
    /// the edge, then take the next slot counterclockwise at that vertex.
    fn face_next(&self, h: HalfRef) -> HalfRef {
        let e = self.graph.edge(h.edge).expect("edge");
        let far = match h.end {
            End::Init => e.term,
            End::Term => e.init,
        };
        let order = self.cyclic_order(far.vertex).expect("ribbon order");
        let pos = order.iter().position(|&s| s == far.slot).expect("slot in order");
        let next_slot = order[(pos + 1) % 3];
        let v = self.graph.vertex(far.vertex).expect("vertex");
        v.slots[next_slot as usize]
    }

    /// Product of edge labels along a face, each edge contributing its
    /// label when traversed with its orientation and the inverse against
    /// it. The walk leaves through the half-edge we stand on.
    pub fn face_product(&self, face: &[HalfRef]) -> GroupElement {
        let mut acc = self.graph.group.identity();
        for h in face {
            let e = self.graph.edge(h.edge).expect("edge");
            let factor = match h.end {
                End::Init => e.g.clone(),
                End::Term => e.g.inverse(),
            };
            acc = acc.mul(&factor).expect("same group");
        }
        acc
    }

    /// Well-labeledness battery:
    /// 1. structure and rank match the surface data;
    /// 2. spanning-tree-normalized labels form a basis of the free group
    ///    (checked by graph folding);
    /// 3. face boundary products match the stored per-puncture classes up
    ///    to conjugacy, one-to-one.
    pub fn is_well_labeled(&self) -> bool {
        if self.graph.validate().is_err() {
            return false;
        }
        let m = 2 * self.genus + self.n_vertices - 1;
        if self.rank() != m || self.graph.group != (Group::Free { rank: m as u32 }) {
            return false;
        }
        let root = self.graph.vertices.iter().map(|v| v.label).min().unwrap();
        let Ok(cycles) = self.graph.fundamental_cycle_products(root) else {
            return false;
        };
        let words: Vec<FreeWord> = cycles
            .iter()
            .map(|(_, g)| match g {
                GroupElement::Free(w) => w.clone(),
                _ => FreeWord::identity(),
            })
            .collect();
        if !is_free_basis(&words, m) {
            return false;
        }
        let faces = self.faces();
        if faces.len() != self.n_vertices {
            return false;
        }
        let mut unmatched: Vec<GroupElement> = self.face_refs.clone();
        for face in &faces {
            let p = self.face_product(face);
            let hit = unmatched.iter().position(|r| {
                p.conjugate_equal(r).unwrap_or(false)
                    || p.conjugate_equal(&r.inverse()).unwrap_or(false)
            });
            match hit {
                Some(i) => {
                    unmatched.remove(i);
                }
                None => return false,
            }
        }
        unmatched.is_empty()
    }

    /// Output serialization: the dual graph JSON extended with the
    /// per-vertex cyclic orders and surface data.
    pub fn to_json(&self) -> serde_json::Value {
        let mut value = self.graph.to_json();
        let obj = value.as_object_mut().expect("object");
        obj.insert(
            "ribbon".into(),
            serde_json::json!(self
                .ribbon
                .iter()
                .map(|(v, o)| (v, [o[0] + 1, o[1] + 1, o[2] + 1]))
                .collect::<Vec<_>>()),
        );
        obj.insert("genus".into(), serde_json::json!(self.genus));
        obj.insert("punctures".into(), serde_json::json!(self.punctures));
        obj.insert("n".into(), serde_json::json!(self.n_vertices));
        value
    }
}

/// Whether `words` is a basis of the free group of rank `m`: fold the
/// wedge of the words and compare the core graph with the rose.
fn is_free_basis(words: &[FreeWord], m: usize) -> bool {
    if words.len() != m {
        return false;
    }
    // Stallings graph: vertices are usizes, directed edges labeled by
    // generators 1..=m. Start with one loop path per word at vertex 0.
    let mut edges: Vec<(usize, usize, i32)> = Vec::new(); // (from, to, positive gen)
    let mut next_vertex = 1usize;
    for w in words {
        if w.is_empty() {
            return false;
        }
        let mut at = 0usize;
        let letters = w.letters();
        for (i, &l) in letters.iter().enumerate() {
            let to = if i + 1 == letters.len() { 0 } else { next_vertex };
            if i + 1 != letters.len() {
                next_vertex += 1;
            }
            if l > 0 {
                edges.push((at, to, l));
            } else {
                edges.push((to, at, -l));
            }
            at = to;
        }
    }
    // Fold: identify targets of equal-label edges leaving one vertex, and
    // sources of equal-label edges entering one vertex.
    loop {
        let mut merge: Option<(usize, usize)> = None;
        'search: for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let (a, b, l) = edges[i];
                let (c, d, k) = edges[j];
                if l == k && a == c && b != d {
                    merge = Some((b, d));
                    break 'search;
                }
                if l == k && b == d && a != c {
                    merge = Some((a, c));
                    break 'search;
                }
                if l == k && a == c && b == d {
                    merge = Some((usize::MAX, j)); // duplicate edge
                    break 'search;
                }
            }
        }
        match merge {
            Some((usize::MAX, j)) => {
                edges.remove(j);
            }
            Some((x, y)) => {
                let keep = x.min(y);
                let drop = x.max(y);
                for e in &mut edges {
                    if e.0 == drop {
                        e.0 = keep;
                    }
                    if e.1 == drop {
                        e.1 = keep;
                    }
                }
            }
            None => break,
        }
    }
    // The folded graph represents the subgroup; it equals F_m iff the
    // core at the base vertex is the rose with m distinctly-labeled
    // petals. Since every edge came from a based loop, the whole graph is
    // the core.
    let vertices: std::collections::HashSet<usize> =
        edges.iter().flat_map(|&(a, b, _)| [a, b]).collect();
    if vertices.len() != 1 || edges.len() != m {
        return false;
    }
    let mut labels: Vec<i32> = edges.iter().map(|&(_, _, l)| l).collect();
    labels.sort_unstable();
    labels.dedup();
    labels.len() == m
}

/// Builds the labeled ribbon dual of a triangle gluing.
pub fn build_labeled_dual(spec: &GluingSpec) -> Result<RibbonTriangulation, TriError> {
    if spec.punctures == 0 {
        return Err(TriError::ClosedSurface);
    }
    if spec.punctures > spec.n {
        return Err(TriError::SurfaceMismatch("more punctures than vertices".into()));
    }
    let t = spec.triangles;
    if t == 0 || t % 2 != 0 {
        return Err(TriError::NonManifold(format!("{t} triangles cannot close up")));
    }
    if spec.gluing.len() != 3 * t / 2 {
        return Err(TriError::NonManifold(format!(
            "need {} gluing entries, got {}",
            3 * t / 2,
            spec.gluing.len()
        )));
    }
    let mut seen = vec![false; 3 * t];
    for pair in &spec.gluing {
        for side in pair {
            let [tri, s] = *side;
            if tri >= t || s >= 3 {
                return Err(TriError::NonManifold(format!("side [{tri},{s}] out of range")));
            }
            if seen[3 * tri + s] {
                return Err(TriError::NonManifold(format!("side [{tri},{s}] glued twice")));
            }
            seen[3 * tri + s] = true;
        }
    }
    if seen.iter().any(|&x| !x) {
        return Err(TriError::NonManifold("unglued side (surface has boundary)".into()));
    }

    // Dual graph skeleton: triangle i -> vertex i+1, side s -> slot s.
    let m = 2 * spec.genus + spec.n - 1;
    let group = Group::Free { rank: m as u32 };
    let placeholder = HalfRef { edge: 0, end: End::Init };
    let mut vertices: Vec<VertexRec> = (0..t)
        .map(|i| VertexRec { label: i as u32 + 1, slots: [placeholder; 3] })
        .collect();
    let mut edges = Vec::new();
    for (i, pair) in spec.gluing.iter().enumerate() {
        let label = i as u32 + 1;
        let [a, b] = *pair;
        vertices[a[0]].slots[a[1]] = HalfRef { edge: label, end: End::Init };
        vertices[b[0]].slots[b[1]] = HalfRef { edge: label, end: End::Term };
        edges.push(EdgeRec {
            label,
            init: Port { vertex: a[0] as u32 + 1, slot: a[1] as u8 },
            term: Port { vertex: b[0] as u32 + 1, slot: b[1] as u8 },
            g: group.identity(),
        });
    }
    let mut graph = LabeledGraph { group, vertices, edges };
    graph
        .validate()
        .map_err(|e| TriError::NonManifold(format!("dual graph invalid: {e}")))?;
    if graph.rank() != m {
        return Err(TriError::SurfaceMismatch(format!(
            "dual rank {} but 2g+n-1 = {m}",
            graph.rank()
        )));
    }

    // Labels: identity on a BFS spanning tree from the basepoint, fresh
    // free generators on the remaining edges in ascending label order.
    let (tree, _) = graph.spanning_tree(1).map_err(TriError::Graph)?;
    let mut gen_index = 0u32;
    let non_tree: Vec<u32> = graph
        .edges
        .iter()
        .map(|e| e.label)
        .filter(|l| !tree.contains(l))
        .collect();
    let mut sorted_non_tree = non_tree;
    sorted_non_tree.sort_unstable();
    for label in sorted_non_tree {
        let e = graph.edges.iter_mut().find(|e| e.label == label).unwrap();
        e.g = GroupElement::Free(FreeWord::generator(gen_index));
        gen_index += 1;
    }

    let ribbon = graph.vertices.iter().map(|v| (v.label, [0u8, 1, 2])).collect();
    let mut tri = RibbonTriangulation {
        graph,
        ribbon,
        genus: spec.genus,
        punctures: spec.punctures,
        n_vertices: spec.n,
        face_refs: Vec::new(),
    };
    let faces = tri.faces();
    if faces.len() != spec.n {
        return Err(TriError::SurfaceMismatch(format!(
            "{} ribbon faces but n = {}",
            faces.len(),
            spec.n
        )));
    }
    // Euler check: t - E + n = 2 - 2g.
    let chi = t as i64 - (3 * t / 2) as i64 + spec.n as i64;
    if chi != 2 - 2 * spec.genus as i64 {
        return Err(TriError::SurfaceMismatch(format!(
            "Euler characteristic {chi} but genus {}",
            spec.genus
        )));
    }
    tri.face_refs = faces.iter().map(|f| tri.face_product(f)).collect();
    debug_assert!(tri.is_well_labeled());
    Ok(tri)
}

/// Once-punctured torus: two triangles glued along all three sides.
pub fn punctured_torus() -> RibbonTriangulation {
    let spec = GluingSpec {
        triangles: 2,
        gluing: vec![[[0, 0], [1, 0]], [[0, 1], [1, 1]], [[0, 2], [1, 2]]],
        genus: 1,
        punctures: 1,
        n: 1,
    };
    build_labeled_dual(&spec).expect("valid torus gluing")
}

/// Four-punctured sphere: the tetrahedron, all vertices marked.
pub fn four_punctured_sphere() -> RibbonTriangulation {
    let spec = GluingSpec {
        triangles: 4,
        gluing: vec![
            [[0, 0], [3, 1]],
            [[0, 1], [1, 1]],
            [[0, 2], [2, 1]],
            [[1, 0], [2, 2]],
            [[1, 2], [3, 0]],
            [[2, 0], [3, 2]],
        ],
        genus: 0,
        punctures: 4,
        n: 4,
    };
    build_labeled_dual(&spec).expect("valid tetrahedron gluing")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_dual_shape() {
        let t = punctured_torus();
        assert_eq!(t.graph.vertices.len(), 2);
        assert_eq!(t.graph.edges.len(), 3);
        assert_eq!(t.rank(), 2);
        // Tree edge labeled identity; the two others carry the basis.
        let identities =
            t.graph.edges.iter().filter(|e| e.g.is_identity()).count();
        assert_eq!(identities, 1);
        let mut gens: Vec<Vec<i32>> = t
            .graph
            .edges
            .iter()
            .filter(|e| !e.g.is_identity())
            .map(|e| e.g.serial())
            .collect();
        gens.sort();
        assert_eq!(gens.len(), 2);
        assert_ne!(gens[0], gens[1]);
        assert_eq!(t.faces().len(), 1);
        assert!(t.is_well_labeled());
    }

    #[test]
    fn sphere_dual_shape() {
        let s = four_punctured_sphere();
        assert_eq!(s.rank(), 3); // m = 2*0 + 4 - 1
        assert_eq!(s.graph.vertices.len(), 4);
        assert_eq!(s.faces().len(), 4);
        assert!(s.is_well_labeled());
    }

    #[test]
    fn torus_face_is_commutator_class() {
        let t = punctured_torus();
        let faces = t.faces();
        let p = t.face_product(&faces[0]);
        // The single face class is the commutator of the basis (up to
        // inversion and conjugation).
        let x = GroupElement::Free(FreeWord::generator(0));
        let y = GroupElement::Free(FreeWord::generator(1));
        let comm = x
            .mul(&y)
            .unwrap()
            .mul(&x.inverse())
            .unwrap()
            .mul(&y.inverse())
            .unwrap();
        assert!(
            p.conjugate_equal(&comm).unwrap() || p.conjugate_equal(&comm.inverse()).unwrap()
        );
    }

    #[test]
    fn degenerate_inputs_error() {
        // Closed surface.
        let spec = GluingSpec {
            triangles: 2,
            gluing: vec![[[0, 0], [1, 0]], [[0, 1], [1, 1]], [[0, 2], [1, 2]]],
            genus: 1,
            punctures: 0,
            n: 1,
        };
        assert_eq!(build_labeled_dual(&spec).unwrap_err(), TriError::ClosedSurface);
        // Unglued side.
        let spec = GluingSpec {
            triangles: 2,
            gluing: vec![[[0, 0], [1, 0]], [[0, 1], [1, 1]]],
            genus: 1,
            punctures: 1,
            n: 1,
        };
        assert!(matches!(build_labeled_dual(&spec).unwrap_err(), TriError::NonManifold(_)));
        // Declared surface disagrees with the gluing.
        let spec = GluingSpec {
            triangles: 2,
            gluing: vec![[[0, 0], [1, 0]], [[0, 1], [1, 1]], [[0, 2], [1, 2]]],
            genus: 0,
            punctures: 1,
            n: 1,
        };
        assert!(matches!(build_labeled_dual(&spec).unwrap_err(), TriError::SurfaceMismatch(_)));
    }

    #[test]
    fn corrupting_a_label_breaks_well_labeledness() {
        let mut t = punctured_torus();
        assert!(t.is_well_labeled());
        // Square a non-tree label: the face class changes.
        let target = t
            .graph
            .edges
            .iter()
            .position(|e| !e.g.is_identity())
            .unwrap();
        let g = t.graph.edges[target].g.clone();
        t.graph.edges[target].g = g.mul(&g).unwrap();
        assert!(!t.is_well_labeled());
    }

    #[test]
    fn two_vertex_torus_instance() {
        // Star-subdivided punctured torus: one ideal vertex plus an
        // interior vertex (n = 2 > p = 1). All vertices are treated as
        // marked points, so the label group is free of rank 2g+n-1 = 3.
        let spec = GluingSpec {
            triangles: 4,
            gluing: vec![
                [[0, 0], [1, 0]],
                [[0, 1], [2, 0]],
                [[0, 2], [3, 0]],
                [[1, 1], [2, 2]],
                [[2, 1], [3, 2]],
                [[3, 1], [1, 2]],
            ],
            genus: 1,
            punctures: 1,
            n: 2,
        };
        let t = build_labeled_dual(&spec).unwrap();
        assert_eq!(t.rank(), 3);
        assert_eq!(t.faces().len(), 2);
        assert!(t.is_well_labeled());
        for e in t.graph.edges.iter().filter(|e| !e.is_loop()).map(|e| e.label) {
            let once = crate::tri::flip(&t, e).unwrap();
            assert!(once.is_well_labeled());
            let back = crate::tri::flip(&once, once.graph.max_edge_label()).unwrap();
            assert!(crate::tri::triangulations_equal(&t, &back).unwrap());
        }
    }

    #[test]
    fn ribbon_serialization_extends_graph_json() {
        let t = punctured_torus();
        let v = t.to_json();
        assert!(v.get("vertices").is_some());
        assert!(v.get("edges").is_some());
        assert_eq!(v["genus"], 1);
        assert_eq!(v["punctures"], 1);
        assert_eq!(v["n"], 1);
        let ribbon = v["ribbon"].as_array().unwrap();
        assert_eq!(ribbon.len(), 2);
    }

    #[test]
    fn basis_detector() {
        let w = |ls: &[i32]| FreeWord::from_letters(ls).unwrap();
        assert!(is_free_basis(&[w(&[1]), w(&[2])], 2));
        assert!(is_free_basis(&[w(&[1, 2]), w(&[2])], 2));
        assert!(!is_free_basis(&[w(&[1, 1]), w(&[2])], 2)); // proper subgroup
        assert!(!is_free_basis(&[w(&[1]), w(&[1])], 2));
        assert!(!is_free_basis(&[w(&[1]), w(&[-1])], 2));
        assert!(is_free_basis(&[w(&[2, 1, -2]), w(&[2])], 2));
        assert!(!is_free_basis(&[w(&[1]), w(&[2]), w(&[1, 2])], 3));
    }
}
