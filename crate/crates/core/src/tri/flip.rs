//! Diagonal flips as their dual split moves, and equality of
//! triangulations via a ribbon-and-holonomy canonical key.
//!
//! Flip rule: at each endpoint of the dual edge, the half-edge that moves
//! across is the counterclockwise predecessor of the edge's own slot.
//! With the split's slot conventions the recreated vertices again read
//! counterclockwise in slot order, so the ribbon data stays (1,2,3).
//!
//! Equality: flips change labels by vertex-potential (gauge) factors, so
//! two duals represent the same triangulation class exactly when some
//! ribbon isomorphism matches their spanning-tree-normalized labels up to
//! one global conjugation. The key canonicalizes all of that.

use std::collections::HashSet;

use serde::Serialize;

use super::{RibbonTriangulation, TriError};
use crate::graph::{End, HalfRef};
use crate::group::{FreeWord, GroupElement};

/// Flips the triangulation edge dual to `edge`. Errors when the dual
/// edge is a loop (one self-glued triangle on both sides).
pub fn flip(t: &RibbonTriangulation, edge: u32) -> Result<RibbonTriangulation, TriError> {
    let e = t
        .graph
        .edge(edge)
        .ok_or(TriError::Graph(crate::graph::GraphError::EdgeNotFound(edge)))?
        .clone();
    if e.is_loop() {
        return Err(TriError::LoopFlip(edge));
    }
    let moving_slot = |vertex: u32, own_slot: u8| -> u8 {
        let order = t.cyclic_order(vertex).expect("ribbon order");
        let pos = order.iter().position(|&s| s == own_slot).expect("slot listed");
        order[(pos + 2) % 3]
    };
    let m_u = moving_slot(e.init.vertex, e.init.slot);
    let m_v = moving_slot(e.term.vertex, e.term.slot);
    // Candidate index: non-support slots in ascending order.
    let index_among = |own_slot: u8, chosen: u8| -> u8 {
        let mut cands: Vec<u8> = (0..3).filter(|&s| s != own_slot).collect();
        cands.sort_unstable();
        cands.iter().position(|&s| s == chosen).expect("chosen is a candidate") as u8
    };
    let config = 2 * index_among(e.init.slot, m_u) + index_among(e.term.slot, m_v);
    let graph = t.graph.double_split(edge, config)?;
    let new_u = t.graph.max_vertex_label() + 1;
    let new_v = t.graph.max_vertex_label() + 2;
    let mut ribbon: Vec<(u32, [u8; 3])> = t
        .ribbon
        .iter()
        .filter(|(v, _)| *v != e.init.vertex && *v != e.term.vertex)
        .cloned()
        .collect();
    ribbon.push((new_u, [0, 1, 2]));
    ribbon.push((new_v, [0, 1, 2]));
    ribbon.sort_by_key(|(v, _)| *v);
    Ok(RibbonTriangulation {
        graph,
        ribbon,
        genus: t.genus,
        punctures: t.punctures,
        n_vertices: t.n_vertices,
        face_refs: t.face_refs.clone(),
    })
}

/// Canonical key deciding triangulation equality: minimal rooted
/// combinatorial-map code over all root half-edges, paired with the
/// tree-normalized labels canonicalized up to simultaneous conjugation.
pub fn tri_key(t: &RibbonTriangulation) -> Vec<i32> {
    let halves: Vec<HalfRef> = t
        .graph
        .edges
        .iter()
        .flat_map(|e| {
            [
                HalfRef { edge: e.label, end: End::Init },
                HalfRef { edge: e.label, end: End::Term },
            ]
        })
        .collect();
    let mut best: Option<Vec<i32>> = None;
    for &root in &halves {
        let candidate = rooted_code(t, root);
        if best.as_ref().map_or(true, |b| candidate < *b) {
            best = Some(candidate);
        }
    }
    best.expect("non-empty graph")
}

/// Equality on the same surface; errors when the surface data differ.
pub fn triangulations_equal(
    a: &RibbonTriangulation,
    b: &RibbonTriangulation,
) -> Result<bool, TriError> {
    if (a.genus, a.punctures, a.n_vertices) != (b.genus, b.punctures, b.n_vertices) {
        return Err(TriError::DifferentSurfaces);
    }
    Ok(tri_key(a) == tri_key(b))
}

fn twin(h: HalfRef) -> HalfRef {
    HalfRef {
        edge: h.edge,
        end: match h.end {
            End::Init => End::Term,
            End::Term => End::Init,
        },
    }
}

/// Numbers all half-edges from the root by a deterministic traversal,
/// then serializes the rotation and twin permutations plus the
/// gauge-normalized labels.
fn rooted_code(t: &RibbonTriangulation, root: HalfRef) -> Vec<i32> {
    let g = &t.graph;
    let sigma = |h: HalfRef| -> HalfRef {
        let port = g.slot_of(h).expect("attached");
        let order = t.cyclic_order(port.vertex).expect("ribbon");
        let pos = order.iter().position(|&s| s == port.slot).expect("slot");
        let next = order[(pos + 1) % 3];
        g.vertex(port.vertex).expect("vertex").slots[next as usize]
    };
    let mut numbered: Vec<HalfRef> = vec![root];
    let number_of = |numbered: &[HalfRef], h: HalfRef| -> Option<usize> {
        numbered.iter().position(|&x| x == h)
    };
    let mut i = 0;
    while i < numbered.len() {
        let h = numbered[i];
        i += 1;
        let mut cur = sigma(h);
        while cur != h {
            if number_of(&numbered, cur).is_none() {
                numbered.push(cur);
            }
            cur = sigma(cur);
        }
        let tw = twin(h);
        if number_of(&numbered, tw).is_none() {
            numbered.push(tw);
        }
    }
    let mut code: Vec<i32> = Vec::with_capacity(numbered.len() * 2 + 16);
    for &h in &numbered {
        code.push(number_of(&numbered, sigma(h)).unwrap() as i32);
        code.push(number_of(&numbered, twin(h)).unwrap() as i32);
    }

    // Gauge: potentials along the traversal tree make tree labels
    // identity; remaining labels are the holonomy tuple.
    let mut potentials: Vec<(u32, GroupElement)> = Vec::new();
    let root_vertex = g.slot_of(root).expect("attached").vertex;
    potentials.push((root_vertex, g.group.identity()));
    for &h in &numbered {
        let near = g.slot_of(h).expect("attached").vertex;
        let far = g.slot_of(twin(h)).expect("attached").vertex;
        let near_pot = potentials.iter().find(|(v, _)| *v == near).map(|(_, p)| p.clone());
        let far_known = potentials.iter().any(|(v, _)| *v == far);
        if let Some(p) = near_pot {
            if !far_known {
                let e = g.edge(h.edge).expect("edge");
                let factor = match h.end {
                    End::Init => e.g.clone(),
                    End::Term => e.g.inverse(),
                };
                potentials.push((far, p.mul(&factor).expect("same group")));
            }
        }
    }
    // Normalized labels in canonical edge order (by smaller half number),
    // oriented from the smaller-numbered half.
    let mut edge_order: Vec<(usize, HalfRef)> = g
        .edges
        .iter()
        .map(|e| {
            let hi = HalfRef { edge: e.label, end: End::Init };
            let ht = HalfRef { edge: e.label, end: End::Term };
            let ni = number_of(&numbered, hi).unwrap();
            let nt = number_of(&numbered, ht).unwrap();
            if ni < nt {
                (ni, hi)
            } else {
                (nt, ht)
            }
        })
        .collect();
    edge_order.sort_by_key(|(n, _)| *n);
    let pot = |v: u32| -> GroupElement {
        potentials.iter().find(|(u, _)| *u == v).map(|(_, p)| p.clone()).expect("connected")
    };
    let tuple: Vec<FreeWord> = edge_order
        .iter()
        .map(|(_, h)| {
            let e = g.edge(h.edge).expect("edge");
            // Label read in the direction leaving the smaller half.
            let (from, to, raw) = match h.end {
                End::Init => (e.init.vertex, e.term.vertex, e.g.clone()),
                End::Term => (e.term.vertex, e.init.vertex, e.g.inverse()),
            };
            let normalized = pot(from).mul(&raw).expect("group").mul(&pot(to).inverse()).expect("group");
            match normalized {
                GroupElement::Free(w) => w,
                other => {
                    debug_assert!(other.is_identity());
                    FreeWord::identity()
                }
            }
        })
        .collect();
    let canonical = conjugation_canonical(&tuple, free_rank(t));
    for w in canonical {
        code.push(i32::MIN);
        code.extend_from_slice(w.letters());
    }
    code
}

fn free_rank(t: &RibbonTriangulation) -> u32 {
    match t.graph.group {
        crate::group::Group::Free { rank } => rank,
        _ => 0,
    }
}

fn tuple_len(tuple: &[FreeWord]) -> usize {
    tuple.iter().map(FreeWord::len).sum()
}

fn conj_all(tuple: &[FreeWord], letter: i32) -> Vec<FreeWord> {
    let c = FreeWord::from_letters(&[letter]).expect("nonzero");
    let ci = c.inverse();
    tuple.iter().map(|w| c.mul(w).mul(&ci)).collect()
}

fn serialize_tuple(tuple: &[FreeWord]) -> Vec<i32> {
    let mut out = Vec::new();
    for w in tuple {
        out.push(i32::MIN);
        out.extend_from_slice(w.letters());
    }
    out
}

/// Canonical representative of a tuple of words under simultaneous
/// conjugation: strict descent in total length (the length function is
/// convex over conjugators, so greedy descent reaches the minimum), then
/// the lexicographically least tuple over the connected plateau of
/// minimum-length conjugates.
fn conjugation_canonical(tuple: &[FreeWord], rank: u32) -> Vec<FreeWord> {
    let letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
    let mut current = tuple.to_vec();
    loop {
        let here = tuple_len(&current);
        let better = letters
            .iter()
            .map(|&l| conj_all(&current, l))
            .find(|cand| tuple_len(cand) < here);
        match better {
            Some(cand) => current = cand,
            None => break,
        }
    }
    let min_len = tuple_len(&current);
    let mut seen: HashSet<Vec<i32>> = HashSet::new();
    let mut queue = vec![current.clone()];
    let mut best = serialize_tuple(&current);
    seen.insert(best.clone());
    while let Some(item) = queue.pop() {
        for &l in &letters {
            let cand = conj_all(&item, l);
            if tuple_len(&cand) != min_len {
                continue;
            }
            let ser = serialize_tuple(&cand);
            if seen.insert(ser.clone()) {
                if ser < best {
                    best = ser.clone();
                }
                queue.push(cand);
            }
        }
    }
    // Decode best back into words.
    let mut out = Vec::new();
    let mut cur: Option<Vec<i32>> = None;
    for &x in &best {
        if x == i32::MIN {
            if let Some(w) = cur.take() {
                out.push(FreeWord::from_letters(&w).expect("reduced"));
            }
            cur = Some(Vec::new());
        } else if let Some(w) = &mut cur {
            w.push(x);
        }
    }
    if let Some(w) = cur.take() {
        out.push(FreeWord::from_letters(&w).expect("reduced"));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct FlipBallReport {
    pub dual_rank: usize,
    pub sizes: Vec<u64>,
    pub log_ratios: Vec<Option<f64>>,
    /// log of 4^(5n-5+3r) with n the dual rank.
    pub bound_logs: Vec<f64>,
    pub limit: f64,
}

pub struct FlipBall {
    pub report: FlipBallReport,
    pub representatives: Vec<(RibbonTriangulation, usize)>,
}

/// BFS over diagonal flips, deduplicating by `tri_key`.
pub fn enumerate_flip_ball(
    t0: &RibbonTriangulation,
    radius: usize,
    guard: u64,
) -> Result<FlipBall, TriError> {
    let mut keys: HashSet<Vec<i32>> = HashSet::new();
    keys.insert(tri_key(t0));
    let mut representatives = vec![(t0.clone(), 0usize)];
    let mut sizes = vec![1u64];
    let mut frontier = vec![t0.clone()];
    for r in 1..=radius {
        let mut next = Vec::new();
        for t in &frontier {
            let flippable: Vec<u32> = t
                .graph
                .edges
                .iter()
                .filter(|e| !e.is_loop())
                .map(|e| e.label)
                .collect();
            for edge in flippable {
                let image = flip(t, edge)?;
                let key = tri_key(&image);
                if keys.contains(&key) {
                    continue;
                }
                if keys.len() as u64 >= guard {
                    return Err(TriError::ResourceGuard(guard));
                }
                keys.insert(key);
                representatives.push((image.clone(), r));
                next.push(image);
            }
        }
        sizes.push(sizes[r - 1] + next.len() as u64);
        frontier = next;
    }
    let n = t0.rank();
    let log_ratios = sizes
        .iter()
        .enumerate()
        .map(|(r, &s)| if r == 0 { None } else { Some((s as f64).ln() / r as f64) })
        .collect();
    let bound_logs = (0..=radius)
        .map(|r| ((5 * n - 5 + 3 * r) as f64) * 4f64.ln())
        .collect();
    Ok(FlipBall {
        report: FlipBallReport {
            dual_rank: n,
            sizes,
            log_ratios,
            bound_logs,
            limit: 3.0 * 4f64.ln(),
        },
        representatives,
    })
}
