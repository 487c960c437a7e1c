//! Orientation normalization and canonical keys.
//!
//! Two graphs are equivalent when one arises from the other by reversing
//! edge orientations while inverting their labels, composed with a
//! label-preserving isomorphism. The key ignores the integer bookkeeping
//! labels and half-edge slots.

use super::{End, GraphError, LabeledGraph};

/// Deterministic orientation per edge: compares the serialized
/// (label, endpoints) tuple of the edge against its reversed-and-inverted
/// form and keeps the smaller one. Idempotent.
pub fn normalize_orientation(g: &LabeledGraph) -> LabeledGraph {
    let mut out = g.clone();
    let labels: Vec<u32> = out.edges.iter().map(|e| e.label).collect();
    for label in labels {
        let e = out.edge(label).expect("edge").clone();
        let fwd = (e.g.serial(), e.init.vertex, e.init.slot, e.term.vertex, e.term.slot);
        let inv = e.g.inverse();
        let rev = (inv.serial(), e.term.vertex, e.term.slot, e.init.vertex, e.init.slot);
        if rev < fwd {
            let rec = out.edge_mut(label);
            rec.init = e.term;
            rec.term = e.init;
            rec.g = inv;
            // Vertex slot records must swap their end tags too.
            for v in &mut out.vertices {
                for half in &mut v.slots {
                    if half.edge == label {
                        half.end = match half.end {
                            End::Init => End::Term,
                            End::Term => End::Init,
                        };
                    }
                }
            }
        }
    }
    out
}

/// Canonical key: equal exactly for equivalent graphs. Minimizes a
/// serialized edge multiset over all vertex bijections, choosing per edge
/// the smaller of the two orientation forms.
pub fn canonical_key(g: &LabeledGraph) -> Result<Vec<i32>, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let nv = g.vertices.len();
    let index_of: Vec<u32> = g.vertices.iter().map(|v| v.label).collect();
    let pos = |label: u32| index_of.iter().position(|&l| l == label).unwrap();

    // Per edge, both orientation serials computed once.
    struct Prepared {
        init: usize,
        term: usize,
        fwd: Vec<i32>,
        rev: Vec<i32>,
    }
    let prepared: Vec<Prepared> = g
        .edges
        .iter()
        .map(|e| Prepared {
            init: pos(e.init.vertex),
            term: pos(e.term.vertex),
            fwd: e.g.serial(),
            rev: e.g.inverse().serial(),
        })
        .collect();

    let mut best: Option<Vec<i32>> = None;
    let mut perm: Vec<usize> = (0..nv).collect();
    permute(&mut perm, 0, &mut |sigma| {
        let mut tuples: Vec<Vec<i32>> = prepared
            .iter()
            .map(|p| {
                let a = sigma[p.init] as i32;
                let b = sigma[p.term] as i32;
                let mut fwd = vec![a, b];
                fwd.extend_from_slice(&p.fwd);
                let mut rev = vec![b, a];
                rev.extend_from_slice(&p.rev);
                fwd.min(rev)
            })
            .collect();
        tuples.sort();
        let mut flat = Vec::with_capacity(tuples.len() * 6);
        for t in tuples {
            flat.push(i32::MIN); // separator
            flat.extend(t);
        }
        if best.as_ref().map_or(true, |b| flat < *b) {
            best = Some(flat);
        }
    });
    Ok(best.expect("at least one permutation"))
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}
