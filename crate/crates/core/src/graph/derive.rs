//! Derivations (split sequences) and their canonical order.
//!
//! Split supports are named by edge labels, which are only meaningful
//! relative to the order of application: a reordering renumbers created
//! edges. Internally a support is therefore tracked as either an edge of
//! the starting graph or "the edge created by split j", which is stable
//! under reordering.

use super::{GraphError, LabeledGraph, Split, SplitKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub start: LabeledGraph,
    pub splits: Vec<Split>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SupportId {
    /// Edge label present in the starting graph.
    Original(u32),
    /// Edge created by the split at this (original) index.
    Created(usize),
}

/// A split with its order-independent support identity.
#[derive(Debug, Clone, Copy)]
struct TrackedSplit {
    orig_index: usize,
    support: SupportId,
    kind: SplitKind,
    config: u8,
}

/// Application result with the labels the split created.
pub(super) struct Applied {
    pub graph: LabeledGraph,
    pub created_edge: u32,
    pub created_vertices: Vec<u32>,
}

pub(super) fn apply_tracked(g: &LabeledGraph, split: &Split) -> Result<Applied, GraphError> {
    let next = g.apply(split)?;
    let created_edge = g.max_edge_label() + 1;
    let created_vertices = match split.kind {
        SplitKind::Double => vec![g.max_vertex_label() + 1, g.max_vertex_label() + 2],
        SplitKind::Loop => vec![g.max_vertex_label() + 1],
    };
    Ok(Applied { graph: next, created_edge, created_vertices })
}

impl Derivation {
    pub fn new(start: LabeledGraph, splits: Vec<Split>) -> Self {
        Derivation { start, splits }
    }

    pub fn len(&self) -> usize {
        self.splits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splits.is_empty()
    }

    /// The full trajectory; length `len() + 1`. Errors on a stale support.
    pub fn trajectory(&self) -> Result<Vec<LabeledGraph>, GraphError> {
        let mut out = vec![self.start.clone()];
        for (i, s) in self.splits.iter().enumerate() {
            let next = out
                .last()
                .unwrap()
                .apply(s)
                .map_err(|e| GraphError::StaleSupport(i + 1, e.to_string()))?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn result(&self) -> Result<LabeledGraph, GraphError> {
        Ok(self.trajectory()?.pop().unwrap())
    }

    /// Resolves each split's support to its order-independent identity.
    fn tracked(&self) -> Result<Vec<TrackedSplit>, GraphError> {
        let mut current = self.start.clone();
        let mut creator: Vec<(u32, usize)> = Vec::new(); // created label -> split index
        let mut out = Vec::with_capacity(self.splits.len());
        for (i, s) in self.splits.iter().enumerate() {
            if current.edge(s.edge).is_none() {
                return Err(GraphError::StaleSupport(i + 1, format!("no edge {}", s.edge)));
            }
            let support = match creator.iter().find(|(l, _)| *l == s.edge) {
                Some((_, j)) => SupportId::Created(*j),
                None => SupportId::Original(s.edge),
            };
            let applied = apply_tracked(&current, s)
                .map_err(|e| GraphError::StaleSupport(i + 1, e.to_string()))?;
            creator.push((applied.created_edge, i));
            current = applied.graph;
            out.push(TrackedSplit { orig_index: i, support, kind: s.kind, config: s.config });
        }
        Ok(out)
    }
}

/// True iff the support of split `k` (1-based) has a preimage in the
/// graph at index `i` of the trajectory that survives every intermediate
/// split, i.e. none of them destroys one of its endpoints.
pub fn is_split_ready(d: &Derivation, i: usize, k: usize) -> Result<bool, GraphError> {
    if k == 0 || k > d.splits.len() || i >= k {
        return Err(GraphError::Invalid(format!("need i < k <= {}", d.splits.len())));
    }
    let trajectory = d.trajectory()?;
    let target = d.splits[k - 1].edge;
    if trajectory[i].edge(target).is_none() {
        return Err(GraphError::Invalid(format!("edge {target} has no preimage at step {i}")));
    }
    for j in i + 1..k {
        let g = &trajectory[j - 1];
        let x = g.edge(target).expect("label persists");
        let s = g.edge(d.splits[j - 1].edge).ok_or_else(|| {
            GraphError::StaleSupport(j, format!("no edge {}", d.splits[j - 1].edge))
        })?;
        let destroyed = [s.init.vertex, s.term.vertex];
        if destroyed.contains(&x.init.vertex) || destroyed.contains(&x.term.vertex) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Applies the two splits in both orders and compares the results
/// exactly, after renaming created labels by the (stable) support label
/// of the split that created them. `s_second` must be ready before
/// `s_first`, i.e. both supports live in `g` and are vertex-disjoint.
pub fn check_commute(
    g: &LabeledGraph,
    s_first: &Split,
    s_second: &Split,
) -> Result<bool, GraphError> {
    let one = {
        let a = apply_tracked(g, s_first)?;
        let b = apply_tracked(&a.graph, s_second)?;
        normalize_created(&b.graph, &[(s_first, &a), (s_second, &b)])
    };
    let two = {
        let b = apply_tracked(g, s_second)?;
        let a = apply_tracked(&b.graph, s_first)?;
        normalize_created(&a.graph, &[(s_second, &b), (s_first, &a)])
    };
    Ok(one == two)
}

/// Renames labels created by the listed applications to values derived
/// from their support labels, then sorts records for comparison.
fn normalize_created(g: &LabeledGraph, created: &[(&Split, &Applied)]) -> LabeledGraph {
    let mut out = g.clone();
    for (split, applied) in created {
        let e_new = 1_000_000 + split.edge;
        for e in &mut out.edges {
            if e.label == applied.created_edge {
                e.label = e_new;
            }
        }
        for v in &mut out.vertices {
            for h in &mut v.slots {
                if h.edge == applied.created_edge {
                    h.edge = e_new;
                }
            }
        }
        for (pos, &vl) in applied.created_vertices.iter().enumerate() {
            let v_new = 2_000_000 + 2 * split.edge + pos as u32;
            for v in &mut out.vertices {
                if v.label == vl {
                    v.label = v_new;
                }
            }
            for e in &mut out.edges {
                if e.init.vertex == vl {
                    e.init.vertex = v_new;
                }
                if e.term.vertex == vl {
                    e.term.vertex = v_new;
                }
            }
        }
    }
    out.vertices.sort_by_key(|v| v.label);
    out.edges.sort_by_key(|e| e.label);
    out
}

/// Reorders a derivation into its canonical form: repeatedly promote,
/// among the remaining splits that are ready for the current prefix
/// graph, the one destroying the lowest-labeled vertex. The final graph
/// is in the same equivalence class; length is preserved.
pub fn canonical_derivation(d: &Derivation) -> Result<Derivation, GraphError> {
    Ok(canonical_derivation_traced(d)?.derivation)
}

/// Canonicalization output with provenance: per output position, the
/// index the split had in the input order, plus the final graph.
#[derive(Debug, Clone)]
pub struct CanonicalDerivation {
    pub derivation: Derivation,
    pub origins: Vec<usize>,
    pub result: LabeledGraph,
}

/// Canonical form plus, per output position, the index of that split in
/// the input order.
pub fn canonical_derivation_traced(d: &Derivation) -> Result<CanonicalDerivation, GraphError> {
    let mut remaining = d.tracked()?;
    let mut current = d.start.clone();
    let mut created_label: Vec<(usize, u32)> = Vec::new(); // orig split index -> created edge
    let mut out_splits = Vec::with_capacity(remaining.len());
    let mut origins = Vec::with_capacity(remaining.len());

    while !remaining.is_empty() {
        // Edge label -> current endpoints for quick survival checks.
        let resolve = |t: &TrackedSplit, created_label: &[(usize, u32)]| -> Option<u32> {
            match t.support {
                SupportId::Original(l) => Some(l),
                SupportId::Created(j) => {
                    created_label.iter().find(|(i, _)| *i == j).map(|(_, l)| *l)
                }
            }
        };
        let endpoints = |label: u32| -> Option<(u32, u32)> {
            current.edge(label).map(|e| (e.init.vertex, e.term.vertex))
        };

        let mut pick: Option<(usize, u32)> = None; // (position, lowest destroyed label)
        'candidates: for k in 0..remaining.len() {
            let Some(x_label) = resolve(&remaining[k], &created_label) else {
                continue;
            };
            let Some((xa, xb)) = endpoints(x_label) else {
                continue;
            };
            // Survival of the support through the remaining prefix: a
            // prefix split destroys the still-alive endpoints of its
            // support as seen in the current graph; fresh labels created
            // mid-prefix can never collide with current labels.
            let mut destroyed: Vec<u32> = Vec::new();
            for t in &remaining[..k] {
                let Some(l) = resolve(t, &created_label) else {
                    continue;
                };
                let Some((p, q)) = endpoints(l) else {
                    continue;
                };
                for v in [p, q] {
                    if !destroyed.contains(&v) {
                        if v == xa || v == xb {
                            continue 'candidates;
                        }
                        destroyed.push(v);
                    }
                }
            }
            let lowest = match remaining[k].kind {
                SplitKind::Double => xa.min(xb),
                SplitKind::Loop => xa,
            };
            if pick.map_or(true, |(_, best)| lowest < best) {
                pick = Some((k, lowest));
            }
        }
        let (k, _) = pick.expect("the first remaining split is always ready");
        let t = remaining.remove(k);
        let x_label = resolve(&t, &created_label).expect("resolved above");
        let split = Split { edge: x_label, kind: t.kind, config: t.config };
        let applied = apply_tracked(&current, &split)
            .map_err(|e| GraphError::StaleSupport(out_splits.len() + 1, e.to_string()))?;
        created_label.push((t.orig_index, applied.created_edge));
        current = applied.graph;
        out_splits.push(split);
        origins.push(t.orig_index);
    }
    Ok(CanonicalDerivation {
        derivation: Derivation { start: d.start.clone(), splits: out_splits },
        origins,
        result: current,
    })
}

/// A derivation is canonical when reordering it is the identity.
pub fn is_canonical(d: &Derivation) -> Result<bool, GraphError> {
    Ok(canonical_derivation(d)?.splits == d.splits)
}
