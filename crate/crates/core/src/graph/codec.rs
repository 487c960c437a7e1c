//! Encoding canonical derivations as a pair of maps.
//!
//! `phi` sends each vertex label to 0 when it is never destroyed within
//! the budget, and otherwise to the slot label (1..3) of the destroying
//! split's support at that vertex (for a loop support, the smaller of its
//! two slots). `psi` sends each edge label to the configuration of the
//! split it supports, or 0 when it never supports one. Decoding scans
//! vertex labels in ascending order and applies a split at the first
//! matched edge, which by canonicality is exactly the next split.

use serde::{Deserialize, Serialize};

use super::derive::is_canonical;
use super::{Derivation, GraphError, Split, SplitKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingPair {
    pub rank: usize,
    pub budget: usize,
    /// Indexed by vertex label - 1; domain size 2n-2+2R.
    pub phi: Vec<u8>,
    /// Indexed by edge label - 1; domain size 3n-3+R.
    pub psi: Vec<u8>,
}

impl EncodingPair {
    pub fn zeros(rank: usize, budget: usize) -> Self {
        EncodingPair {
            rank,
            budget,
            phi: vec![0; 2 * rank - 2 + 2 * budget],
            psi: vec![0; 3 * rank - 3 + budget],
        }
    }
}

/// Encodes a canonical derivation of length at most `budget`.
pub fn encode_derivation(d: &Derivation, budget: usize) -> Result<EncodingPair, GraphError> {
    if d.len() > budget {
        return Err(GraphError::Invalid(format!(
            "derivation length {} exceeds budget {budget}",
            d.len()
        )));
    }
    if !is_canonical(d)? {
        return Err(GraphError::NotCanonical);
    }
    let rank = d.start.rank();
    let mut pair = EncodingPair::zeros(rank, budget);
    let trajectory = d.trajectory()?;
    for (j, split) in d.splits.iter().enumerate() {
        let g = &trajectory[j];
        let e = g.edge(split.edge).expect("valid trajectory");
        pair.psi[e.label as usize - 1] = split.config;
        match split.kind {
            SplitKind::Double => {
                pair.phi[e.init.vertex as usize - 1] = e.init.slot + 1;
                pair.phi[e.term.vertex as usize - 1] = e.term.slot + 1;
            }
            SplitKind::Loop => {
                pair.phi[e.init.vertex as usize - 1] = e.init.slot.min(e.term.slot) + 1;
            }
        }
    }
    Ok(pair)
}

/// Replays the scan-and-match procedure. Inverse of `encode_derivation`
/// on canonical derivations; inconsistent pairs are rejected.
pub fn decode_derivation(
    pair: &EncodingPair,
    start: &super::LabeledGraph,
    budget: usize,
) -> Result<Derivation, GraphError> {
    let rank = start.rank();
    if pair.rank != rank
        || pair.budget != budget
        || pair.phi.len() != 2 * rank - 2 + 2 * budget
        || pair.psi.len() != 3 * rank - 3 + budget
    {
        return Err(GraphError::MalformedPair("domain sizes disagree".into()));
    }
    if pair.phi.iter().any(|&x| x > 3) || pair.psi.iter().any(|&x| x > 3) {
        return Err(GraphError::MalformedPair("value out of range".into()));
    }
    let mut current = start.clone();
    let mut splits: Vec<Split> = Vec::new();
    let mut used_phi = vec![false; pair.phi.len()];
    let mut used_psi = vec![false; pair.psi.len()];
    'steps: loop {
        let mut labels: Vec<u32> = current.vertices.iter().map(|v| v.label).collect();
        labels.sort_unstable();
        for &i in &labels {
            let phi_i = pair.phi[i as usize - 1];
            if phi_i == 0 {
                continue;
            }
            let v = current.vertex(i).expect("label listed");
            let half = v.slots[(phi_i - 1) as usize];
            let e = current.edge(half.edge).expect("slot points to an edge");
            let matched = if e.is_loop() {
                true
            } else {
                let other = if e.init.vertex == i { e.term } else { e.init };
                let phi_other = pair.phi[other.vertex as usize - 1];
                phi_other == other.slot + 1
            };
            if !matched {
                continue;
            }
            if splits.len() == budget {
                return Err(GraphError::MalformedPair("more matches than the budget".into()));
            }
            let config = pair.psi[e.label as usize - 1];
            let split = if e.is_loop() {
                if config > 1 {
                    return Err(GraphError::MalformedPair(format!(
                        "loop split on edge {} with config {config}",
                        e.label
                    )));
                }
                Split { edge: e.label, kind: SplitKind::Loop, config }
            } else {
                Split { edge: e.label, kind: SplitKind::Double, config }
            };
            used_psi[e.label as usize - 1] = true;
            used_phi[i as usize - 1] = true;
            if !e.is_loop() {
                let other = if e.init.vertex == i { e.term.vertex } else { e.init.vertex };
                used_phi[other as usize - 1] = true;
            }
            current = current.apply(&split)?;
            splits.push(split);
            continue 'steps;
        }
        break;
    }
    for (idx, &x) in pair.phi.iter().enumerate() {
        if x != 0 && !used_phi[idx] {
            return Err(GraphError::MalformedPair(format!(
                "phi({}) = {x} never matched",
                idx + 1
            )));
        }
    }
    for (idx, &x) in pair.psi.iter().enumerate() {
        if x != 0 && !used_psi[idx] {
            return Err(GraphError::MalformedPair(format!(
                "psi({}) = {x} never matched",
                idx + 1
            )));
        }
    }
    Ok(Derivation::new(start.clone(), splits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::derive::canonical_derivation;
    use crate::graph::LabeledGraph;
    use crate::group::{Group, GroupElement};

    fn dumbbell() -> LabeledGraph {
        LabeledGraph::dumbbell(
            Group::Trivial,
            [GroupElement::Trivial, GroupElement::Trivial, GroupElement::Trivial],
        )
    }

    #[test]
    fn empty_derivation_encodes_to_zeros() {
        let d = Derivation::new(dumbbell(), vec![]);
        let pair = encode_derivation(&d, 3).unwrap();
        assert!(pair.phi.iter().all(|&x| x == 0));
        assert!(pair.psi.iter().all(|&x| x == 0));
        let back = decode_derivation(&pair, &d.start, 3).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn single_loop_split_roundtrip() {
        // A loop split destroys (and recreates) the loop vertex, so phi
        // has exactly one nonzero entry pointing at the loop.
        let d = Derivation::new(
            dumbbell(),
            vec![Split { edge: 1, kind: SplitKind::Loop, config: 1 }],
        );
        let pair = encode_derivation(&d, 2).unwrap();
        assert_eq!(pair.phi.iter().filter(|&&x| x != 0).count(), 1);
        assert_eq!(pair.phi[0], 1); // smaller slot of the loop at vertex 1
        assert_eq!(pair.psi[0], 1);
        let back = decode_derivation(&pair, &d.start, 2).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn single_double_split_roundtrip() {
        let d = Derivation::new(
            dumbbell(),
            vec![Split { edge: 2, kind: SplitKind::Double, config: 3 }],
        );
        let pair = encode_derivation(&d, 2).unwrap();
        // phi nonzero exactly at the bar's two endpoints, psi at the bar.
        let nonzero: Vec<usize> =
            pair.phi.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, _)| i + 1).collect();
        assert_eq!(nonzero, vec![1, 2]);
        assert_eq!(pair.psi[1], 3);
        let back = decode_derivation(&pair, &d.start, 2).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn non_canonical_input_is_rejected() {
        // Two independent splits in label-decreasing order on K4.
        let pairing = [(0, 3), (1, 6), (2, 9), (4, 7), (5, 10), (8, 11)];
        let k4 = LabeledGraph::from_stub_pairing(
            Group::Trivial,
            4,
            &pairing,
            vec![GroupElement::Trivial; 6],
        )
        .unwrap();
        let d = Derivation::new(
            k4,
            vec![
                Split { edge: 6, kind: SplitKind::Double, config: 0 },
                Split { edge: 1, kind: SplitKind::Double, config: 0 },
            ],
        );
        assert_eq!(encode_derivation(&d, 2), Err(GraphError::NotCanonical));
        let canon = canonical_derivation(&d).unwrap();
        let pair = encode_derivation(&canon, 2).unwrap();
        assert_eq!(decode_derivation(&pair, &canon.start, 2).unwrap(), canon);
    }

    #[test]
    fn unmatched_nonzero_entries_error() {
        let g = dumbbell();
        let mut pair = EncodingPair::zeros(2, 1);
        // Point phi at the bar's slot at vertex 1 only; the partner stays
        // 0, so nothing matches and the entry is left over.
        pair.phi[0] = 3; // bar sits in slot 3 of vertex 1
        let err = decode_derivation(&pair, &g, 1).unwrap_err();
        assert!(matches!(err, GraphError::MalformedPair(_)));
    }

    #[test]
    fn budget_mismatch_is_rejected() {
        let d = Derivation::new(dumbbell(), vec![]);
        let pair = encode_derivation(&d, 2).unwrap();
        assert!(matches!(
            decode_derivation(&pair, &d.start, 3),
            Err(GraphError::MalformedPair(_))
        ));
    }
}
