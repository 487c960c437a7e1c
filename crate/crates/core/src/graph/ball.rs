//! Breadth-first enumeration of split balls, deduplicated by canonical
//! key so that sizes count equivalence classes.

use std::collections::HashSet;

use serde::Serialize;

use super::{canonical_key, GraphError, LabeledGraph, Split};

#[derive(Debug, Clone, Serialize)]
pub struct GraphBallReport {
    pub rank: usize,
    pub sizes: Vec<u64>,
    /// log(#B_r)/r for r >= 1 (natural log).
    pub log_ratios: Vec<Option<f64>>,
    /// log of the counting bound 4^(5n-5+3r) per radius.
    pub bound_logs: Vec<f64>,
    /// The limiting rate 3 log 4.
    pub limit: f64,
}

pub struct GraphBall {
    pub report: GraphBallReport,
    pub keys: HashSet<Vec<i32>>,
    /// One representative per class with the split path that reached it;
    /// populated when requested.
    pub representatives: Option<Vec<(LabeledGraph, Vec<Split>, usize)>>,
}

/// Enumerates all classes reachable by at most `radius` splits. `guard`
/// caps the number of distinct classes.
pub fn enumerate_graph_ball(
    start: &LabeledGraph,
    radius: usize,
    guard: u64,
    keep_representatives: bool,
) -> Result<GraphBall, GraphError> {
    start.validate()?;
    let n = start.rank();
    let mut keys = HashSet::new();
    keys.insert(canonical_key(start)?);
    let mut representatives = Vec::new();
    if keep_representatives {
        representatives.push((start.clone(), Vec::new(), 0));
    }
    let mut sizes = vec![1u64];
    let mut frontier: Vec<(LabeledGraph, Vec<Split>)> = vec![(start.clone(), Vec::new())];
    for r in 1..=radius {
        let mut next = Vec::new();
        for (g, path) in &frontier {
            for split in g.available_splits() {
                let image = g.apply(&split)?;
                let key = canonical_key(&image)?;
                if keys.contains(&key) {
                    continue;
                }
                if keys.len() as u64 >= guard {
                    return Err(GraphError::ResourceGuard(guard));
                }
                keys.insert(key);
                let mut new_path = path.clone();
                new_path.push(split);
                if keep_representatives {
                    representatives.push((image.clone(), new_path.clone(), r));
                }
                next.push((image, new_path));
            }
        }
        sizes.push(sizes[r - 1] + next.len() as u64);
        frontier = next;
    }
    let log_ratios = sizes
        .iter()
        .enumerate()
        .map(|(r, &s)| if r == 0 { None } else { Some((s as f64).ln() / r as f64) })
        .collect();
    let bound_logs = (0..=radius)
        .map(|r| ((5 * n - 5 + 3 * r) as f64) * 4f64.ln())
        .collect();
    Ok(GraphBall {
        report: GraphBallReport {
            rank: n,
            sizes,
            log_ratios,
            bound_logs,
            limit: 3.0 * 4f64.ln(),
        },
        keys,
        representatives: if keep_representatives { Some(representatives) } else { None },
    })
}
