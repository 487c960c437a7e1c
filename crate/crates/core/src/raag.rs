//! Graph groups from a defining graph: two generators commute exactly when
//! their vertices are joined by an edge. Provides a unique normal form per
//! element, exact ball enumeration by breadth-first search, and the
//! `log(2*c0 + 2) + 1` growth bound driven by the max degree `c0` of the
//! complementary graph.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RaagError {
    #[error("graph is not simple: {0}")]
    NotSimple(String),
    #[error("vertex index {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
    #[error("position out of range: {0}")]
    PositionOutOfRange(usize),
    #[error("ball enumeration exceeded the element guard ({0})")]
    ResourceGuard(u64),
    #[error("cannot parse word token `{0}`")]
    BadToken(String),
}

/// A finite simple graph; vertices are `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefiningGraph {
    pub n: usize,
    pub names: Vec<String>,
    /// Unordered pairs, stored with i < j.
    pub edges: Vec<(usize, usize)>,
}

impl DefiningGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, RaagError> {
        let names = (0..n).map(default_name).collect();
        Self::with_names(n, edges, names)
    }

    pub fn with_names(
        n: usize,
        edges: &[(usize, usize)],
        names: Vec<String>,
    ) -> Result<Self, RaagError> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(RaagError::VertexOutOfRange(a.max(b), n));
            }
            if a == b {
                return Err(RaagError::NotSimple(format!("self-loop at {a}")));
            }
            let e = (a.min(b), a.max(b));
            if normalized.contains(&e) {
                return Err(RaagError::NotSimple(format!("duplicate edge {e:?}")));
            }
            normalized.push(e);
        }
        normalized.sort_unstable();
        if names.len() != n {
            return Err(RaagError::NotSimple("name count != n".into()));
        }
        Ok(DefiningGraph { n, names, edges: normalized })
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let e = (a.min(b), a.max(b));
        self.edges.binary_search(&e).is_ok()
    }

    /// Generators commute iff equal or joined by an edge.
    pub fn commutes(&self, a: usize, b: usize) -> bool {
        a == b || self.has_edge(a, b)
    }

    pub fn parse_json(text: &str) -> Result<Self, RaagError> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            #[serde(default)]
            names: Option<Vec<String>>,
            edges: Vec<(usize, usize)>,
        }
        let raw: Raw = serde_json::from_str(text)
            .map_err(|e| RaagError::NotSimple(format!("bad graph JSON: {e}")))?;
        match raw.names {
            Some(names) => Self::with_names(raw.n, &raw.edges, names),
            None => Self::new(raw.n, &raw.edges),
        }
    }
}

fn default_name(i: usize) -> String {
    // a, b, ..., z, v26, v27, ...
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("v{i}")
    }
}

/// Complement of a defining graph, with an ordered list of half-edges at
/// each vertex. The k-th neighbor (0-based) sits on the half-edge
/// labeled k+1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementGraph {
    pub n: usize,
    /// adjacency[v] = neighbors of v in the complement, in half-edge order.
    pub adjacency: Vec<Vec<usize>>,
    pub c0: usize,
}

/// Complement with deterministic half-edge orders: ascending neighbor index
/// by default, or a seeded shuffle per vertex.
pub fn build_complement(theta: &DefiningGraph, half_edge_seed: Option<u64>) -> ComplementGraph {
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); theta.n];
    for v in 0..theta.n {
        for w in 0..theta.n {
            if v != w && !theta.has_edge(v, w) {
                adjacency[v].push(w);
            }
        }
    }
    if let Some(seed) = half_edge_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for list in &mut adjacency {
            list.shuffle(&mut rng);
        }
    }
    let c0 = adjacency.iter().map(Vec::len).max().unwrap_or(0);
    ComplementGraph { n: theta.n, adjacency, c0 }
}

/// Growth bound `log(2*c0 + 2) + 1` (natural log).
pub fn growth_bound(c0: usize) -> f64 {
    ((2 * c0 + 2) as f64).ln() + 1.0
}

/// Defining graph whose edges are the complement of the given
/// non-commuting pairs: generators commute unless listed.
pub fn commutation_graph_from_generators(
    non_commuting: &[(usize, usize)],
    n: usize,
) -> Result<DefiningGraph, RaagError> {
    for &(a, b) in non_commuting {
        if a >= n || b >= n {
            return Err(RaagError::VertexOutOfRange(a.max(b), n));
        }
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let listed = non_commuting
                .iter()
                .any(|&(x, y)| (x.min(y), x.max(y)) == (a, b));
            if !listed {
                edges.push((a, b));
            }
        }
    }
    DefiningGraph::new(n, &edges)
}

/// A signed generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub vertex: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(vertex: usize) -> Self {
        Letter { vertex, inverse: false }
    }

    pub fn inv(vertex: usize) -> Self {
        Letter { vertex, inverse: true }
    }

    pub fn opposite(&self) -> Self {
        Letter { vertex: self.vertex, inverse: !self.inverse }
    }
}

/// A word in the generators and their inverses; the empty word is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whitespace-separated tokens, trailing apostrophe marks an inverse:
    /// `"a b' c"`.
    pub fn parse(text: &str, theta: &DefiningGraph) -> Result<Word, RaagError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (name, inverse) = match token.strip_suffix('\'') {
                Some(base) => (base, true),
                None => (token, false),
            };
            let vertex = theta
                .names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| RaagError::BadToken(token.to_string()))?;
            letters.push(Letter { vertex, inverse });
        }
        Ok(Word(letters))
    }

    pub fn display(&self, theta: &DefiningGraph) -> String {
        self.0
            .iter()
            .map(|l| {
                let mut s = theta.names[l.vertex].clone();
                if l.inverse {
                    s.push('\'');
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn validate(&self, theta: &DefiningGraph) -> Result<(), RaagError> {
        for l in &self.0 {
            if l.vertex >= theta.n {
                return Err(RaagError::VertexOutOfRange(l.vertex, theta.n));
            }
        }
        Ok(())
    }
}

/// True iff the letter at position `k` commutes with every letter at
/// positions `i..k` (0-based; a letter commutes with itself and its
/// inverse).
pub fn is_ready(w: &Word, k: usize, i: usize, theta: &DefiningGraph) -> Result<bool, RaagError> {
    if k >= w.len() || i > k {
        return Err(RaagError::PositionOutOfRange(k));
    }
    let vk = w.0[k].vertex;
    Ok((i..k).all(|j| theta.commutes(w.0[j].vertex, vk)))
}

/// Unique normal form per group element: first delete every inverse pair
/// whose letters are separated only by letters commuting with them, then
/// greedily emit the ready letter that is minimal under (vertex, sign).
/// Two words represent the same element iff their normal forms coincide.
pub fn normal_form(w: &Word, theta: &DefiningGraph) -> Result<Word, RaagError> {
    w.validate(theta)?;
    let mut letters = w.0.clone();
    // Deletion pass: find s at i, its inverse at j, everything strictly
    // between commuting with s.
    'outer: loop {
        for i in 0..letters.len() {
            let s = letters[i];
            for j in i + 1..letters.len() {
                if letters[j] == s.opposite()
                    && (i + 1..j).all(|m| theta.commutes(letters[m].vertex, s.vertex))
                {
                    letters.remove(j);
                    letters.remove(i);
                    continue 'outer;
                }
                if !theta.commutes(letters[j].vertex, s.vertex) {
                    break;
                }
            }
        }
        break;
    }
    // Reorder pass: lexicographically least word in the commutation class.
    let mut out = Vec::with_capacity(letters.len());
    let mut remaining = letters;
    while !remaining.is_empty() {
        let mut best: Option<usize> = None;
        for p in 0..remaining.len() {
            let ready =
                (0..p).all(|q| theta.commutes(remaining[q].vertex, remaining[p].vertex));
            if !ready {
                continue;
            }
            match best {
                None => best = Some(p),
                Some(b) => {
                    let key = (remaining[p].vertex, remaining[p].inverse);
                    let bkey = (remaining[b].vertex, remaining[b].inverse);
                    if key < bkey {
                        best = Some(p);
                    }
                }
            }
        }
        let p = best.expect("first letter is always ready");
        out.push(remaining.remove(p));
    }
    Ok(Word(out))
}

fn normal_key(w: &Word) -> Vec<i32> {
    w.0.iter()
        .map(|l| {
            let v = l.vertex as i32 + 1;
            if l.inverse {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Per-radius sizes and log ratios against the growth bound.
#[derive(Debug, Clone, Serialize)]
pub struct BallReport {
    pub n: usize,
    pub c0: usize,
    pub sizes: Vec<u64>,
    /// log(#B_r)/r for r >= 1 (natural log).
    pub log_ratios: Vec<Option<f64>>,
    pub growth_bound: f64,
}

/// One ball element: its normal form and the geodesic word that first
/// reached it in breadth-first order.
#[derive(Debug, Clone)]
pub struct BallElement {
    pub normal: Word,
    pub geodesic: Word,
    pub radius: usize,
}

#[derive(Debug, Clone)]
pub struct BallEnumeration {
    pub report: BallReport,
    /// Present when requested; one entry per group element, BFS order.
    pub elements: Option<Vec<BallElement>>,
}

/// Exact `#B_r` for `r <= radius` by BFS over right multiplication,
/// deduplicating through normal forms. `guard` caps the element count.
pub fn enumerate_ball(
    theta: &DefiningGraph,
    radius: usize,
    guard: u64,
    keep_elements: bool,
) -> Result<BallEnumeration, RaagError> {
    let complement = build_complement(theta, None);
    let mut seen: HashMap<Vec<i32>, ()> = HashMap::new();
    let empty = Word::default();
    seen.insert(normal_key(&empty), ());
    let mut elements: Vec<BallElement> =
        vec![BallElement { normal: empty.clone(), geodesic: empty, radius: 0 }];
    let mut sizes = vec![1u64];
    let mut frontier: Vec<(Word, Word)> = vec![(Word::default(), Word::default())];
    for r in 1..=radius {
        let mut next = Vec::new();
        for (normal, geodesic) in &frontier {
            for vertex in 0..theta.n {
                for inverse in [false, true] {
                    let letter = Letter { vertex, inverse };
                    let mut extended = normal.clone();
                    extended.0.push(letter);
                    let nf = normal_form(&extended, theta)?;
                    let key = normal_key(&nf);
                    if seen.contains_key(&key) {
                        continue;
                    }
                    if seen.len() as u64 >= guard {
                        return Err(RaagError::ResourceGuard(guard));
                    }
                    seen.insert(key, ());
                    let mut geo = geodesic.clone();
                    geo.0.push(letter);
                    if keep_elements {
                        elements.push(BallElement {
                            normal: nf.clone(),
                            geodesic: geo.clone(),
                            radius: r,
                        });
                    }
                    next.push((nf, geo));
                }
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
    Ok(BallEnumeration {
        report: BallReport {
            n: theta.n,
            c0: complement.c0,
            sizes,
            log_ratios,
            growth_bound: growth_bound(complement.c0),
        },
        elements: if keep_elements { Some(elements) } else { None },
    })
}
