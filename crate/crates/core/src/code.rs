//! Canonical representatives and integer codes for words.
//!
//! A word is reordered by repeatedly promoting, among the letters that are
//! ready for the next position, the one whose current vertex label is
//! minimal. Each promotion emits a signed label and renumbers the
//! complement-graph neighbors of the promoted vertex following its
//! half-edge order. The resulting code is monotone in absolute value and
//! bounded by `C_R = n + c0*R`, and the same labeling dynamics decode it
//! back to the canonical word.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raag::{ComplementGraph, DefiningGraph, Letter, Word};

pub use crate::raag::is_ready;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("initial labeling must be a bijection onto 1..=n")]
    BadInitialLabeling,
    #[error("letter vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("malformed code: no vertex carries label {0} at step {1}")]
    MalformedCode(u64, usize),
    #[error("malformed code: {0}")]
    InvalidCode(String),
    #[error("entropy argument must lie in (0, 1]")]
    EntropyDomain,
}

/// Injective labeling of the complement-graph vertices by positive
/// integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLabeling {
    labels: Vec<u64>,
    max: u64,
}

impl VertexLabeling {
    /// The ascending initial labeling: vertex v gets label v+1.
    pub fn initial(n: usize) -> Self {
        VertexLabeling { labels: (1..=n as u64).collect(), max: n as u64 }
    }

    /// Any bijection onto {1..n} works as a starting labeling.
    pub fn from_permutation(labels: Vec<u64>) -> Result<Self, CodeError> {
        let n = labels.len() as u64;
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(CodeError::BadInitialLabeling);
        }
        Ok(VertexLabeling { labels, max: n })
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn max_label(&self) -> u64 {
        self.max
    }

    fn vertex_with_label(&self, label: u64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Renumbers the neighbors of `v` in half-edge order with fresh labels.
    fn relabel_neighbors(&mut self, v: usize, cbar: &ComplementGraph) {
        let base = self.max;
        for (k, &u) in cbar.adjacency[v].iter().enumerate() {
            self.labels[u] = base + k as u64 + 1;
        }
        self.max = base + cbar.adjacency[v].len() as u64;
    }
}

/// The signed-label sequence recording a canonical representative,
/// together with the parameters that bound it. Entries beyond the word
/// length hold the sentinel `C_R + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Code {
    pub entries: Vec<i64>,
    pub n: usize,
    pub c0: usize,
    /// Length budget R; `entries.len() == r_budget` after padding.
    #[serde(rename = "R")]
    pub r_budget: usize,
}

impl Code {
    pub fn cap(&self) -> u64 {
        (self.n + self.c0 * self.r_budget) as u64
    }

    pub fn sentinel(&self) -> i64 {
        self.cap() as i64 + 1
    }

    /// Extends the code to budget `r` with sentinel entries. The cap grows
    /// with the budget, so existing entries stay in range.
    pub fn pad_to(&self, r: usize) -> Result<Code, CodeError> {
        if r < self.entries.len() {
            return Err(CodeError::InvalidCode(format!(
                "budget {r} below code length {}",
                self.entries.len()
            )));
        }
        let mut padded =
            Code { entries: self.entries.clone(), n: self.n, c0: self.c0, r_budget: r };
        let sentinel = padded.sentinel();
        padded.entries.resize(r, sentinel);
        Ok(padded)
    }
}

/// Output of the canonical construction.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub word: Word,
    pub code: Code,
    pub final_labeling: VertexLabeling,
}

/// Runs the inductive reordering on `w0`. The output word is a reordering
/// of `w0` representing the same group element.
pub fn canonical_representative(
    w0: &Word,
    cbar: &ComplementGraph,
    theta: &DefiningGraph,
    l0: &VertexLabeling,
) -> Result<CanonicalForm, CodeError> {
    if l0.labels.len() != cbar.n {
        return Err(CodeError::BadInitialLabeling);
    }
    for l in &w0.0 {
        if l.vertex >= cbar.n {
            return Err(CodeError::VertexOutOfRange(l.vertex));
        }
    }
    let mut labeling = l0.clone();
    let mut remaining: Vec<Letter> = w0.0.clone();
    let mut out: Vec<Letter> = Vec::with_capacity(remaining.len());
    let mut entries: Vec<i64> = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        // Ready letters: commute with everything before them among the
        // remaining suffix. Ties in label only happen between letters on
        // the same vertex; take the earliest.
        let mut pick: Option<(usize, u64)> = None;
        for p in 0..remaining.len() {
            let ready =
                (0..p).all(|q| theta.commutes(remaining[q].vertex, remaining[p].vertex));
            if !ready {
                continue;
            }
            let label = labeling.label(remaining[p].vertex);
            if pick.map_or(true, |(_, best)| label < best) {
                pick = Some((p, label));
            }
        }
        let (p, label) = pick.expect("the first remaining letter is always ready");
        let letter = remaining.remove(p);
        entries.push(if letter.inverse { -(label as i64) } else { label as i64 });
        labeling.relabel_neighbors(letter.vertex, cbar);
        out.push(letter);
    }
    let r = out.len();
    Ok(CanonicalForm {
        word: Word(out),
        code: Code { entries, n: cbar.n, c0: cbar.c0, r_budget: r },
        final_labeling: labeling,
    })
}

/// Checks `1 <= |l_1| <= ... <= |l_r| <= n + c0*R` on the unpadded prefix
/// and that padding entries equal the sentinel exactly.
pub fn verify_code(code: &Code) -> bool {
    let cap = code.cap() as i64;
    let sentinel = cap + 1;
    if code.entries.len() != code.r_budget {
        return false;
    }
    let body_len = code
        .entries
        .iter()
        .position(|&e| e == sentinel)
        .unwrap_or(code.entries.len());
    if code.entries[body_len..].iter().any(|&e| e != sentinel) {
        return false;
    }
    let mut prev = 1i64;
    for &e in &code.entries[..body_len] {
        let a = e.abs();
        if e == 0 || a < prev || a > cap {
            return false;
        }
        prev = a;
    }
    true
}

/// Replays the labeling dynamics to recover the canonical word.
pub fn decode(
    code: &Code,
    cbar: &ComplementGraph,
    l0: &VertexLabeling,
) -> Result<Word, CodeError> {
    if l0.labels.len() != cbar.n {
        return Err(CodeError::BadInitialLabeling);
    }
    if !verify_code(code) {
        return Err(CodeError::InvalidCode("monotonicity or range violated".into()));
    }
    let sentinel = code.sentinel();
    let mut labeling = l0.clone();
    let mut out = Vec::new();
    for (step, &entry) in code.entries.iter().enumerate() {
        if entry == sentinel {
            break;
        }
        let label = entry.unsigned_abs();
        let v = labeling
            .vertex_with_label(label)
            .ok_or(CodeError::MalformedCode(label, step))?;
        out.push(Letter { vertex: v, inverse: entry < 0 });
        labeling.relabel_neighbors(v, cbar);
    }
    Ok(Word(out))
}

/// Number of monotone sequences of length `r` over `{1..=c}`:
/// `binom(c + r - 1, r)`.
pub fn count_monotone(r: usize, c: u64) -> BigUint {
    binomial(c + r as u64 - if r == 0 { 0 } else { 1 }, r as u64)
}

/// Exact count of padded monotone signed codes with parameters (n, c0, R):
/// sum over r of `2^r * binom(C_R + r - 1, r)` with `C_R = n + c0*R`.
pub fn code_space_size(n: usize, c0: usize, r_budget: usize) -> BigUint {
    let cap = (n + c0 * r_budget) as u64;
    let mut total = BigUint::one();
    for r in 1..=r_budget {
        total += (BigUint::one() << r) * count_monotone(r, cap);
    }
    total
}

/// The closed-form upper bound `2^R * binom(n + R(c0+1), R)` and its
/// log/R (natural log; 0 by convention at R = 0).
pub fn wr_bound(n: usize, c0: usize, r_budget: usize) -> (BigUint, f64) {
    let value =
        (BigUint::one() << r_budget) * binomial((n + r_budget * (c0 + 1)) as u64, r_budget as u64);
    let ratio = if r_budget == 0 { 0.0 } else { ln_big(&value) / r_budget as f64 };
    (value, ratio)
}

/// Residual of the identity
/// `log2 + (c0+1) H(1/(c0+1)) = log2 + log(c0+1) + c0 log(1 + 1/c0)`,
/// or `None` when c0 = 0 (the right side is undefined there).
pub fn growth_bound_entropy_residual(c0: usize) -> Option<f64> {
    if c0 == 0 {
        return None;
    }
    let c = c0 as f64;
    let lhs = 2f64.ln() + (c + 1.0) * binary_entropy(1.0 / (c + 1.0)).ok()?;
    let rhs = 2f64.ln() + (c + 1.0).ln() + c * (1.0 + 1.0 / c).ln();
    Some((lhs - rhs).abs())
}

/// Binary entropy `eps*log(1/eps) + (1-eps)*log(1/(1-eps))`, natural log,
/// with `H(1) = 0`.
pub fn binary_entropy(eps: f64) -> Result<f64, CodeError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CodeError::EntropyDomain);
    }
    if eps == 1.0 {
        return Ok(0.0);
    }
    Ok(eps * (1.0 / eps).ln() + (1.0 - eps) * (1.0 / (1.0 - eps)).ln())
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// Natural log of a big integer via its top bits.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        let v: u64 = x.try_into().unwrap_or(u64::MAX);
        return (v as f64).ln();
    }
    let shift = bits - 53;
    let top: u64 = (x >> shift).try_into().expect("53 bits fit");
    (top as f64).ln() + shift as f64 * 2f64.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raag::build_complement;

    fn path_bar_theta() -> (DefiningGraph, ComplementGraph) {
        // Theta on {a,b,c} with single edge {a,c}; complement is a-b-c.
        let theta = DefiningGraph::new(3, &[(0, 2)]).unwrap();
        let cbar = build_complement(&theta, None);
        (theta, cbar)
    }

    #[test]
    fn canonical_ca_example() {
        let (theta, cbar) = path_bar_theta();
        let w0 = Word(vec![Letter::gen(2), Letter::gen(0)]);
        let l0 = VertexLabeling::initial(3);
        let form = canonical_representative(&w0, &cbar, &theta, &l0).unwrap();
        assert_eq!(form.word, Word(vec![Letter::gen(0), Letter::gen(2)]));
        // Both letters are ready at position 1 and a has the smaller
        // label; promoting a relabels b to 4, so c keeps label 3.
        assert_eq!(form.code.entries, vec![1, 3]);
        assert!(verify_code(&form.code));
        // Promoting c then relabels its complement neighbor b once more.
        assert_eq!(form.final_labeling.label(1), 5);
        assert_eq!(form.final_labeling.label(0), 1);
        assert_eq!(form.final_labeling.label(2), 3);
    }

    #[test]
    fn canonical_empty_word() {
        let (theta, cbar) = path_bar_theta();
        let form =
            canonical_representative(&Word::default(), &cbar, &theta, &VertexLabeling::initial(3))
                .unwrap();
        assert!(form.word.is_empty());
        assert!(form.code.entries.is_empty());
    }

    #[test]
    fn complete_theta_sorts_by_initial_label() {
        // All generators commute; the complement has no edges, so labels
        // never change and the output is sorted by vertex.
        let theta = DefiningGraph::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let cbar = build_complement(&theta, None);
        let w0 = Word(vec![Letter::gen(2), Letter::inv(1), Letter::gen(0), Letter::gen(1)]);
        let form =
            canonical_representative(&w0, &cbar, &theta, &VertexLabeling::initial(3)).unwrap();
        let vertices: Vec<usize> = form.word.0.iter().map(|l| l.vertex).collect();
        assert_eq!(vertices, vec![0, 1, 1, 2]);
        let abs: Vec<i64> = form.code.entries.iter().map(|e| e.abs()).collect();
        assert_eq!(abs, vec![1, 2, 2, 3]);
    }

    #[test]
    fn verify_code_examples() {
        let ok = Code { entries: vec![1, 3], n: 3, c0: 2, r_budget: 2 };
        assert!(verify_code(&ok));
        let bad = Code { entries: vec![2, 1], n: 3, c0: 2, r_budget: 2 };
        assert!(!verify_code(&bad));
        let empty = Code { entries: vec![], n: 3, c0: 2, r_budget: 0 };
        assert!(verify_code(&empty));
    }

    #[test]
    fn decode_roundtrip_and_errors() {
        let (theta, cbar) = path_bar_theta();
        let l0 = VertexLabeling::initial(3);
        let w0 = Word(vec![Letter::gen(2), Letter::gen(0)]);
        let form = canonical_representative(&w0, &cbar, &theta, &l0).unwrap();
        assert_eq!(decode(&form.code, &cbar, &l0).unwrap(), form.word);

        // Sentinel-only code decodes to the empty word.
        let empty = Code { entries: vec![], n: 3, c0: 2, r_budget: 0 }.pad_to(2).unwrap();
        assert!(decode(&empty, &cbar, &l0).unwrap().is_empty());

        // Label 7 exists in no labeling state reachable at step 0 with
        // budget 2 (cap is 7, so 7 is in range but unassigned).
        let bad = Code { entries: vec![7, 8], n: 3, c0: 2, r_budget: 2 };
        assert_eq!(decode(&bad, &cbar, &l0), Err(CodeError::MalformedCode(7, 0)));
    }

    #[test]
    fn custom_initial_labeling_roundtrip() {
        let (theta, cbar) = path_bar_theta();
        let l0 = VertexLabeling::from_permutation(vec![3, 1, 2]).unwrap();
        let w0 = Word(vec![Letter::gen(2), Letter::inv(0), Letter::gen(1)]);
        let form = canonical_representative(&w0, &cbar, &theta, &l0).unwrap();
        assert!(verify_code(&form.code));
        assert_eq!(decode(&form.code, &cbar, &l0).unwrap(), form.word);
        // With c labeled 2 and a labeled 3, c now wins the first pick.
        assert_eq!(form.word.0[0], Letter::gen(2));
        assert!(VertexLabeling::from_permutation(vec![1, 1, 2]).is_err());
        assert!(VertexLabeling::from_permutation(vec![0, 1, 2]).is_err());
    }

    #[test]
    fn count_monotone_examples() {
        assert_eq!(count_monotone(0, 5), BigUint::from(1u32));
        assert_eq!(count_monotone(2, 3), BigUint::from(6u32));
        assert_eq!(count_monotone(1, 9), BigUint::from(9u32));
        // Brute-force cross-check for small parameters.
        for c in 1..=4u64 {
            for r in 0..=4usize {
                let mut count = 0u64;
                let mut stack = vec![(Vec::<u64>::new(), 1u64)];
                while let Some((seq, lo)) = stack.pop() {
                    if seq.len() == r {
                        count += 1;
                        continue;
                    }
                    for x in lo..=c {
                        let mut next = seq.clone();
                        next.push(x);
                        stack.push((next, x));
                    }
                }
                assert_eq!(count_monotone(r, c), BigUint::from(count));
            }
        }
    }

    #[test]
    fn wr_bound_examples() {
        assert_eq!(wr_bound(3, 2, 0), (BigUint::one(), 0.0));
        let (v, _) = wr_bound(3, 2, 2);
        assert_eq!(v, BigUint::from(144u32));
        // log/R approaches the entropy limit from below and never crosses
        // the cap log(2*c0+2)+1.
        let cap = ((2 * 2 + 2) as f64).ln() + 1.0;
        let c0 = 2.0f64;
        let entropy_limit = 2f64.ln() + (c0 + 1.0) * binary_entropy(1.0 / (c0 + 1.0)).unwrap();
        let ratios: Vec<f64> =
            [10, 100, 1000].iter().map(|&r| wr_bound(3, 2, r).1).collect();
        assert!(ratios[0] < ratios[1] && ratios[1] < ratios[2]);
        assert!(ratios.iter().all(|&x| x <= cap));
        assert!(ratios[2] < entropy_limit);
        assert!(entropy_limit - ratios[2] < 0.01);
        assert!(entropy_limit <= cap);
    }

    #[test]
    fn code_space_vs_brute_enumeration() {
        // Enumerate W_R literally for tiny parameters: sequences over
        // {±1..±C, C+1} monotone in absolute value.
        for (n, c0, r) in [(1usize, 0usize, 2usize), (2, 1, 2), (2, 1, 3), (3, 2, 2)] {
            let cap = (n + c0 * r) as i64;
            let mut alphabet: Vec<i64> = Vec::new();
            for a in 1..=cap {
                alphabet.push(a);
                alphabet.push(-a);
            }
            alphabet.push(cap + 1);
            let mut count = 0u64;
            let mut stack: Vec<Vec<i64>> = vec![vec![]];
            while let Some(seq) = stack.pop() {
                if seq.len() == r {
                    count += 1;
                    continue;
                }
                for &x in &alphabet {
                    if seq.last().map_or(true, |&p| p.abs() <= x.abs()) {
                        let mut next = seq.clone();
                        next.push(x);
                        stack.push(next);
                    }
                }
            }
            assert_eq!(code_space_size(n, c0, r), BigUint::from(count), "n={n} c0={c0} r={r}");
        }
    }

    #[test]
    fn entropy_examples() {
        assert!((binary_entropy(0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(0.0).is_err());
        assert!(binary_entropy(1.5).is_err());
        // log2 + (c0+1) H(1/(c0+1)) = log2 + log(c0+1) + c0 log(1 + 1/c0).
        for c0 in 1..=10 {
            let c = c0 as f64;
            let lhs = 2f64.ln() + (c + 1.0) * binary_entropy(1.0 / (c + 1.0)).unwrap();
            let rhs = 2f64.ln() + (c + 1.0).ln() + c * (1.0 + 1.0 / c).ln();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn ln_big_matches_f64() {
        let x = BigUint::from(123456789u64);
        assert!((ln_big(&x) - (123456789f64).ln()).abs() < 1e-9);
        let big = BigUint::from(3u32).pow(200);
        assert!((ln_big(&big) - 200.0 * 3f64.ln()).abs() < 1e-9);
    }
}
