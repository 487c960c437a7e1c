//! Coefficient groups for edge labels: the trivial group, finitely
//! generated free groups, and finite cyclic groups.
//!
//! Free-group elements are kept fully reduced at all times; equality is
//! componentwise equality of reduced words and conjugacy is decided by
//! cyclic reduction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("elements belong to different coefficient groups")]
    Mismatch,
    #[error("conjugacy is not decidable for this group kind")]
    UnsupportedConjugacy,
    #[error("element is invalid for the group: {0}")]
    InvalidElement(String),
}

/// Runtime descriptor selecting the concrete coefficient group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Group {
    Trivial,
    Free { rank: u32 },
    Cyclic { order: u32 },
}

impl Group {
    pub fn identity(&self) -> GroupElement {
        match self {
            Group::Trivial => GroupElement::Trivial,
            Group::Free { .. } => GroupElement::Free(FreeWord::identity()),
            Group::Cyclic { order } => GroupElement::Cyclic { value: 0, order: *order },
        }
    }

    /// Generator `i` (0-based). For the trivial group this is the identity.
    pub fn generator(&self, i: u32) -> GroupElement {
        match self {
            Group::Trivial => GroupElement::Trivial,
            Group::Free { .. } => GroupElement::Free(FreeWord::generator(i)),
            Group::Cyclic { order } => {
                GroupElement::Cyclic { value: if *order == 1 { 0 } else { 1 }, order: *order }
            }
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (Group::Trivial, GroupElement::Trivial) => true,
            (Group::Free { .. }, GroupElement::Free(_)) => true,
            (Group::Cyclic { order }, GroupElement::Cyclic { order: k, value }) => {
                k == order && value < k
            }
            _ => false,
        }
    }
}

/// A reduced word in a free group. Letters are nonzero integers: `i > 0`
/// is the generator of index `i-1`, `-i` its inverse. No adjacent
/// inverse pair survives construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord(Vec<i32>);

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    pub fn generator(i: u32) -> Self {
        FreeWord(vec![i as i32 + 1])
    }

    /// Builds a word from signed letters, reducing as it goes.
    pub fn from_letters(letters: &[i32]) -> Result<Self, GroupError> {
        let mut buf: Vec<i32> = Vec::with_capacity(letters.len());
        for &x in letters {
            if x == 0 {
                return Err(GroupError::InvalidElement("letter 0 in free word".into()));
            }
            if buf.last().is_some_and(|&y| y == -x) {
                buf.pop();
            } else {
                buf.push(x);
            }
        }
        Ok(FreeWord(buf))
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut buf = self.0.clone();
        for &x in &other.0 {
            if buf.last().is_some_and(|&y| y == -x) {
                buf.pop();
            } else {
                buf.push(x);
            }
        }
        FreeWord(buf)
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|x| -x).collect())
    }

    /// Strips matching inverse pairs from both ends: returns (conjugator,
    /// cyclically reduced core) with `self = c · core · c̄`.
    pub fn cyclic_reduce(&self) -> (FreeWord, FreeWord) {
        let mut lo = 0usize;
        let mut hi = self.0.len();
        while hi - lo >= 2 && self.0[lo] == -self.0[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        (FreeWord(self.0[..lo].to_vec()), FreeWord(self.0[lo..hi].to_vec()))
    }

    /// Conjugacy test: equal cyclic words after cyclic reduction.
    pub fn conjugate_to(&self, other: &FreeWord) -> bool {
        let (_, a) = self.cyclic_reduce();
        let (_, b) = other.cyclic_reduce();
        if a.0.len() != b.0.len() {
            return false;
        }
        if a.0.is_empty() {
            return true;
        }
        let doubled: Vec<i32> = b.0.iter().chain(b.0.iter()).copied().collect();
        (0..b.0.len()).any(|off| doubled[off..off + a.0.len()] == a.0[..])
    }
}

/// An element of one of the supported coefficient groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Trivial,
    Free(FreeWord),
    Cyclic { value: u32, order: u32 },
}

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Trivial => true,
            GroupElement::Free(w) => w.is_empty(),
            GroupElement::Cyclic { value, .. } => *value == 0,
        }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        match (self, other) {
            (GroupElement::Trivial, GroupElement::Trivial) => Ok(GroupElement::Trivial),
            (GroupElement::Free(a), GroupElement::Free(b)) => Ok(GroupElement::Free(a.mul(b))),
            (
                GroupElement::Cyclic { value: a, order: k },
                GroupElement::Cyclic { value: b, order: k2 },
            ) => {
                if k != k2 {
                    return Err(GroupError::Mismatch);
                }
                Ok(GroupElement::Cyclic { value: (a + b) % k, order: *k })
            }
            _ => Err(GroupError::Mismatch),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Trivial => GroupElement::Trivial,
            GroupElement::Free(w) => GroupElement::Free(w.inverse()),
            GroupElement::Cyclic { value, order } => {
                GroupElement::Cyclic { value: (order - value) % order, order: *order }
            }
        }
    }

    pub fn equal(&self, other: &GroupElement) -> Result<bool, GroupError> {
        match (self, other) {
            (GroupElement::Trivial, GroupElement::Trivial) => Ok(true),
            (GroupElement::Free(a), GroupElement::Free(b)) => Ok(a == b),
            (
                GroupElement::Cyclic { value: a, order: k },
                GroupElement::Cyclic { value: b, order: k2 },
            ) => {
                if k != k2 {
                    return Err(GroupError::Mismatch);
                }
                Ok(a == b)
            }
            _ => Err(GroupError::Mismatch),
        }
    }

    /// Conjugacy: cyclic-word comparison in free groups, plain equality in
    /// the (abelian) trivial and cyclic groups.
    pub fn conjugate_equal(&self, other: &GroupElement) -> Result<bool, GroupError> {
        match (self, other) {
            (GroupElement::Free(a), GroupElement::Free(b)) => Ok(a.conjugate_to(b)),
            _ => self.equal(other),
        }
    }

    /// Stable byte form used by canonical keys and orientation tie-breaks.
    pub fn serial(&self) -> Vec<i32> {
        match self {
            GroupElement::Trivial => vec![0],
            GroupElement::Free(w) => {
                let mut v = vec![1, w.len() as i32];
                v.extend_from_slice(w.letters());
                v
            }
            GroupElement::Cyclic { value, order } => vec![2, *order as i32, *value as i32],
        }
    }
}
