//! Desk-scale toolkit for growth of word balls in graph groups, split
//! calculus on group-labeled trivalent graphs, and diagonal-flip balls of
//! punctured-surface triangulations.
//!
//! All logarithms are natural.

pub mod code;
pub mod graph;
pub mod group;
pub mod raag;
pub mod tri;
