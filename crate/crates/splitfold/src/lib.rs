//! Combinatorial machinery for free splittings of finite-rank free groups.
//!
//! A free splitting of `F_n` is presented here by a finite *marked graph*
//! (a graph whose non-tree edges are labelled by a free basis) together with
//! a *collapsed* subgraph: the splitting is the universal cover of the
//! marked graph with every lift of the collapsed subgraph crushed to a
//! point. On top of that data model the crate implements:
//!
//! - canonical lifts of paths through collapse maps and the deck
//!   transformations aligning two occurrences of an edge ([`splitting`]);
//! - Stallings subgroup graphs, Whitehead minimization and free factor
//!   support ([`subgroup`], [`whitehead`]);
//! - overlap generators, filling support, the decidable filling criterion,
//!   expansion enumeration and blowup witnesses ([`protoforest`]);
//! - fold factorizations, tile pushforwards, pullbacks, component
//!   complexity and bounded cancellation ([`folds`]);
//! - train track maps: transition matrices, PF and filling exponents,
//!   Boolean exponent tables, tile nesting traces, translation-length
//!   bounds and single improvement moves ([`traintrack`]).
//!
//! The crate is `no_std` (with `alloc`); IO, fixtures and the command-line
//! surface live in the companion `splitfold-cli` crate.
//!
//! All values are immutable after construction and every operation is a
//! pure function of its inputs, so the types are safe to share across
//! threads.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod folds;
pub mod graph;
pub mod matrix;
pub mod morphism;
pub mod path;
pub mod protoforest;
pub mod splitting;
pub mod subgroup;
pub mod traintrack;
pub mod whitehead;
pub mod word;

pub use error::{Error, Result};
pub use graph::{EdgeId, MarkedGraph, OrientedEdge, VertexId};
pub use path::EdgePath;
pub use splitting::FreeSplitting;
pub use word::{Basis, Letter, Word};

/// Resource limits for the search-heavy operations.
///
/// `max_edges` bounds the size of intermediate subgroup graphs and base
/// graphs; operations exceeding it return [`Error::ResourceLimit`] rather
/// than wrong output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub max_edges: usize,
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope { max_edges: 64 }
    }
}
