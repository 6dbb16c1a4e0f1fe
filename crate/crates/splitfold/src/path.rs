//! Edge paths in marked graphs.

use crate::error::{validation, Result};
use crate::graph::{MarkedGraph, OrientedEdge, VertexId};
use crate::word::Word;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

/// A path in a marked graph: a start vertex and a sequence of oriented
/// edges with matching endpoints. An empty edge sequence is the trivial
/// path at the start vertex. Immersed paths (no edge followed by its
/// reverse) represent reduced tree paths.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgePath {
    start: VertexId,
    edges: Vec<OrientedEdge>,
}

impl fmt::Debug for EdgePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgePath({:?}, {:?})", self.start, self.edges)
    }
}

impl EdgePath {
    pub fn trivial(v: VertexId) -> Self {
        EdgePath { start: v, edges: Vec::new() }
    }

    /// Builds an immersed path; rejects endpoint mismatches and
    /// backtracking.
    pub fn immersed(graph: &MarkedGraph, start: VertexId, edges: Vec<OrientedEdge>) -> Result<Self> {
        let path = EdgePath::walk(graph, start, edges)?;
        if !path.is_immersed() {
            return Err(validation("path backtracks"));
        }
        Ok(path)
    }

    /// Builds a path that may backtrack (used before tightening).
    pub fn walk(graph: &MarkedGraph, start: VertexId, edges: Vec<OrientedEdge>) -> Result<Self> {
        let mut cur = start;
        for &e in &edges {
            if graph.from(e) != cur {
                return Err(validation(
                    format_args!("edge {} does not continue the path", graph.edge_name(e.edge)).to_string(),
                ));
            }
            cur = graph.to(e);
        }
        Ok(EdgePath { start, edges })
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self, graph: &MarkedGraph) -> VertexId {
        self.edges.last().map_or(self.start, |&e| graph.to(e))
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_immersed(&self) -> bool {
        self.edges.windows(2).all(|w| w[1] != w[0].reversed())
    }

    pub fn reversed(&self, graph: &MarkedGraph) -> EdgePath {
        let end = self.end(graph);
        EdgePath {
            start: end,
            edges: self.edges.iter().rev().map(|e| e.reversed()).collect(),
        }
    }

    /// Concatenation without reduction; errors if endpoints mismatch.
    pub fn concat(&self, graph: &MarkedGraph, other: &EdgePath) -> Result<EdgePath> {
        if self.end(graph) != other.start {
            return Err(validation("concatenation endpoints do not match"));
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().copied());
        Ok(EdgePath { start: self.start, edges })
    }

    /// Removes backtracking; endpoints are preserved.
    pub fn tightened(&self) -> EdgePath {
        let mut stack: Vec<OrientedEdge> = Vec::new();
        for &e in &self.edges {
            if stack.last() == Some(&e.reversed()) {
                stack.pop();
            } else {
                stack.push(e);
            }
        }
        EdgePath { start: self.start, edges: stack }
    }

    /// The subpath spanning edge positions `i..j` (half open).
    pub fn subpath(&self, graph: &MarkedGraph, i: usize, j: usize) -> EdgePath {
        let start = if i == 0 {
            self.start
        } else {
            graph.to(self.edges[i - 1])
        };
        EdgePath {
            start,
            edges: self.edges[i..j].to_vec(),
        }
    }

    /// Group coordinates of the vertices visited by (the standard lift
    /// of) the path: `prefix_words()[k]` is the marking word of the first
    /// `k` edges. Length is `len() + 1`.
    pub fn prefix_words(&self, graph: &MarkedGraph) -> Vec<Word> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        let mut cur = Word::identity();
        out.push(cur.clone());
        for &e in &self.edges {
            if let Some(l) = graph.letter(e) {
                cur = cur.mul(&Word::letter(l));
            }
            out.push(cur.clone());
        }
        out
    }

    /// The vertex visited after `k` edges.
    pub fn vertex_at(&self, graph: &MarkedGraph, k: usize) -> VertexId {
        if k == 0 {
            self.start
        } else {
            graph.to(self.edges[k - 1])
        }
    }

    pub fn display(&self, graph: &MarkedGraph) -> alloc::string::String {
        if self.edges.is_empty() {
            return format_args!("({})", graph.vertex_name(self.start)).to_string();
        }
        let parts: Vec<alloc::string::String> = self
            .edges
            .iter()
            .map(|&e| {
                let mut s = graph.edge_name(e.edge).to_string();
                if !e.forward {
                    s.push_str("^-1");
                }
                s
            })
            .collect();
        parts.join(" ")
    }
}
