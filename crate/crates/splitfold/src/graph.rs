//! Finite marked graphs: the base graphs presenting free splittings.
//!
//! A marked graph is a finite connected graph together with a choice of
//! spanning tree and a bijection between its non-tree edges and the
//! letters of a [`Basis`]. Reading the marking letters along a closed
//! loop identifies the fundamental group with `F_n`; reading them along
//! an arbitrary path gives the group coordinates used for universal
//! cover computations throughout the crate.

use crate::error::{validation, Result};
use crate::word::{Basis, Letter, Word};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// An unoriented edge together with a traversal direction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub forward: bool,
}

impl OrientedEdge {
    pub fn forward(edge: EdgeId) -> Self {
        OrientedEdge { edge, forward: true }
    }

    pub fn backward(edge: EdgeId) -> Self {
        OrientedEdge { edge, forward: false }
    }

    pub fn reversed(self) -> Self {
        OrientedEdge {
            edge: self.edge,
            forward: !self.forward,
        }
    }
}

impl fmt::Debug for OrientedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.forward { "+" } else { "-" }, self.edge.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct EdgeData {
    name: String,
    from: VertexId,
    to: VertexId,
}

/// A finite connected marked graph over a fixed basis.
#[derive(Clone, PartialEq, Eq)]
pub struct MarkedGraph {
    vertex_names: Vec<String>,
    edges: Vec<EdgeData>,
    basis: Basis,
    /// Spanning tree edges.
    tree: BTreeSet<EdgeId>,
    /// Marking: positive letter carried by each non-tree edge.
    letters: BTreeMap<EdgeId, Letter>,
}

impl fmt::Debug for MarkedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MarkedGraph({} vertices, {} edges, rank {})",
            self.vertex_names.len(),
            self.edges.len(),
            self.basis.rank()
        )
    }
}

impl MarkedGraph {
    /// Builds a marked graph. `edges` are `(name, from, to)` triples over
    /// the vertex names. When `marking` is given it must assign every
    /// basis letter to exactly one edge and its complement must be a
    /// spanning tree; otherwise the lexicographically least spanning tree
    /// is chosen and letters are assigned to the remaining edges in
    /// lexicographic name order.
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String)>,
        basis: Basis,
        marking: Option<BTreeMap<String, String>>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(validation("graph needs at least one vertex"));
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(validation(format_args!("duplicate vertex name {v}").to_string()));
            }
        }
        let index_of = |name: &str| -> Result<VertexId> {
            vertices
                .iter()
                .position(|v| v == name)
                .map(|i| VertexId(i as u32))
                .ok_or_else(|| validation(format_args!("unknown vertex {name}").to_string()))
        };
        let mut edge_data = Vec::new();
        let mut edge_names = BTreeSet::new();
        for (name, from, to) in edges {
            if !edge_names.insert(name.clone()) {
                return Err(validation(format_args!("duplicate edge name {name}").to_string()));
            }
            edge_data.push(EdgeData {
                name,
                from: index_of(&from)?,
                to: index_of(&to)?,
            });
        }

        let mut graph = MarkedGraph {
            vertex_names: vertices,
            edges: edge_data,
            basis,
            tree: BTreeSet::new(),
            letters: BTreeMap::new(),
        };
        graph.check_connected()?;
        for v in 0..graph.vertex_names.len() {
            if graph.valence(VertexId(v as u32)) == 0 && graph.vertex_names.len() > 1 {
                return Err(validation(
                    format_args!("isolated vertex {}", graph.vertex_names[v]).to_string(),
                ));
            }
        }

        match marking {
            Some(assignment) => graph.install_explicit_marking(assignment)?,
            None => graph.install_auto_marking()?,
        }
        Ok(graph)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.vertex_names.len();
        let mut seen = alloc::vec![false; n];
        let mut stack = alloc::vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                    if a.0 as usize == v && !seen[b.0 as usize] {
                        seen[b.0 as usize] = true;
                        stack.push(b.0 as usize);
                    }
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(validation("graph is not connected"))
        }
    }

    /// Rebuilds the auto marking with the given edges preferred for the
    /// spanning tree (used to keep collapsed tree components unmarked).
    pub fn with_tree_preference(mut self, prefer: &BTreeSet<EdgeId>) -> Result<Self> {
        let tree = self.spanning_tree_preferring(prefer);
        let mut non_tree: Vec<EdgeId> = (0..self.edges.len())
            .map(|i| EdgeId(i as u32))
            .filter(|e| !tree.contains(e))
            .collect();
        non_tree.sort_by(|a, b| self.edge_name(*a).cmp(self.edge_name(*b)));
        if non_tree.len() != self.basis.rank() {
            return Err(validation("rank mismatch while re-marking"));
        }
        let mut letters = BTreeMap::new();
        for (i, e) in non_tree.into_iter().enumerate() {
            letters.insert(e, Letter::positive(i as u16));
        }
        self.tree = tree;
        self.letters = letters;
        Ok(self)
    }

    fn spanning_tree_preferring(&self, prefer: &BTreeSet<EdgeId>) -> BTreeSet<EdgeId> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| (!prefer.contains(&EdgeId(i as u32)), self.edges[i].name.clone()));
        self.kruskal(order)
    }

    /// Kruskal over edges sorted by name; deterministic and frozen.
    fn lex_spanning_tree(&self) -> BTreeSet<EdgeId> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| self.edges[a].name.cmp(&self.edges[b].name));
        self.kruskal(order)
    }

    fn kruskal(&self, order: Vec<usize>) -> BTreeSet<EdgeId> {
        let mut parent: Vec<usize> = (0..self.vertex_names.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        let mut tree = BTreeSet::new();
        for i in order {
            let (a, b) = (self.edges[i].from.0 as usize, self.edges[i].to.0 as usize);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                tree.insert(EdgeId(i as u32));
            }
        }
        tree
    }

    /// The explicit marking data, for re-serialization.
    pub fn marking(&self) -> impl Iterator<Item = (EdgeId, Letter)> + '_ {
        self.letters.iter().map(|(&e, &l)| (e, l))
    }

    fn install_auto_marking(&mut self) -> Result<()> {
        let tree = self.lex_spanning_tree();
        let mut non_tree: Vec<EdgeId> = (0..self.edges.len())
            .map(|i| EdgeId(i as u32))
            .filter(|e| !tree.contains(e))
            .collect();
        non_tree.sort_by(|a, b| self.edge_name(*a).cmp(self.edge_name(*b)));
        if non_tree.len() != self.basis.rank() {
            return Err(validation(format_args!(
                "graph has rank {} but basis has rank {}",
                non_tree.len(),
                self.basis.rank()
            )
            .to_string()));
        }
        let mut letters = BTreeMap::new();
        for (i, e) in non_tree.into_iter().enumerate() {
            letters.insert(e, Letter::positive(i as u16));
        }
        self.tree = tree;
        self.letters = letters;
        Ok(())
    }

    fn install_explicit_marking(&mut self, assignment: BTreeMap<String, String>) -> Result<()> {
        let mut letters = BTreeMap::new();
        let mut used = BTreeSet::new();
        for (edge_name, letter_name) in &assignment {
            let e = self
                .edge_by_name(edge_name)
                .ok_or_else(|| validation(format_args!("marking names unknown edge {edge_name}").to_string()))?;
            let l = self
                .basis
                .letter_by_name(letter_name)
                .ok_or_else(|| validation(format_args!("marking names unknown letter {letter_name}").to_string()))?;
            if !used.insert(l) {
                return Err(validation(
                    format_args!("letter {letter_name} assigned to two edges").to_string(),
                ));
            }
            letters.insert(e, l);
        }
        if letters.len() != self.basis.rank() {
            return Err(validation("marking must assign every basis letter"));
        }
        let tree: BTreeSet<EdgeId> = (0..self.edges.len())
            .map(|i| EdgeId(i as u32))
            .filter(|e| !letters.contains_key(e))
            .collect();
        if tree.len() != self.vertex_names.len() - 1 {
            return Err(validation("unmarked edges do not form a spanning tree"));
        }
        // A connected subgraph touching all vertices with V-1 edges is a tree.
        let mut parent: Vec<usize> = (0..self.vertex_names.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            r
        }
        for &e in &tree {
            let d = &self.edges[e.0 as usize];
            let (ra, rb) = (find(&mut parent, d.from.0 as usize), find(&mut parent, d.to.0 as usize));
            if ra == rb {
                return Err(validation("unmarked edges contain a cycle"));
            }
            parent[ra] = rb;
        }
        self.tree = tree;
        self.letters = letters;
        Ok(())
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len()).map(|i| VertexId(i as u32))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(|i| EdgeId(i as u32))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0 as usize]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0 as usize].name
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|v| v == name).map(|i| VertexId(i as u32))
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.name == name).map(|i| EdgeId(i as u32))
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let d = &self.edges[e.0 as usize];
        (d.from, d.to)
    }

    pub fn from(&self, oe: OrientedEdge) -> VertexId {
        let d = &self.edges[oe.edge.0 as usize];
        if oe.forward {
            d.from
        } else {
            d.to
        }
    }

    pub fn to(&self, oe: OrientedEdge) -> VertexId {
        self.from(oe.reversed())
    }

    /// Oriented edges leaving `v` (“directions at `v`”), in stable order.
    pub fn directions(&self, v: VertexId) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for (i, d) in self.edges.iter().enumerate() {
            if d.from == v {
                out.push(OrientedEdge::forward(EdgeId(i as u32)));
            }
            if d.to == v {
                out.push(OrientedEdge::backward(EdgeId(i as u32)));
            }
        }
        out
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.directions(v).len()
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.tree.contains(&e)
    }

    pub fn tree_edges(&self) -> &BTreeSet<EdgeId> {
        &self.tree
    }

    /// The marking letter read when traversing `oe`, `None` on tree edges.
    pub fn letter(&self, oe: OrientedEdge) -> Option<Letter> {
        self.letters.get(&oe.edge).map(|&l| if oe.forward { l } else { l.inverse() })
    }

    pub fn edge_with_letter(&self, l: Letter) -> Option<OrientedEdge> {
        let positive = if l.is_positive() { l } else { l.inverse() };
        self.letters.iter().find(|(_, &m)| m == positive).map(|(&e, _)| {
            if l.is_positive() {
                OrientedEdge::forward(e)
            } else {
                OrientedEdge::backward(e)
            }
        })
    }

    /// Group coordinate change along a path: the product of the marking
    /// letters of its edges, freely reduced.
    pub fn path_word(&self, edges: &[OrientedEdge]) -> Word {
        Word::from_letters(edges.iter().filter_map(|&e| self.letter(e)))
    }

    /// The unique reduced path from `u` to `v` inside the spanning tree.
    pub fn tree_path(&self, u: VertexId, v: VertexId) -> Vec<OrientedEdge> {
        if u == v {
            return Vec::new();
        }
        // BFS in the tree from u.
        let n = self.vertex_names.len();
        let mut prev: Vec<Option<OrientedEdge>> = alloc::vec![None; n];
        let mut seen = alloc::vec![false; n];
        let mut queue = alloc::collections::VecDeque::new();
        seen[u.0 as usize] = true;
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for &e in &self.tree {
                let d = &self.edges[e.0 as usize];
                for oe in [OrientedEdge::forward(e), OrientedEdge::backward(e)] {
                    let _ = d;
                    if self.from(oe) == x {
                        let t = self.to(oe);
                        if !seen[t.0 as usize] {
                            seen[t.0 as usize] = true;
                            prev[t.0 as usize] = Some(oe);
                            queue.push_back(t);
                        }
                    }
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = v;
        while cur != u {
            let oe = prev[cur.0 as usize].expect("spanning tree connects all vertices");
            path.push(oe);
            cur = self.from(oe);
        }
        path.reverse();
        path
    }

    /// Lexicographically least vertex name; used as the base vertex for
    /// fundamental group computations.
    pub fn base_vertex(&self) -> VertexId {
        let mut best = VertexId(0);
        for v in self.vertices() {
            if self.vertex_name(v) < self.vertex_name(best) {
                best = v;
            }
        }
        best
    }

    /// The element of `F_n` represented by a closed loop at any vertex:
    /// the word of marking letters along it. For the standard spanning
    /// tree identification this is the marking isomorphism.
    pub fn loop_word(&self, edges: &[OrientedEdge]) -> Word {
        self.path_word(edges)
    }

    /// First Betti number (= basis rank, by the marking invariant).
    pub fn rank(&self) -> usize {
        self.edges.len() - (self.vertex_names.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    pub(crate) fn rose2() -> MarkedGraph {
        MarkedGraph::new(
            vec!["v".into()],
            vec![
                ("a".into(), "v".into(), "v".into()),
                ("b".into(), "v".into(), "v".into()),
            ],
            Basis::standard(2).unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn rose_marking_assigns_letters_in_order() {
        let g = rose2();
        assert_eq!(g.rank(), 2);
        let a = g.edge_by_name("a").unwrap();
        let b = g.edge_by_name("b").unwrap();
        assert_eq!(g.letter(OrientedEdge::forward(a)), Some(Letter::positive(0)));
        assert_eq!(g.letter(OrientedEdge::backward(b)), Some(Letter::positive(1).inverse()));
        assert!(g.tree_edges().is_empty());
    }

    #[test]
    fn barbell_tree_and_paths() {
        let g = MarkedGraph::new(
            vec!["p".into(), "q".into()],
            vec![
                ("a".into(), "p".into(), "p".into()),
                ("b".into(), "q".into(), "q".into()),
                ("e".into(), "p".into(), "q".into()),
            ],
            Basis::standard(2).unwrap(),
            None,
        )
        .unwrap();
        let e = g.edge_by_name("e").unwrap();
        assert!(g.is_tree_edge(e));
        let p = g.vertex_by_name("p").unwrap();
        let q = g.vertex_by_name("q").unwrap();
        let path = g.tree_path(p, q);
        assert_eq!(path, vec![OrientedEdge::forward(e)]);
        assert!(g.path_word(&path).is_empty());
    }

    #[test]
    fn explicit_marking_must_cover_basis() {
        let mut marking = BTreeMap::new();
        marking.insert("a".to_string(), "a".to_string());
        let err = MarkedGraph::new(
            vec!["v".into()],
            vec![
                ("a".into(), "v".into(), "v".into()),
                ("b".into(), "v".into(), "v".into()),
            ],
            Basis::standard(2).unwrap(),
            Some(marking),
        );
        assert!(err.is_err());
    }
}
