//! Free splittings presented by marked graphs with collapse data.
//!
//! A [`FreeSplitting`] is a marked base graph `B` plus a collapsed
//! subgraph `Z`. The splitting itself is the tree `T`: the universal
//! cover of `B` with every lift of `Z` crushed to a point. Vertex
//! stabilizers of `T` are the (conjugates of the) marking images of the
//! fundamental groups of the components of `Z`.
//!
//! Paths of `T` are always handled through their *canonical lifts*:
//! immersed edge paths of `B` that begin and end with uncollapsed edges.
//! The collapse map restricts to a bijection between such paths and
//! nontrivial reduced paths of `T`, so this encoding is lossless.
//!
//! Vertices of the standard lift of a path in the universal cover are
//! tracked through their *group coordinates*: the marking word of the
//! traversed prefix. Two positions of a path carrying the same
//! unoriented base edge determine (at most) one deck transformation
//! aligning one occurrence onto the other; see
//! [`FreeSplitting::element_of_translate`].

use crate::error::{validation, Error, Result};
use crate::graph::{EdgeId, MarkedGraph, OrientedEdge, VertexId};
use crate::path::EdgePath;
use crate::subgroup::StallingsGraph;
use crate::word::{Basis, Word};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// A vertex of the collapsed quotient graph `B/Z`: either a bare vertex
/// of `B` or a whole component of `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum QVertex {
    Bare(VertexId),
    Comp(usize),
}

/// A component of the collapsed subgraph.
#[derive(Clone, Debug)]
pub struct ZComponent {
    pub edges: BTreeSet<EdgeId>,
    pub vertices: BTreeSet<VertexId>,
    pub root: VertexId,
    /// Marking word of the in-component tree path from the root to each
    /// component vertex.
    rho: BTreeMap<VertexId, Word>,
    /// For each non-root component vertex: the in-component spanning
    /// tree edge arriving at it, and its parent vertex.
    parent: BTreeMap<VertexId, (OrientedEdge, VertexId)>,
    /// Folded graph of the marking image of the component's fundamental
    /// group: the vertex stabilizer this component collapses to.
    pub stabilizer: StallingsGraph,
}

impl ZComponent {
    pub fn stabilizer_rank(&self) -> usize {
        self.stabilizer.rank()
    }

    pub fn rho(&self, v: VertexId) -> &Word {
        &self.rho[&v]
    }

    /// Unique reduced in-component path between two component vertices,
    /// through the component's spanning tree.
    fn tree_geodesic(&self, u: VertexId, v: VertexId) -> Vec<OrientedEdge> {
        let up: Vec<OrientedEdge> = self.path_to_root(u);
        let down: Vec<OrientedEdge> = self
            .path_to_root(v)
            .into_iter()
            .rev()
            .map(|e| e.reversed())
            .collect();
        let mut all = up;
        all.extend(down);
        // Tighten; in a tree this leaves the geodesic.
        let mut stack: Vec<OrientedEdge> = Vec::new();
        for e in all {
            if stack.last() == Some(&e.reversed()) {
                stack.pop();
            } else {
                stack.push(e);
            }
        }
        stack
    }

    fn path_to_root(&self, mut v: VertexId) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        while v != self.root {
            let (oe, parent) = self.parent[&v];
            out.push(oe.reversed());
            v = parent;
        }
        out
    }
}

/// A free splitting of `F_n`: base marked graph plus collapsed subgraph.
#[derive(Clone)]
pub struct FreeSplitting {
    graph: MarkedGraph,
    collapsed: BTreeSet<EdgeId>,
    components: Vec<ZComponent>,
    vertex_comp: BTreeMap<VertexId, usize>,
}

impl fmt::Debug for FreeSplitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FreeSplitting({:?}, {} collapsed)",
            self.graph,
            self.collapsed.len()
        )
    }
}

impl FreeSplitting {
    /// Validates and builds a splitting over an already-marked graph.
    pub fn new(graph: MarkedGraph, collapsed: BTreeSet<EdgeId>) -> Result<Self> {
        for &e in &collapsed {
            if e.0 as usize >= graph.edge_count() {
                return Err(validation("collapsed set names a nonexistent edge"));
            }
        }
        if collapsed.len() == graph.edge_count() {
            return Err(validation("collapsed subgraph must be proper"));
        }
        let (components, vertex_comp) = build_components(&graph, &collapsed)?;
        let split = FreeSplitting {
            graph,
            collapsed,
            components,
            vertex_comp,
        };
        split.check_minimal()?;
        Ok(split)
    }

    /// Builds graph and splitting together, choosing the spanning tree to
    /// prefer collapsed edges so that collapsed tree components stay
    /// unmarked.
    pub fn with_auto_marking(
        vertices: Vec<String>,
        edges: Vec<(String, String, String)>,
        collapsed_names: &BTreeSet<String>,
        basis: Basis,
    ) -> Result<Self> {
        let graph = MarkedGraph::new(vertices, edges, basis, None)?;
        let collapsed: BTreeSet<EdgeId> = {
            let mut out = BTreeSet::new();
            for name in collapsed_names {
                let e = graph
                    .edge_by_name(name)
                    .ok_or_else(|| validation(format_args!("unknown collapsed edge {name}").to_string()))?;
                out.insert(e);
            }
            out
        };
        let graph = graph.with_tree_preference(&collapsed)?;
        FreeSplitting::new(graph, collapsed)
    }

    fn check_minimal(&self) -> Result<()> {
        // Collapsed tree components must consist of unmarked edges, so
        // that collapsing them in the base graph preserves the marking.
        for c in &self.components {
            if c.stabilizer_rank() == 0 {
                for &e in &c.edges {
                    if !self.graph.is_tree_edge(e) {
                        return Err(validation(
                            "collapsed tree component contains a marked edge; choose a spanning tree through the collapsed subgraph",
                        ));
                    }
                }
            }
        }
        for q in self.qvertices() {
            if self.q_stabilizer_rank(q) == 0 && self.q_valence(q) < 2 {
                return Err(validation(
                    "splitting is not minimal: a trivially stabilized vertex has valence < 2",
                ));
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> &MarkedGraph {
        &self.graph
    }

    pub fn basis(&self) -> &Basis {
        self.graph.basis()
    }

    pub fn collapsed(&self) -> &BTreeSet<EdgeId> {
        &self.collapsed
    }

    pub fn is_collapsed(&self, e: EdgeId) -> bool {
        self.collapsed.contains(&e)
    }

    pub fn is_grushko(&self) -> bool {
        self.collapsed.is_empty()
    }

    pub fn uncollapsed_edges(&self) -> Vec<EdgeId> {
        self.graph
            .edge_ids()
            .filter(|e| !self.is_collapsed(*e))
            .collect()
    }

    pub fn components(&self) -> &[ZComponent] {
        &self.components
    }

    pub fn qvertex(&self, v: VertexId) -> QVertex {
        match self.vertex_comp.get(&v) {
            Some(&c) => QVertex::Comp(c),
            None => QVertex::Bare(v),
        }
    }

    pub fn qvertices(&self) -> Vec<QVertex> {
        let mut out = Vec::new();
        for v in self.graph.vertices() {
            match self.qvertex(v) {
                QVertex::Bare(b) => out.push(QVertex::Bare(b)),
                QVertex::Comp(c) => {
                    if self.components[c].root == v {
                        out.push(QVertex::Comp(c));
                    }
                }
            }
        }
        out
    }

    /// Uncollapsed directions at a quotient vertex.
    pub fn q_directions(&self, q: QVertex) -> Vec<OrientedEdge> {
        let vertices: Vec<VertexId> = match q {
            QVertex::Bare(v) => alloc::vec![v],
            QVertex::Comp(c) => self.components[c].vertices.iter().copied().collect(),
        };
        let mut out = Vec::new();
        for v in vertices {
            for d in self.graph.directions(v) {
                if !self.is_collapsed(d.edge) {
                    out.push(d);
                }
            }
        }
        out
    }

    pub fn q_valence(&self, q: QVertex) -> usize {
        self.q_directions(q).len()
    }

    pub fn q_stabilizer_rank(&self, q: QVertex) -> usize {
        match q {
            QVertex::Bare(_) => 0,
            QVertex::Comp(c) => self.components[c].stabilizer_rank(),
        }
    }

    /// Natural vertices: nontrivial stabilizer or valence at least 3.
    pub fn is_natural(&self, q: QVertex) -> bool {
        self.q_stabilizer_rank(q) > 0 || self.q_valence(q) >= 3
    }

    /// The natural graph structure: the partition of the uncollapsed
    /// edges into natural edges together with the natural vertex set.
    ///
    /// Errors when no natural vertex exists (the rank-one circle
    /// quotient, whose natural structure degenerates to a line).
    pub fn natural_structure(&self) -> Result<NaturalStructure> {
        let natural_vertices: Vec<QVertex> =
            self.qvertices().into_iter().filter(|&q| self.is_natural(q)).collect();
        if natural_vertices.is_empty() {
            return Err(Error::Inapplicable(
                "splitting has no natural vertices (circle quotient)".into(),
            ));
        }
        // Walk chains starting from every direction at a natural vertex.
        let mut chains: Vec<Vec<OrientedEdge>> = Vec::new();
        let mut seen: BTreeSet<Vec<OrientedEdge>> = BTreeSet::new();
        for &q in &natural_vertices {
            for d in self.q_directions(q) {
                let mut chain = alloc::vec![d];
                loop {
                    let last = *chain.last().unwrap();
                    let tail_q = self.qvertex(self.graph.to(last));
                    if self.is_natural(tail_q) {
                        break;
                    }
                    let dirs = self.q_directions(tail_q);
                    debug_assert_eq!(dirs.len(), 2);
                    let back = last.reversed();
                    let next = if dirs[0] == back { dirs[1] } else { dirs[0] };
                    chain.push(next);
                }
                let rev: Vec<OrientedEdge> = chain.iter().rev().map(|e| e.reversed()).collect();
                // Prefer forward orientations in the representative.
                let key = |c: &[OrientedEdge]| -> Vec<(u32, bool)> {
                    c.iter().map(|e| (e.edge.0, !e.forward)).collect()
                };
                let canon = if key(&chain) <= key(&rev) { chain } else { rev };
                if seen.insert(canon.clone()) {
                    chains.push(canon);
                }
            }
        }
        chains.sort();
        let mut class_of = BTreeMap::new();
        let mut edges = Vec::new();
        for chain in chains {
            let lift = self.chain_lift(&chain)?;
            let idx = edges.len();
            for oe in &chain {
                class_of.insert(oe.edge, idx);
            }
            edges.push(NaturalEdge { chain, lift });
        }
        // Every uncollapsed edge must land in exactly one class.
        for e in self.uncollapsed_edges() {
            if !class_of.contains_key(&e) {
                return Err(Error::PropertyViolation(
                    "natural edge chains do not cover the uncollapsed edges".into(),
                ));
            }
        }
        Ok(NaturalStructure {
            edges,
            natural_vertices,
            class_of,
        })
    }

    /// Canonical lift of a chain of uncollapsed edges: inserts the unique
    /// in-component geodesics between consecutive chain edges.
    fn chain_lift(&self, chain: &[OrientedEdge]) -> Result<EdgePath> {
        let mut edges: Vec<OrientedEdge> = Vec::new();
        for (i, &d) in chain.iter().enumerate() {
            if i > 0 {
                let prev_end = self.graph.to(chain[i - 1]);
                let here = self.graph.from(d);
                if prev_end != here {
                    let c = self.vertex_comp.get(&prev_end).copied().ok_or_else(|| {
                        Error::PropertyViolation("chain gap outside a collapsed component".into())
                    })?;
                    if self.vertex_comp.get(&here) != Some(&c) {
                        return Err(Error::PropertyViolation(
                            "consecutive chain edges attach to different components".into(),
                        ));
                    }
                    edges.extend(self.components[c].tree_geodesic(prev_end, here));
                }
            }
            edges.push(d);
        }
        let start = self.graph.from(chain[0]);
        EdgePath::immersed(&self.graph, start, edges)
    }

    /// Validates a canonical lift: nontrivial, immersed (by `EdgePath`),
    /// beginning and ending with uncollapsed edges.
    pub fn validate_canonical(&self, path: &EdgePath) -> Result<()> {
        if path.is_trivial() {
            return Err(validation("canonical lifts of nontrivial paths are nonempty"));
        }
        let first = path.edges()[0];
        let last = *path.edges().last().unwrap();
        if self.is_collapsed(first.edge) || self.is_collapsed(last.edge) {
            return Err(validation(
                "malformed encoding: path must begin and end with uncollapsed edges",
            ));
        }
        Ok(())
    }

    /// Lifts a reduced quotient path (given in its canonical encoding as
    /// a base graph path) through the collapse. With this encoding the
    /// lift is the path itself; the operation validates the encoding.
    pub fn lift_path(&self, path: &EdgePath) -> Result<EdgePath> {
        self.validate_canonical(path)?;
        Ok(path.clone())
    }

    /// Trims collapsed prefix and suffix: the canonical encoding of the
    /// projection of an arbitrary immersed base path. Inverse of
    /// [`FreeSplitting::lift_path`] on admissible inputs.
    pub fn project_path(&self, path: &EdgePath) -> Result<EdgePath> {
        let edges = path.edges();
        let lo = edges.iter().position(|e| !self.is_collapsed(e.edge));
        let Some(lo) = lo else {
            return Err(validation("path projects to a point of the splitting"));
        };
        let hi = edges.iter().rposition(|e| !self.is_collapsed(e.edge)).unwrap();
        Ok(path.subpath(&self.graph, lo, hi + 1))
    }

    /// Positions of the uncollapsed edges of a canonical lift: the edges
    /// of the represented tree path.
    pub fn t_edge_positions(&self, path: &EdgePath) -> Vec<usize> {
        path.edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| !self.is_collapsed(e.edge))
            .map(|(i, _)| i)
            .collect()
    }

    /// The deck transformation carrying the lift of `path`'s edge at
    /// position `i` onto the lift at position `j`, preserving the
    /// traversal orientation when `same_orientation`, else reversing it.
    ///
    /// Returns `None` when no deck transformation realizes the requested
    /// alignment (in particular, an edge can never be carried onto its
    /// own reverse: free splittings have no inversions).
    pub fn element_of_translate(
        &self,
        path: &EdgePath,
        i: usize,
        j: usize,
        same_orientation: bool,
    ) -> Result<Option<Word>> {
        let edges = path.edges();
        if i >= edges.len() || j >= edges.len() {
            return Err(validation("edge position out of range"));
        }
        if edges[i].edge != edges[j].edge {
            return Err(validation(
                "positions do not carry the same unoriented base edge",
            ));
        }
        let pre = path.prefix_words(&self.graph);
        if same_orientation {
            if edges[i] != edges[j] {
                return Ok(None);
            }
            Ok(Some(pre[j].mul(&pre[i].inverse())))
        } else {
            if edges[i] != edges[j].reversed() {
                return Ok(None);
            }
            Ok(Some(pre[j + 1].mul(&pre[i].inverse())))
        }
    }

    /// Re-runs the alignment check for a claimed translate: `g` carries
    /// the edge lift at `i` onto the (possibly reversed) lift at `j`.
    pub fn verify_alignment(
        &self,
        path: &EdgePath,
        g: &Word,
        i: usize,
        j: usize,
        same_orientation: bool,
    ) -> bool {
        let edges = path.edges();
        let pre = path.prefix_words(&self.graph);
        if same_orientation {
            edges[i] == edges[j] && g.mul(&pre[i]) == pre[j]
        } else {
            edges[i] == edges[j].reversed() && g.mul(&pre[i]) == pre[j + 1]
        }
    }

    /// Canonical key of the unoriented universal cover edge traversed at
    /// position `k`: the forward edge plus the group coordinate of its
    /// initial endpoint.
    pub fn ukey(&self, path: &EdgePath, pre: &[Word], k: usize) -> (EdgeId, Word) {
        let oe = path.edges()[k];
        if oe.forward {
            (oe.edge, pre[k].clone())
        } else {
            (oe.edge, pre[k + 1].clone())
        }
    }

    /// Tree-vertex visits of a canonical lift, with the anchored group
    /// coordinate of each visited vertex of the splitting.
    pub fn t_visits(&self, path: &EdgePath) -> Vec<TVisit> {
        let pre = path.prefix_words(&self.graph);
        let edges = path.edges();
        let mut visits = Vec::new();
        let mut k = 0usize;
        while k <= edges.len() {
            // Extend over a maximal run of collapsed edges.
            let start = k;
            while k < edges.len() && self.is_collapsed(edges[k].edge) {
                k += 1;
            }
            let v = path.vertex_at(&self.graph, start);
            let visit = match self.qvertex(v) {
                QVertex::Bare(b) => TVisit {
                    q: QVertex::Bare(b),
                    anchor: pre[start].clone(),
                    first_pos: start,
                    last_pos: k,
                },
                QVertex::Comp(c) => TVisit {
                    q: QVertex::Comp(c),
                    anchor: pre[start].mul(&self.components[c].rho(v).inverse()),
                    first_pos: start,
                    last_pos: k,
                },
            };
            visits.push(visit);
            k += 1;
        }
        visits
    }

    /// Collapses every collapsed tree component of the base graph; the
    /// resulting splitting presents the same tree.
    pub fn normalized(&self) -> Result<(FreeSplitting, NormalizeMap)> {
        let tree_comps: Vec<usize> = (0..self.components.len())
            .filter(|&c| self.components[c].stabilizer_rank() == 0)
            .collect();
        if tree_comps.is_empty() {
            return Ok((
                self.clone(),
                NormalizeMap {
                    identity: true,
                    vertex_map: BTreeMap::new(),
                    removed_edges: BTreeSet::new(),
                },
            ));
        }
        let g = &self.graph;
        // Each removed component is replaced by its root vertex.
        let mut vertex_map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut removed_edges: BTreeSet<EdgeId> = BTreeSet::new();
        for &c in &tree_comps {
            let comp = &self.components[c];
            for &v in &comp.vertices {
                vertex_map.insert(v, comp.root);
            }
            removed_edges.extend(comp.edges.iter().copied());
        }
        let keep_vertex = |v: VertexId| -> VertexId { *vertex_map.get(&v).unwrap_or(&v) };
        let mut vertices: Vec<String> = Vec::new();
        for v in g.vertices() {
            if keep_vertex(v) == v {
                vertices.push(g.vertex_name(v).to_string());
            }
        }
        let mut edges: Vec<(String, String, String)> = Vec::new();
        let mut marking: BTreeMap<String, String> = BTreeMap::new();
        for e in g.edge_ids() {
            if removed_edges.contains(&e) {
                continue;
            }
            let (from, to) = g.endpoints(e);
            edges.push((
                g.edge_name(e).to_string(),
                g.vertex_name(keep_vertex(from)).to_string(),
                g.vertex_name(keep_vertex(to)).to_string(),
            ));
            if let Some(l) = g.letter(OrientedEdge::forward(e)) {
                marking.insert(g.edge_name(e).to_string(), g.basis().display_letter(l));
            }
        }
        let new_graph = MarkedGraph::new(vertices, edges, g.basis().clone(), Some(marking))?;
        let new_collapsed: BTreeSet<EdgeId> = self
            .collapsed
            .iter()
            .filter(|e| !removed_edges.contains(e))
            .map(|&e| new_graph.edge_by_name(g.edge_name(e)).unwrap())
            .collect();
        let normalized = FreeSplitting::new(new_graph, new_collapsed)?;
        Ok((
            normalized,
            NormalizeMap {
                identity: false,
                vertex_map,
                removed_edges,
            },
        ))
    }

    /// Transports a canonical lift through [`FreeSplitting::normalized`]:
    /// drops the removed connector edges.
    pub fn normalize_path(&self, normalized: &FreeSplitting, map: &NormalizeMap, path: &EdgePath) -> Result<EdgePath> {
        if map.identity {
            return Ok(path.clone());
        }
        let mut edges = Vec::new();
        for &oe in path.edges() {
            if map.removed_edges.contains(&oe.edge) {
                continue;
            }
            let ne = normalized
                .graph()
                .edge_by_name(self.graph.edge_name(oe.edge))
                .expect("kept edges preserve names");
            edges.push(OrientedEdge {
                edge: ne,
                forward: oe.forward,
            });
        }
        if edges.is_empty() {
            return Err(validation("path collapses to a point under normalization"));
        }
        let start = normalized
            .graph()
            .vertex_by_name(
                self.graph.vertex_name(*map
                    .vertex_map
                    .get(&path.start())
                    .unwrap_or(&path.start())),
            )
            .expect("kept vertices preserve names");
        EdgePath::immersed(normalized.graph(), start, edges)
    }
}

/// Result of collapsing the tree components of the collapsed subgraph.
#[derive(Clone, Debug)]
pub struct NormalizeMap {
    pub identity: bool,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub removed_edges: BTreeSet<EdgeId>,
}

/// One vertex visit of a canonical lift.
#[derive(Clone, Debug)]
pub struct TVisit {
    pub q: QVertex,
    /// Group coordinate: exact for bare vertices, a left coset
    /// representative (anchored at the component root) for collapsed
    /// components.
    pub anchor: Word,
    /// First vertex position of the visit along the path.
    pub first_pos: usize,
    /// Last vertex position of the visit.
    pub last_pos: usize,
}

/// A natural edge orbit: the maximal chain of uncollapsed edges between
/// natural vertices, plus the canonical lift of a representative.
#[derive(Clone, Debug)]
pub struct NaturalEdge {
    pub chain: Vec<OrientedEdge>,
    pub lift: EdgePath,
}

/// The natural graph structure of a splitting.
#[derive(Clone, Debug)]
pub struct NaturalStructure {
    pub edges: Vec<NaturalEdge>,
    pub natural_vertices: Vec<QVertex>,
    pub class_of: BTreeMap<EdgeId, usize>,
}

fn build_components(
    graph: &MarkedGraph,
    collapsed: &BTreeSet<EdgeId>,
) -> Result<(Vec<ZComponent>, BTreeMap<VertexId, usize>)> {
    let mut vertex_comp: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut components: Vec<ZComponent> = Vec::new();
    let mut assigned: BTreeSet<VertexId> = BTreeSet::new();
    // Deterministic scan: components discovered in edge-id order.
    for &seed in collapsed.iter() {
        let (sv, _) = graph.endpoints(seed);
        if assigned.contains(&sv) {
            continue;
        }
        // BFS over collapsed edges from sv.
        let mut verts = BTreeSet::new();
        let mut edges = BTreeSet::new();
        let mut queue = alloc::collections::VecDeque::new();
        verts.insert(sv);
        queue.push_back(sv);
        while let Some(v) = queue.pop_front() {
            for d in graph.directions(v) {
                if collapsed.contains(&d.edge) {
                    edges.insert(d.edge);
                    let t = graph.to(d);
                    if verts.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
        }
        // Root: lexicographically least vertex name.
        let root = verts
            .iter()
            .copied()
            .min_by(|a, b| graph.vertex_name(*a).cmp(graph.vertex_name(*b)))
            .unwrap();
        // In-component spanning tree (BFS from root over sorted edges).
        let mut parent: BTreeMap<VertexId, (OrientedEdge, VertexId)> = BTreeMap::new();
        let mut rho: BTreeMap<VertexId, Word> = BTreeMap::new();
        rho.insert(root, Word::identity());
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(root);
        let mut tree_edges: BTreeSet<EdgeId> = BTreeSet::new();
        while let Some(v) = queue.pop_front() {
            let base = rho[&v].clone();
            for d in graph.directions(v) {
                if !edges.contains(&d.edge) {
                    continue;
                }
                let t = graph.to(d);
                if !rho.contains_key(&t) {
                    let mut w = base.clone();
                    if let Some(l) = graph.letter(d) {
                        w = w.mul(&Word::letter(l));
                    }
                    rho.insert(t, w);
                    parent.insert(t, (d, v));
                    tree_edges.insert(d.edge);
                    queue.push_back(t);
                }
            }
        }
        // Stabilizer generators: one per non-tree component edge.
        let mut gens: Vec<Word> = Vec::new();
        for &e in &edges {
            if tree_edges.contains(&e) {
                continue;
            }
            let (from, to) = graph.endpoints(e);
            let mut w = rho[&from].clone();
            if let Some(l) = graph.letter(OrientedEdge::forward(e)) {
                w = w.mul(&Word::letter(l));
            }
            let gen = w.mul(&rho[&to].inverse());
            if !gen.is_empty() {
                gens.push(gen);
            } else {
                return Err(Error::PropertyViolation(
                    "collapsed component loop reads a trivial marking word".into(),
                ));
            }
        }
        let stabilizer = StallingsGraph::fold(graph.basis(), &gens);
        let idx = components.len();
        for &v in &verts {
            vertex_comp.insert(v, idx);
            assigned.insert(v);
        }
        components.push(ZComponent {
            edges,
            vertices: verts,
            root,
            rho,
            parent,
            stabilizer,
        });
    }
    Ok((components, vertex_comp))
}
