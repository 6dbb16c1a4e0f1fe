//! Maps between marked graphs.
//!
//! A [`GraphMorphism`] sends vertices to vertices and each edge to a
//! reduced edge path (possibly trivial, as in collapse maps), compatibly
//! with reversal. The induced endomorphism of `F_n` in the two markings
//! is computed on demand and serves as the marking compatibility
//! witness: equivariant maps of splittings induce the identity, twisted
//! equivariant self-maps induce the twisting automorphism.

use crate::error::{validation, Result};
use crate::graph::{EdgeId, MarkedGraph, OrientedEdge, VertexId};
use crate::path::EdgePath;
use crate::subgroup::StallingsGraph;
use crate::word::{Endomorphism, Letter, Word};
use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct GraphMorphism {
    domain: MarkedGraph,
    codomain: MarkedGraph,
    vertex_map: Vec<VertexId>,
    /// Image of the forward orientation of each edge.
    edge_map: Vec<EdgePath>,
}

impl fmt::Debug for GraphMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphMorphism({:?} -> {:?})", self.domain, self.codomain)
    }
}

impl GraphMorphism {
    /// Validates endpoints and reducedness of edge images.
    pub fn new(
        domain: MarkedGraph,
        codomain: MarkedGraph,
        vertex_map: Vec<VertexId>,
        edge_map: Vec<EdgePath>,
    ) -> Result<Self> {
        if vertex_map.len() != domain.vertex_count() || edge_map.len() != domain.edge_count() {
            return Err(validation("morphism maps have the wrong arity"));
        }
        for v in vertex_map.iter() {
            if v.0 as usize >= codomain.vertex_count() {
                return Err(validation("vertex image out of range"));
            }
        }
        let m = GraphMorphism {
            domain,
            codomain,
            vertex_map,
            edge_map,
        };
        for e in m.domain.edge_ids() {
            let img = &m.edge_map[e.0 as usize];
            if !img.is_immersed() {
                return Err(validation(
                    format_args!("image of edge {} backtracks", m.domain.edge_name(e)).to_string(),
                ));
            }
            let (from, to) = m.domain.endpoints(e);
            if img.start() != m.vertex_map[from.0 as usize]
                || img.end(&m.codomain) != m.vertex_map[to.0 as usize]
            {
                return Err(validation(
                    format_args!("image of edge {} has wrong endpoints", m.domain.edge_name(e)).to_string(),
                ));
            }
        }
        Ok(m)
    }

    pub fn identity(graph: &MarkedGraph) -> Self {
        let vertex_map = graph.vertices().collect();
        let edge_map = graph
            .edge_ids()
            .map(|e| {
                let (from, _) = graph.endpoints(e);
                EdgePath::immersed(graph, from, alloc::vec![OrientedEdge::forward(e)]).unwrap()
            })
            .collect();
        GraphMorphism {
            domain: graph.clone(),
            codomain: graph.clone(),
            vertex_map,
            edge_map,
        }
    }

    pub fn domain(&self) -> &MarkedGraph {
        &self.domain
    }

    pub fn codomain(&self) -> &MarkedGraph {
        &self.codomain
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0 as usize]
    }

    pub fn edge_image(&self, oe: OrientedEdge) -> EdgePath {
        let img = &self.edge_map[oe.edge.0 as usize];
        if oe.forward {
            img.clone()
        } else {
            img.reversed(&self.codomain)
        }
    }

    /// Whether some edge image is a trivial path.
    pub fn has_trivial_image(&self) -> bool {
        self.edge_map.iter().any(|p| p.is_trivial())
    }

    /// Image of a path, concatenated without tightening.
    pub fn map_path(&self, path: &EdgePath) -> Result<EdgePath> {
        let mut edges = Vec::new();
        for &oe in path.edges() {
            edges.extend(self.edge_image(oe).edges().iter().copied());
        }
        EdgePath::walk(&self.codomain, self.vertex_image(path.start()), edges)
    }

    /// Image of a path, tightened.
    pub fn map_path_tight(&self, path: &EdgePath) -> Result<EdgePath> {
        Ok(self.map_path(path)?.tightened())
    }

    /// First edge of the image of a direction, if any.
    pub fn direction_image(&self, d: OrientedEdge) -> Option<OrientedEdge> {
        self.edge_image(d).edges().first().copied()
    }

    /// The induced endomorphism of `F_n`, read through the markings of
    /// the two graphs.
    pub fn induced_endomorphism(&self) -> Endomorphism {
        let base = self.domain.base_vertex();
        let n = self.domain.basis().rank();
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            let l = Letter::positive(i as u16);
            let oe = self
                .domain
                .edge_with_letter(l)
                .expect("marking covers every letter");
            let mut loop_edges = self.domain.tree_path(base, self.domain.from(oe));
            loop_edges.push(oe);
            loop_edges.extend(self.domain.tree_path(self.domain.to(oe), base));
            let mut image_word = Word::identity();
            for le in loop_edges {
                let img = self.edge_image(le);
                image_word = image_word.mul(&self.codomain.path_word(img.edges()));
            }
            images.push(image_word);
        }
        Endomorphism::new(images)
    }

    /// Whether the induced endomorphism is an automorphism of `F_n`
    /// (surjectivity suffices: finitely generated free groups are
    /// Hopfian).
    pub fn is_homotopy_equivalence(&self) -> bool {
        let endo = self.induced_endomorphism();
        let basis = self.domain.basis();
        let images: Vec<Word> = (0..endo.rank()).map(|i| endo.image(i).clone()).collect();
        let folded = StallingsGraph::fold(basis, &images);
        (0..basis.rank()).all(|i| folded.contains(&Word::letter(Letter::positive(i as u16))))
    }

    /// `self` after `first` (domains must line up); edge images are
    /// concatenated literally and must stay reduced.
    pub fn compose_after(&self, first: &GraphMorphism) -> Result<GraphMorphism> {
        if first.codomain != self.domain {
            return Err(validation("composition domains do not match"));
        }
        let vertex_map = first
            .vertex_map
            .iter()
            .map(|&v| self.vertex_image(v))
            .collect();
        let mut edge_map = Vec::new();
        for img in &first.edge_map {
            let mapped = self.map_path(img)?;
            if !mapped.is_immersed() {
                return Err(validation("composite edge image backtracks"));
            }
            edge_map.push(mapped);
        }
        GraphMorphism::new(first.domain.clone(), self.codomain.clone(), vertex_map, edge_map)
    }

    /// Like [`GraphMorphism::compose_after`] but with tightening; used
    /// when a composite is only needed up to homotopy.
    pub fn compose_after_tight(&self, first: &GraphMorphism) -> Result<GraphMorphism> {
        if first.codomain != self.domain {
            return Err(validation("composition domains do not match"));
        }
        let vertex_map: Vec<VertexId> = first
            .vertex_map
            .iter()
            .map(|&v| self.vertex_image(v))
            .collect();
        let mut edge_map = Vec::new();
        for img in &first.edge_map {
            edge_map.push(self.map_path_tight(img)?);
        }
        GraphMorphism::new(first.domain.clone(), self.codomain.clone(), vertex_map, edge_map)
    }

    /// Builds a self-map of a graph from letter images of the edges, for
    /// rose-like constructions in tests and fixtures.
    pub fn from_edge_words(
        domain: &MarkedGraph,
        codomain: &MarkedGraph,
        vertex_map: BTreeMap<VertexId, VertexId>,
        edge_words: BTreeMap<EdgeId, Vec<OrientedEdge>>,
    ) -> Result<GraphMorphism> {
        let mut vmap = Vec::with_capacity(domain.vertex_count());
        for v in domain.vertices() {
            vmap.push(
                *vertex_map
                    .get(&v)
                    .ok_or_else(|| validation("vertex image missing"))?,
            );
        }
        let mut emap = Vec::with_capacity(domain.edge_count());
        for e in domain.edge_ids() {
            let edges = edge_words
                .get(&e)
                .ok_or_else(|| validation("edge image missing"))?
                .clone();
            let (from, _) = domain.endpoints(e);
            let start = vmap[from.0 as usize];
            emap.push(EdgePath::walk(codomain, start, edges)?);
        }
        GraphMorphism::new(domain.clone(), codomain.clone(), vmap, emap)
    }
}
