//! Fold factorizations, tile pushforwards, pullbacks, component
//! complexity and bounded cancellation.
//!
//! A foldable homotopy equivalence between marked graphs factors as a
//! subdivision followed by a sequence of single Stallings folds and a
//! terminal edge-bijective map. Each intermediate graph is a Grushko
//! splitting in its own right, so the filling machinery applies to the
//! pushed-forward tiles; the Kurosh rank ledger along the sequence is
//! nondecreasing.

use crate::error::{validation, Error, Result};
use crate::graph::{EdgeId, MarkedGraph, OrientedEdge, VertexId};
use crate::morphism::GraphMorphism;
use crate::path::EdgePath;
use crate::protoforest::filling_support;
use crate::splitting::FreeSplitting;
use crate::subgroup::StallingsGraph;
use crate::Envelope;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

// ---------------------------------------------------------------------------
// Foldability
// ---------------------------------------------------------------------------

/// Foldability check: every point must sit inside an arc on which the
/// map is injective. At a vertex this means at least two directions
/// with distinct image directions; valence-one vertices always fail.
pub fn is_foldable(f: &GraphMorphism) -> Result<(bool, Option<VertexId>)> {
    if f.has_trivial_image() {
        return Err(validation("foldable maps need nonempty edge images"));
    }
    let g = f.domain();
    for v in g.vertices() {
        let dirs = g.directions(v);
        if dirs.len() < 2 {
            return Ok((false, Some(v)));
        }
        let mut images = BTreeSet::new();
        for d in dirs {
            images.insert(f.direction_image(d).expect("nonempty image"));
        }
        if images.len() < 2 {
            return Ok((false, Some(v)));
        }
    }
    Ok((true, None))
}

// ---------------------------------------------------------------------------
// Subdivision
// ---------------------------------------------------------------------------

/// Subdivides the domain so that every edge maps to a single edge.
/// Returns the subdivision homeomorphism `h: dom -> dom'` and the
/// simplicial map `f': dom' -> cod` with `f = f' ∘ h`.
pub fn subdivide(f: &GraphMorphism) -> Result<(GraphMorphism, GraphMorphism)> {
    if f.has_trivial_image() {
        return Err(validation("cannot subdivide a map with trivial edge images"));
    }
    let dom = f.domain();
    let cod = f.codomain();
    let mut vertices: Vec<String> = dom.vertices().map(|v| dom.vertex_name(v).to_string()).collect();
    let mut edges: Vec<(String, String, String)> = Vec::new();
    let mut marking: BTreeMap<String, String> = BTreeMap::new();
    // Edgelets are named parent.index; interior vertices parent.index as
    // well (indices shifted by one).
    for e in dom.edge_ids() {
        let img_len = f.edge_image(OrientedEdge::forward(e)).len();
        let (from, to) = dom.endpoints(e);
        let name = dom.edge_name(e);
        if img_len == 1 {
            edges.push((
                name.to_string(),
                dom.vertex_name(from).to_string(),
                dom.vertex_name(to).to_string(),
            ));
            if let Some(l) = dom.letter(OrientedEdge::forward(e)) {
                marking.insert(name.to_string(), dom.basis().display_letter(l));
            }
            continue;
        }
        let mut prev = dom.vertex_name(from).to_string();
        for i in 0..img_len {
            let next = if i + 1 == img_len {
                dom.vertex_name(to).to_string()
            } else {
                let iv = format!("{name}.{}", i + 1);
                vertices.push(iv.clone());
                iv
            };
            edges.push((format!("{name}.{i}"), prev.clone(), next.clone()));
            prev = next;
        }
        // The final edgelet carries the parent's letter; earlier ones
        // join the spanning tree, preserving the marking words.
        if let Some(l) = dom.letter(OrientedEdge::forward(e)) {
            marking.insert(format!("{name}.{}", img_len - 1), dom.basis().display_letter(l));
        }
    }
    let dom2 = MarkedGraph::new(vertices, edges, dom.basis().clone(), Some(marking))?;
    // h: dom -> dom2 sends each edge to its edgelet path.
    let mut h_vmap = Vec::new();
    for v in dom.vertices() {
        h_vmap.push(dom2.vertex_by_name(dom.vertex_name(v)).unwrap());
    }
    let mut h_emap = Vec::new();
    let mut f2_edges: BTreeMap<EdgeId, EdgePath> = BTreeMap::new();
    for e in dom.edge_ids() {
        let img = f.edge_image(OrientedEdge::forward(e));
        let name = dom.edge_name(e);
        let (from, _) = dom.endpoints(e);
        let mut lets = Vec::new();
        if img.len() == 1 {
            let ne = dom2.edge_by_name(name).unwrap();
            lets.push(OrientedEdge::forward(ne));
            f2_edges.insert(ne, img.clone());
        } else {
            for i in 0..img.len() {
                let ne = dom2.edge_by_name(&format!("{name}.{i}")).unwrap();
                lets.push(OrientedEdge::forward(ne));
                f2_edges.insert(ne, img.subpath(cod, i, i + 1));
            }
        }
        let start = dom2.vertex_by_name(dom.vertex_name(from)).unwrap();
        h_emap.push(EdgePath::immersed(&dom2, start, lets)?);
    }
    let h = GraphMorphism::new(dom.clone(), dom2.clone(), h_vmap, h_emap)?;
    // f2: dom2 -> cod, edge to edge.
    let mut f2_vmap = Vec::new();
    for v in dom2.vertices() {
        // Old vertices keep their image; interior vertices take the
        // image from the edgelet structure.
        if let Some(old) = dom.vertex_by_name(dom2.vertex_name(v)) {
            f2_vmap.push(f.vertex_image(old));
        } else {
            f2_vmap.push(VertexId(0)); // fixed up below
        }
    }
    let mut f2_emap: Vec<EdgePath> = Vec::new();
    for e in dom2.edge_ids() {
        f2_emap.push(f2_edges[&e].clone());
    }
    // Interior vertex images: endpoints of the edgelet images.
    for e in dom2.edge_ids() {
        let (from, to) = dom2.endpoints(e);
        let img = &f2_emap[e.0 as usize];
        f2_vmap[from.0 as usize] = img.start();
        f2_vmap[to.0 as usize] = img.end(cod);
    }
    let f2 = GraphMorphism::new(dom2, cod.clone(), f2_vmap, f2_emap)?;
    Ok((h, f2))
}

// ---------------------------------------------------------------------------
// Fold factorization
// ---------------------------------------------------------------------------

/// The Stallings fold factorization of a foldable homotopy equivalence:
/// `f = terminal ∘ folds[M-1] ∘ ... ∘ folds[0] ∘ subdivision`.
#[derive(Clone, Debug)]
pub struct FoldSequence {
    /// Subdivision homeomorphism from the original domain onto the
    /// first splitting's base graph.
    pub subdivision: GraphMorphism,
    /// The splittings `S_0, ..., S_M` (all Grushko).
    pub splittings: Vec<FreeSplitting>,
    /// Single Stallings folds `S_i -> S_{i+1}`.
    pub folds: Vec<GraphMorphism>,
    /// Edge-bijective terminal map `S_M -> codomain`.
    pub terminal: GraphMorphism,
}

impl FoldSequence {
    /// Composite of all the pieces; equals the factorized map.
    pub fn composite(&self) -> Result<GraphMorphism> {
        let mut acc = self.subdivision.clone();
        for fold in &self.folds {
            acc = fold.compose_after(&acc)?;
        }
        self.terminal.compose_after(&acc)
    }

    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }
}

/// Candidate fold at a vertex: two distinct directions with the same
/// oriented image edge. Returns the lexicographically least one.
fn find_fold(g: &MarkedGraph, f: &GraphMorphism) -> Option<(VertexId, OrientedEdge, OrientedEdge)> {
    let mut verts: Vec<VertexId> = g.vertices().collect();
    verts.sort_by(|a, b| g.vertex_name(*a).cmp(g.vertex_name(*b)));
    let dir_key = |d: OrientedEdge| (g.edge_name(d.edge).to_string(), !d.forward);
    for v in verts {
        let mut dirs = g.directions(v);
        dirs.sort_by_key(|&d| dir_key(d));
        for i in 0..dirs.len() {
            for j in (i + 1)..dirs.len() {
                if dirs[i].edge == dirs[j].edge {
                    continue; // a loop folding onto itself is an inversion
                }
                if f.direction_image(dirs[i]) == f.direction_image(dirs[j])
                    && f.edge_image(dirs[i]).len() == 1
                    && f.edge_image(dirs[j]).len() == 1
                {
                    return Some((v, dirs[i], dirs[j]));
                }
            }
        }
    }
    None
}

/// Folds the simplicial map once at the given pair, returning the fold
/// morphism and the induced map from the folded graph.
fn fold_once(
    g: &MarkedGraph,
    f: &GraphMorphism,
    d1: OrientedEdge,
    d2: OrientedEdge,
) -> Result<(GraphMorphism, GraphMorphism)> {
    let (t1, t2) = (g.to(d1), g.to(d2));
    if t1 == t2 {
        return Err(Error::PropertyViolation(
            "parallel fold would change the fundamental group".into(),
        ));
    }
    // Merge t2 into t1 and e2 into e1.
    let keep_name = |a: VertexId, b: VertexId| -> String {
        let (na, nb) = (g.vertex_name(a), g.vertex_name(b));
        if na <= nb { na.to_string() } else { nb.to_string() }
    };
    let merged_name = keep_name(t1, t2);
    let vname = |v: VertexId| -> String {
        if v == t1 || v == t2 {
            merged_name.clone()
        } else {
            g.vertex_name(v).to_string()
        }
    };
    let dead_edge = d2.edge;
    let mut vertices: Vec<String> = Vec::new();
    for v in g.vertices() {
        let name = vname(v);
        if !vertices.contains(&name) {
            vertices.push(name);
        }
    }
    let mut edges = Vec::new();
    for e in g.edge_ids() {
        if e == dead_edge {
            continue;
        }
        let (from, to) = g.endpoints(e);
        edges.push((g.edge_name(e).to_string(), vname(from), vname(to)));
    }
    let folded = MarkedGraph::new(vertices, edges, g.basis().clone(), None)?;
    // Fold morphism g -> folded.
    let mut vmap = Vec::new();
    for v in g.vertices() {
        vmap.push(folded.vertex_by_name(&vname(v)).unwrap());
    }
    let mut emap = Vec::new();
    for e in g.edge_ids() {
        // The dead edge maps onto the kept edge: its forward orientation
        // agrees with the kept edge's exactly when d1 and d2 point the
        // same way along their edges.
        let oriented = if e == dead_edge {
            let ne = folded.edge_by_name(g.edge_name(d1.edge)).unwrap();
            OrientedEdge {
                edge: ne,
                forward: d1.forward == d2.forward,
            }
        } else {
            OrientedEdge::forward(folded.edge_by_name(g.edge_name(e)).unwrap())
        };
        let start = folded.from(oriented);
        emap.push(EdgePath::immersed(&folded, start, alloc::vec![oriented])?);
    }
    let fold = GraphMorphism::new(g.clone(), folded.clone(), vmap, emap)?;
    // Induced map folded -> codomain: images carried over from f.
    let mut ivmap = Vec::new();
    for v in folded.vertices() {
        // Pick any preimage vertex.
        let pre = g
            .vertices()
            .find(|&u| vname(u) == *folded.vertex_name(v))
            .expect("folded vertex has a preimage");
        ivmap.push(f.vertex_image(pre));
    }
    let mut iemap = Vec::new();
    for e in folded.edge_ids() {
        let pre = g.edge_by_name(folded.edge_name(e)).unwrap();
        iemap.push(f.edge_image(OrientedEdge::forward(pre)));
    }
    let induced = GraphMorphism::new(folded, f.codomain().clone(), ivmap, iemap)?;
    Ok((fold, induced))
}

/// Stallings fold factorization of a foldable homotopy equivalence.
pub fn fold_factorize(f: &GraphMorphism) -> Result<FoldSequence> {
    let (ok, bad) = is_foldable(f)?;
    if !ok {
        return Err(validation(
            format_args!(
                "map is not foldable (offending vertex {})",
                bad.map(|v| f.domain().vertex_name(v).to_string()).unwrap_or_default()
            )
            .to_string(),
        ));
    }
    if !f.is_homotopy_equivalence() {
        return Err(validation("fold factorization needs a homotopy equivalence"));
    }
    let (subdivision, mut current) = subdivide(f)?;
    let mut splittings = alloc::vec![FreeSplitting::new(current.domain().clone(), BTreeSet::new())?];
    let mut folds = Vec::new();
    loop {
        let g = current.domain().clone();
        match find_fold(&g, &current) {
            None => break,
            Some((_, d1, d2)) => {
                let (fold, induced) = fold_once(&g, &current, d1, d2)?;
                splittings.push(FreeSplitting::new(induced.domain().clone(), BTreeSet::new())?);
                folds.push(fold);
                current = induced;
            }
        }
    }
    Ok(FoldSequence {
        subdivision,
        splittings,
        folds,
        terminal: current,
    })
}

// ---------------------------------------------------------------------------
// Tile pushforward and the Kurosh rank trace
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct KrEntry {
    pub tile: EdgePath,
    pub support_rank: usize,
    pub kurosh: usize,
}

/// Per-index filling data of the pushed tiles, with the indices where
/// the Kurosh rank strictly increases.
#[derive(Clone, Debug)]
pub struct KrTrace {
    pub entries: Vec<KrEntry>,
    pub breakpoints: Vec<usize>,
}

/// Pushes a path of the original domain through the fold sequence,
/// recording the filling support at every index. The trace must be
/// nondecreasing; a decrease is reported as a property violation.
pub fn push_tile(seq: &FoldSequence, tile: &EdgePath, env: &Envelope) -> Result<KrTrace> {
    let mut entries = Vec::new();
    let mut current = seq.subdivision.map_path(tile)?;
    if !current.is_immersed() {
        return Err(Error::PropertyViolation("subdivided tile backtracks".into()));
    }
    let record = |split: &FreeSplitting, path: &EdgePath, entries: &mut Vec<KrEntry>| -> Result<()> {
        let fs = filling_support(split, path, env)?;
        entries.push(KrEntry {
            tile: path.clone(),
            support_rank: fs.support.rank,
            kurosh: fs.kurosh,
        });
        Ok(())
    };
    record(&seq.splittings[0], &current, &mut entries)?;
    for (i, fold) in seq.folds.iter().enumerate() {
        current = fold.map_path(&current)?;
        if !current.is_immersed() {
            return Err(Error::PropertyViolation(
                "pushed tile backtracks; the composite map is not foldable on it".into(),
            ));
        }
        record(&seq.splittings[i + 1], &current, &mut entries)?;
    }
    let mut breakpoints = Vec::new();
    for i in 1..entries.len() {
        if entries[i].kurosh < entries[i - 1].kurosh {
            return Err(Error::PropertyViolation(
                "Kurosh rank decreased along a fold sequence".into(),
            ));
        }
        if entries[i].kurosh > entries[i - 1].kurosh {
            breakpoints.push(i);
        }
    }
    Ok(KrTrace {
        entries,
        breakpoints,
    })
}

// ---------------------------------------------------------------------------
// Pullbacks and component complexity
// ---------------------------------------------------------------------------

/// Pullback of a nondegenerate subgraph along an edge-to-edge map: the
/// edges whose image lies in the subgraph. (Representation by edge sets
/// has no single-point components to strip.)
pub fn pullback_simplicial(f: &GraphMorphism, beta: &BTreeSet<EdgeId>) -> Result<BTreeSet<EdgeId>> {
    let mut out = BTreeSet::new();
    for e in f.domain().edge_ids() {
        let img = f.edge_image(OrientedEdge::forward(e));
        if img.len() != 1 {
            return Err(validation("pullback needs an edge-to-edge map; subdivide first"));
        }
        if beta.contains(&img.edges()[0].edge) {
            out.insert(e);
        }
    }
    Ok(out)
}

/// Pullback along an arbitrary map: subdivides the domain first and
/// returns the subdivision together with the pulled-back edgelets.
pub struct Pullback {
    pub subdivision: GraphMorphism,
    pub simplicial: GraphMorphism,
    pub edges: BTreeSet<EdgeId>,
}

pub fn pullback(f: &GraphMorphism, beta: &BTreeSet<EdgeId>) -> Result<Pullback> {
    if beta.is_empty() {
        return Err(validation("pullback of an empty subgraph"));
    }
    let (h, f2) = subdivide(f)?;
    let edges = pullback_simplicial(&f2, beta)?;
    Ok(Pullback {
        subdivision: h,
        simplicial: f2,
        edges,
    })
}

/// Component complexity: the number of orbits of components of the
/// subgraph, measured in the quotient of the splitting (collapsed
/// components identify their endpoints).
pub fn component_complexity(split: &FreeSplitting, beta: &BTreeSet<EdgeId>) -> Result<usize> {
    if beta.is_empty() {
        return Err(validation("component complexity of the empty subgraph"));
    }
    let g = split.graph();
    // Union-find over quotient vertices touched by beta.
    let qid = |v: VertexId| -> QKey { QKey(split.qvertex(v)) };
    let mut parent: BTreeMap<QKey, QKey> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<QKey, QKey>, x: QKey) -> QKey {
        let mut r = x;
        while parent[&r] != r {
            r = parent[&r];
        }
        r
    }
    for &e in beta {
        let (a, b) = g.endpoints(e);
        for q in [qid(a), qid(b)] {
            parent.entry(q).or_insert(q);
        }
        let (ra, rb) = (find(&mut parent, qid(a)), find(&mut parent, qid(b)));
        if ra != rb {
            parent.insert(ra, rb);
        }
    }
    let keys: Vec<QKey> = parent.keys().copied().collect();
    let mut roots = BTreeSet::new();
    for k in keys {
        let r = find(&mut parent, k);
        roots.insert(r);
    }
    Ok(roots.len())
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct QKey(crate::splitting::QVertex);

// ---------------------------------------------------------------------------
// Bounded cancellation
// ---------------------------------------------------------------------------

/// The bounded cancellation constant of a simplicial homotopy
/// equivalence between Grushko presentations: the edge count difference
/// under the subdivision making the map edge-to-edge. Zero exactly for
/// edge-bijective maps.
pub fn bounded_cancellation_constant(f: &GraphMorphism) -> Result<usize> {
    if !f.is_homotopy_equivalence() {
        return Err(validation("bounded cancellation needs a homotopy equivalence"));
    }
    let (_, f2) = subdivide(f)?;
    let d = f2.domain().edge_count();
    let c = f2.codomain().edge_count();
    if d < c {
        return Err(Error::PropertyViolation(
            "simplicial homotopy equivalence with fewer domain edges".into(),
        ));
    }
    Ok(d - c)
}

/// Cancellation of a split reduced path under the map: half the length
/// defect of the tightened images. Bounded by the cancellation constant.
pub fn split_cancellation(f: &GraphMorphism, p1: &EdgePath, p2: &EdgePath) -> Result<usize> {
    let whole = p1.concat(f.domain(), p2)?;
    let w = f.map_path(&whole)?.tightened().len();
    let a = f.map_path(p1)?.tightened().len();
    let b = f.map_path(p2)?.tightened().len();
    Ok((a + b - w) / 2)
}

// ---------------------------------------------------------------------------
// Helpers for building rose-to-rose test maps
// ---------------------------------------------------------------------------

/// Builds the self-map of a rose sending each loop to the edge word
/// given by basis letters (for fixtures and tests).
pub fn rose_self_map(graph: &MarkedGraph, images: &[(EdgeId, Vec<OrientedEdge>)]) -> Result<GraphMorphism> {
    let v = graph.base_vertex();
    let mut vm = BTreeMap::new();
    for u in graph.vertices() {
        vm.insert(u, v);
    }
    let mut em = BTreeMap::new();
    for (e, w) in images {
        em.insert(*e, w.clone());
    }
    GraphMorphism::from_edge_words(graph, graph, vm, em)
}

/// Folds the subgroup generated by words, exposed here for the CLI
/// subgroup surface.
pub fn stallings_fold(basis: &crate::word::Basis, generators: &[crate::word::Word]) -> StallingsGraph {
    StallingsGraph::fold(basis, generators)
}
