//! Overlap protoforests, filling support, and the filling criterion.
//!
//! For a path `α` in a splitting `T`, the translates of `α` decompose
//! into maximal overlap-connected pieces. The stabilizer of the piece
//! containing `α` is generated by the finite symmetric set `O` of deck
//! transformations aligning two occurrences of the same unoriented edge
//! of the path: an overlap chain from `α` to `g·α` factors `g` into such
//! alignments, and `O = O^-1` upgrades the semigroup to the subgroup.
//!
//! The filling support is the free factor support of `<O>`; the path
//! fills `T` exactly when it interiorly crosses every natural edge orbit
//! and the support is all of `F_n`. When the path does not fill, a
//! witness expansion is constructed: the trivial expansion if a crossing
//! is missing, otherwise a blowup obtained by uncollapsing part of the
//! collapsed subgraph and/or splitting a shared vertex of the
//! protoforest in two.

use crate::error::{validation, Error, Result};
use crate::graph::{EdgeId, MarkedGraph, OrientedEdge, VertexId};
use crate::path::EdgePath;
use crate::splitting::{FreeSplitting, NaturalStructure, QVertex};
use crate::subgroup::StallingsGraph;
use crate::whitehead::{free_factor_support, Support, WhiteheadAut};
use crate::word::Word;
use crate::Envelope;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

// ---------------------------------------------------------------------------
// Interior crossings
// ---------------------------------------------------------------------------

/// Which natural edge orbits a path interiorly crosses.
#[derive(Clone, Debug)]
pub struct CrossingReport {
    pub crossed: Vec<usize>,
    pub missing: Vec<usize>,
}

impl CrossingReport {
    pub fn all_crossed(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Occurrences of `word` (an oriented edge sequence) inside `path`,
/// in either orientation; returns starting positions with a flag for
/// reversed matches.
pub fn occurrences(path: &EdgePath, word: &[OrientedEdge]) -> Vec<(usize, bool)> {
    let edges = path.edges();
    let k = word.len();
    let mut out = Vec::new();
    if k == 0 || k > edges.len() {
        return out;
    }
    let rev: Vec<OrientedEdge> = word.iter().rev().map(|e| e.reversed()).collect();
    for p in 0..=(edges.len() - k) {
        if edges[p..p + k] == word[..] {
            out.push((p, false));
        } else if edges[p..p + k] == rev[..] {
            out.push((p, true));
        }
    }
    out
}

/// Interior crossing detection: an orbit is crossed when the canonical
/// word of its natural edge occurs (in either orientation) spanning edge
/// positions `i..j` with `i >= 1` and `j <= len - 2`, so that neither
/// endpoint of the path lies in the occurrence.
pub fn interior_crossings(
    split: &FreeSplitting,
    nat: &NaturalStructure,
    path: &EdgePath,
) -> Result<CrossingReport> {
    split.validate_canonical(path)?;
    let len = path.len();
    let mut crossed = Vec::new();
    let mut missing = Vec::new();
    for (idx, ne) in nat.edges.iter().enumerate() {
        let k = ne.lift.len();
        let hit = occurrences(path, ne.lift.edges())
            .into_iter()
            .any(|(p, _)| p >= 1 && p + k <= len.saturating_sub(1));
        if hit {
            crossed.push(idx);
        } else {
            missing.push(idx);
        }
    }
    Ok(CrossingReport { crossed, missing })
}

// ---------------------------------------------------------------------------
// Overlap generators and filling support
// ---------------------------------------------------------------------------

/// The finite symmetric overlap generator set of a path.
#[derive(Clone, Debug)]
pub struct OverlapData {
    /// Deduplicated, inverse-closed, identity-free.
    pub generators: Vec<Word>,
}

/// Deck transformations aligning two same-edge positions of the path;
/// only uncollapsed positions contribute, since overlaps of translates
/// are measured in edges of the splitting.
pub fn overlap_generators(split: &FreeSplitting, path: &EdgePath) -> Result<OverlapData> {
    split.validate_canonical(path)?;
    let mut by_edge: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
    for (k, oe) in path.edges().iter().enumerate() {
        if !split.is_collapsed(oe.edge) {
            by_edge.entry(oe.edge).or_default().push(k);
        }
    }
    let mut set: BTreeSet<Word> = BTreeSet::new();
    for positions in by_edge.values() {
        for (ai, &i) in positions.iter().enumerate() {
            for &j in positions.iter().skip(ai + 1) {
                for same in [true, false] {
                    if let Some(g) = split.element_of_translate(path, i, j, same)? {
                        debug_assert!(!g.is_empty(), "distinct tree edges need nontrivial translates");
                        set.insert(g.inverse());
                        set.insert(g);
                    }
                }
            }
        }
    }
    Ok(OverlapData {
        generators: set.into_iter().collect(),
    })
}

/// Filling support of a path: the free factor support of the overlap
/// stabilizer, with its Kurosh rank.
#[derive(Clone, Debug)]
pub struct FillingSupport {
    pub overlap: OverlapData,
    pub support: Support,
    pub kurosh: usize,
}

pub fn filling_support(split: &FreeSplitting, path: &EdgePath, env: &Envelope) -> Result<FillingSupport> {
    let overlap = overlap_generators(split, path)?;
    let basis = split.basis();
    if overlap.generators.is_empty() {
        return Ok(FillingSupport {
            overlap,
            support: Support {
                factor: StallingsGraph::trivial(basis),
                rank: 0,
                is_proper: true,
                witness: Vec::new(),
            },
            kurosh: 0,
        });
    }
    // Shortcut: if the folded overlap subgroup is already everything,
    // its support is everything.
    let folded = StallingsGraph::fold(basis, &overlap.generators);
    let whole = (0..basis.rank())
        .all(|i| folded.contains(&Word::letter(crate::word::Letter::positive(i as u16))));
    let support = if whole {
        Support {
            factor: StallingsGraph::whole_group(basis),
            rank: basis.rank(),
            is_proper: false,
            witness: Vec::new(),
        }
    } else {
        free_factor_support(basis, &overlap.generators, env)?
    };
    let kurosh = support.rank;
    Ok(FillingSupport {
        overlap,
        support,
        kurosh,
    })
}

// ---------------------------------------------------------------------------
// Expansions
// ---------------------------------------------------------------------------

/// A collapse relation `total -> target` between splittings: shared
/// edges carry the same names in both base graphs; `removed` names
/// target edges with no counterpart (collapsed tree components of the
/// target's presentation), `new_edges` names total edges with no
/// counterpart (they collapse to vertices of the target).
#[derive(Clone, Debug)]
pub struct Expansion {
    pub total: FreeSplitting,
    pub target: FreeSplitting,
    pub removed: BTreeSet<String>,
    pub new_edges: BTreeSet<String>,
}

impl Expansion {
    pub fn trivial(split: &FreeSplitting) -> Expansion {
        Expansion {
            total: split.clone(),
            target: split.clone(),
            removed: BTreeSet::new(),
            new_edges: BTreeSet::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.removed.is_empty() && self.new_edges.is_empty() && self.total.collapsed().len() == self.target.collapsed().len()
    }

    /// Uncollapses part of the collapsed subgraph: same base graph,
    /// smaller collapsed set.
    pub fn uncollapse(split: &FreeSplitting, keep: &BTreeSet<EdgeId>) -> Result<Expansion> {
        if !keep.iter().all(|e| split.is_collapsed(*e)) {
            return Err(validation("uncollapse keeps a non-collapsed edge"));
        }
        let total = FreeSplitting::new(split.graph().clone(), keep.clone())?;
        Ok(Expansion {
            total,
            target: split.clone(),
            removed: BTreeSet::new(),
            new_edges: BTreeSet::new(),
        })
    }

    /// Lifts a canonical path of the target through the collapse: drops
    /// removed connector edges, maps shared edges by name, and inserts
    /// the unique geodesic through the fresh blowup forest whenever a
    /// turn of the path lands on different sides of a split vertex.
    pub fn lift_path(&self, path: &EdgePath) -> Result<EdgePath> {
        let tg = self.target.graph();
        let tt = self.total.graph();
        let mut edges: Vec<OrientedEdge> = Vec::new();
        let mut start: Option<VertexId> = None;
        for &oe in path.edges() {
            let name = tg.edge_name(oe.edge);
            if self.removed.contains(name) {
                continue;
            }
            let ne = tt
                .edge_by_name(name)
                .ok_or_else(|| Error::PropertyViolation("expansion lost a shared edge".into()))?;
            let noe = OrientedEdge {
                edge: ne,
                forward: oe.forward,
            };
            if let Some(&prev) = edges.last() {
                let gap_from = tt.to(prev);
                let gap_to = tt.from(noe);
                if gap_from != gap_to {
                    let connector = self.new_forest_geodesic(gap_from, gap_to)?;
                    edges.extend(connector);
                }
            }
            if start.is_none() {
                start = Some(tt.from(noe));
            }
            edges.push(noe);
        }
        let Some(start) = start else {
            return Err(validation("path collapses entirely through the expansion"));
        };
        let lifted = EdgePath::immersed(tt, start, edges)?;
        self.total.validate_canonical(&lifted)?;
        Ok(lifted)
    }

    /// Unique reduced path between two vertices inside the forest of
    /// fresh blowup edges.
    fn new_forest_geodesic(&self, from: VertexId, to: VertexId) -> Result<Vec<OrientedEdge>> {
        let tt = self.total.graph();
        let mut prev: BTreeMap<VertexId, OrientedEdge> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        seen.insert(from);
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(from);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for d in tt.directions(x) {
                if self.new_edges.contains(tt.edge_name(d.edge)) {
                    let t = tt.to(d);
                    if seen.insert(t) {
                        prev.insert(t, d);
                        queue.push_back(t);
                    }
                }
            }
        }
        if !prev.contains_key(&to) && from != to {
            return Err(Error::PropertyViolation(
                "lifted turn is not bridged by the blowup forest".into(),
            ));
        }
        let mut out = Vec::new();
        let mut cur = to;
        while cur != from {
            let d = prev[&cur];
            out.push(d);
            cur = tt.from(d);
        }
        out.reverse();
        Ok(out)
    }

    /// Structural validation of the collapse relation.
    pub fn verify(&self) -> Result<()> {
        let tg = self.target.graph();
        let tt = self.total.graph();
        if tg.basis() != tt.basis() {
            return Err(validation("expansion changes the basis"));
        }
        // Name partition.
        let target_names: BTreeSet<String> = tg.edge_ids().map(|e| tg.edge_name(e).to_string()).collect();
        let total_names: BTreeSet<String> = tt.edge_ids().map(|e| tt.edge_name(e).to_string()).collect();
        for r in &self.removed {
            if !target_names.contains(r) || total_names.contains(r) {
                return Err(validation("removed edge bookkeeping is inconsistent"));
            }
        }
        for x in &self.new_edges {
            if target_names.contains(x) || !total_names.contains(x) {
                return Err(validation("new edge bookkeeping is inconsistent"));
            }
        }
        let shared: BTreeSet<String> = target_names
            .iter()
            .filter(|n| !self.removed.contains(*n))
            .cloned()
            .collect();
        let shared_total: BTreeSet<String> = total_names
            .iter()
            .filter(|n| !self.new_edges.contains(*n))
            .cloned()
            .collect();
        if shared != shared_total {
            return Err(validation("shared edges of the expansion do not match"));
        }
        for name in &shared {
            let te = tg.edge_by_name(name).unwrap();
            let ue = tt.edge_by_name(name).unwrap();
            // Letters agree; uncollapsed edges stay uncollapsed.
            if tg.letter(OrientedEdge::forward(te)) != tt.letter(OrientedEdge::forward(ue)) {
                return Err(validation("expansion changes a marking letter"));
            }
            if !self.target.is_collapsed(te) && self.total.is_collapsed(ue) {
                return Err(validation("expansion collapses an uncollapsed edge"));
            }
        }
        // Removed target edges belong to collapsed tree components; new
        // total edges are unmarked and form a forest.
        for r in &self.removed {
            let e = tg.edge_by_name(r).unwrap();
            if !self.target.is_collapsed(e) || !tg.is_tree_edge(e) {
                return Err(validation("removed edges must be unmarked collapsed edges"));
            }
        }
        for x in &self.new_edges {
            let e = tt.edge_by_name(x).unwrap();
            if !tt.is_tree_edge(e) || self.total.is_collapsed(e) {
                return Err(validation("new edges must be unmarked and uncollapsed"));
            }
        }
        if has_cycle(tt, &self.new_edges) {
            return Err(validation("new edges of an expansion must form a forest"));
        }
        // Contracting new edges in the total and removed edges in the
        // target identifies the two graphs over the shared edges.
        let classes_total = contract_classes(tt, &self.new_edges);
        let classes_target = contract_classes(tg, &self.removed);
        let mut corr: BTreeMap<u32, u32> = BTreeMap::new();
        let mut corr_rev: BTreeMap<u32, u32> = BTreeMap::new();
        for name in &shared {
            let te = tg.edge_by_name(name).unwrap();
            let ue = tt.edge_by_name(name).unwrap();
            let (uf, ut) = tt.endpoints(ue);
            let (tf, tto) = tg.endpoints(te);
            for (u_class, t_class) in [
                (classes_total[uf.0 as usize], classes_target[tf.0 as usize]),
                (classes_total[ut.0 as usize], classes_target[tto.0 as usize]),
            ] {
                if *corr.entry(u_class).or_insert(t_class) != t_class {
                    return Err(validation("expansion endpoint classes mismatch"));
                }
                if *corr_rev.entry(t_class).or_insert(u_class) != u_class {
                    return Err(validation("expansion endpoint classes not injective"));
                }
            }
        }
        Ok(())
    }
}

fn contract_classes(g: &MarkedGraph, contracted: &BTreeSet<String>) -> Vec<u32> {
    let n = g.vertex_count();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut Vec<u32>, x: u32) -> u32 {
        let mut r = x;
        while parent[r as usize] != r {
            r = parent[r as usize];
        }
        r
    }
    for e in g.edge_ids() {
        if contracted.contains(g.edge_name(e)) {
            let (a, b) = g.endpoints(e);
            let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
            if ra != rb {
                parent[ra as usize] = rb;
            }
        }
    }
    (0..n as u32).map(|v| find(&mut parent, v)).collect()
}

fn has_cycle(g: &MarkedGraph, edges: &BTreeSet<String>) -> bool {
    let n = g.vertex_count();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut Vec<u32>, x: u32) -> u32 {
        let mut r = x;
        while parent[r as usize] != r {
            r = parent[r as usize];
        }
        r
    }
    for e in g.edge_ids() {
        if edges.contains(g.edge_name(e)) {
            let (a, b) = g.endpoints(e);
            let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
            if ra == rb {
                return true;
            }
            parent[ra as usize] = rb;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// The filling criterion
// ---------------------------------------------------------------------------

/// Result of the filling decision, with a witness expansion when the
/// path does not fill.
#[derive(Clone, Debug)]
pub struct FillingReport {
    pub crossing_ok: bool,
    pub crossed: Vec<usize>,
    pub missing: Vec<usize>,
    pub support_rank: usize,
    pub kurosh: usize,
    pub fills: bool,
    pub witness: Option<Witness>,
    pub support_witness: Vec<WhiteheadAut>,
}

/// A verified non-filling witness: an expansion, the lift of the path,
/// and a natural edge orbit of the total splitting that the lift does
/// not interiorly cross.
#[derive(Clone, Debug)]
pub struct Witness {
    pub expansion: Expansion,
    pub lifted: EdgePath,
    /// Canonical word of the missed natural edge orbit, in the total's
    /// base graph.
    pub missing_orbit: EdgePath,
}

/// The filling criterion, without witness construction.
pub fn fills_quick(split: &FreeSplitting, path: &EdgePath, env: &Envelope) -> Result<(bool, CrossingReport, FillingSupport)> {
    let nat = split.natural_structure()?;
    let crossings = interior_crossings(split, &nat, path)?;
    let support = filling_support(split, path, env)?;
    let fills = crossings.all_crossed() && support.kurosh == split.basis().rank();
    Ok((fills, crossings, support))
}

/// The filling criterion: interior crossing of every natural edge orbit
/// plus full filling rank. Attaches a verified witness when false: the
/// trivial expansion when a crossing is missing, else a blowup.
pub fn fills(split: &FreeSplitting, path: &EdgePath, env: &Envelope) -> Result<FillingReport> {
    let (ok, crossings, support) = fills_quick(split, path, env)?;
    let witness = if ok {
        None
    } else if !crossings.all_crossed() {
        let w = verify_witness(Expansion::trivial(split), path)?;
        Some(w.ok_or_else(|| Error::PropertyViolation("trivial witness failed verification".into()))?)
    } else {
        Some(blowup_witness_inner(split, path, env)?)
    };
    Ok(FillingReport {
        crossing_ok: crossings.all_crossed(),
        crossed: crossings.crossed,
        missing: crossings.missing,
        support_rank: support.support.rank,
        kurosh: support.kurosh,
        fills: ok,
        witness,
        support_witness: support.support.witness,
    })
}

/// Constructs a verified blowup witness that the path does not fill.
/// Applies when the filling rank falls short of the full rank; a path
/// of full rank gets no blowup witness (when it merely misses a
/// crossing, the trivial expansion attached by [`fills`] witnesses).
pub fn blowup_witness(split: &FreeSplitting, path: &EdgePath, env: &Envelope) -> Result<Witness> {
    let support = filling_support(split, path, env)?;
    if support.kurosh >= split.basis().rank() {
        return Err(Error::Inapplicable(
            "the path has full filling rank; no blowup witness exists".into(),
        ));
    }
    blowup_witness_inner(split, path, env)
}

fn verify_witness(exp: Expansion, path: &EdgePath) -> Result<Option<Witness>> {
    exp.verify()?;
    let lifted = exp.lift_path(path)?;
    let nat = match exp.total.natural_structure() {
        Ok(n) => n,
        Err(_) => return Ok(None),
    };
    let report = interior_crossings(&exp.total, &nat, &lifted)?;
    if report.missing.is_empty() {
        return Ok(None);
    }
    // Prefer a missed orbit through a fresh blowup edge; fall back to
    // the first missed orbit.
    let idx = report
        .missing
        .iter()
        .copied()
        .find(|&i| {
            nat.edges[i]
                .chain
                .iter()
                .any(|oe| exp.new_edges.contains(exp.total.graph().edge_name(oe.edge)))
        })
        .unwrap_or(report.missing[0]);
    Ok(Some(Witness {
        missing_orbit: nat.edges[idx].lift.clone(),
        expansion: exp,
        lifted,
    }))
}

fn blowup_witness_inner(split: &FreeSplitting, path: &EdgePath, env: &Envelope) -> Result<Witness> {
    // Uncollapse search, most-uncollapsed first.
    let z: Vec<EdgeId> = split.collapsed().iter().copied().collect();
    if z.len() <= 12 {
        for mask in 0..(1u64 << z.len()) {
            let keep: BTreeSet<EdgeId> = z
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            if keep.len() == z.len() {
                continue;
            }
            let Ok(exp) = Expansion::uncollapse(split, &keep) else {
                continue;
            };
            if let Some(w) = verify_witness(exp, path)? {
                return Ok(w);
            }
        }
    }
    // Vertex blowups at shared trivially-stabilized vertices, over the
    // splitting itself and every partial uncollapse.
    let mut keeps: Vec<BTreeSet<EdgeId>> = alloc::vec![split.collapsed().clone()];
    if z.len() <= 12 {
        for mask in 0..(1u64 << z.len()) {
            let keep: BTreeSet<EdgeId> = z
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            if keep.len() != z.len() {
                keeps.push(keep);
            }
        }
    }
    for keep in keeps {
        let Ok(stage) = Expansion::uncollapse(split, &keep) else {
            continue;
        };
        let Ok(stage_path) = stage.lift_path(path) else {
            continue;
        };
        if let Some(w) = try_shared_vertex_blowup(&stage.total, &stage_path, split, path, env)? {
            return Ok(w);
        }
    }
    Err(Error::NotImplemented(
        "no witness found within the implemented blowup families (stabilizer configuration outside the supported envelope)".into(),
    ))
}

/// Incidence data of the filling protoforest at a bare vertex class:
/// the cosets of the support factor whose protocomponents visit it,
/// each with its direction set.
struct BareIncidences {
    vertex: VertexId,
    /// Direction sets per incidence, pairwise disjoint.
    blocks: Vec<BTreeSet<OrientedEdge>>,
}

fn bare_incidences(
    split: &FreeSplitting,
    path: &EdgePath,
    factor: &StallingsGraph,
) -> Result<Vec<BareIncidences>> {
    let visits = split.t_visits(path);
    let mut per_vertex: BTreeMap<VertexId, Vec<(Word, BTreeSet<OrientedEdge>)>> = BTreeMap::new();
    for visit in &visits {
        let QVertex::Bare(v) = visit.q else { continue };
        // Incidence coset of the protocomponent through this visit,
        // anchored by translating the visit to coordinate 1: the coset
        // is anchor^-1 * factor.
        let anchor_inv = visit.anchor.inverse();
        let mut dirs: BTreeSet<OrientedEdge> = BTreeSet::new();
        if visit.first_pos > 0 {
            dirs.insert(path.edges()[visit.first_pos - 1].reversed());
        }
        if visit.last_pos < path.len() {
            dirs.insert(path.edges()[visit.last_pos]);
        }
        let entry = per_vertex.entry(v).or_default();
        // Merge with an existing incidence when the cosets agree:
        // rep·F = anchor_inv·F iff rep^-1·anchor_inv lies in F.
        let mut merged = false;
        for (rep, set) in entry.iter_mut() {
            if factor.contains(&rep.inverse().mul(&anchor_inv)) {
                set.extend(dirs.iter().copied());
                merged = true;
                break;
            }
        }
        if !merged {
            entry.push((anchor_inv.clone(), dirs));
        }
    }
    Ok(per_vertex
        .into_iter()
        .map(|(vertex, incid)| BareIncidences {
            vertex,
            blocks: incid.into_iter().map(|(_, s)| s).collect(),
        })
        .collect())
}

/// Splits one shared trivially-stabilized vertex in two, separating the
/// largest incidence's directions from the rest across a fresh edge.
fn try_shared_vertex_blowup(
    stage: &FreeSplitting,
    stage_path: &EdgePath,
    original: &FreeSplitting,
    original_path: &EdgePath,
    env: &Envelope,
) -> Result<Option<Witness>> {
    let Ok(fsupp) = filling_support(stage, stage_path, env) else {
        return Ok(None);
    };
    let (norm, nmap) = stage.normalized()?;
    let norm_path = stage.normalize_path(&norm, &nmap, stage_path)?;
    let incidences = bare_incidences(&norm, &norm_path, &fsupp.support.factor)?;
    for inc in incidences {
        if inc.blocks.len() < 2 {
            continue;
        }
        // Largest incidence block on its own side; deterministic.
        let mut blocks = inc.blocks.clone();
        blocks.sort_by_key(|b| (usize::MAX - b.len(), b.iter().next().copied()));
        let chosen = blocks[0].clone();
        let all: BTreeSet<OrientedEdge> = norm
            .graph()
            .directions(inc.vertex)
            .into_iter()
            .filter(|d| !norm.is_collapsed(d.edge))
            .collect();
        let rest: BTreeSet<OrientedEdge> = all.difference(&chosen).copied().collect();
        if chosen.is_empty() || rest.is_empty() {
            continue;
        }
        let Ok(total) = blow_bare_vertex(&norm, inc.vertex, &[rest, chosen]) else {
            continue;
        };
        // Compose: removed = normalization-removed edges (by name),
        // new = the fresh edge.
        let removed: BTreeSet<String> = nmap
            .removed_edges
            .iter()
            .map(|&e| stage.graph().edge_name(e).to_string())
            .collect();
        // Stage target may itself be an uncollapse of the original; the
        // final expansion relates `total` to the ORIGINAL splitting.
        let exp = Expansion {
            total,
            target: original.clone(),
            removed,
            new_edges: [BLOWUP_EDGE.to_string()].into_iter().collect(),
        };
        if let Some(w) = verify_witness(exp, original_path)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

const BLOWUP_EDGE: &str = "_x0";

/// Rebuilds the base graph with `vertex` split into one vertex per
/// direction block, joined consecutively by fresh unmarked edges.
pub fn blow_bare_vertex(
    split: &FreeSplitting,
    vertex: VertexId,
    blocks: &[BTreeSet<OrientedEdge>],
) -> Result<FreeSplitting> {
    let g = split.graph();
    if split.qvertex(vertex) != QVertex::Bare(vertex) {
        return Err(validation("blowup vertex must have trivial stabilizer"));
    }
    let mut vertices: Vec<String> = Vec::new();
    for v in g.vertices() {
        if v == vertex {
            for i in 0..blocks.len() {
                vertices.push(format!("{}${}", g.vertex_name(v), i));
            }
        } else {
            vertices.push(g.vertex_name(v).to_string());
        }
    }
    let block_of = |d: OrientedEdge| -> Option<usize> {
        blocks.iter().position(|b| b.contains(&d))
    };
    let vertex_name = |v: VertexId, d: OrientedEdge| -> Result<String> {
        if v == vertex {
            let b = block_of(d)
                .ok_or_else(|| validation("direction missing from the blowup partition"))?;
            Ok(format!("{}${}", g.vertex_name(v), b))
        } else {
            Ok(g.vertex_name(v).to_string())
        }
    };
    let mut edges: Vec<(String, String, String)> = Vec::new();
    let mut marking: BTreeMap<String, String> = BTreeMap::new();
    for e in g.edge_ids() {
        let (from, to) = g.endpoints(e);
        let fw = OrientedEdge::forward(e);
        let from_name = vertex_name(from, fw)?;
        let to_name = vertex_name(to, fw.reversed())?;
        edges.push((g.edge_name(e).to_string(), from_name, to_name));
        if let Some(l) = g.letter(fw) {
            marking.insert(g.edge_name(e).to_string(), g.basis().display_letter(l));
        }
    }
    for i in 1..blocks.len() {
        edges.push((
            if i == 1 {
                BLOWUP_EDGE.to_string()
            } else {
                format!("_x{}", i - 1)
            },
            format!("{}${}", g.vertex_name(vertex), i - 1),
            format!("{}${}", g.vertex_name(vertex), i),
        ));
    }
    let graph = MarkedGraph::new(vertices, edges, g.basis().clone(), Some(marking))?;
    let collapsed: BTreeSet<EdgeId> = split
        .collapsed()
        .iter()
        .map(|&e| graph.edge_by_name(g.edge_name(e)).unwrap())
        .collect();
    FreeSplitting::new(graph, collapsed)
}

// ---------------------------------------------------------------------------
// Expansion enumeration (the brute-force oracle for the criterion)
// ---------------------------------------------------------------------------

/// Enumeration of collapse maps onto the splitting with a bounded
/// number of extra natural edges.
pub struct ExpansionStream {
    pub expansions: Vec<Expansion>,
    pub truncated: bool,
}

const ENUM_CAP: usize = 20_000;

/// Enumerates expansions of the splitting with at most `budget` extra
/// natural edge orbits: partial uncollapses, blowups of trivially
/// stabilized vertex classes into direction partitions, and their
/// combinations, deduplicated by a canonical structural key.
pub fn expansion_enumerate(split: &FreeSplitting, budget: usize) -> Result<ExpansionStream> {
    let base_naturals = split.natural_structure()?.edges.len();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out: Vec<Expansion> = Vec::new();
    let mut truncated = false;

    let push = |exp: Expansion, out: &mut Vec<Expansion>, seen: &mut BTreeSet<String>| -> Result<bool> {
        if out.len() >= ENUM_CAP {
            return Ok(false);
        }
        if exp.verify().is_err() {
            return Ok(true);
        }
        let Ok(nat) = exp.total.natural_structure() else {
            return Ok(true);
        };
        if nat.edges.len() > base_naturals + budget {
            return Ok(true);
        }
        let key = expansion_key(&exp);
        if seen.insert(key) {
            out.push(exp);
        }
        Ok(true)
    };

    push(Expansion::trivial(split), &mut out, &mut seen)?;

    // Partial uncollapses.
    let z: Vec<EdgeId> = split.collapsed().iter().copied().collect();
    let mut stage_keeps: Vec<BTreeSet<EdgeId>> = alloc::vec![split.collapsed().clone()];
    if z.len() <= 12 {
        for mask in 0..(1u64 << z.len()) {
            let keep: BTreeSet<EdgeId> = z
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            if keep.len() == z.len() {
                continue;
            }
            if let Ok(exp) = Expansion::uncollapse(split, &keep) {
                if !push(exp, &mut out, &mut seen)? {
                    truncated = true;
                    break;
                }
                stage_keeps.push(keep);
            }
        }
    } else {
        truncated = true;
    }

    // Vertex blowups over each stage (the splitting and its uncollapses).
    'stages: for keep in stage_keeps {
        let stage = if keep.len() == split.collapsed().len() {
            Expansion::trivial(split)
        } else {
            match Expansion::uncollapse(split, &keep) {
                Ok(e) => e,
                Err(_) => continue,
            }
        };
        let Ok((norm, nmap)) = stage.total.normalized() else {
            continue;
        };
        let removed: BTreeSet<String> = nmap
            .removed_edges
            .iter()
            .map(|&e| stage.total.graph().edge_name(e).to_string())
            .collect();
        for q in norm.qvertices() {
            let QVertex::Bare(v) = q else { continue };
            let dirs: Vec<OrientedEdge> = norm
                .graph()
                .directions(v)
                .into_iter()
                .filter(|d| !norm.is_collapsed(d.edge))
                .collect();
            if dirs.len() < 2 {
                continue;
            }
            for blocks in direction_partitions(&dirs, budget + 1) {
                let Ok(total) = blow_bare_vertex(&norm, v, &blocks) else {
                    continue;
                };
                let exp = Expansion {
                    total,
                    target: split.clone(),
                    removed: removed.clone(),
                    new_edges: (1..blocks.len())
                        .map(|i| {
                            if i == 1 {
                                BLOWUP_EDGE.to_string()
                            } else {
                                format!("_x{}", i - 1)
                            }
                        })
                        .collect(),
                };
                if !push(exp, &mut out, &mut seen)? {
                    truncated = true;
                    break 'stages;
                }
            }
        }
    }

    Ok(ExpansionStream {
        expansions: out,
        truncated,
    })
}

/// Set partitions of the direction set into 2..=max_blocks nonempty
/// blocks, canonical (blocks ordered by least element, first block
/// containing the least direction).
fn direction_partitions(dirs: &[OrientedEdge], max_blocks: usize) -> Vec<Vec<BTreeSet<OrientedEdge>>> {
    let n = dirs.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    // Restricted growth strings.
    let mut assignment = alloc::vec![0usize; n];
    loop {
        let blocks_used = assignment.iter().copied().max().unwrap() + 1;
        if blocks_used >= 2 && blocks_used <= max_blocks {
            let mut blocks: Vec<BTreeSet<OrientedEdge>> = alloc::vec![BTreeSet::new(); blocks_used];
            for (i, &b) in assignment.iter().enumerate() {
                blocks[b].insert(dirs[i]);
            }
            out.push(blocks);
        }
        // Next restricted growth string.
        let mut i = n;
        loop {
            if i == 1 {
                return out;
            }
            i -= 1;
            let max_prefix = assignment[..i].iter().copied().max().unwrap();
            if assignment[i] <= max_prefix {
                assignment[i] += 1;
                for j in (i + 1)..n {
                    assignment[j] = 0;
                }
                break;
            } else {
                assignment[i] = 0;
            }
        }
    }
}

/// Canonical structural key of an expansion over its target: shared
/// edges keep their names, blowup structure is encoded through
/// color-refined vertex labels.
fn expansion_key(exp: &Expansion) -> String {
    let g = exp.total.graph();
    let n = g.vertex_count();
    // Initial colors: multiset of (shared edge name, direction) ends.
    let mut colors: Vec<String> = (0..n).map(|_| String::new()).collect();
    for v in g.vertices() {
        let mut sig: Vec<String> = Vec::new();
        for d in g.directions(v) {
            let name = g.edge_name(d.edge);
            let tag = if exp.new_edges.contains(name) { "*" } else { name };
            sig.push(format!("{}{}", tag, if d.forward { "+" } else { "-" }));
        }
        sig.sort();
        colors[v.0 as usize] = sig.join(",");
    }
    // Refine by neighbor colors until stable.
    for _ in 0..n {
        let mut next: Vec<String> = Vec::with_capacity(n);
        for v in g.vertices() {
            let mut sig: Vec<String> = Vec::new();
            for d in g.directions(v) {
                let t = g.to(d);
                sig.push(format!("({})", colors[t.0 as usize]));
            }
            sig.sort();
            next.push(format!("{}|{}", colors[v.0 as usize], sig.join("")));
        }
        if next == colors {
            break;
        }
        colors = next;
    }
    let mut edge_desc: Vec<String> = Vec::new();
    for e in g.edge_ids() {
        let name = g.edge_name(e);
        let tag = if exp.new_edges.contains(name) { "*" } else { name };
        let (f, t) = g.endpoints(e);
        let (cf, ct) = (&colors[f.0 as usize], &colors[t.0 as usize]);
        let z = if exp.total.is_collapsed(e) { "z" } else { "" };
        edge_desc.push(format!("{tag}{z}:[{cf}]>[{ct}]"));
    }
    edge_desc.sort();
    let mut removed: Vec<&String> = exp.removed.iter().collect();
    removed.sort();
    format!("{};;rm={:?}", edge_desc.join(";"), removed)
}
