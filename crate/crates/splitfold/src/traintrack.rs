//! Train track self-maps of marked graphs: validation through the gate
//! structure, transition matrices and Perron-Frobenius certificates,
//! PF and filling exponents, tile nesting traces, translation length
//! bounds, and the two single improvement moves (valence-two homotopy
//! and invariant/pretrivial forest collapse).

use crate::error::{validation, Error, Result};
use crate::graph::{EdgeId, MarkedGraph, OrientedEdge, VertexId};
use crate::matrix::{pf_certificate, IntMatrix, PfCertificate, Rational};
use crate::morphism::GraphMorphism;
use crate::path::EdgePath;
use crate::protoforest::{fills_quick, occurrences};
use crate::splitting::FreeSplitting;
use crate::Envelope;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// An unordered pair of distinct directions at a common vertex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Turn(pub OrientedEdge, pub OrientedEdge);

impl Turn {
    fn new(a: OrientedEdge, b: OrientedEdge) -> Turn {
        if a <= b {
            Turn(a, b)
        } else {
            Turn(b, a)
        }
    }
}

/// A validated train track map: a self homotopy equivalence of a
/// Grushko splitting all of whose iterates are injective on edges,
/// certified by the finite gate structure.
#[derive(Clone, Debug)]
pub struct TrainTrackMap {
    pub split: FreeSplitting,
    pub map: GraphMorphism,
    /// Gate id of every direction.
    pub gates: BTreeMap<OrientedEdge, usize>,
}

/// Validation outcome: the map, or a taken turn that degenerates.
#[derive(Clone, Debug)]
pub enum TtValidation {
    Valid(TrainTrackMap),
    IllegalTurn(Turn),
}

fn directions_of(g: &MarkedGraph) -> Vec<OrientedEdge> {
    let mut out = Vec::new();
    for e in g.edge_ids() {
        out.push(OrientedEdge::forward(e));
        out.push(OrientedEdge::backward(e));
    }
    out
}

/// Gate computation plus the legality check of all taken turns.
pub fn validate_tt(split: &FreeSplitting, f: &GraphMorphism) -> Result<TtValidation> {
    if !split.is_grushko() {
        return Err(validation("train track maps are defined on Grushko presentations"));
    }
    if f.domain() != split.graph() || f.codomain() != split.graph() {
        return Err(validation("train track map must be a self-map of the splitting's graph"));
    }
    if f.has_trivial_image() {
        return Err(validation("train track maps need nonempty edge images"));
    }
    if !f.is_homotopy_equivalence() {
        return Err(validation("train track maps must be homotopy equivalences"));
    }
    let g = f.domain();
    let dirs = directions_of(g);
    // Iterate the derivative far enough that mergers have stabilized:
    // pairs of direction orbits merge within |dirs|^2 steps.
    let mut image: BTreeMap<OrientedEdge, OrientedEdge> = BTreeMap::new();
    for &d in &dirs {
        image.insert(d, f.direction_image(d).expect("nonempty image"));
    }
    let steps = dirs.len() * dirs.len();
    let mut iterated: BTreeMap<OrientedEdge, OrientedEdge> =
        dirs.iter().map(|&d| (d, d)).collect();
    for _ in 0..steps {
        for &d in &dirs {
            let cur = iterated[&d];
            iterated.insert(d, image[&cur]);
        }
    }
    // Gates: directions with the same stabilized iterate.
    let mut gate_of: BTreeMap<OrientedEdge, usize> = BTreeMap::new();
    let mut reps: Vec<OrientedEdge> = Vec::new();
    for &d in &dirs {
        let target = iterated[&d];
        match reps.iter().position(|&r| iterated[&r] == target) {
            Some(i) => {
                gate_of.insert(d, i);
            }
            None => {
                gate_of.insert(d, reps.len());
                reps.push(d);
            }
        }
    }
    // Taken turns: junctions inside edge images.
    for e in g.edge_ids() {
        let img = f.edge_image(OrientedEdge::forward(e));
        let edges = img.edges();
        for w in edges.windows(2) {
            let turn = Turn::new(w[0].reversed(), w[1]);
            if gate_of[&turn.0] == gate_of[&turn.1] {
                return Ok(TtValidation::IllegalTurn(turn));
            }
        }
    }
    Ok(TtValidation::Valid(TrainTrackMap {
        split: split.clone(),
        map: f.clone(),
        gates: gate_of,
    }))
}

impl TrainTrackMap {
    /// Edge orbit index order: lexicographic by edge name.
    pub fn edge_order(&self) -> Vec<EdgeId> {
        let g = self.split.graph();
        let mut edges: Vec<EdgeId> = g.edge_ids().collect();
        edges.sort_by(|a, b| g.edge_name(*a).cmp(g.edge_name(*b)));
        edges
    }

    /// Crossing counts: entry `(i, j)` counts how many times the image
    /// of edge `j` crosses edge `i` in either orientation.
    pub fn transition_matrix(&self) -> IntMatrix {
        let order = self.edge_order();
        let n = order.len();
        let mut m = IntMatrix::zero(n);
        for (j, &ej) in order.iter().enumerate() {
            let img = self.map.edge_image(OrientedEdge::forward(ej));
            for oe in img.edges() {
                let i = order.iter().position(|&e| e == oe.edge).unwrap();
                m[(i, j)] += 1;
            }
        }
        m
    }

    /// The `k`-tile of an edge path: the tightening-free iterated image.
    pub fn tile(&self, k: usize, path: &EdgePath) -> Result<EdgePath> {
        let mut cur = path.clone();
        for _ in 0..k {
            cur = self.map.map_path(&cur)?;
            if !cur.is_immersed() {
                return Err(Error::PropertyViolation(
                    "tile backtracks; the map is not a train track map".into(),
                ));
            }
        }
        Ok(cur)
    }

    pub fn edge_path(&self, e: EdgeId) -> EdgePath {
        let g = self.split.graph();
        let (from, _) = g.endpoints(e);
        EdgePath::immersed(g, from, alloc::vec![OrientedEdge::forward(e)]).unwrap()
    }
}

/// Least exponent making every transition matrix entry at least 4.
pub fn pf_exponent(tt: &TrainTrackMap) -> Result<usize> {
    let m = tt.transition_matrix();
    if !m.is_primitive() {
        return Err(validation("transition matrix is not primitive (not EG-aperiodic)"));
    }
    let bound = 3 * ((m.n.saturating_sub(1)).pow(2) + 1) + 8;
    let mut p = IntMatrix::identity(m.n);
    for k in 1..=bound {
        p = p.mul(&m)?;
        if p.min_entry() >= 4 {
            return Ok(k);
        }
    }
    Err(Error::PropertyViolation(
        "primitive matrix failed to reach entries >= 4 within the scan bound".into(),
    ))
}

/// The filling exponent and the per-edge first filling indices.
#[derive(Clone, Debug)]
pub struct FillingExponent {
    pub omega: usize,
    /// For each edge (in lexicographic order), the least `k` with a
    /// filling `k`-tile.
    pub first_filling: Vec<(String, usize)>,
    pub bound: usize,
}

/// Least `k` such that every `F^k` edge tile fills, searched up to the
/// bound `kappa * rank`; exceeding the bound is a theory violation.
pub fn filling_exponent(tt: &TrainTrackMap, env: &Envelope) -> Result<FillingExponent> {
    let kappa = pf_exponent(tt)?;
    let n = tt.split.basis().rank();
    let bound = kappa * n;
    let order = tt.edge_order();
    let g = tt.split.graph();
    let mut tiles: Vec<EdgePath> = order.iter().map(|&e| tt.edge_path(e)).collect();
    let mut first: Vec<Option<usize>> = alloc::vec![None; order.len()];
    for k in 1..=bound {
        for (i, t) in tiles.iter_mut().enumerate() {
            *t = tt.map.map_path(t)?;
            if !t.is_immersed() {
                return Err(Error::PropertyViolation("tile backtracks".into()));
            }
            if first[i].is_none() {
                let (ok, _, _) = fills_quick(&tt.split, t, env)?;
                if ok {
                    first[i] = Some(k);
                }
            }
        }
        if first.iter().all(|f| f.is_some()) {
            return Ok(FillingExponent {
                omega: k,
                first_filling: order
                    .iter()
                    .zip(first.iter())
                    .map(|(&e, f)| (g.edge_name(e).to_string(), f.unwrap()))
                    .collect(),
                bound,
            });
        }
    }
    Err(Error::PropertyViolation(format!(
        "no filling exponent within the bound kappa * rank = {bound}"
    )))
}

/// Every `F^kappa` edge tile must cross at least two translates of
/// every natural edge; returning false flags a wrong exponent.
pub fn uniform_crossing_check(tt: &TrainTrackMap, kappa: usize) -> Result<bool> {
    let nat = tt.split.natural_structure()?;
    for e in tt.edge_order() {
        let tile = tt.tile(kappa, &tt.edge_path(e))?;
        for ne in &nat.edges {
            if occurrences(&tile, ne.lift.edges()).len() < 2 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The quantitative translation length bound `1 / (nu * (3 kappa + omega))`.
pub fn tau_lower_bound(kappa: usize, omega: usize, nu: Rational) -> Result<Rational> {
    if kappa == 0 || omega == 0 {
        return Err(validation("exponents must be at least 1"));
    }
    if !nu.is_positive() {
        return Err(validation("nu must be positive"));
    }
    let mu = Rational::from_int(3 * kappa as i128 + omega as i128);
    nu.mul(&mu)?.recip()
}

/// One row of the tile nesting trace.
#[derive(Clone, Debug)]
pub struct NestingEntry {
    pub tile_len: usize,
    pub kurosh: usize,
}

/// Stabilization report for the nested tile sequence of a natural edge.
#[derive(Clone, Debug)]
pub struct NestingTrace {
    /// Power of the map used per nesting step.
    pub power: usize,
    pub entries: Vec<NestingEntry>,
    /// First index with `KR(m) = KR(m+1)`.
    pub stabilization_index: usize,
    pub stable_kurosh: usize,
    /// First-repeat-implies-constant held along the computed trace, and
    /// rank equality coincided with conjugacy of the support factors.
    pub column_rule_ok: bool,
}

/// Computes the nested iteration tile sequence `E, G(E), G^2(E), ...`
/// with `G = F^r`, where `r` is the least power whose tile interiorly
/// crosses a translate of the starting natural edge (the nesting
/// normalization); reports the Kurosh rank ledger and its stabilization.
pub fn tile_nesting_trace(
    tt: &TrainTrackMap,
    start: &EdgePath,
    power: Option<usize>,
    env: &Envelope,
) -> Result<NestingTrace> {
    let kappa = pf_exponent(tt)?;
    let interior = |tile: &EdgePath| -> bool {
        occurrences(tile, start.edges())
            .into_iter()
            .any(|(p, _)| p >= 1 && p + start.len() <= tile.len().saturating_sub(1))
    };
    let r = match power {
        Some(r) => {
            let t = tt.tile(r, start)?;
            if !interior(&t) {
                return Err(Error::Inapplicable(
                    "the given power's tile has no interior self-crossing".into(),
                ));
            }
            r
        }
        None => {
            let mut found = None;
            let mut t = start.clone();
            for r in 1..=(3 * kappa) {
                t = tt.map.map_path(&t)?;
                if interior(&t) {
                    found = Some(r);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::Inapplicable("no interior self-crossing within three PF exponents".into())
            })?
        }
    };
    let n = tt.split.basis().rank();
    let mut entries = Vec::new();
    let mut supports = Vec::new();
    let mut tile = start.clone();
    let limit = n + 3;
    for _ in 0..=limit {
        let fs = crate::protoforest::filling_support(&tt.split, &tile, env)?;
        entries.push(NestingEntry {
            tile_len: tile.len(),
            kurosh: fs.kurosh,
        });
        supports.push(fs.support.factor);
        if entries.len() >= 2 {
            let k = entries.len();
            if entries[k - 1].kurosh < entries[k - 2].kurosh {
                return Err(Error::PropertyViolation(
                    "Kurosh rank decreased along the nested tile sequence".into(),
                ));
            }
        }
        // Stop a couple of steps after the first repeat.
        let k = entries.len();
        if k >= 2 && entries[k - 1].kurosh == entries[k - 2].kurosh && k >= 4 {
            break;
        }
        tile = tt.tile(r, &tile)?;
    }
    // First repeat index and the column rule.
    let mut stab = None;
    for i in 0..entries.len() - 1 {
        if entries[i].kurosh == entries[i + 1].kurosh {
            stab = Some(i);
            break;
        }
    }
    let Some(stab) = stab else {
        return Err(Error::PropertyViolation(
            "Kurosh ledger failed to stabilize within the scan".into(),
        ));
    };
    let mut column_rule_ok = true;
    for i in stab..entries.len() - 1 {
        if entries[i].kurosh != entries[stab].kurosh {
            column_rule_ok = false;
        }
        // Rank equality must coincide with conjugacy of supports.
        let rank_eq = entries[i].kurosh == entries[i + 1].kurosh;
        let conj_eq = supports[i].conjugate_eq(&supports[i + 1]);
        if rank_eq != conj_eq {
            column_rule_ok = false;
        }
    }
    Ok(NestingTrace {
        power: r,
        entries: entries.clone(),
        stabilization_index: stab,
        stable_kurosh: entries[stab].kurosh,
        column_rule_ok,
    })
}

// ---------------------------------------------------------------------------
// Improvement moves
// ---------------------------------------------------------------------------

/// Contracts a forest of edges, auto-remarking the quotient; returns
/// the quotient splitting with the collapse and a section.
fn contract_edges(
    split: &FreeSplitting,
    forest: &BTreeSet<EdgeId>,
) -> Result<(FreeSplitting, GraphMorphism, GraphMorphism)> {
    let g = split.graph();
    // Union-find of endpoints.
    let mut parent: Vec<u32> = (0..g.vertex_count() as u32).collect();
    fn find(parent: &mut Vec<u32>, x: u32) -> u32 {
        let mut r = x;
        while parent[r as usize] != r {
            r = parent[r as usize];
        }
        r
    }
    for &e in forest {
        let (a, b) = g.endpoints(e);
        let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
        if ra == rb {
            return Err(validation("contraction set contains a cycle"));
        }
        parent[ra as usize] = rb;
    }
    // Class representative: lex-least vertex name.
    let mut rep_name: BTreeMap<u32, String> = BTreeMap::new();
    for v in g.vertices() {
        let r = find(&mut parent, v.0);
        let name = g.vertex_name(v).to_string();
        rep_name
            .entry(r)
            .and_modify(|n| {
                if name < *n {
                    *n = name.clone();
                }
            })
            .or_insert(name);
    }
    let vname = |v: VertexId, parent: &mut Vec<u32>| -> String { rep_name[&find(parent, v.0)].clone() };
    let mut vertices: Vec<String> = Vec::new();
    for v in g.vertices() {
        let name = vname(v, &mut parent);
        if !vertices.contains(&name) {
            vertices.push(name);
        }
    }
    let mut edges = Vec::new();
    for e in g.edge_ids() {
        if forest.contains(&e) {
            continue;
        }
        let (from, to) = g.endpoints(e);
        edges.push((
            g.edge_name(e).to_string(),
            vname(from, &mut parent),
            vname(to, &mut parent),
        ));
    }
    let quotient = MarkedGraph::new(vertices, edges, g.basis().clone(), None)?;
    let qsplit = FreeSplitting::new(quotient.clone(), BTreeSet::new())?;
    // rho: split -> quotient.
    let mut vmap = Vec::new();
    for v in g.vertices() {
        vmap.push(quotient.vertex_by_name(&vname(v, &mut parent)).unwrap());
    }
    let mut emap = Vec::new();
    for e in g.edge_ids() {
        if forest.contains(&e) {
            let (from, _) = g.endpoints(e);
            emap.push(EdgePath::trivial(vmap[from.0 as usize]));
        } else {
            let ne = quotient.edge_by_name(g.edge_name(e)).unwrap();
            let oe = OrientedEdge::forward(ne);
            emap.push(EdgePath::immersed(&quotient, quotient.from(oe), alloc::vec![oe])?);
        }
    }
    let rho = GraphMorphism::new(g.clone(), quotient.clone(), vmap, emap)?;
    // sigma: quotient -> split. Representative vertices; edges travel
    // through the forest to their true endpoints.
    let forest_path = |from: VertexId, to: VertexId| -> Vec<OrientedEdge> {
        // BFS within the forest.
        if from == to {
            return Vec::new();
        }
        let mut prev: BTreeMap<VertexId, OrientedEdge> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        seen.insert(from);
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(from);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for d in g.directions(x) {
                if forest.contains(&d.edge) {
                    let t = g.to(d);
                    if seen.insert(t) {
                        prev.insert(t, d);
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let d = prev[&cur];
            path.push(d);
            cur = g.from(d);
        }
        path.reverse();
        path
    };
    let mut sig_vmap = Vec::new();
    for v in quotient.vertices() {
        sig_vmap.push(g.vertex_by_name(quotient.vertex_name(v)).unwrap());
    }
    let mut sig_emap = Vec::new();
    for e in quotient.edge_ids() {
        let oldid = g.edge_by_name(quotient.edge_name(e)).unwrap();
        let (qfrom, _) = quotient.endpoints(e);
        let rep_from = g.vertex_by_name(quotient.vertex_name(qfrom)).unwrap();
        let (ofrom, oto) = g.endpoints(oldid);
        let (qf, qt) = quotient.endpoints(e);
        let rep_to = g.vertex_by_name(quotient.vertex_name(qt)).unwrap();
        let _ = qf;
        let mut edges_path = forest_path(rep_from, ofrom);
        edges_path.push(OrientedEdge::forward(oldid));
        edges_path.extend(forest_path(oto, rep_to));
        sig_emap.push(EdgePath::immersed(g, rep_from, edges_path)?);
    }
    let sigma = GraphMorphism::new(quotient, g.clone(), sig_vmap, sig_emap)?;
    Ok((qsplit, rho, sigma))
}

/// Outcome of the invariant forest search.
#[derive(Clone, Debug)]
pub enum CollapseOutcome {
    /// No pretrivial edges and the transition structure is irreducible.
    Irreducible,
    /// A pretrivial or invariant forest was collapsed.
    Collapsed {
        split: FreeSplitting,
        map: GraphMorphism,
        collapsed_edges: Vec<String>,
    },
    /// A proper invariant subgraph exists but is not a forest, so it
    /// cannot be collapsed: the representative is reducible.
    Reducible { invariant_edges: Vec<String> },
}

/// Finds and collapses a maximal pretrivial forest, or else a minimal
/// invariant proper subforest; reports reducibility when the invariant
/// subgraph contains a cycle.
pub fn collapse_invariant_forest(split: &FreeSplitting, f: &GraphMorphism) -> Result<CollapseOutcome> {
    let g = split.graph();
    // Pretrivial edges: image tightens to a point.
    let pretrivial: BTreeSet<EdgeId> = g
        .edge_ids()
        .filter(|&e| f.edge_image(OrientedEdge::forward(e)).tightened().is_trivial())
        .collect();
    if !pretrivial.is_empty() {
        if has_cycle_edges(g, &pretrivial) {
            return Err(Error::PropertyViolation(
                "pretrivial subgraph of a homotopy equivalence contains a cycle".into(),
            ));
        }
        let (qsplit, rho, sigma) = contract_edges(split, &pretrivial)?;
        let induced = rho.compose_after_tight(&f.compose_after_tight(&sigma)?)?;
        return Ok(CollapseOutcome::Collapsed {
            collapsed_edges: pretrivial.iter().map(|&e| g.edge_name(e).to_string()).collect(),
            split: qsplit,
            map: induced,
        });
    }
    // Crossing digraph: e -> e' when the image of e crosses e'.
    let edges: Vec<EdgeId> = g.edge_ids().collect();
    let closure = |seed: EdgeId| -> BTreeSet<EdgeId> {
        let mut set = BTreeSet::new();
        let mut stack = alloc::vec![seed];
        set.insert(seed);
        while let Some(e) = stack.pop() {
            for oe in f.edge_image(OrientedEdge::forward(e)).edges() {
                if set.insert(oe.edge) {
                    stack.push(oe.edge);
                }
            }
        }
        set
    };
    let mut best: Option<BTreeSet<EdgeId>> = None;
    for &e in &edges {
        let c = closure(e);
        if c.len() < edges.len() && best.as_ref().map_or(true, |b| c.len() < b.len()) {
            best = Some(c);
        }
    }
    match best {
        None => Ok(CollapseOutcome::Irreducible),
        Some(invariant) => {
            if has_cycle_edges(g, &invariant) {
                Ok(CollapseOutcome::Reducible {
                    invariant_edges: invariant.iter().map(|&e| g.edge_name(e).to_string()).collect(),
                })
            } else {
                let (qsplit, rho, sigma) = contract_edges(split, &invariant)?;
                let induced = rho.compose_after_tight(&f.compose_after_tight(&sigma)?)?;
                Ok(CollapseOutcome::Collapsed {
                    collapsed_edges: invariant.iter().map(|&e| g.edge_name(e).to_string()).collect(),
                    split: qsplit,
                    map: induced,
                })
            }
        }
    }
}

fn has_cycle_edges(g: &MarkedGraph, edges: &BTreeSet<EdgeId>) -> bool {
    let mut parent: Vec<u32> = (0..g.vertex_count() as u32).collect();
    fn find(parent: &mut Vec<u32>, x: u32) -> u32 {
        let mut r = x;
        while parent[r as usize] != r {
            r = parent[r as usize];
        }
        r
    }
    for &e in edges {
        let (a, b) = g.endpoints(e);
        let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
        if ra == rb {
            return true;
        }
        parent[ra as usize] = rb;
    }
    false
}

/// Result of a valence-two homotopy.
#[derive(Clone, Debug)]
pub struct Valence2Move {
    pub split: FreeSplitting,
    pub map: GraphMorphism,
    pub removed_vertex: String,
    pub merged_edge: String,
    pub lambda_before: Option<PfCertificate>,
    pub lambda_after: Option<PfCertificate>,
}

/// Valence-two homotopy: absorbs the lighter edge at a valence-two
/// vertex into the heavier one (PF weight comparison, lexicographic tie
/// break), tightens the induced map, and collapses any pretrivial
/// forest it creates. The expansion factor never increases.
pub fn valence2_homotopy(
    split: &FreeSplitting,
    f: &GraphMorphism,
    vertex: Option<VertexId>,
) -> Result<Valence2Move> {
    let g = split.graph();
    let eligible: Vec<VertexId> = g
        .vertices()
        .filter(|&v| {
            let d = g.directions(v);
            d.len() == 2 && d[0].edge != d[1].edge
        })
        .collect();
    let v = match vertex {
        Some(v) => {
            if !eligible.contains(&v) {
                return Err(Error::Inapplicable(
                    "vertex is not an eligible valence-two vertex".into(),
                ));
            }
            v
        }
        None => {
            let mut sorted = eligible.clone();
            sorted.sort_by(|a, b| g.vertex_name(*a).cmp(g.vertex_name(*b)));
            *sorted
                .first()
                .ok_or_else(|| Error::Inapplicable("no eligible valence-two vertex".into()))?
        }
    };
    let dirs = g.directions(v);
    let (mut d_keep, mut d_drop) = (dirs[0], dirs[1]);
    // PF weights of the two edges: iterate the transition matrix on the
    // ones vector; heavier edge is stretched, lighter collapsed.
    let tt_order: Vec<EdgeId> = {
        let mut e: Vec<EdgeId> = g.edge_ids().collect();
        e.sort_by(|a, b| g.edge_name(*a).cmp(g.edge_name(*b)));
        e
    };
    let m = {
        let n = tt_order.len();
        let mut m = IntMatrix::zero(n);
        for (j, &ej) in tt_order.iter().enumerate() {
            for oe in f.edge_image(OrientedEdge::forward(ej)).edges() {
                let i = tt_order.iter().position(|&e| e == oe.edge).unwrap();
                m[(i, j)] += 1;
            }
        }
        m
    };
    let weights = {
        let mut v = alloc::vec![1u128; m.n];
        for _ in 0..(3 * m.n + 3) {
            match m.apply(&v) {
                Ok(next) => v = next,
                Err(_) => break,
            }
        }
        v
    };
    let weight = |d: OrientedEdge| weights[tt_order.iter().position(|&e| e == d.edge).unwrap()];
    let name = |d: OrientedEdge| g.edge_name(d.edge).to_string();
    if weight(d_drop) > weight(d_keep) || (weight(d_drop) == weight(d_keep) && name(d_drop) < name(d_keep)) {
        core::mem::swap(&mut d_keep, &mut d_drop);
    }
    let lambda_before = if m.is_primitive() {
        pf_certificate(&m, 3 * m.n + 3).ok()
    } else {
        None
    };

    // Build the merged graph: v removed, d_keep's and d_drop's edges
    // replaced by one edge from to(d_keep) to to(d_drop), keeping the
    // heavier edge's name.
    let merged_name = name(d_keep);
    let u_keep = g.to(d_keep);
    let u_drop = g.to(d_drop);
    let mut vertices: Vec<String> = g
        .vertices()
        .filter(|&x| x != v)
        .map(|x| g.vertex_name(x).to_string())
        .collect();
    vertices.sort();
    let mut edges = Vec::new();
    for e in g.edge_ids() {
        if e == d_keep.edge || e == d_drop.edge {
            continue;
        }
        let (from, to) = g.endpoints(e);
        edges.push((
            g.edge_name(e).to_string(),
            g.vertex_name(from).to_string(),
            g.vertex_name(to).to_string(),
        ));
    }
    edges.push((
        merged_name.clone(),
        g.vertex_name(u_keep).to_string(),
        g.vertex_name(u_drop).to_string(),
    ));
    let quotient = MarkedGraph::new(vertices, edges, g.basis().clone(), None)?;
    let qsplit = FreeSplitting::new(quotient.clone(), BTreeSet::new())?;
    // rho: g -> quotient (collapse d_drop's edge, stretch d_keep's).
    let mut vmap = Vec::new();
    for x in g.vertices() {
        let target = if x == v { u_drop } else { x };
        vmap.push(quotient.vertex_by_name(g.vertex_name(target)).unwrap());
    }
    let merged = quotient.edge_by_name(&merged_name).unwrap();
    let mut emap = Vec::new();
    for e in g.edge_ids() {
        if e == d_drop.edge {
            // Collapses to the far endpoint of the dropped edge.
            emap.push(EdgePath::trivial(
                quotient.vertex_by_name(g.vertex_name(u_drop)).unwrap(),
            ));
        } else if e == d_keep.edge {
            // Stretched over both: oriented from to(d_keep) to to(d_drop).
            let oe = OrientedEdge::forward(merged);
            // d_keep points out of v; the kept edge traversed into v and
            // onward over the dropped edge runs to(d_keep) -> to(d_drop),
            // which is the merged edge's forward direction. The original
            // forward orientation of d_keep.edge agrees with that
            // traversal exactly when d_keep is its backward direction.
            let oriented = if d_keep.forward { oe.reversed() } else { oe };
            emap.push(EdgePath::immersed(
                &quotient,
                quotient.from(oriented),
                alloc::vec![oriented],
            )?);
        } else {
            let ne = quotient.edge_by_name(g.edge_name(e)).unwrap();
            let oe = OrientedEdge::forward(ne);
            emap.push(EdgePath::immersed(&quotient, quotient.from(oe), alloc::vec![oe])?);
        }
    }
    let rho = GraphMorphism::new(g.clone(), quotient.clone(), vmap, emap)?;
    // sigma: quotient -> g: the merged edge travels across v.
    let mut sig_vmap = Vec::new();
    for x in quotient.vertices() {
        sig_vmap.push(g.vertex_by_name(quotient.vertex_name(x)).unwrap());
    }
    let mut sig_emap = Vec::new();
    for e in quotient.edge_ids() {
        if e == merged {
            let path = alloc::vec![d_keep.reversed(), d_drop];
            sig_emap.push(EdgePath::immersed(g, u_keep, path)?);
        } else {
            let oldid = g.edge_by_name(quotient.edge_name(e)).unwrap();
            let oe = OrientedEdge::forward(oldid);
            sig_emap.push(EdgePath::immersed(g, g.from(oe), alloc::vec![oe])?);
        }
    }
    let sigma = GraphMorphism::new(quotient, g.clone(), sig_vmap, sig_emap)?;
    let mut new_split = qsplit;
    let mut new_map = rho.compose_after_tight(&f.compose_after_tight(&sigma)?)?;
    // Collapse any pretrivial forest the tightening produced.
    loop {
        let pre: BTreeSet<EdgeId> = new_split
            .graph()
            .edge_ids()
            .filter(|&e| {
                new_map
                    .edge_image(OrientedEdge::forward(e))
                    .tightened()
                    .is_trivial()
            })
            .collect();
        if pre.is_empty() {
            break;
        }
        if has_cycle_edges(new_split.graph(), &pre) {
            return Err(Error::PropertyViolation("pretrivial subgraph has a cycle".into()));
        }
        let (qs, r2, s2) = contract_edges(&new_split, &pre)?;
        new_map = r2.compose_after_tight(&new_map.compose_after_tight(&s2)?)?;
        new_split = qs;
    }
    let m2 = {
        let g2 = new_split.graph();
        let mut order: Vec<EdgeId> = g2.edge_ids().collect();
        order.sort_by(|a, b| g2.edge_name(*a).cmp(g2.edge_name(*b)));
        let n = order.len();
        let mut m = IntMatrix::zero(n);
        for (j, &ej) in order.iter().enumerate() {
            for oe in new_map.edge_image(OrientedEdge::forward(ej)).edges() {
                let i = order.iter().position(|&e| e == oe.edge).unwrap();
                m[(i, j)] += 1;
            }
        }
        m
    };
    let lambda_after = if m2.is_primitive() {
        pf_certificate(&m2, 3 * m2.n + 3).ok()
    } else {
        None
    };
    if let (Some(before), Some(after)) = (&lambda_before, &lambda_after) {
        if after.lower > before.upper {
            return Err(Error::PropertyViolation(
                "valence-two homotopy increased the expansion factor".into(),
            ));
        }
    }
    Ok(Valence2Move {
        split: new_split,
        map: new_map,
        removed_vertex: g.vertex_name(v).to_string(),
        merged_edge: merged_name,
        lambda_before,
        lambda_after,
    })
}

// ---------------------------------------------------------------------------
// Analysis report
// ---------------------------------------------------------------------------

/// The quantitative exponent report of an EG-aperiodic train track map.
#[derive(Clone, Debug)]
pub struct ExponentReport {
    pub lambda: PfCertificate,
    pub kappa: usize,
    pub omega: usize,
    pub first_filling: Vec<(String, usize)>,
    pub mu: usize,
    pub uniform_crossing: bool,
    pub tau_lower: Option<Rational>,
}

pub fn analyze(tt: &TrainTrackMap, nu: Option<Rational>, env: &Envelope) -> Result<ExponentReport> {
    let m = tt.transition_matrix();
    if !m.is_primitive() {
        return Err(validation("transition matrix is not primitive (not EG-aperiodic)"));
    }
    let kappa = pf_exponent(tt)?;
    let lambda = pf_certificate(&m, kappa + m.n)?;
    let fe = filling_exponent(tt, env)?;
    let mu = 3 * kappa + fe.omega;
    let uniform_crossing = uniform_crossing_check(tt, kappa)?;
    let tau_lower = match nu {
        Some(nu) => Some(tau_lower_bound(kappa, fe.omega, nu)?),
        None => None,
    };
    Ok(ExponentReport {
        lambda,
        kappa,
        omega: fe.omega,
        first_filling: fe.first_filling,
        mu,
        uniform_crossing,
        tau_lower,
    })
}

/// The trivial collapse property at exponent `kappa`: the pullback of
/// any proper subgraph under `F^kappa` contains no full edge. A full
/// edge `e` lies in the pullback of `beta` exactly when every edge
/// crossed by the tile `F^kappa(e)` belongs to `beta`, so the property
/// holds for all proper `beta` at once iff every `kappa`-tile crosses
/// every edge orbit.
pub fn trivial_collapse_check(tt: &TrainTrackMap, kappa: usize) -> Result<bool> {
    let g = tt.split.graph();
    let all: BTreeSet<EdgeId> = g.edge_ids().collect();
    for e in tt.edge_order() {
        let tile = tt.tile(kappa, &tt.edge_path(e))?;
        let crossed: BTreeSet<EdgeId> = tile.edges().iter().map(|oe| oe.edge).collect();
        if crossed != all {
            return Ok(false);
        }
    }
    Ok(true)
}
