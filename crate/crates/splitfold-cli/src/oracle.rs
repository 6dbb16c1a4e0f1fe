//! Seeded random instance generation and the brute-force oracle
//! batches behind `oracle-suite` and the acceptance criteria.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use splitfold::folds::{
    bounded_cancellation_constant, component_complexity, fold_factorize, pullback_simplicial,
    push_tile, split_cancellation, subdivide,
};
use splitfold::graph::{EdgeId, MarkedGraph, OrientedEdge};
use splitfold::morphism::GraphMorphism;
use splitfold::path::EdgePath;
use splitfold::protoforest::{
    blowup_witness, expansion_enumerate, fills_quick, filling_support, interior_crossings,
    overlap_generators,
};
use splitfold::splitting::FreeSplitting;
use splitfold::subgroup::StallingsGraph;
use splitfold::word::{Basis, Letter, Word};
use splitfold::Envelope;
use std::collections::{BTreeSet, HashSet};

pub struct SuiteOutcome {
    pub cases: usize,
    pub violations: Vec<String>,
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// A random splitting of rank `n` drawn from the fixture families:
/// roses, subdivided roses, two-vertex graphs with a bridge, and theta
/// graphs, each with a random admissible collapsed subgraph.
pub fn random_splitting(rng: &mut ChaCha8Rng, n: usize) -> FreeSplitting {
    loop {
        let shape = rng.gen_range(0..4u8);
        let candidate = match shape {
            0 => rose_with_collapse(rng, n),
            1 => subdivided_rose(rng, n),
            2 => two_vertex(rng, n),
            _ => theta(rng, n),
        };
        if let Some(split) = candidate {
            return split;
        }
    }
}

// Collapsed subgraphs are drawn from the presentation shapes the
// witness construction supports: whole loop stars at a vertex (the
// sub-rose vertex groups of the worked examples) and tree edges such
// as bridges. A vertex carrying both collapsed and uncollapsed loops
// produces stabilizer configurations whose blowups are not expressible
// over the same letter marking; those inputs stay reachable through
// the API and report an explicit not-implemented error.

fn rose_with_collapse(rng: &mut ChaCha8Rng, n: usize) -> Option<FreeSplitting> {
    let names: Vec<String> = (0..n).map(letter_name).collect();
    let edges: Vec<(String, String, String)> = names
        .iter()
        .map(|x| (x.clone(), "v".to_string(), "v".to_string()))
        .collect();
    // Either a Grushko rose or the rose with one loop collapsed (a
    // cyclic vertex group, the continued-example shape). Larger mixed
    // vertex groups at a rose need the vertex group splitting machinery
    // the witness search deliberately does not implement.
    let mut collapsed = BTreeSet::new();
    if rng.gen_bool(0.5) && n == 2 {
        collapsed.insert(names[0].clone());
    }
    FreeSplitting::with_auto_marking(vec!["v".into()], edges, &collapsed, Basis::standard(n).ok()?).ok()
}

fn letter_name(i: usize) -> String {
    char::from(b'a' + i as u8).to_string()
}

fn subdivided_rose(rng: &mut ChaCha8Rng, n: usize) -> Option<FreeSplitting> {
    // Subdivide the first loop into 2 or 3 pieces.
    let parts = rng.gen_range(2..=3usize);
    let mut vertices = vec!["v".to_string()];
    let mut edges = Vec::new();
    let mut names = Vec::new();
    let mut prev = "v".to_string();
    for i in 0..parts {
        let next = if i + 1 == parts {
            "v".to_string()
        } else {
            let w = format!("w{i}");
            vertices.push(w.clone());
            w
        };
        let name = format!("a{i}");
        names.push(name.clone());
        edges.push((name, prev.clone(), next.clone()));
        prev = next;
    }
    for i in 1..n {
        let name = letter_name(i);
        edges.push((name, "v".to_string(), "v".to_string()));
    }
    // Collapse a proper tree piece of the subdivided loop, the whole
    // subdivided loop, or nothing.
    let mut collapsed: BTreeSet<String> = BTreeSet::new();
    match rng.gen_range(0..3u8) {
        0 => {}
        1 => {
            let k = rng.gen_range(1..parts);
            for name in names.iter().take(k) {
                collapsed.insert(name.clone());
            }
        }
        _ => {
            for name in &names {
                collapsed.insert(name.clone());
            }
        }
    }
    FreeSplitting::with_auto_marking(vertices, edges, &collapsed, Basis::standard(n).ok()?).ok()
}

fn two_vertex(rng: &mut ChaCha8Rng, n: usize) -> Option<FreeSplitting> {
    if n < 2 {
        return None;
    }
    let mut edges = Vec::new();
    let mut names = Vec::new();
    // Split the loops between the two vertices, plus a bridge.
    let at_p = rng.gen_range(1..n);
    for i in 0..n {
        let name = letter_name(i);
        let v = if i < at_p { "p" } else { "q" };
        names.push(name.clone());
        edges.push((name, v.to_string(), v.to_string()));
    }
    edges.push(("t".to_string(), "p".to_string(), "q".to_string()));
    // Collapse whole loop stars per vertex (the sub-rose vertex groups
    // of the worked examples) and, independently, the bridge.
    let mut collapsed: BTreeSet<String> = BTreeSet::new();
    if rng.gen_bool(0.4) {
        for (i, name) in names.iter().enumerate() {
            if i < at_p {
                collapsed.insert(name.clone());
            }
        }
    }
    if rng.gen_bool(0.4) {
        for (i, name) in names.iter().enumerate() {
            if i >= at_p {
                collapsed.insert(name.clone());
            }
        }
    }
    if rng.gen_bool(0.3) {
        collapsed.insert("t".to_string());
    }
    FreeSplitting::with_auto_marking(
        vec!["p".into(), "q".into()],
        edges,
        &collapsed,
        Basis::standard(n).ok()?,
    )
    .ok()
}

fn theta(rng: &mut ChaCha8Rng, n: usize) -> Option<FreeSplitting> {
    // n + 1 parallel edges between two vertices: rank n.
    let mut edges = Vec::new();
    let mut names = Vec::new();
    for i in 0..=n {
        let name = format!("e{i}");
        names.push(name.clone());
        edges.push((name, "p".to_string(), "q".to_string()));
    }
    // At most one parallel edge collapses (a tree component).
    let mut collapsed: BTreeSet<String> = BTreeSet::new();
    if rng.gen_bool(0.4) {
        collapsed.insert(names[rng.gen_range(0..names.len())].clone());
    }
    FreeSplitting::with_auto_marking(
        vec!["p".into(), "q".into()],
        edges,
        &collapsed,
        Basis::standard(n).ok()?,
    )
    .ok()
}

/// A random canonical path: an immersed walk trimmed to begin and end
/// with uncollapsed edges.
pub fn random_path(rng: &mut ChaCha8Rng, split: &FreeSplitting, max_len: usize) -> Option<EdgePath> {
    let g = split.graph();
    let verts: Vec<_> = g.vertices().collect();
    for _ in 0..60 {
        let start = verts[rng.gen_range(0..verts.len())];
        let len = rng.gen_range(2..=max_len.max(2));
        let mut edges: Vec<OrientedEdge> = Vec::new();
        let mut cur = start;
        for _ in 0..len {
            let mut dirs = g.directions(cur);
            if let Some(&last) = edges.last() {
                dirs.retain(|d| *d != last.reversed());
            }
            if dirs.is_empty() {
                break;
            }
            let d = dirs[rng.gen_range(0..dirs.len())];
            edges.push(d);
            cur = g.to(d);
        }
        if edges.is_empty() {
            continue;
        }
        let path = EdgePath::immersed(g, start, edges).ok()?;
        let Ok(trimmed) = split.project_path(&path) else {
            continue;
        };
        if trimmed.len() >= 1 && split.validate_canonical(&trimmed).is_ok() {
            return Some(trimmed);
        }
    }
    None
}

/// A random automorphism of the rank-n rose as a self-map, composed of
/// Nielsen moves and letter permutations.
pub fn random_rose_map(rng: &mut ChaCha8Rng, n: usize, moves: usize) -> (MarkedGraph, GraphMorphism) {
    let names: Vec<String> = (0..n).map(letter_name).collect();
    let graph = MarkedGraph::new(
        vec!["v".into()],
        names
            .iter()
            .map(|x| (x.clone(), "v".to_string(), "v".to_string()))
            .collect(),
        Basis::standard(n).unwrap(),
        None,
    )
    .unwrap();
    let mut current = GraphMorphism::identity(&graph);
    for _ in 0..moves {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let ei = graph.edge_by_name(&names[i]).unwrap();
        let ej = graph.edge_by_name(&names[j]).unwrap();
        let v = graph.base_vertex();
        let step = if i == j {
            // Inversion of one letter.
            let mut emap = Vec::new();
            for e in graph.edge_ids() {
                let oe = if e == ei {
                    OrientedEdge::backward(e)
                } else {
                    OrientedEdge::forward(e)
                };
                emap.push(EdgePath::immersed(&graph, v, vec![oe]).unwrap());
            }
            GraphMorphism::new(graph.clone(), graph.clone(), vec![v], emap).unwrap()
        } else {
            // a_i -> a_i a_j (or a_j^-1 a_i).
            let right = rng.gen_bool(0.5);
            let mut emap = Vec::new();
            for e in graph.edge_ids() {
                let path = if e == ei {
                    if right {
                        vec![OrientedEdge::forward(ei), OrientedEdge::forward(ej)]
                    } else {
                        vec![OrientedEdge::backward(ej), OrientedEdge::forward(ei)]
                    }
                } else {
                    vec![OrientedEdge::forward(e)]
                };
                emap.push(EdgePath::immersed(&graph, v, path).unwrap());
            }
            GraphMorphism::new(graph.clone(), graph.clone(), vec![v], emap).unwrap()
        };
        // Compose, tightening (the composite of automorphism reps can
        // backtrack on edges).
        current = match step.compose_after_tight(&current) {
            Ok(c) => c,
            Err(_) => current,
        };
    }
    (graph, current)
}

// ---------------------------------------------------------------------------
// Criterion suites
// ---------------------------------------------------------------------------

/// Filling criterion against the expansion enumeration oracle.
pub fn filling_criterion_suite(seed: u64, n_max: usize, len_max: usize, count: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let env = Envelope::default();
    let mut violations = Vec::new();
    let mut cases = 0;
    while cases < count {
        let n = rng.gen_range(2..=n_max.max(2));
        let split = random_splitting(&mut rng, n);
        if split.natural_structure().is_err() {
            continue;
        }
        let Some(path) = random_path(&mut rng, &split, len_max) else {
            continue;
        };
        cases += 1;
        let label = || {
            format!(
                "case {cases}: n={n} graph {:?} path {}",
                split.graph(),
                path.display(split.graph())
            )
        };
        let Ok((is_filling, _, _)) = fills_quick(&split, &path, &env) else {
            violations.push(format!("{}: filling decision errored", label()));
            continue;
        };
        if is_filling {
            // Soundness: no expansion with at most 2 extra natural edges
            // may exhibit a missed orbit.
            let stream = match expansion_enumerate(&split, 2) {
                Ok(s) => s,
                Err(e) => {
                    violations.push(format!("{}: enumeration errored: {e}", label()));
                    continue;
                }
            };
            for exp in &stream.expansions {
                let Ok(lifted) = exp.lift_path(&path) else {
                    violations.push(format!("{}: lift failed", label()));
                    continue;
                };
                let Ok(nat) = exp.total.natural_structure() else {
                    continue;
                };
                let rep = interior_crossings(&exp.total, &nat, &lifted).unwrap();
                if !rep.missing.is_empty() {
                    violations.push(format!(
                        "{}: filling path missed an orbit in an expansion with {} edges",
                        label(),
                        exp.total.graph().edge_count()
                    ));
                }
            }
        } else {
            // Completeness: a verified witness must exist.
            let (_, crossings, _) = fills_quick(&split, &path, &env).unwrap();
            if crossings.all_crossed() {
                match blowup_witness(&split, &path, &env) {
                    Ok(w) => {
                        if w.expansion.verify().is_err() {
                            violations.push(format!("{}: witness failed verification", label()));
                        }
                    }
                    Err(e) => violations.push(format!("{}: no witness: {e}", label())),
                }
            }
            // When a crossing is missing the trivial expansion witnesses;
            // nothing further to check.
        }
    }
    SuiteOutcome { cases, violations }
}

/// Overlap chain reachability against subgroup membership of the
/// overlap generators.
pub fn overlap_stabilizer_suite(seed: u64, len_max: usize, count: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut cases = 0;
    while cases < count {
        let split = random_splitting(&mut rng, 2);
        if split.natural_structure().is_err() {
            continue;
        }
        let Some(path) = random_path(&mut rng, &split, len_max.min(6)) else {
            continue;
        };
        cases += 1;
        let label = || format!("case {cases}: path {}", path.display(split.graph()));
        let radius = 2 * path.len();
        // Tree-edge keys of the path's standard lift.
        let pre = path.prefix_words(split.graph());
        let positions: Vec<usize> = split.t_edge_positions(&path);
        let keys: Vec<(EdgeId, Word)> = positions.iter().map(|&k| split.ukey(&path, &pre, k)).collect();
        // Independent single-overlap set: h with h . alpha sharing an
        // unoriented tree edge with alpha, i.e. h = c1 c2^-1 over
        // same-edge key pairs.
        let mut single: BTreeSet<Word> = BTreeSet::new();
        for (e1, c1) in &keys {
            for (e2, c2) in &keys {
                if e1 == e2 {
                    let h = c1.mul(&c2.inverse());
                    if !h.is_empty() {
                        single.insert(h);
                    }
                }
            }
        }
        // Cross-check the overlap generator computation itself.
        let o = overlap_generators(&split, &path).unwrap();
        let oset: BTreeSet<Word> = o.generators.iter().cloned().collect();
        if oset != single {
            violations.push(format!("{}: overlap generators disagree with key matching", label()));
            continue;
        }
        // Chain reachability within the comparison ball, over packed
        // word keys. Overlap chains may pass through intermediates
        // slightly outside the ball (reaching a deep power can require
        // a detour), so members missed by the direct saturation get a
        // second, bidirectional chain search with bounded slack before
        // counting as violations.
        let steps: Vec<PWord> = single.iter().map(PWord::from_word).collect();
        let reach_from = |start: &Word, inner_radius: usize, cap: usize| -> HashSet<u64> {
            let mut reached: HashSet<u64> = HashSet::new();
            let start = PWord::from_word(start);
            let mut frontier = vec![start];
            reached.insert(start.key());
            while let Some(g) = frontier.pop() {
                if reached.len() >= cap {
                    break;
                }
                for s in &steps {
                    if let Some(next) = g.mul(s, inner_radius) {
                        if reached.insert(next.key()) {
                            frontier.push(next);
                        }
                    }
                }
            }
            reached
        };
        let reached = reach_from(&Word::identity(), radius, 2_000_000);
        // Backward search meeting the forward set: a chain from 1 to g
        // exists iff the saturation from g (the step set is symmetric)
        // touches the forward saturation.
        let meets_forward = |g: &Word, inner_radius: usize, cap: usize| -> bool {
            let start = PWord::from_word(g);
            if reached.contains(&start.key()) {
                return true;
            }
            let mut seen: HashSet<u64> = HashSet::new();
            seen.insert(start.key());
            let mut frontier = vec![start];
            while let Some(x) = frontier.pop() {
                if seen.len() >= cap {
                    return false;
                }
                for s in &steps {
                    if let Some(next) = x.mul(s, inner_radius) {
                        let key = next.key();
                        if reached.contains(&key) {
                            return true;
                        }
                        if seen.insert(key) {
                            frontier.push(next);
                        }
                    }
                }
            }
            false
        };
        // Membership side.
        let h = StallingsGraph::fold(split.basis(), &o.generators);
        let mut ball = Vec::new();
        enumerate_ball(split.basis(), radius, &mut ball);
        for g in ball {
            let member = h.contains(&g);
            let reach = if member {
                meets_forward(&g, radius + 4, 200_000)
            } else {
                reached.contains(&PWord::from_word(&g).key())
            };
            if member != reach {
                violations.push(format!(
                    "{}: ball element {} member={member} reachable={reach}",
                    label(),
                    g.display(split.basis())
                ));
                break;
            }
        }
    }
    SuiteOutcome { cases, violations }
}

/// A reduced word on the stack: letter codes with explicit length,
/// capacity 20 letters — enough for the oracle's balls.
#[derive(Clone, Copy)]
struct PWord {
    len: u8,
    letters: [u8; 20],
}

impl PWord {
    fn from_word(w: &Word) -> PWord {
        assert!(w.len() <= 20);
        let mut letters = [0u8; 20];
        for (i, &l) in w.letters().iter().enumerate() {
            letters[i] = l.code() as u8;
        }
        PWord {
            len: w.len() as u8,
            letters,
        }
    }

    /// Reduced product, `None` when the result exceeds `max` letters.
    fn mul(&self, other: &PWord, max: usize) -> Option<PWord> {
        let mut out = *self;
        for i in 0..other.len as usize {
            let l = other.letters[i];
            if out.len > 0 && out.letters[out.len as usize - 1] == l ^ 1 {
                out.len -= 1;
            } else {
                if out.len as usize >= max.min(20) {
                    return None;
                }
                out.letters[out.len as usize] = l;
                out.len += 1;
            }
        }
        Some(out)
    }

    /// Packed key: 3 bits per letter plus the length.
    fn key(&self) -> u64 {
        let mut out = self.len as u64;
        for i in 0..self.len as usize {
            out = (out << 3) | (self.letters[i] as u64 + 1);
        }
        out
    }
}

fn enumerate_ball(basis: &Basis, radius: usize, out: &mut Vec<Word>) {
    fn rec(basis: &Basis, radius: usize, cur: &mut Vec<Letter>, out: &mut Vec<Word>) {
        out.push(Word::from_letters(cur.iter().copied()));
        if cur.len() == radius {
            return;
        }
        for i in 0..basis.rank() as u16 {
            for l in [Letter::positive(i), Letter::positive(i).inverse()] {
                if cur.last() == Some(&l.inverse()) {
                    continue;
                }
                cur.push(l);
                rec(basis, radius, cur, out);
                cur.pop();
            }
        }
    }
    let mut cur = Vec::new();
    rec(basis, radius, &mut cur, out);
}

/// Kurosh rank monotonicity along fold paths and under path nesting,
/// plus component complexity monotonicity under pullbacks.
pub fn monotonicity_suite(seed: u64, n_max: usize, count: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let env = Envelope::default();
    let mut violations = Vec::new();
    let mut cases = 0;

    // Fold traces.
    for _ in 0..count {
        let n = rng.gen_range(2..=n_max.max(2));
        let moves = rng.gen_range(1..=4);
        let (graph, f) = random_rose_map(&mut rng, n, moves);
        if f.has_trivial_image() {
            continue;
        }
        let Ok(seq) = fold_factorize(&f) else { continue };
        cases += 1;
        for e in graph.edge_ids() {
            let tile = EdgePath::immersed(&graph, graph.from(OrientedEdge::forward(e)), vec![OrientedEdge::forward(e)]).unwrap();
            match push_tile(&seq, &tile, &env) {
                Ok(trace) => {
                    for (i, w) in trace.entries.windows(2).enumerate() {
                        if w[0].kurosh > w[1].kurosh {
                            violations.push(format!("case {cases}: rank dropped along a fold path"));
                            continue;
                        }
                        // Rank equality along a fold step must coincide
                        // with conjugacy of the support factors, after
                        // transporting through the fold's identification
                        // (intermediate graphs carry their own markings).
                        let fs_a = filling_support(&seq.splittings[i], &w[0].tile, &env);
                        let fs_b = filling_support(&seq.splittings[i + 1], &w[1].tile, &env);
                        if let (Ok(fa), Ok(fb)) = (fs_a, fs_b) {
                            let psi = seq.folds[i].induced_endomorphism();
                            let transported: Vec<Word> = fa
                                .support
                                .factor
                                .generators()
                                .iter()
                                .map(|g| psi.apply(g))
                                .collect();
                            let fa_t = StallingsGraph::fold(split_basis(&seq.splittings[i + 1]), &transported);
                            let rank_eq = w[0].kurosh == w[1].kurosh;
                            let conj_eq = fa_t.conjugate_eq(&fb.support.factor);
                            if rank_eq != conj_eq {
                                violations.push(format!(
                                    "case {cases}: rank equality and support conjugacy disagree at step {i}"
                                ));
                            }
                        }
                    }
                }
                Err(err) => violations.push(format!("case {cases}: trace failed: {err}")),
            }
        }
    }

    // Nesting within one splitting, with the equality propagation on
    // covering instances.
    let mut nest_cases = 0;
    while nest_cases < count {
        let n = rng.gen_range(2..=n_max.max(2));
        let split = random_splitting(&mut rng, n);
        if split.natural_structure().is_err() {
            continue;
        }
        let Some(big) = random_path(&mut rng, &split, 8) else { continue };
        if big.len() < 2 {
            continue;
        }
        let i = rng.gen_range(0..big.len() - 1);
        let j = rng.gen_range(i + 1..=big.len());
        let sub = big.subpath(split.graph(), i, j);
        let Ok(sub) = split.project_path(&sub) else { continue };
        nest_cases += 1;
        cases += 1;
        let fs_sub = filling_support(&split, &sub, &env);
        let fs_big = filling_support(&split, &big, &env);
        let (Ok(fs_sub), Ok(fs_big)) = (fs_sub, fs_big) else {
            violations.push(format!("nesting case {nest_cases}: support errored"));
            continue;
        };
        if fs_sub.kurosh > fs_big.kurosh {
            violations.push(format!("nesting case {nest_cases}: rank not monotone"));
        }
        if !fs_sub.support.factor.conjugate_into(&fs_big.support.factor) {
            violations.push(format!("nesting case {nest_cases}: support not nested"));
        }
        let (Ok((sub_fills, _, _)), Ok((big_fills, _, _))) =
            (fills_quick(&split, &sub, &env), fills_quick(&split, &big, &env))
        else {
            continue;
        };
        if sub_fills && !big_fills {
            violations.push(format!("nesting case {nest_cases}: filling not inherited"));
        }
        // Equality propagation when both covering forests are everything.
        let covers = |p: &EdgePath| {
            let used: BTreeSet<EdgeId> = p.edges().iter().map(|oe| oe.edge).collect();
            split
                .uncollapsed_edges()
                .iter()
                .all(|e| used.contains(e))
        };
        if covers(&sub) && covers(&big) && fs_sub.kurosh == fs_big.kurosh {
            if !fs_sub.support.factor.conjugate_eq(&fs_big.support.factor) {
                violations.push(format!(
                    "nesting case {nest_cases}: rank equality without support equality on covering paths"
                ));
            }
        }
    }

    // Component complexity under pullback.
    for k in 0..count {
        let n = rng.gen_range(2..=n_max.max(2));
        let moves = rng.gen_range(1..=3);
        let (graph, f) = random_rose_map(&mut rng, n, moves);
        if f.has_trivial_image() {
            continue;
        }
        let Ok((_, f2)) = subdivide(&f) else { continue };
        cases += 1;
        let all: Vec<EdgeId> = graph.edge_ids().collect();
        let mut beta = BTreeSet::new();
        for &e in &all {
            if rng.gen_bool(0.5) {
                beta.insert(e);
            }
        }
        if beta.is_empty() {
            beta.insert(all[0]);
        }
        let Ok(pulled) = pullback_simplicial(&f2, &beta) else { continue };
        if pulled.is_empty() {
            continue;
        }
        let cod = FreeSplitting::new(graph.clone(), BTreeSet::new()).unwrap();
        let dom = FreeSplitting::new(f2.domain().clone(), BTreeSet::new()).unwrap();
        let c1 = component_complexity(&cod, &beta).unwrap();
        let c2 = component_complexity(&dom, &pulled).unwrap();
        if c2 < c1 {
            violations.push(format!("pullback case {k}: component complexity dropped"));
        }
    }

    SuiteOutcome { cases, violations }
}

/// Bounded cancellation over random simplicial homotopy equivalences.
pub fn cancellation_suite(seed: u64, n_max: usize, count: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut cases = 0;
    while cases < count {
        let n = rng.gen_range(2..=n_max.max(2));
        let moves = rng.gen_range(0..=4);
        let (_, f) = random_rose_map(&mut rng, n, moves);
        if f.has_trivial_image() {
            continue;
        }
        let Ok((_, f2)) = subdivide(&f) else { continue };
        cases += 1;
        let c = match bounded_cancellation_constant(&f2) {
            Ok(c) => c,
            Err(e) => {
                violations.push(format!("case {cases}: constant errored: {e}"));
                continue;
            }
        };
        let edge_bijective = f2.domain().edge_count() == f2.codomain().edge_count();
        if (c == 0) != edge_bijective {
            violations.push(format!("case {cases}: zero constant vs edge bijectivity mismatch"));
        }
        let dom = f2.domain().clone();
        for _ in 0..20 {
            let Some(p) = random_reduced_path(&mut rng, &dom, 10) else { continue };
            if p.len() < 2 {
                continue;
            }
            let cut = rng.gen_range(1..p.len());
            let p1 = p.subpath(&dom, 0, cut);
            let p2 = p.subpath(&dom, cut, p.len());
            match split_cancellation(&f2, &p1, &p2) {
                Ok(cancel) => {
                    if cancel > c {
                        violations.push(format!(
                            "case {cases}: cancellation {cancel} exceeds constant {c}"
                        ));
                    }
                }
                Err(e) => violations.push(format!("case {cases}: cancellation errored: {e}")),
            }
        }
    }
    SuiteOutcome { cases, violations }
}

fn random_reduced_path(rng: &mut ChaCha8Rng, g: &MarkedGraph, max_len: usize) -> Option<EdgePath> {
    let verts: Vec<_> = g.vertices().collect();
    let start = verts[rng.gen_range(0..verts.len())];
    let mut edges: Vec<OrientedEdge> = Vec::new();
    let mut cur = start;
    let len = rng.gen_range(1..=max_len);
    for _ in 0..len {
        let mut dirs = g.directions(cur);
        if let Some(&last) = edges.last() {
            dirs.retain(|d: &OrientedEdge| *d != last.reversed());
        }
        if dirs.is_empty() {
            break;
        }
        let d = dirs[rng.gen_range(0..dirs.len())];
        edges.push(d);
        cur = g.to(d);
    }
    EdgePath::immersed(g, start, edges).ok()
}

fn split_basis(split: &FreeSplitting) -> &Basis {
    split.basis()
}
