//! Shared fixtures: the standard splittings and paths exercised across
//! the integration suites.

use splitfold::graph::{MarkedGraph, OrientedEdge};
use splitfold::path::EdgePath;
use splitfold::splitting::FreeSplitting;
use splitfold::word::{Basis, Word};
use std::collections::BTreeSet;

pub fn word(basis: &Basis, s: &str) -> Word {
    let mut letters = Vec::new();
    for tok in s.split_whitespace() {
        let (name, inv) = match tok.strip_suffix("^-1") {
            Some(n) => (n, true),
            None => (tok, false),
        };
        let l = basis
            .letter_by_name(name)
            .unwrap_or_else(|| panic!("unknown letter {name}"));
        letters.push(if inv { l.inverse() } else { l });
    }
    Word::from_letters(letters)
}

/// Parses a path like "a b^-1 e" over edge names of the graph.
pub fn path(split: &FreeSplitting, s: &str) -> EdgePath {
    let g = split.graph();
    let mut edges = Vec::new();
    for tok in s.split_whitespace() {
        let (name, inv) = match tok.strip_suffix("^-1") {
            Some(n) => (n, true),
            None => (tok, false),
        };
        let e = g
            .edge_by_name(name)
            .unwrap_or_else(|| panic!("unknown edge {name}"));
        edges.push(if inv {
            OrientedEdge::backward(e)
        } else {
            OrientedEdge::forward(e)
        });
    }
    let start = g.from(edges[0]);
    EdgePath::immersed(g, start, edges).expect("immersed path")
}

/// The rank-2 rose with loops a, b.
pub fn rose2() -> FreeSplitting {
    FreeSplitting::with_auto_marking(
        vec!["v".into()],
        vec![
            ("a".into(), "v".into(), "v".into()),
            ("b".into(), "v".into(), "v".into()),
        ],
        &BTreeSet::new(),
        Basis::standard(2).unwrap(),
    )
    .unwrap()
}

/// The rose with the b loop collapsed: a single natural edge orbit with
/// nontrivial stabilizers at its vertex.
pub fn rose2_collapse_b() -> FreeSplitting {
    FreeSplitting::with_auto_marking(
        vec!["v".into()],
        vec![
            ("a".into(), "v".into(), "v".into()),
            ("b".into(), "v".into(), "v".into()),
        ],
        &["b".to_string()].into_iter().collect(),
        Basis::standard(2).unwrap(),
    )
    .unwrap()
}

/// The rose with the a loop subdivided into a1 a2 a3.
pub fn subdivided_rose2() -> FreeSplitting {
    FreeSplitting::with_auto_marking(
        vec!["v".into(), "w1".into(), "w2".into()],
        vec![
            ("a1".into(), "v".into(), "w1".into()),
            ("a2".into(), "w1".into(), "w2".into()),
            ("a3".into(), "w2".into(), "v".into()),
            ("b".into(), "v".into(), "v".into()),
        ],
        &BTreeSet::new(),
        Basis::standard(2).unwrap(),
    )
    .unwrap()
}

/// Two roses joined by an edge: loops a, b at p; loops c, d at q; the
/// connecting edge e; with all four loops collapsed. A single natural
/// edge orbit whose endpoints carry rank-two stabilizers.
pub fn g4_collapsed() -> FreeSplitting {
    FreeSplitting::with_auto_marking(
        vec!["p".into(), "q".into()],
        vec![
            ("a".into(), "p".into(), "p".into()),
            ("b".into(), "p".into(), "p".into()),
            ("c".into(), "q".into(), "q".into()),
            ("d".into(), "q".into(), "q".into()),
            ("e".into(), "p".into(), "q".into()),
        ],
        &["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect(),
        Basis::standard(4).unwrap(),
    )
    .unwrap()
}

/// Barbell: loops a at p and b at q joined by the bridge e.
pub fn barbell() -> FreeSplitting {
    FreeSplitting::with_auto_marking(
        vec!["p".into(), "q".into()],
        vec![
            ("a".into(), "p".into(), "p".into()),
            ("b".into(), "q".into(), "q".into()),
            ("e".into(), "p".into(), "q".into()),
        ],
        &BTreeSet::new(),
        Basis::standard(2).unwrap(),
    )
    .unwrap()
}

/// Rose graph helper for train track maps.
pub fn rose_graph(rank: usize) -> MarkedGraph {
    let names: Vec<String> = (0..rank)
        .map(|i| char::from(b'a' + i as u8).to_string())
        .collect();
    MarkedGraph::new(
        vec!["v".into()],
        names
            .iter()
            .map(|n| (n.clone(), "v".to_string(), "v".to_string()))
            .collect(),
        Basis::standard(rank).unwrap(),
        None,
    )
    .unwrap()
}

/// Builds a graph self-map from edge-name words, fixing every vertex
/// that the images pin down (vertex images are inferred from the image
/// paths' endpoints; unconstrained vertices map to the image start).
pub fn self_map(graph: &MarkedGraph, images: &[(&str, &str)]) -> splitfold::morphism::GraphMorphism {
    use splitfold::morphism::GraphMorphism;
    use std::collections::BTreeMap;
    let mut edge_words: BTreeMap<splitfold::EdgeId, Vec<OrientedEdge>> = BTreeMap::new();
    for (name, word) in images {
        let e = graph.edge_by_name(name).expect("edge");
        let mut edges = Vec::new();
        for tok in word.split_whitespace() {
            let (n, inv) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let x = graph.edge_by_name(n).expect("image edge");
            edges.push(if inv {
                OrientedEdge::backward(x)
            } else {
                OrientedEdge::forward(x)
            });
        }
        edge_words.insert(e, edges);
    }
    // Infer vertex images from image path endpoints.
    let mut vmap: BTreeMap<splitfold::VertexId, splitfold::VertexId> = BTreeMap::new();
    for (&e, w) in &edge_words {
        let (from, to) = graph.endpoints(e);
        if let Some(&first) = w.first() {
            vmap.insert(from, graph.from(first));
            vmap.insert(to, graph.to(*w.last().unwrap()));
        }
    }
    for v in graph.vertices() {
        vmap.entry(v).or_insert_with(|| graph.base_vertex());
    }
    GraphMorphism::from_edge_words(graph, graph, vmap, edge_words).expect("valid self map")
}
