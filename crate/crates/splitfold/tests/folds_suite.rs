//! Fold factorization, tile pushing, pullbacks, component complexity
//! and bounded cancellation.

mod common;

use common::{barbell, path, rose2, rose_graph, self_map};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use splitfold::folds::{
    bounded_cancellation_constant, component_complexity, fold_factorize, is_foldable, pullback,
    pullback_simplicial, push_tile, split_cancellation, subdivide,
};
use splitfold::graph::{MarkedGraph, OrientedEdge};
use splitfold::morphism::GraphMorphism;
use splitfold::path::EdgePath;
use splitfold::word::Basis;
use splitfold::Envelope;
use std::collections::BTreeSet;

#[test]
fn identity_is_foldable_and_factors_trivially() {
    let g = rose_graph(2);
    let id = GraphMorphism::identity(&g);
    assert!(is_foldable(&id).unwrap().0);
    let seq = fold_factorize(&id).unwrap();
    assert!(seq.is_empty());
    assert_eq!(seq.composite().unwrap(), id);
}

#[test]
fn nielsen_map_needs_one_subdivision_and_one_fold() {
    let g = rose_graph(2);
    // a -> ab, b -> b.
    let f = self_map(&g, &[("a", "a b"), ("b", "b")]);
    assert!(is_foldable(&f).unwrap().0);
    let seq = fold_factorize(&f).unwrap();
    assert_eq!(seq.len(), 1);
    assert_eq!(seq.composite().unwrap(), f);
}

#[test]
fn fibonacci_factorization_composes_back() {
    let g = rose_graph(2);
    let f = self_map(&g, &[("a", "a b"), ("b", "a")]);
    let seq = fold_factorize(&f).unwrap();
    assert!(seq.len() >= 1);
    assert_eq!(seq.composite().unwrap(), f);
    // Every intermediate is foldable.
    for fold in &seq.folds {
        assert!(is_foldable(fold).unwrap().0);
    }
}

#[test]
fn non_equivalence_is_rejected() {
    let g = rose_graph(2);
    // a -> b, b -> b kills the fundamental group.
    let f = self_map(&g, &[("a", "b"), ("b", "b")]);
    assert!(fold_factorize(&f).is_err());
}

#[test]
fn valence_one_vertex_is_not_foldable() {
    let g = MarkedGraph::new(
        vec!["v".into(), "w".into()],
        vec![
            ("a".into(), "v".into(), "v".into()),
            ("b".into(), "v".into(), "v".into()),
            ("h".into(), "v".into(), "w".into()),
        ],
        Basis::standard(2).unwrap(),
        None,
    )
    .unwrap();
    let id = GraphMorphism::identity(&g);
    let (ok, bad) = is_foldable(&id).unwrap();
    assert!(!ok);
    assert_eq!(g.vertex_name(bad.unwrap()), "w");
}

#[test]
fn push_tile_along_fibonacci_iterates() {
    let g = rose_graph(2);
    let f = self_map(&g, &[("a", "a b"), ("b", "a")]);
    // F^3 as a composite; its factorization pushes the a edge to abaab.
    let f2 = f.compose_after(&f).unwrap();
    let f3 = f.compose_after(&f2).unwrap();
    let seq = fold_factorize(&f3).unwrap();
    let a = g.edge_by_name("a").unwrap();
    let tile = EdgePath::immersed(&g, g.base_vertex(), vec![OrientedEdge::forward(a)]).unwrap();
    let trace = push_tile(&seq, &tile, &Envelope::default()).unwrap();
    // Nondecreasing Kurosh ledger with final entry pushed through the
    // terminal map equal to the F^3 tile.
    for w in trace.entries.windows(2) {
        assert!(w[0].kurosh <= w[1].kurosh);
    }
    let last = &trace.entries.last().unwrap().tile;
    let final_tile = seq.terminal.map_path(last).unwrap();
    assert_eq!(final_tile.display(&g), "a b a a b");
    // Once a tile fills, later tiles fill: rank never drops from n.
    let n = 2;
    let mut seen_full = false;
    for e in &trace.entries {
        if seen_full {
            assert_eq!(e.kurosh, n);
        }
        if e.kurosh == n {
            seen_full = true;
        }
    }
}

#[test]
fn pullback_of_identity_and_whole_graph() {
    let g = rose_graph(2);
    let id = GraphMorphism::identity(&g);
    let a = g.edge_by_name("a").unwrap();
    let beta: BTreeSet<_> = [a].into_iter().collect();
    let pb = pullback(&id, &beta).unwrap();
    assert_eq!(pb.edges.len(), 1);
    let all: BTreeSet<_> = g.edge_ids().collect();
    let pb2 = pullback(&id, &all).unwrap();
    assert_eq!(pb2.edges.len(), g.edge_count());
}

#[test]
fn pullback_of_a_under_fibonacci() {
    let g = rose_graph(2);
    let f = self_map(&g, &[("a", "a b"), ("b", "a")]);
    let a = g.edge_by_name("a").unwrap();
    let beta: BTreeSet<_> = [a].into_iter().collect();
    let pb = pullback(&f, &beta).unwrap();
    // Subdivided domain: a splits into a.0 (over a) and a.1 (over b);
    // b maps over a. The pullback is {a.0, b}.
    let dom = pb.simplicial.domain();
    let names: BTreeSet<String> = pb
        .edges
        .iter()
        .map(|&e| dom.edge_name(e).to_string())
        .collect();
    assert_eq!(names, ["a.0", "b"].iter().map(|s| s.to_string()).collect());
}

#[test]
fn pullback_composes_functorially_along_folds() {
    let g = rose_graph(2);
    let f = self_map(&g, &[("a", "a b"), ("b", "a")]);
    let seq = fold_factorize(&f).unwrap();
    if seq.folds.is_empty() {
        return;
    }
    // Pull the terminal codomain's a edge back one fold at a time, then
    // all at once through the composite of the folds.
    let last = seq.splittings.last().unwrap().graph();
    let beta: BTreeSet<_> = [last.edge_by_name(last.edge_name(last.edge_ids().next().unwrap())).unwrap()]
        .into_iter()
        .collect();
    let mut stepwise = beta.clone();
    for fold in seq.folds.iter().rev() {
        stepwise = pullback_simplicial(fold, &stepwise).unwrap();
    }
    let mut composite = seq.folds[0].clone();
    for fold in &seq.folds[1..] {
        composite = fold.compose_after(&composite).unwrap();
    }
    let direct = pullback_simplicial(&composite, &beta).unwrap();
    assert_eq!(stepwise, direct);
}

#[test]
fn component_complexity_examples() {
    let rose = rose2();
    let a: BTreeSet<_> = [rose.graph().edge_by_name("a").unwrap()].into_iter().collect();
    assert_eq!(component_complexity(&rose, &a).unwrap(), 1);
    let both: BTreeSet<_> = rose.graph().edge_ids().collect();
    assert_eq!(component_complexity(&rose, &both).unwrap(), 1);
    let bar = barbell();
    let loops: BTreeSet<_> = [
        bar.graph().edge_by_name("a").unwrap(),
        bar.graph().edge_by_name("b").unwrap(),
    ]
    .into_iter()
    .collect();
    assert_eq!(component_complexity(&bar, &loops).unwrap(), 2);
    assert!(component_complexity(&bar, &BTreeSet::new()).is_err());
}

#[test]
fn component_complexity_monotone_under_pullback() {
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    let g = rose_graph(2);
    let maps = [
        self_map(&g, &[("a", "a b"), ("b", "a")]),
        self_map(&g, &[("a", "a b"), ("b", "b")]),
        self_map(&g, &[("a", "a b a"), ("b", "a b")]),
    ];
    for f in &maps {
        let (_, f2) = subdivide(f).unwrap();
        let dom = grushko(f2.domain());
        for _ in 0..10 {
            // Random nonempty subgraph of the codomain.
            let all: Vec<_> = g.edge_ids().collect();
            let mut beta = BTreeSet::new();
            for &e in &all {
                if rng.gen_bool(0.5) {
                    beta.insert(e);
                }
            }
            if beta.is_empty() {
                beta.insert(all[0]);
            }
            let pulled = pullback_simplicial(&f2, &beta).unwrap();
            if pulled.is_empty() {
                continue;
            }
            let cod_split = rose2();
            let c_cod = component_complexity(&cod_split, &beta).unwrap();
            let c_dom = component_complexity(&dom, &pulled).unwrap();
            assert!(c_dom >= c_cod, "pullback complexity must not drop");
        }
    }
}

fn grushko(g: &MarkedGraph) -> splitfold::FreeSplitting {
    splitfold::FreeSplitting::new(g.clone(), BTreeSet::new()).unwrap()
}

#[test]
fn bounded_cancellation_of_identity_is_zero() {
    let g = rose_graph(2);
    let id = GraphMorphism::identity(&g);
    assert_eq!(bounded_cancellation_constant(&id).unwrap(), 0);
}

#[test]
fn barbell_to_rose_has_constant_one() {
    // Three edges against two, simplicial, induced map the identity.
    let bar = barbell();
    let rose = rose2();
    let bg = bar.graph();
    let rg = rose.graph();
    let v = rg.base_vertex();
    let vmap = vec![v, v];
    let mk = |name: &str| {
        let e = rg.edge_by_name(name).unwrap();
        EdgePath::immersed(rg, v, vec![OrientedEdge::forward(e)]).unwrap()
    };
    let f = GraphMorphism::new(
        bg.clone(),
        rg.clone(),
        vmap,
        vec![mk("a"), mk("b"), mk("b")],
    )
    .unwrap();
    assert!(f.is_homotopy_equivalence());
    assert_eq!(bounded_cancellation_constant(&f).unwrap(), 1);
}

#[test]
fn subdivided_nielsen_has_constant_one_and_respects_it() {
    let g = rose_graph(2);
    let f = self_map(&g, &[("a", "a b"), ("b", "b")]);
    let (_, f2) = subdivide(&f).unwrap();
    let c = bounded_cancellation_constant(&f2).unwrap();
    assert_eq!(c, 1);
    // Cancellation of random split paths stays within c.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dom = f2.domain();
    for _ in 0..50 {
        let p = random_reduced_path(&mut rng, dom, 8);
        if p.len() < 2 {
            continue;
        }
        let cut = rng.gen_range(1..p.len());
        let p1 = p.subpath(dom, 0, cut);
        let p2 = p.subpath(dom, cut, p.len());
        let cancel = split_cancellation(&f2, &p1, &p2).unwrap();
        assert!(cancel <= c, "cancellation {cancel} exceeds constant {c}");
    }
}

fn random_reduced_path(rng: &mut ChaCha8Rng, g: &MarkedGraph, max_len: usize) -> EdgePath {
    let verts: Vec<_> = g.vertices().collect();
    let start = verts[rng.gen_range(0..verts.len())];
    let mut edges = Vec::new();
    let mut cur = start;
    let len = rng.gen_range(1..=max_len);
    for _ in 0..len {
        let mut dirs = g.directions(cur);
        if let Some(last) = edges.last() {
            let back: OrientedEdge = *last;
            dirs.retain(|d| *d != back.reversed());
        }
        if dirs.is_empty() {
            break;
        }
        let d = dirs[rng.gen_range(0..dirs.len())];
        edges.push(d);
        cur = g.to(d);
    }
    EdgePath::immersed(g, start, edges).unwrap()
}
