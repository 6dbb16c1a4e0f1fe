//! Natural structure, path lifting and translate alignment on the
//! standard fixtures.

mod common;

use common::{g4_collapsed, path, rose2, rose2_collapse_b, subdivided_rose2, word};
use splitfold::splitting::QVertex;

#[test]
fn rose_natural_structure_is_two_loops() {
    let s = rose2();
    let nat = s.natural_structure().unwrap();
    assert_eq!(nat.edges.len(), 2);
    assert_eq!(nat.natural_vertices.len(), 1);
    let words: Vec<String> = nat.edges.iter().map(|e| e.lift.display(s.graph())).collect();
    assert_eq!(words, vec!["a", "b"]);
}

#[test]
fn subdivided_rose_has_two_natural_edges() {
    let s = subdivided_rose2();
    let nat = s.natural_structure().unwrap();
    assert_eq!(nat.edges.len(), 2);
    let words: Vec<String> = nat.edges.iter().map(|e| e.lift.display(s.graph())).collect();
    assert!(words.contains(&"a1 a2 a3".to_string()) || words.contains(&"a3^-1 a2^-1 a1^-1".to_string()));
    assert!(words.contains(&"b".to_string()));
    // Natural vertex: only v (w1, w2 have valence two).
    assert_eq!(nat.natural_vertices.len(), 1);
}

#[test]
fn g4_single_natural_orbit_with_stabilized_endpoints() {
    let s = g4_collapsed();
    let nat = s.natural_structure().unwrap();
    assert_eq!(nat.edges.len(), 1);
    assert_eq!(nat.edges[0].lift.display(s.graph()), "e");
    assert_eq!(nat.natural_vertices.len(), 2);
    for &q in &nat.natural_vertices {
        assert!(s.q_stabilizer_rank(q) == 2);
        assert!(matches!(q, QVertex::Comp(_)));
    }
}

#[test]
fn collapsed_rose_single_natural_edge() {
    let s = rose2_collapse_b();
    let nat = s.natural_structure().unwrap();
    assert_eq!(nat.edges.len(), 1);
    assert_eq!(nat.edges[0].lift.display(s.graph()), "a");
    // The vertex class is stabilized by <b>.
    assert_eq!(s.q_stabilizer_rank(nat.natural_vertices[0]), 1);
}

#[test]
fn lift_path_validates_canonical_encoding() {
    let s = rose2_collapse_b();
    // Begins with a collapsed edge: malformed.
    let bad = path(&s, "b a");
    assert!(s.lift_path(&bad).is_err());
    let good = path(&s, "a a a");
    assert_eq!(s.lift_path(&good).unwrap(), good);
    // Projection trims collapsed prefix/suffix.
    let trimmed = s.project_path(&bad).unwrap();
    assert_eq!(trimmed.display(s.graph()), "a");
}

#[test]
fn g4_new_example_path_is_canonical() {
    let s = g4_collapsed();
    let alpha = path(&s, "e c d c^-1 d^-1 e^-1 a b a^-1 b^-1 e");
    assert!(s.lift_path(&alpha).is_ok());
    // Lifting is inverse to projection.
    assert_eq!(s.project_path(&alpha).unwrap(), alpha);
}

#[test]
fn translate_of_aaa_is_a() {
    let s = rose2_collapse_b();
    let p = path(&s, "a a a");
    let b = s.basis();
    let g = s.element_of_translate(&p, 0, 1, true).unwrap().unwrap();
    assert_eq!(g, word(b, "a"));
    assert!(s.verify_alignment(&p, &g, 0, 1, true));
    let g2 = s.element_of_translate(&p, 0, 2, true).unwrap().unwrap();
    assert_eq!(g2, word(b, "a a"));
}

#[test]
fn translate_of_aba_is_ab() {
    let s = rose2();
    let p = path(&s, "a b a");
    let g = s.element_of_translate(&p, 0, 2, true).unwrap().unwrap();
    assert_eq!(g, word(s.basis(), "a b"));
    assert!(s.verify_alignment(&p, &g, 0, 2, true));
    // Reversed alignment of two same-oriented occurrences is impossible.
    assert_eq!(s.element_of_translate(&p, 0, 2, false).unwrap(), None);
}

#[test]
fn translate_with_distinct_edges_is_an_error() {
    let s = rose2();
    let p = path(&s, "a b");
    assert!(s.element_of_translate(&p, 0, 1, true).is_err());
}

#[test]
fn natural_structure_rejects_the_circle() {
    use splitfold::word::Basis;
    use std::collections::BTreeSet;
    let s = splitfold::FreeSplitting::with_auto_marking(
        vec!["v".into()],
        vec![("a".into(), "v".into(), "v".into())],
        &BTreeSet::new(),
        Basis::standard(1).unwrap(),
    )
    .unwrap();
    assert!(s.natural_structure().is_err());
}

#[test]
fn resubdivision_preserves_natural_partition() {
    // The subdivided rose's natural edges refine to the rose's.
    let rose = rose2();
    let sub = subdivided_rose2();
    let nat_rose = rose.natural_structure().unwrap();
    let nat_sub = sub.natural_structure().unwrap();
    assert_eq!(nat_rose.edges.len(), nat_sub.edges.len());
}

#[test]
fn g4_vertex_stabilizers_are_the_rose_subgroups() {
    let s = g4_collapsed();
    let b = s.basis();
    for comp in s.components() {
        let stab = &comp.stabilizer;
        assert_eq!(stab.rank(), 2);
        let has_a = stab.contains(&word(b, "a")) && stab.contains(&word(b, "b"));
        let has_c = stab.contains(&word(b, "c")) && stab.contains(&word(b, "d"));
        assert!(has_a ^ has_c);
    }
}
