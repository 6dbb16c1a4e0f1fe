//! Train track validation, exponents, nesting traces and improvement
//! moves on the quantitative fixtures.

mod common;

use common::{rose_graph, self_map};
use splitfold::matrix::{bool_exponent, IntMatrix, Rational};
use splitfold::morphism::GraphMorphism;
use splitfold::splitting::FreeSplitting;
use splitfold::traintrack::{
    analyze, collapse_invariant_forest, filling_exponent, pf_exponent, tau_lower_bound,
    tile_nesting_trace, trivial_collapse_check, uniform_crossing_check, valence2_homotopy,
    validate_tt, CollapseOutcome, TrainTrackMap, TtValidation,
};
use splitfold::word::Basis;
use splitfold::Envelope;
use std::collections::BTreeSet;

fn grushko(g: &splitfold::MarkedGraph) -> FreeSplitting {
    FreeSplitting::new(g.clone(), BTreeSet::new()).unwrap()
}

fn fibonacci() -> (FreeSplitting, GraphMorphism) {
    let g = rose_graph(2);
    let f = self_map(&g, &[("a", "a b"), ("b", "a")]);
    (grushko(&g), f)
}

fn validated(split: &FreeSplitting, f: &GraphMorphism) -> TrainTrackMap {
    match validate_tt(split, f).unwrap() {
        TtValidation::Valid(tt) => tt,
        TtValidation::IllegalTurn(t) => panic!("unexpected illegal turn {t:?}"),
    }
}

#[test]
fn fibonacci_is_a_train_track_map() {
    let (s, f) = fibonacci();
    let tt = validated(&s, &f);
    let m = tt.transition_matrix();
    assert_eq!(m.rows(), vec![vec![1, 1], vec![1, 0]]);
}

#[test]
fn conjugated_generator_map_fails_the_turn_check() {
    // a -> b, b -> b a^-1 b^-1 is an automorphism whose rose
    // representative takes the turn {a, b^-1} onto a degenerate turn.
    let g = rose_graph(2);
    let f = self_map(&g, &[("a", "b"), ("b", "b a^-1 b^-1")]);
    assert!(f.is_homotopy_equivalence());
    match validate_tt(&grushko(&g), &f).unwrap() {
        TtValidation::IllegalTurn(_) => {}
        TtValidation::Valid(_) => panic!("expected an illegal turn"),
    }
}

#[test]
fn non_equivalence_is_rejected_at_validation() {
    let g = rose_graph(2);
    let f = self_map(&g, &[("a", "b"), ("b", "b")]);
    assert!(validate_tt(&grushko(&g), &f).is_err());
}

#[test]
fn identity_transition_matrix_and_imprimitivity() {
    let g = rose_graph(2);
    let id = GraphMorphism::identity(&g);
    let tt = validated(&grushko(&g), &id);
    assert_eq!(tt.transition_matrix().rows(), vec![vec![1, 0], vec![0, 1]]);
    assert!(pf_exponent(&tt).is_err());
}

#[test]
fn fibonacci_pf_exponent_is_six() {
    let (s, f) = fibonacci();
    let tt = validated(&s, &f);
    assert_eq!(pf_exponent(&tt).unwrap(), 6);
}

#[test]
fn doubled_matrix_reaches_four_in_two_steps() {
    let m = IntMatrix::from_rows(&[vec![2, 2], vec![2, 2]]).unwrap();
    assert!(m.is_primitive());
    assert!(m.min_entry() < 4);
    assert_eq!(m.pow(2).unwrap().min_entry(), 8);
}

#[test]
fn second_eg_map_transition_matrix() {
    // a -> ab, b -> aab: an EG-aperiodic automorphism (the naive swap
    // a -> ab, b -> ba has abelianization determinant zero and is not
    // an automorphism at all).
    let g = rose_graph(2);
    let f = self_map(&g, &[("a", "a b"), ("b", "a a b")]);
    let tt = validated(&grushko(&g), &f);
    assert_eq!(tt.transition_matrix().rows(), vec![vec![1, 2], vec![1, 1]]);
    let kappa = pf_exponent(&tt).unwrap();
    assert!(kappa <= 3);
    let fe = filling_exponent(&tt, &Envelope::default()).unwrap();
    assert!(fe.omega <= kappa * 2, "omega within the kappa * rank bound");
}

#[test]
fn fibonacci_filling_exponent_within_bound() {
    let (s, f) = fibonacci();
    let tt = validated(&s, &f);
    let env = Envelope::default();
    let fe = filling_exponent(&tt, &env).unwrap();
    assert!(fe.omega <= 12, "omega within kappa * rank");
    assert_eq!(fe.omega, 4);
    // The a tile fills one step earlier than the b tile.
    let map: std::collections::BTreeMap<_, _> = fe.first_filling.iter().cloned().collect();
    assert_eq!(map["a"], 3);
    assert_eq!(map["b"], 4);
}

#[test]
fn uniform_crossing_holds_at_the_pf_exponent() {
    let (s, f) = fibonacci();
    let tt = validated(&s, &f);
    let kappa = pf_exponent(&tt).unwrap();
    assert!(uniform_crossing_check(&tt, kappa).unwrap());
    // The second corpus map as well.
    let g = rose_graph(2);
    let f2 = self_map(&g, &[("a", "a b"), ("b", "a a b")]);
    let tt2 = validated(&grushko(&g), &f2);
    let kappa2 = pf_exponent(&tt2).unwrap();
    assert!(uniform_crossing_check(&tt2, kappa2).unwrap());
    // A deliberately wrong exponent may fail; the check reports honestly.
    let _ = uniform_crossing_check(&tt, 1).unwrap();
}

#[test]
fn trivial_collapse_property_at_kappa() {
    let (s, f) = fibonacci();
    let tt = validated(&s, &f);
    let kappa = pf_exponent(&tt).unwrap();
    assert!(trivial_collapse_check(&tt, kappa).unwrap());
    assert!(!trivial_collapse_check(&tt, 1).unwrap());
}

#[test]
fn fibonacci_nesting_stabilizes_at_full_rank() {
    let (s, f) = fibonacci();
    let tt = validated(&s, &f);
    let env = Envelope::default();
    let nat = s.natural_structure().unwrap();
    for ne in &nat.edges {
        let trace = tile_nesting_trace(&tt, &ne.lift, None, &env).unwrap();
        assert_eq!(trace.stable_kurosh, 2);
        assert!(trace.column_rule_ok);
        // Stabilizes within rank-many steps of the first positive value.
        let first_positive = trace
            .entries
            .iter()
            .position(|e| e.kurosh > 0)
            .expect("rank becomes positive");
        assert!(trace.stabilization_index <= first_positive + 2);
    }
}

#[test]
fn nesting_trace_rejects_maps_without_self_crossing() {
    let g = rose_graph(2);
    let id = GraphMorphism::identity(&g);
    let s = grushko(&g);
    let tt = validated(&s, &id);
    let nat = s.natural_structure().unwrap();
    assert!(tile_nesting_trace(&tt, &nat.edges[0].lift, None, &Envelope::default()).is_err());
}

#[test]
fn boolean_exponent_table() {
    assert_eq!(bool_exponent(1).unwrap().kappa2, 1);
    assert_eq!(bool_exponent(2).unwrap().kappa2, 2);
    let b3 = bool_exponent(3).unwrap();
    assert_eq!(b3.kappa2, 5);
    assert_eq!(b3.kappa1, 15);
    assert!(b3.kappa2 <= b3.wielandt);
    assert!(bool_exponent(5).is_err());
}

#[test]
fn tau_lower_bound_formula() {
    let one = Rational::from_int(1);
    assert_eq!(
        tau_lower_bound(6, 12, one).unwrap(),
        Rational::new(1, 30).unwrap()
    );
    assert_eq!(tau_lower_bound(1, 1, one).unwrap(), Rational::new(1, 4).unwrap());
    let two = Rational::from_int(2);
    assert_eq!(tau_lower_bound(1, 1, two).unwrap(), Rational::new(1, 8).unwrap());
    assert!(tau_lower_bound(0, 1, one).is_err());
    assert!(tau_lower_bound(1, 1, Rational::from_int(-1)).is_err());
}

#[test]
fn analyze_fibonacci_report() {
    let (s, f) = fibonacci();
    let tt = validated(&s, &f);
    let report = analyze(&tt, Some(Rational::from_int(1)), &Envelope::default()).unwrap();
    assert_eq!(report.kappa, 6);
    assert_eq!(report.omega, 4);
    assert_eq!(report.mu, 22);
    assert!(report.uniform_crossing);
    assert_eq!(report.tau_lower.unwrap(), Rational::new(1, 22).unwrap());
    let phi = 1.618033988749895;
    assert!(report.lambda.lower.to_f64() <= phi && phi <= report.lambda.upper.to_f64());
    assert!(report.lambda.lower.to_f64() > 1.0, "expansion factor exceeds one");
}

#[test]
fn valence2_homotopy_recovers_the_rose() {
    // Fibonacci with the a loop subdivided: a = a1 a2, images split as
    // a1 -> a1 a2, a2 -> b so that the transition matrix stays
    // primitive.
    let g = splitfold::MarkedGraph::new(
        vec!["m".into(), "v".into()],
        vec![
            ("a1".into(), "v".into(), "m".into()),
            ("a2".into(), "m".into(), "v".into()),
            ("b".into(), "v".into(), "v".into()),
        ],
        Basis::standard(2).unwrap(),
        None,
    )
    .unwrap();
    let f = self_map(&g, &[("a1", "a1 a2"), ("a2", "b"), ("b", "a1 a2")]);
    assert!(f.is_homotopy_equivalence());
    let s = grushko(&g);
    let mv = valence2_homotopy(&s, &f, None).unwrap();
    assert_eq!(mv.removed_vertex, "m");
    assert_eq!(mv.split.graph().vertex_count(), 1);
    assert_eq!(mv.split.graph().edge_count(), 2);
    // The expansion factor is unchanged: certificates still bracket phi.
    let before = mv.lambda_before.as_ref().unwrap();
    let after = mv.lambda_after.as_ref().unwrap();
    let phi = 1.618033988749895;
    assert!(before.lower.to_f64() <= phi && phi <= before.upper.to_f64());
    assert!(after.lower.to_f64() <= phi && phi <= after.upper.to_f64());
    // The new representative is a genuine train track map.
    match validate_tt(&mv.split, &mv.map).unwrap() {
        TtValidation::Valid(tt) => {
            assert_eq!(tt.transition_matrix().rows(), vec![vec![1, 1], vec![1, 0]]);
        }
        TtValidation::IllegalTurn(t) => panic!("illegal turn {t:?}"),
    }
}

#[test]
fn valence2_homotopy_rejects_natural_graphs() {
    let (s, f) = fibonacci();
    assert!(valence2_homotopy(&s, &f, None).is_err());
}

#[test]
fn collapse_invariant_forest_outcomes() {
    // Fibonacci: irreducible.
    let (s, f) = fibonacci();
    match collapse_invariant_forest(&s, &f).unwrap() {
        CollapseOutcome::Irreducible => {}
        other => panic!("expected irreducible, got {other:?}"),
    }
    // Block triangular a -> a, b -> b a: the a loop is invariant but
    // not a forest; reducibility is reported.
    let g = rose_graph(2);
    let f2 = self_map(&g, &[("a", "a"), ("b", "b a")]);
    match collapse_invariant_forest(&grushko(&g), &f2).unwrap() {
        CollapseOutcome::Reducible { invariant_edges } => {
            assert_eq!(invariant_edges, vec!["a".to_string()]);
        }
        other => panic!("expected reducibility report, got {other:?}"),
    }
    // A pretrivial edge gets collapsed.
    let g3 = splitfold::MarkedGraph::new(
        vec!["m".into(), "v".into()],
        vec![
            ("a1".into(), "v".into(), "m".into()),
            ("a2".into(), "m".into(), "v".into()),
            ("b".into(), "v".into(), "v".into()),
        ],
        Basis::standard(2).unwrap(),
        None,
    )
    .unwrap();
    // a1 pretrivial; a2 carries the whole a loop.
    let m = g3.vertex_by_name("m").unwrap();
    let v = g3.vertex_by_name("v").unwrap();
    let a1 = g3.edge_by_name("a1").unwrap();
    let a2 = g3.edge_by_name("a2").unwrap();
    let b = g3.edge_by_name("b").unwrap();
    use splitfold::graph::OrientedEdge;
    use splitfold::path::EdgePath;
    let f3 = GraphMorphism::new(
        g3.clone(),
        g3.clone(),
        vec![m, m],
        vec![
            EdgePath::trivial(m),
            EdgePath::immersed(&g3, m, vec![OrientedEdge::forward(a2), OrientedEdge::forward(a1)]).unwrap(),
            EdgePath::immersed(
                &g3,
                m,
                vec![
                    OrientedEdge::forward(a2),
                    OrientedEdge::forward(b),
                    OrientedEdge::backward(a2),
                ],
            )
            .unwrap(),
        ],
    )
    .unwrap();
    assert!(f3.is_homotopy_equivalence());
    match collapse_invariant_forest(&grushko(&g3), &f3).unwrap() {
        CollapseOutcome::Collapsed {
            split, collapsed_edges, ..
        } => {
            assert_eq!(collapsed_edges, vec!["a1".to_string()]);
            assert_eq!(split.graph().edge_count(), 2);
        }
        other => panic!("expected a collapse, got {other:?}"),
    }
}

#[test]
fn transition_matrix_of_iterates_is_the_matrix_power() {
    let (s, f) = fibonacci();
    let m = validated(&s, &f).transition_matrix();
    let mut composed = f.clone();
    for k in 2..=6usize {
        composed = f.compose_after(&composed).unwrap();
        let tt_k = validated(&s, &composed);
        assert_eq!(
            tt_k.transition_matrix(),
            m.pow(k).unwrap(),
            "M(F^{k}) = M(F)^{k} exactly"
        );
    }
}
