//! Property tests for the word algebra.

use proptest::prelude::*;
use splitfold::word::{Letter, Word};

fn letter_strategy(rank: u16) -> impl Strategy<Value = Letter> {
    (0..rank, any::<bool>()).prop_map(|(i, inv)| {
        let l = Letter::positive(i);
        if inv {
            l.inverse()
        } else {
            l
        }
    })
}

fn word_strategy(rank: u16, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(letter_strategy(rank), 0..max_len)
}

proptest! {
    /// Confluence: reducing in any association order agrees with the
    /// single left-to-right pass.
    #[test]
    fn reduction_is_confluent(letters in word_strategy(3, 24), cut in 0usize..24) {
        let whole = Word::from_letters(letters.clone());
        let k = cut.min(letters.len());
        let left = Word::from_letters(letters[..k].iter().copied());
        let right = Word::from_letters(letters[k..].iter().copied());
        prop_assert_eq!(left.mul(&right), whole);
    }

    #[test]
    fn inverse_is_an_involution_and_cancels(letters in word_strategy(3, 16)) {
        let w = Word::from_letters(letters);
        prop_assert_eq!(w.inverse().inverse(), w.clone());
        prop_assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn cyclic_canonical_is_conjugation_invariant(letters in word_strategy(2, 10), conj in word_strategy(2, 6)) {
        let w = Word::from_letters(letters);
        let c = Word::from_letters(conj);
        prop_assert_eq!(w.cyclic_canonical(), w.conjugate_by(&c).cyclic_canonical());
    }

    /// Folding recognizes every product of the generators.
    #[test]
    fn folded_graph_contains_generator_products(
        g1 in word_strategy(2, 5),
        g2 in word_strategy(2, 5),
        picks in prop::collection::vec((0usize..2, any::<bool>()), 1..5),
    ) {
        use splitfold::subgroup::StallingsGraph;
        use splitfold::word::Basis;
        let basis = Basis::standard(2).unwrap();
        let gens = [Word::from_letters(g1), Word::from_letters(g2)];
        let h = StallingsGraph::fold(&basis, &gens);
        let mut w = Word::identity();
        for (i, inv) in picks {
            let g = if inv { gens[i].inverse() } else { gens[i].clone() };
            w = w.mul(&g);
        }
        prop_assert!(h.contains(&w));
    }
}
