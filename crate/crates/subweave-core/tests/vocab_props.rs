//! Property tests for vocabulary construction and the union operation.

use std::collections::BTreeSet;

use proptest::prelude::*;
use subweave_core::text::UNK_PIECE;
use subweave_core::vocab::{union_vocab, Algorithm, Piece, Vocabulary};

fn piece_map() -> impl Strategy<Value = Vec<(String, f64)>> {
    prop::collection::btree_map(
        prop_oneof![
            3 => "[abc]{1,3}",
            2 => "[abc]{1,3}".prop_map(|s| format!("\u{2581}{s}")),
        ],
        -9.0f64..-0.1,
        1..10,
    )
    .prop_map(|m| m.into_iter().collect())
}

fn build(pieces: &[(String, f64)]) -> Vocabulary {
    Vocabulary::new(
        Algorithm::Unigram,
        pieces
            .iter()
            .map(|(t, s)| Piece {
                text: t.clone(),
                score: *s,
            })
            .collect(),
    )
    .unwrap()
}

fn texts(v: &Vocabulary) -> BTreeSet<String> {
    v.pieces().iter().map(|p| p.text.clone()).collect()
}

proptest! {
    /// Canonical order: scores non-increasing with ties broken by text,
    /// exactly one UNK, and lookups agree with the piece list.
    #[test]
    fn construction_is_canonical(pieces in piece_map()) {
        let vocab = build(&pieces);
        prop_assert_eq!(vocab.len(), pieces.len() + 1);
        let ps = vocab.pieces();
        for pair in ps.windows(2) {
            let ordered = pair[0].score > pair[1].score
                || (pair[0].score == pair[1].score && pair[0].text < pair[1].text);
            prop_assert!(ordered);
        }
        prop_assert_eq!(ps.iter().filter(|p| p.text == UNK_PIECE).count(), 1);
        prop_assert_eq!(ps[vocab.unk_index()].text.as_str(), UNK_PIECE);
        for (i, p) in ps.iter().enumerate() {
            prop_assert_eq!(vocab.index_of(&p.text), Some(i));
            prop_assert_eq!(vocab.score_of(&p.text).unwrap().to_bits(), p.score.to_bits());
        }
        // The identity hash is stable across an identical rebuild.
        prop_assert_eq!(build(&pieces).identity_hash(), vocab.identity_hash());
    }

    /// The union's piece set is the set union of the inputs' piece sets,
    /// whatever the order or grouping of the inputs.
    #[test]
    fn union_is_a_set_union(
        a in piece_map(),
        b in piece_map(),
        c in piece_map(),
    ) {
        let (va, vb, vc) = (build(&a), build(&b), build(&c));
        let u = union_vocab(&[va.clone(), vb.clone(), vc.clone()]).unwrap();
        let mut expected = texts(&va);
        expected.extend(texts(&vb));
        expected.extend(texts(&vc));
        prop_assert_eq!(texts(&u), expected);
        prop_assert!(u.validate_normalized().is_ok());
        // Commutative, bit for bit.
        let swapped = union_vocab(&[vb.clone(), vc.clone(), va.clone()]).unwrap();
        prop_assert_eq!(&swapped, &u);
        // Grouping only affects scores, never the piece set.
        let nested = union_vocab(&[union_vocab(&[va, vb]).unwrap(), vc]).unwrap();
        prop_assert_eq!(texts(&nested), texts(&u));
    }

    /// Union with itself changes nothing: idempotence.
    #[test]
    fn union_is_idempotent(a in piece_map()) {
        let v = build(&a);
        let u = union_vocab(&[v.clone(), v.clone()]).unwrap();
        prop_assert_eq!(texts(&u), texts(&v));
        prop_assert_eq!(u.len(), v.len());
    }

    /// The alphabet is exactly the characters of non-UNK pieces.
    #[test]
    fn alphabet_is_piece_characters(pieces in piece_map()) {
        let vocab = build(&pieces);
        let mut expected = BTreeSet::new();
        for (t, _) in &pieces {
            expected.extend(t.chars());
        }
        prop_assert_eq!(vocab.alphabet(), &expected);
    }
}
