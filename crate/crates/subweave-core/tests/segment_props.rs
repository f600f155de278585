//! Property tests for segmentation: an exhaustive-search oracle for the
//! Viterbi lattice (tie-breaks included), decode round-trips, UNK
//! accounting, and monotonicity under vocabulary growth.

use proptest::prelude::*;
use subweave_core::segment::encode;
use subweave_core::text::{normalize, split_words, BOUNDARY, UNK_PIECE};
use subweave_core::vocab::{Algorithm, Piece, Vocabulary};

/// A small unigram vocabulary over {a, b}: up to a dozen pieces, each an
/// optionally marker-prefixed short run, with distinct negative scores.
fn small_unigram_vocab() -> impl Strategy<Value = Vocabulary> {
    let text = prop_oneof![
        3 => "[ab]{1,3}",
        2 => "[ab]{1,3}".prop_map(|s| format!("{BOUNDARY}{s}")),
        1 => Just(BOUNDARY.to_string()),
    ];
    prop::collection::btree_map(text, -8.0f64..-0.05, 1..12).prop_map(|m| {
        let pieces = m
            .into_iter()
            .map(|(text, score)| Piece { text, score })
            .collect();
        Vocabulary::new(Algorithm::Unigram, pieces).unwrap()
    })
}

/// One candidate segmentation of a word, scored exactly as the lattice
/// scores it: suffix sums, so addition associates to the right.
#[derive(Debug, Clone)]
struct Path {
    unk: u32,
    score: f64,
    pieces: Vec<String>,
}

/// True when `a` ranks strictly ahead of `b`: fewest UNKs, then highest
/// score, then fewest pieces, then lexicographically smallest sequence.
fn ranks_ahead(a: &Path, b: &Path) -> bool {
    if a.unk != b.unk {
        return a.unk < b.unk;
    }
    if a.score != b.score {
        return a.score > b.score;
    }
    if a.pieces.len() != b.pieces.len() {
        return a.pieces.len() < b.pieces.len();
    }
    a.pieces < b.pieces
}

/// Every segmentation of `chars` under `vocab`: each position offers every
/// matching piece plus a one-character UNK arc. The best path is the
/// oracle for the Viterbi result.
fn enumerate_paths(vocab: &Vocabulary, chars: &[char]) -> Path {
    let unk_score = vocab.score_of(UNK_PIECE).unwrap();
    let mut best: Option<Path> = None;
    // Arcs from each position: (length, text, score).
    let mut arcs: Vec<Vec<(usize, String, f64)>> = Vec::new();
    for i in 0..chars.len() {
        let mut here = vec![(1, UNK_PIECE.to_string(), unk_score)];
        for p in vocab.pieces() {
            if p.text == UNK_PIECE {
                continue;
            }
            let plen = p.text.chars().count();
            if i + plen <= chars.len()
                && p.text.chars().eq(chars[i..i + plen].iter().copied())
            {
                here.push((plen, p.text.clone(), p.score));
            }
        }
        arcs.push(here);
    }
    let mut stack: Vec<(usize, String, f64)> = Vec::new();
    search(&arcs, chars.len(), 0, &mut stack, &mut best);
    return best.expect("the all-UNK path always exists");

    fn search(
        arcs: &[Vec<(usize, String, f64)>],
        n: usize,
        pos: usize,
        stack: &mut Vec<(usize, String, f64)>,
        best: &mut Option<Path>,
    ) {
        if pos == n {
            // Right-fold the scores so rounding matches the backward DP.
            let mut score = 0.0;
            for (_, _, s) in stack.iter().rev() {
                score = s + score;
            }
            let candidate = Path {
                unk: stack.iter().filter(|(_, t, _)| t == UNK_PIECE).count() as u32,
                score,
                pieces: stack.iter().map(|(_, t, _)| t.clone()).collect(),
            };
            if best.as_ref().is_none_or(|b| ranks_ahead(&candidate, b)) {
                *best = Some(candidate);
            }
            return;
        }
        for arc in &arcs[pos] {
            stack.push(arc.clone());
            search(arcs, n, pos + arc.0, stack, best);
            stack.pop();
        }
    }
}

/// The oracle applied word by word, exactly as `encode` segments text.
fn oracle_encode(vocab: &Vocabulary, text: &str) -> (Vec<String>, u32, f64) {
    let normalized = normalize(text);
    let mut pieces = Vec::new();
    let mut unk = 0;
    let mut score = 0.0;
    for word in split_words(&normalized) {
        let chars: Vec<char> = word.chars().collect();
        let best = enumerate_paths(vocab, &chars);
        pieces.extend(best.pieces);
        unk += best.unk;
        score += best.score;
    }
    (pieces, unk, score)
}

/// Sum of piece scores of a segmentation, folded right like the lattice.
fn fold_score(vocab: &Vocabulary, pieces: &[String]) -> f64 {
    let mut score = 0.0;
    for p in pieces.iter().rev() {
        score = vocab.score_of(p).unwrap() + score;
    }
    score
}

proptest! {
    /// The Viterbi segmenter agrees with exhaustive enumeration on the
    /// full ranking: same pieces, same UNK count, same score bit for bit.
    #[test]
    fn viterbi_matches_exhaustive_search(
        vocab in small_unigram_vocab(),
        word in "[abc]{1,9}",
    ) {
        let seg = encode(&vocab, &word);
        let chars: Vec<char> = format!("{BOUNDARY}{word}").chars().collect();
        let best = enumerate_paths(&vocab, &chars);
        prop_assert_eq!(&seg.pieces, &best.pieces);
        prop_assert_eq!(seg.oov_count as u32, best.unk);
        prop_assert_eq!(fold_score(&vocab, &seg.pieces).to_bits(), best.score.to_bits());
    }

    /// Multi-word texts segment word by word; pieces never span spaces.
    #[test]
    fn viterbi_matches_exhaustive_search_across_words(
        vocab in small_unigram_vocab(),
        text in "[abc ]{0,12}",
    ) {
        let seg = encode(&vocab, &text);
        let (pieces, unk, _) = oracle_encode(&vocab, &text);
        prop_assert_eq!(&seg.pieces, &pieces);
        prop_assert_eq!(seg.oov_count as u32, unk);
        prop_assert_eq!(seg.token_count, seg.pieces.len());
    }

    /// Encoding then decoding restores the text up to whitespace
    /// canonicalization, even when characters fall outside the alphabet.
    #[test]
    fn decode_round_trips_any_text(
        vocab in small_unigram_vocab(),
        text in prop_oneof![4 => "[abcd \t]{0,16}", 1 => any::<String>()],
    ) {
        prop_assume!(!text.contains(BOUNDARY));
        let expected = {
            let spaced: String = normalize(&text)
                .chars()
                .map(|c| if c == BOUNDARY { ' ' } else { c })
                .collect();
            spaced.strip_prefix(' ').unwrap_or(&spaced).to_string()
        };
        let seg = encode(&vocab, &text);
        prop_assert_eq!(seg.decode(), expected);
    }

    /// When every alphabet character has a single-character piece, the UNK
    /// count is exactly the number of out-of-alphabet characters.
    #[test]
    fn one_unk_per_out_of_alphabet_char(
        extra in prop::collection::btree_map("[ab]{2,3}", -6.0f64..-0.5, 0..5),
        text in "[abcde]{1,10}",
    ) {
        let mut pieces: Vec<Piece> = [BOUNDARY.to_string(), "a".into(), "b".into()]
            .into_iter()
            .map(|t| Piece { text: t, score: -2.5 })
            .collect();
        pieces.extend(extra.into_iter().map(|(t, s)| Piece { text: t, score: s }));
        let vocab = Vocabulary::new(Algorithm::Unigram, pieces).unwrap();
        let seg = encode(&vocab, &text);
        let out = text.chars().filter(|c| !vocab.alphabet().contains(c)).count();
        prop_assert_eq!(seg.oov_count, out);
        prop_assert_eq!(seg.oov_count, seg.oov_originals().len());
    }

    /// Growing the vocabulary never makes segmentation worse: the UNK
    /// count cannot rise, and at equal UNK count the score cannot drop
    /// (the old optimum is still a valid path in the larger lattice).
    #[test]
    fn supersets_never_segment_worse(
        vocab in small_unigram_vocab(),
        extra in prop::collection::btree_map("[ab]{1,4}", -8.0f64..-0.05, 1..6),
        word in "[abc]{1,9}",
    ) {
        let mut pieces: Vec<Piece> = vocab.pieces().to_vec();
        for (text, score) in extra {
            if vocab.index_of(&text).is_none() && text != UNK_PIECE {
                pieces.push(Piece { text, score });
            }
        }
        let grown = Vocabulary::new(Algorithm::Unigram, pieces).unwrap();
        let before = encode(&vocab, &word);
        let after = encode(&grown, &word);
        prop_assert!(after.oov_count <= before.oov_count);
        if after.oov_count == before.oov_count {
            // Shared pieces keep their scores, so the folds are comparable.
            let s_before = fold_score(&vocab, &before.pieces);
            let s_after = fold_score(&grown, &after.pieces);
            prop_assert!(s_after >= s_before);
        }
    }
}
