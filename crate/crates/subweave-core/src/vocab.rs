//! Scored subword vocabularies and the vocabulary union.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::text::UNK_PIECE;
use crate::{Error, Result};

/// Training algorithm a vocabulary was produced by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Unigram language model: scores are log-probabilities.
    Unigram,
    /// Byte-pair encoding: scores are merge ranks (lower = earlier merge);
    /// alphabet pieces carry -1 and never merge.
    Bpe,
}

impl Algorithm {
    /// Stable lowercase name used in files and flags.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Unigram => "unigram",
            Algorithm::Bpe => "bpe",
        }
    }

    /// Parses the stable name back; inverse of [`Algorithm::name`].
    pub fn parse(s: &str) -> Option<Algorithm> {
        match s {
            "unigram" => Some(Algorithm::Unigram),
            "bpe" => Some(Algorithm::Bpe),
            _ => None,
        }
    }
}

/// One vocabulary entry: a subword and its score.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    /// The subword text. May start with the boundary marker U+2581 but never
    /// contains it internally.
    pub text: String,
    /// Log-probability (unigram) or merge rank (bpe). The UNK piece carries 0.
    pub score: f64,
}

/// Number of reserved special pieces (currently only UNK).
pub const SPECIALS: usize = 1;

/// A scored subword inventory in canonical order: descending score, ties by
/// ascending piece text. The UNK piece is always present exactly once; every
/// single character of the training coverage alphabet is a piece, which
/// guarantees any in-alphabet string is segmentable.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    algorithm: Algorithm,
    pieces: Vec<Piece>,
    index: HashMap<String, u32>,
    alphabet: BTreeSet<char>,
    max_piece_chars: usize,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.algorithm == other.algorithm && self.pieces == other.pieces
    }
}

impl Vocabulary {
    /// Builds a vocabulary from pieces, sorting them into canonical order.
    ///
    /// Structural invariants are enforced here: unique piece texts, exactly
    /// one UNK (added with score 0 if absent), finite scores, no internal
    /// boundary markers, and unigram scores ≤ 0. Probability normalization
    /// is a property of trained/united vocabularies, checked separately by
    /// [`Vocabulary::validate_normalized`], so that hand-built score sets
    /// (e.g. in tests) remain expressible.
    pub fn new(algorithm: Algorithm, mut pieces: Vec<Piece>) -> Result<Self> {
        if !pieces.iter().any(|p| p.text == UNK_PIECE) {
            pieces.push(Piece {
                text: String::from(UNK_PIECE),
                score: 0.0,
            });
        }
        for p in &pieces {
            if !p.score.is_finite() {
                return Err(Error::InvalidVocabulary(format!(
                    "piece {:?} has non-finite score",
                    p.text
                )));
            }
            if p.text.is_empty() {
                return Err(Error::InvalidVocabulary(String::from("empty piece")));
            }
            if p.text != UNK_PIECE {
                if algorithm == Algorithm::Unigram && p.score > 0.0 {
                    return Err(Error::InvalidVocabulary(format!(
                        "unigram piece {:?} has positive log-probability {}",
                        p.text, p.score
                    )));
                }
                let mut chars = p.text.chars();
                chars.next();
                if chars.any(|c| c == crate::text::BOUNDARY) {
                    return Err(Error::InvalidVocabulary(format!(
                        "piece {:?} contains an internal boundary marker",
                        p.text
                    )));
                }
            }
        }
        pieces.sort_unstable_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .expect("scores are finite")
                .then_with(|| a.text.cmp(&b.text))
        });
        let mut index = HashMap::with_capacity(pieces.len());
        let mut alphabet = BTreeSet::new();
        let mut max_piece_chars = 1;
        for (i, p) in pieces.iter().enumerate() {
            if index.insert(p.text.clone(), i as u32).is_some() {
                return Err(Error::InvalidVocabulary(format!(
                    "duplicate piece {:?}",
                    p.text
                )));
            }
            if p.text == UNK_PIECE {
                continue;
            }
            let n = p.text.chars().count();
            max_piece_chars = max_piece_chars.max(n);
            alphabet.extend(p.text.chars());
        }
        Ok(Vocabulary {
            algorithm,
            pieces,
            index,
            alphabet,
            max_piece_chars,
        })
    }

    /// Checks the score invariant of finished vocabularies: for unigram,
    /// non-special piece probabilities sum to 1 ± 1e-6; for bpe, merge ranks
    /// are exactly 1..=m with alphabet pieces at -1.
    pub fn validate_normalized(&self) -> Result<()> {
        match self.algorithm {
            Algorithm::Unigram => {
                let sum: f64 = self
                    .pieces
                    .iter()
                    .filter(|p| p.text != UNK_PIECE)
                    .map(|p| libm::exp(p.score))
                    .sum();
                if (sum - 1.0).abs() > 1e-6 {
                    return Err(Error::InvalidVocabulary(format!(
                        "piece probabilities sum to {sum}, expected 1"
                    )));
                }
            }
            Algorithm::Bpe => {
                let mut ranks: Vec<i64> = Vec::new();
                for p in &self.pieces {
                    if p.text == UNK_PIECE {
                        continue;
                    }
                    if p.score >= 1.0 {
                        ranks.push(p.score as i64);
                    } else if p.score != -1.0 {
                        return Err(Error::InvalidVocabulary(format!(
                            "bpe piece {:?} has score {}, expected a rank or -1",
                            p.text, p.score
                        )));
                    }
                }
                ranks.sort_unstable();
                for (i, r) in ranks.iter().enumerate() {
                    if *r != i as i64 + 1 {
                        return Err(Error::InvalidVocabulary(format!(
                            "bpe ranks not dense: found {r} at position {i}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The training algorithm.
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    /// Pieces in canonical order (descending score, ties by text).
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Total number of pieces, specials included.
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    /// True when the vocabulary holds only the UNK piece.
    pub fn is_empty(&self) -> bool {
        self.pieces.len() <= SPECIALS
    }

    /// Canonical index of a piece.
    pub fn index_of(&self, piece: &str) -> Option<usize> {
        self.index.get(piece).map(|&i| i as usize)
    }

    /// Score of a piece.
    pub fn score_of(&self, piece: &str) -> Option<f64> {
        self.index_of(piece).map(|i| self.pieces[i].score)
    }

    /// Canonical index of the UNK piece.
    pub fn unk_index(&self) -> usize {
        self.index_of(UNK_PIECE).expect("UNK always present")
    }

    /// Characters appearing in at least one non-special piece. A character
    /// outside this set always encodes as UNK; trained vocabularies also
    /// carry every alphabet character as a single-character piece, so their
    /// in-alphabet text never needs UNK.
    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    /// Length in characters of the longest piece.
    pub fn max_piece_chars(&self) -> usize {
        self.max_piece_chars
    }

    /// Order-sensitive content hash (FNV-1a over pieces, scores, and the
    /// algorithm). Two vocabularies with equal hashes are treated as the
    /// same distribution support in analysis.
    pub fn identity_hash(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01B3);
            }
        };
        eat(self.algorithm.name().as_bytes());
        for p in &self.pieces {
            eat(p.text.as_bytes());
            eat(&[0xFF]);
            eat(&p.score.to_bits().to_le_bytes());
        }
        h
    }
}

/// Unites vocabularies trained with the same algorithm.
///
/// The piece set is the set union. Unigram duplicates keep their maximum
/// log-probability and the result is renormalized over non-special pieces;
/// bpe duplicates keep their minimum rank and ranks are re-densified in that
/// order. A single input is returned unchanged, making the one-cluster
/// pipeline identical to direct joint training.
pub fn union_vocab(vocabs: &[Vocabulary]) -> Result<Vocabulary> {
    let first = vocabs.first().ok_or(Error::NoLanguages)?;
    if vocabs.iter().any(|v| v.algorithm() != first.algorithm()) {
        return Err(Error::MixedAlgorithms);
    }
    if vocabs.len() == 1 {
        return Ok(first.clone());
    }
    match first.algorithm() {
        Algorithm::Unigram => {
            let mut best: HashMap<&str, f64> = HashMap::new();
            for v in vocabs {
                for p in v.pieces() {
                    if p.text == UNK_PIECE {
                        continue;
                    }
                    best.entry(p.text.as_str())
                        .and_modify(|s| *s = s.max(p.score))
                        .or_insert(p.score);
                }
            }
            let mut merged: Vec<(&str, f64)> = best.into_iter().collect();
            merged.sort_unstable_by(|a, b| a.0.cmp(b.0));
            // log of the probability mass, computed with a max shift so that
            // very negative scores cannot underflow the sum to zero.
            let m = merged
                .iter()
                .map(|&(_, s)| s)
                .fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = merged.iter().map(|&(_, s)| libm::exp(s - m)).sum();
            let log_z = m + libm::log(z);
            let pieces = merged
                .into_iter()
                .map(|(t, s)| Piece {
                    text: String::from(t),
                    score: (s - log_z).min(0.0),
                })
                .collect();
            Vocabulary::new(Algorithm::Unigram, pieces)
        }
        Algorithm::Bpe => {
            let mut singles: BTreeSet<&str> = BTreeSet::new();
            let mut best_rank: HashMap<&str, f64> = HashMap::new();
            for v in vocabs {
                for p in v.pieces() {
                    if p.text == UNK_PIECE {
                        continue;
                    }
                    if p.score < 0.0 {
                        singles.insert(&p.text);
                    } else {
                        best_rank
                            .entry(p.text.as_str())
                            .and_modify(|r| *r = r.min(p.score))
                            .or_insert(p.score);
                    }
                }
            }
            let mut merges: Vec<(&str, f64)> = best_rank.into_iter().collect();
            merges.sort_unstable_by(|a, b| {
                a.1.partial_cmp(&b.1)
                    .expect("ranks are finite")
                    .then_with(|| a.0.cmp(b.0))
            });
            let mut pieces: Vec<Piece> = singles
                .into_iter()
                .map(|t| Piece {
                    text: String::from(t),
                    score: -1.0,
                })
                .collect();
            pieces.extend(merges.into_iter().enumerate().map(|(i, (t, _))| Piece {
                text: String::from(t),
                score: (i + 1) as f64,
            }));
            Vocabulary::new(Algorithm::Bpe, pieces)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn piece(text: &str, score: f64) -> Piece {
        Piece {
            text: String::from(text),
            score,
        }
    }

    fn unigram(entries: &[(&str, f64)]) -> Vocabulary {
        Vocabulary::new(
            Algorithm::Unigram,
            entries.iter().map(|&(t, s)| piece(t, s)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_order_is_score_then_text() {
        let v = unigram(&[("b", -1.0), ("a", -1.0), ("ab", -0.5)]);
        let texts: Vec<&str> = v.pieces().iter().map(|p| p.text.as_str()).collect();
        assert_eq!(texts, ["<unk>", "ab", "a", "b"]);
    }

    #[test]
    fn unk_added_once_and_indexed() {
        let v = unigram(&[("a", -0.5)]);
        assert_eq!(v.len(), 2);
        assert_eq!(v.pieces()[v.unk_index()].text, UNK_PIECE);
        assert_eq!(v.score_of(UNK_PIECE), Some(0.0));
    }

    #[test]
    fn duplicate_pieces_rejected() {
        let err = Vocabulary::new(
            Algorithm::Unigram,
            vec![piece("a", -1.0), piece("a", -2.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidVocabulary(_)));
    }

    #[test]
    fn internal_boundary_marker_rejected() {
        let err = Vocabulary::new(Algorithm::Unigram, vec![piece("a▁b", -1.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidVocabulary(_)));
    }

    #[test]
    fn union_is_set_union() {
        let a = unigram(&[("x", -0.7), ("y", -0.7)]);
        let b = unigram(&[("y", -0.7), ("z", -0.7)]);
        let u = union_vocab(&[a, b]).unwrap();
        let mut texts: Vec<&str> = u.pieces().iter().map(|p| p.text.as_str()).collect();
        texts.sort_unstable();
        assert_eq!(texts, ["<unk>", "x", "y", "z"]);
    }

    #[test]
    fn union_of_one_is_identity() {
        let a = unigram(&[("x", -0.3), ("y", -2.5)]);
        let u = union_vocab(core::slice::from_ref(&a)).unwrap();
        assert_eq!(u, a);
    }

    #[test]
    fn union_keeps_max_probability_then_renormalizes() {
        // y carries p=0.2 in a, p=0.4 in b; x p=0.8, z p=0.6.
        let a = unigram(&[("x", libm::log(0.8), ), ("y", libm::log(0.2))]);
        let b = unigram(&[("y", libm::log(0.4)), ("z", libm::log(0.6))]);
        let u = union_vocab(&[a, b]).unwrap();
        // max scores: x 0.8, y 0.4, z 0.6; total 1.8.
        let py = libm::exp(u.score_of("y").unwrap());
        assert!((py - 0.4 / 1.8).abs() < 1e-12);
        u.validate_normalized().unwrap();
    }

    #[test]
    fn union_rejects_mixed_algorithms() {
        let a = unigram(&[("x", -0.1)]);
        let b = Vocabulary::new(Algorithm::Bpe, vec![piece("x", -1.0)]).unwrap();
        assert_eq!(union_vocab(&[a, b]).unwrap_err(), Error::MixedAlgorithms);
    }

    #[test]
    fn bpe_union_keeps_min_rank_and_densifies() {
        let a = Vocabulary::new(
            Algorithm::Bpe,
            vec![piece("a", -1.0), piece("b", -1.0), piece("ab", 1.0), piece("abb", 2.0)],
        )
        .unwrap();
        let b = Vocabulary::new(
            Algorithm::Bpe,
            vec![piece("a", -1.0), piece("b", -1.0), piece("bb", 1.0), piece("ab", 2.0)],
        )
        .unwrap();
        let u = union_vocab(&[a, b]).unwrap();
        // min ranks: ab 1, bb 1, abb 2 → densified by (rank, text): ab 1, bb 2, abb 3.
        assert_eq!(u.score_of("ab"), Some(1.0));
        assert_eq!(u.score_of("bb"), Some(2.0));
        assert_eq!(u.score_of("abb"), Some(3.0));
        u.validate_normalized().unwrap();
    }

    #[test]
    fn identity_hash_tracks_content() {
        let a = unigram(&[("x", -0.5)]);
        let b = unigram(&[("x", -0.5)]);
        let c = unigram(&[("x", -0.25)]);
        assert_eq!(a.identity_hash(), b.identity_hash());
        assert_ne!(a.identity_hash(), c.identity_hash());
    }
}
