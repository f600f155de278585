//! Encoding text into vocabulary pieces and decoding back.
//!
//! Unigram vocabularies are encoded with a Viterbi lattice per word; bpe
//! vocabularies replay their merges by rank. Characters with no
//! single-character piece are out-of-alphabet: each one becomes one UNK
//! piece, contributes nothing to segmentation scores, and is recorded so
//! decoding can restore it.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::text::{self, UNK_PIECE};
use crate::trie::CharTrie;
use crate::vocab::{Algorithm, Vocabulary};

/// The result of encoding one text: pieces in order plus OOV accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    /// Pieces in reading order; out-of-alphabet characters appear as UNK.
    pub pieces: Vec<String>,
    /// Number of UNK pieces emitted (one per out-of-alphabet character).
    pub oov_count: usize,
    /// Number of pieces; 0 only for text that normalizes to nothing.
    pub token_count: usize,
    oov_originals: Vec<String>,
}

impl Segmentation {
    /// The original characters each UNK piece replaced, in order.
    pub fn oov_originals(&self) -> &[String] {
        &self.oov_originals
    }

    /// Reconstructs the pre-marker text, restoring OOV characters.
    pub fn decode(&self) -> String {
        decode_with_originals(&self.pieces, &self.oov_originals)
    }
}

/// Encodes one text with a throwaway [`Segmenter`]. Loops over many texts
/// should build the segmenter once instead.
pub fn encode(vocab: &Vocabulary, text: &str) -> Segmentation {
    Segmenter::new(vocab).encode(text)
}

/// Joins pieces and reverses the boundary-marker convention. UNK pieces
/// render as their literal text; use [`decode_with_originals`] to restore
/// what they replaced.
pub fn decode<S: AsRef<str>>(pieces: &[S]) -> String {
    decode_with_originals::<S, &str>(pieces, &[])
}

/// Joins pieces, substituting the i-th original for the i-th UNK piece,
/// then reverses the boundary-marker convention. UNK pieces beyond the
/// supplied originals render as their literal text.
pub fn decode_with_originals<S: AsRef<str>, T: AsRef<str>>(
    pieces: &[S],
    originals: &[T],
) -> String {
    let mut joined = String::new();
    let mut next_original = 0;
    for p in pieces {
        let p = p.as_ref();
        if p == UNK_PIECE && next_original < originals.len() {
            joined.push_str(originals[next_original].as_ref());
            next_original += 1;
        } else {
            joined.push_str(p);
        }
    }
    text::markers_to_spaces(&joined)
}

/// Reusable encoder for one vocabulary.
pub struct Segmenter<'v> {
    vocab: &'v Vocabulary,
    trie: CharTrie,
}

/// Segmentation of a single word as canonical piece indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct WordPieces {
    pub(crate) piece_ids: Vec<u32>,
    pub(crate) oov_originals: Vec<String>,
}

impl<'v> Segmenter<'v> {
    /// Builds the piece-matching tables for `vocab`.
    pub fn new(vocab: &'v Vocabulary) -> Self {
        let mut trie = CharTrie::new();
        for (i, p) in vocab.pieces().iter().enumerate() {
            if p.text != UNK_PIECE {
                trie.insert(p.text.chars(), i as u32);
            }
        }
        Segmenter { vocab, trie }
    }

    /// The vocabulary this segmenter encodes with.
    pub fn vocab(&self) -> &Vocabulary {
        self.vocab
    }

    /// Normalizes `text` and encodes it word by word. Pieces never span
    /// word boundaries (no piece contains an internal boundary marker), so
    /// per-word optima compose into the global optimum.
    pub fn encode(&self, text: &str) -> Segmentation {
        let normalized = text::normalize(text);
        let mut pieces = Vec::new();
        let mut oov_originals = Vec::new();
        for word in text::split_words(&normalized) {
            let chars: Vec<char> = word.chars().collect();
            let wp = self.encode_word(&chars);
            pieces.extend(
                wp.piece_ids
                    .iter()
                    .map(|&id| self.vocab.pieces()[id as usize].text.clone()),
            );
            oov_originals.extend(wp.oov_originals);
        }
        Segmentation {
            oov_count: oov_originals.len(),
            token_count: pieces.len(),
            pieces,
            oov_originals,
        }
    }

    /// Encodes one word (or any marker-free fragment with at most a leading
    /// marker).
    pub(crate) fn encode_word(&self, chars: &[char]) -> WordPieces {
        match self.vocab.algorithm() {
            Algorithm::Unigram => self.viterbi_word(chars),
            Algorithm::Bpe => self.replay_word(chars),
        }
    }

    /// Optimal segmentation of one word over a lattice of piece arcs plus a
    /// single-character UNK arc at every position. Paths are ranked by
    /// fewest UNK arcs, then highest total score, then fewest pieces, then
    /// lexicographically smallest piece sequence; the UNK-count key comes
    /// first so real pieces are never displaced by a well-scored UNK.
    ///
    /// The DP runs backward so each node stores its optimal suffix; at a
    /// node, candidates whose first pieces differ are ordered by that piece
    /// alone (sequence order never needs the tails, because equal texts
    /// imply the same arc).
    fn viterbi_word(&self, chars: &[char]) -> WordPieces {
        let n = chars.len();
        let pieces = self.vocab.pieces();
        let unk_id = self.vocab.unk_index() as u32;
        let unk_score = pieces[unk_id as usize].score;
        let mut best_unk = vec![u32::MAX; n + 1];
        let mut best_score = vec![f64::NEG_INFINITY; n + 1];
        let mut best_count = vec![0u32; n + 1];
        let mut best_piece = vec![u32::MAX; n + 1];
        let mut best_len = vec![0usize; n + 1];
        best_unk[n] = 0;
        best_score[n] = 0.0;
        for i in (0..n).rev() {
            // The UNK arc keeps every node reachable.
            best_unk[i] = best_unk[i + 1] + 1;
            best_score[i] = unk_score + best_score[i + 1];
            best_count[i] = best_count[i + 1] + 1;
            best_piece[i] = unk_id;
            best_len[i] = 1;
            self.trie.matches_from(chars, i, |len, id| {
                let j = i + len;
                let unk = best_unk[j];
                let score = pieces[id as usize].score + best_score[j];
                let count = best_count[j] + 1;
                let better = unk < best_unk[i]
                    || (unk == best_unk[i]
                        && (score > best_score[i]
                            || (score == best_score[i]
                                && (count < best_count[i]
                                    || (count == best_count[i]
                                        && pieces[id as usize].text
                                            < pieces[best_piece[i] as usize].text)))));
                if better {
                    best_unk[i] = unk;
                    best_score[i] = score;
                    best_count[i] = count;
                    best_piece[i] = id;
                    best_len[i] = len;
                }
            });
        }
        let mut piece_ids = Vec::new();
        let mut oov_originals = Vec::new();
        let mut pos = 0;
        while pos < n {
            piece_ids.push(best_piece[pos]);
            if best_piece[pos] == unk_id {
                oov_originals.push(String::from(chars[pos]));
            }
            pos += best_len[pos];
        }
        WordPieces {
            piece_ids,
            oov_originals,
        }
    }

    /// Greedy bpe: every character starts as its own symbol; repeatedly
    /// merge the adjacent pair whose concatenation is the lowest-ranked
    /// merge piece, leftmost first. Surviving symbols without a piece are
    /// always single characters (merges only ever build pieces) and each
    /// becomes one UNK.
    fn replay_word(&self, chars: &[char]) -> WordPieces {
        let unk_id = self.vocab.unk_index() as u32;
        // Symbols as (start, end) spans over the word.
        let mut spans: Vec<(usize, usize)> = (0..chars.len()).map(|i| (i, i + 1)).collect();
        loop {
            let mut best: Option<(f64, usize)> = None;
            for i in 0..spans.len().saturating_sub(1) {
                let concat: String = chars[spans[i].0..spans[i + 1].1].iter().collect();
                if let Some(score) = self.vocab.score_of(&concat) {
                    if score >= 1.0 && best.is_none_or(|(r, _)| score < r) {
                        best = Some((score, i));
                    }
                }
            }
            match best {
                Some((_, i)) => {
                    spans[i] = (spans[i].0, spans[i + 1].1);
                    spans.remove(i + 1);
                }
                None => break,
            }
        }
        let mut piece_ids = Vec::new();
        let mut oov_originals = Vec::new();
        for (a, b) in spans {
            let symbol: String = chars[a..b].iter().collect();
            match self.vocab.index_of(&symbol) {
                Some(id) if symbol != UNK_PIECE => piece_ids.push(id as u32),
                _ => {
                    piece_ids.push(unk_id);
                    oov_originals.push(symbol);
                }
            }
        }
        WordPieces {
            piece_ids,
            oov_originals,
        }
    }
}
