//! The vocabulary file format: one piece per line, tab-separated score.
//!
//! ```text
//! # subweave vocabulary
//! # algorithm: unigram
//! # pieces: 4
//! ▁a	-1.098612
//! ...
//! ```
//!
//! Scores are written with six decimal places, which keeps unigram
//! vocabularies within the normalization tolerance and represents bpe merge
//! ranks exactly. Rows are written in canonical vocabulary order. A line is
//! a data row iff it contains a tab; tab-free lines must be comments or
//! blank, so piece texts starting with `#` stay unambiguous.

use std::path::Path;

use subweave_core::vocab::{Algorithm, Piece, Vocabulary};

use crate::error::{AppError, Result};
use crate::fsio;

/// Serializes a vocabulary.
///
/// Rows are ordered by the *rounded* scores the file will carry, not the
/// exact in-memory ones: scores that round together tie-break by text, the
/// same order a reader reconstructs. That makes writing idempotent — a
/// file equals the rewrite of its own parse — so vocabularies that agree
/// after rounding produce identical files no matter which side of a write
/// cycle they came from.
pub fn format_vocab(vocab: &Vocabulary) -> String {
    let mut rows: Vec<(f64, &str, String)> = vocab
        .pieces()
        .iter()
        .map(|piece| {
            let mut formatted = format!("{:.6}", piece.score);
            // Collapse -0.0 so the file never distinguishes signed zeros.
            if formatted == "-0.000000" {
                formatted = String::from("0.000000");
            }
            let rounded: f64 = formatted.parse().expect("fixed-decimal score parses");
            (rounded, piece.text.as_str(), formatted)
        })
        .collect();
    rows.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("scores are finite")
            .then_with(|| a.1.cmp(b.1))
    });
    let mut out = String::new();
    out.push_str("# subweave vocabulary\n");
    out.push_str(&format!("# algorithm: {}\n", vocab.algorithm().name()));
    out.push_str(&format!("# pieces: {}\n", vocab.len()));
    for (_, text, formatted) in rows {
        out.push_str(&format!("{text}\t{formatted}\n"));
    }
    out
}

/// Writes a vocabulary file atomically.
pub fn write_vocab(path: &Path, vocab: &Vocabulary) -> Result<()> {
    fsio::write_atomic(path, format_vocab(vocab).as_bytes())
}

/// Reads and validates a vocabulary file.
pub fn read_vocab(path: &Path) -> Result<Vocabulary> {
    let text = fsio::read_to_string(path)?;
    parse_vocab(&text).map_err(|msg| AppError::Io(format!("{}: {msg}", path.display())))
}

fn parse_vocab(text: &str) -> std::result::Result<Vocabulary, String> {
    let mut algorithm = None;
    let mut pieces = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if let Some((piece, score)) = line.split_once('\t') {
            if piece.is_empty() {
                return Err(format!("line {}: empty piece", idx + 1));
            }
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| format!("line {}: invalid score {score:?}", idx + 1))?;
            pieces.push(Piece {
                text: piece.to_string(),
                score,
            });
        } else if let Some(rest) = line.trim().strip_prefix('#') {
            if let Some(value) = rest.trim().strip_prefix("algorithm:") {
                algorithm = Some(
                    Algorithm::parse(value.trim())
                        .ok_or_else(|| format!("line {}: unknown algorithm {value:?}", idx + 1))?,
                );
            }
        } else if !line.trim().is_empty() {
            return Err(format!("line {}: expected `piece<TAB>score`", idx + 1));
        }
    }
    let algorithm = algorithm.ok_or("missing `# algorithm:` header")?;
    let vocab = Vocabulary::new(algorithm, pieces).map_err(|e| e.to_string())?;
    vocab.validate_normalized().map_err(|e| e.to_string())?;
    Ok(vocab)
}
