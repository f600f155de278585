//! Text normalization and the word-boundary marker convention.
//!
//! Sentences are NFKC-normalized and every word is prefixed with the meta
//! symbol U+2581 in place of the whitespace that preceded it. Segmentation is
//! lossless under this convention: mapping U+2581 back to a space and
//! stripping the leading space recovers the pre-marker text.

use alloc::string::String;
use alloc::vec::Vec;
use unicode_normalization::UnicodeNormalization;

/// Word-boundary marker prefixed to every word during normalization.
pub const BOUNDARY: char = '\u{2581}';

/// Text of the unknown piece; emitted once per out-of-alphabet character.
pub const UNK_PIECE: &str = "<unk>";

/// Stand-in character for out-of-alphabet characters during training.
///
/// U+FFFD never enters a coverage alphabet (see
/// [`coverage_alphabet`](crate::corpus::coverage_alphabet)), so real
/// occurrences in a corpus are themselves treated as unknown-class.
pub(crate) const UNK_STAND_IN: char = '\u{FFFD}';

fn is_separator(c: char) -> bool {
    c.is_whitespace() || c == BOUNDARY
}

/// Normalizes text for segmentation: NFKC, whitespace runs collapsed, each
/// word prefixed with [`BOUNDARY`].
///
/// An existing U+2581 counts as a separator, which makes the function
/// idempotent: already-normalized text passes through unchanged. Text that is
/// empty or all-whitespace normalizes to the empty string.
///
/// ```
/// use subweave_core::text::normalize;
/// assert_eq!(normalize("ab cd"), "\u{2581}ab\u{2581}cd");
/// assert_eq!(normalize("a  b\tc"), "\u{2581}a\u{2581}b\u{2581}c");
/// assert_eq!(normalize("\u{2581}ab"), "\u{2581}ab");
/// ```
pub fn normalize(text: &str) -> String {
    let nfkc: String = text.nfkc().collect();
    let mut out = String::with_capacity(nfkc.len() + 4);
    for word in nfkc.split(is_separator).filter(|w| !w.is_empty()) {
        out.push(BOUNDARY);
        out.push_str(word);
    }
    out
}

/// Splits normalized text into words: maximal spans each starting at a
/// boundary marker (or at the start of the text for marker-less fragments).
pub fn split_words(normalized: &str) -> Vec<&str> {
    let mut words = Vec::new();
    let mut start = 0;
    for (i, c) in normalized.char_indices() {
        if c == BOUNDARY && i > start {
            words.push(&normalized[start..i]);
            start = i;
        }
    }
    if start < normalized.len() {
        words.push(&normalized[start..]);
    }
    words
}

/// Reverses the marker convention: each U+2581 becomes a space and one
/// leading space is stripped.
pub(crate) fn markers_to_spaces(s: &str) -> String {
    let replaced: String = s
        .chars()
        .map(|c| if c == BOUNDARY { ' ' } else { c })
        .collect();
    match replaced.strip_prefix(' ') {
        Some(rest) => String::from(rest),
        None => replaced,
    }
}
