//! Script classification of characters and pieces.
//!
//! Classes are defined by fixed Unicode block-range tables bundled with the
//! crate, so classification is bit-identical across platforms and Unicode
//! database versions. A piece belongs to a class when it contains at least
//! one character in that class's ranges; classes are not exclusive.

/// A script class backed by a fixed table of code-point ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScriptClass {
    /// Han ideographs plus Japanese kana and Korean hangul.
    Cjk,
    /// Latin letters (basic, Latin-1, and extended blocks).
    Latin,
    /// Cyrillic letters.
    Cyrillic,
    /// Arabic letters.
    Arabic,
    /// Greek letters.
    Greek,
    /// Hebrew letters.
    Hebrew,
    /// Devanagari letters.
    Devanagari,
    /// Thai letters.
    Thai,
}

/// Inclusive code-point ranges per class.
type Ranges = &'static [(u32, u32)];

const CJK: Ranges = &[
    (0x4E00, 0x9FFF),   // CJK Unified Ideographs
    (0x3400, 0x4DBF),   // CJK Unified Ideographs Extension A
    (0xF900, 0xFAFF),   // CJK Compatibility Ideographs
    (0x3040, 0x309F),   // Hiragana
    (0x30A0, 0x30FF),   // Katakana
    (0x31F0, 0x31FF),   // Katakana Phonetic Extensions
    (0xAC00, 0xD7AF),   // Hangul Syllables
    (0x1100, 0x11FF),   // Hangul Jamo
    (0x3130, 0x318F),   // Hangul Compatibility Jamo
];

const LATIN: Ranges = &[
    (0x0041, 0x005A), // A-Z
    (0x0061, 0x007A), // a-z
    (0x00C0, 0x00D6), // Latin-1 letters (excluding multiplication sign)
    (0x00D8, 0x00F6),
    (0x00F8, 0x00FF),
    (0x0100, 0x017F), // Latin Extended-A
    (0x0180, 0x024F), // Latin Extended-B
];

const CYRILLIC: Ranges = &[(0x0400, 0x04FF), (0x0500, 0x052F)];

const ARABIC: Ranges = &[(0x0600, 0x06FF), (0x0750, 0x077F), (0x08A0, 0x08FF)];

const GREEK: Ranges = &[(0x0370, 0x03FF), (0x1F00, 0x1FFF)];

const HEBREW: Ranges = &[(0x0590, 0x05FF)];

const DEVANAGARI: Ranges = &[(0x0900, 0x097F)];

const THAI: Ranges = &[(0x0E00, 0x0E7F)];

impl ScriptClass {
    /// Every class, in report order.
    pub const ALL: [ScriptClass; 8] = [
        ScriptClass::Cjk,
        ScriptClass::Latin,
        ScriptClass::Cyrillic,
        ScriptClass::Arabic,
        ScriptClass::Greek,
        ScriptClass::Hebrew,
        ScriptClass::Devanagari,
        ScriptClass::Thai,
    ];

    /// Stable lowercase name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            ScriptClass::Cjk => "cjk",
            ScriptClass::Latin => "latin",
            ScriptClass::Cyrillic => "cyrillic",
            ScriptClass::Arabic => "arabic",
            ScriptClass::Greek => "greek",
            ScriptClass::Hebrew => "hebrew",
            ScriptClass::Devanagari => "devanagari",
            ScriptClass::Thai => "thai",
        }
    }

    /// Parses a name produced by [`ScriptClass::name`].
    pub fn parse(name: &str) -> Option<ScriptClass> {
        ScriptClass::ALL.iter().copied().find(|c| c.name() == name)
    }

    fn ranges(self) -> Ranges {
        match self {
            ScriptClass::Cjk => CJK,
            ScriptClass::Latin => LATIN,
            ScriptClass::Cyrillic => CYRILLIC,
            ScriptClass::Arabic => ARABIC,
            ScriptClass::Greek => GREEK,
            ScriptClass::Hebrew => HEBREW,
            ScriptClass::Devanagari => DEVANAGARI,
            ScriptClass::Thai => THAI,
        }
    }

    /// Whether `c` falls in one of this class's ranges.
    pub fn contains(self, c: char) -> bool {
        let cp = c as u32;
        self.ranges().iter().any(|&(lo, hi)| lo <= cp && cp <= hi)
    }

    /// Whether `piece` contains at least one character of this class.
    pub fn matches_piece(self, piece: &str) -> bool {
        piece.chars().any(|c| self.contains(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_representative_characters() {
        assert!(ScriptClass::Cjk.contains('語'));
        assert!(ScriptClass::Cjk.contains('あ'));
        assert!(ScriptClass::Cjk.contains('한'));
        assert!(ScriptClass::Latin.contains('a'));
        assert!(ScriptClass::Latin.contains('é'));
        assert!(ScriptClass::Cyrillic.contains('ж'));
        assert!(ScriptClass::Arabic.contains('ب'));
        assert!(ScriptClass::Greek.contains('λ'));
        assert!(ScriptClass::Hebrew.contains('ש'));
        assert!(ScriptClass::Devanagari.contains('क'));
        assert!(ScriptClass::Thai.contains('ก'));
        assert!(!ScriptClass::Cjk.contains('a'));
        assert!(!ScriptClass::Latin.contains('ж'));
        assert!(!ScriptClass::Latin.contains('▁'));
        assert!(!ScriptClass::Latin.contains('×'));
    }

    #[test]
    fn piece_matches_on_any_character() {
        assert!(ScriptClass::Cjk.matches_piece("▁日本"));
        assert!(ScriptClass::Latin.matches_piece("▁日本a"));
        assert!(!ScriptClass::Cjk.matches_piece("▁abc"));
    }

    #[test]
    fn names_round_trip() {
        for class in ScriptClass::ALL {
            assert_eq!(ScriptClass::parse(class.name()), Some(class));
        }
        assert_eq!(ScriptClass::parse("klingon"), None);
    }
}
