//! Language-tagged corpora, sampling weights, and coverage alphabets.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::text::{self, BOUNDARY, UNK_STAND_IN};
use crate::{Error, Result};

/// A language-tagged collection of sentences.
///
/// Sentences are stored raw (pre-normalization) in input order, are valid
/// Unicode by construction, and never contain the reserved boundary marker
/// U+2581.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageCorpus {
    language: String,
    sentences: Vec<String>,
}

impl LanguageCorpus {
    /// Builds a corpus from lines of text. Empty lines are dropped; a line
    /// containing U+2581 is rejected with its 1-based line number.
    pub fn from_lines<I, S>(language: impl Into<String>, lines: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut sentences = Vec::new();
        for (i, line) in lines.into_iter().enumerate() {
            let line = line.into();
            if line.contains(BOUNDARY) {
                return Err(Error::BoundaryMarkerInSentence { line: i + 1 });
            }
            if !line.is_empty() {
                sentences.push(line);
            }
        }
        Ok(LanguageCorpus {
            language: language.into(),
            sentences,
        })
    }

    /// The language code this corpus is tagged with.
    pub fn language(&self) -> &str {
        &self.language
    }

    /// Sentences in input order.
    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }

    /// Number of sentences (the corpus size used for sampling weights).
    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    /// A corpus holding the first `cap` sentences (all of them if fewer).
    pub fn truncated(&self, cap: usize) -> LanguageCorpus {
        LanguageCorpus {
            language: self.language.clone(),
            sentences: self.sentences.iter().take(cap).cloned().collect(),
        }
    }
}

/// Per-language sampling weights with exponential smoothing.
///
/// Raw proportions are corpus sizes normalized to sum 1; smoothing raises
/// each proportion to `smoothing_exponent` in (0, 1] and renormalizes, which
/// shifts weight toward smaller corpora.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingDistribution {
    weights: Vec<(String, f64)>,
    smoothing_exponent: f64,
}

impl SamplingDistribution {
    /// Weights in corpus input order; they sum to 1.
    pub fn weights(&self) -> &[(String, f64)] {
        &self.weights
    }

    /// The weight of one language, if present.
    pub fn weight(&self, language: &str) -> Option<f64> {
        self.weights
            .iter()
            .find(|(l, _)| l == language)
            .map(|&(_, w)| w)
    }

    /// The smoothing exponent the weights were built with.
    pub fn smoothing_exponent(&self) -> f64 {
        self.smoothing_exponent
    }
}

/// Computes smoothed sampling weights over the given corpora.
///
/// With proportions `p_l = n_l / Σ n`, the weight of language `l` is
/// `p_l^α / Σ p^α`. Languages must be distinct and at least one corpus must
/// be non-empty; an empty corpus gets weight 0.
pub fn sampling_distribution(
    corpora: &[LanguageCorpus],
    smoothing_exponent: f64,
) -> Result<SamplingDistribution> {
    if !(smoothing_exponent > 0.0 && smoothing_exponent <= 1.0) {
        return Err(Error::InvalidSmoothingExponent(smoothing_exponent));
    }
    let mut seen = BTreeSet::new();
    for c in corpora {
        if !seen.insert(c.language()) {
            return Err(Error::DuplicateLanguage(String::from(c.language())));
        }
    }
    let total: u64 = corpora.iter().map(|c| c.sentence_count() as u64).sum();
    if total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let smoothed: Vec<f64> = corpora
        .iter()
        .map(|c| {
            let p = c.sentence_count() as f64 / total as f64;
            if p > 0.0 {
                libm::pow(p, smoothing_exponent)
            } else {
                0.0
            }
        })
        .collect();
    let z: f64 = smoothed.iter().sum();
    let weights = corpora
        .iter()
        .zip(&smoothed)
        .map(|(c, &s)| (String::from(c.language()), s / z))
        .collect();
    Ok(SamplingDistribution {
        weights,
        smoothing_exponent,
    })
}

/// Character frequencies over normalized sentences, sorted by descending
/// count with ties broken by ascending code point.
pub(crate) struct CharCounts {
    pub(crate) by_freq: Vec<(char, u64)>,
    pub(crate) total: u64,
}

pub(crate) fn char_counts<'a, I>(sentences: I) -> CharCounts
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: HashMap<char, u64> = HashMap::new();
    let mut total = 0u64;
    for sentence in sentences {
        for c in text::normalize(sentence).chars() {
            if c == UNK_STAND_IN {
                continue;
            }
            *counts.entry(c).or_insert(0) += 1;
            total += 1;
        }
    }
    let mut by_freq: Vec<(char, u64)> = counts.into_iter().collect();
    by_freq.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    CharCounts { by_freq, total }
}

pub(crate) fn alphabet_from_counts(counts: &CharCounts, coverage: f64) -> Result<BTreeSet<char>> {
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::InvalidCoverage(coverage));
    }
    if counts.total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut alphabet = BTreeSet::new();
    alphabet.insert(BOUNDARY);
    let mut covered: u64 = counts
        .by_freq
        .iter()
        .find(|&&(c, _)| c == BOUNDARY)
        .map_or(0, |&(_, n)| n);
    let needed = coverage * counts.total as f64;
    for &(c, n) in &counts.by_freq {
        if covered as f64 >= needed {
            break;
        }
        if alphabet.insert(c) {
            covered += n;
        }
    }
    Ok(alphabet)
}

/// The smallest character set covering at least `coverage` of the character
/// mass of the normalized sentences.
///
/// Characters are admitted by descending frequency (ties by ascending code
/// point); the boundary marker U+2581 is always included and U+FFFD never is
/// (it stands in for out-of-alphabet characters during training). Accepts
/// pooled sentences from several corpora.
pub fn coverage_alphabet<'a, I>(sentences: I, coverage: f64) -> Result<BTreeSet<char>>
where
    I: IntoIterator<Item = &'a str>,
{
    alphabet_from_counts(&char_counts(sentences), coverage)
}

/// Corpus text prepared for vocabulary training: the coverage alphabet and
/// the distinct in-alphabet fragments with their frequencies.
///
/// A fragment is a maximal run of in-alphabet characters within one word of
/// a normalized sentence; out-of-alphabet characters break words into
/// fragments and are dropped here (they surface as UNK pieces at encode
/// time, where they contribute nothing to segmentation scores). Fragments
/// are sorted for deterministic iteration.
pub(crate) struct TrainingText {
    pub(crate) alphabet: BTreeSet<char>,
    pub(crate) fragments: Vec<(Vec<char>, u64)>,
}

pub(crate) fn prepare_training_text(corpus: &LanguageCorpus, coverage: f64) -> Result<TrainingText> {
    let counts = char_counts(corpus.sentences().iter().map(String::as_str));
    let alphabet = alphabet_from_counts(&counts, coverage)?;
    let mut freqs: HashMap<String, u64> = HashMap::new();
    for sentence in corpus.sentences() {
        let normalized = text::normalize(sentence);
        for word in text::split_words(&normalized) {
            for fragment in word.split(|c| !alphabet.contains(&c)) {
                if !fragment.is_empty() {
                    *freqs.entry_ref(fragment).or_insert(0) += 1;
                }
            }
        }
    }
    if freqs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut fragments: Vec<(Vec<char>, u64)> = freqs
        .into_iter()
        .map(|(s, n)| (s.chars().collect(), n))
        .collect();
    fragments.sort_unstable();
    Ok(TrainingText {
        alphabet,
        fragments,
    })
}
