//! Intrinsic vocabulary-quality metrics.
//!
//! Everything here is a pure function of a vocabulary and corpora: piece
//! usage distributions and their Wasserstein-1 distance, description length
//! (mean pieces per sentence), OOV rate, and script composition. Raw values
//! only; display scaling belongs to report rendering.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;

use crate::corpus::{LanguageCorpus, SamplingDistribution};
use crate::script::ScriptClass;
use crate::segment::{Segmenter, WordPieces};
use crate::text::{self, UNK_PIECE};
use crate::vocab::Vocabulary;
use crate::{Error, Result};

/// How often each piece of a vocabulary is used when encoding a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SubwordDistribution {
    vocab_ref: u64,
    probs: Vec<f64>,
}

impl SubwordDistribution {
    /// Builds a distribution over `vocab` from explicit probabilities, one
    /// per canonical piece index. They must be finite, non-negative, and
    /// sum to 1 within 1e-9.
    pub fn from_probs(vocab: &Vocabulary, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != vocab.len() {
            return Err(Error::DistributionMismatch);
        }
        let mut total = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidConfig(String::from(
                    "probabilities must be finite and non-negative",
                )));
            }
            total += p;
        }
        if libm::fabs(total - 1.0) > 1e-9 {
            return Err(Error::InvalidConfig(String::from(
                "probabilities must sum to 1",
            )));
        }
        Ok(SubwordDistribution {
            vocab_ref: vocab.identity_hash(),
            probs,
        })
    }

    /// Identity hash of the vocabulary the probabilities are indexed by.
    pub fn vocab_ref(&self) -> u64 {
        self.vocab_ref
    }

    /// Probability per canonical piece index (UNK included); sums to 1.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Per-piece usage counts over a corpus, shared by the metrics below.
struct UsageCounts {
    counts: Vec<u64>,
    tokens: u64,
    oov: u64,
}

/// Segments every sentence, caching per-word results: corpora repeat words
/// heavily and pieces never span word boundaries.
fn count_usage(
    seg: &Segmenter,
    cache: &mut HashMap<String, WordPieces>,
    corpus: &LanguageCorpus,
) -> UsageCounts {
    let mut counts = vec![0u64; seg.vocab().len()];
    let mut tokens = 0u64;
    let mut oov = 0u64;
    for sentence in corpus.sentences() {
        let normalized = text::normalize(sentence);
        for word in text::split_words(&normalized) {
            let wp = cache.entry_ref(word).or_insert_with(|| {
                let chars: Vec<char> = word.chars().collect();
                seg.encode_word(&chars)
            });
            for &id in &wp.piece_ids {
                counts[id as usize] += 1;
            }
            tokens += wp.piece_ids.len() as u64;
            oov += wp.oov_originals.len() as u64;
        }
    }
    UsageCounts {
        counts,
        tokens,
        oov,
    }
}

/// The normalized piece-usage frequencies of `corpus` under `vocab`.
///
/// Every sentence is encoded and pieces are counted, UNK included. Errors
/// if the corpus produces no pieces at all.
pub fn empirical_distribution(
    vocab: &Vocabulary,
    corpus: &LanguageCorpus,
) -> Result<SubwordDistribution> {
    let seg = Segmenter::new(vocab);
    let mut cache = HashMap::new();
    let usage = count_usage(&seg, &mut cache, corpus);
    distribution_from_counts(vocab, &usage)
}

fn distribution_from_counts(vocab: &Vocabulary, usage: &UsageCounts) -> Result<SubwordDistribution> {
    if usage.tokens == 0 {
        return Err(Error::EmptyCorpus);
    }
    let probs = usage
        .counts
        .iter()
        .map(|&c| c as f64 / usage.tokens as f64)
        .collect();
    Ok(SubwordDistribution {
        vocab_ref: vocab.identity_hash(),
        probs,
    })
}

/// Wasserstein-1 distance between two piece distributions over the same
/// vocabulary, with unit ground distance between adjacent canonical
/// indices: the sum of absolute CDF differences.
///
/// Reports conventionally display this ×1000; the raw value is returned.
pub fn wasserstein1(p: &SubwordDistribution, q: &SubwordDistribution) -> Result<f64> {
    if p.vocab_ref != q.vocab_ref || p.probs.len() != q.probs.len() {
        return Err(Error::DistributionMismatch);
    }
    let mut cdf_gap = 0.0;
    let mut w1 = 0.0;
    for (&a, &b) in p.probs.iter().zip(&q.probs) {
        cdf_gap += a - b;
        w1 += libm::fabs(cdf_gap);
    }
    Ok(w1)
}

/// Segmentation statistics of one language under one vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageStats {
    /// Language code the stats describe.
    pub language: String,
    /// Sentences in the corpus (including any that normalize to nothing).
    pub sentence_count: usize,
    /// Total pieces emitted, UNK included.
    pub token_count: u64,
    /// UNK pieces emitted (one per out-of-alphabet character).
    pub oov_count: u64,
    /// Mean pieces per sentence.
    pub mean_pieces_per_sentence: f64,
    /// UNK pieces as a fraction of all pieces.
    pub oov_rate: f64,
}

fn stats_from_counts(corpus: &LanguageCorpus, usage: &UsageCounts) -> LanguageStats {
    LanguageStats {
        language: String::from(corpus.language()),
        sentence_count: corpus.sentence_count(),
        token_count: usage.tokens,
        oov_count: usage.oov,
        mean_pieces_per_sentence: usage.tokens as f64 / corpus.sentence_count() as f64,
        oov_rate: if usage.tokens == 0 {
            0.0
        } else {
            usage.oov as f64 / usage.tokens as f64
        },
    }
}

/// Segmentation statistics for one corpus.
pub fn language_stats(vocab: &Vocabulary, corpus: &LanguageCorpus) -> LanguageStats {
    let seg = Segmenter::new(vocab);
    let mut cache = HashMap::new();
    let usage = count_usage(&seg, &mut cache, corpus);
    stats_from_counts(corpus, &usage)
}

fn weighted<F>(
    vocab: &Vocabulary,
    corpora: &[LanguageCorpus],
    sampling: &SamplingDistribution,
    value: F,
) -> Result<f64>
where
    F: Fn(&LanguageStats) -> f64,
{
    if corpora.is_empty() {
        return Err(Error::NoLanguages);
    }
    let seg = Segmenter::new(vocab);
    let mut cache = HashMap::new();
    let mut total = 0.0;
    for corpus in corpora {
        let weight = sampling.weight(corpus.language()).ok_or_else(|| {
            Error::InvalidConfig(alloc::format!(
                "no sampling weight for language {}",
                corpus.language()
            ))
        })?;
        let usage = count_usage(&seg, &mut cache, corpus);
        total += weight * value(&stats_from_counts(corpus, &usage));
    }
    Ok(total)
}

/// Expected pieces per sentence under the sampling distribution: the
/// sampling-weighted mean of each language's pieces-per-sentence average.
pub fn description_length(
    vocab: &Vocabulary,
    corpora: &[LanguageCorpus],
    sampling: &SamplingDistribution,
) -> Result<f64> {
    weighted(vocab, corpora, sampling, |s| s.mean_pieces_per_sentence)
}

/// Sampling-weighted fraction of UNK pieces among all pieces.
pub fn oov_rate(
    vocab: &Vocabulary,
    corpora: &[LanguageCorpus],
    sampling: &SamplingDistribution,
) -> Result<f64> {
    weighted(vocab, corpora, sampling, |s| s.oov_rate)
}

/// Fraction of pieces containing at least one character of the script
/// class. Mixed-script pieces count for every class they touch; the UNK
/// placeholder is excluded as it spells no real text.
pub fn script_fraction(vocab: &Vocabulary, class: ScriptClass) -> f64 {
    let mut total = 0usize;
    let mut matching = 0usize;
    for p in vocab.pieces() {
        if p.text == UNK_PIECE {
            continue;
        }
        total += 1;
        if class.matches_piece(&p.text) {
            matching += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        matching as f64 / total as f64
    }
}

/// Full intrinsic evaluation of one vocabulary against a set of corpora.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    avg_description_length: f64,
    oov_rate: f64,
    per_language: Vec<LanguageStats>,
    script_fractions: Vec<(ScriptClass, f64)>,
    languages: Vec<String>,
    w1_matrix: Vec<Vec<f64>>,
}

impl AnalysisReport {
    /// Sampling-weighted mean pieces per sentence.
    pub fn avg_description_length(&self) -> f64 {
        self.avg_description_length
    }

    /// Sampling-weighted UNK fraction.
    pub fn oov_rate(&self) -> f64 {
        self.oov_rate
    }

    /// Per-language segmentation statistics, in corpus input order.
    pub fn per_language(&self) -> &[LanguageStats] {
        &self.per_language
    }

    /// Fraction of pieces touching each script class.
    pub fn script_fractions(&self) -> &[(ScriptClass, f64)] {
        &self.script_fractions
    }

    /// Languages indexing the Wasserstein-1 matrix.
    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    /// Pairwise Wasserstein-1 distances between the languages' piece
    /// distributions: symmetric, zero diagonal, raw scale.
    pub fn w1_matrix(&self) -> &[Vec<f64>] {
        &self.w1_matrix
    }
}

/// Evaluates `vocab` on `corpora`: weighted description length and OOV
/// rate, per-language statistics, script fractions, and the pairwise
/// Wasserstein-1 matrix.
pub fn analyze(
    vocab: &Vocabulary,
    corpora: &[LanguageCorpus],
    sampling: &SamplingDistribution,
) -> Result<AnalysisReport> {
    if corpora.is_empty() {
        return Err(Error::NoLanguages);
    }
    let seg = Segmenter::new(vocab);
    let mut cache = HashMap::new();
    let mut per_language = Vec::with_capacity(corpora.len());
    let mut distributions = Vec::with_capacity(corpora.len());
    let mut avg_dl = 0.0;
    let mut avg_oov = 0.0;
    for corpus in corpora {
        let weight = sampling.weight(corpus.language()).ok_or_else(|| {
            Error::InvalidConfig(alloc::format!(
                "no sampling weight for language {}",
                corpus.language()
            ))
        })?;
        let usage = count_usage(&seg, &mut cache, corpus);
        let stats = stats_from_counts(corpus, &usage);
        avg_dl += weight * stats.mean_pieces_per_sentence;
        avg_oov += weight * stats.oov_rate;
        per_language.push(stats);
        distributions.push(distribution_from_counts(vocab, &usage)?);
    }
    let n = corpora.len();
    let mut w1_matrix = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = wasserstein1(&distributions[i], &distributions[j])?;
            w1_matrix[i][j] = d;
            w1_matrix[j][i] = d;
        }
    }
    Ok(AnalysisReport {
        avg_description_length: avg_dl,
        oov_rate: avg_oov,
        per_language,
        script_fractions: ScriptClass::ALL
            .iter()
            .map(|&c| (c, script_fraction(vocab, c)))
            .collect(),
        languages: corpora.iter().map(|c| String::from(c.language())).collect(),
        w1_matrix,
    })
}

/// Two vocabularies evaluated on the same corpora, for side-by-side
/// comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Report for the first vocabulary.
    pub left: AnalysisReport,
    /// Report for the second vocabulary.
    pub right: AnalysisReport,
}

impl Comparison {
    /// Description-length difference, right minus left.
    pub fn description_length_delta(&self) -> f64 {
        self.right.avg_description_length - self.left.avg_description_length
    }

    /// OOV-rate difference, right minus left.
    pub fn oov_rate_delta(&self) -> f64 {
        self.right.oov_rate - self.left.oov_rate
    }

    /// Per-language (language, right − left) deltas for mean pieces per
    /// sentence and OOV rate, in corpus input order.
    pub fn per_language_deltas(&self) -> Vec<(String, f64, f64)> {
        self.left
            .per_language
            .iter()
            .zip(&self.right.per_language)
            .map(|(l, r)| {
                (
                    l.language.clone(),
                    r.mean_pieces_per_sentence - l.mean_pieces_per_sentence,
                    r.oov_rate - l.oov_rate,
                )
            })
            .collect()
    }
}

/// Evaluates two vocabularies on the same corpora.
pub fn compare(
    left: &Vocabulary,
    right: &Vocabulary,
    corpora: &[LanguageCorpus],
    sampling: &SamplingDistribution,
) -> Result<Comparison> {
    Ok(Comparison {
        left: analyze(left, corpora, sampling)?,
        right: analyze(right, corpora, sampling)?,
    })
}
