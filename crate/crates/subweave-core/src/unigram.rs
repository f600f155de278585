//! Unigram language-model vocabulary trainer.
//!
//! Training seeds a large candidate pool from corpus substrings, fits piece
//! probabilities with EM over per-fragment segmentation lattices, and
//! alternates EM with pruning rounds that remove the candidates whose
//! removal least increases corpus negative log-likelihood, until the
//! vocabulary reaches its target size.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::corpus::{prepare_training_text, LanguageCorpus, TrainingText};
use crate::text::UNK_PIECE;
use crate::vocab::{Algorithm, Piece, Vocabulary, SPECIALS};
use crate::{Error, Result};

/// Score assigned when a piece's probability underflows to zero: just below
/// the log of the smallest positive double, so scores stay finite while the
/// piece keeps a representable (subnormal) lattice weight.
const SCORE_FLOOR: f64 = -745.0;

/// Knobs shared by both trainers.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainerConfig {
    /// Total pieces in the result, specials and alphabet included.
    pub target_size: usize,
    /// Which trainer pipeline stages dispatch to.
    pub algorithm: Algorithm,
    /// Fraction of corpus character mass the alphabet must cover.
    pub character_coverage: f64,
    /// Maximum number of seed candidates kept, capped by the number of
    /// distinct substrings (unigram only).
    pub seed_size: usize,
    /// Maximum piece length in characters.
    pub max_piece_length: usize,
    /// E/M sweeps per training round (unigram only).
    pub em_iterations_per_round: usize,
    /// Fraction of surviving candidates removed per pruning round, in (0,1)
    /// (unigram only).
    pub prune_fraction: f64,
    /// Seed for pipeline stages that sample (clustering restarts). Both
    /// trainers are deterministic and do not read it.
    pub random_seed: u64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            target_size: 8000,
            algorithm: Algorithm::Unigram,
            character_coverage: 0.9995,
            seed_size: 1_000_000,
            max_piece_length: 16,
            em_iterations_per_round: 2,
            prune_fraction: 0.25,
            random_seed: 0,
        }
    }
}

impl TrainerConfig {
    /// The default configuration, targeting `target_size` pieces.
    pub fn with_target_size(target_size: usize) -> Self {
        TrainerConfig {
            target_size,
            ..TrainerConfig::default()
        }
    }

    /// Checks every field's range.
    pub fn validate(&self) -> Result<()> {
        if self.target_size == 0 {
            return Err(Error::InvalidConfig(String::from(
                "target_size must be positive",
            )));
        }
        if !(self.character_coverage > 0.0 && self.character_coverage <= 1.0) {
            return Err(Error::InvalidCoverage(self.character_coverage));
        }
        if self.seed_size == 0 {
            return Err(Error::InvalidConfig(String::from(
                "seed_size must be positive",
            )));
        }
        if self.max_piece_length == 0 {
            return Err(Error::InvalidConfig(String::from(
                "max_piece_length must be positive",
            )));
        }
        if self.em_iterations_per_round == 0 {
            return Err(Error::InvalidConfig(String::from(
                "em_iterations_per_round must be positive",
            )));
        }
        if !(self.prune_fraction > 0.0 && self.prune_fraction < 1.0) {
            return Err(Error::InvalidConfig(String::from(
                "prune_fraction must lie in (0, 1)",
            )));
        }
        Ok(())
    }
}

/// Diagnostics recorded while training a unigram vocabulary.
#[derive(Debug, Clone, Default)]
pub struct TrainTrace {
    /// Corpus NLL measured by each E-step, one inner vector per EM run
    /// (training rounds in order, then the final pass). Within a run the
    /// sequence never increases.
    pub em_nll: Vec<Vec<f64>>,
    /// One record per pruning round. Populated by
    /// [`train_unigram_with_trace`] only; plain training skips the copies.
    pub prune_rounds: Vec<PruneRound>,
}

/// What one pruning round evaluated and removed.
#[derive(Debug, Clone)]
pub struct PruneRound {
    /// Corpus NLL under the scores the round evaluated.
    pub nll_before: f64,
    /// Pieces alive when the round ran (alphabet included, UNK excluded)
    /// with the scores the deltas were computed against.
    pub pieces: Vec<(String, f64)>,
    /// NLL increase from removing each candidate alone, ascending with ties
    /// by piece text.
    pub deltas: Vec<(String, f64)>,
    /// Removed candidates: the leading entries of `deltas`.
    pub pruned: Vec<String>,
}

/// Trains a unigram vocabulary of exactly `config.target_size` pieces.
///
/// Deterministic: the same corpus and config always produce the same
/// vocabulary, bit for bit.
pub fn train_unigram(corpus: &LanguageCorpus, config: &TrainerConfig) -> Result<Vocabulary> {
    Ok(train_impl(corpus, config, false)?.0)
}

/// Like [`train_unigram`], also returning per-iteration NLL measurements and
/// pruning-round records for inspection.
pub fn train_unigram_with_trace(
    corpus: &LanguageCorpus,
    config: &TrainerConfig,
) -> Result<(Vocabulary, TrainTrace)> {
    train_impl(corpus, config, true)
}

fn train_impl(
    corpus: &LanguageCorpus,
    config: &TrainerConfig,
    want_trace: bool,
) -> Result<(Vocabulary, TrainTrace)> {
    config.validate()?;
    let text = prepare_training_text(corpus, config.character_coverage)?;
    let floor = text.alphabet.len() + SPECIALS;
    if config.target_size < floor {
        return Err(Error::TargetSizeBelowFloor {
            target: config.target_size,
            floor,
        });
    }
    let mut state = TrainState::seed(&text, config);
    let available = floor + state.alive_candidates;
    if available < config.target_size {
        return Err(Error::TargetSizeUnreachable {
            target: config.target_size,
            available,
        });
    }
    let mut trace = TrainTrace::default();
    loop {
        trace.em_nll.push(state.run_em(config.em_iterations_per_round));
        if floor + state.alive_candidates <= config.target_size {
            break;
        }
        if let Some(round) = state.prune_round(config, floor, want_trace) {
            trace.prune_rounds.push(round);
        }
    }
    trace.em_nll.push(state.run_em(config.em_iterations_per_round));
    Ok((state.into_vocabulary()?, trace))
}

/// One lattice arc: `piece` spans `chars[start .. start + len]`.
#[derive(Debug, Clone, Copy)]
struct Arc {
    start: u32,
    len: u32,
    piece: u32,
}

/// A distinct training fragment with its corpus frequency and the arcs of
/// every surviving piece occurring in it, sorted by (start, len).
struct Fragment {
    chars_len: usize,
    freq: u64,
    arcs: Vec<Arc>,
}

struct TrainState {
    /// Piece texts: alphabet characters first (ascending), then candidates.
    texts: Vec<String>,
    /// Current log-probabilities, parallel to `texts`.
    scores: Vec<f64>,
    alive: Vec<bool>,
    alphabet_len: usize,
    alive_candidates: usize,
    fragments: Vec<Fragment>,
    /// Scratch buffers reused across fragments.
    counts: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    skip_alpha: Vec<f64>,
}

/// No-piece sentinel for the skip parameter of [`forward`].
const SKIP_NONE: u32 = u32::MAX;

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}

/// Total lattice log-probability of one fragment, optionally excluding one
/// piece. Fills `alpha[i]` with the log-probability mass of all partial
/// segmentations covering the first `i` characters.
fn forward(frag: &Fragment, scores: &[f64], skip: u32, alpha: &mut Vec<f64>) -> f64 {
    let n = frag.chars_len;
    alpha.clear();
    alpha.resize(n + 1, f64::NEG_INFINITY);
    alpha[0] = 0.0;
    for arc in &frag.arcs {
        if arc.piece == skip {
            continue;
        }
        let end = (arc.start + arc.len) as usize;
        let reach = alpha[arc.start as usize] + scores[arc.piece as usize];
        alpha[end] = logaddexp(alpha[end], reach);
    }
    alpha[n]
}

/// Backward counterpart of [`forward`]: `beta[i]` is the log-probability
/// mass of all segmentations of the suffix starting at `i`.
fn backward(frag: &Fragment, scores: &[f64], beta: &mut Vec<f64>) {
    let n = frag.chars_len;
    beta.clear();
    beta.resize(n + 1, f64::NEG_INFINITY);
    beta[n] = 0.0;
    for arc in frag.arcs.iter().rev() {
        let start = arc.start as usize;
        let end = (arc.start + arc.len) as usize;
        let reach = scores[arc.piece as usize] + beta[end];
        beta[start] = logaddexp(beta[start], reach);
    }
}

impl TrainState {
    /// Builds the initial piece table and per-fragment arc lists.
    ///
    /// Candidates are every distinct fragment substring of 2 to
    /// `max_piece_length` characters, scored by frequency × length; the top
    /// `seed_size` survive. Initial probabilities are proportional to those
    /// scores, with alphabet characters weighted by their raw frequency.
    fn seed(text: &TrainingText, config: &TrainerConfig) -> TrainState {
        let mut char_weight: HashMap<char, u64> = HashMap::new();
        let mut sub_counts: HashMap<String, u64> = HashMap::new();
        let mut buf = String::new();
        for (chars, freq) in &text.fragments {
            for &c in chars {
                *char_weight.entry(c).or_insert(0) += freq;
            }
            let n = chars.len();
            for i in 0..n {
                let max_len = config.max_piece_length.min(n - i);
                for len in 2..=max_len {
                    buf.clear();
                    buf.extend(&chars[i..i + len]);
                    // A corpus substring spelling the UNK literal cannot
                    // become a piece.
                    if buf != UNK_PIECE {
                        *sub_counts.entry_ref(buf.as_str()).or_insert(0) += freq;
                    }
                }
            }
        }
        let mut candidates: Vec<(String, u64)> = sub_counts
            .into_iter()
            .map(|(s, c)| {
                let w = c * s.chars().count() as u64;
                (s, w)
            })
            .collect();
        candidates.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        candidates.truncate(config.seed_size);

        let mut texts: Vec<String> = Vec::with_capacity(text.alphabet.len() + candidates.len());
        let mut weights: Vec<f64> = Vec::with_capacity(texts.capacity());
        for &c in &text.alphabet {
            texts.push(String::from(c));
            weights.push(char_weight.get(&c).copied().unwrap_or(0).max(1) as f64);
        }
        let alphabet_len = texts.len();
        for (s, w) in candidates {
            texts.push(s);
            weights.push(w as f64);
        }
        let total: f64 = weights.iter().sum();
        let scores: Vec<f64> = weights.iter().map(|w| libm::log(w / total)).collect();

        let fragments = {
            let mut index: HashMap<&str, u32> = HashMap::with_capacity(texts.len());
            for (i, t) in texts.iter().enumerate() {
                index.insert(t.as_str(), i as u32);
            }
            text.fragments
                .iter()
                .map(|(chars, freq)| {
                    let n = chars.len();
                    let mut arcs = Vec::new();
                    for i in 0..n {
                        let max_len = config.max_piece_length.min(n - i);
                        for len in 1..=max_len {
                            buf.clear();
                            buf.extend(&chars[i..i + len]);
                            if let Some(&piece) = index.get(buf.as_str()) {
                                arcs.push(Arc {
                                    start: i as u32,
                                    len: len as u32,
                                    piece,
                                });
                            }
                        }
                    }
                    Fragment {
                        chars_len: n,
                        freq: *freq,
                        arcs,
                    }
                })
                .collect()
        };

        let n_pieces = texts.len();
        let alive_candidates = n_pieces - alphabet_len;
        TrainState {
            texts,
            scores,
            alive: vec![true; n_pieces],
            alphabet_len,
            alive_candidates,
            fragments,
            counts: vec![0.0; n_pieces],
            alpha: Vec::new(),
            beta: Vec::new(),
            skip_alpha: Vec::new(),
        }
    }

    /// Runs `iterations` E/M sweeps; returns the NLL each E-step measured
    /// (the likelihood of the parameters entering that sweep).
    fn run_em(&mut self, iterations: usize) -> Vec<f64> {
        (0..iterations).map(|_| self.em_iteration()).collect()
    }

    fn em_iteration(&mut self) -> f64 {
        let mut counts = core::mem::take(&mut self.counts);
        let mut alpha = core::mem::take(&mut self.alpha);
        let mut beta = core::mem::take(&mut self.beta);
        counts.iter_mut().for_each(|c| *c = 0.0);
        let mut nll = 0.0;
        for frag in &self.fragments {
            let logz = forward(frag, &self.scores, SKIP_NONE, &mut alpha);
            backward(frag, &self.scores, &mut beta);
            let freq = frag.freq as f64;
            nll -= freq * logz;
            for arc in &frag.arcs {
                let end = (arc.start + arc.len) as usize;
                let log_post = alpha[arc.start as usize]
                    + self.scores[arc.piece as usize]
                    + beta[end]
                    - logz;
                counts[arc.piece as usize] += freq * libm::exp(log_post);
            }
        }
        let total: f64 = counts
            .iter()
            .zip(&self.alive)
            .filter(|&(_, &a)| a)
            .map(|(&c, _)| c)
            .sum();
        for i in 0..self.scores.len() {
            if !self.alive[i] {
                continue;
            }
            let p = counts[i] / total;
            self.scores[i] = if p > 0.0 {
                libm::log(p).min(0.0)
            } else {
                SCORE_FLOOR
            };
        }
        self.counts = counts;
        self.alpha = alpha;
        self.beta = beta;
        nll
    }

    /// Removes the candidates whose individual removal least increases the
    /// corpus NLL: `min(max(1, ⌊prune_fraction × alive⌋), excess over
    /// target)` of them, so the count never drops below the target.
    ///
    /// Deltas are exact. A candidate with one arc in a fragment adjusts that
    /// fragment's total via log Z' = log Z + log(1 − e^x) with x the arc's
    /// log-posterior; repeated arcs (or x near 0, where the subtraction
    /// loses precision) fall back to a full re-forward excluding the piece.
    fn prune_round(
        &mut self,
        config: &TrainerConfig,
        floor: usize,
        want_trace: bool,
    ) -> Option<PruneRound> {
        let mut delta = vec![0.0f64; self.texts.len()];
        let mut alpha = core::mem::take(&mut self.alpha);
        let mut beta = core::mem::take(&mut self.beta);
        let mut skip_alpha = core::mem::take(&mut self.skip_alpha);
        let mut nll_before = 0.0;
        // (piece, arc index) pairs for one fragment, grouped by piece.
        let mut frag_candidates: Vec<(u32, usize)> = Vec::new();
        for frag in &self.fragments {
            let logz = forward(frag, &self.scores, SKIP_NONE, &mut alpha);
            backward(frag, &self.scores, &mut beta);
            let freq = frag.freq as f64;
            nll_before -= freq * logz;
            frag_candidates.clear();
            for (ai, arc) in frag.arcs.iter().enumerate() {
                if arc.piece as usize >= self.alphabet_len {
                    frag_candidates.push((arc.piece, ai));
                }
            }
            frag_candidates.sort_unstable();
            let mut g = 0;
            while g < frag_candidates.len() {
                let piece = frag_candidates[g].0;
                let mut h = g + 1;
                while h < frag_candidates.len() && frag_candidates[h].0 == piece {
                    h += 1;
                }
                let mut exact = f64::NAN;
                if h - g == 1 {
                    let arc = frag.arcs[frag_candidates[g].1];
                    let end = (arc.start + arc.len) as usize;
                    let x = alpha[arc.start as usize] + self.scores[piece as usize] + beta[end]
                        - logz;
                    // x carries ~1e-16 absolute noise from the lattice
                    // sums, so the shortcut is only trusted where that
                    // noise is far below |x|; nearer 0 the re-forward is
                    // the accurate side (removal moves log Z a lot).
                    if x < -1e-6 {
                        exact = -freq * libm::log(-libm::expm1(x));
                    }
                }
                if exact.is_nan() {
                    let logz2 = forward(frag, &self.scores, piece, &mut skip_alpha);
                    exact = freq * (logz - logz2);
                }
                delta[piece as usize] += exact;
                g = h;
            }
        }
        self.alpha = alpha;
        self.beta = beta;
        self.skip_alpha = skip_alpha;

        let mut order: Vec<u32> = (self.alphabet_len..self.texts.len())
            .filter(|&i| self.alive[i])
            .map(|i| i as u32)
            .collect();
        order.sort_unstable_by(|&a, &b| {
            delta[a as usize]
                .partial_cmp(&delta[b as usize])
                .expect("deltas are finite")
                .then_with(|| self.texts[a as usize].cmp(&self.texts[b as usize]))
        });
        let excess = floor + self.alive_candidates - config.target_size;
        let by_fraction = (config.prune_fraction * self.alive_candidates as f64) as usize;
        let n_prune = by_fraction.max(1).min(excess);
        // Snapshot before mutation: the state the deltas were computed in.
        let round = want_trace.then(|| PruneRound {
            nll_before,
            pieces: self
                .texts
                .iter()
                .zip(&self.scores)
                .zip(&self.alive)
                .filter(|&(_, &alive)| alive)
                .map(|((t, &s), _)| (t.clone(), s))
                .collect(),
            deltas: order
                .iter()
                .map(|&p| (self.texts[p as usize].clone(), delta[p as usize]))
                .collect(),
            pruned: order[..n_prune]
                .iter()
                .map(|&p| self.texts[p as usize].clone())
                .collect(),
        });
        for &p in &order[..n_prune] {
            self.alive[p as usize] = false;
        }
        self.alive_candidates -= n_prune;
        for frag in &mut self.fragments {
            frag.arcs.retain(|a| self.alive[a.piece as usize]);
        }
        round
    }

    fn into_vocabulary(self) -> Result<Vocabulary> {
        let pieces: Vec<Piece> = self
            .texts
            .into_iter()
            .zip(self.scores)
            .zip(self.alive)
            .filter(|&(_, alive)| alive)
            .map(|((text, score), _)| Piece { text, score })
            .collect();
        let vocab = Vocabulary::new(Algorithm::Unigram, pieces)?;
        vocab.validate_normalized()?;
        Ok(vocab)
    }
}
