//! End-to-end vocabulary construction.
//!
//! Stages: train one vocabulary per language, union them into a global
//! vocabulary, encode each language as a binary vector over it, cluster the
//! vectors, apportion the total budget across clusters by union size, train
//! one vocabulary per cluster on its pooled corpora, and union those into
//! the final vocabulary. With k = 1 the result is byte-identical to joint
//! training on everything at once.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::allocate::{allocate_sizes, AllocationPlan};
use crate::cluster::{encode_language, kmeans_with_restarts, ClusterModel, LanguageVector};
use crate::corpus::{coverage_alphabet, LanguageCorpus};
use crate::unigram::TrainerConfig;
use crate::vocab::{union_vocab, Algorithm, Vocabulary, SPECIALS};
use crate::{Error, Result};

/// Maximum number of budget inflations when a target final size is set.
const INFLATE_PASSES: usize = 5;

/// Everything a full run needs beyond the corpora themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Number of language clusters; 1 reproduces joint training.
    pub k: usize,
    /// Total vocabulary budget apportioned across clusters.
    pub total_size: usize,
    /// Target size of each per-language vocabulary.
    pub per_language_size: usize,
    /// Exponent smoothing the per-cluster corpus sampling weights.
    pub smoothing_exponent: f64,
    /// k-means restarts; the lowest-inertia run wins.
    pub restarts: usize,
    /// Cap on pooled sentences per cluster, apportioned over member
    /// languages by smoothed weight. None pools everything.
    pub cluster_sentence_budget: Option<usize>,
    /// If set, inflate the budget until the final union reaches this size
    /// (bounded number of passes; overlap makes the union smaller than the
    /// budget).
    pub target_final_size: Option<usize>,
    /// Trainer settings; `target_size` is overridden per stage and
    /// `random_seed` drives clustering.
    pub trainer: TrainerConfig,
}

impl PipelineConfig {
    /// Default settings for a run with `k` clusters and a total budget.
    pub fn new(k: usize, total_size: usize) -> Self {
        PipelineConfig {
            k,
            total_size,
            per_language_size: 32_000,
            smoothing_exponent: 0.7,
            restarts: crate::cluster::DEFAULT_RESTARTS,
            cluster_sentence_budget: None,
            target_final_size: None,
            trainer: TrainerConfig::default(),
        }
    }

    /// Checks every field's range.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig(String::from("k must be positive")));
        }
        if self.total_size == 0 {
            return Err(Error::InvalidConfig(String::from(
                "total_size must be positive",
            )));
        }
        if self.per_language_size == 0 {
            return Err(Error::InvalidConfig(String::from(
                "per_language_size must be positive",
            )));
        }
        if !(self.smoothing_exponent > 0.0 && self.smoothing_exponent <= 1.0) {
            return Err(Error::InvalidSmoothingExponent(self.smoothing_exponent));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig(String::from(
                "restarts must be positive",
            )));
        }
        if self.cluster_sentence_budget == Some(0) {
            return Err(Error::InvalidConfig(String::from(
                "cluster_sentence_budget must be positive when set",
            )));
        }
        if self.target_final_size == Some(0) {
            return Err(Error::InvalidConfig(String::from(
                "target_final_size must be positive when set",
            )));
        }
        let mut trainer = self.trainer.clone();
        trainer.target_size = self.per_language_size;
        trainer.validate()
    }
}

/// All artifacts of one pipeline run, in stage order.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    /// Per-language vocabularies, in corpus input order.
    pub per_language: Vec<(String, Vocabulary)>,
    /// Union of all per-language vocabularies.
    pub global: Vocabulary,
    /// Language clustering over binary vectors.
    pub clusters: ClusterModel,
    /// How the budget was split across clusters.
    pub allocation: AllocationPlan,
    /// One vocabulary per cluster, in cluster index order.
    pub cluster_vocabs: Vec<Vocabulary>,
    /// Union of the cluster vocabularies: the model vocabulary.
    pub final_vocab: Vocabulary,
}

/// Trains one vocabulary with the configured algorithm.
pub fn train_vocabulary(corpus: &LanguageCorpus, config: &TrainerConfig) -> Result<Vocabulary> {
    match config.algorithm {
        Algorithm::Unigram => crate::unigram::train_unigram(corpus, config),
        Algorithm::Bpe => crate::bpe::train_bpe(corpus, config),
    }
}

/// Trains each language's vocabulary at `per_language_size`.
pub fn train_language_vocabs(
    corpora: &[LanguageCorpus],
    config: &PipelineConfig,
) -> Result<Vec<(String, Vocabulary)>> {
    let mut trainer = config.trainer.clone();
    trainer.target_size = config.per_language_size;
    corpora
        .iter()
        .map(|c| Ok((String::from(c.language()), train_vocabulary(c, &trainer)?)))
        .collect()
}

/// Encodes every language as a binary vector over the global vocabulary.
pub fn encode_language_vectors(
    per_language: &[(String, Vocabulary)],
    global: &Vocabulary,
) -> Result<Vec<LanguageVector>> {
    per_language
        .iter()
        .map(|(l, v)| encode_language(l, v, global))
        .collect()
}

/// Largest-remainder apportionment of `budget` proportional to `weights`;
/// remainder seats go to the largest fractions, ties to the larger weight,
/// then the lower index.
fn apportion_budget(budget: usize, weights: &[f64]) -> Vec<usize> {
    let z: f64 = weights.iter().sum();
    let mut seats = Vec::with_capacity(weights.len());
    let mut fractions = Vec::with_capacity(weights.len());
    let mut assigned = 0usize;
    for (i, &w) in weights.iter().enumerate() {
        let quota = budget as f64 * w / z;
        let base = quota as usize;
        seats.push(base);
        assigned += base;
        fractions.push((quota - base as f64, i));
    }
    fractions.sort_unstable_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("fractions are finite")
            .then_with(|| {
                weights[b.1]
                    .partial_cmp(&weights[a.1])
                    .expect("weights are finite")
            })
            .then_with(|| a.1.cmp(&b.1))
    });
    for &(_, i) in fractions.iter().take(budget - assigned) {
        seats[i] += 1;
    }
    seats
}

/// Pools the member languages' corpora into one training corpus.
///
/// Without a budget the member corpora are concatenated whole, in member
/// order. With a budget, sentence counts are apportioned over members by
/// smoothed sampling weight (proportions raised to `smoothing_exponent`,
/// renormalized) and each member contributes a prefix of its corpus; a
/// member shorter than its apportioned count contributes all it has.
pub fn pool_cluster_corpus(
    corpora: &[LanguageCorpus],
    members: &[&str],
    label: &str,
    sentence_budget: Option<usize>,
    smoothing_exponent: f64,
) -> Result<LanguageCorpus> {
    let member_corpora: Vec<&LanguageCorpus> = members
        .iter()
        .map(|&m| {
            corpora.iter().find(|c| c.language() == m).ok_or_else(|| {
                Error::InvalidConfig(alloc::format!("cluster member {m} has no corpus"))
            })
        })
        .collect::<Result<_>>()?;
    let takes: Vec<usize> = match sentence_budget {
        None => member_corpora.iter().map(|c| c.sentence_count()).collect(),
        Some(budget) => {
            let total: u64 = member_corpora
                .iter()
                .map(|c| c.sentence_count() as u64)
                .sum();
            if total == 0 {
                return Err(Error::EmptyCorpus);
            }
            let weights: Vec<f64> = member_corpora
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
            apportion_budget(budget, &weights)
        }
    };
    LanguageCorpus::from_lines(
        label,
        member_corpora
            .iter()
            .zip(&takes)
            .flat_map(|(c, &n)| c.sentences()[..n.min(c.sentence_count())].iter().cloned()),
    )
}

/// Builds each cluster's pooled training corpus, in cluster index order.
pub fn cluster_pools(
    corpora: &[LanguageCorpus],
    clusters: &[Vec<&str>],
    sentence_budget: Option<usize>,
    smoothing_exponent: f64,
) -> Result<Vec<LanguageCorpus>> {
    clusters
        .iter()
        .enumerate()
        .map(|(i, members)| {
            pool_cluster_corpus(
                corpora,
                members,
                &alloc::format!("cluster{i}"),
                sentence_budget,
                smoothing_exponent,
            )
        })
        .collect()
}

/// Apportions `total_size` across clusters: proportional to the size of
/// each cluster's union of per-language vocabularies, floored at the
/// cluster's pooled coverage alphabet plus specials.
pub fn plan_allocation(
    per_language: &[(String, Vocabulary)],
    clusters: &[Vec<&str>],
    pools: &[LanguageCorpus],
    total_size: usize,
    character_coverage: f64,
) -> Result<AllocationPlan> {
    if clusters.len() != pools.len() {
        return Err(Error::DimensionMismatch {
            left: clusters.len(),
            right: pools.len(),
        });
    }
    let mut unions = Vec::with_capacity(clusters.len());
    let mut floors = Vec::with_capacity(clusters.len());
    for (members, pool) in clusters.iter().zip(pools) {
        let mut texts = BTreeSet::new();
        for &m in members {
            let vocab = per_language
                .iter()
                .find(|(l, _)| l == m)
                .map(|(_, v)| v)
                .ok_or_else(|| {
                    Error::InvalidConfig(alloc::format!("cluster member {m} has no vocabulary"))
                })?;
            for p in vocab.pieces() {
                texts.insert(p.text.as_str());
            }
        }
        unions.push(texts.len());
        let alphabet = coverage_alphabet(
            pool.sentences().iter().map(String::as_str),
            character_coverage,
        )?;
        floors.push(alphabet.len() + SPECIALS);
    }
    allocate_sizes(&unions, &floors, total_size)
}

/// Trains each cluster's vocabulary at its allocated size.
pub fn train_cluster_vocabs(
    pools: &[LanguageCorpus],
    allocation: &AllocationPlan,
    config: &PipelineConfig,
) -> Result<Vec<Vocabulary>> {
    pools
        .iter()
        .zip(allocation.cluster_sizes())
        .map(|(pool, &size)| {
            let mut trainer = config.trainer.clone();
            trainer.target_size = size;
            train_vocabulary(pool, &trainer)
        })
        .collect()
}

/// Runs every stage in memory and returns all artifacts.
pub fn run_pipeline(corpora: &[LanguageCorpus], config: &PipelineConfig) -> Result<PipelineRun> {
    config.validate()?;
    if corpora.is_empty() {
        return Err(Error::NoLanguages);
    }
    let mut seen = BTreeSet::new();
    for c in corpora {
        if !seen.insert(c.language()) {
            return Err(Error::DuplicateLanguage(String::from(c.language())));
        }
    }
    let per_language = train_language_vocabs(corpora, config)?;
    let vocabs: Vec<Vocabulary> = per_language.iter().map(|(_, v)| v.clone()).collect();
    let global = union_vocab(&vocabs)?;
    let vectors = encode_language_vectors(&per_language, &global)?;
    let clusters = kmeans_with_restarts(
        &vectors,
        config.k,
        config.trainer.random_seed,
        config.restarts,
    )?;
    let members = clusters.clusters();
    let pools = cluster_pools(
        corpora,
        &members,
        config.cluster_sentence_budget,
        config.smoothing_exponent,
    )?;
    let mut budget = config.total_size;
    let mut passes = 0;
    let (allocation, cluster_vocabs, final_vocab) = loop {
        let allocation = plan_allocation(
            &per_language,
            &members,
            &pools,
            budget,
            config.trainer.character_coverage,
        )?;
        let cluster_vocabs = train_cluster_vocabs(&pools, &allocation, config)?;
        let final_vocab = union_vocab(&cluster_vocabs)?;
        match config.target_final_size {
            Some(target) if final_vocab.len() < target && passes < INFLATE_PASSES => {
                budget += target - final_vocab.len();
                passes += 1;
            }
            _ => break (allocation, cluster_vocabs, final_vocab),
        }
    };
    Ok(PipelineRun {
        per_language,
        global,
        clusters,
        allocation,
        cluster_vocabs,
        final_vocab,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn corpus(language: &str, lines: &[&str]) -> LanguageCorpus {
        LanguageCorpus::from_lines(language, lines.iter().copied()).unwrap()
    }

    fn small_config(k: usize, total_size: usize, per_language_size: usize) -> PipelineConfig {
        let mut config = PipelineConfig::new(k, total_size);
        config.per_language_size = per_language_size;
        config
    }

    // Two tiny languages over disjoint alphabets.
    fn disjoint_corpora() -> Vec<LanguageCorpus> {
        vec![
            corpus("aa", &["ab ab ba", "aab ab", "ba ab"]),
            corpus("cc", &["cd cd dc", "ccd cd", "dc cd"]),
        ]
    }

    #[test]
    fn one_cluster_reproduces_joint_training() {
        let corpora = disjoint_corpora();
        let config = small_config(1, 10, 6);
        let run = run_pipeline(&corpora, &config).unwrap();
        let pooled = pool_cluster_corpus(&corpora, &["aa", "cc"], "joint", None, 0.7).unwrap();
        let mut trainer = config.trainer.clone();
        trainer.target_size = 10;
        let joint = train_vocabulary(&pooled, &trainer).unwrap();
        assert_eq!(run.final_vocab, joint);
        assert_eq!(run.allocation.cluster_sizes(), [10]);
    }

    #[test]
    fn disjoint_scripts_split_into_their_own_clusters() {
        let corpora = disjoint_corpora();
        let run = run_pipeline(&corpora, &small_config(2, 14, 6)).unwrap();
        let clusters = run.clusters.clusters();
        assert_eq!(clusters.len(), 2);
        assert!(clusters.iter().all(|c| c.len() == 1));
        // The 7-piece cluster vocabularies share only ▁ and UNK.
        assert_eq!(run.final_vocab.len(), 12);
        assert_eq!(
            run.allocation.cluster_sizes().iter().sum::<usize>(),
            run.allocation.total_size()
        );
    }

    #[test]
    fn runs_are_deterministic() {
        let corpora = disjoint_corpora();
        let a = run_pipeline(&corpora, &small_config(2, 14, 6)).unwrap();
        let b = run_pipeline(&corpora, &small_config(2, 14, 6)).unwrap();
        assert_eq!(a.final_vocab, b.final_vocab);
        assert_eq!(a.clusters.assignments(), b.clusters.assignments());
    }

    #[test]
    fn sentence_budgets_take_weighted_prefixes() {
        let corpora = vec![
            corpus("xx", &["ab", "ba", "aa"]),
            corpus("yy", &["bb"]),
        ];
        // Budget 2, weights 3/4 vs 1/4: quotas 1.5 and 0.5, bases 1 and 0,
        // the seat's fraction tie breaks to the larger weight.
        let pooled =
            pool_cluster_corpus(&corpora, &["xx", "yy"], "pool", Some(2), 1.0).unwrap();
        assert_eq!(pooled.sentences(), ["ab", "ba"]);
        // Without a budget everything is pooled in member order.
        let full = pool_cluster_corpus(&corpora, &["xx", "yy"], "pool", None, 1.0).unwrap();
        assert_eq!(full.sentences(), ["ab", "ba", "aa", "bb"]);
    }

    #[test]
    fn target_final_size_inflates_the_budget() {
        // Identical corpora: the two cluster vocabularies overlap heavily,
        // so the plain union falls short of the budget.
        let lines = ["ab ba aab", "ab ba aab", "aab ab"];
        let corpora = vec![corpus("xx", &lines), corpus("yy", &lines)];
        let mut plain = small_config(2, 12, 6);
        plain.restarts = 1;
        let without = run_pipeline(&corpora, &plain).unwrap();
        assert!(without.final_vocab.len() < 12);
        let mut inflated = plain.clone();
        inflated.target_final_size = Some(12);
        let with = run_pipeline(&corpora, &inflated).unwrap();
        assert!(with.final_vocab.len() > without.final_vocab.len());
        assert!(with.allocation.total_size() > 12);
    }

    #[test]
    fn duplicate_languages_are_rejected() {
        let corpora = vec![corpus("xx", &["ab"]), corpus("xx", &["ba"])];
        assert_eq!(
            run_pipeline(&corpora, &small_config(1, 8, 5)).unwrap_err(),
            Error::DuplicateLanguage(String::from("xx"))
        );
    }

    #[test]
    fn invalid_configs_are_rejected_up_front() {
        let mut config = PipelineConfig::new(0, 10);
        assert!(config.validate().is_err());
        config.k = 1;
        config.smoothing_exponent = 0.0;
        assert!(matches!(
            config.validate().unwrap_err(),
            Error::InvalidSmoothingExponent(_)
        ));
        config.smoothing_exponent = 0.7;
        config.cluster_sentence_budget = Some(0);
        assert!(config.validate().is_err());
        config.cluster_sentence_budget = Some(100);
        assert!(config.validate().is_ok());
    }
}
