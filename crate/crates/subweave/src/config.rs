//! Run configuration: a TOML file that fully determines a pipeline run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use subweave_core::cluster::DEFAULT_RESTARTS;
use subweave_core::pipeline::PipelineConfig;
use subweave_core::unigram::TrainerConfig;
use subweave_core::vocab::Algorithm;

use crate::error::{AppError, Result};
use crate::fsio;

/// Training algorithm choice as it appears in config files and flags.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    /// Unigram language-model training with EM and likelihood-ranked pruning.
    #[default]
    Unigram,
    /// Byte-pair encoding by greedy merge counting.
    Bpe,
}

impl AlgorithmChoice {
    /// The core algorithm this choice selects.
    pub fn to_core(self) -> Algorithm {
        match self {
            AlgorithmChoice::Unigram => Algorithm::Unigram,
            AlgorithmChoice::Bpe => Algorithm::Bpe,
        }
    }
}

/// Everything a pipeline run needs, round-trippable through TOML.
///
/// `manifest`, `total_size`, and `output_dir` are required; every other
/// field has a default. Unknown keys are rejected so typos fail loudly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Path to the corpus manifest.
    pub manifest: PathBuf,
    /// Directory receiving all run artifacts.
    pub output_dir: PathBuf,
    /// Total vocabulary budget apportioned across clusters.
    pub total_size: usize,
    /// Number of language clusters.
    #[serde(default = "defaults::k")]
    pub k: usize,
    /// Target size of each per-language vocabulary.
    #[serde(default = "defaults::per_language_size")]
    pub per_language_size: usize,
    /// Training algorithm for every stage.
    #[serde(default)]
    pub algorithm: AlgorithmChoice,
    /// Fraction of corpus character mass the alphabet must cover.
    #[serde(default = "defaults::character_coverage")]
    pub character_coverage: f64,
    /// Exponent smoothing per-language sampling weights toward uniform.
    #[serde(default = "defaults::smoothing_exponent")]
    pub smoothing_exponent: f64,
    /// Seed for the stages that sample (clustering restarts).
    #[serde(default)]
    pub seed: u64,
    /// k-means restarts; the lowest-inertia run wins.
    #[serde(default = "defaults::restarts")]
    pub restarts: usize,
    /// Cap on pooled sentences per cluster; omitted pools everything.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_sentence_budget: Option<usize>,
    /// If set, inflate the budget until the final union reaches this size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_final_size: Option<usize>,
    /// Maximum unigram seed candidates kept.
    #[serde(default = "defaults::seed_size")]
    pub seed_size: usize,
    /// Maximum piece length in characters.
    #[serde(default = "defaults::max_piece_length")]
    pub max_piece_length: usize,
    /// EM sweeps per unigram training round.
    #[serde(default = "defaults::em_iterations_per_round")]
    pub em_iterations_per_round: usize,
    /// Fraction of surviving candidates pruned per unigram round.
    #[serde(default = "defaults::prune_fraction")]
    pub prune_fraction: f64,
}

mod defaults {
    pub fn k() -> usize {
        8
    }
    pub fn per_language_size() -> usize {
        32_000
    }
    pub fn character_coverage() -> f64 {
        0.9995
    }
    pub fn smoothing_exponent() -> f64 {
        0.7
    }
    pub fn restarts() -> usize {
        super::DEFAULT_RESTARTS
    }
    pub fn seed_size() -> usize {
        1_000_000
    }
    pub fn max_piece_length() -> usize {
        16
    }
    pub fn em_iterations_per_round() -> usize {
        2
    }
    pub fn prune_fraction() -> f64 {
        0.25
    }
}

impl RunConfig {
    /// A config with required fields set and everything else defaulted.
    pub fn new(
        manifest: impl Into<PathBuf>,
        output_dir: impl Into<PathBuf>,
        total_size: usize,
    ) -> Self {
        RunConfig {
            manifest: manifest.into(),
            output_dir: output_dir.into(),
            total_size,
            k: defaults::k(),
            per_language_size: defaults::per_language_size(),
            algorithm: AlgorithmChoice::default(),
            character_coverage: defaults::character_coverage(),
            smoothing_exponent: defaults::smoothing_exponent(),
            seed: 0,
            restarts: defaults::restarts(),
            cluster_sentence_budget: None,
            target_final_size: None,
            seed_size: defaults::seed_size(),
            max_piece_length: defaults::max_piece_length(),
            em_iterations_per_round: defaults::em_iterations_per_round(),
            prune_fraction: defaults::prune_fraction(),
        }
    }

    /// Parses a TOML config file.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fsio::read_to_string(path)?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Serializes to TOML; `load` of the result reproduces `self` exactly.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field the pipeline will rely on.
    pub fn validate(&self) -> Result<()> {
        self.to_pipeline_config()
            .validate()
            .map_err(|e| AppError::Usage(e.to_string()))
    }

    /// The in-memory pipeline configuration this run config describes.
    pub fn to_pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            k: self.k,
            total_size: self.total_size,
            per_language_size: self.per_language_size,
            smoothing_exponent: self.smoothing_exponent,
            restarts: self.restarts,
            cluster_sentence_budget: self.cluster_sentence_budget,
            target_final_size: self.target_final_size,
            trainer: self.trainer_config(self.per_language_size),
        }
    }

    /// Trainer settings at a given target size.
    pub fn trainer_config(&self, target_size: usize) -> TrainerConfig {
        TrainerConfig {
            target_size,
            algorithm: self.algorithm.to_core(),
            character_coverage: self.character_coverage,
            seed_size: self.seed_size,
            max_piece_length: self.max_piece_length,
            em_iterations_per_round: self.em_iterations_per_round,
            prune_fraction: self.prune_fraction,
            random_seed: self.seed,
        }
    }
}
