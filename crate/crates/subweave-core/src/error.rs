use alloc::string::String;

/// Errors produced by vocabulary training, clustering, and analysis.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// The corpus holds no usable text (no sentences, or only empty ones).
    #[error("corpus is empty")]
    EmptyCorpus,
    /// A sentence contains the reserved boundary marker U+2581.
    #[error("sentence {line} contains the reserved boundary marker U+2581")]
    BoundaryMarkerInSentence {
        /// 1-based line number within the corpus.
        line: usize,
    },
    /// Two corpora share one language code where unique codes are required.
    #[error("duplicate language code {0:?}")]
    DuplicateLanguage(String),
    /// The smoothing exponent lies outside (0, 1].
    #[error("smoothing exponent {0} outside (0, 1]")]
    InvalidSmoothingExponent(f64),
    /// The character coverage lies outside (0, 1].
    #[error("character coverage {0} outside (0, 1]")]
    InvalidCoverage(f64),
    /// A configuration field failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// The requested vocabulary size cannot hold the mandatory pieces.
    #[error(
        "target size {target} below the floor of {floor} \
         (coverage alphabet plus special pieces)"
    )]
    TargetSizeBelowFloor {
        /// Requested vocabulary size.
        target: usize,
        /// Minimum feasible size: coverage alphabet plus specials.
        floor: usize,
    },
    /// The corpus offers too few candidate pieces to reach the target size.
    #[error(
        "target size {target} unreachable: corpus yields only {available} \
         pieces (alphabet, specials, and candidate substrings)"
    )]
    TargetSizeUnreachable {
        /// Requested vocabulary size.
        target: usize,
        /// Maximum vocabulary size this corpus can support.
        available: usize,
    },
    /// Vocabularies with different algorithms cannot be combined.
    #[error("cannot combine unigram and bpe vocabularies")]
    MixedAlgorithms,
    /// A vocabulary violates a structural invariant.
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    /// A vector operation received an all-zero vector.
    #[error("zero vector has no direction; cosine distance undefined")]
    ZeroVector,
    /// Two vectors (or distributions) have different dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch {
        /// Dimension of the left operand.
        left: usize,
        /// Dimension of the right operand.
        right: usize,
    },
    /// Cluster count must satisfy 1 <= k <= number of languages.
    #[error("cluster count {k} invalid for {languages} languages")]
    InvalidClusterCount {
        /// Requested cluster count.
        k: usize,
        /// Number of languages available.
        languages: usize,
    },
    /// A language vocabulary holds a piece absent from the global union.
    #[error("piece {piece:?} of language vocabulary missing from the global vocabulary")]
    PieceMissingFromGlobal {
        /// The offending piece.
        piece: String,
    },
    /// The total budget cannot satisfy every cluster's minimum size.
    #[error("total size {total} below the sum of cluster floors {floor_sum}")]
    TotalBelowFloors {
        /// Requested total budget.
        total: usize,
        /// Sum of per-cluster minimum sizes.
        floor_sum: usize,
    },
    /// Two subword distributions were computed against different vocabularies.
    #[error("subword distributions come from different vocabularies")]
    DistributionMismatch,
    /// The operation needs at least one language.
    #[error("no languages given")]
    NoLanguages,
}
