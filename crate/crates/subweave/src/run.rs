//! Staged pipeline execution against a run directory.
//!
//! Every stage persists its artifact and the run continues from the
//! *reloaded* file, never the in-memory value. Scores round to six decimals
//! on disk, so computing downstream stages from reloaded artifacts is what
//! makes a resumed run and a fresh run byte-identical: both see exactly the
//! rounded values. `--resume` reuses cached per-language vocabularies (the
//! independently expensive stage); everything downstream is recomputed from
//! those files.
//!
//! Layout under the output directory:
//!
//! ```text
//! per_lang/<code>.vocab   one vocabulary per manifest language
//! global.vocab            union of the per-language vocabularies
//! clusters.json           language clustering (assignments, members, inertia)
//! allocation.json         budget apportionment across clusters
//! cluster_<i>.vocab       one vocabulary per cluster
//! final.vocab             union of the cluster vocabularies
//! run.json                configuration plus input and artifact hashes
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use subweave_core::cluster::{kmeans_with_restarts, ClusterModel};
use subweave_core::corpus::LanguageCorpus;
use subweave_core::pipeline::{
    cluster_pools, encode_language_vectors, plan_allocation, train_vocabulary,
};
use subweave_core::vocab::{union_vocab, Vocabulary};

use crate::config::RunConfig;
use crate::error::{AppError, Result};
use crate::fsio;
use crate::manifest::{load_corpora, parse_manifest};
use crate::vocab_io::{read_vocab, write_vocab};

/// Budget inflation passes allowed when chasing a target final size.
const MAX_BUDGET_PASSES: usize = 5;

/// All artifact paths of one run directory.
#[derive(Debug, Clone)]
pub struct RunPaths {
    root: PathBuf,
}

impl RunPaths {
    /// Paths rooted at `root`.
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunPaths { root: root.into() }
    }

    /// The run directory itself.
    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Directory of per-language vocabularies.
    pub fn per_lang_dir(&self) -> PathBuf {
        self.root.join("per_lang")
    }

    /// One language's vocabulary file.
    pub fn per_lang(&self, code: &str) -> PathBuf {
        self.per_lang_dir().join(format!("{code}.vocab"))
    }

    /// Union of the per-language vocabularies.
    pub fn global(&self) -> PathBuf {
        self.root.join("global.vocab")
    }

    /// Clustering artifact.
    pub fn clusters(&self) -> PathBuf {
        self.root.join("clusters.json")
    }

    /// Size allocation artifact.
    pub fn allocation(&self) -> PathBuf {
        self.root.join("allocation.json")
    }

    /// One cluster's vocabulary file.
    pub fn cluster_vocab(&self, index: usize) -> PathBuf {
        self.root.join(format!("cluster_{index}.vocab"))
    }

    /// The final unified vocabulary.
    pub fn final_vocab(&self) -> PathBuf {
        self.root.join("final.vocab")
    }

    /// Configuration and provenance hashes.
    pub fn run_json(&self) -> PathBuf {
        self.root.join("run.json")
    }
}

/// Execution knobs that are not part of the run's identity.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Upper bound on parallel trainings.
    pub jobs: usize,
    /// Reuse cached per-language vocabularies when present and valid.
    pub resume: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            resume: false,
        }
    }
}

/// What a completed run produced.
#[derive(Debug)]
pub struct RunSummary {
    /// The run directory.
    pub root: PathBuf,
    /// The final unified vocabulary, as reloaded from `final.vocab`.
    pub final_vocab: Vocabulary,
    /// Sizes allocated to each cluster on the last budget pass.
    pub cluster_sizes: Vec<usize>,
    /// Artifacts reused from a previous interrupted run.
    pub reused: Vec<String>,
    /// SHA-256 of every artifact, keyed by path relative to the run root.
    pub artifact_hashes: BTreeMap<String, String>,
    /// Budget inflation passes taken beyond the first.
    pub budget_passes: usize,
}

/// Clustering artifact: everything needed to reproduce the grouping.
/// This is the schema of `clusters.json` and of the `cluster` subcommand's
/// output.
#[derive(Debug, Serialize, Deserialize)]
pub struct ClustersFile {
    /// Number of clusters.
    pub k: usize,
    /// Seed the winning restart derived from.
    pub seed: u64,
    /// Restarts evaluated.
    pub restarts: usize,
    /// Total cosine distance of points to their centroids.
    pub inertia: f64,
    /// Language-to-cluster assignments in input order.
    pub assignments: Vec<AssignmentRecord>,
    /// Member language codes per cluster index.
    pub clusters: Vec<Vec<String>>,
}

/// One language's cluster assignment.
#[derive(Debug, Serialize, Deserialize)]
pub struct AssignmentRecord {
    /// Language code.
    pub language: String,
    /// Cluster index the language belongs to.
    pub cluster: usize,
}

/// Allocation artifact: the apportionment and its inputs.
#[derive(Debug, Serialize, Deserialize)]
struct AllocationFile {
    total_size: usize,
    cluster_unions: Vec<usize>,
    floors: Vec<usize>,
    cluster_sizes: Vec<usize>,
}

/// Builds the clustering artifact from a fitted model.
pub fn clusters_file(model: &ClusterModel, restarts: usize) -> ClustersFile {
    ClustersFile {
        k: model.k(),
        seed: model.seed(),
        restarts,
        inertia: model.inertia(),
        assignments: model
            .assignments()
            .iter()
            .map(|(language, cluster)| AssignmentRecord {
                language: language.clone(),
                cluster: *cluster,
            })
            .collect(),
        clusters: model
            .clusters()
            .iter()
            .map(|members| members.iter().map(|&m| String::from(m)).collect())
            .collect(),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fsio::write_atomic(path, text.as_bytes())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fsio::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))
}

/// Maps the items through `f` on up to `jobs` worker threads, preserving
/// order. Results land in per-index slots, so the output is independent of
/// scheduling.
fn parallel_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    let workers = jobs.max(1).min(items.len());
    if workers <= 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let result = f(i, &items[i]);
                *slots[i].lock().expect("slot poisoned") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().expect("slot poisoned").expect("slot filled"))
        .collect()
}

/// First error in item order, so failure reporting is deterministic.
fn collect_errors<R>(results: Vec<Result<R>>) -> Result<Vec<R>> {
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

/// A cached vocabulary is reusable if it parses and matches the configured
/// algorithm; the resume config guard has already pinned everything else.
fn reusable_vocab(path: &Path, config: &RunConfig) -> bool {
    match read_vocab(path) {
        Ok(v) => v.algorithm() == config.algorithm.to_core(),
        Err(_) => false,
    }
}

/// Refuses to resume into a directory recorded under a different
/// configuration. A missing run.json (directory never started) is fine.
fn check_resume_config(paths: &RunPaths, config: &RunConfig) -> Result<()> {
    let path = paths.run_json();
    if !path.exists() {
        return Ok(());
    }
    let recorded: serde_json::Value = read_json(&path)?;
    let current = serde_json::to_value(config).expect("config serializes");
    if recorded.get("config") != Some(&current) {
        return Err(AppError::Usage(format!(
            "{}: run directory was created with a different configuration; \
             rerun without --resume or use a fresh directory",
            paths.root().display()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct RunFile<'a> {
    config: &'a RunConfig,
    inputs: BTreeMap<String, String>,
    artifacts: BTreeMap<String, String>,
    reused: &'a [String],
    budget_passes: usize,
}

/// Executes a full pipeline run against `config.output_dir`.
pub fn execute_run(config: &RunConfig, options: &RunOptions) -> Result<RunSummary> {
    config.validate()?;
    let paths = RunPaths::new(&config.output_dir);
    if options.resume {
        check_resume_config(&paths, config)?;
    }
    fs::create_dir_all(paths.per_lang_dir())
        .map_err(|e| AppError::io(&paths.per_lang_dir(), e))?;
    // Record the configuration up front so an interrupted run still knows
    // what it was; completion rewrites this file with the full hash set.
    write_json(
        &paths.run_json(),
        &RunFile {
            config,
            inputs: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            reused: &[],
            budget_passes: 0,
        },
    )?;

    let manifest = parse_manifest(&config.manifest)?;
    let corpora = load_corpora(&manifest)?;

    // Per-language vocabularies: the one stage --resume may skip.
    let trainer = config.trainer_config(config.per_language_size);
    let results = parallel_map(options.jobs, &corpora, |_, corpus| -> Result<bool> {
        let path = paths.per_lang(corpus.language());
        if options.resume && reusable_vocab(&path, config) {
            return Ok(true);
        }
        let vocab = train_vocabulary(corpus, &trainer).map_err(|e| {
            AppError::Compute(format!(
                "stage per-language training: language {}: {e}",
                corpus.language()
            ))
        })?;
        write_vocab(&path, &vocab)?;
        Ok(false)
    });
    let mut reused = Vec::new();
    for (corpus, was_reused) in corpora.iter().zip(collect_errors(results)?) {
        if was_reused {
            reused.push(format!("per_lang/{}.vocab", corpus.language()));
        }
    }
    let per_language: Vec<(String, Vocabulary)> = corpora
        .iter()
        .map(|c| Ok((String::from(c.language()), read_vocab(&paths.per_lang(c.language()))?)))
        .collect::<Result<_>>()?;

    // Global union over the reloaded per-language vocabularies.
    let vocabs: Vec<Vocabulary> = per_language.iter().map(|(_, v)| v.clone()).collect();
    let global = union_vocab(&vocabs).map_err(|e| AppError::stage("global union", e))?;
    write_vocab(&paths.global(), &global)?;
    let global = read_vocab(&paths.global())?;

    // Clustering over binary language vectors in the global vocabulary.
    let vectors = encode_language_vectors(&per_language, &global)
        .map_err(|e| AppError::stage("language vectors", e))?;
    let model = kmeans_with_restarts(&vectors, config.k, config.seed, config.restarts)
        .map_err(|e| AppError::stage("clustering", e))?;
    write_json(&paths.clusters(), &clusters_file(&model, config.restarts))?;
    let clusters: ClustersFile = read_json(&paths.clusters())?;
    let members: Vec<Vec<&str>> = clusters
        .clusters
        .iter()
        .map(|c| c.iter().map(String::as_str).collect())
        .collect();
    remove_stale_cluster_vocabs(&paths, clusters.k)?;

    // Pool member corpora per cluster.
    let pools = cluster_pools(
        &corpora,
        &members,
        config.cluster_sentence_budget,
        config.smoothing_exponent,
    )
    .map_err(|e| AppError::stage("corpus pooling", e))?;

    // Allocation, per-cluster training, and the final union; the budget
    // inflates when a target final size is configured and overlap leaves
    // the union short.
    let mut budget = config.total_size;
    let mut budget_passes = 0;
    let (cluster_sizes, final_vocab) = loop {
        let plan = plan_allocation(
            &per_language,
            &members,
            &pools,
            budget,
            config.character_coverage,
        )
        .map_err(|e| AppError::stage("size allocation", e))?;
        write_json(
            &paths.allocation(),
            &AllocationFile {
                total_size: plan.total_size(),
                cluster_unions: plan.cluster_unions().to_vec(),
                floors: plan.floors().to_vec(),
                cluster_sizes: plan.cluster_sizes().to_vec(),
            },
        )?;
        let allocation: AllocationFile = read_json(&paths.allocation())?;

        let tasks: Vec<(usize, &LanguageCorpus)> = allocation
            .cluster_sizes
            .iter()
            .copied()
            .zip(&pools)
            .collect();
        let results = parallel_map(options.jobs, &tasks, |i, (size, pool)| -> Result<()> {
            let mut trainer = config.trainer_config(*size);
            trainer.target_size = *size;
            let vocab = train_vocabulary(pool, &trainer).map_err(|e| {
                AppError::Compute(format!("stage cluster training: cluster {i}: {e}"))
            })?;
            write_vocab(&paths.cluster_vocab(i), &vocab)
        });
        collect_errors(results)?;
        let cluster_vocabs: Vec<Vocabulary> = (0..pools.len())
            .map(|i| read_vocab(&paths.cluster_vocab(i)))
            .collect::<Result<_>>()?;

        let final_vocab =
            union_vocab(&cluster_vocabs).map_err(|e| AppError::stage("final union", e))?;
        write_vocab(&paths.final_vocab(), &final_vocab)?;
        let final_vocab = read_vocab(&paths.final_vocab())?;

        match config.target_final_size {
            Some(target) if final_vocab.len() < target && budget_passes < MAX_BUDGET_PASSES => {
                budget += target - final_vocab.len();
                budget_passes += 1;
            }
            _ => break (allocation.cluster_sizes, final_vocab),
        }
    };

    // Provenance: hash the inputs and every artifact, then finalize run.json.
    let mut inputs = BTreeMap::new();
    inputs.insert(
        config.manifest.display().to_string(),
        fsio::sha256_file(&config.manifest)?,
    );
    for entry in manifest.entries() {
        inputs.insert(entry.path.display().to_string(), fsio::sha256_file(&entry.path)?);
    }
    let mut artifacts = BTreeMap::new();
    for corpus in &corpora {
        let rel = format!("per_lang/{}.vocab", corpus.language());
        artifacts.insert(rel.clone(), fsio::sha256_file(&paths.per_lang(corpus.language()))?);
    }
    artifacts.insert("global.vocab".into(), fsio::sha256_file(&paths.global())?);
    artifacts.insert("clusters.json".into(), fsio::sha256_file(&paths.clusters())?);
    artifacts.insert("allocation.json".into(), fsio::sha256_file(&paths.allocation())?);
    for i in 0..clusters.k {
        artifacts.insert(
            format!("cluster_{i}.vocab"),
            fsio::sha256_file(&paths.cluster_vocab(i))?,
        );
    }
    artifacts.insert("final.vocab".into(), fsio::sha256_file(&paths.final_vocab())?);
    write_json(
        &paths.run_json(),
        &RunFile {
            config,
            inputs,
            artifacts: artifacts.clone(),
            reused: &reused,
            budget_passes,
        },
    )?;

    Ok(RunSummary {
        root: paths.root().to_path_buf(),
        final_vocab,
        cluster_sizes,
        reused,
        artifact_hashes: artifacts,
        budget_passes,
    })
}

/// Deletes `cluster_<i>.vocab` files left over from a run with more
/// clusters, so the directory always reflects the current k.
fn remove_stale_cluster_vocabs(paths: &RunPaths, k: usize) -> Result<()> {
    let entries = fs::read_dir(paths.root()).map_err(|e| AppError::io(paths.root(), e))?;
    for entry in entries {
        let entry = entry.map_err(|e| AppError::io(paths.root(), e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(index) = name
            .strip_prefix("cluster_")
            .and_then(|rest| rest.strip_suffix(".vocab"))
            .and_then(|n| n.parse::<usize>().ok())
        else {
            continue;
        };
        if index >= k {
            fs::remove_file(entry.path()).map_err(|e| AppError::io(&entry.path(), e))?;
        }
    }
    Ok(())
}
