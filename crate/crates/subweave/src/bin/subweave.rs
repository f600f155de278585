//! The subweave command line: every pipeline stage and metric as a
//! subcommand. Exit codes: 0 success, 1 usage, 2 IO, 3 training/numeric.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use subweave::config::{AlgorithmChoice, RunConfig};
use subweave::error::{AppError, Result};
use subweave::{fsio, manifest, report, run, synth, vocab_io};

use subweave_core::analysis::{analyze, compare};
use subweave_core::cluster::{kmeans_with_restarts, DEFAULT_RESTARTS};
use subweave_core::corpus::sampling_distribution;
use subweave_core::pipeline::{encode_language_vectors, train_vocabulary};
use subweave_core::segment::Segmenter;
use subweave_core::unigram::TrainerConfig;
use subweave_core::vocab::{union_vocab, Vocabulary};

#[derive(Parser)]
#[command(
    name = "subweave",
    version,
    about = "Multilingual subword vocabularies via language clustering",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline into a resumable run directory.
    Pipeline(PipelineArgs),
    /// Train one language's vocabulary from a manifest entry.
    TrainLang(TrainLangArgs),
    /// Segment standard input with a vocabulary, one sentence per line.
    Encode(EncodeArgs),
    /// Measure a vocabulary against a manifest's corpora.
    Analyze(AnalyzeArgs),
    /// Measure two vocabularies side by side on the same corpora.
    Compare(CompareArgs),
    /// Cluster per-language vocabularies into language groups.
    Cluster(ClusterArgs),
    /// Write the bundled synthetic six-language corpus and its manifest.
    Synth(SynthArgs),
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(clap::Args)]
struct PipelineArgs {
    /// TOML run configuration; stands in for the individual flags
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Corpus manifest: `code<TAB>path[<TAB>max-sentences]` per line
    #[arg(long, value_name = "FILE", required_unless_present = "config", conflicts_with = "config")]
    manifest: Option<PathBuf>,
    /// Number of language clusters
    #[arg(long, default_value_t = 8, conflicts_with = "config")]
    k: usize,
    /// Total vocabulary budget apportioned across clusters
    #[arg(long, value_name = "N", required_unless_present = "config", conflicts_with = "config")]
    total_size: Option<usize>,
    /// Per-language vocabulary size
    #[arg(long = "per-lang-size", value_name = "N", default_value_t = 32_000, conflicts_with = "config")]
    per_lang_size: usize,
    /// Training algorithm
    #[arg(long, value_enum, default_value_t = AlgorithmChoice::Unigram, conflicts_with = "config")]
    algorithm: AlgorithmChoice,
    /// Fraction of character mass the alphabet must cover
    #[arg(long, default_value_t = 0.9995, conflicts_with = "config")]
    coverage: f64,
    /// Exponent smoothing per-language sampling weights
    #[arg(long, default_value_t = 0.7, conflicts_with = "config")]
    alpha: f64,
    /// Seed for the stages that sample (clustering restarts)
    #[arg(long, default_value_t = 0, conflicts_with = "config")]
    seed: u64,
    /// Inflate the budget until the final union reaches this size
    #[arg(long, value_name = "N", conflicts_with = "config")]
    target_final_size: Option<usize>,
    /// Run directory; with --config, overrides its output_dir
    #[arg(long, value_name = "DIR", required_unless_present = "config")]
    out: Option<PathBuf>,
    /// Parallel workers for the training stages
    #[arg(long, value_name = "N", default_value_t = default_jobs())]
    jobs: usize,
    /// Reuse cached per-language vocabularies in the run directory
    #[arg(long)]
    resume: bool,
}

impl PipelineArgs {
    fn into_config(self) -> Result<(RunConfig, run::RunOptions)> {
        if self.jobs == 0 {
            return Err(AppError::Usage("--jobs must be at least 1".into()));
        }
        let options = run::RunOptions {
            jobs: self.jobs,
            resume: self.resume,
        };
        let config = match self.config {
            Some(path) => {
                let mut config = RunConfig::load(&path)?;
                if let Some(out) = self.out {
                    config.output_dir = out;
                }
                config
            }
            None => {
                let mut config = RunConfig::new(
                    self.manifest.expect("required unless --config"),
                    self.out.expect("required unless --config"),
                    self.total_size.expect("required unless --config"),
                );
                config.k = self.k;
                config.per_language_size = self.per_lang_size;
                config.algorithm = self.algorithm;
                config.character_coverage = self.coverage;
                config.smoothing_exponent = self.alpha;
                config.seed = self.seed;
                config.target_final_size = self.target_final_size;
                config
            }
        };
        Ok((config, options))
    }
}

#[derive(clap::Args)]
struct TrainLangArgs {
    /// Corpus manifest listing the language
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Language code to train
    #[arg(long)]
    lang: String,
    /// Vocabulary size
    #[arg(long, value_name = "N")]
    size: usize,
    /// Training algorithm
    #[arg(long, value_enum, default_value_t = AlgorithmChoice::Unigram)]
    algorithm: AlgorithmChoice,
    /// Fraction of character mass the alphabet must cover
    #[arg(long, default_value_t = 0.9995)]
    coverage: f64,
    /// Seed recorded for provenance (both trainers are deterministic)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; defaults to `<lang>.vocab`
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EncodeArgs {
    /// Vocabulary file to segment with
    #[arg(long, value_name = "FILE")]
    vocab: PathBuf,
    /// Append a tab and the per-line OOV count
    #[arg(long)]
    report_oov: bool,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Vocabulary file to measure
    #[arg(long, value_name = "FILE")]
    vocab: PathBuf,
    /// Corpus manifest to measure against
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Exponent smoothing per-language sampling weights
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// Also write the full-precision report as JSON to this file
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CompareArgs {
    /// First vocabulary file
    #[arg(long, value_name = "FILE")]
    left: PathBuf,
    /// Second vocabulary file
    #[arg(long, value_name = "FILE")]
    right: PathBuf,
    /// Corpus manifest to measure against
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Exponent smoothing per-language sampling weights
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// Also write the full-precision comparison as JSON to this file
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ClusterArgs {
    /// Directory of per-language `<code>.vocab` files
    #[arg(long, value_name = "DIR")]
    vocab_dir: PathBuf,
    /// Number of clusters
    #[arg(long)]
    k: usize,
    /// Seed for restart sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restarts; the lowest-inertia run wins
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
}

#[derive(clap::Args)]
struct SynthArgs {
    /// Directory receiving the corpus files and manifest
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Sentences per language
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    sentences: usize,
}

/// Prints to stdout, treating a closed pipe as a normal early exit
/// (`subweave ... | head` must not die with a panic).
fn print_out(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(AppError::Io(format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::TrainLang(args) => cmd_train_lang(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

fn cmd_pipeline(args: PipelineArgs) -> Result<()> {
    let (config, options) = args.into_config()?;
    let summary = run::execute_run(&config, &options)?;
    let mut text = String::new();
    if !summary.reused.is_empty() {
        text.push_str(&format!(
            "reused {} cached per-language vocabularies\n",
            summary.reused.len()
        ));
    }
    text.push_str(&format!(
        "cluster sizes: {}\n",
        summary
            .cluster_sizes
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    ));
    if summary.budget_passes > 0 {
        text.push_str(&format!(
            "budget inflated over {} extra pass(es)\n",
            summary.budget_passes
        ));
    }
    text.push_str(&format!(
        "wrote {} ({} pieces)\n",
        summary.root.join("final.vocab").display(),
        summary.final_vocab.len()
    ));
    print_out(&text)
}

fn cmd_train_lang(args: TrainLangArgs) -> Result<()> {
    let manifest = manifest::parse_manifest(&args.manifest)?;
    let entry = manifest.entry(&args.lang).ok_or_else(|| {
        AppError::Usage(format!(
            "{}: no entry for language {:?}",
            args.manifest.display(),
            args.lang
        ))
    })?;
    let corpus = manifest::load_entry(entry)?;
    let trainer = TrainerConfig {
        target_size: args.size,
        algorithm: args.algorithm.to_core(),
        character_coverage: args.coverage,
        random_seed: args.seed,
        ..TrainerConfig::default()
    };
    let vocab = train_vocabulary(&corpus, &trainer).map_err(|e| {
        AppError::Compute(format!("stage per-language training: language {}: {e}", args.lang))
    })?;
    let out = args.out.unwrap_or_else(|| PathBuf::from(format!("{}.vocab", args.lang)));
    vocab_io::write_vocab(&out, &vocab)?;
    print_out(&format!("wrote {} ({} pieces)\n", out.display(), vocab.len()))
}

fn cmd_encode(args: EncodeArgs) -> Result<()> {
    let vocab = vocab_io::read_vocab(&args.vocab)?;
    let segmenter = Segmenter::new(&vocab);
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| AppError::Io(format!("stdin: {e}")))?;
        let seg = segmenter.encode(&line);
        let joined = seg.pieces.join(" ");
        let written = if args.report_oov {
            writeln!(out, "{joined}\t{}", seg.oov_count)
        } else {
            writeln!(out, "{joined}")
        };
        match written {
            Ok(()) => {}
            // Reader closed the pipe: stop quietly.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
            Err(e) => return Err(AppError::Io(format!("stdout: {e}"))),
        }
    }
    match out.flush() {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(AppError::Io(format!("stdout: {e}"))),
    }
}

fn load_corpora_and_sampling(
    manifest_path: &PathBuf,
    alpha: f64,
) -> Result<(
    Vec<subweave_core::corpus::LanguageCorpus>,
    subweave_core::corpus::SamplingDistribution,
)> {
    let manifest = manifest::parse_manifest(manifest_path)?;
    let corpora = manifest::load_corpora(&manifest)?;
    let sampling = sampling_distribution(&corpora, alpha)
        .map_err(|e| AppError::Usage(e.to_string()))?;
    Ok((corpora, sampling))
}

fn write_json_report(path: &PathBuf, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fsio::write_atomic(path, text.as_bytes())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let vocab = vocab_io::read_vocab(&args.vocab)?;
    let (corpora, sampling) = load_corpora_and_sampling(&args.manifest, args.alpha)?;
    let report = analyze(&vocab, &corpora, &sampling)
        .map_err(|e| AppError::stage("analysis", e))?;
    print_out(&report::render_report(&report))?;
    if let Some(path) = args.json {
        write_json_report(&path, &report::report_json(&report))?;
        print_out(&format!("\nwrote {}\n", path.display()))?;
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let left = vocab_io::read_vocab(&args.left)?;
    let right = vocab_io::read_vocab(&args.right)?;
    let (corpora, sampling) = load_corpora_and_sampling(&args.manifest, args.alpha)?;
    let cmp = compare(&left, &right, &corpora, &sampling)
        .map_err(|e| AppError::stage("analysis", e))?;
    print_out(&report::render_comparison(&cmp))?;
    if let Some(path) = args.json {
        write_json_report(&path, &report::comparison_json(&cmp))?;
        print_out(&format!("\nwrote {}\n", path.display()))?;
    }
    Ok(())
}

fn cmd_cluster(args: ClusterArgs) -> Result<()> {
    if args.k == 0 {
        return Err(AppError::Usage("--k must be at least 1".into()));
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.vocab_dir)
        .map_err(|e| AppError::io(&args.vocab_dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "vocab"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(AppError::Usage(format!(
            "{}: no .vocab files found",
            args.vocab_dir.display()
        )));
    }
    let mut per_language: Vec<(String, Vocabulary)> = Vec::with_capacity(files.len());
    for path in &files {
        let language = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| AppError::Usage(format!("{}: bad file name", path.display())))?;
        per_language.push((String::from(language), vocab_io::read_vocab(path)?));
    }
    let vocabs: Vec<Vocabulary> = per_language.iter().map(|(_, v)| v.clone()).collect();
    let global = union_vocab(&vocabs).map_err(|e| AppError::stage("global union", e))?;
    let vectors = encode_language_vectors(&per_language, &global)
        .map_err(|e| AppError::stage("language vectors", e))?;
    let model = kmeans_with_restarts(&vectors, args.k, args.seed, args.restarts)
        .map_err(|e| AppError::stage("clustering", e))?;
    let artifact = run::clusters_file(&model, args.restarts);
    let mut text = serde_json::to_string_pretty(&artifact)
        .map_err(|e| AppError::Io(format!("stdout: {e}")))?;
    text.push('\n');
    print_out(&text)
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let manifest_path = synth::write_synthetic(&args.out, args.sentences)?;
    print_out(&format!("wrote {}\n", manifest_path.display()))
}
