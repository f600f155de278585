//! Command-line contract checks: flag surface, exit codes, stdin/stdout
//! behavior, and the config-file path, all against the built binary.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use subweave::vocab_io::write_vocab;
use subweave_core::corpus::LanguageCorpus;
use subweave_core::unigram::{train_unigram, TrainerConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subweave"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("subweave-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// A trained vocabulary over the {a, b} alphabet for the encode checks.
fn tiny_vocab(dir: &PathBuf) -> PathBuf {
    let corpus =
        LanguageCorpus::from_lines("t", ["ab ab a", "abba b ab", "ba ab"]).unwrap();
    let mut config = TrainerConfig::with_target_size(6);
    config.character_coverage = 1.0;
    config.max_piece_length = 4;
    config.seed_size = 16;
    let vocab = train_unigram(&corpus, &config).unwrap();
    let path = dir.join("tiny.vocab");
    write_vocab(&path, &vocab).unwrap();
    path
}

#[test]
fn pipeline_help_lists_every_flag_with_defaults() {
    let out = bin().args(["pipeline", "--help"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in [
        "--config",
        "--manifest",
        "--k",
        "--total-size",
        "--per-lang-size",
        "--algorithm",
        "--coverage",
        "--alpha",
        "--seed",
        "--jobs",
        "--out",
        "--resume",
        "--target-final-size",
    ] {
        assert!(text.contains(flag), "help is missing {flag}");
    }
    for default in ["[default: 8]", "[default: 32000]", "[default: 0.9995]", "[default: 0.7]"] {
        assert!(text.contains(default), "help is missing {default}");
    }
}

#[test]
fn encode_empty_stdin_is_empty_success() {
    let dir = scratch("encode-empty");
    let vocab = tiny_vocab(&dir);
    let out = run_with_stdin(&["encode", "--vocab", vocab.to_str().unwrap()], "");
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn encode_reports_per_line_oov_counts() {
    let dir = scratch("encode-oov");
    let vocab = tiny_vocab(&dir);
    let out = run_with_stdin(
        &["encode", "--vocab", vocab.to_str().unwrap(), "--report-oov"],
        "ab ab\nabba xy\n",
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].ends_with("\t0"), "line was {:?}", lines[0]);
    // "x" and "y" fall outside the alphabet: two UNK pieces.
    assert!(lines[1].ends_with("\t2"), "line was {:?}", lines[1]);
}

#[test]
fn cluster_rejects_zero_k_as_usage_error() {
    let dir = scratch("cluster-k0");
    let out = bin()
        .args(["cluster", "--vocab-dir", dir.to_str().unwrap(), "--k", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--k must be at least 1"), "stderr was {err:?}");
}

#[test]
fn train_lang_below_floor_is_a_training_error() {
    let dir = scratch("train-floor");
    fs::write(dir.join("t.txt"), "abcdefgh ijklmnop\nqrstuvwx yz\n").unwrap();
    fs::write(dir.join("manifest.tsv"), "t\tt.txt\n").unwrap();
    let out = bin()
        .args([
            "train-lang",
            "--manifest",
            dir.join("manifest.tsv").to_str().unwrap(),
            "--lang",
            "t",
            "--size",
            "3",
            "--out",
            dir.join("t.vocab").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("below the floor"), "stderr was {err:?}");
}

#[test]
fn missing_manifest_is_an_io_error() {
    let dir = scratch("missing-manifest");
    let out = bin()
        .args([
            "pipeline",
            "--manifest",
            dir.join("absent.tsv").to_str().unwrap(),
            "--total-size",
            "500",
            "--out",
            dir.join("run").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_drives_a_full_run() {
    let dir = scratch("config-run");
    let data = dir.join("data");
    let manifest = subweave::synth::write_synthetic(&data, 120).unwrap();
    let config = format!(
        "manifest = {:?}\noutput_dir = {:?}\ntotal_size = 900\nk = 3\nper_language_size = 400\nseed = 7\n",
        manifest,
        dir.join("run")
    );
    fs::write(dir.join("run.toml"), config).unwrap();
    let out = bin()
        .args(["pipeline", "--config", dir.join("run.toml").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("run").join("final.vocab").is_file());
    assert!(dir.join("run").join("run.json").is_file());
}
