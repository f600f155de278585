//! Corpus manifests: the tab-separated file listing one corpus per language.
//!
//! Each record is `code<TAB>path` with an optional third field capping the
//! number of sentences read. Blank lines and lines starting with `#` are
//! skipped. Paths are resolved relative to the manifest's own directory, so
//! a manifest can travel with its corpus files.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use subweave_core::corpus::LanguageCorpus;

use crate::error::{AppError, Result};
use crate::fsio;

/// One corpus file: language code, resolved path, optional sentence cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Language code, unique within the manifest.
    pub language: String,
    /// Corpus file path, already resolved against the manifest directory.
    pub path: PathBuf,
    /// If set, only the first this many sentences are read.
    pub max_sentences: Option<usize>,
}

/// A parsed manifest: the ordered list of corpus entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// The entries in file order.
    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    /// The entry for one language code, if present.
    pub fn entry(&self, language: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.language == language)
    }

    /// Language codes in file order.
    pub fn languages(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.language.as_str()).collect()
    }
}

/// Parses a manifest file. Errors name the offending line.
pub fn parse_manifest(path: &Path) -> Result<Manifest> {
    let text = fsio::read_to_string(path)?;
    let dir = path.parent().unwrap_or(Path::new(""));
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let entry = parse_line(line, dir)
            .map_err(|msg| AppError::Usage(format!("{}:{}: {msg}", path.display(), idx + 1)))?;
        if !seen.insert(entry.language.clone()) {
            return Err(AppError::Usage(format!(
                "{}:{}: duplicate language code {:?}",
                path.display(),
                idx + 1,
                entry.language
            )));
        }
        entries.push(entry);
    }
    if entries.is_empty() {
        return Err(AppError::Usage(format!(
            "{}: manifest lists no corpora",
            path.display()
        )));
    }
    Ok(Manifest { entries })
}

fn parse_line(line: &str, dir: &Path) -> std::result::Result<ManifestEntry, String> {
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    if fields.len() < 2 || fields.len() > 3 {
        return Err(format!(
            "expected `code<TAB>path` with an optional sentence cap, got {} field(s)",
            fields.len()
        ));
    }
    let language = fields[0];
    if language.is_empty() || language.chars().any(char::is_whitespace) {
        return Err(format!("invalid language code {language:?}"));
    }
    if fields[1].is_empty() {
        return Err("empty corpus path".to_string());
    }
    let max_sentences = match fields.get(2) {
        None => None,
        Some(cap) => Some(
            cap.parse::<usize>()
                .map_err(|_| format!("invalid sentence cap {cap:?}"))?,
        ),
    };
    Ok(ManifestEntry {
        language: language.to_string(),
        path: dir.join(fields[1]),
        max_sentences,
    })
}

/// Loads every corpus a manifest lists, applying sentence caps.
pub fn load_corpora(manifest: &Manifest) -> Result<Vec<LanguageCorpus>> {
    manifest.entries().iter().map(load_entry).collect()
}

/// Loads one manifest entry's corpus.
pub fn load_entry(entry: &ManifestEntry) -> Result<LanguageCorpus> {
    let text = fsio::read_to_string(&entry.path)?;
    let corpus = LanguageCorpus::from_lines(
        entry.language.as_str(),
        text.lines().map(|l| l.trim_end_matches('\r')),
    )
    .map_err(|e| AppError::Io(format!("{}: {e}", entry.path.display())))?;
    Ok(match entry.max_sentences {
        Some(cap) => corpus.truncated(cap),
        None => corpus,
    })
}
