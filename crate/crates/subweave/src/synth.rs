//! Bundled synthetic multilingual corpus: six languages across three
//! scripts, deterministic down to the byte.
//!
//! Three Latin-script languages share a common word stock (high-resource,
//! spaced text), two Cyrillic-script languages share another, and one
//! CJK-style language writes short unspaced sentences over a 560-character
//! inventory with a heavy-tailed character distribution. The scripts are
//! disjoint, so the language vectors cluster by script; the CJK tail
//! characters are individually rare in a pooled corpus, which is exactly
//! the regime where a shared alphabet cutoff starts dropping them.

use std::path::{Path, PathBuf};

use subweave_core::corpus::LanguageCorpus;
use subweave_core::rng::{rng_from_seed, substream, uniform_below, uniform_f64, DetRng};

use crate::error::Result;
use crate::fsio;

/// Language codes in manifest order.
pub const LANGUAGES: [&str; 6] = ["lat1", "lat2", "lat3", "cyr1", "cyr2", "cjk1"];

/// Fixed master seed: the corpus is a bundled fixture, not a sample.
const MASTER_SEED: u64 = 0x5EED_0001;

struct ScriptStock {
    words: Vec<String>,
}

impl ScriptStock {
    /// Random words over `alphabet`, lengths in `min_len..=max_len`,
    /// deduplicated so the stock is a true lexicon.
    fn new(rng: &mut DetRng, alphabet: &[char], count: usize, min_len: usize, max_len: usize) -> Self {
        let mut words = Vec::with_capacity(count);
        let mut seen = std::collections::BTreeSet::new();
        while words.len() < count {
            let len = min_len + uniform_below(rng, max_len - min_len + 1);
            let word: String = (0..len)
                .map(|_| alphabet[uniform_below(rng, alphabet.len())])
                .collect();
            if seen.insert(word.clone()) {
                words.push(word);
            }
        }
        ScriptStock { words }
    }
}

/// Per-language lexicon: a without-replacement sample of the script stock,
/// drawn by index so sibling languages overlap heavily but not fully.
fn sample_lexicon<'a>(rng: &mut DetRng, stock: &'a ScriptStock, size: usize) -> Vec<&'a str> {
    let mut indices: Vec<usize> = (0..stock.words.len()).collect();
    for i in (1..indices.len()).rev() {
        indices.swap(i, uniform_below(rng, i + 1));
    }
    indices.truncate(size);
    indices.into_iter().map(|i| stock.words[i].as_str()).collect()
}

/// Cumulative weights 1/(rank+1): a Zipf-like law over lexicon ranks.
fn zipf_cumulative(n: usize) -> Vec<f64> {
    let mut cum = Vec::with_capacity(n);
    let mut total = 0.0;
    for rank in 0..n {
        total += 1.0 / (rank + 1) as f64;
        cum.push(total);
    }
    cum
}

fn zipf_index(rng: &mut DetRng, cum: &[f64]) -> usize {
    let target = uniform_f64(rng) * cum[cum.len() - 1];
    cum.partition_point(|&c| c <= target).min(cum.len() - 1)
}

fn spaced_sentences(
    rng: &mut DetRng,
    lexicon: &[&str],
    sentences: usize,
    min_words: usize,
    max_words: usize,
) -> Vec<String> {
    let cum = zipf_cumulative(lexicon.len());
    (0..sentences)
        .map(|_| {
            let n = min_words + uniform_below(rng, max_words - min_words + 1);
            let words: Vec<&str> = (0..n).map(|_| lexicon[zipf_index(rng, &cum)]).collect();
            words.join(" ")
        })
        .collect()
}

fn unspaced_sentences(
    rng: &mut DetRng,
    lexicon: &[&str],
    sentences: usize,
    min_words: usize,
    max_words: usize,
) -> Vec<String> {
    let cum = zipf_cumulative(lexicon.len());
    (0..sentences)
        .map(|_| {
            let n = min_words + uniform_below(rng, max_words - min_words + 1);
            (0..n).map(|_| lexicon[zipf_index(rng, &cum)]).collect()
        })
        .collect()
}

fn latin_alphabet() -> Vec<char> {
    ('a'..='z').collect()
}

fn cyrillic_alphabet() -> Vec<char> {
    // 28 consecutive lowercase Cyrillic letters starting at U+0430.
    (0..28u32)
        .map(|i| char::from_u32(0x0430 + i).expect("valid Cyrillic"))
        .collect()
}

/// 560 CJK ideographs in a shuffled frequency order: Zipf weight over the
/// shuffled ranks gives a long tail of individually rare characters.
fn cjk_inventory(rng: &mut DetRng) -> Vec<char> {
    let mut chars: Vec<char> = (0..560u32)
        .map(|i| char::from_u32(0x4E00 + i).expect("valid ideograph"))
        .collect();
    for i in (1..chars.len()).rev() {
        chars.swap(i, uniform_below(rng, i + 1));
    }
    chars
}

/// CJK word stock: 1-3 character words, characters drawn Zipf-style from
/// the shuffled inventory, so word frequency inherits the character tail.
fn cjk_stock(rng: &mut DetRng, inventory: &[char], count: usize) -> ScriptStock {
    let cum = zipf_cumulative(inventory.len());
    let mut words = Vec::with_capacity(count);
    let mut seen = std::collections::BTreeSet::new();
    while words.len() < count {
        let len = 1 + uniform_below(rng, 4);
        let word: String = (0..len).map(|_| inventory[zipf_index(rng, &cum)]).collect();
        if seen.insert(word.clone()) {
            words.push(word);
        }
    }
    ScriptStock { words }
}

/// Generates the six corpora, `sentences_per_language` sentences each.
pub fn synthetic_corpora(sentences_per_language: usize) -> Vec<LanguageCorpus> {
    let latin_stock = ScriptStock::new(&mut substream(MASTER_SEED, 100), &latin_alphabet(), 1400, 2, 9);
    let cyrillic_stock =
        ScriptStock::new(&mut substream(MASTER_SEED, 200), &cyrillic_alphabet(), 1200, 2, 8);
    let mut cjk_rng = substream(MASTER_SEED, 300);
    let inventory = cjk_inventory(&mut cjk_rng);
    let cjk_words = cjk_stock(&mut cjk_rng, &inventory, 2000);

    let mut corpora = Vec::with_capacity(LANGUAGES.len());
    for (i, &lang) in LANGUAGES.iter().enumerate() {
        let mut rng = substream(MASTER_SEED, i as u64);
        let sentences = match lang {
            "cjk1" => {
                let lexicon = sample_lexicon(&mut rng, &cjk_words, 1600);
                unspaced_sentences(&mut rng, &lexicon, sentences_per_language, 10, 20)
            }
            _ if lang.starts_with("cyr") => {
                let lexicon = sample_lexicon(&mut rng, &cyrillic_stock, 1000);
                spaced_sentences(&mut rng, &lexicon, sentences_per_language, 7, 13)
            }
            _ => {
                let lexicon = sample_lexicon(&mut rng, &latin_stock, 1000);
                spaced_sentences(&mut rng, &lexicon, sentences_per_language, 7, 13)
            }
        };
        corpora.push(
            LanguageCorpus::from_lines(lang, sentences.iter().map(String::as_str))
                .expect("generated corpus is valid"),
        );
    }
    // Consume the master stream so adding languages later changes nothing
    // retroactively; also asserts the seed constant stays linked in.
    let _ = rng_from_seed(MASTER_SEED);
    corpora
}

/// Writes the corpora plus a manifest into `dir`; returns the manifest path.
pub fn write_synthetic(dir: &Path, sentences_per_language: usize) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| crate::error::AppError::io(dir, e))?;
    let corpora = synthetic_corpora(sentences_per_language);
    let mut manifest = String::from("# bundled synthetic multilingual corpus\n");
    for corpus in &corpora {
        let name = format!("{}.txt", corpus.language());
        let mut body = corpus.sentences().join("\n");
        body.push('\n');
        fsio::write_atomic(&dir.join(&name), body.as_bytes())?;
        manifest.push_str(&format!("{}\t{name}\n", corpus.language()));
    }
    let path = dir.join("manifest.tsv");
    fsio::write_atomic(&path, manifest.as_bytes())?;
    Ok(path)
}
