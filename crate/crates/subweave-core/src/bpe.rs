//! Byte-pair-encoding vocabulary trainer.
//!
//! Starts from the coverage alphabet and repeatedly merges the most frequent
//! adjacent symbol pair until the vocabulary reaches its target size. Merge
//! ranks are recorded as scores so segmentation can replay them in order.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::corpus::{prepare_training_text, LanguageCorpus};
use crate::unigram::TrainerConfig;
use crate::vocab::{Algorithm, Piece, Vocabulary, SPECIALS};
use crate::{Error, Result};

/// Trains a bpe vocabulary of exactly `config.target_size` pieces.
///
/// Pair selection is a total order — pair count, then current corpus
/// frequency of the left symbol, then left text, then right text — so
/// training is deterministic. Pairs whose concatenation exceeds
/// `max_piece_length` or already is a piece are never selected. Like the
/// unigram trainer, this ignores `config.random_seed`.
pub fn train_bpe(corpus: &LanguageCorpus, config: &TrainerConfig) -> Result<Vocabulary> {
    config.validate()?;
    let text = prepare_training_text(corpus, config.character_coverage)?;
    let floor = text.alphabet.len() + SPECIALS;
    if config.target_size < floor {
        return Err(Error::TargetSizeBelowFloor {
            target: config.target_size,
            floor,
        });
    }
    let n_merges = config.target_size - floor;

    // Symbol table: alphabet characters first, merged symbols appended.
    let mut texts: Vec<String> = text.alphabet.iter().map(|&c| String::from(c)).collect();
    let mut text_chars: Vec<usize> = texts.iter().map(|_| 1).collect();
    let mut ids: HashMap<String, u32> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as u32))
        .collect();
    let mut frags: Vec<(Vec<u32>, u64)> = text
        .fragments
        .iter()
        .map(|(chars, freq)| {
            let syms = chars
                .iter()
                .map(|c| ids[String::from(*c).as_str()])
                .collect();
            (syms, *freq)
        })
        .collect();

    let mut merges: Vec<u32> = Vec::with_capacity(n_merges);
    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    while merges.len() < n_merges {
        pair_counts.clear();
        let mut sym_freq = alloc::vec![0u64; texts.len()];
        for (syms, freq) in &frags {
            for &s in syms.iter() {
                sym_freq[s as usize] += freq;
            }
            for w in syms.windows(2) {
                *pair_counts.entry((w[0], w[1])).or_insert(0) += freq;
            }
        }
        // Argmax under a total order is independent of map iteration order.
        let mut best: Option<(u32, u32, u64)> = None;
        for (&(l, r), &count) in &pair_counts {
            if text_chars[l as usize] + text_chars[r as usize] > config.max_piece_length {
                continue;
            }
            let beats = match best {
                None => true,
                Some((bl, br, bc)) => {
                    (
                        count,
                        sym_freq[l as usize],
                        core::cmp::Reverse(&texts[l as usize]),
                        core::cmp::Reverse(&texts[r as usize]),
                    ) > (
                        bc,
                        sym_freq[bl as usize],
                        core::cmp::Reverse(&texts[bl as usize]),
                        core::cmp::Reverse(&texts[br as usize]),
                    )
                }
            };
            if beats {
                let mut concat = texts[l as usize].clone();
                concat.push_str(&texts[r as usize]);
                // A pair recreated by later merges may concatenate to an
                // existing piece; it must not become a duplicate.
                if !ids.contains_key(concat.as_str()) {
                    best = Some((l, r, count));
                }
            }
        }
        let Some((l, r, _)) = best else {
            return Err(Error::TargetSizeUnreachable {
                target: config.target_size,
                available: floor + merges.len(),
            });
        };
        let mut concat = texts[l as usize].clone();
        concat.push_str(&texts[r as usize]);
        let new_id = texts.len() as u32;
        ids.insert(concat.clone(), new_id);
        text_chars.push(text_chars[l as usize] + text_chars[r as usize]);
        texts.push(concat);
        merges.push(new_id);
        for (syms, _) in &mut frags {
            let mut write = 0;
            let mut read = 0;
            while read < syms.len() {
                if read + 1 < syms.len() && syms[read] == l && syms[read + 1] == r {
                    syms[write] = new_id;
                    read += 2;
                } else {
                    syms[write] = syms[read];
                    read += 1;
                }
                write += 1;
            }
            syms.truncate(write);
        }
    }

    let alphabet_count = text.alphabet.len();
    let mut pieces: Vec<Piece> = texts[..alphabet_count]
        .iter()
        .map(|t| Piece {
            text: t.clone(),
            score: -1.0,
        })
        .collect();
    pieces.extend(merges.iter().enumerate().map(|(i, &id)| Piece {
        text: texts[id as usize].clone(),
        score: (i + 1) as f64,
    }));
    let vocab = Vocabulary::new(Algorithm::Bpe, pieces)?;
    vocab.validate_normalized()?;
    Ok(vocab)
}
