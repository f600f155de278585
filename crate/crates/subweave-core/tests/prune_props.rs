//! An exhaustive oracle for vocabulary pruning: each recorded pruning
//! round's NLL and per-candidate deltas are recomputed by enumerating
//! every segmentation of every corpus word.

use std::collections::HashMap;

use proptest::prelude::*;
use subweave_core::corpus::LanguageCorpus;
use subweave_core::text::{normalize, split_words};
use subweave_core::unigram::{train_unigram_with_trace, TrainerConfig};

/// Log scores of all segmentations of `word`, found by explicit
/// enumeration. Scores can sit at the training floor near -745, so the
/// oracle stays in log space throughout.
fn path_scores(
    pieces: &HashMap<&str, f64>,
    word: &[char],
    skip: Option<&str>,
    pos: usize,
    acc: f64,
    out: &mut Vec<f64>,
) {
    if pos == word.len() {
        out.push(acc);
        return;
    }
    for end in pos + 1..=word.len() {
        let piece: String = word[pos..end].iter().collect();
        if skip == Some(piece.as_str()) {
            continue;
        }
        if let Some(&score) = pieces.get(piece.as_str()) {
            path_scores(pieces, word, skip, end, acc + score, out);
        }
    }
}

/// Marginal log probability of `word`: logsumexp over all segmentations.
fn marginal_log_prob(pieces: &HashMap<&str, f64>, word: &[char], skip: Option<&str>) -> f64 {
    let mut scores = Vec::new();
    path_scores(pieces, word, skip, 0, 0.0, &mut scores);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
}

/// Frequency-weighted corpus NLL under `pieces`, optionally with one
/// piece removed.
fn corpus_nll(pieces: &HashMap<&str, f64>, words: &[(Vec<char>, f64)], skip: Option<&str>) -> f64 {
    let mut nll = 0.0;
    for (chars, freq) in words {
        nll -= freq * marginal_log_prob(pieces, chars, skip);
    }
    nll
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Every pruning round's recorded NLL matches brute force, every
    /// candidate's delta matches removing just that piece, and no kept
    /// candidate would have been meaningfully cheaper to remove than a
    /// pruned one.
    #[test]
    fn prune_deltas_match_brute_force(
        lines in prop::collection::vec("[abc ]{1,10}", 2..7),
        seed_size in 8usize..20,
    ) {
        let corpus = match LanguageCorpus::from_lines("t", lines) {
            Ok(c) => c,
            Err(_) => return Ok(()),
        };
        if corpus.sentences().iter().all(|s| s.chars().all(char::is_whitespace)) {
            return Ok(());
        }
        let mut config = TrainerConfig::default();
        config.character_coverage = 1.0;
        config.max_piece_length = 6;
        config.seed_size = seed_size;
        config.prune_fraction = 0.4;
        // A floor-sized target forces pruning all the way down.
        let sentences = corpus.sentences().iter().map(|s| s.as_str());
        config.target_size =
            subweave_core::corpus::coverage_alphabet(sentences, 1.0).unwrap().len() + 1;
        let (_, trace) = train_unigram_with_trace(&corpus, &config).unwrap();

        // Word frequencies exactly as training counts them.
        let mut freq: HashMap<String, f64> = HashMap::new();
        for s in corpus.sentences() {
            for w in split_words(&normalize(s)) {
                *freq.entry(w.to_string()).or_insert(0.0) += 1.0;
            }
        }
        let words: Vec<(Vec<char>, f64)> =
            freq.into_iter().map(|(w, f)| (w.chars().collect(), f)).collect();

        for round in &trace.prune_rounds {
            let pieces: HashMap<&str, f64> =
                round.pieces.iter().map(|(t, s)| (t.as_str(), *s)).collect();
            let base = corpus_nll(&pieces, &words, None);
            let tol = 1e-8 * base.abs().max(1.0);
            prop_assert!(
                (base - round.nll_before).abs() <= tol,
                "round NLL {} vs brute force {}", round.nll_before, base
            );
            let mut brute: HashMap<&str, f64> = HashMap::new();
            for (cand, delta) in &round.deltas {
                let removed = corpus_nll(&pieces, &words, Some(cand.as_str()));
                let increase = removed - base;
                let tol = 1e-8 * (base.abs() + increase.abs()).max(1.0);
                prop_assert!(
                    (increase - delta).abs() <= tol,
                    "delta for {cand:?}: {delta} vs brute force {increase}"
                );
                brute.insert(cand.as_str(), increase);
            }
            // The recorded deltas are sorted and the pruned list is their
            // head, so pruning removed the least damaging candidates.
            for pair in round.deltas.windows(2) {
                let ordered = pair[0].1 < pair[1].1
                    || (pair[0].1 == pair[1].1 && pair[0].0 < pair[1].0);
                prop_assert!(ordered);
            }
            let head: Vec<&String> = round.deltas.iter().map(|(t, _)| t).collect();
            prop_assert_eq!(
                &head[..round.pruned.len()],
                &round.pruned.iter().collect::<Vec<_>>()[..]
            );
            // Brute force agrees: no kept candidate was meaningfully
            // cheaper than a pruned one.
            let kept_min = round.deltas[round.pruned.len()..]
                .iter()
                .map(|(t, _)| brute[t.as_str()])
                .fold(f64::INFINITY, f64::min);
            for p in &round.pruned {
                let tol = 1e-8 * (base.abs() + brute[p.as_str()].abs()).max(1.0);
                prop_assert!(
                    brute[p.as_str()] <= kept_min + tol,
                    "pruned {:?} (delta {}) but kept a candidate at {}",
                    p, brute[p.as_str()], kept_min
                );
            }
        }
    }
}
