//! Report rendering: JSON at full precision, text for reading.
//!
//! JSON carries raw values so downstream tooling never loses precision.
//! The text renderer applies the display conventions: OOV rates as
//! percentages, Wasserstein-1 distances scaled by 1000.

use serde_json::{json, Value};
use subweave_core::analysis::{AnalysisReport, Comparison, LanguageStats};

fn stats_json(stats: &LanguageStats) -> Value {
    json!({
        "language": stats.language,
        "sentence_count": stats.sentence_count,
        "token_count": stats.token_count,
        "oov_count": stats.oov_count,
        "mean_pieces_per_sentence": stats.mean_pieces_per_sentence,
        "oov_rate": stats.oov_rate,
    })
}

/// The full report as JSON, raw values, full precision.
pub fn report_json(report: &AnalysisReport) -> Value {
    let scripts: serde_json::Map<String, Value> = report
        .script_fractions()
        .iter()
        .map(|(class, fraction)| (class.name().to_string(), json!(fraction)))
        .collect();
    json!({
        "avg_description_length": report.avg_description_length(),
        "oov_rate": report.oov_rate(),
        "per_language": report.per_language().iter().map(stats_json).collect::<Vec<_>>(),
        "script_fractions": scripts,
        "w1": {
            "languages": report.languages(),
            "matrix": report.w1_matrix(),
        },
    })
}

/// Both sides of a comparison plus right-minus-left deltas, as JSON.
pub fn comparison_json(cmp: &Comparison) -> Value {
    json!({
        "left": report_json(&cmp.left),
        "right": report_json(&cmp.right),
        "delta": {
            "avg_description_length": cmp.description_length_delta(),
            "oov_rate": cmp.oov_rate_delta(),
            "per_language": cmp
                .per_language_deltas()
                .iter()
                .map(|(language, dl, oov)| json!({
                    "language": language,
                    "mean_pieces_per_sentence": dl,
                    "oov_rate": oov,
                }))
                .collect::<Vec<_>>(),
        },
    })
}

fn language_width(report: &AnalysisReport) -> usize {
    report
        .languages()
        .iter()
        .map(String::len)
        .chain([8])
        .max()
        .unwrap_or(8)
}

/// Aligned text report: per-language table, script mix, W1 matrix.
pub fn render_report(report: &AnalysisReport) -> String {
    let w = language_width(report);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<w$}  {:>9}  {:>10}  {:>11}  {:>8}\n",
        "language", "sentences", "pieces", "pieces/sent", "OOV %"
    ));
    for s in report.per_language() {
        out.push_str(&format!(
            "{:<w$}  {:>9}  {:>10}  {:>11.2}  {:>8.3}\n",
            s.language,
            s.sentence_count,
            s.token_count,
            s.mean_pieces_per_sentence,
            s.oov_rate * 100.0
        ));
    }
    out.push_str(&format!(
        "\noverall: description length {:.2} pieces/sentence, OOV {:.3} %\n",
        report.avg_description_length(),
        report.oov_rate() * 100.0
    ));

    let nonzero: Vec<String> = report
        .script_fractions()
        .iter()
        .filter(|(_, f)| *f > 0.0)
        .map(|(class, f)| format!("{} {:.1} %", class.name(), f * 100.0))
        .collect();
    if !nonzero.is_empty() {
        out.push_str(&format!("script mix: {}\n", nonzero.join("  ")));
    }

    if report.languages().len() > 1 {
        out.push_str("\nW1 x1000 between language subword distributions:\n");
        out.push_str(&format!("{:<w$}", ""));
        for lang in report.languages() {
            out.push_str(&format!("  {lang:>8}"));
        }
        out.push('\n');
        for (i, lang) in report.languages().iter().enumerate() {
            out.push_str(&format!("{lang:<w$}"));
            for value in &report.w1_matrix()[i] {
                out.push_str(&format!("  {:>8.3}", value * 1000.0));
            }
            out.push('\n');
        }
    }
    out
}

/// Aligned side-by-side comparison with deltas.
pub fn render_comparison(cmp: &Comparison) -> String {
    let w = language_width(&cmp.left);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<w$}  {:>12}  {:>12}  {:>8}   {:>9}  {:>9}  {:>8}\n",
        "language", "pieces/sent", "", "delta", "OOV %", "", "delta"
    ));
    out.push_str(&format!(
        "{:<w$}  {:>12}  {:>12}  {:>8}   {:>9}  {:>9}  {:>8}\n",
        "", "left", "right", "", "left", "right", ""
    ));
    for (l, r) in cmp.left.per_language().iter().zip(cmp.right.per_language()) {
        out.push_str(&format!(
            "{:<w$}  {:>12.2}  {:>12.2}  {:>+8.2}   {:>9.3}  {:>9.3}  {:>+8.3}\n",
            l.language,
            l.mean_pieces_per_sentence,
            r.mean_pieces_per_sentence,
            r.mean_pieces_per_sentence - l.mean_pieces_per_sentence,
            l.oov_rate * 100.0,
            r.oov_rate * 100.0,
            (r.oov_rate - l.oov_rate) * 100.0,
        ));
    }
    out.push_str(&format!(
        "\noverall description length: {:.2} -> {:.2} ({:+.2})\n",
        cmp.left.avg_description_length(),
        cmp.right.avg_description_length(),
        cmp.description_length_delta()
    ));
    out.push_str(&format!(
        "overall OOV: {:.3} % -> {:.3} % ({:+.3} pp)\n",
        cmp.left.oov_rate() * 100.0,
        cmp.right.oov_rate() * 100.0,
        cmp.oov_rate_delta() * 100.0
    ));
    out
}
