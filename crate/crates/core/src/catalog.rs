//! Plain-text catalog of selected motifs and anti-motifs.

use std::fs::File;
use std::path::Path;

use crate::census::{LabelSchema, SubgraphClass};
use crate::error::{Error, Result};
use crate::significance::{read_report_json, ClassStats, Ratio, SignificanceReport};

/// Shortest decimal with at most two fractional digits.
pub fn format_number(x: f64) -> String {
    let s = format!("{x:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// `r=<ratio> — <f> / <mu> ± <sigma>`.
pub fn stats_line(s: &ClassStats) -> String {
    let r = match s.ratio {
        Ratio::Finite { value } => format!("{value:.2}"),
        Ratio::Infinite { .. } => "inf".into(),
        Ratio::Undefined => "undefined".into(),
    };
    format!(
        "r={r} — {} / {} ± {}",
        s.f_original,
        format_number(s.mu),
        format_number(s.sigma)
    )
}

/// Node list followed by one line per linked pair.
pub fn depict(class: &SubgraphClass, labels: &LabelSchema) -> Vec<String> {
    let t = class.decode();
    let name = |vocab: &[String], l: u16| vocab.get(l as usize).cloned().unwrap_or_else(|| format!("#{l}"));
    let mut lines: Vec<String> = (0..3)
        .map(|i| format!("({i}) {}", name(&labels.node_labels, t.labels[i])))
        .collect();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let e = |l: u16| name(&labels.edge_labels, l);
        match (t.arcs[i][j], t.arcs[j][i]) {
            (None, None) => {}
            (Some(a), Some(_)) if !labels.directed => lines.push(format!("({i}) --{}-- ({j})", e(a))),
            (Some(a), Some(b)) if a == b => lines.push(format!("({i}) <--{}--> ({j})", e(a))),
            (Some(a), Some(b)) => {
                lines.push(format!("({i}) --{}--> ({j})", e(a)));
                lines.push(format!("({j}) --{}--> ({i})", e(b)));
            }
            (Some(a), None) => lines.push(format!("({i}) --{}--> ({j})", e(a))),
            (None, Some(b)) => lines.push(format!("({j}) --{}--> ({i})", e(b))),
        }
    }
    lines
}

fn section(
    out: &mut String,
    title: &str,
    empty: &str,
    codes: &[SubgraphClass],
    report: &SignificanceReport,
    top_n: usize,
) {
    out.push_str(title);
    out.push('\n');
    if codes.is_empty() {
        out.push_str("  ");
        out.push_str(empty);
        out.push_str("\n\n");
        return;
    }
    for (rank, code) in codes.iter().take(top_n).enumerate() {
        let Some(entry) = report.entry(code) else { continue };
        out.push_str(&format!("#{} {}\n", rank + 1, code));
        out.push_str(&format!("    {}\n", stats_line(&entry.stats)));
        for line in depict(code, &report.labels) {
            out.push_str("    ");
            out.push_str(&line);
            out.push('\n');
        }
        out.push('\n');
    }
}

pub fn render_motif_catalog(report: &SignificanceReport, top_n: usize) -> String {
    let th = &report.thresholds;
    let mut out = String::new();
    section(
        &mut out,
        &format!(
            "Motifs (ratio >= {}, f >= {}, {} random networks)",
            format_number(th.motif_ratio_min),
            th.min_support,
            report.n_replicas
        ),
        "no motifs above threshold",
        &report.motifs,
        report,
        top_n,
    );
    section(
        &mut out,
        &format!(
            "Anti-motifs (ratio <= {}, mean >= {})",
            format_number(th.antimotif_ratio_max),
            th.min_support
        ),
        "no anti-motifs below threshold",
        &report.anti_motifs,
        report,
        top_n,
    );
    out
}

/// Reads a `significance.json` and renders it.
pub fn render_catalog_file(path: impl AsRef<Path>, top_n: usize) -> Result<String> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let report = read_report_json(std::io::BufReader::new(file))?;
    Ok(render_motif_catalog(&report, top_n))
}
