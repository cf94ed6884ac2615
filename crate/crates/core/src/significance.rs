//! Motif significance against a randomized ensemble: z-score, ratio,
//! running ratio as replicas accumulate, and motif / anti-motif selection.
//!
//! The ensemble mean is computed from the exact integer sum, and the
//! standard deviation is the population form (divide by n) using Welford's
//! streaming update. Degenerate cases are carried as explicit variants
//! rather than NaN or infinite floats, so reports stay valid JSON.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::census::{CensusResult, LabelSchema, SubgraphClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Above,
    Below,
    Equal,
}

impl Relation {
    fn of(f: f64, mu: f64) -> Relation {
        match f.partial_cmp(&mu) {
            Some(Ordering::Greater) => Relation::Above,
            Some(Ordering::Less) => Relation::Below,
            _ => Relation::Equal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ZScore {
    Finite {
        value: f64,
    },
    /// Zero ensemble variance; only the side of the mean is known.
    Undefined {
        relation: Relation,
    },
}

impl ZScore {
    pub fn value(&self) -> Option<f64> {
        match self {
            ZScore::Finite { value } => Some(*value),
            ZScore::Undefined { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Ratio {
    Finite {
        value: f64,
    },
    /// Zero ensemble mean with a positive original count.
    Infinite {
        f_original: u64,
    },
    /// Zero over zero.
    Undefined,
}

impl Ratio {
    pub fn value(&self) -> Option<f64> {
        match self {
            Ratio::Finite { value } => Some(*value),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ratio::Infinite { .. })
    }

    /// Descending significance order: infinite (larger support first), then
    /// finite by value, then undefined.
    pub fn cmp_desc(&self, other: &Ratio) -> Ordering {
        use Ratio::*;
        match (self, other) {
            (Infinite { f_original: a }, Infinite { f_original: b }) => b.cmp(a),
            (Infinite { .. }, _) => Ordering::Less,
            (_, Infinite { .. }) => Ordering::Greater,
            (Finite { value: a }, Finite { value: b }) => b.total_cmp(a),
            (Finite { .. }, Undefined) => Ordering::Less,
            (Undefined, Finite { .. }) => Ordering::Greater,
            (Undefined, Undefined) => Ordering::Equal,
        }
    }

    /// Plain-language reading of the ratio.
    pub fn interpret(&self) -> String {
        match self {
            Ratio::Finite { value } if *value >= 1.0 => {
                format!("appears {} times more often in the original network", fmt_plain(*value))
            }
            Ratio::Finite { value } if *value > 0.0 => {
                format!(
                    "appears {} times less often in the original network",
                    fmt_plain(1.0 / value)
                )
            }
            Ratio::Finite { .. } => "never appears in the original network".into(),
            Ratio::Infinite { .. } => "never appears in the randomized networks".into(),
            Ratio::Undefined => "appears in neither the original nor the randomized networks".into(),
        }
    }
}

fn fmt_plain(x: f64) -> String {
    let s = format!("{x:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothing {
    #[default]
    None,
    /// Ratio becomes (f + 1) / (mu + 1).
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub f_original: u64,
    pub mu: f64,
    pub sigma: f64,
    pub z: ZScore,
    pub ratio: Ratio,
    pub n_replicas: usize,
}

impl ClassStats {
    pub fn from_moments(f_original: u64, mu: f64, sigma: f64, n_replicas: usize, smoothing: Smoothing) -> Result<Self> {
        if n_replicas == 0 {
            return Err(Error::Usage("at least one replica is required".into()));
        }
        if !(mu >= 0.0 && sigma >= 0.0 && mu.is_finite() && sigma.is_finite()) {
            return Err(Error::Usage(format!("invalid moments mu={mu} sigma={sigma}")));
        }
        let f = f_original as f64;
        let z = if sigma > 0.0 {
            ZScore::Finite {
                value: (f - mu) / sigma,
            }
        } else {
            ZScore::Undefined {
                relation: Relation::of(f, mu),
            }
        };
        Ok(ClassStats {
            f_original,
            mu,
            sigma,
            z,
            ratio: ratio(f_original, mu, smoothing),
            n_replicas,
        })
    }
}

fn ratio(f_original: u64, mu: f64, smoothing: Smoothing) -> Ratio {
    let f = f_original as f64;
    match smoothing {
        Smoothing::Laplace => Ratio::Finite {
            value: (f + 1.0) / (mu + 1.0),
        },
        Smoothing::None if mu > 0.0 => Ratio::Finite { value: f / mu },
        Smoothing::None if f_original > 0 => Ratio::Infinite { f_original },
        Smoothing::None => Ratio::Undefined,
    }
}

/// Mean (from the exact integer sum) and population standard deviation.
pub fn mean_and_sigma(counts: &[u64]) -> Option<(f64, f64)> {
    if counts.is_empty() {
        return None;
    }
    let n = counts.len() as f64;
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    let mu = total as f64 / n;
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for (k, &c) in counts.iter().enumerate() {
        let x = c as f64;
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    Some((mu, (m2 / n).max(0.0).sqrt()))
}

pub fn class_stats(f_original: u64, replica_counts: &[u64]) -> Result<ClassStats> {
    class_stats_with(f_original, replica_counts, Smoothing::None)
}

pub fn class_stats_with(f_original: u64, replica_counts: &[u64], smoothing: Smoothing) -> Result<ClassStats> {
    let (mu, sigma) = mean_and_sigma(replica_counts).ok_or_else(|| Error::Usage("empty replica count list".into()))?;
    ClassStats::from_moments(f_original, mu, sigma, replica_counts.len(), smoothing)
}

/// Running ratio after 1..=n replicas, in replica order.
pub fn ratio_evolution(f_original: u64, replica_counts: &[u64], smoothing: Smoothing) -> Vec<Ratio> {
    let mut total: u128 = 0;
    replica_counts
        .iter()
        .enumerate()
        .map(|(t, &c)| {
            total += c as u128;
            ratio(f_original, total as f64 / (t + 1) as f64, smoothing)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotifThresholds {
    pub motif_ratio_min: f64,
    pub antimotif_ratio_max: f64,
    pub min_support: u64,
}

impl Default for MotifThresholds {
    fn default() -> Self {
        MotifThresholds {
            motif_ratio_min: 100.0,
            antimotif_ratio_max: 0.01,
            min_support: 5,
        }
    }
}

impl MotifThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.motif_ratio_min > 0.0 && self.antimotif_ratio_max > 0.0) {
            return Err(Error::Config("motif thresholds must be positive".into()));
        }
        if self.motif_ratio_min <= self.antimotif_ratio_max {
            return Err(Error::Config(
                "motif ratio minimum must exceed the anti-motif ratio maximum".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub motifs: Vec<SubgraphClass>,
    pub anti_motifs: Vec<SubgraphClass>,
}

/// Motifs: ratio at least `motif_ratio_min` (or infinite) with
/// `f_original >= min_support`, most significant first. Anti-motifs: ratio
/// at most `antimotif_ratio_max` with `mu >= min_support`, lowest first.
pub fn select_motifs(stats: &[(SubgraphClass, ClassStats)], th: &MotifThresholds) -> Result<Selection> {
    th.validate()?;
    let mut motifs: Vec<&(SubgraphClass, ClassStats)> = stats
        .iter()
        .filter(|(_, s)| {
            s.f_original >= th.min_support
                && match s.ratio {
                    Ratio::Infinite { .. } => true,
                    Ratio::Finite { value } => value >= th.motif_ratio_min,
                    Ratio::Undefined => false,
                }
        })
        .collect();
    motifs.sort_by(|a, b| {
        a.1.ratio
            .cmp_desc(&b.1.ratio)
            .then(b.1.f_original.cmp(&a.1.f_original))
            .then(a.0.cmp(&b.0))
    });
    let mut anti: Vec<&(SubgraphClass, ClassStats)> = stats
        .iter()
        .filter(|(_, s)| {
            s.mu >= th.min_support as f64
                && matches!(s.ratio, Ratio::Finite { value } if value <= th.antimotif_ratio_max)
        })
        .collect();
    anti.sort_by(|a, b| {
        b.1.ratio
            .cmp_desc(&a.1.ratio)
            .then(b.1.mu.total_cmp(&a.1.mu))
            .then(a.0.cmp(&b.0))
    });
    Ok(Selection {
        motifs: motifs.into_iter().map(|(c, _)| *c).collect(),
        anti_motifs: anti.into_iter().map(|(c, _)| *c).collect(),
    })
}

/// All classes, most significant ratio first (ties by support, then code).
pub fn rank_by_ratio(stats: &[(SubgraphClass, ClassStats)]) -> Vec<SubgraphClass> {
    let mut v: Vec<_> = stats.iter().collect();
    v.sort_by(|a, b| {
        a.1.ratio
            .cmp_desc(&b.1.ratio)
            .then(b.1.f_original.cmp(&a.1.f_original))
            .then(a.0.cmp(&b.0))
    });
    v.into_iter().map(|(c, _)| *c).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub code: SubgraphClass,
    pub description: String,
    pub stats: ClassStats,
    pub ratio_evolution: Vec<Ratio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceReport {
    pub labels: LabelSchema,
    pub n_replicas: usize,
    pub sigma_convention: String,
    pub smoothing: Smoothing,
    pub thresholds: MotifThresholds,
    /// Sorted by class code.
    pub classes: Vec<ClassEntry>,
    pub motifs: Vec<SubgraphClass>,
    pub anti_motifs: Vec<SubgraphClass>,
}

impl SignificanceReport {
    pub fn entry(&self, code: &SubgraphClass) -> Option<&ClassEntry> {
        self.classes
            .binary_search_by(|e| e.code.cmp(code))
            .ok()
            .map(|i| &self.classes[i])
    }

    pub fn stats_pairs(&self) -> Vec<(SubgraphClass, ClassStats)> {
        self.classes.iter().map(|e| (e.code, e.stats)).collect()
    }

    pub fn ranking(&self) -> Vec<SubgraphClass> {
        rank_by_ratio(&self.stats_pairs())
    }
}

/// Builds the report over the union of classes seen anywhere. `replicas`
/// must be in generation order; it drives the running ratio.
pub fn build_report(
    original: &CensusResult,
    replicas: &[CensusResult],
    labels: LabelSchema,
    thresholds: MotifThresholds,
    smoothing: Smoothing,
) -> Result<SignificanceReport> {
    if replicas.is_empty() {
        return Err(Error::Usage("significance needs at least one replica census".into()));
    }
    thresholds.validate()?;
    let mut all: BTreeSet<SubgraphClass> = original.counts.keys().copied().collect();
    for r in replicas {
        all.extend(r.counts.keys().copied());
    }
    let mut classes = Vec::with_capacity(all.len());
    let mut counts = Vec::with_capacity(replicas.len());
    for code in all {
        counts.clear();
        counts.extend(replicas.iter().map(|r| r.get(&code)));
        let f = original.get(&code);
        let stats = class_stats_with(f, &counts, smoothing)?;
        classes.push(ClassEntry {
            code,
            description: code.describe(&labels),
            stats,
            ratio_evolution: ratio_evolution(f, &counts, smoothing),
        });
    }
    let pairs: Vec<_> = classes.iter().map(|e| (e.code, e.stats)).collect();
    let selection = select_motifs(&pairs, &thresholds)?;
    Ok(SignificanceReport {
        labels,
        n_replicas: replicas.len(),
        sigma_convention: "population".into(),
        smoothing,
        thresholds,
        classes,
        motifs: selection.motifs,
        anti_motifs: selection.anti_motifs,
    })
}

pub fn write_report_json<W: Write>(report: &SignificanceReport, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, report)?;
    Ok(())
}

pub fn read_report_json<R: Read>(r: R) -> Result<SignificanceReport> {
    Ok(serde_json::from_reader(r)?)
}

fn z_cell(z: &ZScore) -> String {
    match z {
        ZScore::Finite { value } => value.to_string(),
        ZScore::Undefined { relation } => format!(
            "undefined:{}",
            match relation {
                Relation::Above => "above",
                Relation::Below => "below",
                Relation::Equal => "equal",
            }
        ),
    }
}

fn ratio_cell(r: &Ratio) -> String {
    match r {
        Ratio::Finite { value } => value.to_string(),
        Ratio::Infinite { .. } => "inf".into(),
        Ratio::Undefined => "undefined".into(),
    }
}

/// One row per class: code, description, f, mu, sigma, z, ratio, selection.
pub fn write_report_csv<W: Write>(report: &SignificanceReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "code",
        "description",
        "f_original",
        "mu",
        "sigma",
        "z",
        "ratio",
        "selection",
    ])?;
    for e in &report.classes {
        let selection = if report.motifs.contains(&e.code) {
            "motif"
        } else if report.anti_motifs.contains(&e.code) {
            "anti-motif"
        } else {
            ""
        };
        out.write_record([
            e.code.to_hex(),
            e.description.clone(),
            e.stats.f_original.to_string(),
            e.stats.mu.to_string(),
            e.stats.sigma.to_string(),
            z_cell(&e.stats.z),
            ratio_cell(&e.stats.ratio),
            selection.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Long format for plotting: code, t (1-based replica count), running ratio.
pub fn write_ratio_evolution_csv<W: Write>(report: &SignificanceReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["code", "t", "running_ratio"])?;
    for e in &report.classes {
        let code = e.code.to_hex();
        for (t, r) in e.ratio_evolution.iter().enumerate() {
            out.write_record([code.clone(), (t + 1).to_string(), ratio_cell(r)])?;
        }
    }
    out.flush()?;
    Ok(())
}
