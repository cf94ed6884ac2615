//! End-to-end run: ingest, build, randomize an ensemble, census every graph,
//! score significance and write the report files.
//!
//! Replica `i` is a pure function of (dataset, config, i): its RNG seed is
//! derived from the run seed and the index, so the worker count never
//! changes any output.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::{build_graph, GraphKind, GraphSpec};
use crate::catalog::render_motif_catalog;
use crate::census::{census_with_id, read_census_dump, write_census_dump, CensusResult, GraphId, LabelSchema};
use crate::error::{Error, Result};
use crate::graph::{graph_stats, GraphStats};
use crate::significance::{
    build_report, write_ratio_evolution_csv, write_report_csv, write_report_json, MotifThresholds, SignificanceReport,
    Smoothing,
};
use crate::tabular::{
    format_duration, load_transactions, randomize_dataset, replica_seed, RandomizationConfig, Schema, TabularDataset,
    Timestamp,
};

pub const STATS_FILE: &str = "stats.json";
pub const CENSUS_ORIGINAL_FILE: &str = "census_original.csv";
pub const SIGNIFICANCE_JSON_FILE: &str = "significance.json";
pub const SIGNIFICANCE_CSV_FILE: &str = "significance.csv";
pub const RATIO_EVOLUTION_FILE: &str = "ratio_evolution.csv";
pub const CATALOG_FILE: &str = "catalog.txt";

pub fn replica_census_file(i: usize) -> String {
    format!("census_replica_{i}.csv")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub schema: Schema,
    pub graph: GraphSpec,
    pub n_random_networks: usize,
    pub rho: f64,
    pub seed: u64,
    pub from: Option<Timestamp>,
    pub to: Option<Timestamp>,
    pub thresholds: MotifThresholds,
    pub smoothing: Smoothing,
    pub out_dir: PathBuf,
    /// Zero means one worker per available processor.
    pub workers: usize,
    pub catalog_top_n: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::new(),
            schema: Schema::default(),
            graph: GraphSpec::Transaction(Default::default()),
            n_random_networks: 100,
            rho: 0.8,
            seed: 0,
            from: None,
            to: None,
            thresholds: MotifThresholds::default(),
            smoothing: Smoothing::None,
            out_dir: PathBuf::from("out"),
            workers: 0,
            catalog_top_n: 10,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_random_networks == 0 {
            return Err(Error::Config("at least one random network is required".into()));
        }
        RandomizationConfig::new(self.rho, self.seed)?;
        self.thresholds.validate()?;
        if let (Some(f), Some(t)) = (self.from, self.to) {
            if f > t {
                return Err(Error::Config("period start is after its end".into()));
            }
        }
        Ok(())
    }
}

/// The `stats.json` payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub graph: GraphKind,
    pub labels: LabelSchema,
    pub transactions: usize,
    pub period: Option<(Timestamp, Timestamp)>,
    pub lookback: Option<String>,
    pub random_networks: usize,
    pub rho: f64,
    pub seed: u64,
    pub stats: GraphStats,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub stats: RunStats,
    pub original: CensusResult,
    pub replicas: Vec<CensusResult>,
    pub report: SignificanceReport,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::file(path, e))
}

fn write_census_file(dir: &Path, name: &str, census: &CensusResult, labels: &LabelSchema) -> Result<()> {
    let path = dir.join(name);
    let mut w = create(&path)?;
    write_census_dump(&mut w, census, labels)?;
    w.flush().map_err(|e| Error::file(&path, e))
}

/// Census of replica `index`, recomputable in isolation.
pub fn replica_census(data: &TabularDataset, cfg: &PipelineConfig, index: usize) -> Result<CensusResult> {
    let rcfg = RandomizationConfig::new(cfg.rho, replica_seed(cfg.seed, index as u64))?;
    let randomized = randomize_dataset(data, &rcfg);
    let g = build_graph(&randomized, &cfg.graph)?;
    Ok(census_with_id(&g, GraphId::Replica(index)))
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let data = load_transactions(&cfg.input, &cfg.schema)?;
    run_on_dataset(&data, cfg)
}

/// Same as [`run_pipeline`] with the dataset already in memory; `cfg.input`
/// is ignored.
pub fn run_on_dataset(data: &TabularDataset, cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let data = data.filter_period(cfg.from, cfg.to);
    let dir = cfg.out_dir.as_path();
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;

    let graph = build_graph(&data, &cfg.graph)?;
    let labels = LabelSchema::of(&graph);
    let stats = RunStats {
        graph: cfg.graph.kind(),
        labels: labels.clone(),
        transactions: data.len(),
        period: data.period(),
        lookback: match &cfg.graph {
            GraphSpec::Transaction(t) => Some(format_duration(t.lookback_millis)),
            GraphSpec::Entity(_) => None,
        },
        random_networks: cfg.n_random_networks,
        rho: cfg.rho,
        seed: cfg.seed,
        stats: graph_stats(&graph),
    };
    let stats_path = dir.join(STATS_FILE);
    let mut w = create(&stats_path)?;
    serde_json::to_writer_pretty(&mut w, &stats)?;
    w.flush().map_err(|e| Error::file(&stats_path, e))?;

    let original = census_with_id(&graph, GraphId::Original);
    drop(graph);
    write_census_file(dir, CENSUS_ORIGINAL_FILE, &original, &labels)?;

    let pool = thread_pool(cfg.workers)?;
    let replicas: Vec<CensusResult> = pool.install(|| {
        (0..cfg.n_random_networks)
            .into_par_iter()
            .map(|i| {
                let census = replica_census(&data, cfg, i)?;
                write_census_file(dir, &replica_census_file(i), &census, &labels)?;
                Ok(census)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let report = build_report(&original, &replicas, labels, cfg.thresholds, cfg.smoothing)?;
    write_report_outputs(dir, &report, cfg.catalog_top_n)?;
    Ok(PipelineOutcome {
        stats,
        original,
        replicas,
        report,
    })
}

/// Writes significance JSON/CSV, ratio evolution and the catalog.
pub fn write_report_outputs(dir: &Path, report: &SignificanceReport, top_n: usize) -> Result<()> {
    let path = dir.join(SIGNIFICANCE_JSON_FILE);
    let mut w = create(&path)?;
    write_report_json(report, &mut w)?;
    w.flush().map_err(|e| Error::file(&path, e))?;

    let path = dir.join(SIGNIFICANCE_CSV_FILE);
    let mut w = create(&path)?;
    write_report_csv(report, &mut w)?;
    w.flush().map_err(|e| Error::file(&path, e))?;

    let path = dir.join(RATIO_EVOLUTION_FILE);
    let mut w = create(&path)?;
    write_ratio_evolution_csv(report, &mut w)?;
    w.flush().map_err(|e| Error::file(&path, e))?;

    let path = dir.join(CATALOG_FILE);
    fs::write(&path, render_motif_catalog(report, top_n)).map_err(|e| Error::file(&path, e))
}

fn read_census_file(path: &Path, expected: GraphId) -> Result<CensusResult> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut all = read_census_dump(BufReader::new(file))?;
    let census = match all.len() {
        // A graph without connected triples dumps only the header.
        0 => CensusResult {
            graph_id: expected,
            counts: Default::default(),
        },
        1 => all.remove(0),
        _ => {
            return Err(Error::Format(format!(
                "{}: more than one graph in dump",
                path.display()
            )))
        }
    };
    if census.graph_id != expected {
        return Err(Error::Format(format!(
            "{}: holds {} but {expected} was expected",
            path.display(),
            census.graph_id
        )));
    }
    Ok(census)
}

/// Recomputes the significance report from the censuses stored in `dir`
/// and rewrites the report files. Replica files must be numbered 0..n
/// without gaps.
pub fn report_from_dir(
    dir: &Path,
    thresholds: MotifThresholds,
    smoothing: Smoothing,
    top_n: usize,
) -> Result<SignificanceReport> {
    let stats_path = dir.join(STATS_FILE);
    let file = File::open(&stats_path).map_err(|e| Error::file(&stats_path, e))?;
    let stats: RunStats = serde_json::from_reader(BufReader::new(file))?;

    let original = read_census_file(&dir.join(CENSUS_ORIGINAL_FILE), GraphId::Original)?;
    let mut indices = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::file(dir, e))? {
        let name = entry?.file_name();
        let name = name.to_string_lossy();
        if let Some(i) = name
            .strip_prefix("census_replica_")
            .and_then(|rest| rest.strip_suffix(".csv"))
            .and_then(|n| n.parse::<usize>().ok())
        {
            indices.push(i);
        }
    }
    indices.sort_unstable();
    if indices.iter().enumerate().any(|(pos, &i)| pos != i) {
        return Err(Error::Format("replica census files are not numbered 0..n".into()));
    }
    let replicas = indices
        .iter()
        .map(|&i| read_census_file(&dir.join(replica_census_file(i)), GraphId::Replica(i)))
        .collect::<Result<Vec<_>>>()?;
    let report = build_report(&original, &replicas, stats.labels, thresholds, smoothing)?;
    write_report_outputs(dir, &report, top_n)?;
    Ok(report)
}
