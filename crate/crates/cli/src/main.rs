//! `hetmotif` command-line driver.
//!
//! Every pipeline option can come from a TOML file (`--config`) whose keys
//! are the long flag names; flags given on the command line win.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hetmotif::builders::{build_graph, EntityGraphSpec, GraphSpec, TransactionGraphSpec, DEFAULT_LOOKBACK_MILLIS};
use hetmotif::catalog::render_catalog_file;
use hetmotif::census::{census_k3, write_census_dump, LabelSchema};
use hetmotif::graph::{graph_stats, write_graphml};
use hetmotif::pipeline::{report_from_dir, run_pipeline, PipelineConfig, SIGNIFICANCE_JSON_FILE};
use hetmotif::significance::{MotifThresholds, SignificanceReport, Smoothing};
use hetmotif::synth::{generate_with_manifest, PlantedPattern, SynthConfig};
use hetmotif::tabular::{load_transactions, parse_delimiter, parse_duration, write_transactions, Schema, Timestamp};
use hetmotif::Error;
use serde::Deserialize;

type Result<T> = std::result::Result<T, Error>;

#[derive(Parser)]
#[command(
    name = "hetmotif",
    version,
    about = "Heterogeneous network motif mining for transaction data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: build, randomize, census, score, report.
    Run(RunArgs),
    /// Generate a synthetic transaction CSV.
    Synth(SynthArgs),
    /// Census of the graph built from one dataset.
    Census(CensusArgs),
    /// Recompute significance from the censuses stored in an output directory.
    Report(ReportArgs),
    /// Render the motif catalog of a significance report.
    Catalog(CatalogArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Entity,
    Transaction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SmoothingArg {
    None,
    Laplace,
}

impl From<SmoothingArg> for Smoothing {
    fn from(s: SmoothingArg) -> Self {
        match s {
            SmoothingArg::None => Smoothing::None,
            SmoothingArg::Laplace => Smoothing::Laplace,
        }
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    input: Option<PathBuf>,
    schema: Option<String>,
    delimiter: Option<String>,
    from: Option<String>,
    to: Option<String>,
    graph: Option<KindArg>,
    lookback: Option<String>,
    entity_types: Option<Vec<String>>,
    shared_entities: Option<Vec<String>>,
    replicas: Option<usize>,
    rho: Option<f64>,
    seed: Option<u64>,
    workers: Option<usize>,
    motif_ratio_min: Option<f64>,
    antimotif_ratio_max: Option<f64>,
    min_support: Option<u64>,
    smoothing: Option<SmoothingArg>,
    top: Option<usize>,
    out: Option<PathBuf>,
}

fn read_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Error::File {
        path: path.to_path_buf(),
        source: e,
    })?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[derive(Args, Debug)]
struct InputOpts {
    /// Transaction CSV.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Column mapping, inline (`client=cid,merchant=mid,timestamp=ts`) or a file holding it.
    #[arg(long)]
    schema: Option<String>,
    /// Field delimiter: comma, tab, semicolon, pipe or one character.
    #[arg(long)]
    delimiter: Option<String>,
    /// Keep transactions at or after this instant (epoch seconds or RFC 3339).
    #[arg(long)]
    from: Option<String>,
    /// Keep transactions at or before this instant.
    #[arg(long)]
    to: Option<String>,
}

struct Input {
    path: PathBuf,
    schema: Schema,
    from: Option<Timestamp>,
    to: Option<Timestamp>,
}

fn parse_instant(s: Option<String>, what: &str) -> Result<Option<Timestamp>> {
    s.map(|s| s.parse().map_err(|e| Error::Config(format!("--{what}: {e}"))))
        .transpose()
}

impl InputOpts {
    fn resolve(self, file: &mut FileConfig) -> Result<Input> {
        let path = self
            .input
            .or(file.input.take())
            .ok_or_else(|| Error::Config("no input given (--input)".into()))?;
        let mut schema = match self.schema.or(file.schema.take()) {
            None => Schema::default(),
            Some(s) if Path::new(&s).is_file() => fs::read_to_string(&s)
                .map_err(|e| Error::File {
                    path: s.clone().into(),
                    source: e,
                })?
                .parse()?,
            Some(s) => s.parse()?,
        };
        if let Some(d) = self.delimiter.or(file.delimiter.take()) {
            schema.delimiter = parse_delimiter(&d)?;
        }
        Ok(Input {
            path,
            schema,
            from: parse_instant(self.from.or(file.from.take()), "from")?,
            to: parse_instant(self.to.or(file.to.take()), "to")?,
        })
    }
}

#[derive(Args, Debug)]
struct GraphOpts {
    /// Graph to build.
    #[arg(long, value_enum)]
    graph: Option<KindArg>,
    /// Transaction-graph lookback window, e.g. 6h, 90m, 3600s.
    #[arg(long)]
    lookback: Option<String>,
    /// Entity types that become entity-graph nodes (default: all schema types).
    #[arg(long, value_delimiter = ',')]
    entity_types: Option<Vec<String>>,
    /// Entity types that link transactions (default: client,merchant).
    #[arg(long, value_delimiter = ',')]
    shared_entities: Option<Vec<String>>,
}

impl GraphOpts {
    fn resolve(self, file: &mut FileConfig, schema: &Schema) -> Result<GraphSpec> {
        match self.graph.or(file.graph).unwrap_or(KindArg::Transaction) {
            KindArg::Entity => Ok(GraphSpec::Entity(EntityGraphSpec {
                entity_types: self
                    .entity_types
                    .or(file.entity_types.take())
                    .unwrap_or_else(|| schema.entity_types()),
            })),
            KindArg::Transaction => {
                let lookback_millis = match self.lookback.or(file.lookback.take()) {
                    Some(s) => parse_duration(&s).map_err(|e| Error::Config(format!("--lookback: {e}")))?,
                    None => DEFAULT_LOOKBACK_MILLIS,
                };
                let mut spec = TransactionGraphSpec {
                    lookback_millis,
                    ..Default::default()
                };
                if let Some(types) = self.shared_entities.or(file.shared_entities.take()) {
                    spec.shared_entity_types = types;
                }
                Ok(GraphSpec::Transaction(spec))
            }
        }
    }
}

#[derive(Args, Debug)]
struct ThresholdOpts {
    /// Minimum ratio for a motif.
    #[arg(long)]
    motif_ratio_min: Option<f64>,
    /// Maximum ratio for an anti-motif.
    #[arg(long)]
    antimotif_ratio_max: Option<f64>,
    /// Minimum original count (motifs) or mean replica count (anti-motifs).
    #[arg(long)]
    min_support: Option<u64>,
    /// Ratio smoothing.
    #[arg(long, value_enum)]
    smoothing: Option<SmoothingArg>,
    /// Entries per catalog section.
    #[arg(long)]
    top: Option<usize>,
}

struct Scoring {
    thresholds: MotifThresholds,
    smoothing: Smoothing,
    top: usize,
}

impl ThresholdOpts {
    fn resolve(self, file: &FileConfig) -> Scoring {
        let d = MotifThresholds::default();
        Scoring {
            thresholds: MotifThresholds {
                motif_ratio_min: self
                    .motif_ratio_min
                    .or(file.motif_ratio_min)
                    .unwrap_or(d.motif_ratio_min),
                antimotif_ratio_max: self
                    .antimotif_ratio_max
                    .or(file.antimotif_ratio_max)
                    .unwrap_or(d.antimotif_ratio_max),
                min_support: self.min_support.or(file.min_support).unwrap_or(d.min_support),
            },
            smoothing: self
                .smoothing
                .or(file.smoothing)
                .map(Smoothing::from)
                .unwrap_or_default(),
            top: self.top.or(file.top).unwrap_or(10),
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML file with defaults for any of the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    graph: GraphOpts,
    /// Number of randomized networks.
    #[arg(long)]
    replicas: Option<usize>,
    /// Fraction of rows swapped per entity column in each randomization.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every processor.
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    scoring: ThresholdOpts,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: RunArgs) -> Result<()> {
    let mut file = read_config(args.config.as_deref())?;
    let input = args.input.resolve(&mut file)?;
    let graph = args.graph.resolve(&mut file, &input.schema)?;
    let scoring = args.scoring.resolve(&file);
    let d = PipelineConfig::default();
    let cfg = PipelineConfig {
        input: input.path,
        schema: input.schema,
        graph,
        n_random_networks: args.replicas.or(file.replicas).unwrap_or(d.n_random_networks),
        rho: args.rho.or(file.rho).unwrap_or(d.rho),
        seed: args.seed.or(file.seed).unwrap_or(d.seed),
        from: input.from,
        to: input.to,
        thresholds: scoring.thresholds,
        smoothing: scoring.smoothing,
        out_dir: args.out.or(file.out).unwrap_or(d.out_dir),
        workers: args.workers.or(file.workers).unwrap_or(d.workers),
        catalog_top_n: scoring.top,
    };
    let outcome = run_pipeline(&cfg)?;
    let s = &outcome.stats.stats;
    println!(
        "{:?} graph: {} transactions, {} nodes, {} edges, {} components",
        outcome.stats.graph, outcome.stats.transactions, s.nodes, s.edges, s.components
    );
    summarize(&outcome.report);
    println!("outputs written to {}", cfg.out_dir.display());
    Ok(())
}

fn summarize(report: &SignificanceReport) {
    println!(
        "{} classes over {} random networks: {} motifs, {} anti-motifs",
        report.classes.len(),
        report.n_replicas,
        report.motifs.len(),
        report.anti_motifs.len()
    );
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
    /// Number of transactions.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    fraud_rate: Option<f64>,
    #[arg(long)]
    clients: Option<usize>,
    #[arg(long)]
    cards: Option<usize>,
    #[arg(long)]
    merchants: Option<usize>,
    #[arg(long)]
    terminals: Option<usize>,
    /// First timestamp (epoch seconds or RFC 3339).
    #[arg(long)]
    start: Option<String>,
    /// Length of the covered period, e.g. 30d.
    #[arg(long)]
    span: Option<String>,
    /// Merchant popularity exponent.
    #[arg(long)]
    zipf: Option<f64>,
    /// Planted pattern, repeatable, e.g. `repeat-pair:instances=10,repeats=3,window=6h,fraud=true`.
    #[arg(long = "plant")]
    plant: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "comma")]
    delimiter: String,
    /// Also write the planted rows' transaction ids as JSON.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::File {
        path: path.to_path_buf(),
        source: e,
    })
}

fn synth(args: SynthArgs) -> Result<()> {
    let d = SynthConfig::default();
    let cfg = SynthConfig {
        n_clients: args.clients.unwrap_or(d.n_clients),
        n_cards: args.cards.unwrap_or(d.n_cards),
        n_merchants: args.merchants.unwrap_or(d.n_merchants),
        n_terminals: args.terminals.unwrap_or(d.n_terminals),
        m: args.m.unwrap_or(d.m),
        fraud_rate: args.fraud_rate.unwrap_or(d.fraud_rate),
        start: parse_instant(args.start, "start")?.unwrap_or(d.start),
        time_span_millis: match args.span {
            Some(s) => parse_duration(&s).map_err(|e| Error::Config(format!("--span: {e}")))?,
            None => d.time_span_millis,
        },
        zipf_exponent: args.zipf.unwrap_or(d.zipf_exponent),
        planted: args
            .plant
            .iter()
            .map(|p| p.parse())
            .collect::<Result<Vec<PlantedPattern>>>()?,
        seed: args.seed,
    };
    let (data, manifest) = generate_with_manifest(&cfg)?;
    let mut w = create(&args.out)?;
    write_transactions(&data, &mut w, parse_delimiter(&args.delimiter)?)?;
    w.flush()?;
    if let Some(path) = &args.manifest {
        let entries: Vec<serde_json::Value> = manifest
            .iter()
            .map(|inst| {
                serde_json::json!({
                    "pattern": cfg.planted[inst.pattern].to_string(),
                    "txn_ids": inst.txn_ids,
                })
            })
            .collect();
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &entries)?;
        w.flush()?;
    }
    println!(
        "{} transactions ({} fraudulent, {} planted instances) written to {}",
        data.len(),
        data.fraud_count(),
        manifest.len(),
        args.out.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    input: InputOpts,
    #[command(flatten)]
    graph: GraphOpts,
    /// Census dump destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also export the graph as GraphML.
    #[arg(long)]
    graphml: Option<PathBuf>,
}

fn census(args: CensusArgs) -> Result<()> {
    let mut file = read_config(args.config.as_deref())?;
    let input = args.input.resolve(&mut file)?;
    let spec = args.graph.resolve(&mut file, &input.schema)?;
    let data = load_transactions(&input.path, &input.schema)?.filter_period(input.from, input.to);
    let g = build_graph(&data, &spec)?;
    if let Some(path) = &args.graphml {
        let mut w = create(path)?;
        write_graphml(&g, &mut w)?;
        w.flush()?;
    }
    let result = census_k3(&g);
    let labels = LabelSchema::of(&g);
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_census_dump(&mut w, &result, &labels)?;
            w.flush()?;
            let s = graph_stats(&g);
            println!(
                "{} nodes, {} edges: {} connected triples in {} classes",
                s.nodes,
                s.edges,
                result.total(),
                result.counts.len()
            );
        }
        None => write_census_dump(io::stdout().lock(), &result, &labels)?,
    }
    Ok(())
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory of an earlier `run`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    scoring: ThresholdOpts,
}

fn report(args: ReportArgs) -> Result<()> {
    let mut file = read_config(args.config.as_deref())?;
    let dir = args
        .out
        .or(file.out.take())
        .ok_or_else(|| Error::Config("no run directory given (--out)".into()))?;
    let scoring = args.scoring.resolve(&file);
    let report = report_from_dir(&dir, scoring.thresholds, scoring.smoothing, scoring.top)?;
    summarize(&report);
    Ok(())
}

#[derive(Args, Debug)]
struct CatalogArgs {
    /// `significance.json`, or a run directory containing one.
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = 10)]
    top: usize,
}

fn catalog(args: CatalogArgs) -> Result<()> {
    let path = if args.report.is_dir() {
        args.report.join(SIGNIFICANCE_JSON_FILE)
    } else {
        args.report
    };
    print!("{}", render_catalog_file(path, args.top)?);
    Ok(())
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    let record = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{record}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => return fail("usage", e.to_string().trim_end().to_string(), 2),
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Synth(a) => synth(a),
        Command::Census(a) => census(a),
        Command::Report(a) => report(a),
        Command::Catalog(a) => catalog(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.to_string(), 1),
    }
}
