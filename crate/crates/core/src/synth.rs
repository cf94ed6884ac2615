//! Seeded synthetic transaction data with plantable fraud patterns.
//!
//! Cards belong to clients and terminals to merchants (many-to-one, small
//! fan-out). Background rows pick a uniform client and a Zipf-popular
//! merchant, then one of the owner's cards / terminals, at a uniform time.
//! Planted rows use uniformly chosen entities so a pattern is not hidden
//! inside a hub.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabular::{
    format_duration, parse_duration, TabularDataset, Timestamp, TransactionRecord, DEFAULT_ENTITY_TYPES,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlantedPattern {
    /// One client, fraudulent transactions at `merchants` distinct merchants
    /// within `window_millis`.
    RecurringClient {
        instances: usize,
        merchants: usize,
        window_millis: i64,
    },
    /// One client at one merchant, `repeats` transactions within `window_millis`.
    RepeatPair {
        instances: usize,
        repeats: usize,
        window_millis: i64,
        fraud: bool,
    },
    /// `size` transactions of distinct clients at one merchant, same timestamp.
    Burst { instances: usize, size: usize, fraud: bool },
}

impl PlantedPattern {
    pub fn instances(&self) -> usize {
        match *self {
            PlantedPattern::RecurringClient { instances, .. }
            | PlantedPattern::RepeatPair { instances, .. }
            | PlantedPattern::Burst { instances, .. } => instances,
        }
    }

    pub fn rows_per_instance(&self) -> usize {
        match *self {
            PlantedPattern::RecurringClient { merchants, .. } => merchants,
            PlantedPattern::RepeatPair { repeats, .. } => repeats,
            PlantedPattern::Burst { size, .. } => size,
        }
    }

    pub fn is_fraud(&self) -> bool {
        match *self {
            PlantedPattern::RecurringClient { .. } => true,
            PlantedPattern::RepeatPair { fraud, .. } | PlantedPattern::Burst { fraud, .. } => fraud,
        }
    }

    fn window(&self) -> i64 {
        match *self {
            PlantedPattern::RecurringClient { window_millis, .. }
            | PlantedPattern::RepeatPair { window_millis, .. } => window_millis,
            PlantedPattern::Burst { .. } => 0,
        }
    }
}

/// Text form: `kind:key=value,...`, for example
/// `repeat-pair:instances=13,repeats=3,window=6h,fraud=true`,
/// `recurring-client:instances=5,merchants=3,window=1h` or
/// `burst:instances=4,size=3,fraud=false`.
impl FromStr for PlantedPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("planted pattern `{s}`: {msg}"));
        let (kind, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut instances = 1usize;
        let mut count: Option<usize> = None;
        let mut window: Option<i64> = None;
        let mut fraud = true;
        for kv in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{kv}`")))?;
            let int = || {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| bad(format!("`{k}` needs an integer")))
            };
            match (kind, k.trim()) {
                (_, "instances") => instances = int()?,
                ("recurring-client", "merchants") | ("repeat-pair", "repeats") | ("burst", "size") => {
                    count = Some(int()?)
                }
                ("recurring-client" | "repeat-pair", "window") => window = Some(parse_duration(v).map_err(bad)?),
                ("repeat-pair" | "burst", "fraud") => {
                    fraud = v
                        .trim()
                        .parse()
                        .map_err(|_| bad("`fraud` must be true or false".into()))?
                }
                (_, other) => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let p = match kind {
            "recurring-client" => PlantedPattern::RecurringClient {
                instances,
                merchants: count.unwrap_or(3),
                window_millis: window.unwrap_or(3_600_000),
            },
            "repeat-pair" => PlantedPattern::RepeatPair {
                instances,
                repeats: count.unwrap_or(3),
                window_millis: window.unwrap_or(6 * 3_600_000),
                fraud,
            },
            "burst" => PlantedPattern::Burst {
                instances,
                size: count.unwrap_or(3),
                fraud,
            },
            other => return Err(bad(format!("unknown kind `{other}`"))),
        };
        if p.rows_per_instance() < 2 {
            return Err(bad("a pattern needs at least 2 rows per instance".into()));
        }
        Ok(p)
    }
}

impl fmt::Display for PlantedPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PlantedPattern::RecurringClient {
                instances,
                merchants,
                window_millis,
            } => write!(
                f,
                "recurring-client:instances={instances},merchants={merchants},window={}",
                format_duration(window_millis)
            ),
            PlantedPattern::RepeatPair {
                instances,
                repeats,
                window_millis,
                fraud,
            } => write!(
                f,
                "repeat-pair:instances={instances},repeats={repeats},window={},fraud={fraud}",
                format_duration(window_millis)
            ),
            PlantedPattern::Burst { instances, size, fraud } => {
                write!(f, "burst:instances={instances},size={size},fraud={fraud}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_clients: usize,
    pub n_cards: usize,
    pub n_merchants: usize,
    pub n_terminals: usize,
    pub m: usize,
    pub fraud_rate: f64,
    pub start: Timestamp,
    pub time_span_millis: i64,
    /// Merchant popularity exponent.
    pub zipf_exponent: f64,
    pub planted: Vec<PlantedPattern>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_clients: 5_000,
            n_cards: 6_000,
            n_merchants: 2_000,
            n_terminals: 2_600,
            m: 20_000,
            fraud_rate: 0.002,
            start: Timestamp::from_secs(1_600_000_000),
            time_span_millis: 30 * 86_400_000,
            zipf_exponent: 1.2,
            planted: Vec::new(),
            seed: 0,
        }
    }
}

/// Rows generated for one planted instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedInstance {
    pub pattern: usize,
    pub txn_ids: Vec<String>,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_clients == 0 || self.n_cards == 0 || self.n_merchants == 0 || self.n_terminals == 0 {
            return bad("entity counts must be positive".into());
        }
        if self.n_cards < self.n_clients || self.n_terminals < self.n_merchants {
            return bad("need at least one card per client and one terminal per merchant".into());
        }
        if !(self.fraud_rate > 0.0 && self.fraud_rate < 1.0) {
            return bad(format!("fraud_rate must lie in (0, 1), got {}", self.fraud_rate));
        }
        if self.time_span_millis <= 0 {
            return bad("time span must be positive".into());
        }
        if !(self.zipf_exponent >= 0.0 && self.zipf_exponent.is_finite()) {
            return bad("zipf exponent must be finite and non-negative".into());
        }
        let mut planted_rows = 0usize;
        for p in &self.planted {
            let rows = p.rows_per_instance();
            if rows < 2 {
                return bad(format!("pattern `{p}` needs at least 2 rows per instance"));
            }
            match p {
                PlantedPattern::RecurringClient { merchants, .. } if *merchants > self.n_merchants => {
                    return bad(format!(
                        "pattern `{p}` needs {merchants} merchants, only {} exist",
                        self.n_merchants
                    ))
                }
                PlantedPattern::Burst { size, .. } if *size > self.n_clients => {
                    return bad(format!(
                        "pattern `{p}` needs {size} clients, only {} exist",
                        self.n_clients
                    ))
                }
                _ => {}
            }
            if p.window() < 0 || p.window() > self.time_span_millis {
                return bad(format!("pattern `{p}` window does not fit in the time span"));
            }
            planted_rows = planted_rows.saturating_add(rows.saturating_mul(p.instances()));
        }
        if planted_rows > self.m {
            return bad(format!("planted patterns need {planted_rows} rows but m = {}", self.m));
        }
        Ok(())
    }

    /// Target number of fraudulent rows: `round(fraud_rate * m)`.
    pub fn fraud_target(&self) -> usize {
        (self.fraud_rate * self.m as f64).round() as usize
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<TabularDataset> {
    generate_with_manifest(cfg).map(|(d, _)| d)
}

struct Row {
    ts: i64,
    client: usize,
    merchant: usize,
    fraud: bool,
    planted: Option<usize>,
}

pub fn generate_with_manifest(cfg: &SynthConfig) -> Result<(TabularDataset, Vec<PlantedInstance>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let client_cards = owners(cfg.n_clients, cfg.n_cards, &mut rng);
    let merchant_terminals = owners(cfg.n_merchants, cfg.n_terminals, &mut rng);

    let mut ranks: Vec<usize> = (0..cfg.n_merchants).collect();
    ranks.shuffle(&mut rng);
    let weights: Vec<f64> = (1..=cfg.n_merchants)
        .map(|r| (r as f64).powf(-cfg.zipf_exponent))
        .collect();
    let merchant_dist = WeightedIndex::new(&weights).map_err(|e| Error::Config(e.to_string()))?;

    let start = cfg.start.millis();
    let span_secs = (cfg.time_span_millis / 1000).max(1);
    let mut rows: Vec<Row> = Vec::with_capacity(cfg.m);
    let mut instances = 0usize;

    for p in &cfg.planted {
        for _ in 0..p.instances() {
            let window_secs = p.window() / 1000;
            let t0 = start + 1000 * rng.gen_range(0..=(span_secs - window_secs).max(0));
            let tag = Some(instances);
            instances += 1;
            match *p {
                PlantedPattern::RecurringClient { merchants, .. } => {
                    let client = rng.gen_range(0..cfg.n_clients);
                    for merchant in index::sample(&mut rng, cfg.n_merchants, merchants) {
                        let ts = t0 + 1000 * rng.gen_range(0..=window_secs);
                        rows.push(Row {
                            ts,
                            client,
                            merchant,
                            fraud: true,
                            planted: tag,
                        });
                    }
                }
                PlantedPattern::RepeatPair { repeats, fraud, .. } => {
                    let client = rng.gen_range(0..cfg.n_clients);
                    let merchant = rng.gen_range(0..cfg.n_merchants);
                    for _ in 0..repeats {
                        let ts = t0 + 1000 * rng.gen_range(0..=window_secs);
                        rows.push(Row {
                            ts,
                            client,
                            merchant,
                            fraud,
                            planted: tag,
                        });
                    }
                }
                PlantedPattern::Burst { size, fraud, .. } => {
                    let merchant = rng.gen_range(0..cfg.n_merchants);
                    for client in index::sample(&mut rng, cfg.n_clients, size) {
                        rows.push(Row {
                            ts: t0,
                            client,
                            merchant,
                            fraud,
                            planted: tag,
                        });
                    }
                }
            }
        }
    }

    let planted_rows = rows.len();
    let planted_fraud = rows.iter().filter(|r| r.fraud).count();
    for _ in planted_rows..cfg.m {
        rows.push(Row {
            ts: start + 1000 * rng.gen_range(0..span_secs),
            client: rng.gen_range(0..cfg.n_clients),
            merchant: ranks[merchant_dist.sample(&mut rng)],
            fraud: false,
            planted: None,
        });
    }
    let background = cfg.m - planted_rows;
    let extra_fraud = cfg.fraud_target().saturating_sub(planted_fraud).min(background);
    for i in index::sample(&mut rng, background, extra_fraud) {
        rows[planted_rows + i].fraud = true;
    }

    // Card and terminal picks happen after all rows exist so background
    // draws do not depend on how many planted rows precede them.
    let mut records_src: Vec<(Row, usize, usize)> = rows
        .into_iter()
        .map(|r| {
            let card = *client_cards[r.client]
                .choose(&mut rng)
                .expect("every client owns a card");
            let terminal = *merchant_terminals[r.merchant]
                .choose(&mut rng)
                .expect("every merchant owns a terminal");
            (r, card, terminal)
        })
        .collect();
    records_src.sort_by_key(|(r, _, _)| r.ts);

    let width = cfg.m.to_string().len().max(6);
    let mut manifest: Vec<PlantedInstance> = Vec::with_capacity(instances);
    let mut instance_pattern = Vec::with_capacity(instances);
    for (pi, p) in cfg.planted.iter().enumerate() {
        instance_pattern.extend(std::iter::repeat_n(pi, p.instances()));
    }
    for &pattern in &instance_pattern {
        manifest.push(PlantedInstance {
            pattern,
            txn_ids: Vec::new(),
        });
    }
    let records = records_src
        .into_iter()
        .enumerate()
        .map(|(i, (r, card, terminal))| {
            let txn_id = format!("T{:0width$}", i + 1);
            if let Some(inst) = r.planted {
                manifest[inst].txn_ids.push(txn_id.clone());
            }
            TransactionRecord {
                txn_id,
                timestamp: Timestamp(r.ts),
                entities: vec![
                    format!("C{}", r.client),
                    format!("K{card}"),
                    format!("M{}", r.merchant),
                    format!("P{terminal}"),
                ],
                is_fraud: r.fraud,
            }
        })
        .collect();
    let data = TabularDataset::new(DEFAULT_ENTITY_TYPES.iter().map(|s| s.to_string()).collect(), records)?;
    Ok((data, manifest))
}

/// Splits `n_items` among `n_owners`: item i < n_owners belongs to owner i,
/// the rest to uniformly random owners.
fn owners(n_owners: usize, n_items: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..n_owners).map(|i| vec![i]).collect();
    for item in n_owners..n_items {
        out[rng.gen_range(0..n_owners)].push(item);
    }
    out
}
