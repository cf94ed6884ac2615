//! Tabular transaction data: loading, validation, writing and the
//! tabular null model (fraud-label shuffle plus per-column value swaps).
//!
//! Randomization happens on rows, never on graphs. Every graph built from a
//! randomized dataset therefore has the same semantic shape as one built from
//! real data: entity columns keep their type, so an entity graph can never
//! join two entities of the same type.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default entity types, in column order.
pub const DEFAULT_ENTITY_TYPES: [&str; 4] = ["client", "card", "merchant", "terminal"];

/// Milliseconds since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn from_secs(secs: i64) -> Self {
        Timestamp(secs * 1000)
    }

    pub fn millis(self) -> i64 {
        self.0
    }
}

impl FromStr for Timestamp {
    type Err = String;

    /// Accepts integer epoch seconds or RFC 3339.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Ok(secs) = s.parse::<i64>() {
            return secs
                .checked_mul(1000)
                .map(Timestamp)
                .ok_or_else(|| format!("epoch seconds out of range: `{s}`"));
        }
        DateTime::parse_from_rfc3339(s)
            .map(|dt| Timestamp(dt.timestamp_millis()))
            .map_err(|e| format!("unparseable timestamp `{s}`: {e}"))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 1000 == 0 {
            return write!(f, "{}", self.0 / 1000);
        }
        match DateTime::<Utc>::from_timestamp_millis(self.0) {
            Some(dt) => f.write_str(&dt.to_rfc3339_opts(SecondsFormat::Millis, true)),
            None => write!(f, "{}", self.0 / 1000),
        }
    }
}

/// Parses a duration such as `6h`, `30m`, `90s`, `2d` or `500ms` into
/// milliseconds. A bare integer is read as seconds.
pub fn parse_duration(s: &str) -> Result<i64, String> {
    let s = s.trim();
    let split = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    let (digits, unit) = s.split_at(split);
    if digits.is_empty() {
        return Err(format!("invalid duration `{s}`"));
    }
    let n: i64 = digits.parse().map_err(|_| format!("invalid duration `{s}`"))?;
    let scale = match unit.trim() {
        "" | "s" => 1_000,
        "ms" => 1,
        "m" | "min" => 60_000,
        "h" => 3_600_000,
        "d" => 86_400_000,
        other => return Err(format!("unknown duration unit `{other}` in `{s}`")),
    };
    n.checked_mul(scale)
        .ok_or_else(|| format!("duration out of range: `{s}`"))
}

/// Formats milliseconds using the largest unit that divides evenly.
pub fn format_duration(millis: i64) -> String {
    for (scale, unit) in [(86_400_000, "d"), (3_600_000, "h"), (60_000, "m"), (1_000, "s")] {
        if millis != 0 && millis % scale == 0 {
            return format!("{}{unit}", millis / scale);
        }
    }
    format!("{millis}ms")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransactionRecord {
    pub txn_id: String,
    pub timestamp: Timestamp,
    /// One value per entity type, in the dataset's `entity_types` order.
    pub entities: Vec<String>,
    pub is_fraud: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabularDataset {
    entity_types: Vec<String>,
    records: Vec<TransactionRecord>,
}

impl TabularDataset {
    pub fn new(entity_types: Vec<String>, records: Vec<TransactionRecord>) -> Result<Self> {
        if entity_types.is_empty() {
            return Err(Error::Schema("at least one entity type is required".into()));
        }
        let mut seen_types = HashSet::new();
        for t in &entity_types {
            if t.is_empty() || !seen_types.insert(t.as_str()) {
                return Err(Error::Schema(format!("invalid or repeated entity type `{t}`")));
            }
        }
        let mut ids = HashSet::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.entities.len() != entity_types.len() {
                return Err(Error::Structural(format!(
                    "record {i} has {} entities, expected {}",
                    r.entities.len(),
                    entity_types.len()
                )));
            }
            if let Some(pos) = r.entities.iter().position(String::is_empty) {
                return Err(Error::Structural(format!(
                    "record {i} has an empty `{}` value",
                    entity_types[pos]
                )));
            }
            if !ids.insert(r.txn_id.as_str()) {
                return Err(Error::DuplicateTxnId(r.txn_id.clone()));
            }
        }
        Ok(TabularDataset { entity_types, records })
    }

    pub fn entity_types(&self) -> &[String] {
        &self.entity_types
    }

    pub fn records(&self) -> &[TransactionRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn entity_index(&self, name: &str) -> Option<usize> {
        self.entity_types.iter().position(|t| t == name)
    }

    pub fn fraud_count(&self) -> usize {
        self.records.iter().filter(|r| r.is_fraud).count()
    }

    pub fn column(&self, idx: usize) -> impl Iterator<Item = &str> + '_ {
        self.records.iter().map(move |r| r.entities[idx].as_str())
    }

    /// Earliest and latest timestamps, if any rows exist.
    pub fn period(&self) -> Option<(Timestamp, Timestamp)> {
        let min = self.records.iter().map(|r| r.timestamp).min()?;
        let max = self.records.iter().map(|r| r.timestamp).max()?;
        Some((min, max))
    }

    /// Keeps rows with `from <= timestamp <= to`. Either bound may be open.
    pub fn filter_period(&self, from: Option<Timestamp>, to: Option<Timestamp>) -> TabularDataset {
        let records = self
            .records
            .iter()
            .filter(|r| from.is_none_or(|f| r.timestamp >= f) && to.is_none_or(|t| r.timestamp <= t))
            .cloned()
            .collect();
        TabularDataset {
            entity_types: self.entity_types.clone(),
            records,
        }
    }
}

/// One entity type and the header it is read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityColumn {
    pub entity_type: String,
    pub column: String,
}

/// Maps logical columns to header names.
///
/// Text form: comma- or newline-separated `key=value` pairs. The reserved
/// keys are `txn_id`, `timestamp`, `fraud` and `delimiter`; every other key
/// declares an entity type, in order. For example
/// `timestamp=ts,fraud=is_fraud,client=client_id,merchant=merchant_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    /// Without an id column, ids are the 1-based data row ordinals.
    pub txn_id: Option<String>,
    pub timestamp: String,
    pub fraud: String,
    pub entities: Vec<EntityColumn>,
    pub delimiter: u8,
}

impl Default for Schema {
    fn default() -> Self {
        Schema::for_entity_types(DEFAULT_ENTITY_TYPES.iter().copied())
    }
}

impl Schema {
    /// Schema whose entity columns are named after their types, matching the
    /// layout [`write_transactions`] produces.
    pub fn for_entity_types<'a>(types: impl IntoIterator<Item = &'a str>) -> Self {
        Schema {
            txn_id: Some("txn_id".into()),
            timestamp: "timestamp".into(),
            fraud: "fraud".into(),
            entities: types
                .into_iter()
                .map(|t| EntityColumn {
                    entity_type: t.into(),
                    column: t.into(),
                })
                .collect(),
            delimiter: b',',
        }
    }

    pub fn entity_types(&self) -> Vec<String> {
        self.entities.iter().map(|e| e.entity_type.clone()).collect()
    }
}

/// `comma`, `tab`, `semicolon`, `pipe` or a single ASCII character.
pub fn parse_delimiter(value: &str) -> Result<u8> {
    match value {
        "comma" | "," => Ok(b','),
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        "semicolon" | ";" => Ok(b';'),
        "pipe" | "|" => Ok(b'|'),
        v if v.len() == 1 && v.is_ascii() => Ok(v.as_bytes()[0]),
        v => Err(Error::Schema(format!("unsupported delimiter `{v}`"))),
    }
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut schema = Schema {
            txn_id: None,
            timestamp: "timestamp".into(),
            fraud: "fraud".into(),
            entities: Vec::new(),
            delimiter: b',',
        };
        for entry in s.split([',', '\n']) {
            let entry = entry.trim();
            if entry.is_empty() || entry.starts_with('#') {
                continue;
            }
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| Error::Schema(format!("expected key=value, got `{entry}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::Schema(format!("empty key or value in `{entry}`")));
            }
            match key {
                "txn_id" => schema.txn_id = Some(value.into()),
                "timestamp" => schema.timestamp = value.into(),
                "fraud" => schema.fraud = value.into(),
                "delimiter" => schema.delimiter = parse_delimiter(value)?,
                entity => {
                    if schema.entities.iter().any(|e| e.entity_type == entity) {
                        return Err(Error::Schema(format!("entity type `{entity}` declared twice")));
                    }
                    schema.entities.push(EntityColumn {
                        entity_type: entity.into(),
                        column: value.into(),
                    });
                }
            }
        }
        if schema.entities.is_empty() {
            return Err(Error::Schema("no entity columns declared".into()));
        }
        Ok(schema)
    }
}

fn parse_fraud(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

/// Loads a delimited file. Rows keep file order.
pub fn load_transactions(path: impl AsRef<Path>, schema: &Schema) -> Result<TabularDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    read_transactions(file, schema)
}

/// Reader-based form of [`load_transactions`].
pub fn read_transactions<R: Read>(reader: R, schema: &Schema) -> Result<TabularDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                column: name.to_string(),
            })
    };
    let id_col = schema.txn_id.as_deref().map(find).transpose()?;
    let ts_col = find(&schema.timestamp)?;
    let fraud_col = find(&schema.fraud)?;
    let entity_cols = schema
        .entities
        .iter()
        .map(|e| find(&e.column))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut ids = HashSet::new();
    for (ordinal, row) in rdr.records().enumerate() {
        let row = row?;
        let line = row.position().map_or(ordinal as u64 + 2, |p| p.line());
        if row.len() != headers.len() {
            return Err(Error::Row {
                line,
                message: format!("expected {} fields, found {}", headers.len(), row.len()),
            });
        }
        let txn_id = match id_col {
            Some(c) => row[c].to_string(),
            None => (ordinal + 1).to_string(),
        };
        if txn_id.is_empty() {
            return Err(Error::Row {
                line,
                message: "empty txn_id".into(),
            });
        }
        let timestamp = row[ts_col]
            .parse::<Timestamp>()
            .map_err(|message| Error::Row { line, message })?;
        let is_fraud = parse_fraud(&row[fraud_col]).ok_or_else(|| Error::Row {
            line,
            message: format!("unparseable fraud flag `{}`", &row[fraud_col]),
        })?;
        let mut entities = Vec::with_capacity(entity_cols.len());
        for (col, spec) in entity_cols.iter().zip(&schema.entities) {
            let v = &row[*col];
            if v.is_empty() {
                return Err(Error::Row {
                    line,
                    message: format!("empty `{}` value", spec.entity_type),
                });
            }
            entities.push(v.to_string());
        }
        if !ids.insert(txn_id.clone()) {
            return Err(Error::DuplicateTxnId(txn_id));
        }
        records.push(TransactionRecord {
            txn_id,
            timestamp,
            entities,
            is_fraud,
        });
    }
    TabularDataset::new(schema.entity_types(), records)
}

/// Writes the layout described by [`Schema::for_entity_types`].
pub fn write_transactions<W: Write>(data: &TabularDataset, writer: W, delimiter: u8) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    let mut header = vec!["txn_id", "timestamp", "fraud"];
    header.extend(data.entity_types().iter().map(String::as_str));
    w.write_record(&header)?;
    for r in data.records() {
        let ts = r.timestamp.to_string();
        let mut row: Vec<&str> = vec![&r.txn_id, &ts, if r.is_fraud { "1" } else { "0" }];
        row.extend(r.entities.iter().map(String::as_str));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomizationConfig {
    rho: f64,
    pub seed: u64,
    pub shuffle_fraud: bool,
}

impl RandomizationConfig {
    pub fn new(rho: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::Config(format!("rho must lie in [0, 1], got {rho}")));
        }
        Ok(RandomizationConfig {
            rho,
            seed,
            shuffle_fraud: true,
        })
    }

    pub fn with_shuffle_fraud(mut self, shuffle: bool) -> Self {
        self.shuffle_fraud = shuffle;
        self
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Number of swap pairs drawn per entity column: `floor(rho * m)`.
pub fn swap_budget(m: usize, rho: f64) -> usize {
    // The epsilon absorbs products such as 0.29 * 100 = 28.999999999999996.
    (rho * m as f64 + 1e-9).floor() as usize
}

/// Seed for replica `index` of an ensemble rooted at `base` (splitmix64).
pub fn replica_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What a randomization did, for auditing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RandomizationTrace {
    /// `new_fraud[i] = old_fraud[permutation[i]]`, when the shuffle ran.
    pub fraud_permutation: Option<Vec<usize>>,
    /// Per entity column, the row pairs exchanged in order.
    pub swaps: Vec<Vec<(usize, usize)>>,
}

/// Null-model randomization of a dataset: a uniform permutation of the
/// fraud flags followed by `floor(rho * m)` random row-pair swaps in each
/// entity column. Timestamps and ids never move.
pub fn randomize_dataset(data: &TabularDataset, cfg: &RandomizationConfig) -> TabularDataset {
    randomize_with_trace(data, cfg).0
}

pub fn randomize_with_trace(data: &TabularDataset, cfg: &RandomizationConfig) -> (TabularDataset, RandomizationTrace) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = data.clone();
    let m = out.records.len();
    let mut trace = RandomizationTrace::default();

    if cfg.shuffle_fraud {
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut rng);
        for (dst, &src) in out.records.iter_mut().zip(&perm) {
            dst.is_fraud = data.records[src].is_fraud;
        }
        trace.fraud_permutation = Some(perm);
    }

    // A pair needs two distinct rows.
    let budget = if m < 2 { 0 } else { swap_budget(m, cfg.rho) };
    for col in 0..out.entity_types.len() {
        let mut pairs = Vec::with_capacity(budget);
        for _ in 0..budget {
            let i = rng.gen_range(0..m);
            let mut j = rng.gen_range(0..m - 1);
            if j >= i {
                j += 1;
            }
            let (lo, hi) = (i.min(j), i.max(j));
            let (head, tail) = out.records.split_at_mut(hi);
            std::mem::swap(&mut head[lo].entities[col], &mut tail[0].entities[col]);
            pairs.push((i, j));
        }
        trace.swaps.push(pairs);
    }
    (out, trace)
}
