//! Entity and transaction graph construction from tabular data.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, HeteroGraph, NodeId, NodeLabel, FRAUD_LABEL, LEGIT_LABEL};
use crate::tabular::{TabularDataset, DEFAULT_ENTITY_TYPES};

/// Six hours in milliseconds.
pub const DEFAULT_LOOKBACK_MILLIS: i64 = 6 * 3_600_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityGraphSpec {
    pub entity_types: Vec<String>,
}

impl Default for EntityGraphSpec {
    fn default() -> Self {
        EntityGraphSpec {
            entity_types: DEFAULT_ENTITY_TYPES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransactionGraphSpec {
    pub shared_entity_types: Vec<String>,
    pub lookback_millis: i64,
}

impl Default for TransactionGraphSpec {
    fn default() -> Self {
        TransactionGraphSpec {
            shared_entity_types: vec!["client".into(), "merchant".into()],
            lookback_millis: DEFAULT_LOOKBACK_MILLIS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Entity,
    Transaction,
}

impl std::str::FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entity" => Ok(GraphKind::Entity),
            "transaction" => Ok(GraphKind::Transaction),
            other => Err(Error::Config(format!("unknown graph kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphSpec {
    Entity(EntityGraphSpec),
    Transaction(TransactionGraphSpec),
}

impl GraphSpec {
    pub fn kind(&self) -> GraphKind {
        match self {
            GraphSpec::Entity(_) => GraphKind::Entity,
            GraphSpec::Transaction(_) => GraphKind::Transaction,
        }
    }
}

pub fn build_graph(data: &TabularDataset, spec: &GraphSpec) -> Result<HeteroGraph> {
    match spec {
        GraphSpec::Entity(s) => build_entity_graph(data, s),
        GraphSpec::Transaction(s) => build_transaction_graph(data, s),
    }
}

fn resolve_types(data: &TabularDataset, names: &[String]) -> Result<Vec<usize>> {
    if names.is_empty() {
        return Err(Error::Config("at least one entity type must be selected".into()));
    }
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let idx = data
            .entity_index(name)
            .ok_or_else(|| Error::Config(format!("dataset has no entity type `{name}`")))?;
        if out.contains(&idx) {
            return Err(Error::Config(format!("entity type `{name}` selected twice")));
        }
        out.push(idx);
    }
    Ok(out)
}

/// Undirected graph with one node per (entity type, value). Each transaction
/// contributes a clique over its entities; an edge is `fraud` when any
/// transaction it aggregates is fraudulent.
pub fn build_entity_graph(data: &TabularDataset, spec: &EntityGraphSpec) -> Result<HeteroGraph> {
    let types = resolve_types(data, &spec.entity_types)?;
    let mut node_ids: HashMap<(usize, &str), NodeId> = HashMap::new();
    let mut nodes: Vec<(NodeLabel, String)> = Vec::new();
    let mut edges: HashMap<(NodeId, NodeId), bool> = HashMap::new();
    let mut members = Vec::with_capacity(types.len());

    for record in data.records() {
        members.clear();
        for (slot, &col) in types.iter().enumerate() {
            let value = record.entities[col].as_str();
            let id = *node_ids.entry((slot, value)).or_insert_with(|| {
                nodes.push((NodeLabel(slot as u16), format!("{}:{value}", spec.entity_types[slot])));
                (nodes.len() - 1) as NodeId
            });
            members.push(id);
        }
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let key = (members[a].min(members[b]), members[a].max(members[b]));
                *edges.entry(key).or_insert(false) |= record.is_fraud;
            }
        }
    }

    let mut edge_list: Vec<_> = edges
        .into_iter()
        .map(|((u, v), fraud)| (u, v, EdgeLabel(fraud as u16)))
        .collect();
    edge_list.sort_unstable();
    HeteroGraph::from_parts(
        false,
        spec.entity_types.clone(),
        vec![LEGIT_LABEL.into(), FRAUD_LABEL.into()],
        nodes,
        edge_list,
    )
}

/// Edge-label names for a shared-entity vocabulary: label `mask - 1` names
/// the non-empty subset `mask` of `types`, joined with `+`.
pub fn shared_entity_vocab(types: &[String]) -> Vec<String> {
    (1u32..(1 << types.len()))
        .map(|mask| {
            types
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, t)| t.as_str())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect()
}

/// Directed graph with one node per transaction (`legit`/`fraud`). Two
/// transactions sharing at least one selected entity within the lookback
/// window (inclusive) are joined older -> newer, or both ways on equal
/// timestamps. The edge label is the exact set of shared entity types.
pub fn build_transaction_graph(data: &TabularDataset, spec: &TransactionGraphSpec) -> Result<HeteroGraph> {
    let types = resolve_types(data, &spec.shared_entity_types)?;
    if types.len() > 15 {
        return Err(Error::Config("at most 15 shared entity types are supported".into()));
    }
    if spec.lookback_millis <= 0 {
        return Err(Error::Config("lookback must be positive".into()));
    }
    let records = data.records();
    let ts: Vec<i64> = records.iter().map(|r| r.timestamp.millis()).collect();

    let mut masks: HashMap<(NodeId, NodeId), u32> = HashMap::new();
    for (bit, &col) in types.iter().enumerate() {
        let mut groups: HashMap<&str, Vec<NodeId>> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            groups.entry(r.entities[col].as_str()).or_default().push(i as NodeId);
        }
        for group in groups.values_mut() {
            group.sort_unstable_by_key(|&i| (ts[i as usize], i));
            for (pos, &a) in group.iter().enumerate() {
                for &b in &group[pos + 1..] {
                    if ts[b as usize] - ts[a as usize] > spec.lookback_millis {
                        break;
                    }
                    *masks.entry((a.min(b), a.max(b))).or_insert(0) |= 1 << bit;
                }
            }
        }
    }

    let mut arcs = Vec::with_capacity(masks.len() * 2);
    for ((a, b), mask) in masks {
        let label = EdgeLabel((mask - 1) as u16);
        let (ta, tb) = (ts[a as usize], ts[b as usize]);
        if ta <= tb {
            arcs.push((a, b, label));
        }
        if tb <= ta {
            arcs.push((b, a, label));
        }
    }
    arcs.sort_unstable();

    let nodes = records
        .iter()
        .map(|r| (NodeLabel(r.is_fraud as u16), r.txn_id.clone()))
        .collect();
    HeteroGraph::from_parts(
        true,
        vec![LEGIT_LABEL.into(), FRAUD_LABEL.into()],
        shared_entity_vocab(&spec.shared_entity_types),
        nodes,
        arcs,
    )
}
