//! Size-3 heterogeneous subgraph census.
//!
//! Every weakly connected induced node triple is visited once by an
//! ESU-style walk (root = smallest id, extensions restricted to larger ids
//! and to exclusive neighbors). Occurrences are first tallied by their raw,
//! order-dependent labeling and only canonicalized once per distinct raw
//! form at the end.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, Neighbor, NodeId};

/// Bytes in a class code: 3 node labels plus 3 pairs x 2 directions,
/// each a big-endian u16.
pub const CODE_LEN: usize = 18;

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// A three-node labeled (di)graph. `arcs[i][j]` is the label of edge i -> j;
/// undirected edges appear in both directions with the same label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabeledTriple {
    pub labels: [u16; 3],
    pub arcs: [[Option<u16>; 3]; 3],
}

impl LabeledTriple {
    pub fn linked(&self, i: usize, j: usize) -> bool {
        self.arcs[i][j].is_some() || self.arcs[j][i].is_some()
    }

    pub fn is_connected(&self) -> bool {
        PAIRS.iter().filter(|&&(i, j)| self.linked(i, j)).count() >= 2
    }

    /// Relabels so that new position `k` holds old node `perm[k]`.
    pub fn permuted(&self, perm: [usize; 3]) -> LabeledTriple {
        let mut out = LabeledTriple {
            labels: [0; 3],
            arcs: [[None; 3]; 3],
        };
        for a in 0..3 {
            out.labels[a] = self.labels[perm[a]];
            for b in 0..3 {
                out.arcs[a][b] = self.arcs[perm[a]][perm[b]];
            }
        }
        out
    }

    fn serialize(&self) -> [u8; CODE_LEN] {
        let mut buf = [0u8; CODE_LEN];
        let mut at = 0;
        let mut put = |v: u16| {
            buf[at..at + 2].copy_from_slice(&v.to_be_bytes());
            at += 2;
        };
        for l in self.labels {
            put(l);
        }
        for (i, j) in PAIRS {
            put(self.arcs[i][j].map_or(0, |l| l + 1));
            put(self.arcs[j][i].map_or(0, |l| l + 1));
        }
        buf
    }

    pub fn from_graph(g: &HeteroGraph, nodes: [NodeId; 3]) -> LabeledTriple {
        let mut t = LabeledTriple {
            labels: nodes.map(|u| g.node_label(u).0),
            arcs: [[None; 3]; 3],
        };
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    t.arcs[i][j] = g.edge(nodes[i], nodes[j]).map(|l| l.0);
                }
            }
        }
        t
    }
}

/// Canonical code of one heterogeneous isomorphism class: the
/// lexicographically smallest serialization over all six node orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubgraphClass([u8; CODE_LEN]);

impl SubgraphClass {
    pub fn as_bytes(&self) -> &[u8; CODE_LEN] {
        &self.0
    }

    /// The triple in canonical node order.
    pub fn decode(&self) -> LabeledTriple {
        let word = |k: usize| u16::from_be_bytes([self.0[2 * k], self.0[2 * k + 1]]);
        let mut t = LabeledTriple {
            labels: [word(0), word(1), word(2)],
            arcs: [[None; 3]; 3],
        };
        for (p, (i, j)) in PAIRS.into_iter().enumerate() {
            t.arcs[i][j] = word(3 + 2 * p).checked_sub(1);
            t.arcs[j][i] = word(4 + 2 * p).checked_sub(1);
        }
        t
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Human-readable form, e.g. `[client card merchant] 0-1:fraud 0-2:legit`
    /// or `[legit legit fraud] 0->1:client 1<->2:client+merchant`.
    pub fn describe(&self, schema: &LabelSchema) -> String {
        let t = self.decode();
        let name = |vocab: &[String], l: u16| vocab.get(l as usize).cloned().unwrap_or_else(|| format!("#{l}"));
        let mut s = format!(
            "[{} {} {}]",
            name(&schema.node_labels, t.labels[0]),
            name(&schema.node_labels, t.labels[1]),
            name(&schema.node_labels, t.labels[2])
        );
        for (i, j) in PAIRS {
            let (fwd, bwd) = (t.arcs[i][j], t.arcs[j][i]);
            let part = match (fwd, bwd) {
                (None, None) => continue,
                (Some(a), Some(b)) if !schema.directed => format!("{i}-{j}:{}", name(&schema.edge_labels, a.max(b))),
                (Some(a), Some(b)) if a == b => format!("{i}<->{j}:{}", name(&schema.edge_labels, a)),
                (Some(a), Some(b)) => format!(
                    "{i}->{j}:{} {j}->{i}:{}",
                    name(&schema.edge_labels, a),
                    name(&schema.edge_labels, b)
                ),
                (Some(a), None) => format!("{i}->{j}:{}", name(&schema.edge_labels, a)),
                (None, Some(b)) => format!("{j}->{i}:{}", name(&schema.edge_labels, b)),
            };
            s.push(' ');
            s.push_str(&part);
        }
        s
    }
}

impl fmt::Display for SubgraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for SubgraphClass {
    type Err = Error;

    /// Parses a hex code and rejects anything that is not the canonical
    /// code of a connected triple.
    fn from_str(s: &str) -> Result<Self> {
        let bytes = hex::decode(s.trim()).map_err(|e| Error::Format(format!("bad class code `{s}`: {e}")))?;
        let raw: [u8; CODE_LEN] = bytes
            .try_into()
            .map_err(|_| Error::Format(format!("class code `{s}` must be {CODE_LEN} bytes")))?;
        let candidate = SubgraphClass(raw);
        let t = candidate.decode();
        if (0..3).any(|i| t.arcs[i][i].is_some()) {
            return Err(Error::Format(format!("class code `{s}` is malformed")));
        }
        match canonical_class(&t) {
            Ok(c) if c == candidate => Ok(c),
            _ => Err(Error::Format(format!("class code `{s}` is not canonical"))),
        }
    }
}

impl Serialize for SubgraphClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for SubgraphClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonical class of a weakly connected triple.
pub fn canonical_class(t: &LabeledTriple) -> Result<SubgraphClass> {
    if !t.is_connected() {
        return Err(Error::Contract("triple is not weakly connected".into()));
    }
    let best = PERMUTATIONS
        .iter()
        .map(|&p| t.permuted(p).serialize())
        .min()
        .expect("six permutations");
    Ok(SubgraphClass(best))
}

/// Label vocabularies and directedness; enough to name a class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSchema {
    pub directed: bool,
    pub node_labels: Vec<String>,
    pub edge_labels: Vec<String>,
}

impl LabelSchema {
    pub fn of(g: &HeteroGraph) -> Self {
        LabelSchema {
            directed: g.is_directed(),
            node_labels: g.node_vocab().to_vec(),
            edge_labels: g.edge_vocab().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphId {
    Original,
    Replica(usize),
}

impl fmt::Display for GraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphId::Original => f.write_str("original"),
            GraphId::Replica(i) => write!(f, "replica_{i}"),
        }
    }
}

impl FromStr for GraphId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "original" {
            return Ok(GraphId::Original);
        }
        s.strip_prefix("replica_")
            .and_then(|n| n.parse().ok())
            .map(GraphId::Replica)
            .ok_or_else(|| Error::Format(format!("bad graph id `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusResult {
    pub graph_id: GraphId,
    pub counts: BTreeMap<SubgraphClass, u64>,
}

impl CensusResult {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, class: &SubgraphClass) -> u64 {
        self.counts.get(class).copied().unwrap_or(0)
    }
}

/// Edge state of an ordered pair (x, y): label+1 of x -> y and of y -> x,
/// 0 when absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairLink {
    pub fwd: u16,
    pub bwd: u16,
}

impl PairLink {
    pub const NONE: PairLink = PairLink { fwd: 0, bwd: 0 };

    fn from_neighbor(n: &Neighbor) -> Self {
        PairLink {
            fwd: n.out.map_or(0, |l| l.0 + 1),
            bwd: n.inc.map_or(0, |l| l.0 + 1),
        }
    }
}

/// Calls `visit(v, u, w, [v-u, v-w, u-w])` once per weakly connected node
/// triple, where `v` is the smallest id.
pub fn for_each_connected_triple<F>(g: &HeteroGraph, mut visit: F)
where
    F: FnMut(NodeId, NodeId, NodeId, [PairLink; 3]),
{
    let n = g.node_count();
    // Stamp arrays avoid clearing per root: in_root marks N(v), slot caches N(u).
    let mut in_root = vec![u32::MAX; n];
    let mut slot_stamp = vec![u32::MAX; n];
    let mut slot_link = vec![PairLink::NONE; n];
    let mut stamp: u32 = 0;

    for v in 0..n as NodeId {
        let nv = g.neighbors(v);
        for nb in nv {
            in_root[nb.id as usize] = v;
        }
        let start = nv.partition_point(|nb| nb.id <= v);
        let ext = &nv[start..];
        for (i, nu) in ext.iter().enumerate() {
            let u = nu.id;
            let vu = PairLink::from_neighbor(nu);
            let nbrs_u = g.neighbors(u);
            for nb in nbrs_u {
                slot_stamp[nb.id as usize] = stamp;
                slot_link[nb.id as usize] = PairLink::from_neighbor(nb);
            }
            // Both u and w hang off the root.
            for nw in &ext[i + 1..] {
                let w = nw.id;
                let uw = if slot_stamp[w as usize] == stamp {
                    slot_link[w as usize]
                } else {
                    PairLink::NONE
                };
                visit(v, u, w, [vu, PairLink::from_neighbor(nw), uw]);
            }
            // w reachable only through u.
            for nw in nbrs_u {
                let w = nw.id;
                if w > v && in_root[w as usize] != v {
                    visit(v, u, w, [vu, PairLink::NONE, PairLink::from_neighbor(nw)]);
                }
            }
            stamp = stamp.wrapping_add(1);
            if stamp == u32::MAX {
                slot_stamp.iter_mut().for_each(|s| *s = u32::MAX);
                stamp = 0;
            }
        }
    }
}

fn raw_triple(labels: [u16; 3], links: [PairLink; 3]) -> LabeledTriple {
    let mut t = LabeledTriple {
        labels,
        arcs: [[None; 3]; 3],
    };
    for ((i, j), link) in PAIRS.into_iter().zip(links) {
        t.arcs[i][j] = link.fwd.checked_sub(1);
        t.arcs[j][i] = link.bwd.checked_sub(1);
    }
    t
}

/// Raw forms are tallied in a dense array when the state space is small.
const DENSE_LIMIT: usize = 1 << 22;

pub fn census_k3(g: &HeteroGraph) -> CensusResult {
    census_with_id(g, GraphId::Original)
}

pub fn census_with_id(g: &HeteroGraph, graph_id: GraphId) -> CensusResult {
    let nl = g.node_vocab().len().max(1);
    let es = g.edge_vocab().len() + 1;
    let space = nl
        .checked_pow(3)
        .and_then(|x| es.checked_pow(6).and_then(|y| x.checked_mul(y)));
    let mut raw: Vec<(LabeledTriple, u64)> = Vec::new();
    match space {
        Some(space) if space <= DENSE_LIMIT => {
            let mut dense = vec![0u64; space];
            for_each_connected_triple(g, |v, u, w, links| {
                let mut idx = g.node_label(v).0 as usize;
                idx = idx * nl + g.node_label(u).0 as usize;
                idx = idx * nl + g.node_label(w).0 as usize;
                for l in links {
                    idx = idx * es + l.fwd as usize;
                    idx = idx * es + l.bwd as usize;
                }
                dense[idx] += 1;
            });
            for (mut idx, &count) in dense.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let mut words = [0u16; 9];
                for k in (3..9).rev() {
                    words[k] = (idx % es) as u16;
                    idx /= es;
                }
                for k in (0..3).rev() {
                    words[k] = (idx % nl) as u16;
                    idx /= nl;
                }
                let links = [
                    PairLink {
                        fwd: words[3],
                        bwd: words[4],
                    },
                    PairLink {
                        fwd: words[5],
                        bwd: words[6],
                    },
                    PairLink {
                        fwd: words[7],
                        bwd: words[8],
                    },
                ];
                raw.push((raw_triple([words[0], words[1], words[2]], links), count));
            }
        }
        _ => {
            let mut sparse: HashMap<LabeledTriple, u64> = HashMap::new();
            for_each_connected_triple(g, |v, u, w, links| {
                let labels = [g.node_label(v).0, g.node_label(u).0, g.node_label(w).0];
                *sparse.entry(raw_triple(labels, links)).or_insert(0) += 1;
            });
            raw.extend(sparse);
        }
    }
    let mut counts = BTreeMap::new();
    for (t, c) in raw {
        let class = canonical_class(&t).expect("enumerated triples are connected");
        *counts.entry(class).or_insert(0) += c;
    }
    CensusResult { graph_id, counts }
}

/// Census of each graph, in order; graph `i` is tagged `Replica(i)`. Runs
/// on the current rayon pool.
pub fn census_ensemble(graphs: &[HeteroGraph]) -> Result<Vec<CensusResult>> {
    if let Some(first) = graphs.first() {
        if let Some(bad) = graphs.iter().position(|g| !first.same_schema(g)) {
            return Err(Error::Config(format!(
                "graph {bad} differs from graph 0 in directedness or label vocabularies"
            )));
        }
    }
    Ok(graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| census_with_id(g, GraphId::Replica(i)))
        .collect())
}

pub const CENSUS_HEADER: [&str; 4] = ["graph_id", "code", "description", "count"];

/// Delimited dump: `graph_id,code,description,count`, one row per class.
pub fn write_census_dump<W: Write>(w: W, result: &CensusResult, schema: &LabelSchema) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CENSUS_HEADER)?;
    let id = result.graph_id.to_string();
    for (class, count) in &result.counts {
        out.write_record([
            id.as_str(),
            &class.to_hex(),
            &class.describe(schema),
            &count.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads one or more censuses from a dump, grouped by graph id in order of
/// first appearance.
pub fn read_census_dump<R: Read>(r: R) -> Result<Vec<CensusResult>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CENSUS_HEADER) {
        return Err(Error::Format(
            "census dump header must be graph_id,code,description,count".into(),
        ));
    }
    let mut out: Vec<CensusResult> = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 4 {
            return Err(Error::Format(format!("line {line}: expected 4 fields")));
        }
        let id: GraphId = row[0].parse()?;
        let class: SubgraphClass = row[1].parse()?;
        let count: u64 = row[3]
            .parse()
            .map_err(|_| Error::Format(format!("line {line}: bad count `{}`", &row[3])))?;
        let idx = match out.iter().position(|c| c.graph_id == id) {
            Some(i) => i,
            None => {
                out.push(CensusResult {
                    graph_id: id,
                    counts: BTreeMap::new(),
                });
                out.len() - 1
            }
        };
        if out[idx].counts.insert(class, count).is_some() {
            return Err(Error::Format(format!("line {line}: class {class} repeated for {id}")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeLabel, NodeLabel};

    fn graph(directed: bool, labels: &[u16], edges: &[(u32, u32, u16)]) -> HeteroGraph {
        let vocab = |n: usize| (0..n).map(|i| format!("l{i}")).collect::<Vec<_>>();
        let mut g = HeteroGraph::new(directed, vocab(3), vocab(3));
        for (i, &l) in labels.iter().enumerate() {
            g.add_node(NodeLabel(l), i.to_string()).unwrap();
        }
        for &(u, v, l) in edges {
            g.add_edge(u, v, EdgeLabel(l)).unwrap();
        }
        g
    }

    fn undirected(labels: [u16; 3], edges: &[(usize, usize, u16)]) -> LabeledTriple {
        let mut t = LabeledTriple {
            labels,
            arcs: [[None; 3]; 3],
        };
        for &(i, j, l) in edges {
            t.arcs[i][j] = Some(l);
            t.arcs[j][i] = Some(l);
        }
        t
    }

    #[test]
    fn triangle_code_is_permutation_invariant() {
        let t = undirected([0, 0, 0], &[(0, 1, 0), (0, 2, 0), (1, 2, 0)]);
        let c = canonical_class(&t).unwrap();
        for p in PERMUTATIONS {
            assert_eq!(canonical_class(&t.permuted(p)).unwrap(), c);
        }
    }

    #[test]
    fn relabeled_triangle_is_equal() {
        let a = undirected([0, 0, 1], &[(0, 1, 0), (0, 2, 0), (1, 2, 0)]);
        let b = undirected([0, 1, 0], &[(0, 1, 0), (0, 2, 0), (1, 2, 0)]);
        assert_eq!(canonical_class(&a).unwrap(), canonical_class(&b).unwrap());
    }

    #[test]
    fn two_node_types_give_four_triangles() {
        let full = [(0, 1, 0), (0, 2, 0), (1, 2, 0)];
        let mut codes = std::collections::HashSet::new();
        for labels in [
            [0, 0, 0],
            [0, 0, 1],
            [0, 1, 0],
            [1, 0, 0],
            [0, 1, 1],
            [1, 0, 1],
            [1, 1, 0],
            [1, 1, 1],
        ] {
            codes.insert(canonical_class(&undirected(labels, &full)).unwrap());
        }
        assert_eq!(codes.len(), 4);
    }

    #[test]
    fn two_edge_types_give_four_triangles() {
        let mut codes = std::collections::HashSet::new();
        for bits in 0..8u16 {
            let t = undirected(
                [0; 3],
                &[(0, 1, bits & 1), (0, 2, (bits >> 1) & 1), (1, 2, (bits >> 2) & 1)],
            );
            codes.insert(canonical_class(&t).unwrap());
        }
        assert_eq!(codes.len(), 4);
    }

    #[test]
    fn disconnected_triple_is_rejected() {
        let t = undirected([0; 3], &[(0, 1, 0)]);
        assert!(matches!(canonical_class(&t), Err(Error::Contract(_))));
    }

    #[test]
    fn bidirectional_differs_from_single_arc() {
        let mut one = LabeledTriple {
            labels: [0; 3],
            arcs: [[None; 3]; 3],
        };
        one.arcs[0][1] = Some(0);
        one.arcs[1][2] = Some(0);
        let mut both = one;
        both.arcs[1][0] = Some(0);
        assert_ne!(canonical_class(&one).unwrap(), canonical_class(&both).unwrap());
    }

    #[test]
    fn path_is_not_a_triangle() {
        let g = graph(false, &[0, 0, 0], &[(0, 1, 0), (1, 2, 0)]);
        let r = census_k3(&g);
        assert_eq!(r.counts.len(), 1);
        assert_eq!(r.total(), 1);
        let tri = canonical_class(&undirected([0; 3], &[(0, 1, 0), (0, 2, 0), (1, 2, 0)])).unwrap();
        assert_eq!(r.get(&tri), 0);
    }

    #[test]
    fn triangle_counts_once() {
        let g = graph(false, &[0, 0, 0], &[(0, 1, 0), (1, 2, 0), (0, 2, 0)]);
        let r = census_k3(&g);
        let tri = canonical_class(&undirected([0; 3], &[(0, 1, 0), (0, 2, 0), (1, 2, 0)])).unwrap();
        assert_eq!(r.get(&tri), 1);
        assert_eq!(r.total(), 1);
    }

    #[test]
    fn star_triples() {
        // Star with 4 leaves: C(4,2) = 6 paths centered at the hub.
        let g = graph(false, &[0, 1, 1, 1, 1], &[(0, 1, 0), (0, 2, 0), (0, 3, 0), (0, 4, 0)]);
        assert_eq!(census_k3(&g).total(), 6);
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let edges = [(0, 1, 0), (1, 2, 1), (2, 0, 2), (2, 3, 0), (3, 1, 1), (4, 3, 2)];
        let g = graph(true, &[0, 1, 2, 0, 1], &edges);
        let dense = census_k3(&g);
        // Same graph with oversized vocabularies forces the hash map path.
        let vocab = |n: usize| (0..n).map(|i| format!("l{i}")).collect::<Vec<_>>();
        let mut big = HeteroGraph::new(true, vocab(200), vocab(200));
        for l in [0, 1, 2, 0, 1] {
            big.add_node(NodeLabel(l), "").unwrap();
        }
        for &(u, v, l) in &edges {
            big.add_edge(u, v, EdgeLabel(l)).unwrap();
        }
        assert_eq!(census_k3(&big).counts, dense.counts);
    }

    #[test]
    fn code_hex_round_trip_and_rejects() {
        let t = undirected([2, 0, 1], &[(0, 1, 1), (1, 2, 0)]);
        let c = canonical_class(&t).unwrap();
        assert_eq!(c.to_hex().parse::<SubgraphClass>().unwrap(), c);
        assert!("zz".parse::<SubgraphClass>().is_err());
        assert!("00".parse::<SubgraphClass>().is_err());
        // Valid length, but a non-minimal ordering of the same class.
        let other = LabeledTriple::permuted(&t, [2, 1, 0]).serialize();
        if other != *c.as_bytes() {
            assert!(hex::encode(other).parse::<SubgraphClass>().is_err());
        }
    }

    #[test]
    fn description_forms() {
        let schema = LabelSchema {
            directed: true,
            node_labels: vec!["legit".into(), "fraud".into()],
            edge_labels: vec!["client".into(), "merchant".into(), "client+merchant".into()],
        };
        let mut t = LabeledTriple {
            labels: [1, 1, 1],
            arcs: [[None; 3]; 3],
        };
        t.arcs[0][1] = Some(2);
        t.arcs[1][0] = Some(2);
        t.arcs[1][2] = Some(0);
        let d = canonical_class(&t).unwrap().describe(&schema);
        assert!(d.starts_with("[fraud fraud fraud]"), "{d}");
        assert!(d.contains("<->") && d.contains(":client+merchant"), "{d}");
    }

    #[test]
    fn dump_round_trip() {
        let g = graph(
            true,
            &[0, 1, 2, 1],
            &[(0, 1, 0), (1, 2, 1), (2, 0, 2), (3, 2, 0), (2, 3, 1)],
        );
        let mut r = census_k3(&g);
        r.graph_id = GraphId::Replica(7);
        let mut buf = Vec::new();
        write_census_dump(&mut buf, &r, &LabelSchema::of(&g)).unwrap();
        let back = read_census_dump(buf.as_slice()).unwrap();
        assert_eq!(back, vec![r]);
    }

    #[test]
    fn dump_rejects_garbage() {
        assert!(read_census_dump("a,b,c,d\n".as_bytes()).is_err());
        assert!(read_census_dump("graph_id,code,description,count\noriginal,xyz,,1\n".as_bytes()).is_err());
        assert!(read_census_dump("graph_id,code,description,count\nreplica_x,00,,1\n".as_bytes()).is_err());
    }

    #[test]
    fn ensemble_rejects_mixed_schemas() {
        let a = graph(true, &[0], &[]);
        let b = graph(false, &[0], &[]);
        assert!(census_ensemble(&[a, b]).is_err());
    }
}
