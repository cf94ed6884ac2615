//! Independent oracles shared by the integration tests. Nothing here calls
//! the enumeration or canonicalization code it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use hetmotif::census::LabeledTriple;
use hetmotif::graph::{EdgeLabel, HeteroGraph, NodeLabel};
use hetmotif::tabular::TabularDataset;
use rand::Rng;

pub fn vocab(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// G(n, p) with random node labels and random edge labels. Directed graphs
/// draw each ordered pair independently, so bidirectional pairs with two
/// different labels occur.
pub fn random_graph<R: Rng>(
    rng: &mut R,
    directed: bool,
    n: usize,
    p: f64,
    node_labels: usize,
    edge_labels: usize,
) -> HeteroGraph {
    let mut g = HeteroGraph::new(directed, vocab("n", node_labels), vocab("e", edge_labels));
    for i in 0..n {
        g.add_node(NodeLabel(rng.gen_range(0..node_labels as u16)), i.to_string())
            .unwrap();
    }
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u == v || (!directed && v < u) {
                continue;
            }
            if rng.gen_bool(p) {
                g.add_edge(u, v, EdgeLabel(rng.gen_range(0..edge_labels as u16)))
                    .unwrap();
            }
        }
    }
    g
}

pub fn triple_of(g: &HeteroGraph, nodes: [u32; 3]) -> LabeledTriple {
    let mut t = LabeledTriple {
        labels: [0; 3],
        arcs: [[None; 3]; 3],
    };
    for i in 0..3 {
        t.labels[i] = g.node_label(nodes[i]).0;
        for j in 0..3 {
            if i != j {
                t.arcs[i][j] = g.edge(nodes[i], nodes[j]).map(|l| l.0);
            }
        }
    }
    t
}

pub fn weakly_connected(t: &LabeledTriple) -> bool {
    let adj = |i: usize, j: usize| t.arcs[i][j].is_some() || t.arcs[j][i].is_some();
    let links = [adj(0, 1), adj(0, 2), adj(1, 2)];
    links.iter().filter(|&&x| x).count() >= 2
}

fn all_permutations() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if a != b && b != c && a != c {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Exhaustive search for a label- and direction-preserving bijection.
pub fn isomorphic(a: &LabeledTriple, b: &LabeledTriple) -> bool {
    all_permutations().into_iter().any(|p| {
        (0..3).all(|i| a.labels[i] == b.labels[p[i]])
            && (0..3).all(|i| (0..3).all(|j| a.arcs[i][j] == b.arcs[p[i]][p[j]]))
    })
}

/// Scans all C(n,3) triples and groups the connected ones by exhaustive
/// isomorphism. Returns one representative and its count per class.
pub fn brute_force_census(g: &HeteroGraph) -> Vec<(LabeledTriple, u64)> {
    let n = g.node_count() as u32;
    let mut classes: Vec<(LabeledTriple, u64)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let t = triple_of(g, [a, b, c]);
                if !weakly_connected(&t) {
                    continue;
                }
                match classes.iter_mut().find(|(rep, _)| isomorphic(rep, &t)) {
                    Some((_, count)) => *count += 1,
                    None => classes.push((t, 1)),
                }
            }
        }
    }
    classes
}

pub fn connected_triples(g: &HeteroGraph) -> BTreeSet<[u32; 3]> {
    let n = g.node_count() as u32;
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if weakly_connected(&triple_of(g, [a, b, c])) {
                    out.insert([a, b, c]);
                }
            }
        }
    }
    out
}

pub fn random_triple<R: Rng>(rng: &mut R, directed: bool, node_labels: u16, edge_labels: u16) -> LabeledTriple {
    loop {
        let mut t = LabeledTriple {
            labels: [0; 3],
            arcs: [[None; 3]; 3],
        };
        for i in 0..3 {
            t.labels[i] = rng.gen_range(0..node_labels);
        }
        for i in 0..3 {
            for j in 0..3 {
                if i == j || (!directed && j < i) {
                    continue;
                }
                if rng.gen_bool(0.6) {
                    let l = rng.gen_range(0..edge_labels);
                    t.arcs[i][j] = Some(l);
                    if !directed {
                        t.arcs[j][i] = Some(l);
                    }
                }
            }
        }
        if weakly_connected(&t) {
            return t;
        }
    }
}

/// Arbitrary node reordering, written without the library's helper.
pub fn reorder(t: &LabeledTriple, p: [usize; 3]) -> LabeledTriple {
    let mut out = LabeledTriple {
        labels: [0; 3],
        arcs: [[None; 3]; 3],
    };
    for i in 0..3 {
        out.labels[p[i]] = t.labels[i];
        for j in 0..3 {
            out.arcs[p[i]][p[j]] = t.arcs[i][j];
        }
    }
    out
}

/// Expected transaction-graph arcs by direct pairwise comparison:
/// (from txn, to txn) -> shared-type bitmask.
pub fn transaction_arcs_oracle(
    data: &TabularDataset,
    shared: &[&str],
    lookback_millis: i64,
) -> BTreeMap<(String, String), u32> {
    let cols: Vec<usize> = shared.iter().map(|s| data.entity_index(s).unwrap()).collect();
    let rows = data.records();
    let mut out = BTreeMap::new();
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            if i == j {
                continue;
            }
            let (a, b) = (&rows[i], &rows[j]);
            let mut mask = 0u32;
            for (bit, &c) in cols.iter().enumerate() {
                if a.entities[c] == b.entities[c] {
                    mask |= 1 << bit;
                }
            }
            let dt = b.timestamp.0 - a.timestamp.0;
            if mask != 0 && dt >= 0 && dt <= lookback_millis {
                out.insert((a.txn_id.clone(), b.txn_id.clone()), mask);
            }
        }
    }
    out
}

/// Arcs actually present in a transaction graph, keyed like the oracle.
pub fn transaction_arcs(g: &HeteroGraph) -> BTreeMap<(String, String), u32> {
    g.edges()
        .map(|(u, v, l)| ((g.node_name(u).to_string(), g.node_name(v).to_string()), l.0 as u32 + 1))
        .collect()
}

/// Entity-graph edge labels recomputed from rows: OR of fraud flags per pair.
pub fn entity_edges_oracle(data: &TabularDataset) -> HashMap<(String, String), bool> {
    let types = data.entity_types();
    let mut out = HashMap::new();
    for r in data.records() {
        for a in 0..types.len() {
            for b in 0..types.len() {
                if a == b {
                    continue;
                }
                let ka = format!("{}:{}", types[a], r.entities[a]);
                let kb = format!("{}:{}", types[b], r.entities[b]);
                *out.entry((ka, kb)).or_insert(false) |= r.is_fraud;
            }
        }
    }
    out
}

/// Union-find component count over an edge list.
pub fn component_count(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = n;
    for (u, v) in edges {
        let (a, b) = (root(&mut parent, u as usize), root(&mut parent, v as usize));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

/// Small dataset over the four default entity types with few distinct
/// values per column and coarse timestamps, so sharing and ties are common.
pub fn random_dataset<R: Rng>(rng: &mut R, m: usize, values: usize, fraud_p: f64) -> TabularDataset {
    use hetmotif::tabular::{Timestamp, TransactionRecord, DEFAULT_ENTITY_TYPES};
    let types: Vec<String> = DEFAULT_ENTITY_TYPES.iter().map(|s| s.to_string()).collect();
    let prefixes = ["C", "K", "M", "P"];
    let records = (0..m)
        .map(|i| TransactionRecord {
            txn_id: format!("t{i}"),
            timestamp: Timestamp::from_secs(rng.gen_range(0..24) * 900),
            entities: prefixes
                .iter()
                .map(|p| format!("{p}{}", rng.gen_range(0..values)))
                .collect(),
            is_fraud: rng.gen_bool(fraud_p),
        })
        .collect();
    TabularDataset::new(types, records).unwrap()
}
