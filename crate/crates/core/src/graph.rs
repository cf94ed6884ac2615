//! Heterogeneous graph shared by the entity and transaction representations.
//!
//! Each node keeps one sorted neighbor list. An entry records both the
//! outgoing and the incoming edge label toward that neighbor, so the list is
//! the weak (direction-free) neighborhood that enumeration walks, while arc
//! direction stays available for classification. Undirected edges set both
//! labels to the same value.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the label that marks fraud in either vocabulary.
pub const FRAUD_LABEL: &str = "fraud";
pub const LEGIT_LABEL: &str = "legit";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeLabel(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeLabel(pub u16);

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub id: NodeId,
    /// Label of the edge owner -> `id`.
    pub out: Option<EdgeLabel>,
    /// Label of the edge `id` -> owner.
    pub inc: Option<EdgeLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeteroGraph {
    directed: bool,
    node_vocab: Vec<String>,
    edge_vocab: Vec<String>,
    labels: Vec<NodeLabel>,
    names: Vec<String>,
    adjacency: Vec<Vec<Neighbor>>,
    edge_count: usize,
}

impl HeteroGraph {
    pub fn new(directed: bool, node_vocab: Vec<String>, edge_vocab: Vec<String>) -> Self {
        HeteroGraph {
            directed,
            node_vocab,
            edge_vocab,
            labels: Vec::new(),
            names: Vec::new(),
            adjacency: Vec::new(),
            edge_count: 0,
        }
    }

    /// Bulk construction. `edges` are arcs for directed graphs and unordered
    /// pairs for undirected ones; duplicates and self-loops are rejected.
    pub fn from_parts(
        directed: bool,
        node_vocab: Vec<String>,
        edge_vocab: Vec<String>,
        nodes: Vec<(NodeLabel, String)>,
        edges: Vec<(NodeId, NodeId, EdgeLabel)>,
    ) -> Result<Self> {
        let mut g = HeteroGraph::new(directed, node_vocab, edge_vocab);
        for (label, name) in nodes {
            g.add_node(label, name)?;
        }
        for &(u, v, label) in &edges {
            g.check_edge(u, v, label)?;
            g.adjacency[u as usize].push(Neighbor {
                id: v,
                out: Some(label),
                inc: if directed { None } else { Some(label) },
            });
            g.adjacency[v as usize].push(Neighbor {
                id: u,
                out: if directed { None } else { Some(label) },
                inc: Some(label),
            });
        }
        for (u, list) in g.adjacency.iter_mut().enumerate() {
            list.sort_unstable_by_key(|n| n.id);
            let mut merged: Vec<Neighbor> = Vec::with_capacity(list.len());
            for n in list.drain(..) {
                match merged.last_mut() {
                    Some(last) if last.id == n.id => {
                        if !directed
                            || (last.out.is_some() && n.out.is_some())
                            || (last.inc.is_some() && n.inc.is_some())
                        {
                            return Err(Error::Structural(format!("duplicate edge between {u} and {}", n.id)));
                        }
                        last.out = last.out.or(n.out);
                        last.inc = last.inc.or(n.inc);
                    }
                    _ => merged.push(n),
                }
            }
            *list = merged;
        }
        g.edge_count = edges.len();
        Ok(g)
    }

    pub fn add_node(&mut self, label: NodeLabel, name: impl Into<String>) -> Result<NodeId> {
        if label.0 as usize >= self.node_vocab.len() {
            return Err(Error::Structural(format!(
                "node label {} outside vocabulary of {}",
                label.0,
                self.node_vocab.len()
            )));
        }
        let id = NodeId::try_from(self.labels.len()).map_err(|_| Error::Structural("too many nodes".into()))?;
        self.labels.push(label);
        self.names.push(name.into());
        self.adjacency.push(Vec::new());
        Ok(id)
    }

    fn check_edge(&self, u: NodeId, v: NodeId, label: EdgeLabel) -> Result<()> {
        if u == v {
            return Err(Error::Structural(format!("self-loop on node {u}")));
        }
        let n = self.labels.len();
        if u as usize >= n || v as usize >= n {
            return Err(Error::Structural(format!("edge ({u}, {v}) references a missing node")));
        }
        if label.0 as usize >= self.edge_vocab.len() || label.0 == u16::MAX {
            return Err(Error::Structural(format!(
                "edge label {} outside vocabulary of {}",
                label.0,
                self.edge_vocab.len()
            )));
        }
        Ok(())
    }

    /// Inserts one edge (an arc when directed). Adding the reverse of an
    /// existing arc is allowed and makes the pair bidirectional.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, label: EdgeLabel) -> Result<()> {
        self.check_edge(u, v, label)?;
        if let Some(existing) = self.link(u, v) {
            if !self.directed || existing.out.is_some() {
                return Err(Error::Structural(format!("duplicate edge ({u}, {v})")));
            }
        }
        let directed = self.directed;
        upsert(&mut self.adjacency[u as usize], v, |n| {
            n.out = Some(label);
            if !directed {
                n.inc = Some(label);
            }
        });
        upsert(&mut self.adjacency[v as usize], u, |n| {
            n.inc = Some(label);
            if !directed {
                n.out = Some(label);
            }
        });
        self.edge_count += 1;
        Ok(())
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Undirected edges, or arcs when directed (a bidirectional pair counts twice).
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_vocab(&self) -> &[String] {
        &self.node_vocab
    }

    pub fn edge_vocab(&self) -> &[String] {
        &self.edge_vocab
    }

    pub fn node_label(&self, u: NodeId) -> NodeLabel {
        self.labels[u as usize]
    }

    pub fn node_name(&self, u: NodeId) -> &str {
        &self.names[u as usize]
    }

    /// Weak neighborhood of `u`, sorted by id.
    pub fn neighbors(&self, u: NodeId) -> &[Neighbor] {
        &self.adjacency[u as usize]
    }

    pub fn link(&self, u: NodeId, v: NodeId) -> Option<&Neighbor> {
        let list = self.adjacency.get(u as usize)?;
        list.binary_search_by_key(&v, |n| n.id).ok().map(|i| &list[i])
    }

    /// Label of the edge u -> v (or u -- v when undirected).
    pub fn edge(&self, u: NodeId, v: NodeId) -> Option<EdgeLabel> {
        self.link(u, v).and_then(|n| n.out)
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u as usize].len()
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.adjacency[u as usize].iter().filter(|n| n.out.is_some()).count()
    }

    pub fn in_degree(&self, u: NodeId) -> usize {
        self.adjacency[u as usize].iter().filter(|n| n.inc.is_some()).count()
    }

    /// Every edge once: arcs for directed graphs, `u < v` pairs otherwise.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, EdgeLabel)> + '_ {
        let directed = self.directed;
        self.adjacency.iter().enumerate().flat_map(move |(u, list)| {
            let u = u as NodeId;
            list.iter().filter_map(move |n| match n.out {
                Some(l) if directed || u < n.id => Some((u, n.id, l)),
                _ => None,
            })
        })
    }

    /// True when both graphs can be compared class-by-class.
    pub fn same_schema(&self, other: &HeteroGraph) -> bool {
        self.directed == other.directed && self.node_vocab == other.node_vocab && self.edge_vocab == other.edge_vocab
    }
}

fn upsert(list: &mut Vec<Neighbor>, id: NodeId, f: impl FnOnce(&mut Neighbor)) {
    match list.binary_search_by_key(&id, |n| n.id) {
        Ok(i) => f(&mut list[i]),
        Err(i) => {
            let mut n = Neighbor {
                id,
                out: None,
                inc: None,
            };
            f(&mut n);
            list.insert(i, n);
        }
    }
}

/// Weakly connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &HeteroGraph) -> Vec<Vec<NodeId>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start as NodeId);
        let mut comp = Vec::new();
        while let Some(u) = stack.pop() {
            comp.push(u);
            for nb in g.neighbors(u) {
                if !seen[nb.id as usize] {
                    seen[nb.id as usize] = true;
                    stack.push(nb.id);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub node_types: usize,
    pub edge_types: usize,
    pub components: usize,
    /// Fraudulent-edge share (undirected) or fraudulent-node share
    /// (directed); absent when there is nothing to divide by or no
    /// `fraud` label exists.
    pub fraud_rate: Option<f64>,
}

pub fn graph_stats(g: &HeteroGraph) -> GraphStats {
    let fraud_rate = if g.is_directed() {
        let fraud = g.node_vocab().iter().position(|l| l == FRAUD_LABEL);
        match fraud {
            Some(f) if g.node_count() > 0 => {
                let hits = (0..g.node_count() as NodeId)
                    .filter(|&u| g.node_label(u).0 as usize == f)
                    .count();
                Some(hits as f64 / g.node_count() as f64)
            }
            _ => None,
        }
    } else {
        let fraud = g.edge_vocab().iter().position(|l| l == FRAUD_LABEL);
        match fraud {
            Some(f) if g.edge_count() > 0 => {
                let hits = g.edges().filter(|e| e.2 .0 as usize == f).count();
                Some(hits as f64 / g.edge_count() as f64)
            }
            _ => None,
        }
    };
    GraphStats {
        nodes: g.node_count(),
        edges: g.edge_count(),
        node_types: g.node_vocab().len(),
        edge_types: g.edge_vocab().len(),
        components: connected_components(g).len(),
        fraud_rate,
    }
}

/// Tab-separated edge list: `node_id node_label neighbor_id edge_label direction`.
/// Direction is `out` for arcs and `none` for undirected edges.
pub fn write_edge_list<W: Write>(g: &HeteroGraph, mut w: W) -> Result<()> {
    writeln!(w, "node_id\tnode_label\tneighbor_id\tedge_label\tdirection")?;
    let dir = if g.is_directed() { "out" } else { "none" };
    for (u, v, l) in g.edges() {
        writeln!(
            w,
            "{u}\t{}\t{v}\t{}\t{dir}",
            g.node_vocab()[g.node_label(u).0 as usize],
            g.edge_vocab()[l.0 as usize]
        )?;
    }
    Ok(())
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// GraphML export for Gephi, Cytoscape and friends.
pub fn write_graphml<W: Write>(g: &HeteroGraph, mut w: W) -> Result<()> {
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(w, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(
        w,
        r#"  <key id="label" for="node" attr.name="label" attr.type="string"/>"#
    )?;
    writeln!(
        w,
        r#"  <key id="name" for="node" attr.name="name" attr.type="string"/>"#
    )?;
    writeln!(
        w,
        r#"  <key id="elabel" for="edge" attr.name="label" attr.type="string"/>"#
    )?;
    let kind = if g.is_directed() { "directed" } else { "undirected" };
    writeln!(w, r#"  <graph id="G" edgedefault="{kind}">"#)?;
    for u in 0..g.node_count() as NodeId {
        writeln!(
            w,
            r#"    <node id="n{u}"><data key="label">{}</data><data key="name">{}</data></node>"#,
            xml_escape(&g.node_vocab()[g.node_label(u).0 as usize]),
            xml_escape(g.node_name(u))
        )?;
    }
    for (u, v, l) in g.edges() {
        writeln!(
            w,
            r#"    <edge source="n{u}" target="n{v}"><data key="elabel">{}</data></edge>"#,
            xml_escape(&g.edge_vocab()[l.0 as usize])
        )?;
    }
    writeln!(w, "  </graph>\n</graphml>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vocab(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn blank(directed: bool, n: usize) -> HeteroGraph {
        let mut g = HeteroGraph::new(directed, vocab(&["a", "b"]), vocab(&[LEGIT_LABEL, FRAUD_LABEL]));
        for i in 0..n {
            g.add_node(NodeLabel(0), format!("n{i}")).unwrap();
        }
        g
    }

    #[test]
    fn undirected_edge_is_symmetric() {
        let mut g = blank(false, 2);
        g.add_edge(0, 1, EdgeLabel(1)).unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.degree(1), 1);
        assert_eq!(g.edge(1, 0), Some(EdgeLabel(1)));
        assert_eq!(g.edge_count(), 1);
        assert!(g.add_edge(1, 0, EdgeLabel(0)).is_err());
    }

    #[test]
    fn directed_degrees() {
        let mut g = blank(true, 2);
        g.add_edge(0, 1, EdgeLabel(0)).unwrap();
        assert_eq!(g.out_degree(0), 1);
        assert_eq!(g.in_degree(1), 1);
        assert_eq!(g.in_degree(0), 0);
        assert_eq!(g.edge(1, 0), None);
        g.add_edge(1, 0, EdgeLabel(0)).unwrap();
        assert_eq!(g.in_degree(0), 1);
        assert_eq!(g.edge_count(), 2);
        assert!(g.add_edge(0, 1, EdgeLabel(0)).is_err());
    }

    #[test]
    fn self_loop_and_bad_refs_rejected() {
        let mut g = blank(false, 2);
        assert!(matches!(g.add_edge(0, 0, EdgeLabel(0)), Err(Error::Structural(_))));
        assert!(g.add_edge(0, 5, EdgeLabel(0)).is_err());
        assert!(g.add_edge(0, 1, EdgeLabel(9)).is_err());
        assert!(g.add_node(NodeLabel(7), "x").is_err());
    }

    #[test]
    fn from_parts_matches_incremental() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for directed in [false, true] {
            let mut inc = blank(directed, 12);
            let mut edges = Vec::new();
            for u in 0..12u32 {
                for v in 0..12u32 {
                    if u != v && (directed || u < v) && rng.gen_bool(0.3) {
                        let l = EdgeLabel(rng.gen_range(0..2));
                        inc.add_edge(u, v, l).unwrap();
                        edges.push((u, v, l));
                    }
                }
            }
            let nodes = (0..12).map(|i| (NodeLabel(0), format!("n{i}"))).collect();
            let bulk = HeteroGraph::from_parts(
                directed,
                vocab(&["a", "b"]),
                vocab(&[LEGIT_LABEL, FRAUD_LABEL]),
                nodes,
                edges,
            )
            .unwrap();
            assert_eq!(bulk, inc);
        }
    }

    #[test]
    fn from_parts_rejects_duplicates() {
        let nodes = || vec![(NodeLabel(0), "a".to_string()), (NodeLabel(0), "b".to_string())];
        let v = || vocab(&["x"]);
        assert!(HeteroGraph::from_parts(
            false,
            v(),
            v(),
            nodes(),
            vec![(0, 1, EdgeLabel(0)), (1, 0, EdgeLabel(0))]
        )
        .is_err());
        assert!(HeteroGraph::from_parts(
            true,
            v(),
            v(),
            nodes(),
            vec![(0, 1, EdgeLabel(0)), (0, 1, EdgeLabel(0))]
        )
        .is_err());
        assert!(HeteroGraph::from_parts(
            true,
            v(),
            v(),
            nodes(),
            vec![(0, 1, EdgeLabel(0)), (1, 0, EdgeLabel(0))]
        )
        .is_ok());
    }

    #[test]
    fn neighbor_lists_sorted_and_counts_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut g = blank(false, 20);
        for _ in 0..60 {
            let (u, v) = (rng.gen_range(0..20), rng.gen_range(0..20));
            let _ = g.add_edge(u, v, EdgeLabel(0));
        }
        let total: usize = (0..20).map(|u| g.degree(u)).sum();
        assert_eq!(total, 2 * g.edge_count());
        for u in 0..20 {
            assert!(g.neighbors(u).windows(2).all(|w| w[0].id < w[1].id));
            for n in g.neighbors(u) {
                assert_eq!(g.edge(n.id, u), n.out);
            }
        }
    }

    #[test]
    fn components_basic() {
        let g = blank(false, 0);
        assert!(connected_components(&g).is_empty());
        let mut g = blank(false, 3);
        g.add_edge(0, 2, EdgeLabel(0)).unwrap();
        assert_eq!(connected_components(&g), vec![vec![0, 2], vec![1]]);
    }

    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let next = parent[x];
            parent[x] = r;
            x = next;
        }
        r
    }

    #[test]
    fn components_match_union_find() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for trial in 0..20 {
            let directed = trial % 2 == 0;
            let mut g = blank(directed, 30);
            let mut edges = Vec::new();
            for _ in 0..25 {
                let (u, v) = (rng.gen_range(0..30u32), rng.gen_range(0..30u32));
                if g.add_edge(u, v, EdgeLabel(0)).is_ok() {
                    edges.push((u as usize, v as usize));
                }
            }
            let mut parent: Vec<usize> = (0..30).collect();
            for (u, v) in edges {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
            }
            let mut groups: std::collections::BTreeMap<usize, Vec<u32>> = Default::default();
            for x in 0..30 {
                let r = find(&mut parent, x);
                groups.entry(r).or_default().push(x as u32);
            }
            let mut expected: Vec<Vec<u32>> = groups.into_values().collect();
            expected.sort();
            assert_eq!(connected_components(&g), expected);
        }
    }

    #[test]
    fn empty_stats() {
        let s = graph_stats(&blank(false, 0));
        assert_eq!((s.nodes, s.edges, s.components), (0, 0, 0));
        assert_eq!(s.fraud_rate, None);
    }

    #[test]
    fn exports() {
        let mut g = blank(true, 3);
        g.add_edge(0, 1, EdgeLabel(1)).unwrap();
        g.add_edge(2, 1, EdgeLabel(0)).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("0\ta\t1\tfraud\tout"));
        let mut buf = Vec::new();
        write_graphml(&g, &mut buf).unwrap();
        let xml = String::from_utf8(buf).unwrap();
        assert!(xml.contains(r#"edgedefault="directed""#));
        assert_eq!(xml.matches("<edge ").count(), 2);
    }
}
