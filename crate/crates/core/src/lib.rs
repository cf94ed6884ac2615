//! Heterogeneous network motif mining for banking transaction data.
//!
//! The pipeline builds an entity graph (undirected; entities joined by
//! shared transactions) or a transaction graph (directed; transactions
//! joined by shared entities inside a lookback window), randomizes the
//! underlying table to get a null-model ensemble, counts every connected
//! 3-node labeled subgraph class in each graph, and ranks classes by ratio
//! and z-score against the ensemble.

pub mod builders;
pub mod catalog;
pub mod census;
pub mod error;
pub mod graph;
pub mod pipeline;
pub mod significance;
pub mod synth;
pub mod tabular;

pub use builders::{
    build_entity_graph, build_graph, build_transaction_graph, EntityGraphSpec, GraphKind, GraphSpec,
    TransactionGraphSpec,
};
pub use census::{
    canonical_class, census_ensemble, census_k3, CensusResult, GraphId, LabelSchema, LabeledTriple, SubgraphClass,
};
pub use error::{Error, Result};
pub use graph::{connected_components, graph_stats, EdgeLabel, GraphStats, HeteroGraph, NodeId, NodeLabel};
pub use pipeline::{run_on_dataset, run_pipeline, PipelineConfig, PipelineOutcome};
pub use significance::{
    build_report, class_stats, ratio_evolution, select_motifs, ClassStats, MotifThresholds, Ratio, SignificanceReport,
    Smoothing, ZScore,
};
pub use synth::{generate, PlantedPattern, SynthConfig};
pub use tabular::{
    load_transactions, randomize_dataset, RandomizationConfig, Schema, TabularDataset, Timestamp, TransactionRecord,
};
