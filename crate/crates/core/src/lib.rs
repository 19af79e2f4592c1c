//! k-truss decomposition, truss-based graph sparsification and
//! oversmoothing diagnostics for undirected graphs.
//!
//! ```
//! use trusskit::{fixtures, tgs_sparsify, truss_decompose, SparsifyConfig};
//!
//! let g = fixtures::complete(6);
//! let t = truss_decompose(&g);
//! assert_eq!(t.max_k(), 6);
//!
//! let (sparse, report) = tgs_sparsify(&g, &SparsifyConfig::new(3, 3.0)).unwrap();
//! assert_eq!(sparse.node_count(), 6);
//! assert!(report.pruned_count > 0);
//! ```
//!
//! Data-parallel loops run on rayon when the `parallel` feature (on by
//! default) is enabled; see [`par`].

pub mod diagnostics;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod par;
pub mod random;
pub mod sparsify;
pub mod truss;

pub use diagnostics::{
    anrd, esm, propagate, steady_state, truss_region_anrd_profile, AnrdProfile, AnrdRow,
    FeatureMatrix, FeatureSource, PropagationConfig,
};
pub use error::{Error, Result};
pub use graph::{
    build_graph, build_graph_with_nodes, support, EdgeKey, EdgeMap, Graph, LoadReport, NodeIdx,
};
pub use io::{
    batch_sparsify, read_edge_list, read_tu_dataset, read_weighted_edge_list, write_edge_list,
    write_tu_dataset, write_weighted_edge_list, BatchReport, DatasetBundle,
};
pub use par::Exec;
pub use sparsify::{
    edge_strength, high_truss_edges, node_strength, sweep, tgs_sparsify, Aggregator, Combiner,
    Decision, SparsifyConfig, SparsifyReport, SweepRow,
};
pub use truss::{k_truss_subgraph, truss_decompose, update_trussness, TrussMap};
