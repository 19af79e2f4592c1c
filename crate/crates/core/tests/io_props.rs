mod common;

use std::fs;

use proptest::prelude::*;

use common::edge_set;
use trusskit::io::parse_edge_list;
use trusskit::{
    batch_sparsify, fixtures, random, read_tu_dataset, tgs_sparsify, write_tu_dataset,
    DatasetBundle, SparsifyConfig,
};

fn bundle(seed: u64, count: usize) -> DatasetBundle {
    // Ids are what a TU read would assign: consecutive across graphs.
    let mut b = DatasetBundle::new("SYN");
    let mut offset = 1i64;
    let mut node_labels = Vec::new();
    for i in 0..count {
        let g = random::gnp(5 + i % 7, 0.5, seed + i as u64);
        let n = g.node_count() as i64;
        let shifted = trusskit::build_graph_with_nodes(
            offset..offset + n,
            g.external_edges()
                .into_iter()
                .map(|(a, c)| (a + offset, c + offset)),
        )
        .0;
        node_labels.push((0..n).map(|j| (j + i as i64) % 3).collect());
        b.graphs.push(shifted);
        b.labels.push(i as i64 % 2);
        offset += n;
    }
    b.node_labels = Some(node_labels);
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tu_round_trip(seed in any::<u64>(), count in 0usize..12) {
        let b = bundle(seed, count);
        let dir = tempfile::tempdir().unwrap();
        write_tu_dataset(dir.path(), &b).unwrap();
        let back = read_tu_dataset(dir.path(), "SYN").unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn edge_list_parse_ignores_order_and_orientation(seed in any::<u64>()) {
        let g = random::gnp(15, 0.3, seed);
        let forward: String = g.external_edges().iter().map(|(a, b)| format!("{a} {b}\n")).collect();
        let backward: String = g.external_edges().iter().rev().map(|(a, b)| format!("{b} {a}\n")).collect();
        let p = std::path::Path::new("mem");
        prop_assert_eq!(parse_edge_list(&forward, p).unwrap().0, parse_edge_list(&backward, p).unwrap().0);
    }
}

#[test]
fn batch_matches_standalone_runs() {
    let b = bundle(3, 20);
    let cfg = SparsifyConfig::new(3, 3.0);
    let (out, report) = batch_sparsify(&b, &cfg).unwrap();
    assert_eq!(out.labels, b.labels);
    assert_eq!(out.node_labels, b.node_labels);
    for (i, g) in b.graphs.iter().enumerate() {
        let (alone, r) = tgs_sparsify(g, &cfg).unwrap();
        assert_eq!(out.graphs[i], alone);
        assert_eq!(report.pruned_per_graph[i], r.pruned_count);
    }
}

#[test]
fn batch_of_k5_and_tree() {
    let mut b = DatasetBundle::new("MIX");
    b.graphs = vec![fixtures::complete(5), fixtures::path(6)];
    b.labels = vec![0, 1];
    let cfg = SparsifyConfig::new(3, 3.0);
    let (out, report) = batch_sparsify(&b, &cfg).unwrap();
    assert_eq!(out.graphs[1], b.graphs[1]);
    let (k5, _) = tgs_sparsify(&b.graphs[0], &cfg).unwrap();
    assert_eq!(edge_set(&out.graphs[0]), edge_set(&k5));
    assert_eq!(report.total_edges_before, 15);
    assert_eq!(report.total_edges_after, out.graphs[0].edge_count() + 5);
}

#[test]
fn duplicate_directed_pairs_collapse() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("D_A.txt"), "1, 2\n2, 1\n").unwrap();
    fs::write(dir.path().join("D_graph_indicator.txt"), "1\n1\n").unwrap();
    let b = read_tu_dataset(dir.path(), "D").unwrap();
    assert_eq!(b.graphs[0].edge_count(), 1);
    assert_eq!(b.labels, vec![0]);
}

/// Needs a real download: set TRUSSKIT_PROTEINS_DIR to the folder holding
/// PROTEINS_A.txt and friends, then run with `--ignored`.
#[test]
#[ignore]
fn proteins_statistics() {
    let dir = std::env::var("TRUSSKIT_PROTEINS_DIR").expect("TRUSSKIT_PROTEINS_DIR not set");
    let b = read_tu_dataset(dir, "PROTEINS").unwrap();
    assert_eq!(b.len(), 1113);
    assert_eq!(b.class_count(), 2);
}
