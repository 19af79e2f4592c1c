//! Seeded random graph generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{build_graph_with_nodes, Graph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi G(n, p) on ids `0..n`; every node is present even if isolated.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng(seed);
    let mut pairs = Vec::new();
    for a in 0..n as i64 {
        for b in a + 1..n as i64 {
            if rng.gen_bool(p) {
                pairs.push((a, b));
            }
        }
    }
    build_graph_with_nodes(0..n as i64, pairs).0
}

/// Uniform graph with exactly `m` distinct edges on ids `0..n`.
pub fn gnm(n: usize, m: usize, seed: u64) -> Graph {
    assert!(
        n >= 2 && m <= n * (n - 1) / 2,
        "too many edges for {n} nodes"
    );
    let mut rng = rng(seed);
    let mut seen: HashSet<(i64, i64)> = HashSet::with_capacity(m);
    let mut pairs = Vec::with_capacity(m);
    while pairs.len() < m {
        let a = rng.gen_range(0..n as i64);
        let b = rng.gen_range(0..n as i64);
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if seen.insert(e) {
            pairs.push(e);
        }
    }
    build_graph_with_nodes(0..n as i64, pairs).0
}

/// Uniform random recursive tree on ids `0..n`.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = rng(seed);
    let pairs: Vec<(i64, i64)> = (1..n as i64).map(|i| (rng.gen_range(0..i), i)).collect();
    build_graph_with_nodes(0..n as i64, pairs).0
}

/// A random tree with G(n, p) edges layered on top, so always connected.
pub fn connected_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let tree = random_tree(n, seed);
    let extra = gnp(n, p, seed.wrapping_add(0x9e37_79b9));
    let mut pairs = tree.external_edges();
    pairs.extend(extra.external_edges());
    build_graph_with_nodes(0..n as i64, pairs).0
}

/// A dense core planted inside a sparser cohesive shell.
#[derive(Debug, Clone)]
pub struct PlantedTruss {
    pub graph: Graph,
    /// External ids of the clique nodes.
    pub core: Vec<i64>,
    /// External ids of the shell nodes.
    pub shell: Vec<i64>,
}

/// Clique of `core_size` nodes (trussness `core_size`) attached to a shell
/// in which every node links to the next three around a ring, a 4-truss.
/// Each core node is joined to two adjacent shell nodes chosen at random.
pub fn planted_truss(core_size: usize, shell_size: usize, seed: u64) -> PlantedTruss {
    assert!(shell_size >= 8, "shell ring needs at least 8 nodes");
    let mut rng = rng(seed);
    let ring = shell_size as i64;
    let mut pairs = Vec::new();
    for i in 0..ring {
        for step in 1..=3 {
            pairs.push((i, (i + step) % ring));
        }
    }
    let core: Vec<i64> = (ring..ring + core_size as i64).collect();
    for (i, &a) in core.iter().enumerate() {
        for &b in &core[i + 1..] {
            pairs.push((a, b));
        }
    }
    let mut anchors: Vec<i64> = (0..ring).collect();
    anchors.shuffle(&mut rng);
    for (i, &c) in core.iter().enumerate() {
        let s = anchors[i % anchors.len()];
        pairs.push((c, s));
        pairs.push((c, (s + 1) % ring));
    }
    let graph = build_graph_with_nodes(0..ring + core_size as i64, pairs).0;
    PlantedTruss {
        graph,
        core,
        shell: (0..ring).collect(),
    }
}
