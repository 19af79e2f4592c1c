//! Reference implementations used as test oracles. None of them call into
//! the library's decomposition, support or sparsification code; they work
//! on plain external-id edge sets.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use trusskit::{Aggregator, Combiner, Decision, Graph, SparsifyConfig, SparsifyReport};

pub type Edge = (i64, i64);

pub fn edge_set(g: &Graph) -> BTreeSet<Edge> {
    g.external_edges().into_iter().collect()
}

fn adjacency(edges: &BTreeSet<Edge>) -> BTreeMap<i64, BTreeSet<i64>> {
    let mut adj: BTreeMap<i64, BTreeSet<i64>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
    }
    adj
}

/// Triangles through each edge, by checking every third node.
pub fn brute_support(g: &Graph) -> BTreeMap<Edge, u32> {
    let edges = edge_set(g);
    let nodes = g.external_ids();
    edges
        .iter()
        .map(|&(a, b)| {
            let count = nodes
                .iter()
                .filter(|&&w| w != a && w != b)
                .filter(|&&w| {
                    edges.contains(&(a.min(w), a.max(w))) && edges.contains(&(b.min(w), b.max(w)))
                })
                .count();
            ((a, b), count as u32)
        })
        .collect()
}

/// Number of node triples that form a triangle.
pub fn brute_triangles(g: &Graph) -> u64 {
    let edges = edge_set(g);
    let nodes = g.external_ids();
    let has = |a: i64, b: i64| edges.contains(&(a.min(b), a.max(b)));
    let mut count = 0;
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if !has(nodes[i], nodes[j]) {
                continue;
            }
            for k in j + 1..nodes.len() {
                if has(nodes[i], nodes[k]) && has(nodes[j], nodes[k]) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// For k = 2, 3, ...: delete edges with fewer than k - 2 triangles inside the
/// surviving subgraph until nothing changes; survivors have trussness >= k.
pub fn brute_trussness(edges: &BTreeSet<Edge>) -> BTreeMap<Edge, u32> {
    let mut result: BTreeMap<Edge, u32> = edges.iter().map(|&e| (e, 2)).collect();
    let mut k = 3u32;
    let mut alive = edges.clone();
    loop {
        loop {
            let adj = adjacency(&alive);
            let weak: Vec<Edge> = alive
                .iter()
                .copied()
                .filter(|&(a, b)| {
                    let s = adj[&a].intersection(&adj[&b]).count() as u32;
                    s + 2 < k
                })
                .collect();
            if weak.is_empty() {
                break;
            }
            for e in weak {
                alive.remove(&e);
            }
        }
        if alive.is_empty() {
            return result;
        }
        for e in &alive {
            result.insert(*e, k);
        }
        k += 1;
    }
}

/// Trussness from the library as an external-id map.
pub fn library_trussness(g: &Graph, t: &trusskit::TrussMap) -> BTreeMap<Edge, u32> {
    t.iter().map(|(e, k)| (g.external_pair(e), k)).collect()
}

fn strength(edges: &BTreeSet<Edge>, truss: &BTreeMap<Edge, u32>, n: i64, agg: Aggregator) -> f64 {
    let ks: Vec<u32> = edges
        .iter()
        .filter(|&&(a, b)| a == n || b == n)
        .map(|e| truss[e])
        .collect();
    if ks.is_empty() {
        return 0.0;
    }
    match agg {
        Aggregator::Mean => ks.iter().map(|&k| k as f64).sum::<f64>() / ks.len() as f64,
        Aggregator::Min => *ks.iter().min().unwrap() as f64,
    }
}

/// Outcome of an oracle sparsification run.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub decisions: Vec<(Edge, u32, Decision)>,
    pub edges: BTreeSet<Edge>,
}

/// Sparsification with one prune per step and a full decomposition after
/// every prune (`trussness_of` supplies the decomposition).
pub fn oracle_sparsify<F>(g: &Graph, cfg: &SparsifyConfig, trussness_of: F) -> OracleRun
where
    F: Fn(&BTreeSet<Edge>) -> BTreeMap<Edge, u32>,
{
    let mut edges = edge_set(g);
    let t0 = trussness_of(&edges);
    let mut candidates: Vec<(Edge, u32)> = t0
        .iter()
        .filter(|(_, &k)| k >= cfg.eta)
        .map(|(&e, &k)| (e, k))
        .collect();
    // Ascending edge key equals ascending external pair: internal order is
    // sorted external-id order.
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut truss = t0;
    let mut decisions = Vec::new();
    for (e, _) in candidates {
        let k = truss[&e];
        if k < cfg.eta {
            decisions.push((e, k, Decision::Skipped));
            continue;
        }
        let su = strength(&edges, &truss, e.0, cfg.aggregator);
        let sv = strength(&edges, &truss, e.1, cfg.aggregator);
        let combined = match cfg.combiner {
            Combiner::Min => su.min(sv),
            Combiner::Mean => (su + sv) / 2.0,
        };
        if combined >= cfg.delta - 1e-9 {
            decisions.push((e, k, Decision::Pruned));
            edges.remove(&e);
            truss = trussness_of(&edges);
        } else {
            decisions.push((e, k, Decision::Kept));
        }
    }
    OracleRun { decisions, edges }
}

pub fn report_decisions(report: &SparsifyReport) -> Vec<(Edge, u32, Decision)> {
    report
        .examined
        .iter()
        .map(|x| ((x.u, x.v), x.trussness, x.decision))
        .collect()
}

/// Graph on the given edges plus every node of `like`.
pub fn rebuild(like: &Graph, edges: &BTreeSet<Edge>) -> Graph {
    trusskit::build_graph_with_nodes(like.external_ids().iter().copied(), edges.iter().copied()).0
}
