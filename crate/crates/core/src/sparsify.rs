//! Truss-based graph sparsification.
//!
//! Edges whose trussness reaches the cutoff `eta` are visited once, densest
//! first. An edge is pruned when the combined strength of its endpoints (by
//! default the smaller of the two mean incident trussness values) reaches
//! `delta`. Trussness is kept current with incremental updates after every
//! `prune_batch` prunes.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeKey, Graph, NodeIdx};
use crate::par::{self, Exec};
use crate::truss::{truss_decompose, TrussMap};

/// Two strengths closer than this are treated as equal, so `combined == delta`
/// survives floating point noise and still prunes.
pub const STRENGTH_EPSILON: f64 = 1e-9;

/// How a node's incident edge trussness values are folded into one strength.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Mean,
    Min,
}

/// How the two endpoint strengths of an edge are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    #[default]
    Min,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsifyConfig {
    pub eta: u32,
    pub delta: f64,
    pub aggregator: Aggregator,
    pub combiner: Combiner,
    /// Prunes performed between trussness updates.
    pub prune_batch: usize,
}

impl SparsifyConfig {
    pub const DEFAULT_ETA: u32 = 3;

    pub fn new(eta: u32, delta: f64) -> Self {
        SparsifyConfig {
            eta,
            delta,
            aggregator: Aggregator::Mean,
            combiner: Combiner::Min,
            prune_batch: 1,
        }
    }

    pub fn with_aggregator(mut self, aggregator: Aggregator) -> Self {
        self.aggregator = aggregator;
        self
    }

    pub fn with_combiner(mut self, combiner: Combiner) -> Self {
        self.combiner = combiner;
        self
    }

    pub fn with_prune_batch(mut self, prune_batch: usize) -> Self {
        self.prune_batch = prune_batch;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.eta < 2 {
            return Err(Error::InvalidParameter(format!(
                "eta must be >= 2, got {}",
                self.eta
            )));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be a non-negative number, got {}",
                self.delta
            )));
        }
        if !(1..=3).contains(&self.prune_batch) {
            return Err(Error::InvalidParameter(format!(
                "prune batch must be 1, 2 or 3, got {}",
                self.prune_batch
            )));
        }
        Ok(())
    }

    /// Condition for pruning a candidate with the given combined strength.
    pub fn prunes(&self, combined: f64) -> bool {
        combined >= self.delta - STRENGTH_EPSILON
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Pruned,
    Kept,
    Skipped,
}

/// One examined candidate edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExaminedEdge {
    #[serde(skip)]
    pub key: Option<EdgeKey>,
    pub u: i64,
    pub v: i64,
    pub trussness: u32,
    /// Strengths are absent for skipped edges.
    pub strength_u: Option<f64>,
    pub strength_v: Option<f64>,
    pub combined_strength: Option<f64>,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifyReport {
    pub config: SparsifyConfig,
    pub input_edge_count: usize,
    pub output_edge_count: usize,
    pub pruned_count: usize,
    pub pruning_rate: f64,
    pub examined: Vec<ExaminedEdge>,
}

impl SparsifyReport {
    pub fn count(&self, decision: Decision) -> usize {
        self.examined
            .iter()
            .filter(|e| e.decision == decision)
            .count()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }
}

/// Edges with trussness `>= eta`, densest first, ties by ascending key.
pub fn high_truss_edges(t: &TrussMap, eta: u32) -> Vec<EdgeKey> {
    let mut edges: Vec<(EdgeKey, u32)> = t.iter().filter(|&(_, k)| k >= eta).collect();
    edges.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    edges.into_iter().map(|(e, _)| e).collect()
}

/// Strength of node `n` from the trussness of its current incident edges.
/// Isolated nodes have strength 0.
pub fn node_strength(g: &Graph, t: &TrussMap, n: NodeIdx, aggregator: Aggregator) -> Result<f64> {
    g.check_node(n)?;
    let nbrs = g.neighbors(n);
    if nbrs.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0u64;
    let mut min = u32::MAX;
    for &w in nbrs {
        let k = t.lookup(g, EdgeKey::new(n, w))?;
        sum += k as u64;
        min = min.min(k);
    }
    Ok(match aggregator {
        Aggregator::Mean => sum as f64 / nbrs.len() as f64,
        Aggregator::Min => min as f64,
    })
}

/// Endpoint strengths of an edge and their combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeStrength {
    pub strength_u: f64,
    pub strength_v: f64,
    pub combined: f64,
}

pub fn combine(a: f64, b: f64, combiner: Combiner) -> f64 {
    match combiner {
        Combiner::Min => a.min(b),
        Combiner::Mean => (a + b) / 2.0,
    }
}

pub fn edge_strength(
    g: &Graph,
    t: &TrussMap,
    e: EdgeKey,
    cfg: &SparsifyConfig,
) -> Result<EdgeStrength> {
    if !g.contains(e) {
        let (a, b) = g.external_pair_lossy(e);
        return Err(Error::EdgeNotFound(a, b));
    }
    let strength_u = node_strength(g, t, e.u(), cfg.aggregator)?;
    let strength_v = node_strength(g, t, e.v(), cfg.aggregator)?;
    Ok(EdgeStrength {
        strength_u,
        strength_v,
        combined: combine(strength_u, strength_v, cfg.combiner),
    })
}

/// Sparsifies `g`. The returned graph keeps every node of `g`.
pub fn tgs_sparsify(g: &Graph, cfg: &SparsifyConfig) -> Result<(Graph, SparsifyReport)> {
    cfg.validate()?;
    let t0 = truss_decompose(g);
    tgs_sparsify_from(g, &t0, cfg)
}

/// [`tgs_sparsify`] starting from a precomputed decomposition of `g`.
pub fn tgs_sparsify_from(
    g: &Graph,
    t0: &TrussMap,
    cfg: &SparsifyConfig,
) -> Result<(Graph, SparsifyReport)> {
    cfg.validate()?;
    let candidates = high_truss_edges(t0, cfg.eta);

    // `work` drops pruned edges immediately; `synced` trails it by the prunes
    // not yet folded into `truss`.
    let mut work = g.clone();
    let mut synced = g.clone();
    let mut truss = t0.clone();
    let mut pending: Vec<EdgeKey> = Vec::with_capacity(cfg.prune_batch);
    let mut examined = Vec::with_capacity(candidates.len());

    for e in candidates {
        let current = truss.lookup(&work, e)?;
        let (u, v) = work.external_pair(e);
        if current < cfg.eta {
            examined.push(ExaminedEdge {
                key: Some(e),
                u,
                v,
                trussness: current,
                strength_u: None,
                strength_v: None,
                combined_strength: None,
                decision: Decision::Skipped,
            });
            continue;
        }
        let s = edge_strength(&work, &truss, e, cfg)?;
        let decision = if cfg.prunes(s.combined) {
            Decision::Pruned
        } else {
            Decision::Kept
        };
        examined.push(ExaminedEdge {
            key: Some(e),
            u,
            v,
            trussness: current,
            strength_u: Some(s.strength_u),
            strength_v: Some(s.strength_v),
            combined_strength: Some(s.combined),
            decision,
        });
        if decision == Decision::Pruned {
            work.remove_edge(e);
            pending.push(e);
            if pending.len() >= cfg.prune_batch {
                for p in pending.drain(..) {
                    truss.apply_removal(&synced, p)?;
                    synced.remove_edge(p);
                }
            }
        }
    }

    let input_edge_count = g.edge_count();
    let pruned_count = input_edge_count - work.edge_count();
    let report = SparsifyReport {
        config: *cfg,
        input_edge_count,
        output_edge_count: work.edge_count(),
        pruned_count,
        pruning_rate: if input_edge_count == 0 {
            0.0
        } else {
            pruned_count as f64 / input_edge_count as f64
        },
        examined,
    };
    Ok((work, report))
}

/// One cell of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eta: u32,
    pub delta: f64,
    pub pruned_count: usize,
    pub pruning_rate: f64,
    pub edges_remaining: usize,
    /// Pruned count did not grow relative to the previous delta at this eta.
    /// Always true for the first delta.
    pub non_increasing: bool,
}

/// Runs [`tgs_sparsify`] for every `(eta, delta)` pair on the original graph.
/// Rows come out eta-major in the order the values were given.
pub fn sweep(
    g: &Graph,
    etas: &[u32],
    deltas: &[f64],
    base: &SparsifyConfig,
) -> Result<Vec<SweepRow>> {
    sweep_with(g, etas, deltas, base, Exec::default())
}

pub fn sweep_with(
    g: &Graph,
    etas: &[u32],
    deltas: &[f64],
    base: &SparsifyConfig,
    exec: Exec,
) -> Result<Vec<SweepRow>> {
    if etas.is_empty() || deltas.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one eta and one delta".into(),
        ));
    }
    let grid: Vec<SparsifyConfig> = etas
        .iter()
        .flat_map(|&eta| {
            deltas.iter().map(move |&delta| SparsifyConfig {
                eta,
                delta,
                ..*base
            })
        })
        .collect();
    for cfg in &grid {
        cfg.validate()?;
    }
    let t0 = truss_decompose(g);
    let runs = par::map_slice(&grid, exec, |cfg| tgs_sparsify_from(g, &t0, cfg));
    let mut rows: Vec<SweepRow> = Vec::with_capacity(grid.len());
    for (i, (cfg, run)) in grid.iter().zip(runs).enumerate() {
        let (out, report) = run?;
        let non_increasing = if i % deltas.len() == 0 {
            true
        } else {
            report.pruned_count <= rows[i - 1].pruned_count
        };
        rows.push(SweepRow {
            eta: cfg.eta,
            delta: cfg.delta,
            pruned_count: report.pruned_count,
            pruning_rate: report.pruning_rate,
            edges_remaining: out.edge_count(),
            non_increasing,
        });
    }
    Ok(rows)
}

/// Checks a report against its input and output graphs: every structural
/// invariant a sparsification run must satisfy. Returns a description of the
/// first violation.
pub fn check_report(
    input: &Graph,
    output: &Graph,
    report: &SparsifyReport,
) -> std::result::Result<(), String> {
    let cfg = &report.config;
    if output.external_ids() != input.external_ids() {
        return Err("node set changed".into());
    }
    let before: HashSet<(i64, i64)> = input.external_edges().into_iter().collect();
    if !output.external_edges().iter().all(|e| before.contains(e)) {
        return Err("output has an edge the input lacks".into());
    }
    if report.pruned_count > report.input_edge_count
        || report.input_edge_count != input.edge_count()
        || report.pruned_count + output.edge_count() != input.edge_count()
        || report.pruned_count != report.count(Decision::Pruned)
    {
        return Err("inconsistent edge counts".into());
    }
    let mut seen = HashSet::new();
    for x in &report.examined {
        if !seen.insert((x.u, x.v)) {
            return Err(format!("edge ({}, {}) examined twice", x.u, x.v));
        }
        match x.decision {
            Decision::Skipped if x.trussness >= cfg.eta => {
                return Err(format!(
                    "skipped ({}, {}) with trussness {}",
                    x.u, x.v, x.trussness
                ))
            }
            Decision::Pruned | Decision::Kept if x.trussness < cfg.eta => {
                return Err(format!("low-truss edge ({}, {}) was evaluated", x.u, x.v))
            }
            Decision::Pruned
                if !x
                    .combined_strength
                    .is_some_and(|s| s >= cfg.delta - STRENGTH_EPSILON) =>
            {
                return Err(format!("pruned ({}, {}) below delta", x.u, x.v))
            }
            Decision::Kept
                if !x
                    .combined_strength
                    .is_some_and(|s| s < cfg.delta - STRENGTH_EPSILON) =>
            {
                return Err(format!("kept ({}, {}) at or above delta", x.u, x.v))
            }
            _ => {}
        }
    }
    let expected = if report.input_edge_count == 0 {
        0.0
    } else {
        report.pruned_count as f64 / report.input_edge_count as f64
    };
    if report.pruning_rate != expected {
        return Err("pruning rate mismatch".into());
    }
    Ok(())
}
