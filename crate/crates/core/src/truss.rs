//! Truss decomposition and trussness maintenance under edge deletion.
//!
//! The decomposition peels edges in increasing support order with a bin-sorted
//! bucket queue (the edge analogue of the degeneracy ordering used for k-cores),
//! which keeps the whole run within `O(Σ_{(u,v)} (d(u) + d(v)))` time.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{self, for_each_common, EdgeKey, EdgeMap, Graph, NodeIdx};
use crate::par::Exec;

/// Trussness of every edge of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrussMap {
    trussness: EdgeMap<u32>,
    max_k: u32,
}

impl TrussMap {
    fn new(trussness: EdgeMap<u32>) -> Self {
        let max_k = trussness.values().iter().copied().max().unwrap_or(0);
        TrussMap { trussness, max_k }
    }

    pub(crate) fn from_parts(keys: Vec<EdgeKey>, values: Vec<u32>) -> Self {
        TrussMap::new(EdgeMap::from_sorted(keys, values))
    }

    pub fn get(&self, key: EdgeKey) -> Option<u32> {
        self.trussness.get(key).copied()
    }

    /// Largest trussness present, or 0 for an edgeless graph.
    pub fn max_k(&self) -> u32 {
        self.max_k
    }

    pub fn len(&self) -> usize {
        self.trussness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trussness.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeKey, u32)> + '_ {
        self.trussness.iter().map(|(k, &t)| (k, t))
    }

    pub fn edge_map(&self) -> &EdgeMap<u32> {
        &self.trussness
    }

    /// Nodes incident to at least one edge of trussness `>= k`, ascending.
    pub fn region_nodes(&self, k: u32) -> Vec<NodeIdx> {
        let mut nodes: Vec<NodeIdx> = self
            .iter()
            .filter(|&(_, t)| t >= k)
            .flat_map(|(e, _)| [e.u(), e.v()])
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    pub(crate) fn lookup(&self, g: &Graph, key: EdgeKey) -> Result<u32> {
        self.get(key).ok_or_else(|| {
            let (a, b) = g.external_pair_lossy(key);
            Error::EdgeNotFound(a, b)
        })
    }

    /// Applies the removal of `removed` from `g` (the graph still containing
    /// it) to this map in place. See [`update_trussness`].
    pub fn apply_removal(&mut self, g: &Graph, removed: EdgeKey) -> Result<UpdateStats> {
        self.apply_removal_with(g, removed, DEFAULT_FALLBACK_FRACTION)
    }

    pub fn apply_removal_with(
        &mut self,
        g: &Graph,
        removed: EdgeKey,
        fallback_fraction: f64,
    ) -> Result<UpdateStats> {
        let k0 = self.lookup(g, removed)?;
        if !g.contains(removed) {
            let (a, b) = g.external_pair_lossy(removed);
            return Err(Error::EdgeNotFound(a, b));
        }
        let budget = (fallback_fraction * g.edge_count() as f64).ceil() as usize;
        let mut stats = UpdateStats::default();
        let mut demoted: Vec<EdgeKey> = Vec::new();

        // Removing an edge of trussness k0 leaves every k-truss with k > k0
        // intact and lowers any other edge by at most one level. Level k is
        // therefore the old k-truss minus `removed`, re-peeled from the
        // triangles that lost `removed`.
        for k in 3..=k0 {
            match self.repeel_level(g, removed, k, budget, &mut stats) {
                Some(level) => demoted.extend(level),
                None => {
                    stats.fell_back = true;
                    let h = g.without_edge(removed)?;
                    *self = truss_decompose(&h);
                    return Ok(stats);
                }
            }
        }

        self.trussness.remove(removed);
        for e in &demoted {
            *self.trussness.get_mut(*e).expect("demoted edge is present") -= 1;
        }
        stats.demoted = demoted.len();
        if k0 == self.max_k || self.trussness.is_empty() {
            self.max_k = self.trussness.values().iter().copied().max().unwrap_or(0);
        }
        Ok(stats)
    }

    /// Edges of trussness exactly `k` that fall out of the k-truss once
    /// `removed` is gone. `None` when the evaluation budget is exhausted.
    fn repeel_level(
        &self,
        g: &Graph,
        removed: EdgeKey,
        k: u32,
        budget: usize,
        stats: &mut UpdateStats,
    ) -> Option<Vec<EdgeKey>> {
        let mut peeled: HashSet<EdgeKey> = HashSet::new();
        let mut queue: VecDeque<EdgeKey> = VecDeque::new();
        let mut queued: HashSet<EdgeKey> = HashSet::new();

        let in_level = |e: EdgeKey, peeled: &HashSet<EdgeKey>| {
            e != removed && !peeled.contains(&e) && self.get(e).is_some_and(|t| t >= k)
        };

        let (u, v) = removed.endpoints();
        for_each_common(g.neighbors(u), g.neighbors(v), |w, _, _| {
            let (a, b) = (EdgeKey::new(u, w), EdgeKey::new(v, w));
            let (ta, tb) = (self.get(a).unwrap_or(0), self.get(b).unwrap_or(0));
            if ta >= k && tb >= k {
                for (e, t) in [(a, ta), (b, tb)] {
                    if t == k && queued.insert(e) {
                        queue.push_back(e);
                    }
                }
            }
        });

        let mut partners: Vec<(EdgeKey, EdgeKey)> = Vec::new();
        while let Some(e) = queue.pop_front() {
            queued.remove(&e);
            if peeled.contains(&e) {
                continue;
            }
            stats.evaluated += 1;
            if stats.evaluated > budget {
                return None;
            }
            partners.clear();
            let (a, b) = e.endpoints();
            for_each_common(g.neighbors(a), g.neighbors(b), |w, _, _| {
                let (ea, eb) = (EdgeKey::new(a, w), EdgeKey::new(b, w));
                if in_level(ea, &peeled) && in_level(eb, &peeled) {
                    partners.push((ea, eb));
                }
            });
            if partners.len() + 2 < k as usize {
                peeled.insert(e);
                for &(ea, eb) in &partners {
                    for f in [ea, eb] {
                        if self.get(f) == Some(k) && queued.insert(f) {
                            queue.push_back(f);
                        }
                    }
                }
            }
        }
        let mut level: Vec<EdgeKey> = peeled.into_iter().collect();
        level.sort_unstable();
        Some(level)
    }
}

/// Bookkeeping from one incremental update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    /// Edge support evaluations performed by the local re-peel.
    pub evaluated: usize,
    /// Edges whose trussness dropped by one.
    pub demoted: usize,
    /// The local re-peel exceeded its budget and a full decomposition ran.
    pub fell_back: bool,
}

/// Fraction of the edge count the local update may evaluate before it gives
/// up and recomputes from scratch.
pub const DEFAULT_FALLBACK_FRACTION: f64 = 0.2;

/// Computes the trussness of every edge.
pub fn truss_decompose(g: &Graph) -> TrussMap {
    truss_decompose_with(g, Exec::default())
}

/// [`truss_decompose`] with an explicit execution mode for the support count.
/// The peel itself is sequential.
pub fn truss_decompose_with(g: &Graph, exec: Exec) -> TrussMap {
    let sup_map = graph::support_with(g, exec);
    let m = sup_map.len();
    if m == 0 {
        return TrussMap::new(sup_map);
    }
    let keys = sup_map.keys().to_vec();
    let mut sup = sup_map.values().to_vec();

    // Edge id of every adjacency slot: edges are numbered in key order, so
    // the id of (u, v) with u < v is the count of edges before u's upper run.
    let n = g.node_count();
    let mut offsets = vec![0usize; n + 1];
    for u in 0..n {
        offsets[u + 1] = offsets[u] + g.degree(u as NodeIdx);
    }
    let mut slot_eid = vec![0u32; offsets[n]];
    let mut fill = offsets.clone();
    for (eid, key) in keys.iter().enumerate() {
        let (u, v) = (key.u() as usize, key.v() as usize);
        slot_eid[fill[u]] = eid as u32;
        fill[u] += 1;
        slot_eid[fill[v]] = eid as u32;
        fill[v] += 1;
    }
    // Key order visits (x, u) for ascending x < u before (u, y) for ascending
    // y > u, so each node's slots already line up with its sorted neighbors.
    debug_assert!((0..n).all(|u| {
        let slots = &slot_eid[offsets[u]..offsets[u + 1]];
        slots
            .iter()
            .zip(g.neighbors(u as NodeIdx))
            .all(|(&eid, &w)| keys[eid as usize] == EdgeKey::new(u as NodeIdx, w))
    }));

    // Bin sort by support; within a bin edges start in ascending key order.
    let max_sup = *sup.iter().max().unwrap() as usize;
    let mut bin = vec![0usize; max_sup + 2];
    for &s in &sup {
        bin[s as usize + 1] += 1;
    }
    for s in 1..bin.len() {
        bin[s] += bin[s - 1];
    }
    let mut order = vec![0u32; m];
    let mut pos = vec![0usize; m];
    {
        let mut next = bin.clone();
        for (eid, &s) in sup.iter().enumerate() {
            let p = next[s as usize];
            order[p] = eid as u32;
            pos[eid] = p;
            next[s as usize] += 1;
        }
    }

    let mut alive = vec![true; m];
    let mut truss = vec![0u32; m];
    let mut level = 0u32;
    for i in 0..m {
        let e = order[i] as usize;
        level = level.max(sup[e]);
        truss[e] = level + 2;
        let (u, v) = keys[e].endpoints();
        let (u, v) = (u as usize, v as usize);
        let (nu, nv) = (g.neighbors(u as NodeIdx), g.neighbors(v as NodeIdx));
        let (su, sv) = (
            &slot_eid[offsets[u]..offsets[u + 1]],
            &slot_eid[offsets[v]..offsets[v + 1]],
        );
        let cur = sup[e];
        for_each_common(nu, nv, |_, iu, iv| {
            let (e1, e2) = (su[iu] as usize, sv[iv] as usize);
            if !alive[e1] || !alive[e2] {
                return;
            }
            for f in [e1, e2] {
                if sup[f] > cur {
                    // Move f to the front of its bucket, then shrink the bucket.
                    let s = sup[f] as usize;
                    let front = bin[s];
                    let g_edge = order[front] as usize;
                    if g_edge != f {
                        order.swap(front, pos[f]);
                        pos[g_edge] = pos[f];
                        pos[f] = front;
                    }
                    bin[s] += 1;
                    sup[f] -= 1;
                }
            }
        });
        alive[e] = false;
    }
    TrussMap::new(EdgeMap::from_sorted(keys, truss))
}

/// The k-truss: edges of trussness `>= k`, without isolated nodes.
pub fn k_truss_subgraph(g: &Graph, t: &TrussMap, k: u32) -> Result<Graph> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    Ok(g.edge_subgraph(|e| t.get(e).is_some_and(|tr| tr >= k), true))
}

/// Trussness of `g` with `removed` deleted, computed by re-peeling only the
/// levels and triangles the deletion can reach. `g` is the graph before the
/// removal. Falls back to a full decomposition when the local work would
/// exceed [`DEFAULT_FALLBACK_FRACTION`] of the edge count.
pub fn update_trussness(g: &Graph, t: &TrussMap, removed: EdgeKey) -> Result<TrussMap> {
    let mut out = t.clone();
    out.apply_removal(g, removed)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: i64) -> Graph {
        let mut pairs = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                pairs.push((a, b));
            }
        }
        Graph::from_edges(&pairs)
    }

    fn bowtie() -> Graph {
        // Two triangles sharing edge (1, 2).
        Graph::from_edges(&[(1, 2), (1, 3), (2, 3), (1, 4), (2, 4)])
    }

    #[test]
    fn trees_are_two_trusses() {
        let g = Graph::from_edges(&[(1, 2), (1, 3), (3, 4), (3, 5)]);
        let t = truss_decompose(&g);
        assert!(t.iter().all(|(_, k)| k == 2));
        assert_eq!(t.max_k(), 2);
    }

    #[test]
    fn complete_graph_is_its_own_truss() {
        let t = truss_decompose(&complete(5));
        assert_eq!(t.len(), 10);
        assert!(t.iter().all(|(_, k)| k == 5));
    }

    #[test]
    fn bowtie_trussness() {
        let g = bowtie();
        let t = truss_decompose(&g);
        assert!(t.iter().all(|(_, k)| k == 3));
        assert_eq!(k_truss_subgraph(&g, &t, 3).unwrap(), g);
    }

    #[test]
    fn subgraph_bounds() {
        let g = complete(5);
        let t = truss_decompose(&g);
        assert_eq!(k_truss_subgraph(&g, &t, 6).unwrap().node_count(), 0);
        assert!(matches!(
            k_truss_subgraph(&g, &t, 1),
            Err(Error::InvalidParameter(_))
        ));
        let with_isolated = crate::graph::build_graph_with_nodes([9], g.external_edges()).0;
        let t2 = truss_decompose(&with_isolated);
        assert_eq!(k_truss_subgraph(&with_isolated, &t2, 2).unwrap(), g);
    }

    #[test]
    fn update_matches_recompute() {
        let g = complete(5);
        let t = truss_decompose(&g);
        let e = g.edge_key(1, 2).unwrap();
        let updated = update_trussness(&g, &t, e).unwrap();
        assert_eq!(updated, truss_decompose(&g.without_edge(e).unwrap()));

        let b = bowtie();
        let tb = truss_decompose(&b);
        let shared = b.edge_key(1, 2).unwrap();
        let after = update_trussness(&b, &tb, shared).unwrap();
        assert_eq!(after.len(), 4);
        assert!(after.iter().all(|(_, k)| k == 2));
        assert_eq!(after, truss_decompose(&b.without_edge(shared).unwrap()));
    }

    #[test]
    fn update_on_tree_and_missing_edge() {
        let g = Graph::from_edges(&[(1, 2), (2, 3), (3, 4)]);
        let t = truss_decompose(&g);
        let e = g.edge_key(2, 3).unwrap();
        let after = update_trussness(&g, &t, e).unwrap();
        assert!(after.iter().all(|(_, k)| k == 2));
        assert_eq!(after.len(), 2);
        assert!(matches!(
            update_trussness(&g, &t, EdgeKey::new(0, 3)),
            Err(Error::EdgeNotFound(1, 4))
        ));
    }

    #[test]
    fn forced_fallback_still_exact() {
        let g = complete(6);
        let mut t = truss_decompose(&g);
        let e = g.edge_key(1, 2).unwrap();
        let stats = t.apply_removal_with(&g, e, 0.0).unwrap();
        assert!(stats.fell_back);
        assert_eq!(t, truss_decompose(&g.without_edge(e).unwrap()));
    }
}
