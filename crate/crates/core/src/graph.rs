//! Undirected simple graphs with dense internal indexing.
//!
//! Nodes carry an arbitrary integer external id. Internally they are numbered
//! `0..n` in ascending external-id order, which makes every derived quantity
//! independent of the order edges were supplied in. Neighbor lists are kept
//! sorted so triangle queries reduce to a linear merge.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// Dense internal node index.
pub type NodeIdx = u32;

/// An undirected edge between two internal node indices, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    u: NodeIdx,
    v: NodeIdx,
}

impl EdgeKey {
    /// Normalizes the pair so that `(a, b)` and `(b, a)` give the same key.
    ///
    /// Panics if `a == b`; self-loops are never edges of a [`Graph`].
    pub fn new(a: NodeIdx, b: NodeIdx) -> Self {
        assert_ne!(a, b, "self-loop ({a}, {a}) is not a valid edge");
        if a < b {
            EdgeKey { u: a, v: b }
        } else {
            EdgeKey { u: b, v: a }
        }
    }

    pub fn u(self) -> NodeIdx {
        self.u
    }

    pub fn v(self) -> NodeIdx {
        self.v
    }

    pub fn endpoints(self) -> (NodeIdx, NodeIdx) {
        (self.u, self.v)
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// What [`build_graph`] discarded while normalizing raw input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

/// Immutable undirected simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<i64>,
    index: HashMap<i64, NodeIdx>,
    adj: Vec<Vec<NodeIdx>>,
    edge_count: usize,
}

/// Builds a graph from raw `(id, id)` pairs, dropping self-loops and
/// duplicates (in either orientation).
pub fn build_graph(edge_pairs: &[(i64, i64)]) -> (Graph, LoadReport) {
    build_graph_with_nodes(std::iter::empty(), edge_pairs.iter().copied())
}

/// Like [`build_graph`], but also declares nodes that may have no edges.
pub fn build_graph_with_nodes<N, E>(nodes: N, edge_pairs: E) -> (Graph, LoadReport)
where
    N: IntoIterator<Item = i64>,
    E: IntoIterator<Item = (i64, i64)>,
{
    let mut report = LoadReport::default();
    let mut ids: Vec<i64> = nodes.into_iter().collect();
    let mut pairs = Vec::new();
    for (a, b) in edge_pairs {
        ids.push(a);
        ids.push(b);
        if a == b {
            report.self_loops += 1;
        } else {
            pairs.push((a.min(b), a.max(b)));
        }
    }
    ids.sort_unstable();
    ids.dedup();
    pairs.sort_unstable();
    let before = pairs.len();
    pairs.dedup();
    report.duplicate_edges = before - pairs.len();

    let index: HashMap<i64, NodeIdx> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as NodeIdx))
        .collect();
    let mut adj = vec![Vec::new(); ids.len()];
    for &(a, b) in &pairs {
        let (ia, ib) = (index[&a], index[&b]);
        adj[ia as usize].push(ib);
        adj[ib as usize].push(ia);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let graph = Graph {
        ids,
        index,
        adj,
        edge_count: pairs.len(),
    };
    (graph, report)
}

impl Graph {
    /// Convenience wrapper around [`build_graph`] that discards the load report.
    pub fn from_edges(edge_pairs: &[(i64, i64)]) -> Graph {
        build_graph(edge_pairs).0
    }

    /// Assembles a graph from internal parts. `adj` must already be sorted
    /// and symmetric.
    fn from_parts(ids: Vec<i64>, adj: Vec<Vec<NodeIdx>>) -> Graph {
        let index = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as NodeIdx))
            .collect();
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Graph {
            ids,
            index,
            adj,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Errors with [`Error::EmptyGraph`] when there is nothing to work on.
    pub fn require_non_empty(&self) -> Result<()> {
        if self.ids.is_empty() && self.edge_count == 0 {
            Err(Error::EmptyGraph)
        } else {
            Ok(())
        }
    }

    pub fn neighbors(&self, n: NodeIdx) -> &[NodeIdx] {
        &self.adj[n as usize]
    }

    pub fn degree(&self, n: NodeIdx) -> usize {
        self.adj[n as usize].len()
    }

    pub fn external_id(&self, n: NodeIdx) -> i64 {
        self.ids[n as usize]
    }

    /// External ids in internal order.
    pub fn external_ids(&self) -> &[i64] {
        &self.ids
    }

    pub fn internal_id(&self, id: i64) -> Result<NodeIdx> {
        self.index.get(&id).copied().ok_or(Error::UnknownNode(id))
    }

    pub(crate) fn check_node(&self, n: NodeIdx) -> Result<()> {
        if (n as usize) < self.ids.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(n as i64))
        }
    }

    pub fn has_edge(&self, a: NodeIdx, b: NodeIdx) -> bool {
        (a as usize) < self.adj.len() && self.adj[a as usize].binary_search(&b).is_ok()
    }

    pub fn contains(&self, key: EdgeKey) -> bool {
        self.has_edge(key.u, key.v)
    }

    /// Edge key for a pair of external ids.
    pub fn edge_key(&self, a: i64, b: i64) -> Result<EdgeKey> {
        let (ia, ib) = (self.internal_id(a)?, self.internal_id(b)?);
        if ia != ib && self.has_edge(ia, ib) {
            Ok(EdgeKey::new(ia, ib))
        } else {
            Err(Error::EdgeNotFound(a, b))
        }
    }

    /// All edges in ascending [`EdgeKey`] order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as NodeIdx;
            let start = list.partition_point(|&v| v < u);
            list[start..].iter().map(move |&v| EdgeKey { u, v })
        })
    }

    /// Edges as external-id pairs, in ascending [`EdgeKey`] order.
    pub fn external_edges(&self) -> Vec<(i64, i64)> {
        self.edges()
            .map(|e| (self.ids[e.u as usize], self.ids[e.v as usize]))
            .collect()
    }

    pub fn external_pair(&self, e: EdgeKey) -> (i64, i64) {
        (self.ids[e.u as usize], self.ids[e.v as usize])
    }

    /// Sorted common neighbors of `u` and `v`; the pair need not be an edge.
    pub fn common_neighbors(&self, u: NodeIdx, v: NodeIdx) -> Result<Vec<NodeIdx>> {
        self.check_node(u)?;
        self.check_node(v)?;
        let mut out = Vec::new();
        for_each_common(self.neighbors(u), self.neighbors(v), |w, _, _| out.push(w));
        Ok(out)
    }

    /// [`Graph::common_neighbors`] addressed by external ids.
    pub fn common_neighbors_by_id(&self, u: i64, v: i64) -> Result<Vec<i64>> {
        let common = self.common_neighbors(self.internal_id(u)?, self.internal_id(v)?)?;
        Ok(common.into_iter().map(|w| self.external_id(w)).collect())
    }

    /// Copy of the graph with one edge removed. The node set is unchanged.
    pub fn without_edge(&self, key: EdgeKey) -> Result<Graph> {
        let mut g = self.clone();
        if !g.remove_edge(key) {
            let (a, b) = self.external_pair_lossy(key);
            return Err(Error::EdgeNotFound(a, b));
        }
        Ok(g)
    }

    pub(crate) fn external_pair_lossy(&self, key: EdgeKey) -> (i64, i64) {
        let id = |n: NodeIdx| self.ids.get(n as usize).copied().unwrap_or(n as i64);
        (id(key.u), id(key.v))
    }

    pub(crate) fn remove_edge(&mut self, key: EdgeKey) -> bool {
        let (u, v) = (key.u as usize, key.v as usize);
        if v >= self.adj.len() {
            return false;
        }
        match self.adj[u].binary_search(&key.v) {
            Ok(i) => {
                self.adj[u].remove(i);
                let j = self.adj[v]
                    .binary_search(&key.u)
                    .expect("adjacency is symmetric");
                self.adj[v].remove(j);
                self.edge_count -= 1;
                true
            }
            Err(_) => false,
        }
    }

    /// Subgraph spanned by the selected edges. With `drop_isolated`, only nodes
    /// incident to a kept edge survive; otherwise the node set is unchanged.
    pub fn edge_subgraph<F>(&self, keep: F, drop_isolated: bool) -> Graph
    where
        F: Fn(EdgeKey) -> bool,
    {
        let mut adj: Vec<Vec<NodeIdx>> = self
            .adj
            .iter()
            .enumerate()
            .map(|(u, list)| {
                let u = u as NodeIdx;
                list.iter()
                    .copied()
                    .filter(|&v| keep(EdgeKey::new(u, v)))
                    .collect()
            })
            .collect();
        if !drop_isolated {
            return Graph::from_parts(self.ids.clone(), adj);
        }
        let mut remap = vec![NodeIdx::MAX; self.ids.len()];
        let mut ids = Vec::new();
        for (i, list) in adj.iter().enumerate() {
            if !list.is_empty() {
                remap[i] = ids.len() as NodeIdx;
                ids.push(self.ids[i]);
            }
        }
        adj.retain(|list| !list.is_empty());
        for list in &mut adj {
            for v in list.iter_mut() {
                *v = remap[*v as usize];
            }
        }
        Graph::from_parts(ids, adj)
    }

    /// Node sets of connected components, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<NodeIdx>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start as NodeIdx);
            let mut comp = Vec::new();
            while let Some(x) = stack.pop() {
                comp.push(x);
                for &y in self.neighbors(x) {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }
}

/// Calls `f(w, i, j)` for every `w` present in both sorted slices, where
/// `a[i] == b[j] == w`. Switches to binary search when one side is much longer.
pub(crate) fn for_each_common<F>(a: &[NodeIdx], b: &[NodeIdx], mut f: F)
where
    F: FnMut(NodeIdx, usize, usize),
{
    let (short, long, swapped) = if a.len() <= b.len() {
        (a, b, false)
    } else {
        (b, a, true)
    };
    if short.is_empty() {
        return;
    }
    if long.len() > 16 * short.len() {
        let mut lo = 0;
        for (i, &w) in short.iter().enumerate() {
            match long[lo..].binary_search(&w) {
                Ok(off) => {
                    let j = lo + off;
                    if swapped {
                        f(w, j, i)
                    } else {
                        f(w, i, j)
                    }
                    lo = j + 1;
                }
                Err(off) => lo += off,
            }
            if lo >= long.len() {
                break;
            }
        }
        return;
    }
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                f(a[i], i, j);
                i += 1;
                j += 1;
            }
        }
    }
}

/// A value per edge, stored densely in ascending [`EdgeKey`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap<T> {
    keys: Vec<EdgeKey>,
    values: Vec<T>,
}

impl<T> EdgeMap<T> {
    /// `keys` must be strictly ascending and the same length as `values`.
    pub(crate) fn from_sorted(keys: Vec<EdgeKey>, values: Vec<T>) -> Self {
        debug_assert_eq!(keys.len(), values.len());
        debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
        EdgeMap { keys, values }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub(crate) fn position(&self, key: EdgeKey) -> Option<usize> {
        self.keys.binary_search(&key).ok()
    }

    pub fn get(&self, key: EdgeKey) -> Option<&T> {
        self.position(key).map(|i| &self.values[i])
    }

    pub(crate) fn get_mut(&mut self, key: EdgeKey) -> Option<&mut T> {
        self.position(key).map(|i| &mut self.values[i])
    }

    pub(crate) fn remove(&mut self, key: EdgeKey) -> Option<T> {
        let i = self.position(key)?;
        self.keys.remove(i);
        Some(self.values.remove(i))
    }

    pub fn keys(&self) -> &[EdgeKey] {
        &self.keys
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeKey, &T)> + '_ {
        self.keys.iter().copied().zip(self.values.iter())
    }
}

/// Number of triangles containing each edge.
pub fn support(g: &Graph) -> EdgeMap<u32> {
    support_with(g, Exec::default())
}

pub fn support_with(g: &Graph, exec: Exec) -> EdgeMap<u32> {
    let per_node = par::map_range(g.node_count(), exec, |u| {
        let u = u as NodeIdx;
        let nu = g.neighbors(u);
        let start = nu.partition_point(|&v| v < u);
        nu[start..]
            .iter()
            .map(|&v| {
                let mut count = 0u32;
                for_each_common(nu, g.neighbors(v), |_, _, _| count += 1);
                count
            })
            .collect::<Vec<u32>>()
    });
    let values: Vec<u32> = per_node.into_iter().flatten().collect();
    EdgeMap::from_sorted(g.edges().collect(), values)
}

/// Total number of triangles in the graph.
pub fn triangle_count(g: &Graph) -> u64 {
    support(g).values().iter().map(|&s| s as u64).sum::<u64>() / 3
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

    #[test]
    fn normalizes_duplicates_and_self_loops() {
        let (g, report) = build_graph(&[(1, 2), (2, 1), (3, 3), (2, 3)]);
        assert_eq!(g.external_edges(), vec![(1, 2), (2, 3)]);
        assert_eq!(report.duplicate_edges, 1);
        assert_eq!(report.self_loops, 1);
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn declared_isolated_nodes() {
        let (g, _) = build_graph_with_nodes([1, 2, 3], std::iter::empty());
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 0);
        assert!(g.require_non_empty().is_ok());
        let (empty, _) = build_graph(&[]);
        assert!(matches!(empty.require_non_empty(), Err(Error::EmptyGraph)));
    }

    #[test]
    fn complete_graph_counts() {
        let g = complete(5);
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 10);
        assert!(support(&g).values().iter().all(|&s| s == 3));
        assert_eq!(triangle_count(&g), 10);
    }

    #[test]
    fn support_of_triangle_and_path() {
        let tri = Graph::from_edges(&[(1, 2), (2, 3), (1, 3)]);
        assert!(support(&tri).values().iter().all(|&s| s == 1));
        let path = Graph::from_edges(&[(1, 2), (2, 3), (3, 4)]);
        assert!(support(&path).values().iter().all(|&s| s == 0));
    }

    #[test]
    fn common_neighbor_queries() {
        let k4 = complete(4);
        assert_eq!(k4.common_neighbors_by_id(1, 3).unwrap(), vec![2, 4]);
        let path = Graph::from_edges(&[(1, 2), (2, 3), (3, 4)]);
        assert!(path.common_neighbors_by_id(2, 3).unwrap().is_empty());
        let k5_minus = Graph::from_edges(
            &complete(5)
                .external_edges()
                .into_iter()
                .filter(|&e| e != (1, 2))
                .collect::<Vec<_>>(),
        );
        assert_eq!(
            k5_minus.common_neighbors_by_id(1, 2).unwrap(),
            vec![3, 4, 5]
        );
        assert!(matches!(
            k5_minus.common_neighbors_by_id(1, 9),
            Err(Error::UnknownNode(9))
        ));
        assert!(k5_minus.common_neighbors(0, 17).is_err());
    }

    #[test]
    fn edge_key_is_canonical() {
        assert_eq!(EdgeKey::new(4, 1), EdgeKey::new(1, 4));
        assert_eq!(EdgeKey::new(4, 1).endpoints(), (1, 4));
    }

    #[test]
    fn galloping_intersection_matches_merge() {
        let long: Vec<NodeIdx> = (0..500).map(|x| x * 3).collect();
        let short = vec![0, 4, 9, 300, 1497, 2000];
        let mut got = Vec::new();
        for_each_common(&short, &long, |w, i, j| {
            assert_eq!(short[i], w);
            assert_eq!(long[j], w);
            got.push(w)
        });
        assert_eq!(got, vec![0, 9, 300, 1497]);
        let mut swapped = Vec::new();
        for_each_common(&long, &short, |w, i, j| {
            assert_eq!(long[i], w);
            assert_eq!(short[j], w);
            swapped.push(w)
        });
        assert_eq!(got, swapped);
    }

    #[test]
    fn subgraph_and_removal() {
        let g = Graph::from_edges(&[(1, 2), (2, 3), (3, 4), (7, 8)]);
        let key = g.edge_key(7, 8).unwrap();
        let h = g.without_edge(key).unwrap();
        assert_eq!(h.node_count(), 6);
        assert_eq!(h.edge_count(), 3);
        assert!(h.without_edge(key).is_err());
        let sub = g.edge_subgraph(|e| e != key, true);
        assert_eq!(sub.external_ids(), &[1, 2, 3, 4]);
        assert_eq!(g.connected_components().len(), 2);
    }
}
