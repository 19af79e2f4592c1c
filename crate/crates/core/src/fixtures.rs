//! Small hand-built graphs used by tests, examples and the CLI smoke runs.

use crate::graph::Graph;

/// Complete graph on external ids `1..=n`.
pub fn complete(n: i64) -> Graph {
    let mut pairs = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            pairs.push((a, b));
        }
    }
    Graph::from_edges(&pairs)
}

/// Path `1 - 2 - ... - n`.
pub fn path(n: i64) -> Graph {
    Graph::from_edges(&(1..n).map(|i| (i, i + 1)).collect::<Vec<_>>())
}

/// Star with center 0 and leaves `1..=leaves`.
pub fn star(leaves: i64) -> Graph {
    Graph::from_edges(&(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>())
}

/// Two triangles sharing the edge (1, 2).
pub fn bowtie() -> Graph {
    Graph::from_edges(&[(1, 2), (1, 3), (2, 3), (1, 4), (2, 4)])
}

/// A neighborhood with the strengths of the pruning walkthrough:
///
/// * node 2 has five incident edges, three of trussness 3 (a diamond on
///   2, 5, 6, 7) and two of trussness 2 (to 8 and 10), so its mean is 2.6;
/// * node 10 has two incident edges of trussness 2, mean 2;
/// * nodes 1 and 3 sit on a triangle with 4, every incident edge of
///   trussness 3, so both strengths are 3.
pub fn worked_neighborhood() -> Graph {
    Graph::from_edges(&[
        (1, 3),
        (1, 4),
        (3, 4),
        (4, 9),
        (2, 5),
        (2, 6),
        (5, 6),
        (2, 7),
        (6, 7),
        (2, 8),
        (2, 10),
        (9, 10),
    ])
}
