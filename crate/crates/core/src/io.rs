//! File formats and dataset-level batch processing.
//!
//! * TU datasets: `NAME_A.txt` (`i, j` per line, 1-indexed global node ids),
//!   `NAME_graph_indicator.txt` (graph id of node `i` on line `i`),
//!   optional `NAME_graph_labels.txt` and `NAME_node_labels.txt`.
//! * Edge lists: `u v` per line, `#` starts a comment line.
//! * Weighted edge lists: `u v k` per line, `k` being the edge trussness.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph_with_nodes, Graph, LoadReport};
use crate::par::{self, Exec};
use crate::sparsify::{tgs_sparsify, SparsifyConfig};
use crate::truss::TrussMap;

/// A multi-graph classification dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub name: String,
    pub graphs: Vec<Graph>,
    /// One class label per graph.
    pub labels: Vec<i64>,
    /// Per graph, one label per node in internal index order.
    pub node_labels: Option<Vec<Vec<i64>>>,
}

impl DatasetBundle {
    pub fn new(name: impl Into<String>) -> Self {
        DatasetBundle {
            name: name.into(),
            graphs: Vec::new(),
            labels: Vec::new(),
            node_labels: None,
        }
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn class_count(&self) -> usize {
        let mut l = self.labels.clone();
        l.sort_unstable();
        l.dedup();
        l.len()
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn tu_path(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}_{suffix}.txt"))
}

/// Non-empty lines with their 1-based line numbers, trimmed of whitespace
/// and carriage returns.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_int(path: &Path, line: usize, token: &str) -> Result<i64> {
    token
        .trim()
        .parse::<i64>()
        .map_err(|_| Error::format(path, line, format!("expected an integer, found {token:?}")))
}

fn read_int_column(path: &Path) -> Result<Vec<i64>> {
    let text = read_file(path)?;
    content_lines(&text)
        .map(|(line, l)| {
            let first = l.split(',').next().unwrap_or(l);
            parse_int(path, line, first)
        })
        .collect()
}

/// Reads a TU-format dataset from `dir`.
pub fn read_tu_dataset(dir: impl AsRef<Path>, name: &str) -> Result<DatasetBundle> {
    let dir = dir.as_ref();
    let indicator_path = tu_path(dir, name, "graph_indicator");
    let indicator = read_int_column(&indicator_path)?;
    let node_total = indicator.len();
    let graph_total = indicator.iter().copied().max().unwrap_or(0);
    if let Some(pos) = indicator.iter().position(|&g| g < 1) {
        return Err(Error::format(
            &indicator_path,
            pos + 1,
            "graph ids start at 1",
        ));
    }
    let graph_total = graph_total as usize;

    let mut nodes: Vec<Vec<i64>> = vec![Vec::new(); graph_total];
    for (i, &gid) in indicator.iter().enumerate() {
        nodes[gid as usize - 1].push(i as i64 + 1);
    }
    let mut edges: Vec<Vec<(i64, i64)>> = vec![Vec::new(); graph_total];

    let a_path = tu_path(dir, name, "A");
    let a_text = read_file(&a_path)?;
    for (line, l) in content_lines(&a_text) {
        let mut parts = l.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::format(
                &a_path,
                line,
                format!("expected \"i, j\", found {l:?}"),
            ));
        };
        let (a, b) = (parse_int(&a_path, line, a)?, parse_int(&a_path, line, b)?);
        for id in [a, b] {
            if id < 1 || id as usize > node_total {
                return Err(Error::format(
                    &a_path,
                    line,
                    format!("node {id} out of range 1..={node_total}"),
                ));
            }
        }
        let (ga, gb) = (indicator[a as usize - 1], indicator[b as usize - 1]);
        if ga != gb {
            return Err(Error::format(
                &a_path,
                line,
                format!("edge ({a}, {b}) joins graphs {ga} and {gb}"),
            ));
        }
        edges[ga as usize - 1].push((a, b));
    }

    let graphs: Vec<Graph> = nodes
        .iter()
        .zip(edges)
        .map(|(n, e)| build_graph_with_nodes(n.iter().copied(), e).0)
        .collect();

    let labels_path = tu_path(dir, name, "graph_labels");
    let labels = if labels_path.exists() {
        let labels = read_int_column(&labels_path)?;
        if labels.len() != graph_total {
            return Err(Error::format(
                &labels_path,
                labels.len(),
                format!("{} labels for {graph_total} graphs", labels.len()),
            ));
        }
        labels
    } else {
        log::warn!(
            "{} not found; labelling every graph 0",
            labels_path.display()
        );
        vec![0; graph_total]
    };

    let node_labels_path = tu_path(dir, name, "node_labels");
    let node_labels = if node_labels_path.exists() {
        let flat = read_int_column(&node_labels_path)?;
        if flat.len() != node_total {
            return Err(Error::format(
                &node_labels_path,
                flat.len(),
                format!("{} node labels for {node_total} nodes", flat.len()),
            ));
        }
        Some(
            nodes
                .iter()
                .map(|ids| ids.iter().map(|&id| flat[id as usize - 1]).collect())
                .collect(),
        )
    } else {
        None
    };

    Ok(DatasetBundle {
        name: name.to_string(),
        graphs,
        labels,
        node_labels,
    })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<fs::File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `bundle` in TU format under `dir` (created if missing). Nodes are
/// renumbered consecutively, graph by graph, in internal index order; a
/// bundle read by [`read_tu_dataset`] keeps its ids.
pub fn write_tu_dataset(dir: impl AsRef<Path>, bundle: &DatasetBundle) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = &bundle.name;

    let a_path = tu_path(dir, name, "A");
    let ind_path = tu_path(dir, name, "graph_indicator");
    let mut a = create(&a_path)?;
    let mut ind = create(&ind_path)?;
    let mut offset = 0i64;
    for (gi, g) in bundle.graphs.iter().enumerate() {
        for _ in 0..g.node_count() {
            writeln!(ind, "{}", gi + 1).map_err(|e| Error::io(&ind_path, e))?;
        }
        let mut directed: Vec<(i64, i64)> = g
            .edges()
            .flat_map(|e| {
                let (u, v) = (offset + e.u() as i64 + 1, offset + e.v() as i64 + 1);
                [(u, v), (v, u)]
            })
            .collect();
        directed.sort_unstable();
        for (u, v) in directed {
            writeln!(a, "{u}, {v}").map_err(|e| Error::io(&a_path, e))?;
        }
        offset += g.node_count() as i64;
    }
    finish(&a_path, a)?;
    finish(&ind_path, ind)?;

    let labels_path = tu_path(dir, name, "graph_labels");
    let mut lw = create(&labels_path)?;
    for l in &bundle.labels {
        writeln!(lw, "{l}").map_err(|e| Error::io(&labels_path, e))?;
    }
    finish(&labels_path, lw)?;

    if let Some(node_labels) = &bundle.node_labels {
        let path = tu_path(dir, name, "node_labels");
        let mut w = create(&path)?;
        for l in node_labels.iter().flatten() {
            writeln!(w, "{l}").map_err(|e| Error::io(&path, e))?;
        }
        finish(&path, w)?;
    }
    Ok(())
}

/// Parses `u v` lines; `path` is only used for error messages.
pub fn parse_edge_list(text: &str, path: &Path) -> Result<(Graph, LoadReport)> {
    let mut pairs = Vec::new();
    for (line, l) in content_lines(text) {
        if l.starts_with('#') {
            continue;
        }
        let mut tokens = l.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::format(
                path,
                line,
                format!("expected \"u v\", found {l:?}"),
            ));
        };
        pairs.push((parse_int(path, line, a)?, parse_int(path, line, b)?));
    }
    Ok(build_graph_with_nodes(std::iter::empty(), pairs))
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let (g, report) = parse_edge_list(&read_file(path)?, path)?;
    if report != LoadReport::default() {
        log::info!(
            "{}: dropped {} duplicate edge(s) and {} self-loop(s)",
            path.display(),
            report.duplicate_edges,
            report.self_loops
        );
    }
    Ok(g)
}

/// Writes `u v` lines in external ids, sorted by edge key. Isolated nodes
/// are not representable in this format.
pub fn write_edge_list(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for (u, v) in g.external_edges() {
        writeln!(w, "{u} {v}").map_err(|e| Error::io(path, e))?;
    }
    finish(path, w)
}

/// Writes `u v k` lines, `k` being the trussness of the edge.
pub fn write_weighted_edge_list(path: impl AsRef<Path>, g: &Graph, t: &TrussMap) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for e in g.edges() {
        let k = t.lookup(g, e)?;
        let (u, v) = g.external_pair(e);
        writeln!(w, "{u} {v} {k}").map_err(|e| Error::io(path, e))?;
    }
    finish(path, w)
}

/// Reads a file written by [`write_weighted_edge_list`].
pub fn read_weighted_edge_list(path: impl AsRef<Path>) -> Result<(Graph, TrussMap)> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let mut rows = Vec::new();
    for (line, l) in content_lines(&text) {
        if l.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = l.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::format(
                path,
                line,
                format!("expected \"u v k\", found {l:?}"),
            ));
        }
        let k = parse_int(path, line, tokens[2])?;
        if k < 2 {
            return Err(Error::format(
                path,
                line,
                format!("trussness {k} is below 2"),
            ));
        }
        rows.push((
            line,
            parse_int(path, line, tokens[0])?,
            parse_int(path, line, tokens[1])?,
            k as u32,
        ));
    }
    let (g, _) = build_graph_with_nodes(std::iter::empty(), rows.iter().map(|r| (r.1, r.2)));
    let mut values = vec![0u32; g.edge_count()];
    let keys: Vec<_> = g.edges().collect();
    for &(line, a, b, k) in &rows {
        let key = g
            .edge_key(a, b)
            .map_err(|_| Error::format(path, line, format!("self-loop ({a}, {b})")))?;
        let i = keys.binary_search(&key).expect("edge was just inserted");
        if values[i] != 0 && values[i] != k {
            return Err(Error::format(
                path,
                line,
                format!("conflicting weights for ({a}, {b})"),
            ));
        }
        values[i] = k;
    }
    let t = TrussMap::from_parts(keys, values);
    Ok((g, t))
}

/// Outcome of [`batch_sparsify`] across a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub dataset: String,
    pub config: SparsifyConfig,
    pub graphs: usize,
    pub total_edges_before: usize,
    pub total_edges_after: usize,
    pub pruned_per_graph: Vec<usize>,
    pub pruning_rates: Vec<f64>,
    /// Excluded from the JSON so repeated runs produce identical files.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl BatchReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }
}

/// Sparsifies every graph independently; labels are carried through.
pub fn batch_sparsify(
    bundle: &DatasetBundle,
    cfg: &SparsifyConfig,
) -> Result<(DatasetBundle, BatchReport)> {
    batch_sparsify_with(bundle, cfg, Exec::default())
}

pub fn batch_sparsify_with(
    bundle: &DatasetBundle,
    cfg: &SparsifyConfig,
    exec: Exec,
) -> Result<(DatasetBundle, BatchReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let results = par::map_slice(&bundle.graphs, exec, |g| tgs_sparsify(g, cfg));
    let mut graphs = Vec::with_capacity(results.len());
    let mut pruned_per_graph = Vec::with_capacity(results.len());
    let mut pruning_rates = Vec::with_capacity(results.len());
    for r in results {
        let (g, report) = r?;
        pruned_per_graph.push(report.pruned_count);
        pruning_rates.push(report.pruning_rate);
        graphs.push(g);
    }
    let report = BatchReport {
        dataset: bundle.name.clone(),
        config: *cfg,
        graphs: graphs.len(),
        total_edges_before: bundle.graphs.iter().map(Graph::edge_count).sum(),
        total_edges_after: graphs.iter().map(Graph::edge_count).sum(),
        pruned_per_graph,
        pruning_rates,
        wall_time: start.elapsed(),
    };
    let out = DatasetBundle {
        name: bundle.name.clone(),
        graphs,
        labels: bundle.labels.clone(),
        node_labels: bundle.node_labels.clone(),
    };
    Ok((out, report))
}

/// Writes rows as CSV with a header derived from the field names.
pub fn write_csv<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Serialize(format!("{other:?}")),
    }
}

/// Writes a square matrix as headerless CSV.
pub fn write_matrix_csv(
    path: impl AsRef<Path>,
    m: &crate::diagnostics::FeatureMatrix,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(",")).map_err(|e| Error::io(path, e))?;
    }
    finish(path, w)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Error::Serialize(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truss::truss_decompose;

    fn write(dir: &Path, file: &str, body: &str) {
        fs::write(dir.join(file), body).unwrap();
    }

    fn two_graph_fixture(dir: &Path) {
        // Graph 1: triangle on 1..3. Graph 2: path 4-5-6.
        write(
            dir,
            "T_A.txt",
            "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n5, 6\r\n6, 5  \n",
        );
        write(dir, "T_graph_indicator.txt", "1\n1\n1\n2\n2\n2\n");
        write(dir, "T_graph_labels.txt", "0\n1\n");
    }

    #[test]
    fn reads_tu_fixture() {
        let dir = tempfile::tempdir().unwrap();
        two_graph_fixture(dir.path());
        let b = read_tu_dataset(dir.path(), "T").unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.graphs[0].edge_count(), 3);
        assert_eq!(b.graphs[1].edge_count(), 2);
        assert_eq!(b.graphs[1].external_ids(), &[4, 5, 6]);
        assert_eq!(b.labels, vec![0, 1]);
        assert!(b.node_labels.is_none());
        assert_eq!(b.class_count(), 2);
    }

    #[test]
    fn tu_errors_name_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let err = read_tu_dataset(dir.path(), "T").unwrap_err();
        assert!(err.to_string().contains("T_graph_indicator.txt"), "{err}");

        write(dir.path(), "T_graph_indicator.txt", "1\n1\n");
        write(dir.path(), "T_A.txt", "1, 2\n2, 7\n");
        match read_tu_dataset(dir.path(), "T").unwrap_err() {
            Error::Format { line, path, .. } => {
                assert_eq!(line, 2);
                assert!(path.ends_with("T_A.txt"));
            }
            other => panic!("unexpected {other}"),
        }
        write(dir.path(), "T_A.txt", "1, x\n");
        assert!(matches!(
            read_tu_dataset(dir.path(), "T"),
            Err(Error::Format { line: 1, .. })
        ));
    }

    #[test]
    fn edge_list_parsing() {
        let p = Path::new("mem");
        let (g, _) = parse_edge_list("1 2\n2 3\n", p).unwrap();
        assert_eq!(g.external_edges(), vec![(1, 2), (2, 3)]);
        let (g, _) = parse_edge_list("# comment\n1 2\n", p).unwrap();
        assert_eq!(g.edge_count(), 1);
        let (g, _) = parse_edge_list("", p).unwrap();
        assert!(g.is_empty());
        assert!(matches!(
            parse_edge_list("1 2\n3 z\n", p),
            Err(Error::Format { line: 2, .. })
        ));
    }

    #[test]
    fn weighted_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.txt");
        let tri = crate::fixtures::complete(3);
        let t = truss_decompose(&tri);
        write_weighted_edge_list(&path, &tri, &t).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "1 2 3\n1 3 3\n2 3 3\n");
        let (g2, t2) = read_weighted_edge_list(&path).unwrap();
        assert_eq!(g2, tri);
        assert_eq!(t2, t);

        let (empty, _) = crate::graph::build_graph(&[]);
        write_weighted_edge_list(&path, &empty, &truss_decompose(&empty)).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "");
    }

    #[test]
    fn batch_on_empty_bundle() {
        let (out, report) =
            batch_sparsify(&DatasetBundle::new("E"), &SparsifyConfig::new(3, 3.0)).unwrap();
        assert!(out.is_empty());
        assert_eq!(
            (
                report.graphs,
                report.total_edges_before,
                report.total_edges_after
            ),
            (0, 0, 0)
        );
        assert!(!report.to_json().unwrap().contains("wall"));
    }
}
