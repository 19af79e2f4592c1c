//! Oversmoothing diagnostics on linear feature propagation.
//!
//! Propagation applies the degree-normalized augmented adjacency
//! `D̃^(r-1) (A + I) D̃^(-r)` for `K` rounds with no weights or activations.
//! Its limit on a connected graph has the closed form
//! `Â∞[i][j] = (d_i + 1)^r (d_j + 1)^(1-r) / (2m + n)`, so every node ends up
//! a degree-scaled copy of the same blended vector. ANRD and ESM measure how
//! far along that collapse a node set is.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeIdx};
use crate::par::{self, Exec};
use crate::truss::truss_decompose;

/// Dense row-major matrix; one row per node in internal index order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite feature at row {}, column {}",
                bad / cols.max(1),
                bad % cols.max(1)
            )));
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        FeatureMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged feature rows".into()));
        }
        FeatureMatrix::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `a * self + b * other`.
    pub fn linear_combination(
        &self,
        a: f64,
        other: &FeatureMatrix,
        b: f64,
    ) -> Result<FeatureMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape {
                expected: self.rows,
                found: other.rows,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(FeatureMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &FeatureMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    fn from_row_vecs(rows: Vec<Vec<f64>>, cols: usize) -> Self {
        let n = rows.len();
        let data = rows.into_iter().flatten().collect();
        FeatureMatrix {
            rows: n,
            cols,
            data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub layers: usize,
    /// Convolution coefficient `r` in `[0, 1]`.
    pub coeff: f64,
    pub self_loops: bool,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            layers: 2,
            coeff: 0.5,
            self_loops: true,
        }
    }
}

impl PropagationConfig {
    pub fn new(layers: usize, coeff: f64) -> Self {
        PropagationConfig {
            layers,
            coeff,
            self_loops: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_coeff(self.coeff)
    }
}

fn check_coeff(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "coefficient must lie in [0, 1], got {r}"
        )))
    }
}

fn check_rows(g: &Graph, x: &FeatureMatrix) -> Result<()> {
    if x.rows() != g.node_count() {
        return Err(Error::Shape {
            expected: g.node_count(),
            found: x.rows(),
        });
    }
    Ok(())
}

/// `Â^K x`. Without self-loops an isolated node's row becomes zero.
pub fn propagate(g: &Graph, x: &FeatureMatrix, cfg: &PropagationConfig) -> Result<FeatureMatrix> {
    propagate_with(g, x, cfg, Exec::default())
}

pub fn propagate_with(
    g: &Graph,
    x: &FeatureMatrix,
    cfg: &PropagationConfig,
    exec: Exec,
) -> Result<FeatureMatrix> {
    check_rows(g, x)?;
    cfg.validate()?;
    let r = cfg.coeff;
    let loop_weight = if cfg.self_loops { 1.0 } else { 0.0 };
    let n = g.node_count();
    let deg: Vec<f64> = (0..n)
        .map(|i| g.degree(i as NodeIdx) as f64 + loop_weight)
        .collect();
    let scale = |d: f64, p: f64| if d > 0.0 { d.powf(p) } else { 0.0 };
    let left: Vec<f64> = deg.iter().map(|&d| scale(d, r - 1.0)).collect();
    let right: Vec<f64> = deg.iter().map(|&d| scale(d, -r)).collect();

    let cols = x.cols();
    let mut cur = x.clone();
    for _ in 0..cfg.layers {
        let rows = par::map_range(n, exec, |i| {
            let mut acc = vec![0.0; cols];
            if cfg.self_loops {
                axpy(&mut acc, right[i], cur.row(i));
            }
            for &j in g.neighbors(i as NodeIdx) {
                axpy(&mut acc, right[j as usize], cur.row(j as usize));
            }
            for a in &mut acc {
                *a *= left[i];
            }
            acc
        });
        cur = FeatureMatrix::from_row_vecs(rows, cols);
    }
    Ok(cur)
}

fn axpy(acc: &mut [f64], a: f64, x: &[f64]) {
    for (y, v) in acc.iter_mut().zip(x) {
        *y += a * v;
    }
}

/// Closed-form limit `Â∞ x`, applied per connected component.
pub fn steady_state(g: &Graph, x: &FeatureMatrix, r: f64) -> Result<FeatureMatrix> {
    check_rows(g, x)?;
    check_coeff(r)?;
    let cols = x.cols();
    let mut out = FeatureMatrix::zeros(x.rows(), cols);
    for comp in g.connected_components() {
        // 2m + n over the component is the sum of augmented degrees.
        let norm: f64 = comp.iter().map(|&j| g.degree(j) as f64 + 1.0).sum();
        let mut blend = vec![0.0; cols];
        for &j in &comp {
            let w = (g.degree(j) as f64 + 1.0).powf(1.0 - r) / norm;
            axpy(&mut blend, w, x.row(j as usize));
        }
        for &i in &comp {
            let s = (g.degree(i) as f64 + 1.0).powf(r);
            let row = &mut out.data[i as usize * cols..(i as usize + 1) * cols];
            for (o, b) in row.iter_mut().zip(&blend) {
                *o = s * b;
            }
        }
    }
    Ok(out)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Average node representation distance: mean Euclidean distance over all
/// unordered pairs of rows in `region`.
pub fn anrd(x: &FeatureMatrix, region: &[NodeIdx]) -> Result<f64> {
    anrd_with(x, region, Exec::default())
}

pub fn anrd_with(x: &FeatureMatrix, region: &[NodeIdx], exec: Exec) -> Result<f64> {
    if region.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "ANRD needs at least two nodes, got {}",
            region.len()
        )));
    }
    if let Some(&bad) = region.iter().find(|&&i| i as usize >= x.rows()) {
        return Err(Error::UnknownNode(bad as i64));
    }
    let partial = par::map_range(region.len(), exec, |a| {
        let ra = x.row(region[a] as usize);
        region[a + 1..]
            .iter()
            .map(|&b| distance(ra, x.row(b as usize)))
            .sum::<f64>()
    });
    let pairs = region.len() * (region.len() - 1) / 2;
    Ok(partial.iter().sum::<f64>() / pairs as f64)
}

/// Embedding space matrix: pairwise Euclidean distances between rows.
pub fn esm(x: &FeatureMatrix) -> FeatureMatrix {
    esm_with(x, Exec::default())
}

pub fn esm_with(x: &FeatureMatrix, exec: Exec) -> FeatureMatrix {
    let n = x.rows();
    let rows = par::map_range(n, exec, |i| {
        (0..n)
            .map(|j| {
                if i == j {
                    0.0
                } else {
                    distance(x.row(i), x.row(j))
                }
            })
            .collect()
    });
    FeatureMatrix::from_row_vecs(rows, n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnrdRow {
    pub k: u32,
    pub layers: usize,
    pub region_size: usize,
    pub anrd: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnrdProfile {
    pub rows: Vec<AnrdRow>,
    /// Regions skipped for having fewer than two nodes.
    pub notices: Vec<String>,
}

/// ANRD of every k-truss node set after each requested number of layers.
/// `cfg.layers` is ignored; `layer_range` supplies the layer counts.
pub fn truss_region_anrd_profile(
    g: &Graph,
    x: &FeatureMatrix,
    k_values: &[u32],
    layer_range: &[usize],
    cfg: &PropagationConfig,
) -> Result<AnrdProfile> {
    check_rows(g, x)?;
    cfg.validate()?;
    if let Some(&k) = k_values.iter().find(|&&k| k < 2) {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    let t = truss_decompose(g);
    let mut profile = AnrdProfile::default();
    let mut regions = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let nodes = t.region_nodes(k);
        if nodes.len() < 2 {
            profile.notices.push(format!(
                "{k}-truss has {} node(s); no ANRD rows",
                nodes.len()
            ));
        }
        regions.push(nodes);
    }

    let mut sorted: Vec<usize> = layer_range.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut cache: Vec<(usize, FeatureMatrix)> = Vec::with_capacity(sorted.len());
    let mut cur = x.clone();
    let mut done = 0;
    for &layers in &sorted {
        let step = PropagationConfig {
            layers: layers - done,
            ..*cfg
        };
        cur = propagate(g, &cur, &step)?;
        done = layers;
        cache.push((layers, cur.clone()));
    }

    for &layers in layer_range {
        let h = &cache[cache.binary_search_by_key(&layers, |c| c.0).unwrap()].1;
        for (&k, nodes) in k_values.iter().zip(&regions) {
            if nodes.len() < 2 {
                continue;
            }
            profile.rows.push(AnrdRow {
                k,
                layers,
                region_size: nodes.len(),
                anrd: anrd(h, nodes)?,
            });
        }
    }
    Ok(profile)
}

/// Where diagnostic features came from; recorded alongside outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureSource {
    /// One-hot degree with degrees above `cap` sharing the last column.
    DegreeOneHot { cap: usize },
    /// Uniform `[0, 1)` entries.
    Random { dim: usize, seed: u64 },
    /// One-hot node labels, columns in ascending label order.
    NodeLabels { classes: usize },
}

pub fn degree_one_hot(g: &Graph, cap: usize) -> FeatureMatrix {
    let n = g.node_count();
    let mut x = FeatureMatrix::zeros(n, cap + 1);
    for i in 0..n {
        let d = g.degree(i as NodeIdx).min(cap);
        x.data[i * (cap + 1) + d] = 1.0;
    }
    x
}

pub fn random_features(rows: usize, dim: usize, seed: u64) -> FeatureMatrix {
    use rand::Rng;
    let mut rng = crate::random::rng(seed);
    let data = (0..rows * dim).map(|_| rng.gen::<f64>()).collect();
    FeatureMatrix {
        rows,
        cols: dim,
        data,
    }
}

pub fn label_one_hot(labels: &[i64]) -> FeatureMatrix {
    let mut classes: Vec<i64> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut x = FeatureMatrix::zeros(labels.len(), classes.len());
    for (i, l) in labels.iter().enumerate() {
        let c = classes.binary_search(l).unwrap();
        x.data[i * classes.len() + c] = 1.0;
    }
    x
}
