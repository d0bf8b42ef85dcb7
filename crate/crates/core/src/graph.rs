//! Sparse undirected graphs with node features and labels.
//!
//! Adjacency is kept as sorted neighbor lists. Every node carries a sparse
//! feature row and a class label. Nodes with index `>= original_nodes()` were
//! added by injection and may only link to original nodes.

use std::collections::VecDeque;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::split::DataSplit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Binary,
    Continuous,
}

/// Row-compressed non-negative feature matrix. Explicit zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_rows<I>(dim: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<(usize, f64)>>,
    {
        let mut m = Self::new(dim);
        for row in rows {
            m.push_row(row)?;
        }
        Ok(m)
    }

    pub fn from_dense(dense: &Array2<f64>) -> Result<Self> {
        let dim = dense.ncols();
        Self::from_rows(
            dim,
            dense.rows().into_iter().map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j, v))
                    .collect()
            }),
        )
    }

    /// Appends a row. Entries may come in any order; zeros are dropped.
    pub fn push_row(&mut self, mut entries: Vec<(usize, f64)>) -> Result<()> {
        entries.retain(|&(_, v)| v != 0.0);
        entries.sort_by_key(|&(j, _)| j);
        let row = self.rows();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidGraph(format!(
                    "feature row {row} repeats index {}",
                    w[0].0
                )));
            }
        }
        for &(j, v) in &entries {
            if j >= self.dim {
                return Err(Error::InvalidGraph(format!(
                    "feature row {row} has index {j} >= dimension {}",
                    self.dim
                )));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "feature row {row} has invalid value {v} at index {j}"
                )));
            }
            self.indices.push(j);
            self.values.push(v);
        }
        self.indptr.push(self.indices.len());
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row_nnz(&self, v: usize) -> usize {
        self.indptr[v + 1] - self.indptr[v]
    }

    pub fn row(&self, v: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[v], self.indptr[v + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, v: usize, j: usize) -> f64 {
        let (idx, val) = self.row(v);
        idx.binary_search(&j).map(|p| val[p]).unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows(), self.dim));
        for v in 0..self.rows() {
            let (idx, val) = self.row(v);
            for (&j, &x) in idx.iter().zip(val) {
                out[[v, j]] = x;
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut out = Self::new(self.dim);
        for &v in rows {
            let (idx, val) = self.row(v);
            out.indices.extend_from_slice(idx);
            out.values.extend_from_slice(val);
            out.indptr.push(out.indices.len());
        }
        out
    }

    /// Same sparsity pattern with every stored value multiplied by `scales`
    /// (one entry per stored non-zero). Zeros produced here stay stored.
    pub(crate) fn scaled(&self, scales: &[f64]) -> Self {
        assert_eq!(scales.len(), self.nnz());
        Self {
            dim: self.dim,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().zip(scales).map(|(v, s)| v * s).collect(),
        }
    }

    /// `X · W` for dense `W` of shape `dim × k`.
    pub fn matmul(&self, w: &Array2<f64>) -> Array2<f64> {
        assert_eq!(w.nrows(), self.dim, "feature/weight dimension mismatch");
        let k = w.ncols();
        let mut out = Array2::zeros((self.rows(), k));
        out.axis_iter_mut(ndarray::Axis(0))
            .into_par_iter()
            .enumerate()
            .for_each(|(v, mut out_row)| {
                let (idx, val) = self.row(v);
                for (&j, &x) in idx.iter().zip(val) {
                    out_row.scaled_add(x, &w.row(j));
                }
            });
        out
    }

    /// `Xᵀ · G` restricted to the rows listed in `rows` (all rows if `None`).
    pub fn transpose_matmul(&self, g: &Array2<f64>, rows: Option<&[usize]>) -> Array2<f64> {
        let k = g.ncols();
        let mut out = Array2::zeros((self.dim, k));
        let mut accumulate = |v: usize| {
            let (idx, val) = self.row(v);
            let g_row = g.row(v);
            for (&j, &x) in idx.iter().zip(val) {
                out.row_mut(j).scaled_add(x, &g_row);
            }
        };
        match rows {
            Some(rows) => rows.iter().for_each(|&v| accumulate(v)),
            None => (0..self.rows()).for_each(accumulate),
        }
        out
    }
}

/// Read-only neighborhood access shared by concrete graphs and injection overlays.
pub trait Adjacency: Sync {
    fn node_count(&self) -> usize;
    fn degree(&self, v: usize) -> usize;
    /// Visits neighbors of `v` in ascending order.
    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, f: F);
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    num_edges: usize,
    features: FeatureMatrix,
    labels: Vec<usize>,
    num_classes: usize,
    feature_kind: FeatureKind,
    original_nodes: usize,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Each edge must appear once
    /// (in either orientation); self-loops are rejected.
    pub fn new(
        num_nodes: usize,
        edges: &[(usize, usize)],
        features: FeatureMatrix,
        labels: Vec<usize>,
        feature_kind: FeatureKind,
    ) -> Result<Self> {
        if features.rows() != num_nodes {
            return Err(Error::InvalidGraph(format!(
                "{} feature rows for {num_nodes} nodes",
                features.rows()
            )));
        }
        if labels.len() != num_nodes {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {num_nodes} nodes",
                labels.len()
            )));
        }
        let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; num_classes];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidGraph(format!(
                "labels are not contiguous: class {missing} is unused but {} exists",
                num_classes - 1
            )));
        }
        if feature_kind == FeatureKind::Binary {
            if let Some(p) = features.values.iter().position(|&v| v != 1.0) {
                return Err(Error::InvalidGraph(format!(
                    "binary feature matrix holds value {}",
                    features.values[p]
                )));
            }
        }

        let mut adjacency = vec![Vec::new(); num_nodes];
        for &(u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {num_nodes} nodes"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    u.min(w[0]),
                    u.max(w[0])
                )));
            }
        }
        Ok(Self {
            adjacency,
            num_edges: edges.len(),
            features,
            labels,
            num_classes,
            feature_kind,
            original_nodes: num_nodes,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn num_features(&self) -> usize {
        self.features.dim()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn feature_kind(&self) -> FeatureKind {
        self.feature_kind
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of nodes present before any injection.
    pub fn original_nodes(&self) -> usize {
        self.original_nodes
    }

    pub fn is_injected(&self, v: usize) -> bool {
        v >= self.original_nodes
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn average_degree(&self) -> f64 {
        if self.num_nodes() == 0 {
            0.0
        } else {
            2.0 * self.num_edges as f64 / self.num_nodes() as f64
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Undirected edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Returns the same graph with a different edge set; nodes, features and labels are kept.
    pub fn with_edges(&self, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(
            self.num_nodes(),
            edges,
            self.features.clone(),
            self.labels.clone(),
            self.feature_kind,
        )?;
        g.num_classes = self.num_classes;
        g.original_nodes = self.original_nodes;
        Ok(g)
    }

    /// Subgraph induced by `nodes` (ascending, distinct), reindexed in that order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.num_nodes()];
        for (new, &old) in nodes.iter().enumerate() {
            map[old] = new;
        }
        let mut num_edges = 0;
        let adjacency: Vec<Vec<usize>> = nodes
            .iter()
            .map(|&old| {
                let list: Vec<usize> = self.adjacency[old]
                    .iter()
                    .filter_map(|&w| (map[w] != usize::MAX).then_some(map[w]))
                    .collect();
                num_edges += list.len();
                list
            })
            .collect();
        let original_nodes = nodes.iter().filter(|&&v| v < self.original_nodes).count();
        Self {
            adjacency,
            num_edges: num_edges / 2,
            features: self.features.select_rows(nodes),
            labels: nodes.iter().map(|&v| self.labels[v]).collect(),
            num_classes: self.num_classes,
            feature_kind: self.feature_kind,
            original_nodes,
        }
    }

    /// The graph as it was before any injection.
    pub fn original_graph(&self) -> Self {
        let nodes: Vec<usize> = (0..self.original_nodes).collect();
        self.induced_subgraph(&nodes)
    }

    /// Marks nodes `original_nodes..` as injected, as when reloading a saved
    /// perturbed graph. Injected nodes may not link to each other.
    pub fn with_original_nodes(mut self, original_nodes: usize) -> Result<Self> {
        if original_nodes > self.num_nodes() {
            return Err(Error::InvalidGraph(format!(
                "{original_nodes} original nodes declared for a graph of {} nodes",
                self.num_nodes()
            )));
        }
        for v in original_nodes..self.num_nodes() {
            if let Some(&u) = self.adjacency[v].iter().find(|&&u| u >= original_nodes) {
                return Err(Error::InvalidGraph(format!("injected nodes {v} and {u} are linked")));
            }
        }
        self.original_nodes = original_nodes;
        Ok(self)
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut members = Vec::new();
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }
}

impl Adjacency for Graph {
    fn node_count(&self) -> usize {
        self.num_nodes()
    }

    fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, f: F) {
        self.adjacency[v].iter().copied().for_each(f)
    }
}

/// A graph plus one pending injected node (index `base.num_nodes()`) linked to
/// `endpoints`, viewed without materializing a new graph.
#[derive(Debug, Clone, Copy)]
pub struct InjectionOverlay<'a> {
    base: &'a Graph,
    endpoints: &'a [usize],
}

impl<'a> InjectionOverlay<'a> {
    /// `endpoints` must be sorted, distinct and refer to nodes of `base`.
    pub fn new(base: &'a Graph, endpoints: &'a [usize]) -> Self {
        debug_assert!(endpoints.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(endpoints.iter().all(|&e| e < base.num_nodes()));
        Self { base, endpoints }
    }

    pub fn injected(&self) -> usize {
        self.base.num_nodes()
    }

    pub fn endpoints(&self) -> &[usize] {
        self.endpoints
    }

    fn is_endpoint(&self, v: usize) -> bool {
        self.endpoints.binary_search(&v).is_ok()
    }
}

impl Adjacency for InjectionOverlay<'_> {
    fn node_count(&self) -> usize {
        self.base.num_nodes() + 1
    }

    fn degree(&self, v: usize) -> usize {
        if v == self.injected() {
            self.endpoints.len()
        } else {
            self.base.degree(v) + usize::from(self.is_endpoint(v))
        }
    }

    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, mut f: F) {
        if v == self.injected() {
            self.endpoints.iter().copied().for_each(f);
        } else {
            self.base.for_each_neighbor(v, &mut f);
            if self.is_endpoint(v) {
                f(self.injected());
            }
        }
    }
}

/// `1 / sqrt(deg(v) + 1)`: the symmetric normalization factor of `A + I`.
#[inline]
pub fn inv_sqrt_degree<A: Adjacency>(adj: &A, v: usize) -> f64 {
    1.0 / ((adj.degree(v) + 1) as f64).sqrt()
}

/// One row of `Â · H`, summing the self term first and then neighbors in
/// ascending order. Every propagation path in the crate goes through this
/// summation order so incremental and full recomputation agree bit for bit.
#[inline]
pub fn propagate_row<'r, A, R>(adj: &A, v: usize, input: R, out: &mut [f64])
where
    A: Adjacency,
    R: Fn(usize) -> &'r [f64],
{
    out.fill(0.0);
    let sv = inv_sqrt_degree(adj, v);
    let mut add = |u: usize| {
        let coef = sv * inv_sqrt_degree(adj, u);
        for (o, &x) in out.iter_mut().zip(input(u)) {
            *o += coef * x;
        }
    };
    add(v);
    adj.for_each_neighbor(v, add);
}

/// `Â · H` for a dense `H` with one row per node.
pub fn propagate<A: Adjacency>(adj: &A, input: &Array2<f64>) -> Array2<f64> {
    assert_eq!(input.nrows(), adj.node_count(), "row count mismatch");
    let input = input.as_standard_layout();
    let k = input.ncols();
    let mut out = Array2::zeros((input.nrows(), k));
    if k == 0 {
        return out;
    }
    let src = input.as_slice().expect("standard layout");
    out.as_slice_mut()
        .expect("fresh array")
        .par_chunks_mut(k)
        .enumerate()
        .for_each(|(v, row)| propagate_row(adj, v, |u| &src[u * k..(u + 1) * k], row));
    out
}

/// Sparse square matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().position(|&c| c == j).map_or(0.0, |p| val[p])
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            let (idx, val) = self.row(i);
            for (&j, &x) in idx.iter().zip(val) {
                out[[i, j]] = x;
            }
        }
        out
    }

    /// `self · H`, accumulating each row in stored order.
    pub fn matmul(&self, input: &Array2<f64>) -> Array2<f64> {
        assert_eq!(input.nrows(), self.n, "row count mismatch");
        let input = input.as_standard_layout();
        let k = input.ncols();
        let mut out = Array2::zeros((self.n, k));
        if k == 0 {
            return out;
        }
        let src = input.as_slice().expect("standard layout");
        out.as_slice_mut()
            .expect("fresh array")
            .par_chunks_mut(k)
            .enumerate()
            .for_each(|(i, row)| {
                let (idx, val) = self.row(i);
                for (&j, &c) in idx.iter().zip(val) {
                    for (o, &x) in row.iter_mut().zip(&src[j * k..(j + 1) * k]) {
                        *o += c * x;
                    }
                }
            });
        out
    }
}

/// `D̃^{-1/2} (A + I) D̃^{-1/2}` with each row stored self-entry first, then
/// neighbors ascending (the same order [`propagate_row`] uses).
pub fn normalize_adjacency<A: Adjacency>(adj: &A) -> CsrMatrix {
    let n = adj.node_count();
    let scale: Vec<f64> = (0..n).map(|v| inv_sqrt_degree(adj, v)).collect();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    indptr.push(0);
    for v in 0..n {
        indices.push(v);
        values.push(scale[v] * scale[v]);
        adj.for_each_neighbor(v, |u| {
            indices.push(u);
            values.push(scale[v] * scale[u]);
        });
        indptr.push(indices.len());
    }
    CsrMatrix {
        n,
        indptr,
        indices,
        values,
    }
}

/// Restricts `g` to its largest connected component (ties go to the component
/// holding the smallest node id). Split indices are remapped; dropped nodes leave the split.
pub fn largest_connected_component(g: &Graph, split: &DataSplit) -> Result<(Graph, DataSplit)> {
    if g.num_nodes() == 0 {
        return Err(Error::EmptyGraph);
    }
    let components = g.connected_components();
    let largest = components
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .expect("non-empty graph has a component");
    let nodes = &components[largest];
    let mut sub = g.induced_subgraph(nodes);
    sub.original_nodes = sub.num_nodes();
    let mut map = vec![None; g.num_nodes()];
    for (new, &old) in nodes.iter().enumerate() {
        map[old] = Some(new);
    }
    let remap = |ids: &[usize]| -> Vec<usize> { ids.iter().filter_map(|&v| map[v]).collect() };
    let split = DataSplit::new(remap(&split.train), remap(&split.val), remap(&split.test));
    Ok((sub, split))
}

/// A sparse feature row for an injected node.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureRow {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl FeatureRow {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn entries(&self) -> Vec<(usize, f64)> {
        self.indices.iter().copied().zip(self.values.iter().copied()).collect()
    }

    /// `x · W` for a dense `W` of shape `d × k`.
    pub fn project(&self, w: &Array2<f64>) -> Vec<f64> {
        let mut out = vec![0.0; w.ncols()];
        for (&j, &x) in self.indices.iter().zip(&self.values) {
            for (o, &wj) in out.iter_mut().zip(w.row(j)) {
                *o += x * wj;
            }
        }
        out
    }
}

/// One injected node: its id, assigned label, features and original-node neighbors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionRecord {
    pub injected_id: usize,
    pub assigned_label: usize,
    pub features: FeatureRow,
    /// Sorted, distinct original-node indices.
    pub neighbors: Vec<usize>,
}

/// Appends the injected node as a new row/column. Original adjacency entries,
/// features and labels are left untouched.
pub fn inject_node(g: &Graph, rec: &InjectionRecord) -> Result<Graph> {
    let n = g.num_nodes();
    if rec.injected_id != n {
        return Err(Error::InvalidArgument(format!(
            "injected node id {} must equal the current node count {n}",
            rec.injected_id
        )));
    }
    if rec.assigned_label >= g.num_classes() {
        return Err(Error::InvalidArgument(format!(
            "assigned label {} outside [0, {})",
            rec.assigned_label,
            g.num_classes()
        )));
    }
    let mut neighbors = rec.neighbors.clone();
    neighbors.sort_unstable();
    if neighbors.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("repeated neighbor in injection".into()));
    }
    for &u in &neighbors {
        if u >= n {
            return Err(Error::NeighborOutOfRange(u, n));
        }
        if g.is_injected(u) {
            return Err(Error::NeighborIsInjected(u));
        }
    }
    if rec.features.indices.len() != rec.features.values.len() {
        return Err(Error::InvalidArgument("feature indices/values length mismatch".into()));
    }

    let mut out = g.clone();
    out.features.push_row(rec.features.entries())?;
    if out.feature_kind == FeatureKind::Binary {
        let (_, vals) = out.features.row(n);
        if vals.iter().any(|&v| v != 1.0) {
            return Err(Error::InvalidArgument(
                "non-binary feature value injected into a binary graph".into(),
            ));
        }
    }
    for &u in &neighbors {
        // n exceeds every existing id, so pushing keeps the list sorted
        out.adjacency[u].push(n);
    }
    out.num_edges += neighbors.len();
    out.adjacency.push(neighbors);
    out.labels.push(rec.assigned_label);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize, edges: &[(usize, usize)]) -> Graph {
        let features = FeatureMatrix::from_rows(2, (0..n).map(|v| vec![(v % 2, 1.0)])).unwrap();
        let labels = (0..n).map(|v| v % 2).collect();
        Graph::new(n, edges, features, labels, FeatureKind::Binary).unwrap()
    }

    #[test]
    fn single_node_normalizes_to_one() {
        let g = toy(1, &[]);
        assert_eq!(normalize_adjacency(&g).to_dense(), ndarray::array![[1.0]]);
    }

    #[test]
    fn path_of_two_normalizes_to_halves() {
        let g = toy(2, &[(0, 1)]);
        let a = normalize_adjacency(&g).to_dense();
        // (1/sqrt 2)^2 rounds one ulp below 0.5
        assert!(a.iter().all(|&x| (x - 0.5).abs() < 1e-15));
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let f = FeatureMatrix::from_rows(1, vec![vec![]; 3]).unwrap();
        let l = vec![0, 0, 0];
        assert!(Graph::new(3, &[(1, 1)], f.clone(), l.clone(), FeatureKind::Binary).is_err());
        assert!(Graph::new(3, &[(0, 1), (1, 0)], f.clone(), l.clone(), FeatureKind::Binary).is_err());
        assert!(Graph::new(3, &[(0, 3)], f, l, FeatureKind::Binary).is_err());
    }

    #[test]
    fn rejects_gapped_labels() {
        let f = FeatureMatrix::from_rows(1, vec![vec![]; 2]).unwrap();
        let err = Graph::new(2, &[], f, vec![0, 2], FeatureKind::Binary).unwrap_err();
        assert!(err.to_string().contains("contiguous"));
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let g = toy(4, &[(0, 1), (1, 2), (2, 3)]);
        let split = DataSplit::new(vec![0], vec![1], vec![2, 3]);
        let (sub, s) = largest_connected_component(&g, &split).unwrap();
        assert_eq!(sub, g);
        assert_eq!(s, split);
    }

    #[test]
    fn lcc_picks_bigger_component_and_remaps_split() {
        // components {0,1} and {2,3,4}
        let g = toy(5, &[(0, 1), (2, 3), (3, 4)]);
        let split = DataSplit::new(vec![0, 2], vec![1], vec![3, 4]);
        let (sub, s) = largest_connected_component(&g, &split).unwrap();
        assert_eq!(sub.num_nodes(), 3);
        assert_eq!(sub.num_edges(), 2);
        assert_eq!(sub.labels(), &[0, 1, 0]);
        assert_eq!(s, DataSplit::new(vec![0], vec![], vec![1, 2]));
    }

    #[test]
    fn lcc_of_empty_graph_errors() {
        let g = Graph::new(0, &[], FeatureMatrix::new(1), vec![], FeatureKind::Binary).unwrap();
        let split = DataSplit::new(vec![], vec![], vec![]);
        assert!(matches!(
            largest_connected_component(&g, &split),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn inject_appends_row_and_column() {
        let g = toy(4, &[(0, 1), (1, 2), (2, 3)]);
        let rec = InjectionRecord {
            injected_id: 4,
            assigned_label: 1,
            features: FeatureRow {
                indices: vec![0],
                values: vec![1.0],
            },
            neighbors: vec![2],
        };
        let h = inject_node(&g, &rec).unwrap();
        assert_eq!(h.num_nodes(), 5);
        assert_eq!(h.num_edges(), g.num_edges() + 1);
        assert!(h.has_edge(2, 4) && h.has_edge(4, 2));
        assert_eq!(h.original_nodes(), 4);
        assert_eq!(h.original_graph(), g);
    }

    #[test]
    fn inject_rejects_bad_neighbors() {
        let g = toy(3, &[(0, 1), (1, 2)]);
        let mut rec = InjectionRecord {
            injected_id: 3,
            assigned_label: 0,
            features: FeatureRow::default(),
            neighbors: vec![7],
        };
        assert!(matches!(inject_node(&g, &rec), Err(Error::NeighborOutOfRange(7, 3))));
        rec.neighbors = vec![0];
        let h = inject_node(&g, &rec).unwrap();
        let rec2 = InjectionRecord {
            injected_id: 4,
            assigned_label: 0,
            features: FeatureRow::default(),
            neighbors: vec![3],
        };
        assert!(matches!(inject_node(&h, &rec2), Err(Error::NeighborIsInjected(3))));
    }

    #[test]
    fn overlay_matches_materialized_injection() {
        let g = toy(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let endpoints = [1, 4];
        let overlay = InjectionOverlay::new(&g, &endpoints);
        let rec = InjectionRecord {
            injected_id: 5,
            assigned_label: 0,
            features: FeatureRow::default(),
            neighbors: endpoints.to_vec(),
        };
        let h = inject_node(&g, &rec).unwrap();
        assert_eq!(normalize_adjacency(&overlay), normalize_adjacency(&h));
    }
}
