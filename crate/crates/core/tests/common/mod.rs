//! Dense reference implementations and random instances shared by the
//! integration tests. Oracles here work on plain edge lists and dense
//! matrices and never call the library's propagation code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ndarray::Array2;
use nodeinject::graph::{FeatureKind, FeatureMatrix, Graph};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Instance {
    pub graph: Graph,
    pub edges: Vec<(usize, usize)>,
    pub dense_x: Array2<f64>,
}

/// Erdős–Rényi graph with random sparse features and labels covering every class.
pub fn random_instance(
    r: &mut ChaCha8Rng,
    n: usize,
    p: f64,
    dim: usize,
    classes: usize,
    kind: FeatureKind,
) -> Instance {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let mut labels: Vec<usize> = (0..n).map(|v| v % classes).collect();
    for i in (1..n).rev() {
        labels.swap(i, r.gen_range(0..=i));
    }
    let mut dense_x = Array2::zeros((n, dim));
    for v in 0..n {
        for j in 0..dim {
            if r.gen::<f64>() < 0.35 {
                dense_x[[v, j]] = match kind {
                    FeatureKind::Binary => 1.0,
                    FeatureKind::Continuous => r.gen_range(0.05..2.0),
                };
            }
        }
    }
    let x = FeatureMatrix::from_dense(&dense_x).unwrap();
    let graph = Graph::new(n, &edges, x, labels, kind).unwrap();
    Instance { graph, edges, dense_x }
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || r.gen_range(-scale..scale))
}

/// `D̃^{-1/2} (A + I) D̃^{-1/2}` built entry by entry from an edge list.
pub fn dense_a_hat(n: usize, edges: &[(usize, usize)]) -> Array2<f64> {
    let mut a = Array2::<f64>::eye(n);
    for &(u, v) in edges {
        a[[u, v]] = 1.0;
        a[[v, u]] = 1.0;
    }
    let deg: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    Array2::from_shape_fn((n, n), |(i, j)| a[[i, j]] / (deg[i] * deg[j]).sqrt())
}

pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate() {
        if x > row[best] {
            best = i;
        }
    }
    best
}

/// Dense `Â² X W` logits.
pub fn dense_sgc_logits(a: &Array2<f64>, x: &Array2<f64>, w: &Array2<f64>) -> Array2<f64> {
    a.dot(a).dot(x).dot(w)
}

pub fn neighbor_sets(n: usize, edges: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(u, v) in edges {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    adj
}

/// Share of same-label neighbors, `None` for isolated nodes.
pub fn nh(adj: &[BTreeSet<usize>], labels: &[usize], v: usize) -> Option<f64> {
    if adj[v].is_empty() {
        return None;
    }
    let same = adj[v].iter().filter(|&&u| labels[u] == labels[v]).count();
    Some(same as f64 / adj[v].len() as f64)
}

/// All `k`-subsets of `items`, in lexicographic order.
pub fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Breadth-first hop distance from `src` over an adjacency list; `usize::MAX` when unreachable.
pub fn hops_from(adj: &[BTreeSet<usize>], src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[src] = 0;
    let mut queue = std::collections::VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}
