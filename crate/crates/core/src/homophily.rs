//! Node homophily: the share of a node's neighbors that carry its own label.

use crate::graph::Adjacency;

/// Same-label neighbor count and total neighbor count of `v`.
fn neighbor_counts<A: Adjacency>(adj: &A, labels: &[usize], v: usize) -> (usize, usize) {
    let mut same = 0;
    let mut total = 0;
    adj.for_each_neighbor(v, |u| {
        total += 1;
        if labels[u] == labels[v] {
            same += 1;
        }
    });
    (same, total)
}

/// Homophily of `v`, or `None` when `v` is isolated (the ratio is 0/0).
pub fn node_homophily<A: Adjacency>(adj: &A, labels: &[usize], v: usize) -> Option<f64> {
    let (same, total) = neighbor_counts(adj, labels, v);
    (total > 0).then(|| same as f64 / total as f64)
}

/// Mean homophily over nodes with at least one neighbor; 0 if there are none.
pub fn average_homophily<A: Adjacency>(adj: &A, labels: &[usize]) -> f64 {
    let (sum, count) = (0..adj.node_count())
        .filter_map(|v| node_homophily(adj, labels, v))
        .fold((0.0, 0usize), |(s, c), h| (s + h, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Decrease of `v`'s homophily when it gains one extra neighbor labelled
/// `injected_label`. Isolated nodes contribute 0.
pub fn dnh<A: Adjacency>(adj: &A, labels: &[usize], v: usize, injected_label: usize) -> f64 {
    let (same, total) = neighbor_counts(adj, labels, v);
    if total == 0 {
        return 0.0;
    }
    let before = same as f64 / total as f64;
    let after = (same + usize::from(injected_label == labels[v])) as f64 / (total + 1) as f64;
    before - after
}

/// Sum of [`dnh`] over distinct `endpoints`, accumulated in the given order.
pub fn tdnh<A: Adjacency>(adj: &A, labels: &[usize], endpoints: &[usize], injected_label: usize) -> f64 {
    endpoints
        .iter()
        .map(|&v| dnh(adj, labels, v, injected_label))
        .sum()
}
