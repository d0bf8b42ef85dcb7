//! Attack budgets: how many non-zero features and how many links each injected node gets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackBudget {
    pub feature_budget: usize,
    /// One link budget per injected node.
    pub link_budgets: Vec<usize>,
}

/// Mean number of non-zero features per node, rounded half to even, at least 1.
pub fn feature_budget(g: &Graph) -> Result<usize> {
    let x = g.features();
    if x.nnz() == 0 {
        return Err(Error::InvalidArgument("graph has no non-zero features".into()));
    }
    let mean = x.nnz() as f64 / x.rows() as f64;
    Ok((mean.round_ties_even() as usize).max(1))
}

/// Largest allowed link budget: `floor(2 × average degree)`, at least 1.
pub fn link_budget_cap(g: &Graph) -> usize {
    ((2.0 * g.average_degree()).floor() as usize).max(1)
}

pub fn clamp_degree(degree: usize, cap: usize) -> usize {
    degree.clamp(1, cap)
}

/// Draws `n_in` degrees uniformly (with replacement) from the original nodes and
/// clamps each into `[1, link_budget_cap]`.
pub fn sample_link_budgets(g: &Graph, n_in: usize, seed: u64) -> Result<Vec<usize>> {
    if n_in == 0 {
        return Err(Error::InvalidArgument("need at least one injected node".into()));
    }
    if g.num_edges() == 0 {
        return Err(Error::NoEdges);
    }
    let cap = link_budget_cap(g);
    let n = g.original_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_in)
        .map(|_| clamp_degree(g.neighbors(rng.gen_range(0..n)).len(), cap))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{FeatureKind, FeatureMatrix};

    fn with_edges(n: usize, edges: &[(usize, usize)], nnz: &[usize]) -> Graph {
        let rows = nnz.iter().map(|&k| (0..k).map(|j| (j, 1.0)).collect());
        let f = FeatureMatrix::from_rows(8, rows).unwrap();
        Graph::new(n, edges, f, vec![0; n], FeatureKind::Binary).unwrap()
    }

    #[test]
    fn feature_budget_examples() {
        assert_eq!(feature_budget(&with_edges(3, &[], &[5, 5, 5])).unwrap(), 5);
        assert_eq!(feature_budget(&with_edges(2, &[], &[2, 4])).unwrap(), 3);
        // 2.5 rounds to even
        assert_eq!(feature_budget(&with_edges(2, &[], &[2, 3])).unwrap(), 2);
        assert_eq!(feature_budget(&with_edges(4, &[], &[1, 0, 0, 0])).unwrap(), 1);
        assert!(feature_budget(&with_edges(2, &[], &[0, 0])).is_err());
    }

    #[test]
    fn regular_graph_budgets_equal_degree() {
        // 3-regular: K4
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let g = with_edges(4, &edges, &[1; 4]);
        assert_eq!(sample_link_budgets(&g, 20, 1).unwrap(), vec![3; 20]);
    }

    #[test]
    fn star_hub_is_clamped() {
        let edges: Vec<_> = (1..10).map(|v| (0, v)).collect();
        let g = with_edges(10, &edges, &[1; 10]);
        assert_eq!(link_budget_cap(&g), 3);
        let b = sample_link_budgets(&g, 500, 7).unwrap();
        assert!(b.iter().all(|&k| k == 1 || k == 3));
        assert!(b.contains(&3) && b.contains(&1));
    }

    #[test]
    fn deterministic_per_seed() {
        let edges: Vec<_> = (0..9).map(|v| (v, v + 1)).collect();
        let g = with_edges(10, &edges, &[1; 10]);
        assert_eq!(sample_link_budgets(&g, 50, 3).unwrap(), sample_link_budgets(&g, 50, 3).unwrap());
    }

    #[test]
    fn edgeless_graph_errors() {
        let g = with_edges(3, &[], &[1; 3]);
        assert!(matches!(sample_link_budgets(&g, 1, 0), Err(Error::NoEdges)));
    }
}
