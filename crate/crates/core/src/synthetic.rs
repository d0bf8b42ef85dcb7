//! Planted-partition graphs with class-correlated features, for tests,
//! benchmarks and runs without a benchmark dataset at hand.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FeatureKind, FeatureMatrix, Graph};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedPartition {
    pub nodes: usize,
    pub classes: usize,
    /// Edge probability between nodes of the same class.
    pub p_in: f64,
    /// Edge probability between nodes of different classes.
    pub p_out: f64,
    /// Feature dimension, split into one block per class.
    pub features: usize,
    /// Probability that a feature of the node's own block is active.
    pub signal: f64,
    /// Probability that any other feature is active.
    pub noise: f64,
    pub feature_kind: FeatureKind,
    pub seed: u64,
}

impl Default for PlantedPartition {
    fn default() -> Self {
        Self {
            nodes: 200,
            classes: 4,
            p_in: 0.05,
            p_out: 0.005,
            features: 64,
            signal: 0.2,
            noise: 0.02,
            feature_kind: FeatureKind::Binary,
            seed: 0,
        }
    }
}

/// Node `v` gets label `v % classes`. Continuous features are uniform in
/// `[0.1, 1)` where active.
pub fn planted_partition(cfg: &PlantedPartition) -> Result<Graph> {
    if cfg.classes == 0 || cfg.nodes < cfg.classes {
        return Err(Error::InvalidArgument(format!(
            "need at least one node per class, got {} nodes for {} classes",
            cfg.nodes, cfg.classes
        )));
    }
    if cfg.features < cfg.classes {
        return Err(Error::InvalidArgument("need at least one feature per class".into()));
    }
    for (name, p) in [("p_in", cfg.p_in), ("p_out", cfg.p_out), ("signal", cfg.signal), ("noise", cfg.noise)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {p}")));
        }
    }
    let labels: Vec<usize> = (0..cfg.nodes).map(|v| v % cfg.classes).collect();

    let mut rng = stream(cfg.seed, 0);
    let mut edges = Vec::new();
    for u in 0..cfg.nodes {
        for v in u + 1..cfg.nodes {
            let p = if labels[u] == labels[v] { cfg.p_in } else { cfg.p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }

    let block = cfg.features / cfg.classes;
    let mut rng = stream(cfg.seed, 1);
    let mut rows = Vec::with_capacity(cfg.nodes);
    for &label in &labels {
        let own = label * block..(label + 1) * block;
        let mut row = Vec::new();
        for j in 0..cfg.features {
            let p = if own.contains(&j) { cfg.signal } else { cfg.noise };
            if rng.gen::<f64>() < p {
                let value = match cfg.feature_kind {
                    FeatureKind::Binary => 1.0,
                    FeatureKind::Continuous => rng.gen_range(0.1..1.0),
                };
                row.push((j, value));
            }
        }
        rows.push(row);
    }
    let x = FeatureMatrix::from_rows(cfg.features, rows)?;
    Graph::new(cfg.nodes, &edges, x, labels, cfg.feature_kind)
}
