//! Fixtures shared by the benchmarks.

use nodeinject::graph::FeatureKind;
use nodeinject::split::{make_split, DataSplit, SplitRatios};
use nodeinject::synthetic::{planted_partition, PlantedPartition};
use nodeinject::Graph;

/// A citation-sized planted-partition graph with a 10/10/80 split.
pub fn fixture(nodes: usize, feature_kind: FeatureKind) -> (Graph, DataSplit) {
    let cfg = PlantedPartition {
        nodes,
        classes: 7,
        p_in: 8.0 / nodes as f64,
        p_out: 0.6 / nodes as f64,
        features: 700,
        signal: 0.05,
        noise: 0.004,
        feature_kind,
        seed: 11,
    };
    let g = planted_partition(&cfg).expect("valid fixture parameters");
    let split = make_split(g.num_nodes(), SplitRatios::default(), 3).expect("valid split");
    (g, split)
}
