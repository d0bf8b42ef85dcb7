//! Frozen-surrogate fitness of a candidate endpoint set.
//!
//! The surrogate's logits are `Â² (X W)`, so attaching one node changes
//! logits only within two hops of it. The evaluator keeps the clean hidden
//! layer and logits and recomputes just the rows the injection touches, using
//! the same summation order as a full recomputation.

use std::cmp::Ordering;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Individual;
use crate::error::{Error, Result};
use crate::graph::{propagate, propagate_row, Adjacency, FeatureRow, Graph, InjectionOverlay};
use crate::homophily::tdnh;
use crate::models::{argmax_slice, SgcModel};
use crate::split::DataSplit;

/// `(misclassified test nodes, TDNH)`, compared lexicographically; larger is better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    pub misclassified: usize,
    pub tdnh: f64,
}

impl Fitness {
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.misclassified
            .cmp(&other.misclassified)
            .then(self.tdnh.total_cmp(&other.tdnh))
    }
}

/// Everything needed to score endpoint sets for one injected node against the
/// current graph. Immutable and shareable across threads.
pub struct FitnessContext<'a> {
    graph: &'a Graph,
    labels: &'a [usize],
    projected: Array2<f64>,
    hidden: Array2<f64>,
    base_wrong: Vec<bool>,
    test_mask: Vec<bool>,
    baseline: usize,
    injected: Vec<f64>,
    injected_label: usize,
    classes: usize,
}

impl<'a> FitnessContext<'a> {
    /// `labels` gives the reference class of every node of `graph` (the
    /// prediction target for misclassification and the labels for homophily).
    pub fn new(
        surrogate: &SgcModel,
        graph: &'a Graph,
        split: &DataSplit,
        labels: &'a [usize],
        injected_features: &FeatureRow,
        injected_label: usize,
    ) -> Result<Self> {
        let n = graph.num_nodes();
        if labels.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} reference labels for {n} nodes",
                labels.len()
            )));
        }
        if surrogate.weights().nrows() != graph.num_features() {
            return Err(Error::InvalidArgument("surrogate/feature dimension mismatch".into()));
        }
        split.validate(graph.original_nodes())?;
        let classes = surrogate.num_classes();
        let projected = surrogate.project(graph.features());
        let hidden = propagate(graph, &projected);
        let logits = propagate(graph, &hidden);
        let test_mask = split.test_mask(n);
        let base_wrong: Vec<bool> = (0..n)
            .map(|v| argmax_slice(logits.row(v).as_slice().expect("row")) != labels[v])
            .collect();
        let baseline = (0..n).filter(|&v| test_mask[v] && base_wrong[v]).count();
        Ok(Self {
            graph,
            labels,
            projected,
            hidden,
            base_wrong,
            test_mask,
            baseline,
            injected: injected_features.project(surrogate.weights()),
            injected_label,
            classes,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn labels(&self) -> &[usize] {
        self.labels
    }

    pub fn injected_label(&self) -> usize {
        self.injected_label
    }

    /// Misclassified test nodes with no injection at all.
    pub fn baseline(&self) -> usize {
        self.baseline
    }

    /// Fitness of attaching the injected node to `endpoints` (distinct nodes, any order).
    pub fn evaluate(&self, endpoints: &[usize]) -> Fitness {
        let mut sorted = endpoints.to_vec();
        sorted.sort_unstable();
        debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]), "endpoints must be distinct");
        let overlay = InjectionOverlay::new(self.graph, &sorted);
        let z = overlay.injected();
        let c = self.classes;

        // hidden rows that change: the new node, its endpoints and their neighbors
        let mut touched = vec![z];
        for &e in &sorted {
            touched.push(e);
            touched.extend_from_slice(self.graph.neighbors(e));
        }
        touched.sort_unstable();
        touched.dedup();

        let input = |w: usize| -> &[f64] {
            if w == z {
                &self.injected
            } else {
                self.projected.row(w).to_slice().expect("row")
            }
        };
        let mut new_hidden = vec![0.0; touched.len() * c];
        for (slot, &u) in new_hidden.chunks_mut(c).zip(&touched) {
            propagate_row(&overlay, u, input, slot);
        }

        // logits that change: anything adjacent to a changed hidden row
        let mut affected: Vec<usize> = Vec::new();
        for &u in &touched {
            if u != z && self.test_mask[u] {
                affected.push(u);
            }
            overlay.for_each_neighbor(u, |v| {
                if v != z && self.test_mask[v] {
                    affected.push(v);
                }
            });
        }
        affected.sort_unstable();
        affected.dedup();

        let hidden_row = |w: usize| -> &[f64] {
            match touched.binary_search(&w) {
                Ok(p) => &new_hidden[p * c..(p + 1) * c],
                Err(_) => self.hidden.row(w).to_slice().expect("row"),
            }
        };
        let mut logits = vec![0.0; c];
        let mut misclassified = self.baseline;
        for &v in &affected {
            propagate_row(&overlay, v, hidden_row, &mut logits);
            let wrong = argmax_slice(&logits) != self.labels[v];
            misclassified = misclassified + usize::from(wrong) - usize::from(self.base_wrong[v]);
        }

        Fitness {
            misclassified,
            tdnh: tdnh(self.graph, self.labels, &sorted, self.injected_label),
        }
    }
}

/// Fitness of linking the injected node to a single original node.
pub fn score_single_link(ctx: &FitnessContext<'_>, endpoint: usize) -> Fitness {
    ctx.evaluate(&[endpoint])
}

/// Fills in the fitness of every unevaluated individual. Evaluations run in
/// parallel; each result depends only on its individual, so the outcome is
/// the same for any worker count.
pub fn evaluate_fitness(population: &mut [Individual], ctx: &FitnessContext<'_>) {
    population.par_iter_mut().for_each(|ind| {
        if ind.fitness.is_none() {
            ind.fitness = Some(ctx.evaluate(&ind.endpoints));
        }
    });
}
