//! Class-conditional feature rows for injected nodes.
//!
//! The injected node takes the `budget` feature indices that are most often
//! non-zero among original nodes of its assigned class. Each chosen value is
//! the mean over the class members that are non-zero at that index, which
//! keeps generated values inside the observed range (and exactly 1 for binary data).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FeatureRow, Graph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedFeatures {
    pub row: FeatureRow,
    /// How many of the requested non-zeros could not be placed because too
    /// few indices are ever non-zero in the class.
    pub shortfall: usize,
}

/// Builds the feature row for a node of class `injected_label`, reading class
/// membership of the original nodes from `labels`.
pub fn generate_features(
    g: &Graph,
    labels: &[usize],
    injected_label: usize,
    budget: usize,
) -> Result<GeneratedFeatures> {
    let x = g.features();
    let d = x.dim();
    let mut appearances = vec![0usize; d];
    let mut sums = vec![0.0f64; d];
    let mut members = 0usize;
    for v in 0..g.original_nodes() {
        if labels[v] != injected_label {
            continue;
        }
        members += 1;
        let (idx, val) = x.row(v);
        for (&j, &value) in idx.iter().zip(val) {
            appearances[j] += 1;
            sums[j] += value;
        }
    }
    if members == 0 {
        return Err(Error::EmptyClass(injected_label));
    }

    let mut order: Vec<usize> = (0..d).filter(|&j| appearances[j] > 0).collect();
    // most frequent first, lower index on ties
    order.sort_by(|&a, &b| appearances[b].cmp(&appearances[a]).then(a.cmp(&b)));
    let shortfall = budget.saturating_sub(order.len());
    order.truncate(budget);
    order.sort_unstable();

    let values = order.iter().map(|&j| sums[j] / appearances[j] as f64).collect();
    Ok(GeneratedFeatures {
        row: FeatureRow {
            indices: order,
            values,
        },
        shortfall,
    })
}
