use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::budgets::{clamp_degree, link_budget_cap};
use crate::graph::{FeatureKind, Graph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImperceptibilityReport {
    /// degree → node count
    pub clean_degrees: BTreeMap<usize, usize>,
    pub perturbed_degrees: BTreeMap<usize, usize>,
    /// Injected feature values outside the clean non-zero `[min, max]` of their column.
    pub feature_range_violations: usize,
    /// Every injected degree occurs among the clamped clean degrees.
    pub injected_degree_membership: bool,
    /// Injected values other than 0/1 on a binary-feature graph.
    pub non_binary_values: usize,
}

pub fn degree_histogram(g: &Graph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for d in g.degrees() {
        *hist.entry(d).or_insert(0) += 1;
    }
    hist
}

/// Compares `perturbed` against `clean`; nodes past `clean.num_nodes()` are the injected ones.
pub fn imperceptibility_report(clean: &Graph, perturbed: &Graph) -> ImperceptibilityReport {
    let x = clean.features();
    let mut range = vec![(f64::INFINITY, f64::NEG_INFINITY); x.dim()];
    for v in 0..x.rows() {
        let (idx, val) = x.row(v);
        for (&j, &value) in idx.iter().zip(val) {
            range[j].0 = range[j].0.min(value);
            range[j].1 = range[j].1.max(value);
        }
    }
    let cap = link_budget_cap(clean);
    let allowed: BTreeSet<usize> = clean.degrees().into_iter().map(|d| clamp_degree(d, cap)).collect();

    let mut violations = 0;
    let mut non_binary = 0;
    let mut membership = true;
    for v in clean.num_nodes()..perturbed.num_nodes() {
        let (idx, val) = perturbed.features().row(v);
        for (&j, &value) in idx.iter().zip(val) {
            let (lo, hi) = range[j];
            if !(lo..=hi).contains(&value) {
                violations += 1;
            }
            if clean.feature_kind() == FeatureKind::Binary && value != 1.0 {
                non_binary += 1;
            }
        }
        membership &= allowed.contains(&perturbed.neighbors(v).len());
    }
    ImperceptibilityReport {
        clean_degrees: degree_histogram(clean),
        perturbed_degrees: degree_histogram(perturbed),
        feature_range_violations: violations,
        injected_degree_membership: membership,
        non_binary_values: non_binary,
    }
}
