use ndarray::Array2;

use super::gcn::{train_gcn, GcnModel};
use super::{Classifier, TrainConfig};
use crate::error::{Error, Result};
use crate::graph::{FeatureKind, FeatureMatrix, Graph};
use crate::split::DataSplit;

/// Jaccard index of the non-zero supports for binary features, cosine
/// similarity otherwise. An empty support or zero norm yields 0.
pub fn feature_similarity(x: &FeatureMatrix, kind: FeatureKind, u: usize, v: usize) -> f64 {
    let (iu, xu) = x.row(u);
    let (iv, xv) = x.row(v);
    let (mut a, mut b) = (0, 0);
    let mut shared = 0usize;
    let mut dot = 0.0;
    while a < iu.len() && b < iv.len() {
        match iu[a].cmp(&iv[b]) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                dot += xu[a] * xv[b];
                a += 1;
                b += 1;
            }
        }
    }
    match kind {
        FeatureKind::Binary => {
            let union = iu.len() + iv.len() - shared;
            if union == 0 {
                0.0
            } else {
                shared as f64 / union as f64
            }
        }
        FeatureKind::Continuous => {
            let nu = xu.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nv = xv.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nu == 0.0 || nv == 0.0 {
                0.0
            } else {
                dot / (nu * nv)
            }
        }
    }
}

/// Drops every edge whose endpoint similarity is `<= threshold`.
pub fn jaccard_preprocess(g: &Graph, threshold: f64) -> Result<Graph> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "similarity threshold must be non-negative, got {threshold}"
        )));
    }
    let kept: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| feature_similarity(g.features(), g.feature_kind(), u, v) > threshold)
        .collect();
    g.with_edges(&kept)
}

/// GCN trained and evaluated on the similarity-pruned graph.
#[derive(Debug, Clone, PartialEq)]
pub struct JaccardGcn {
    pub threshold: f64,
    pub model: GcnModel,
}

impl JaccardGcn {
    pub fn train(g: &Graph, split: &DataSplit, cfg: &TrainConfig, hidden: usize, threshold: f64) -> Result<Self> {
        let pruned = jaccard_preprocess(g, threshold)?;
        Ok(Self {
            threshold,
            model: train_gcn(&pruned, split, cfg, hidden)?,
        })
    }
}

impl Classifier for JaccardGcn {
    fn logits(&self, g: &Graph) -> Array2<f64> {
        let pruned = jaccard_preprocess(g, self.threshold).expect("threshold validated at training");
        self.model.logits(&pruned)
    }
}
