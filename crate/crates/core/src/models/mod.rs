//! Node classifiers trained from scratch: the two-hop SGC surrogate, a
//! two-layer GCN, and a GCN behind Jaccard/cosine edge pruning.

mod format;
mod gcn;
mod jaccard;
mod optim;
mod sgc;

use ndarray::{Array2, ArrayView1};
use rand::distributions::{Distribution, Uniform};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::split::DataSplit;

pub use format::{read_model, write_model, StoredModel};
pub use gcn::{train_gcn, DropoutMasks, GcnModel, GcnObjective};
pub use jaccard::{feature_similarity, jaccard_preprocess, JaccardGcn};
pub use sgc::{sgc_propagate, train_sgc, SgcModel, SgcObjective, SGC_HOPS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub step_size: f64,
    pub weight_decay: f64,
    /// Dropout probability on each GCN layer input; ignored by SGC.
    pub dropout: f64,
    pub seed: u64,
}

impl TrainConfig {
    pub fn sgc_default() -> Self {
        Self {
            epochs: 200,
            step_size: 0.2,
            weight_decay: 5e-5,
            dropout: 0.0,
            seed: 0,
        }
    }

    pub fn gcn_default() -> Self {
        Self {
            epochs: 200,
            step_size: 0.01,
            weight_decay: 5e-4,
            dropout: 0.5,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidArgument(format!(
                "dropout must lie in [0, 1), got {}",
                self.dropout
            )));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::InvalidArgument("weight decay must be non-negative".into()));
        }
        Ok(())
    }
}

/// Row-wise class probabilities and the arg-max label of each row.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub probabilities: Array2<f64>,
    pub labels: Vec<usize>,
}

impl Prediction {
    pub fn from_logits(logits: &Array2<f64>) -> Self {
        let mut probabilities = logits.clone();
        for mut row in probabilities.rows_mut() {
            softmax_in_place(row.as_slice_mut().expect("contiguous row"));
        }
        let labels = logits.rows().into_iter().map(argmax).collect();
        Self {
            probabilities,
            labels,
        }
    }
}

/// Numerically stable softmax.
pub(crate) fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in row.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in row.iter_mut() {
        *x /= sum;
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: ArrayView1<'_, f64>) -> usize {
    argmax_slice(row.as_slice().unwrap_or(&row.to_vec()))
}

pub(crate) fn argmax_slice(row: &[f64]) -> usize {
    let mut best = 0;
    for (c, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = c;
        }
    }
    best
}

/// Mean cross-entropy over `rows` and the gradient with respect to the logits
/// (non-zero only on `rows`, already divided by `rows.len()`).
pub(crate) fn cross_entropy(
    logits: &Array2<f64>,
    rows: &[usize],
    targets: &[usize],
) -> (f64, Array2<f64>) {
    let mut grad = Array2::zeros(logits.raw_dim());
    let m = rows.len() as f64;
    let mut loss = 0.0;
    for (&r, &y) in rows.iter().zip(targets) {
        let mut p = logits.row(r).to_vec();
        softmax_in_place(&mut p);
        let max = logits.row(r).iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.row(r).iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
        loss += lse - logits[[r, y]];
        p[y] -= 1.0;
        for (g, &pc) in grad.row_mut(r).iter_mut().zip(&p) {
            *g = pc / m;
        }
    }
    (loss / m, grad)
}

pub(crate) fn glorot(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    let dist = Uniform::new_inclusive(-bound, bound);
    Array2::from_shape_simple_fn((rows, cols), || dist.sample(rng))
}

pub(crate) fn squared_norm(w: &Array2<f64>) -> f64 {
    w.iter().map(|x| x * x).sum()
}

/// Anything that maps a graph to per-node class logits.
pub trait Classifier: Send + Sync {
    fn logits(&self, g: &Graph) -> Array2<f64>;

    fn predict(&self, g: &Graph) -> Prediction {
        Prediction::from_logits(&self.logits(g))
    }
}

/// Fraction of `indices` whose predicted label matches the graph's label.
pub fn evaluate_accuracy<C: Classifier + ?Sized>(model: &C, g: &Graph, indices: &[usize]) -> Result<f64> {
    if indices.is_empty() {
        return Err(Error::InvalidArgument("accuracy over an empty index set".into()));
    }
    let pred = model.predict(g);
    Ok(accuracy(&pred.labels, g.labels(), indices))
}

pub(crate) fn accuracy(predicted: &[usize], truth: &[usize], indices: &[usize]) -> f64 {
    let correct = indices.iter().filter(|&&v| predicted[v] == truth[v]).count();
    correct as f64 / indices.len() as f64
}

/// Victim models used to measure poisoning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Victim {
    Gcn,
    Sgc,
    Jaccard,
}

impl Victim {
    pub const ALL: [Victim; 3] = [Victim::Gcn, Victim::Sgc, Victim::Jaccard];

    pub fn name(self) -> &'static str {
        match self {
            Victim::Gcn => "gcn",
            Victim::Sgc => "sgc",
            Victim::Jaccard => "jaccard",
        }
    }
}

impl std::str::FromStr for Victim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gcn" => Ok(Victim::Gcn),
            "sgc" => Ok(Victim::Sgc),
            "jaccard" | "jaccard-gcn" => Ok(Victim::Jaccard),
            other => Err(Error::InvalidArgument(format!("unknown victim model `{other}`"))),
        }
    }
}

/// Training settings for every victim kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VictimConfig {
    pub gcn: TrainConfig,
    pub sgc: TrainConfig,
    pub jaccard_threshold: f64,
    pub hidden: usize,
}

impl Default for VictimConfig {
    fn default() -> Self {
        Self {
            gcn: TrainConfig::gcn_default(),
            sgc: TrainConfig::sgc_default(),
            jaccard_threshold: 0.0,
            hidden: 16,
        }
    }
}

impl VictimConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.gcn.seed = seed;
        self.sgc.seed = seed;
        self
    }
}

/// Trains `victim` on `g` from scratch.
pub fn train_victim(
    victim: Victim,
    g: &Graph,
    split: &DataSplit,
    cfg: &VictimConfig,
) -> Result<Box<dyn Classifier>> {
    Ok(match victim {
        Victim::Gcn => Box::new(train_gcn(g, split, &cfg.gcn, cfg.hidden)?),
        Victim::Sgc => Box::new(train_sgc(g, split, &cfg.sgc)?),
        Victim::Jaccard => Box::new(JaccardGcn::train(g, split, &cfg.gcn, cfg.hidden, cfg.jaccard_threshold)?),
    })
}
