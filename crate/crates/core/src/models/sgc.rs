use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::optim::RmsStep;
use super::{cross_entropy, glorot, squared_norm, Classifier, Prediction, TrainConfig};
use crate::error::{Error, Result};
use crate::graph::{normalize_adjacency, propagate, CsrMatrix, FeatureMatrix, Graph};
use crate::split::DataSplit;

/// Propagation depth of the surrogate.
pub const SGC_HOPS: usize = 2;

/// `Â^hops · X` by repeated sparse-dense products.
pub fn sgc_propagate(a_hat: &CsrMatrix, x: &Array2<f64>, hops: usize) -> Array2<f64> {
    let mut out = x.clone();
    for _ in 0..hops {
        out = a_hat.matmul(&out);
    }
    out
}

/// Rows of `Â² X` for `rows`, without materializing a dense `X`.
fn propagated_rows(a_hat: &CsrMatrix, x: &FeatureMatrix, rows: &[usize]) -> Array2<f64> {
    let d = x.dim();
    let mut once = Array2::<f64>::zeros((a_hat.dim(), d));
    for (i, mut out) in once.rows_mut().into_iter().enumerate() {
        let (idx, coef) = a_hat.row(i);
        for (&u, &c) in idx.iter().zip(coef) {
            let (fi, fv) = x.row(u);
            for (&j, &v) in fi.iter().zip(fv) {
                out[j] += c * v;
            }
        }
    }
    let mut twice = Array2::zeros((rows.len(), d));
    for (r, &i) in rows.iter().enumerate() {
        let (idx, coef) = a_hat.row(i);
        for (&u, &c) in idx.iter().zip(coef) {
            twice.row_mut(r).scaled_add(c, &once.row(u));
        }
    }
    twice
}

/// Training loss of the surrogate: mean cross-entropy of `softmax(Â²X W)` on
/// the training nodes plus `weight_decay / 2 · ‖W‖²`.
#[derive(Debug, Clone)]
pub struct SgcObjective {
    inputs: Array2<f64>,
    targets: Vec<usize>,
    weight_decay: f64,
}

impl SgcObjective {
    pub fn new(g: &Graph, train: &[usize], weight_decay: f64) -> Self {
        let a_hat = normalize_adjacency(g);
        let inputs = propagated_rows(&a_hat, g.features(), train);
        let targets = train.iter().map(|&v| g.labels()[v]).collect();
        Self {
            inputs,
            targets,
            weight_decay,
        }
    }

    pub fn loss_and_gradient(&self, w: &Array2<f64>) -> (f64, Array2<f64>) {
        let logits = self.inputs.dot(w);
        let rows: Vec<usize> = (0..self.targets.len()).collect();
        let (ce, g_logits) = cross_entropy(&logits, &rows, &self.targets);
        let mut grad = self.inputs.t().dot(&g_logits);
        grad.scaled_add(self.weight_decay, w);
        (ce + 0.5 * self.weight_decay * squared_norm(w), grad)
    }

    pub fn loss(&self, w: &Array2<f64>) -> f64 {
        self.loss_and_gradient(w).0
    }
}

/// Two-hop linear surrogate `softmax(Â² X W)` without bias.
#[derive(Debug, Clone, PartialEq)]
pub struct SgcModel {
    weights: Array2<f64>,
    hops: usize,
    seed: u64,
    loss_history: Vec<f64>,
}

impl SgcModel {
    pub fn from_weights(weights: Array2<f64>, seed: u64) -> Self {
        Self {
            weights,
            hops: SGC_HOPS,
            seed,
            loss_history: Vec::new(),
        }
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn hops(&self) -> usize {
        self.hops
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_classes(&self) -> usize {
        self.weights.ncols()
    }

    /// Training loss after each epoch (entry 0 is the initial loss).
    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }

    /// `X W`, the per-node input to propagation.
    pub fn project(&self, x: &FeatureMatrix) -> Array2<f64> {
        x.matmul(&self.weights)
    }

    pub fn predict_with(&self, a_hat: &CsrMatrix, x: &FeatureMatrix) -> Prediction {
        Prediction::from_logits(&sgc_propagate(a_hat, &self.project(x), self.hops))
    }
}

impl Classifier for SgcModel {
    fn logits(&self, g: &Graph) -> Array2<f64> {
        let mut out = self.project(g.features());
        for _ in 0..self.hops {
            out = propagate(g, &out);
        }
        out
    }
}

/// Full-batch training with adaptive steps. A step that would raise the loss
/// is rejected and the step size halved, so the recorded loss never increases.
pub fn train_sgc(g: &Graph, split: &DataSplit, cfg: &TrainConfig) -> Result<SgcModel> {
    cfg.validate()?;
    if split.train.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    let objective = SgcObjective::new(g, &split.train, cfg.weight_decay);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = glorot(g.num_features(), g.num_classes(), &mut rng);
    let mut opt = RmsStep::new(&[&w]);
    let mut lr = cfg.step_size;

    let (mut loss, mut grad) = objective.loss_and_gradient(&w);
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: 0 });
    }
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    history.push(loss);
    for epoch in 1..=cfg.epochs {
        opt.observe(&[&grad]);
        loop {
            let candidate = opt.propose(&[&w], &[&grad], lr).pop().expect("one parameter");
            let (next_loss, next_grad) = objective.loss_and_gradient(&candidate);
            if next_loss.is_finite() && next_loss <= loss {
                w = candidate;
                loss = next_loss;
                grad = next_grad;
                break;
            }
            lr *= 0.5;
            if lr < 1e-12 {
                if !next_loss.is_finite() && !loss.is_finite() {
                    return Err(Error::NonFiniteLoss { epoch });
                }
                break;
            }
        }
        history.push(loss);
    }
    Ok(SgcModel {
        weights: w,
        hops: SGC_HOPS,
        seed: cfg.seed,
        loss_history: history,
    })
}
