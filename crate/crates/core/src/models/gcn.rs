use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::optim::RmsStep;
use super::{accuracy, cross_entropy, glorot, squared_norm, Classifier, Prediction, TrainConfig};
use crate::error::{Error, Result};
use crate::graph::{normalize_adjacency, CsrMatrix, FeatureMatrix, Graph};
use crate::split::DataSplit;

/// Two-layer GCN `softmax(Â · relu(Â X W1) · W2)` without biases.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    w1: Array2<f64>,
    w2: Array2<f64>,
    seed: u64,
}

impl GcnModel {
    pub fn from_weights(w1: Array2<f64>, w2: Array2<f64>, seed: u64) -> Self {
        assert_eq!(w1.ncols(), w2.nrows(), "hidden width mismatch");
        Self { w1, w2, seed }
    }

    pub fn w1(&self) -> &Array2<f64> {
        &self.w1
    }

    pub fn w2(&self) -> &Array2<f64> {
        &self.w2
    }

    pub fn hidden(&self) -> usize {
        self.w1.ncols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn logits_with(&self, a_hat: &CsrMatrix, x: &FeatureMatrix) -> Array2<f64> {
        forward(a_hat, x, &self.w1, &self.w2, None).logits
    }

    pub fn predict_with(&self, a_hat: &CsrMatrix, x: &FeatureMatrix) -> Prediction {
        Prediction::from_logits(&self.logits_with(a_hat, x))
    }
}

impl Classifier for GcnModel {
    fn logits(&self, g: &Graph) -> Array2<f64> {
        self.logits_with(&normalize_adjacency(g), g.features())
    }
}

/// Multipliers (0 or `1 / (1 - p)`) for inverted dropout on both layer inputs.
#[derive(Debug, Clone)]
pub struct DropoutMasks {
    /// One multiplier per stored non-zero of `X`, in storage order.
    pub input: Vec<f64>,
    /// `n × hidden` multipliers for the hidden activations.
    pub hidden: Array2<f64>,
}

impl DropoutMasks {
    pub fn sample(x: &FeatureMatrix, hidden: usize, p: f64, rng: &mut ChaCha8Rng) -> Self {
        let keep = 1.0 / (1.0 - p);
        let mut draw = || if rng.gen::<f64>() < p { 0.0 } else { keep };
        let input = (0..x.nnz()).map(|_| draw()).collect();
        let hidden = Array2::from_shape_simple_fn((x.rows(), hidden), draw);
        Self { input, hidden }
    }
}

struct Forward {
    dropped_x: FeatureMatrix,
    pre: Array2<f64>,
    hidden_in: Array2<f64>,
    logits: Array2<f64>,
}

fn forward(
    a_hat: &CsrMatrix,
    x: &FeatureMatrix,
    w1: &Array2<f64>,
    w2: &Array2<f64>,
    masks: Option<&DropoutMasks>,
) -> Forward {
    let dropped_x = match masks {
        Some(m) => x.scaled(&m.input),
        None => x.clone(),
    };
    let pre = a_hat.matmul(&dropped_x.matmul(w1));
    let mut hidden_in = pre.mapv(|v| v.max(0.0));
    if let Some(m) = masks {
        hidden_in *= &m.hidden;
    }
    let logits = a_hat.matmul(&hidden_in.dot(w2));
    Forward {
        dropped_x,
        pre,
        hidden_in,
        logits,
    }
}

/// Training loss of the GCN: mean cross-entropy on the training nodes plus
/// `weight_decay / 2 · (‖W1‖² + ‖W2‖²)`.
pub struct GcnObjective<'a> {
    a_hat: CsrMatrix,
    x: &'a FeatureMatrix,
    train: &'a [usize],
    targets: Vec<usize>,
    weight_decay: f64,
}

impl<'a> GcnObjective<'a> {
    pub fn new(g: &'a Graph, train: &'a [usize], weight_decay: f64) -> Self {
        Self {
            a_hat: normalize_adjacency(g),
            x: g.features(),
            train,
            targets: train.iter().map(|&v| g.labels()[v]).collect(),
            weight_decay,
        }
    }

    /// Loss and gradients `(∂L/∂W1, ∂L/∂W2)`, optionally under fixed dropout masks.
    pub fn loss_and_gradient(
        &self,
        w1: &Array2<f64>,
        w2: &Array2<f64>,
        masks: Option<&DropoutMasks>,
    ) -> (f64, Array2<f64>, Array2<f64>) {
        let fwd = forward(&self.a_hat, self.x, w1, w2, masks);
        let (ce, g_logits) = cross_entropy(&fwd.logits, self.train, &self.targets);
        let loss = ce + 0.5 * self.weight_decay * (squared_norm(w1) + squared_norm(w2));

        // Â is symmetric, so Âᵀ G = Â G.
        let g_hw = self.a_hat.matmul(&g_logits);
        let mut g_w2 = fwd.hidden_in.t().dot(&g_hw);
        g_w2.scaled_add(self.weight_decay, w2);
        let mut g_hidden = g_hw.dot(&w2.t());
        if let Some(m) = masks {
            g_hidden *= &m.hidden;
        }
        g_hidden.zip_mut_with(&fwd.pre, |g, &p| {
            if p <= 0.0 {
                *g = 0.0;
            }
        });
        let g_xw = self.a_hat.matmul(&g_hidden);
        let mut g_w1 = fwd.dropped_x.transpose_matmul(&g_xw, None);
        g_w1.scaled_add(self.weight_decay, w1);
        (loss, g_w1, g_w2)
    }
}

/// Full-batch training with dropout; returns the epoch with the best validation
/// accuracy (earliest on ties), or the last epoch when there is no validation set.
pub fn train_gcn(g: &Graph, split: &DataSplit, cfg: &TrainConfig, hidden: usize) -> Result<GcnModel> {
    cfg.validate()?;
    if split.train.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    if hidden == 0 {
        return Err(Error::InvalidArgument("hidden width must be positive".into()));
    }
    let objective = GcnObjective::new(g, &split.train, cfg.weight_decay);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w1 = glorot(g.num_features(), hidden, &mut rng);
    let mut w2 = glorot(hidden, g.num_classes(), &mut rng);
    let mut opt = RmsStep::new(&[&w1, &w2]);

    let mut best: Option<(f64, Array2<f64>, Array2<f64>)> = None;
    for epoch in 0..cfg.epochs {
        let masks = (cfg.dropout > 0.0)
            .then(|| DropoutMasks::sample(g.features(), hidden, cfg.dropout, &mut rng));
        let (loss, g1, g2) = objective.loss_and_gradient(&w1, &w2, masks.as_ref());
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        opt.observe(&[&g1, &g2]);
        let mut next = opt.propose(&[&w1, &w2], &[&g1, &g2], cfg.step_size);
        w2 = next.pop().expect("two parameters");
        w1 = next.pop().expect("two parameters");

        if !split.val.is_empty() {
            let logits = forward(&objective.a_hat, g.features(), &w1, &w2, None).logits;
            let pred = Prediction::from_logits(&logits);
            let acc = accuracy(&pred.labels, g.labels(), &split.val);
            if best.as_ref().is_none_or(|(b, _, _)| acc > *b) {
                best = Some((acc, w1.clone(), w2.clone()));
            }
        }
    }
    if let Some((_, b1, b2)) = best {
        w1 = b1;
        w2 = b2;
    }
    Ok(GcnModel { w1, w2, seed: cfg.seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FeatureKind;
    use crate::models::evaluate_accuracy;

    #[test]
    fn one_hot_label_features_are_learned_exactly() {
        let n = 30;
        let labels: Vec<usize> = (0..n).map(|v| v % 3).collect();
        let f = FeatureMatrix::from_rows(3, labels.iter().map(|&l| vec![(l, 1.0)])).unwrap();
        let g = Graph::new(n, &[], f, labels, FeatureKind::Binary).unwrap();
        let split = DataSplit::new((0..9).collect(), (9..12).collect(), (12..n).collect());
        let model = train_gcn(&g, &split, &TrainConfig::gcn_default(), 16).unwrap();
        assert_eq!(evaluate_accuracy(&model, &g, &split.test).unwrap(), 1.0);
    }

    #[test]
    fn training_is_deterministic() {
        let n = 12;
        let labels: Vec<usize> = (0..n).map(|v| v % 2).collect();
        let f = FeatureMatrix::from_rows(4, (0..n).map(|v| vec![(v % 4, 1.0)])).unwrap();
        let edges: Vec<_> = (0..n - 1).map(|v| (v, v + 1)).collect();
        let g = Graph::new(n, &edges, f, labels, FeatureKind::Binary).unwrap();
        let split = DataSplit::new(vec![0, 1, 2, 3], vec![4, 5], (6..n).collect());
        let cfg = TrainConfig {
            epochs: 20,
            ..TrainConfig::gcn_default()
        };
        assert_eq!(train_gcn(&g, &split, &cfg, 8).unwrap(), train_gcn(&g, &split, &cfg, 8).unwrap());
    }
}
