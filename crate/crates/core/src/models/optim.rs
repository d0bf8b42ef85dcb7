use ndarray::Array2;

/// Momentum-free adaptive step: each parameter is scaled by a bias-corrected
/// running RMS of its own gradient.
#[derive(Debug, Clone)]
pub(crate) struct RmsStep {
    squares: Vec<Array2<f64>>,
    steps: i32,
}

const DECAY: f64 = 0.999;
const EPS: f64 = 1e-8;

impl RmsStep {
    pub fn new(shapes: &[&Array2<f64>]) -> Self {
        Self {
            squares: shapes.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            steps: 0,
        }
    }

    /// Folds a new gradient into the running second moments.
    pub fn observe(&mut self, grads: &[&Array2<f64>]) {
        self.steps += 1;
        for (sq, g) in self.squares.iter_mut().zip(grads) {
            sq.zip_mut_with(g, |s, &gi| *s = DECAY * *s + (1.0 - DECAY) * gi * gi);
        }
    }

    /// Parameters after one step of size `lr` along the observed moments.
    pub fn propose(&self, params: &[&Array2<f64>], grads: &[&Array2<f64>], lr: f64) -> Vec<Array2<f64>> {
        let correction = 1.0 - DECAY.powi(self.steps);
        params
            .iter()
            .zip(grads)
            .zip(&self.squares)
            .map(|((w, g), sq)| {
                let mut out = (*w).clone();
                ndarray::Zip::from(&mut out).and(*g).and(sq).for_each(|o, &gi, &s| {
                    *o -= lr * gi / ((s / correction).sqrt() + EPS);
                });
                out
            })
            .collect()
    }
}
