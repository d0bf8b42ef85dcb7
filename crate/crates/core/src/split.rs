use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disjoint train / validation / test node sets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSplit {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl DataSplit {
    pub fn new(train: Vec<usize>, val: Vec<usize>, test: Vec<usize>) -> Self {
        Self { train, val, test }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks disjointness and that every index is below `num_nodes`.
    pub fn validate(&self, num_nodes: usize) -> Result<()> {
        let mut owner = vec![false; num_nodes];
        for &v in self.train.iter().chain(&self.val).chain(&self.test) {
            if v >= num_nodes {
                return Err(Error::InvalidArgument(format!(
                    "split index {v} out of range for {num_nodes} nodes"
                )));
            }
            if owner[v] {
                return Err(Error::InvalidArgument(format!(
                    "node {v} appears in more than one split part"
                )));
            }
            owner[v] = true;
        }
        Ok(())
    }

    pub fn test_mask(&self, num_nodes: usize) -> Vec<bool> {
        let mut mask = vec![false; num_nodes];
        for &v in &self.test {
            mask[v] = true;
        }
        mask
    }
}

/// Train / validation / test fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.1,
            val: 0.1,
            test: 0.8,
        }
    }
}

/// Seeded uniform shuffle of `0..num_nodes`, cut into train/val/test by `ratios`.
/// Train and validation sizes are rounded; the remainder goes to test.
pub fn make_split(num_nodes: usize, ratios: SplitRatios, seed: u64) -> Result<DataSplit> {
    let SplitRatios { train, val, test } = ratios;
    if [train, val, test].iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(Error::InvalidArgument(format!(
            "split ratios must lie in [0, 1], got ({train}, {val}, {test})"
        )));
    }
    if train + val + test > 1.0 + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "split ratios sum to {} > 1",
            train + val + test
        )));
    }
    let mut order: Vec<usize> = (0..num_nodes).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((train * num_nodes as f64).round() as usize).min(num_nodes);
    let n_val = ((val * num_nodes as f64).round() as usize).min(num_nodes - n_train);
    let n_test = if (train + val + test - 1.0).abs() < 1e-9 {
        num_nodes - n_train - n_val
    } else {
        ((test * num_nodes as f64).round() as usize).min(num_nodes - n_train - n_val)
    };
    let mut parts = order.chunks(1).map(|c| c[0]);
    let mut take = |k: usize| -> Vec<usize> {
        let mut v: Vec<usize> = parts.by_ref().take(k).collect();
        v.sort_unstable();
        v
    };
    let train = take(n_train);
    let val = take(n_val);
    let test = take(n_test);
    Ok(DataSplit { train, val, test })
}
