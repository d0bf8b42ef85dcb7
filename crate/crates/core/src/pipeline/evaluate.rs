use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::models::{evaluate_accuracy, train_victim, Victim, VictimConfig};
use crate::split::DataSplit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VictimAccuracy {
    pub victim: Victim,
    pub clean: f64,
    pub poisoned: f64,
}

/// Trains `victim` from scratch on `clean` and on `perturbed` with the same
/// split and seed and returns both test accuracies. Injected nodes belong to
/// no split part, so they only act through the graph structure.
pub fn evaluate_poisoning(
    clean: &Graph,
    perturbed: &Graph,
    split: &DataSplit,
    victim: Victim,
    cfg: &VictimConfig,
) -> Result<(f64, f64)> {
    if perturbed.original_nodes() != clean.num_nodes() {
        return Err(Error::InvalidArgument(format!(
            "perturbed graph has {} original nodes, clean graph has {}",
            perturbed.original_nodes(),
            clean.num_nodes()
        )));
    }
    split.validate(clean.num_nodes())?;
    let on_clean = train_victim(victim, clean, split, cfg)?;
    let clean_acc = evaluate_accuracy(on_clean.as_ref(), clean, &split.test)?;
    let on_perturbed = train_victim(victim, perturbed, split, cfg)?;
    let poisoned_acc = evaluate_accuracy(on_perturbed.as_ref(), perturbed, &split.test)?;
    Ok((clean_acc, poisoned_acc))
}

pub fn evaluate_victims(
    clean: &Graph,
    perturbed: &Graph,
    split: &DataSplit,
    victims: &[Victim],
    cfg: &VictimConfig,
) -> Result<Vec<VictimAccuracy>> {
    victims
        .iter()
        .map(|&victim| {
            let (clean, poisoned) = evaluate_poisoning(clean, perturbed, split, victim, cfg)?;
            Ok(VictimAccuracy {
                victim,
                clean,
                poisoned,
            })
        })
        .collect()
}
