use rand::seq::{index, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FitnessContext, Individual};
use crate::error::{Error, Result};
use crate::ga::Fitness;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub node: usize,
    pub fitness: Fitness,
}

/// Scores every original node whose reference label differs from the injected
/// label by its single-link fitness and keeps the best `ceil(rate × count)`,
/// ordered by misclassified desc, TDNH desc, node id asc.
pub fn select_candidates(ctx: &FitnessContext<'_>, rate: f64) -> Result<Vec<ScoredCandidate>> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidArgument(format!("candidate rate must lie in (0, 1], got {rate}")));
    }
    let g = ctx.graph();
    let label = ctx.injected_label();
    let eligible: Vec<usize> = (0..g.original_nodes())
        .filter(|&v| ctx.labels()[v] != label)
        .collect();
    if eligible.is_empty() {
        return Err(Error::NoCandidates(label));
    }
    let mut scored: Vec<ScoredCandidate> = eligible
        .par_iter()
        .map(|&node| ScoredCandidate {
            node,
            fitness: ctx.evaluate(&[node]),
        })
        .collect();
    scored.sort_by(|a, b| b.fitness.rank_cmp(&a.fitness).then(a.node.cmp(&b.node)));
    let keep = ((rate * scored.len() as f64).ceil() as usize).clamp(1, scored.len());
    scored.truncate(keep);
    Ok(scored)
}

/// `size` individuals, each `k` distinct candidates drawn uniformly without replacement.
pub fn init_population<R: Rng>(candidates: &[usize], k: usize, size: usize, rng: &mut R) -> Result<Vec<Individual>> {
    if candidates.len() < k {
        return Err(Error::TooFewCandidates {
            available: candidates.len(),
            budget: k,
        });
    }
    Ok((0..size)
        .map(|_| {
            let picks = index::sample(rng, candidates.len(), k);
            Individual::new(picks.into_iter().map(|i| candidates[i]).collect())
        })
        .collect())
}

/// Replaces repeated endpoints with uniformly drawn unused candidates.
fn repair<R: Rng>(endpoints: &mut [usize], candidates: &[usize], rng: &mut R) {
    for i in 1..endpoints.len() {
        if endpoints[..i].contains(&endpoints[i]) {
            let unused: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|c| !endpoints.contains(c))
                .collect();
            endpoints[i] = *unused.choose(rng).expect("a repeated endpoint leaves a candidate unused");
        }
    }
}

/// Pairs individuals after a seeded shuffle; each pair swaps endpoint suffixes
/// past a uniform cut point with probability `rate`. Offspring replace their parents in place.
pub fn crossover<R: Rng>(population: &mut [Individual], rate: f64, candidates: &[usize], rng: &mut R) {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.shuffle(rng);
    for pair in order.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if rng.gen::<f64>() >= rate {
            continue;
        }
        let k = population[a].endpoints.len();
        if k < 2 {
            continue;
        }
        let cut = rng.gen_range(1..k);
        let (left, right) = if a < b {
            let (l, r) = population.split_at_mut(b);
            (&mut l[a], &mut r[0])
        } else {
            let (l, r) = population.split_at_mut(a);
            (&mut r[0], &mut l[b])
        };
        left.endpoints[cut..].swap_with_slice(&mut right.endpoints[cut..]);
        for child in [left, right] {
            repair(&mut child.endpoints, candidates, rng);
            child.fitness = None;
        }
    }
}

/// With probability `rate` per individual, swaps one uniformly chosen endpoint
/// for a uniformly chosen unused candidate. Returns how many selected
/// individuals were left unchanged because no unused candidate existed.
pub fn mutate<R: Rng>(population: &mut [Individual], rate: f64, candidates: &[usize], rng: &mut R) -> usize {
    let mut skipped = 0;
    for ind in population.iter_mut() {
        if rng.gen::<f64>() >= rate {
            continue;
        }
        let unused: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|c| !ind.endpoints.contains(c))
            .collect();
        if unused.is_empty() || ind.endpoints.is_empty() {
            skipped += 1;
            continue;
        }
        let pos = rng.gen_range(0..ind.endpoints.len());
        ind.endpoints[pos] = *unused.choose(rng).expect("non-empty");
        ind.fitness = None;
    }
    skipped
}

/// Keeps the single best individual, then fills up to `size` with winners of
/// uniform size-2 tournaments. Exact fitness ties are settled by a coin flip.
pub fn tournament_select<R: Rng>(population: &[Individual], size: usize, rng: &mut R) -> Vec<Individual> {
    let elite = population
        .iter()
        .reduce(|best, ind| if ind.rank_cmp(best).is_gt() { ind } else { best })
        .expect("non-empty population");
    let mut next = Vec::with_capacity(size);
    next.push(elite.clone());
    while next.len() < size {
        let a = &population[rng.gen_range(0..population.len())];
        let b = &population[rng.gen_range(0..population.len())];
        let winner = match a.rank_cmp(b) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => {
                if rng.gen_bool(0.5) {
                    a
                } else {
                    b
                }
            }
        };
        next.push(winner.clone());
    }
    next
}
