//! Genetic search for the neighbors of one injected node.
//!
//! Individuals are endpoint sets of a fixed size. Candidates are the original
//! nodes whose reference label differs from the injected label, ranked by
//! their single-link fitness and cut to the top fraction. The population then
//! goes through crossover, mutation, fitness evaluation and tournament
//! selection with elitism for a fixed number of generations.

mod fitness;
mod operators;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::models::{Classifier, SgcModel};
use crate::rng;

pub use fitness::{evaluate_fitness, score_single_link, Fitness, FitnessContext};
pub use operators::{crossover, init_population, mutate, select_candidates, tournament_select, ScoredCandidate};

/// Where reference labels come from: surrogate predictions or ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelSource {
    Predicted,
    GroundTruth,
}

impl std::str::FromStr for LabelSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "predicted" => Ok(LabelSource::Predicted),
            "ground-truth" | "ground_truth" | "truth" => Ok(LabelSource::GroundTruth),
            other => Err(Error::InvalidArgument(format!("unknown label source `{other}`"))),
        }
    }
}

/// Reference labels for every node of `g`. With predicted labels, original
/// nodes take the surrogate's prediction on the original graph and injected
/// nodes keep their assigned label.
pub fn reference_labels(surrogate: &SgcModel, g: &Graph, source: LabelSource) -> Vec<usize> {
    match source {
        LabelSource::GroundTruth => g.labels().to_vec(),
        LabelSource::Predicted => {
            let clean = g.original_graph();
            let mut labels = surrogate.predict(&clean).labels;
            labels.extend_from_slice(&g.labels()[g.original_nodes()..]);
            labels
        }
    }
}

/// One candidate endpoint set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub endpoints: Vec<usize>,
    pub fitness: Option<Fitness>,
}

impl Individual {
    pub fn new(endpoints: Vec<usize>) -> Self {
        Self {
            endpoints,
            fitness: None,
        }
    }

    fn rank_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let a = self.fitness.expect("individual evaluated");
        let b = other.fitness.expect("individual evaluated");
        a.rank_cmp(&b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    /// Fraction of ranked candidates kept, in (0, 1].
    pub candidate_rate: f64,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub population_size: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            candidate_rate: 0.5,
            crossover_rate: 0.5,
            mutation_rate: 0.3,
            population_size: 40,
            max_iterations: 100,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.candidate_rate > 0.0 && self.candidate_rate <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "candidate rate must lie in (0, 1], got {}",
                self.candidate_rate
            )));
        }
        for (name, r) in [("crossover", self.crossover_rate), ("mutation", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidArgument(format!("{name} rate must lie in [0, 1], got {r}")));
            }
        }
        if self.population_size < 2 {
            return Err(Error::InvalidArgument("population size must be at least 2".into()));
        }
        Ok(())
    }
}

/// Per-generation summary for trace files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: Fitness,
    pub mean_misclassified: f64,
}

#[derive(Debug, Clone)]
pub struct GaOutcome {
    /// Best individual seen in any generation, endpoints sorted.
    pub best: Individual,
    pub candidates: Vec<ScoredCandidate>,
    pub trace: Vec<GenerationStats>,
    /// Mutations skipped because no unused candidate was left.
    pub mutation_skips: usize,
}

const STREAM_INIT: u64 = 0;
const STREAM_CROSSOVER: u64 = 1;
const STREAM_MUTATION: u64 = 2;
const STREAM_SELECTION: u64 = 3;

fn op_stream(seed: u64, generation: usize, op: u64) -> rand_chacha::ChaCha8Rng {
    rng::stream(seed, ((generation as u64) << 2) | op)
}

fn best_of(population: &[Individual]) -> &Individual {
    population
        .iter()
        .reduce(|best, ind| if ind.rank_cmp(best).is_gt() { ind } else { best })
        .expect("non-empty population")
}

fn stats(generation: usize, best: &Individual, population: &[Individual]) -> GenerationStats {
    let total: usize = population
        .iter()
        .map(|i| i.fitness.expect("evaluated").misclassified)
        .sum();
    GenerationStats {
        generation,
        best: best.fitness.expect("evaluated"),
        mean_misclassified: total as f64 / population.len() as f64,
    }
}

/// Searches `link_budget` endpoints for the node described by `ctx`.
pub fn run_ga(ctx: &FitnessContext<'_>, link_budget: usize, cfg: &GaConfig) -> Result<GaOutcome> {
    cfg.validate()?;
    if link_budget == 0 {
        return Err(Error::InvalidArgument("link budget must be at least 1".into()));
    }
    let candidates = select_candidates(ctx, cfg.candidate_rate)?;
    let pool: Vec<usize> = candidates.iter().map(|c| c.node).collect();

    let mut population = init_population(
        &pool,
        link_budget,
        cfg.population_size,
        &mut op_stream(cfg.seed, 0, STREAM_INIT),
    )?;
    evaluate_fitness(&mut population, ctx);
    let mut best = best_of(&population).clone();
    let mut trace = vec![stats(0, &best, &population)];
    let mut mutation_skips = 0;

    for generation in 1..=cfg.max_iterations {
        crossover(
            &mut population,
            cfg.crossover_rate,
            &pool,
            &mut op_stream(cfg.seed, generation, STREAM_CROSSOVER),
        );
        mutation_skips += mutate(
            &mut population,
            cfg.mutation_rate,
            &pool,
            &mut op_stream(cfg.seed, generation, STREAM_MUTATION),
        );
        evaluate_fitness(&mut population, ctx);
        let leader = best_of(&population);
        if leader.rank_cmp(&best).is_gt() {
            best = leader.clone();
        }
        trace.push(stats(generation, &best, &population));
        population = tournament_select(
            &population,
            cfg.population_size,
            &mut op_stream(cfg.seed, generation, STREAM_SELECTION),
        );
    }
    best.endpoints.sort_unstable();
    Ok(GaOutcome {
        best,
        candidates,
        trace,
        mutation_skips,
    })
}

/// Writes trace rows as CSV: `injection,generation,best_misclassified,best_tdnh,mean_misclassified`.
pub fn write_trace<W: Write>(mut w: W, rows: &[(usize, GenerationStats)]) -> Result<()> {
    writeln!(w, "injection,generation,best_misclassified,best_tdnh,mean_misclassified")?;
    for (injection, s) in rows {
        writeln!(
            w,
            "{injection},{},{},{:.16e},{:.16e}",
            s.generation, s.best.misclassified, s.best.tdnh, s.mean_misclassified
        )?;
    }
    Ok(())
}
