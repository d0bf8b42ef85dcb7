//! End-to-end attack: train the surrogate once, sample budgets, then inject
//! nodes one at a time, each with generated features and GA-chosen neighbors.

mod evaluate;
mod report;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::budgets::{feature_budget, sample_link_budgets, AttackBudget};
use crate::error::{Error, Result};
use crate::featuregen::generate_features;
use crate::ga::{reference_labels, run_ga, FitnessContext, GaConfig, GenerationStats, LabelSource};
use crate::ga::Fitness;
use crate::graph::{inject_node, Graph, InjectionRecord};
use crate::models::{evaluate_accuracy, train_sgc, SgcModel, TrainConfig, Victim, VictimConfig};
use crate::rng::{mix, stream};
use crate::split::DataSplit;

pub use evaluate::{evaluate_poisoning, evaluate_victims, VictimAccuracy};
pub use report::{degree_histogram, imperceptibility_report, ImperceptibilityReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    /// Injected nodes as a fraction of the original node count.
    pub injection_ratio: f64,
    pub ga: GaConfig,
    pub label_source: LabelSource,
    pub victims: Vec<Victim>,
    pub seed: u64,
    pub surrogate: TrainConfig,
    pub victim_training: VictimConfig,
    /// Worker threads for fitness evaluation; 0 uses the global pool.
    #[serde(default)]
    pub workers: usize,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            injection_ratio: 0.05,
            ga: GaConfig::default(),
            label_source: LabelSource::Predicted,
            victims: Victim::ALL.to_vec(),
            seed: 0,
            surrogate: TrainConfig::sgc_default(),
            victim_training: VictimConfig::default(),
            workers: 0,
        }
    }
}

impl AttackConfig {
    /// Training settings for the victims, seeded from the run seed.
    pub fn victim_config(&self) -> VictimConfig {
        self.victim_training.with_seed(mix(self.seed, 4))
    }
}

/// `round(ratio × n)`, which must be at least 1.
pub fn injection_count(num_nodes: usize, ratio: f64) -> Result<usize> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::InvalidArgument(format!("injection ratio must be positive, got {ratio}")));
    }
    let n_in = (ratio * num_nodes as f64).round() as usize;
    if n_in == 0 {
        return Err(Error::InvalidArgument(format!(
            "injection ratio {ratio} yields no injected nodes for {num_nodes} nodes"
        )));
    }
    Ok(n_in)
}

/// Per-injection bookkeeping beyond the record itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionSummary {
    pub link_budget: usize,
    pub feature_shortfall: usize,
    pub label_attempts: usize,
    pub fitness: Fitness,
    pub trace: Vec<GenerationStats>,
}

#[derive(Debug, Clone)]
pub struct AttackResult {
    pub perturbed: Graph,
    pub injections: Vec<InjectionRecord>,
    pub summaries: Vec<InjectionSummary>,
    pub budget: AttackBudget,
    pub surrogate: SgcModel,
    pub accuracies: Vec<VictimAccuracy>,
    pub report: ImperceptibilityReport,
}

impl AttackResult {
    pub fn original_nodes(&self) -> usize {
        self.perturbed.original_nodes()
    }

    /// Surrogate test accuracy on the clean and on the perturbed graph.
    pub fn surrogate_accuracy(&self, split: &DataSplit) -> Result<(f64, f64)> {
        let clean = self.perturbed.original_graph();
        Ok((
            evaluate_accuracy(&self.surrogate, &clean, &split.test)?,
            evaluate_accuracy(&self.surrogate, &self.perturbed, &split.test)?,
        ))
    }
}

/// Runs `f` on a dedicated pool of `workers` threads (or the global pool for 0).
pub fn with_workers<T, F>(workers: usize, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// How each injected node picks its neighbors.
enum NeighborPolicy<'a> {
    Genetic(&'a GaConfig),
    Uniform,
}

struct Prepared {
    surrogate: SgcModel,
    labels: Vec<usize>,
    budget: AttackBudget,
}

fn prepare(g: &Graph, split: &DataSplit, cfg: &AttackConfig) -> Result<Prepared> {
    cfg.ga.validate()?;
    split.validate(g.num_nodes())?;
    if g.original_nodes() != g.num_nodes() {
        return Err(Error::InvalidArgument("attack input already contains injected nodes".into()));
    }
    let n_in = injection_count(g.num_nodes(), cfg.injection_ratio)?;
    let surrogate = train_sgc(g, split, &cfg.surrogate.with_seed(mix(cfg.seed, 1)))?;
    let labels = reference_labels(&surrogate, g, cfg.label_source);
    let budget = AttackBudget {
        feature_budget: feature_budget(g)?,
        link_budgets: sample_link_budgets(g, n_in, mix(cfg.seed, 2))?,
    };
    Ok(Prepared {
        surrogate,
        labels,
        budget,
    })
}

fn inject_all(g: &Graph, split: &DataSplit, cfg: &AttackConfig, policy: NeighborPolicy<'_>) -> Result<AttackResult> {
    let Prepared {
        surrogate,
        mut labels,
        budget,
    } = prepare(g, split, cfg)?;
    let classes = g.num_classes();
    let mut label_rng = stream(mix(cfg.seed, 3), 0);
    let mut current = g.clone();
    let mut injections = Vec::with_capacity(budget.link_budgets.len());
    let mut summaries = Vec::with_capacity(budget.link_budgets.len());

    for (i, &k) in budget.link_budgets.iter().enumerate() {
        let node_seed = mix(cfg.seed, 1_000 + i as u64);
        let mut chosen = None;
        let mut last_err = None;
        for attempt in 1..=classes {
            let label = label_rng.gen_range(0..classes);
            let generated = match generate_features(&current, &labels, label, budget.feature_budget) {
                Ok(f) => f,
                Err(e @ Error::EmptyClass(_)) => {
                    last_err = Some(e);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let ctx = FitnessContext::new(&surrogate, &current, split, &labels, &generated.row, label)?;
            let picked = match policy {
                NeighborPolicy::Genetic(ga) => run_ga(&ctx, k, &GaConfig { seed: node_seed, ..*ga })
                    .map(|out| (out.best.endpoints, out.best.fitness.expect("evaluated"), out.trace)),
                NeighborPolicy::Uniform => uniform_neighbors(&current, &labels, label, k, node_seed)
                    .map(|e| {
                        let f = ctx.evaluate(&e);
                        (e, f, Vec::new())
                    }),
            };
            match picked {
                Ok((endpoints, fitness, trace)) => {
                    chosen = Some((label, generated, endpoints, fitness, trace, attempt));
                    break;
                }
                Err(e @ (Error::NoCandidates(_) | Error::TooFewCandidates { .. })) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        let Some((label, generated, endpoints, fitness, trace, attempts)) = chosen else {
            return Err(last_err.expect("at least one class was tried"));
        };
        let record = InjectionRecord {
            injected_id: current.num_nodes(),
            assigned_label: label,
            features: generated.row,
            neighbors: endpoints,
        };
        current = inject_node(&current, &record)?;
        labels.push(label);
        injections.push(record);
        summaries.push(InjectionSummary {
            link_budget: k,
            feature_shortfall: generated.shortfall,
            label_attempts: attempts,
            fitness,
            trace,
        });
    }

    let accuracies = evaluate_victims(g, &current, split, &cfg.victims, &cfg.victim_config())?;
    let report = imperceptibility_report(g, &current);
    Ok(AttackResult {
        perturbed: current,
        injections,
        summaries,
        budget,
        surrogate,
        accuracies,
        report,
    })
}

/// `k` distinct original nodes whose reference label differs from `label`, uniformly at random.
fn uniform_neighbors(g: &Graph, labels: &[usize], label: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    let pool: Vec<usize> = (0..g.original_nodes()).filter(|&v| labels[v] != label).collect();
    if pool.is_empty() {
        return Err(Error::NoCandidates(label));
    }
    if pool.len() < k {
        return Err(Error::TooFewCandidates {
            available: pool.len(),
            budget: k,
        });
    }
    let mut rng = stream(seed, 0);
    let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Injects `round(ratio × n)` nodes with generated features and GA-selected
/// neighbors, then retrains every configured victim on the clean and perturbed graphs.
pub fn run_attack(g: &Graph, split: &DataSplit, cfg: &AttackConfig) -> Result<AttackResult> {
    with_workers(cfg.workers, || inject_all(g, split, cfg, NeighborPolicy::Genetic(&cfg.ga)))?
}

/// Same budgets, labels and features as [`run_attack`], but neighbors drawn
/// uniformly from the differently-labelled original nodes. A reference point
/// for how much the neighbor search contributes.
pub fn run_random_injection(g: &Graph, split: &DataSplit, cfg: &AttackConfig) -> Result<AttackResult> {
    with_workers(cfg.workers, || inject_all(g, split, cfg, NeighborPolicy::Uniform))?
}
