//! Node-injection poisoning attacks on graph node classifiers.
//!
//! The attack adds new nodes to an attributed graph, one at a time. Each new
//! node gets a class label, a feature vector built from statistics of that
//! class, and a set of neighbors found by a genetic search. The search scores
//! a neighbor set by how many test nodes a frozen linear surrogate then
//! misclassifies, breaking ties by the drop in node homophily the links cause.
//! Victim models are retrained on the poisoned graph to measure the damage.
//!
//! Module map:
//!
//! * [`graph`]: sparse attributed graphs, normalized propagation, node injection
//! * [`homophily`]: node homophily and its change under an injected link
//! * [`models`]: SGC surrogate, GCN and Jaccard-GCN victims, model files
//! * [`budgets`]: feature and per-node link budgets
//! * [`featuregen`]: class-statistics feature generation
//! * [`ga`]: candidate selection, genetic operators and fitness evaluation
//! * [`pipeline`]: the end-to-end attack and its evaluation
//! * [`io`]: dataset exchange format and output files

pub mod budgets;
pub mod error;
pub mod featuregen;
pub mod ga;
pub mod graph;
pub mod homophily;
pub mod io;
pub mod models;
pub mod pipeline;
pub mod rng;
pub mod split;
pub mod synthetic;

pub use budgets::AttackBudget;
pub use error::{Error, Result};
pub use ga::{GaConfig, LabelSource};
pub use graph::{FeatureKind, FeatureMatrix, FeatureRow, Graph, InjectionRecord};
pub use models::{Classifier, TrainConfig, Victim, VictimConfig};
pub use pipeline::{run_attack, AttackConfig, AttackResult};
pub use split::{make_split, DataSplit, SplitRatios};
