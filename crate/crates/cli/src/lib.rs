//! Command-line surface for the node-injection attack.
//!
//! Every subcommand writes its results to stdout (and to files for `attack`).
//! Failures print one JSON line `{"error": <kind>, "message": <text>}` to
//! stderr and exit with 2 for usage errors or 1 for anything else.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nodeinject::graph::largest_connected_component;
use nodeinject::homophily::average_homophily;
use nodeinject::io::{self, layout, DatasetManifest, MANIFEST_FILE};
use nodeinject::pipeline::{evaluate_victims, imperceptibility_report, run_attack};
use nodeinject::synthetic::{planted_partition, PlantedPartition};
use nodeinject::{
    make_split, AttackConfig, DataSplit, FeatureKind, GaConfig, Graph, LabelSource, SplitRatios, TrainConfig, Victim,
    VictimConfig,
};

/// Environment variable naming the directory that holds `<name>/manifest.json` datasets.
pub const DATA_ENV: &str = "NODEINJECT_DATA";

#[derive(Debug, Parser)]
#[command(name = "nodeinject", version, about = "Node-injection poisoning attacks on graph classifiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inject nodes into a dataset and measure victim accuracy before and after.
    Attack(AttackArgs),
    /// Retrain victims on a saved attack output and print the accuracy table.
    Evaluate(RunArgs),
    /// Print the imperceptibility report of a saved attack output.
    Report(RunArgs),
    /// Print the average node homophily of a dataset.
    Homophily(DatasetArgs),
    /// Print node, link and feature counts of a dataset.
    Stats(DatasetArgs),
    /// Write a planted-partition dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Manifest path, dataset directory, or a name under $NODEINJECT_DATA.
    #[arg(long)]
    pub dataset: String,
    /// Use the whole graph instead of its largest connected component.
    #[arg(long)]
    pub full_graph: bool,
}

fn positive_ratio(s: &str) -> std::result::Result<f64, String> {
    let r: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if r > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(format!("must be positive, got {r}"))
    }
}

fn probability(s: &str) -> std::result::Result<f64, String> {
    let r: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&r) {
        Ok(r)
    } else {
        Err(format!("must lie in [0, 1], got {r}"))
    }
}

fn candidate_rate(s: &str) -> std::result::Result<f64, String> {
    let r = probability(s)?;
    if r > 0.0 {
        Ok(r)
    } else {
        Err("must lie in (0, 1]".into())
    }
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Injected nodes as a fraction of the node count.
    #[arg(long, default_value_t = 0.05, value_parser = positive_ratio)]
    pub ratio: f64,
    /// Fraction of ranked candidate endpoints kept for the search.
    #[arg(long, default_value_t = 0.5, value_parser = candidate_rate)]
    pub alpha: f64,
    /// Crossover probability.
    #[arg(long, default_value_t = 0.5, value_parser = probability)]
    pub pc: f64,
    /// Mutation probability.
    #[arg(long, default_value_t = 0.3, value_parser = probability)]
    pub pm: f64,
    /// Population size.
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u64).range(2..))]
    pub pop: u64,
    /// Generations per injected node.
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Reference labels for candidate filtering and homophily: predicted or ground-truth.
    #[arg(long, default_value = "predicted")]
    pub label_source: LabelSource,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed of the 10/10/80 train/validation/test split.
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    /// Victim models to retrain, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "gcn,sgc,jaccard")]
    pub victims: Vec<Victim>,
    /// Fitness worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Also write a per-generation trace CSV.
    #[arg(long)]
    pub trace: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Directory written by `attack`.
    #[arg(long)]
    pub run: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 300)]
    pub nodes: usize,
    #[arg(long, default_value_t = 4)]
    pub classes: usize,
    #[arg(long, default_value_t = 64)]
    pub features: usize,
    #[arg(long, default_value_t = 0.04, value_parser = probability)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.004, value_parser = probability)]
    pub p_out: f64,
    #[arg(long, default_value_t = 0.2, value_parser = probability)]
    pub signal: f64,
    #[arg(long, default_value_t = 0.02, value_parser = probability)]
    pub noise: f64,
    #[arg(long)]
    pub continuous: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "synthetic")]
    pub name: String,
    #[arg(long)]
    pub out: PathBuf,
}

/// Directory searched for named datasets.
pub fn data_root() -> PathBuf {
    std::env::var_os(DATA_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// Resolves a manifest path, a dataset directory, or a dataset name.
pub fn resolve_dataset(name: &str) -> PathBuf {
    let path = Path::new(name);
    if path.is_file() {
        path.to_path_buf()
    } else if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        data_root().join(name).join(MANIFEST_FILE)
    }
}

/// Loads a dataset and, unless `full_graph` is set, keeps its largest connected component.
pub fn load(args: &DatasetArgs) -> Result<(DatasetManifest, Graph)> {
    let path = resolve_dataset(&args.dataset);
    let (manifest, g) = io::load_dataset(&path)?;
    if args.full_graph {
        return Ok((manifest, g));
    }
    let (lcc, _) = largest_connected_component(&g, &DataSplit::default())?;
    Ok((manifest, lcc))
}

#[derive(Debug, Serialize)]
struct Stats<'a> {
    name: &'a str,
    nodes: usize,
    links: usize,
    features: usize,
    classes: usize,
    feature_kind: FeatureKind,
}

fn attack_config(args: &AttackArgs) -> AttackConfig {
    AttackConfig {
        injection_ratio: args.ratio,
        ga: GaConfig {
            candidate_rate: args.alpha,
            crossover_rate: args.pc,
            mutation_rate: args.pm,
            population_size: args.pop as usize,
            max_iterations: args.iters,
            seed: 0,
        },
        label_source: args.label_source,
        victims: args.victims.clone(),
        seed: args.seed,
        surrogate: TrainConfig::sgc_default(),
        victim_training: VictimConfig::default(),
        workers: args.workers,
    }
}

fn write_accuracy_csv(out: &mut dyn Write, rows: &[nodeinject::pipeline::VictimAccuracy]) -> Result<()> {
    writeln!(out, "victim,clean,poisoned")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            r.victim.name(),
            io::format_float(r.clean),
            io::format_float(r.poisoned)
        )?;
    }
    Ok(())
}

fn load_run(dir: &Path) -> Result<(Graph, DataSplit, AttackConfig)> {
    let (_, perturbed) = io::load_dataset(&dir.join(layout::GRAPH_DIR).join(MANIFEST_FILE))?;
    let split: DataSplit = io::read_json(&dir.join(layout::SPLIT))?;
    let cfg: AttackConfig = io::read_json(&dir.join(layout::CONFIG))?;
    Ok((perturbed, split, cfg))
}

/// Executes one parsed command, writing human output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Attack(args) => {
            let (manifest, g) = load(&args.data)?;
            let split = make_split(g.num_nodes(), SplitRatios::default(), args.split_seed)?;
            let cfg = attack_config(&args);
            let result = run_attack(&g, &split, &cfg)?;
            io::save_attack_result(&args.out, &manifest.name, &result, &split, &cfg, args.trace)
                .with_context(|| format!("writing results to {}", args.out.display()))?;
            write_accuracy_csv(out, &result.accuracies)?;
        }
        Command::Evaluate(args) => {
            let (perturbed, split, cfg) = load_run(&args.run)?;
            let clean = perturbed.original_graph();
            let rows = evaluate_victims(&clean, &perturbed, &split, &cfg.victims, &cfg.victim_config())?;
            write_accuracy_csv(out, &rows)?;
        }
        Command::Report(args) => {
            let (perturbed, _, _) = load_run(&args.run)?;
            let report = imperceptibility_report(&perturbed.original_graph(), &perturbed);
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
        Command::Homophily(args) => {
            let (_, g) = load(&args)?;
            writeln!(out, "{:.4}", average_homophily(&g, g.labels()))?;
        }
        Command::Stats(args) => {
            let (manifest, g) = load(&args)?;
            let stats = Stats {
                name: &manifest.name,
                nodes: g.num_nodes(),
                links: g.num_edges(),
                features: g.num_features(),
                classes: g.num_classes(),
                feature_kind: g.feature_kind(),
            };
            serde_json::to_writer(&mut *out, &stats)?;
            writeln!(out)?;
        }
        Command::Synth(args) => {
            let cfg = PlantedPartition {
                nodes: args.nodes,
                classes: args.classes,
                p_in: args.p_in,
                p_out: args.p_out,
                features: args.features,
                signal: args.signal,
                noise: args.noise,
                feature_kind: if args.continuous {
                    FeatureKind::Continuous
                } else {
                    FeatureKind::Binary
                },
                seed: args.seed,
            };
            let g = planted_partition(&cfg)?;
            let path = io::save_dataset(&g, &args.name, &args.out)?;
            writeln!(out, "{}", path.display())?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ErrorLine<'a> {
    error: &'a str,
    message: String,
}

fn error_line(err: &mut dyn Write, kind: &str, message: String) {
    let line = serde_json::to_string(&ErrorLine { error: kind, message }).expect("plain strings serialize");
    let _ = writeln!(err, "{line}");
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ")
                .to_string();
            error_line(err, "usage", first);
            return 2;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let (kind, code) = match e.downcast_ref::<nodeinject::Error>() {
                Some(inner @ nodeinject::Error::InvalidArgument(_)) => (inner.kind(), 2),
                Some(inner) => (inner.kind(), 1),
                None => ("internal", 1),
            };
            let message = format!("{e:#}").replace('\n', " ");
            error_line(err, kind, message);
            code
        }
    }
}
