//! Dataset exchange format and attack output files.
//!
//! A dataset is a JSON manifest next to three CSV files, each with a single
//! header row and LF line endings:
//!
//! * edges: `u,v`, one undirected pair per row with `u < v`
//! * features: `node,index,value`, non-zero entries only
//! * labels: `label`, one row per node in id order
//!
//! Floats are written with 17 significant digits so a save/load round trip
//! reproduces every `f64` bit for bit.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::{write_trace, GenerationStats};
use crate::graph::{FeatureKind, FeatureMatrix, Graph};
use crate::pipeline::{AttackConfig, AttackResult};
use crate::split::DataSplit;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub num_nodes: usize,
    pub num_features: usize,
    pub num_classes: usize,
    pub feature_kind: FeatureKind,
    /// Paths are relative to the manifest's directory.
    pub edges: PathBuf,
    pub features: PathBuf,
    pub labels: PathBuf,
    /// Present on perturbed graphs: nodes from this id on are injected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_nodes: Option<usize>,
}

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn dataset_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Dataset {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| dataset_err(path, e.to_string()))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path)?)))
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: u64, field: Option<&str>, what: &str) -> Result<T> {
    let raw = field.ok_or_else(|| dataset_err(path, format!("line {line}: missing {what}")))?;
    raw.trim()
        .parse()
        .map_err(|_| dataset_err(path, format!("line {line}: cannot parse {what} `{raw}`")))
}

fn read_records(path: &Path, width: usize) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut rows = Vec::new();
    for (i, rec) in reader(path)?.records().enumerate() {
        let rec = rec.map_err(|e| dataset_err(path, e.to_string()))?;
        // header is line 1
        let line = i as u64 + 2;
        if rec.len() != width {
            return Err(dataset_err(path, format!("line {line}: expected {width} columns, found {}", rec.len())));
        }
        rows.push((line, rec));
    }
    Ok(rows)
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let file = File::open(path).map_err(|e| dataset_err(path, e.to_string()))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| dataset_err(path, e.to_string()))
}

/// Loads the graph described by the manifest at `manifest_path`.
pub fn load_dataset(manifest_path: &Path) -> Result<(DatasetManifest, Graph)> {
    let manifest = read_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let n = manifest.num_nodes;

    let edges_path = base.join(&manifest.edges);
    let mut edges = Vec::new();
    for (line, rec) in read_records(&edges_path, 2)? {
        let u: usize = parse_field(&edges_path, line, rec.get(0), "source")?;
        let v: usize = parse_field(&edges_path, line, rec.get(1), "target")?;
        if u >= n || v >= n {
            return Err(dataset_err(&edges_path, format!("line {line}: edge ({u}, {v}) outside {n} nodes")));
        }
        edges.push((u, v));
    }

    let features_path = base.join(&manifest.features);
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (line, rec) in read_records(&features_path, 3)? {
        let v: usize = parse_field(&features_path, line, rec.get(0), "node")?;
        let j: usize = parse_field(&features_path, line, rec.get(1), "index")?;
        let x: f64 = parse_field(&features_path, line, rec.get(2), "value")?;
        if v >= n {
            return Err(dataset_err(&features_path, format!("line {line}: node {v} outside {n} nodes")));
        }
        if j >= manifest.num_features {
            return Err(dataset_err(
                &features_path,
                format!("line {line}: index {j} outside {} features", manifest.num_features),
            ));
        }
        if !x.is_finite() || x < 0.0 {
            return Err(dataset_err(&features_path, format!("line {line}: invalid feature value {x}")));
        }
        rows[v].push((j, x));
    }
    let features =
        FeatureMatrix::from_rows(manifest.num_features, rows).map_err(|e| dataset_err(&features_path, e.to_string()))?;

    let labels_path = base.join(&manifest.labels);
    let mut labels = Vec::with_capacity(n);
    for (line, rec) in read_records(&labels_path, 1)? {
        labels.push(parse_field::<usize>(&labels_path, line, rec.get(0), "label")?);
    }
    if labels.len() != n {
        return Err(dataset_err(&labels_path, format!("{} labels for {n} nodes", labels.len())));
    }

    let mut graph = Graph::new(n, &edges, features, labels, manifest.feature_kind)
        .map_err(|e| dataset_err(manifest_path, e.to_string()))?;
    if graph.num_classes() != manifest.num_classes {
        return Err(dataset_err(
            manifest_path,
            format!("manifest declares {} classes, labels use {}", manifest.num_classes, graph.num_classes()),
        ));
    }
    if let Some(original) = manifest.original_nodes {
        graph = graph
            .with_original_nodes(original)
            .map_err(|e| dataset_err(manifest_path, e.to_string()))?;
    }
    Ok((manifest, graph))
}

/// Writes `g` as `dir/manifest.json` plus `edges.csv`, `features.csv` and
/// `labels.csv`, returning the manifest path.
pub fn save_dataset(g: &Graph, name: &str, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let manifest = DatasetManifest {
        name: name.to_string(),
        num_nodes: g.num_nodes(),
        num_features: g.num_features(),
        num_classes: g.num_classes(),
        feature_kind: g.feature_kind(),
        edges: "edges.csv".into(),
        features: "features.csv".into(),
        labels: "labels.csv".into(),
        original_nodes: (g.original_nodes() != g.num_nodes()).then_some(g.original_nodes()),
    };

    let mut w = writer(&dir.join(&manifest.edges))?;
    w.write_record(["u", "v"])?;
    for (u, v) in g.edges() {
        w.write_record([u.to_string(), v.to_string()])?;
    }
    w.flush()?;

    let mut w = writer(&dir.join(&manifest.features))?;
    w.write_record(["node", "index", "value"])?;
    let x = g.features();
    for v in 0..x.rows() {
        let (idx, val) = x.row(v);
        for (&j, &value) in idx.iter().zip(val) {
            w.write_record([v.to_string(), j.to_string(), format_float(value)])?;
        }
    }
    w.flush()?;

    let mut w = writer(&dir.join(&manifest.labels))?;
    w.write_record(["label"])?;
    for l in g.labels() {
        w.write_record([l.to_string()])?;
    }
    w.flush()?;

    let path = dir.join(MANIFEST_FILE);
    write_json(&path, &manifest)?;
    Ok(path)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| dataset_err(path, e.to_string()))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| dataset_err(path, e.to_string()))
}

/// File names inside an attack output directory.
pub mod layout {
    pub const GRAPH_DIR: &str = "perturbed";
    pub const INJECTIONS: &str = "injections.json";
    pub const ACCURACY: &str = "accuracy.csv";
    pub const REPORT: &str = "report.json";
    pub const DEGREE_HISTOGRAM: &str = "degree_histogram.csv";
    pub const SPLIT: &str = "split.json";
    pub const CONFIG: &str = "config.json";
    pub const TRACE: &str = "trace.csv";
}

/// Accuracy table rows: `victim,clean,poisoned`.
pub fn write_accuracy_table(path: &Path, rows: &[crate::pipeline::VictimAccuracy]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["victim", "clean", "poisoned"])?;
    for r in rows {
        w.write_record([r.victim.name().to_string(), format_float(r.clean), format_float(r.poisoned)])?;
    }
    w.flush()?;
    Ok(())
}

/// Degree histogram rows: `degree,clean,perturbed`, over the union of observed degrees.
pub fn write_degree_histogram(path: &Path, report: &crate::pipeline::ImperceptibilityReport) -> Result<()> {
    let degrees: std::collections::BTreeSet<usize> = report
        .clean_degrees
        .keys()
        .chain(report.perturbed_degrees.keys())
        .copied()
        .collect();
    let mut w = writer(path)?;
    w.write_record(["degree", "clean", "perturbed"])?;
    for d in degrees {
        w.write_record([
            d.to_string(),
            report.clean_degrees.get(&d).copied().unwrap_or(0).to_string(),
            report.perturbed_degrees.get(&d).copied().unwrap_or(0).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every output of an attack run into `dir`. The trace file is only
/// written when `with_trace` is set.
pub fn save_attack_result(
    dir: &Path,
    name: &str,
    result: &AttackResult,
    split: &DataSplit,
    cfg: &AttackConfig,
    with_trace: bool,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    save_dataset(&result.perturbed, name, &dir.join(layout::GRAPH_DIR))?;
    write_json(&dir.join(layout::INJECTIONS), &result.injections)?;
    write_accuracy_table(&dir.join(layout::ACCURACY), &result.accuracies)?;
    write_json(&dir.join(layout::REPORT), &result.report)?;
    write_degree_histogram(&dir.join(layout::DEGREE_HISTOGRAM), &result.report)?;
    write_json(&dir.join(layout::SPLIT), split)?;
    write_json(&dir.join(layout::CONFIG), cfg)?;
    if with_trace {
        let rows: Vec<(usize, GenerationStats)> = result
            .summaries
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.trace.iter().map(move |&t| (i, t)))
            .collect();
        write_trace(BufWriter::new(File::create(dir.join(layout::TRACE))?), &rows)?;
    }
    Ok(())
}
