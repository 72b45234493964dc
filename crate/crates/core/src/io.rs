//! Dataset directory reader and writer.
//!
//! A dataset directory holds:
//!
//! * `edges.tsv`: one undirected edge per line, `src<TAB>dst`, 0-indexed.
//!   Either every edge appears once, or every edge appears in both
//!   directions. Mixing the two is rejected.
//! * `features.csv`: `N` lines of `d` comma-separated reals.
//! * `labels.txt`: optional, `N` lines with one integer each.
//! * `meta.json`: `{"num_nodes": N, "num_clusters": K, "name": "..."}`.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::Graph;

pub const EDGES_FILE: &str = "edges.tsv";
pub const FEATURES_FILE: &str = "features.csv";
pub const LABELS_FILE: &str = "labels.txt";
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DatasetMeta {
    pub num_nodes: usize,
    pub num_clusters: usize,
    pub name: String,
}

fn open_lines(path: &Path) -> Result<std::io::Lines<BufReader<fs::File>>, GraphError> {
    if !path.is_file() {
        return Err(GraphError::MissingFile(path.to_path_buf()));
    }
    Ok(BufReader::new(fs::File::open(path)?).lines())
}

fn malformed(file: &str, line: usize, reason: impl Into<String>) -> GraphError {
    GraphError::MalformedLine { file: file.to_string(), line, reason: reason.into() }
}

/// Loads and validates a dataset directory.
pub fn load_graph(dir: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let dir = dir.as_ref();
    let meta_path = dir.join(META_FILE);
    if !meta_path.is_file() {
        return Err(GraphError::MissingFile(meta_path));
    }
    let meta: DatasetMeta = serde_json::from_reader(BufReader::new(fs::File::open(&meta_path)?))?;
    if meta.num_clusters == 0 {
        return Err(GraphError::InvalidMeta("num_clusters must be positive".into()));
    }

    let edges = read_edges(&dir.join(EDGES_FILE), meta.num_nodes)?;
    let features = read_features(&dir.join(FEATURES_FILE), meta.num_nodes)?;
    let labels_path = dir.join(LABELS_FILE);
    let labels =
        if labels_path.exists() { Some(read_labels(&labels_path, meta.num_nodes, meta.num_clusters)?) } else { None };
    Graph::new(meta.name, meta.num_nodes, meta.num_clusters, edges, features, labels)
}

fn read_edges(path: &Path, num_nodes: usize) -> Result<Vec<(usize, usize)>, GraphError> {
    let mut directed: Vec<(usize, usize, usize)> = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in open_lines(path)?.enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split('\t');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(malformed(EDGES_FILE, line_no, "expected `src<TAB>dst`"));
        };
        let parse = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| malformed(EDGES_FILE, line_no, format!("bad node id `{s}`")))
        };
        let (src, dst) = (parse(a)?, parse(b)?);
        if src == dst {
            return Err(malformed(EDGES_FILE, line_no, format!("self loop on node {src}")));
        }
        if src >= num_nodes || dst >= num_nodes {
            return Err(malformed(
                EDGES_FILE,
                line_no,
                format!("node id {} out of range for {num_nodes} nodes", src.max(dst)),
            ));
        }
        if !seen.insert((src, dst)) {
            return Err(malformed(EDGES_FILE, line_no, format!("duplicate edge {src}\t{dst}")));
        }
        directed.push((src, dst, line_no));
    }

    let both_directions = directed.iter().any(|&(s, d, _)| seen.contains(&(d, s)));
    if !both_directions {
        return Ok(directed.into_iter().map(|(s, d, _)| (s, d)).collect());
    }
    let mut edges = Vec::with_capacity(directed.len() / 2);
    for (s, d, _) in directed {
        if !seen.contains(&(d, s)) {
            return Err(GraphError::AsymmetryDetected(s, d));
        }
        if s < d {
            edges.push((s, d));
        }
    }
    Ok(edges)
}

fn read_features(path: &Path, num_nodes: usize) -> Result<Array2<f64>, GraphError> {
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0usize;
    for (idx, line) in open_lines(path)?.enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let before = values.len();
        for field in line.split(',') {
            let v: f64 =
                field.trim().parse().map_err(|_| malformed(FEATURES_FILE, line_no, format!("bad real `{field}`")))?;
            values.push(v);
        }
        let w = values.len() - before;
        match width {
            None => width = Some(w),
            Some(expected) if expected != w => {
                return Err(malformed(FEATURES_FILE, line_no, format!("expected {expected} columns, found {w}")))
            }
            _ => {}
        }
        rows += 1;
    }
    if rows != num_nodes {
        return Err(malformed(FEATURES_FILE, rows, format!("expected {num_nodes} feature rows, found {rows}")));
    }
    Array2::from_shape_vec((rows, width.unwrap_or(0)), values).map_err(|e| malformed(FEATURES_FILE, 0, e.to_string()))
}

fn read_labels(path: &Path, num_nodes: usize, num_clusters: usize) -> Result<Vec<usize>, GraphError> {
    let mut labels = Vec::with_capacity(num_nodes);
    for (idx, line) in open_lines(path)?.enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let label: usize =
            trimmed.parse().map_err(|_| malformed(LABELS_FILE, idx + 1, format!("bad label `{trimmed}`")))?;
        if label >= num_clusters {
            return Err(GraphError::LabelOutOfRange { node: labels.len(), label, num_clusters });
        }
        labels.push(label);
    }
    if labels.len() != num_nodes {
        return Err(malformed(
            LABELS_FILE,
            labels.len(),
            format!("expected {num_nodes} labels, found {}", labels.len()),
        ));
    }
    Ok(labels)
}

/// Writes `graph` as a dataset directory, creating it if needed.
pub fn save_graph(graph: &Graph, dir: impl AsRef<Path>) -> Result<(), GraphError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let meta = DatasetMeta {
        num_nodes: graph.num_nodes(),
        num_clusters: graph.num_clusters(),
        name: graph.name().to_string(),
    };
    fs::write(dir.join(META_FILE), serde_json::to_string_pretty(&meta)?)?;

    let mut out = BufWriter::new(fs::File::create(dir.join(EDGES_FILE))?);
    for &(i, j) in graph.edges() {
        writeln!(out, "{i}\t{j}")?;
    }
    out.flush()?;

    let mut out = BufWriter::new(fs::File::create(dir.join(FEATURES_FILE))?);
    for row in graph.features().rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;

    if let Some(labels) = graph.labels() {
        let mut out = BufWriter::new(fs::File::create(dir.join(LABELS_FILE))?);
        for l in labels {
            writeln!(out, "{l}")?;
        }
        out.flush()?;
    }
    Ok(())
}

/// Reads a label file in `labels.txt` format without a cluster bound.
pub fn read_label_file(path: impl AsRef<Path>) -> Result<Vec<usize>, GraphError> {
    let path = path.as_ref();
    let mut labels = Vec::new();
    for (idx, line) in open_lines(path)?.enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        labels.push(trimmed.parse().map_err(|_| malformed(&path.display().to_string(), idx + 1, "bad label"))?);
    }
    Ok(labels)
}

pub fn write_label_file(path: impl AsRef<Path>, labels: &[usize]) -> Result<(), GraphError> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for l in labels {
        writeln!(out, "{l}")?;
    }
    out.flush()?;
    Ok(())
}
