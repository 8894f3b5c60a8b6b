//! Graph snapshots, snapshot series, edge-list I/O and matrix builders.
//!
//! A [`GraphSnapshot`] is an undirected simple graph whose nodes carry string
//! labels. Node order is insertion order from the source file and is the row
//! order of every matrix built from the snapshot.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use log::warn;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default series filename template; `{iter}` is the zero-padded iteration.
pub const DEFAULT_PATTERN: &str = "graph_{iter}.edges";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSnapshot {
    iteration: u64,
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    /// Canonical `(lo, hi)` index pairs in first-seen order.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

/// Bookkeeping from parsing one edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeListStats {
    pub lines: usize,
    pub dropped_self_loops: usize,
    pub merged_duplicates: usize,
}

impl GraphSnapshot {
    pub fn new(iteration: u64) -> Self {
        GraphSnapshot {
            iteration,
            nodes: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    /// Builds a snapshot from labels and label pairs. Self-loops and repeated
    /// pairs are rejected; use the edge-list loader for lenient ingestion.
    pub fn from_parts<S: AsRef<str>>(iteration: u64, nodes: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut g = GraphSnapshot::new(iteration);
        for n in nodes {
            if g.index.contains_key(n.as_ref()) {
                return Err(Error::InvalidInput(format!("duplicate node label {:?}", n.as_ref())));
            }
            g.add_node(n.as_ref());
        }
        for (u, v) in edges {
            let (iu, iv) = match (g.index_of(u.as_ref()), g.index_of(v.as_ref())) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "edge ({}, {}) references an unknown node",
                        u.as_ref(),
                        v.as_ref()
                    )))
                }
            };
            if iu == iv {
                return Err(Error::InvalidInput(format!("self-loop on {:?}", u.as_ref())));
            }
            if !g.add_edge_idx(iu, iv) {
                return Err(Error::InvalidInput(format!(
                    "duplicate edge ({}, {})",
                    u.as_ref(),
                    v.as_ref()
                )));
            }
        }
        Ok(g)
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn set_iteration(&mut self, iteration: u64) {
        self.iteration = iteration;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, idx: usize) -> &[usize] {
        &self.adjacency[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adjacency[idx].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (short, other) = if self.adjacency[a].len() <= self.adjacency[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.adjacency[short].contains(&other)
    }

    /// Adds a node if absent and returns its index.
    pub fn add_node(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(label.to_string());
        self.index.insert(label.to_string(), i);
        self.adjacency.push(Vec::new());
        i
    }

    /// Adds the undirected edge `{a, b}`. Returns false for self-loops and
    /// edges already present.
    pub fn add_edge_idx(&mut self, a: usize, b: usize) -> bool {
        if a == b || self.has_edge(a, b) {
            return false;
        }
        self.edges.push((a.min(b), a.max(b)));
        self.adjacency[a].push(b);
        self.adjacency[b].push(a);
        true
    }

    /// Edges as label pairs, in canonical order.
    pub fn edge_labels(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].as_str(), self.nodes[b].as_str()))
    }

    /// Set of unordered label pairs, for order-independent comparisons.
    pub fn edge_set(&self) -> HashSet<(String, String)> {
        self.edge_labels()
            .map(|(a, b)| {
                if a <= b {
                    (a.to_string(), b.to_string())
                } else {
                    (b.to_string(), a.to_string())
                }
            })
            .collect()
    }
}

/// Parses the tab-separated edge-list format.
pub fn parse_edge_list<R: Read>(reader: R, iteration: u64, origin: &Path) -> Result<(GraphSnapshot, EdgeListStats)> {
    let mut g = GraphSnapshot::new(iteration);
    let mut stats = EdgeListStats::default();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        stats.lines += 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: lineno + 1,
                msg: format!("expected 2 non-empty tab-separated fields, found {}", fields.len()),
            });
        }
        if fields[0] == fields[1] {
            stats.dropped_self_loops += 1;
            continue;
        }
        let a = g.add_node(fields[0]);
        let b = g.add_node(fields[1]);
        if !g.add_edge_idx(a, b) {
            stats.merged_duplicates += 1;
        }
    }
    if g.node_count() == 0 {
        return Err(Error::InvalidInput(format!(
            "{}: edge list contains no nodes",
            origin.display()
        )));
    }
    Ok((g, stats))
}

pub fn load_edge_list(path: impl AsRef<Path>, iteration: u64) -> Result<GraphSnapshot> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let (g, stats) = parse_edge_list(file, iteration, path)?;
    if stats.dropped_self_loops > 0 {
        warn!(
            "{}: dropped {} self-loop line(s)",
            path.display(),
            stats.dropped_self_loops
        );
    }
    Ok(g)
}

/// Writes the edge list, preceded by optional `#` comment lines.
pub fn write_edge_list<W: Write>(mut out: W, g: &GraphSnapshot, header: &[String]) -> std::io::Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    for (a, b) in g.edge_labels() {
        writeln!(out, "{a}\t{b}")?;
    }
    Ok(())
}

/// Non-empty, strictly ascending sequence of snapshots.
#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    snapshots: Vec<GraphSnapshot>,
}

impl SnapshotSeries {
    pub fn new(mut snapshots: Vec<GraphSnapshot>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InvalidInput("no snapshots".into()));
        }
        snapshots.sort_by_key(|g| g.iteration());
        for w in snapshots.windows(2) {
            if w[0].iteration() == w[1].iteration() {
                return Err(Error::InvalidInput(format!("duplicate iteration {}", w[0].iteration())));
            }
        }
        warn_on_vanishing_nodes(&snapshots);
        Ok(SnapshotSeries { snapshots })
    }

    pub fn snapshots(&self) -> &[GraphSnapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn last(&self) -> &GraphSnapshot {
        self.snapshots.last().expect("series is non-empty")
    }

    /// Labels across all snapshots, in first-appearance order.
    pub fn all_labels(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for g in &self.snapshots {
            for n in g.nodes() {
                if seen.insert(n.as_str()) {
                    out.push(n.clone());
                }
            }
        }
        out
    }
}

fn warn_on_vanishing_nodes(snapshots: &[GraphSnapshot]) {
    for w in snapshots.windows(2) {
        let gone = w[0].nodes().iter().filter(|n| w[1].index_of(n).is_none()).count();
        if gone > 0 {
            warn!(
                "{} node(s) present at iteration {} disappear at iteration {}",
                gone,
                w[0].iteration(),
                w[1].iteration()
            );
        }
    }
}

/// Splits a `prefix{iter}suffix` filename template.
fn split_pattern(pattern: &str) -> Result<(&str, &str)> {
    pattern
        .split_once("{iter}")
        .ok_or_else(|| Error::InvalidInput(format!("pattern {pattern:?} lacks an {{iter}} field")))
}

/// Parses the iteration out of a filename matching `pattern`.
pub fn match_pattern(pattern: &str, file_name: &str) -> Result<Option<u64>> {
    let (prefix, suffix) = split_pattern(pattern)?;
    let Some(mid) = file_name
        .strip_prefix(prefix)
        .and_then(|rest| rest.strip_suffix(suffix))
    else {
        return Ok(None);
    };
    if mid.is_empty() || !mid.bytes().all(|b| b.is_ascii_digit()) {
        return Ok(None);
    }
    Ok(mid.parse().ok())
}

/// Filename for `iteration` under `pattern`, zero-padded to `width` digits.
pub fn format_pattern(pattern: &str, iteration: u64, width: usize) -> Result<String> {
    let (prefix, suffix) = split_pattern(pattern)?;
    Ok(format!("{prefix}{iteration:0width$}{suffix}"))
}

/// Matching files in `dir`, sorted by iteration.
pub fn list_series_files(dir: impl AsRef<Path>, pattern: &str) -> Result<Vec<(u64, PathBuf)>> {
    let dir = dir.as_ref();
    let mut found: Vec<(u64, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(it) = match_pattern(pattern, name)? {
            found.push((it, entry.path()));
        }
    }
    if found.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no snapshots matching {pattern:?} in {}",
            dir.display()
        )));
    }
    found.sort();
    for w in found.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::InvalidInput(format!(
                "duplicate iteration {}: {} and {}",
                w[0].0,
                w[0].1.display(),
                w[1].1.display()
            )));
        }
    }
    Ok(found)
}

pub fn load_series(dir: impl AsRef<Path>, pattern: &str) -> Result<SnapshotSeries> {
    let files = list_series_files(dir, pattern)?;
    let snapshots = files
        .par_iter()
        .map(|(it, path)| load_edge_list(path, *it))
        .collect::<Result<Vec<_>>>()?;
    SnapshotSeries::new(snapshots)
}

/// Dense 0/1 adjacency matrix and degree vector in node order.
pub fn adjacency_and_degrees<T: Scalar>(g: &GraphSnapshot) -> (DMatrix<T>, DVector<T>) {
    let n = g.node_count();
    let mut a = DMatrix::<T>::zeros(n, n);
    for &(u, v) in g.edges() {
        a[(u, v)] = T::one();
        a[(v, u)] = T::one();
    }
    let degrees = DVector::from_iterator(n, (0..n).map(|i| T::from_usize_lossy(g.degree(i))));
    (a, degrees)
}
