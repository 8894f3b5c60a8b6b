//! Surprising-edge classification: structural edges whose endpoints are
//! semantically distant (raw cosine below a threshold).

use std::io::Write;

use crate::embeddings::{cosine, EmbeddingTable};
use crate::error::{Error, Result};
use crate::format::{f9, Metadata};
use crate::graph::{GraphSnapshot, SnapshotSeries};
use crate::scalar::Scalar;

pub const DEFAULT_THRESHOLD: f64 = 0.1;
pub const DEFAULT_SWEEP: [f64; 5] = [0.05, 0.10, 0.15, 0.20, 0.30];
pub const SURPRISE_HEADER: &str = "source,target,cosine,surprising,similarity";
pub const SWEEP_HEADER: &str = "iteration,threshold,alpha";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurpriseStats<T> {
    pub iteration: u64,
    pub n_edges: usize,
    pub n_surprising: usize,
    pub alpha: T,
    pub threshold: T,
}

impl<T: Scalar> SurpriseStats<T> {
    pub fn from_counts(iteration: u64, n_edges: usize, n_surprising: usize, threshold: T) -> Self {
        let alpha = if n_edges == 0 {
            T::zero()
        } else {
            T::from_usize_lossy(n_surprising) / T::from_usize_lossy(n_edges)
        };
        SurpriseStats {
            iteration,
            n_edges,
            n_surprising,
            alpha,
            threshold,
        }
    }
}

/// One classified edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFlag<T> {
    pub source: usize,
    pub target: usize,
    pub cosine: T,
    pub surprising: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeClassification<T> {
    pub flags: Vec<EdgeFlag<T>>,
    pub stats: SurpriseStats<T>,
}

fn check_threshold<T: Scalar>(threshold: T) -> Result<()> {
    if !(threshold >= -T::one() && threshold <= T::one()) {
        return Err(Error::InvalidInput(format!("threshold {threshold} outside [-1, 1]")));
    }
    Ok(())
}

/// Raw endpoint cosines for every edge, in edge order.
pub fn edge_cosines<T: Scalar>(g: &GraphSnapshot, embeddings: &EmbeddingTable<T>) -> Result<Vec<T>> {
    let vectors = embeddings.lookup(g.nodes())?;
    g.edges().iter().map(|&(a, b)| cosine(vectors[a], vectors[b])).collect()
}

/// An edge is surprising iff `cos(x_u, x_v) < threshold` (strict).
pub fn classify_edges<T: Scalar>(
    g: &GraphSnapshot,
    embeddings: &EmbeddingTable<T>,
    threshold: T,
) -> Result<EdgeClassification<T>> {
    check_threshold(threshold)?;
    let cosines = edge_cosines(g, embeddings)?;
    let flags: Vec<EdgeFlag<T>> = g
        .edges()
        .iter()
        .zip(cosines)
        .map(|(&(source, target), c)| EdgeFlag {
            source,
            target,
            cosine: c,
            surprising: c < threshold,
        })
        .collect();
    let n_surprising = flags.iter().filter(|f| f.surprising).count();
    let stats = SurpriseStats::from_counts(g.iteration(), flags.len(), n_surprising, threshold);
    Ok(EdgeClassification { flags, stats })
}

/// α per snapshot (rows, series order) and threshold (columns, ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSweep<T> {
    pub thresholds: Vec<T>,
    pub iterations: Vec<u64>,
    pub alphas: Vec<Vec<T>>,
}

pub fn threshold_sweep<T: Scalar>(
    series: &SnapshotSeries,
    embeddings: &EmbeddingTable<T>,
    thresholds: &[T],
) -> Result<ThresholdSweep<T>> {
    if thresholds.is_empty() {
        return Err(Error::InvalidInput(
            "threshold sweep needs at least one threshold".into(),
        ));
    }
    for &t in thresholds {
        check_threshold(t)?;
    }
    let mut sorted = thresholds.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite thresholds"));

    let mut iterations = Vec::with_capacity(series.len());
    let mut alphas = Vec::with_capacity(series.len());
    for g in series.snapshots() {
        let cosines = edge_cosines(g, embeddings).map_err(|e| e.at_iteration(g.iteration()))?;
        let row: Vec<T> = sorted
            .iter()
            .map(|&t| {
                let n_s = cosines.iter().filter(|&&c| c < t).count();
                SurpriseStats::from_counts(g.iteration(), cosines.len(), n_s, t).alpha
            })
            .collect();
        if row.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Invariant(format!(
                "alpha not monotone in threshold at iteration {}",
                g.iteration()
            )));
        }
        iterations.push(g.iteration());
        alphas.push(row);
    }
    Ok(ThresholdSweep {
        thresholds: sorted,
        iterations,
        alphas,
    })
}

/// One row per edge of `g`, in edge order. `similarity` is the `(cos + 1) / 2`
/// value used by the semantic adjacency.
pub fn write_surprise_csv<T: Scalar, W: Write>(
    mut out: W,
    g: &GraphSnapshot,
    classification: &EdgeClassification<T>,
    meta: &Metadata,
) -> std::io::Result<()> {
    out.write_all(meta.render().as_bytes())?;
    writeln!(out, "{SURPRISE_HEADER}")?;
    for f in &classification.flags {
        writeln!(
            out,
            "{},{},{},{},{}",
            g.label(f.source),
            g.label(f.target),
            f9(f.cosine.as_f64()),
            u8::from(f.surprising),
            f9((f.cosine.as_f64() + 1.0) / 2.0)
        )?;
    }
    Ok(())
}

/// Long format: one row per (snapshot, threshold).
pub fn write_sweep_csv<T: Scalar, W: Write>(
    mut out: W,
    sweep: &ThresholdSweep<T>,
    meta: &Metadata,
) -> std::io::Result<()> {
    out.write_all(meta.render().as_bytes())?;
    writeln!(out, "{SWEEP_HEADER}")?;
    for (it, row) in sweep.iterations.iter().zip(&sweep.alphas) {
        for (t, a) in sweep.thresholds.iter().zip(row) {
            writeln!(out, "{it},{},{}", f9(t.as_f64()), f9(a.as_f64()))?;
        }
    }
    Ok(())
}
