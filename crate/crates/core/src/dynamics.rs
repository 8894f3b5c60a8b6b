//! Entropy traces over a snapshot series, windowed structural/semantic
//! correlation, and detection of the sign flip from co-evolution to
//! divergence.

use std::io::Write;

use rayon::prelude::*;

use crate::edges::classify_edges;
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::format::{f9, Metadata};
use crate::graph::{GraphSnapshot, SnapshotSeries};
use crate::scalar::Scalar;
use crate::spectral::{discovery_parameter, semantic_adjacency, semantic_entropy, structural_entropy};
use crate::stats::{mean, pearson};

pub const DEFAULT_WINDOW: usize = 50;
pub const DEFAULT_SUSTAIN: usize = 10;

pub const TRACE_HEADER: &str = "iteration,s_struct,s_sem,d_param,n_edges,n_surprising,alpha";
pub const XCORR_HEADER: &str = "iteration,pearson_r,degenerate";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySample<T> {
    pub iteration: u64,
    pub s_struct: T,
    pub s_sem: T,
    /// `None` when both entropies vanish.
    pub d_param: Option<T>,
    pub n_edges: usize,
    pub n_surprising: usize,
    pub alpha: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTrace<T> {
    pub samples: Vec<EntropySample<T>>,
    pub threshold: T,
}

impl<T: Scalar> EntropyTrace<T> {
    pub fn new(samples: Vec<EntropySample<T>>, threshold: T) -> Result<Self> {
        if samples.windows(2).any(|w| w[1].iteration <= w[0].iteration) {
            return Err(Error::InvalidInput("trace iterations must strictly increase".into()));
        }
        Ok(EntropyTrace { samples, threshold })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Builds a trace from bare entropy pairs, e.g. for testing the detector.
    pub fn from_entropies(points: &[(u64, T, T)]) -> Result<Self> {
        let samples = points
            .iter()
            .map(|&(iteration, s_struct, s_sem)| EntropySample {
                iteration,
                s_struct,
                s_sem,
                d_param: discovery_parameter(s_struct, s_sem),
                n_edges: 0,
                n_surprising: 0,
                alpha: T::zero(),
            })
            .collect();
        EntropyTrace::new(samples, T::lit(0.1))
    }
}

/// Entropies, discovery parameter and surprise counts for one snapshot.
pub fn analyze_snapshot<T: Scalar>(
    g: &GraphSnapshot,
    embeddings: &EmbeddingTable<T>,
    surprise_threshold: T,
) -> Result<EntropySample<T>> {
    let structural = structural_entropy::<T>(g)?;
    let a_sem = semantic_adjacency(embeddings, g.nodes())?;
    let semantic = semantic_entropy(&a_sem)?;
    let surprise = classify_edges(g, embeddings, surprise_threshold)?.stats;
    Ok(EntropySample {
        iteration: g.iteration(),
        s_struct: structural.entropy_nats,
        s_sem: semantic.entropy_nats,
        d_param: discovery_parameter(structural.entropy_nats, semantic.entropy_nats),
        n_edges: surprise.n_edges,
        n_surprising: surprise.n_surprising,
        alpha: surprise.alpha,
    })
}

/// One sample per snapshot. Snapshots are evaluated in parallel and assembled
/// in iteration order.
pub fn build_trace<T: Scalar>(
    series: &SnapshotSeries,
    embeddings: &EmbeddingTable<T>,
    surprise_threshold: T,
) -> Result<EntropyTrace<T>> {
    let samples = series
        .snapshots()
        .par_iter()
        .map(|g| analyze_snapshot(g, embeddings, surprise_threshold).map_err(|e| e.at_iteration(g.iteration())))
        .collect::<Result<Vec<_>>>()?;
    EntropyTrace::new(samples, surprise_threshold)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationPoint<T> {
    pub iteration: u64,
    pub r: T,
    /// Either series was constant inside the window; `r` is reported as 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCorrelationTrace<T> {
    pub window: usize,
    pub points: Vec<CorrelationPoint<T>>,
}

/// Lag-0 Pearson correlation of `(s_struct, s_sem)` over each run of `window`
/// consecutive samples, labelled by the iteration of the window's centre
/// sample (index `lo + window / 2`).
pub fn rolling_cross_correlation<T: Scalar>(
    trace: &EntropyTrace<T>,
    window: usize,
) -> Result<CrossCorrelationTrace<T>> {
    if window < 3 {
        return Err(Error::InvalidInput(format!("window must be at least 3, got {window}")));
    }
    if trace.len() < window {
        return Err(Error::InvalidInput(format!(
            "trace has {} samples, shorter than window {window}",
            trace.len()
        )));
    }
    let structural: Vec<T> = trace.samples.iter().map(|s| s.s_struct).collect();
    let semantic: Vec<T> = trace.samples.iter().map(|s| s.s_sem).collect();
    let points = (window - 1..trace.len())
        .map(|end| {
            let lo = end + 1 - window;
            let r = pearson(&structural[lo..=end], &semantic[lo..=end]);
            CorrelationPoint {
                iteration: trace.samples[lo + window / 2].iteration,
                r: r.unwrap_or_else(T::zero),
                degenerate: r.is_none(),
            }
        })
        .collect();
    Ok(CrossCorrelationTrace { window, points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionReport<T> {
    pub transition_iteration: Option<u64>,
    /// Position of the transition within the correlation trace.
    pub transition_index: Option<usize>,
    /// Length of the negative run starting at the transition (0 if none).
    pub sustain_length: usize,
    pub pre_mean_r: Option<T>,
    pub post_mean_r: Option<T>,
}

/// Earliest point where `r` goes from `>= 0` to `< 0` and stays negative for
/// at least `sustain` consecutive points.
pub fn detect_transition<T: Scalar>(xcorr: &CrossCorrelationTrace<T>, sustain: usize) -> Result<TransitionReport<T>> {
    if sustain == 0 {
        return Err(Error::InvalidInput("sustain must be at least 1".into()));
    }
    let r: Vec<T> = xcorr.points.iter().map(|p| p.r).collect();
    let found = (1..r.len())
        .find(|&i| r[i - 1] >= T::zero() && i + sustain <= r.len() && r[i..i + sustain].iter().all(|&v| v < T::zero()));
    Ok(match found {
        Some(i) => {
            let run = r[i..].iter().take_while(|&&v| v < T::zero()).count();
            TransitionReport {
                transition_iteration: Some(xcorr.points[i].iteration),
                transition_index: Some(i),
                sustain_length: run,
                pre_mean_r: mean(&r[..i]),
                post_mean_r: mean(&r[i..]),
            }
        }
        None => TransitionReport {
            transition_iteration: None,
            transition_index: None,
            sustain_length: 0,
            pre_mean_r: mean(&r),
            post_mean_r: None,
        },
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(f9).unwrap_or_else(|| "NaN".into())
}

pub fn write_trace_csv<T: Scalar, W: Write>(
    mut out: W,
    trace: &EntropyTrace<T>,
    meta: &Metadata,
) -> std::io::Result<()> {
    out.write_all(meta.render().as_bytes())?;
    writeln!(out, "{TRACE_HEADER}")?;
    for s in &trace.samples {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.iteration,
            f9(s.s_struct.as_f64()),
            f9(s.s_sem.as_f64()),
            opt(s.d_param.map(Scalar::as_f64)),
            s.n_edges,
            s.n_surprising,
            f9(s.alpha.as_f64())
        )?;
    }
    Ok(())
}

pub fn write_xcorr_csv<T: Scalar, W: Write>(
    mut out: W,
    xcorr: &CrossCorrelationTrace<T>,
    meta: &Metadata,
) -> std::io::Result<()> {
    out.write_all(meta.render().as_bytes())?;
    writeln!(out, "{XCORR_HEADER}")?;
    for p in &xcorr.points {
        writeln!(out, "{},{},{}", p.iteration, f9(p.r.as_f64()), u8::from(p.degenerate))?;
    }
    Ok(())
}

pub fn write_transition_report<T: Scalar, W: Write>(
    mut out: W,
    report: &TransitionReport<T>,
    meta: &Metadata,
) -> std::io::Result<()> {
    out.write_all(meta.render().as_bytes())?;
    let it = report
        .transition_iteration
        .map(|i| i.to_string())
        .unwrap_or_else(|| "none".into());
    writeln!(out, "transition_iteration = {it}")?;
    writeln!(out, "sustain_length = {}", report.sustain_length)?;
    writeln!(out, "pre_mean_r = {}", opt(report.pre_mean_r.map(Scalar::as_f64)))?;
    writeln!(out, "post_mean_r = {}", opt(report.post_mean_r.map(Scalar::as_f64)))?;
    Ok(())
}
