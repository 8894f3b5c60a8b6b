//! Structural and semantic entropy analysis of evolving knowledge graphs.
//!
//! The crate covers the whole pipeline from snapshot ingestion to reports:
//!
//! - [`graph`]: snapshots, series loading, adjacency builders
//! - [`spectral`]: Von Neumann entropy of structural and semantic Laplacians,
//!   and the discovery parameter `(S_struct - S_sem) / (S_struct + S_sem)`
//! - [`embeddings`]: embedding tables, cosine similarity, 2-D PCA
//! - [`edges`]: surprising-edge classification and threshold sweeps
//! - [`dynamics`]: per-iteration entropy traces, rolling correlation,
//!   transition detection
//! - [`topology`]: betweenness, neighbor diversity, Louvain, centroid histograms
//! - [`synth`]: deterministic synthetic growth corpora
//! - [`rl`]: discovery reward and a REINFORCE trainer on synthetic growth
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod edges;
pub mod embeddings;
pub mod error;
pub mod format;
pub mod graph;
pub mod rl;
pub mod scalar;
pub mod spectral;
pub mod stats;
pub mod synth;
pub mod topology;

pub use error::{Error, Result};
pub use graph::{GraphSnapshot, SnapshotSeries};
pub use scalar::Scalar;

pub type EmbeddingTableF64 = embeddings::EmbeddingTable<f64>;
pub type EmbeddingTableF32 = embeddings::EmbeddingTable<f32>;
pub type SpectrumF64 = spectral::SpectrumResult<f64>;
pub type SpectrumF32 = spectral::SpectrumResult<f32>;
pub type PcaProjectionF64 = embeddings::PcaProjection<f64>;
pub type EntropyTraceF64 = dynamics::EntropyTrace<f64>;
pub type EntropyTraceF32 = dynamics::EntropyTrace<f32>;
pub type CrossCorrelationF64 = dynamics::CrossCorrelationTrace<f64>;
pub type SurpriseStatsF64 = edges::SurpriseStats<f64>;
pub type NodeMetricsF64 = topology::NodeMetrics<f64>;
pub type PolicyParamsF64 = rl::PolicyParams<f64>;
pub type RewardConfigF64 = rl::RewardConfig<f64>;
