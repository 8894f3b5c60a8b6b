//! Deterministic synthetic graph growth.
//!
//! Nodes arrive with embeddings drawn around a set of near-orthogonal topic
//! centroids. Each arrival attaches `m` edges: with probability `q` to a
//! uniformly random semantically distant node (cosine below
//! [`SURPRISE_COSINE`]), otherwise to a semantically proximate node sampled
//! with weight `pref_weight * degree + sem_weight * (cos + 1) / 2`.
//!
//! Randomness is drawn from a ChaCha stream keyed by `(seed, iteration)`, so
//! any iteration can be regenerated independently of thread scheduling.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::embeddings::{cosine, dot, norm, EmbeddingTable};
use crate::error::{Error, Result};
use crate::graph::{GraphSnapshot, SnapshotSeries};

/// Cosine below which an attachment counts as a long-range "surprise" link.
pub const SURPRISE_COSINE: f64 = 0.1;
/// Rejection-sampling attempts for a distant target before falling back.
pub const SURPRISE_RETRY_CAP: usize = 64;
/// Size of the seed clique.
pub const SEED_CLIQUE: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthConfig {
    pub seed: u64,
    pub n_iterations: usize,
    pub nodes_per_iter: usize,
    pub edges_per_new_node: usize,
    pub pref_weight: f64,
    pub sem_weight: f64,
    pub surprise_prob: f64,
    pub n_centroids: usize,
    pub embed_dim: usize,
    pub embed_noise: f64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            seed: 0,
            n_iterations: 500,
            nodes_per_iter: 1,
            edges_per_new_node: 3,
            pref_weight: 1.0,
            sem_weight: 2.0,
            surprise_prob: 0.12,
            n_centroids: 10,
            embed_dim: 128,
            embed_noise: 0.2,
        }
    }
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(format!("growth config: {msg}")));
        if self.n_iterations < 1 {
            return bad("n_iterations must be at least 1");
        }
        if self.edges_per_new_node < 1 {
            return bad("edges_per_new_node must be at least 1");
        }
        if !(self.pref_weight >= 0.0 && self.sem_weight >= 0.0) || self.pref_weight + self.sem_weight <= 0.0 {
            return bad("pref_weight and sem_weight must be non-negative with a positive sum");
        }
        if !(0.0..=1.0).contains(&self.surprise_prob) {
            return bad("surprise_prob must lie in [0, 1]");
        }
        if self.n_centroids < 1 {
            return bad("n_centroids must be at least 1");
        }
        if self.embed_dim < 2 {
            return bad("embed_dim must be at least 2");
        }
        if !(self.embed_noise >= 0.0) || !self.embed_noise.is_finite() {
            return bad("embed_noise must be a finite non-negative number");
        }
        Ok(())
    }

    /// `key = value` pairs for manifests and report metadata.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("seed", self.seed.to_string()),
            ("n_iterations", self.n_iterations.to_string()),
            ("nodes_per_iter", self.nodes_per_iter.to_string()),
            ("edges_per_new_node", self.edges_per_new_node.to_string()),
            ("pref_weight", self.pref_weight.to_string()),
            ("sem_weight", self.sem_weight.to_string()),
            ("surprise_prob", self.surprise_prob.to_string()),
            ("n_centroids", self.n_centroids.to_string()),
            ("embed_dim", self.embed_dim.to_string()),
            ("embed_noise", self.embed_noise.to_string()),
        ]
    }
}

impl fmt::Display for GrowthConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Random stream for one iteration.
pub fn iteration_rng(seed: u64, iteration: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    rng
}

/// Counters describing how attachments were made.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GrowthStats {
    pub surprise_attempts: usize,
    /// Surprise attachments that exhausted the retry cap and used the weighted rule.
    pub surprise_fallbacks: usize,
    /// Proximate attachments with no proximate target available.
    pub proximity_fallbacks: usize,
}

/// Mutable growth state: the current graph plus one embedding per node.
#[derive(Debug, Clone)]
pub struct Grower {
    config: GrowthConfig,
    centroids: Vec<Vec<f64>>,
    graph: GraphSnapshot,
    vectors: Vec<Vec<f64>>,
    topic: Vec<usize>,
    stats: GrowthStats,
}

impl Grower {
    /// Seeds the graph with a clique whose members sit at distinct centroids.
    pub fn new(config: GrowthConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = iteration_rng(config.seed, 0);
        let centroids = make_centroids(&mut rng, config.n_centroids, config.embed_dim);
        let mut grower = Grower {
            config,
            centroids,
            graph: GraphSnapshot::new(0),
            vectors: Vec::new(),
            topic: Vec::new(),
            stats: GrowthStats::default(),
        };
        for k in 0..SEED_CLIQUE {
            let topic = k % grower.centroids.len();
            let v = grower.centroids[topic].clone();
            grower.push_node(v, topic);
        }
        for a in 0..SEED_CLIQUE {
            for b in (a + 1)..SEED_CLIQUE {
                grower.graph.add_edge_idx(a, b);
            }
        }
        Ok(grower)
    }

    pub fn config(&self) -> &GrowthConfig {
        &self.config
    }

    pub fn graph(&self) -> &GraphSnapshot {
        &self.graph
    }

    pub fn stats(&self) -> GrowthStats {
        self.stats
    }

    pub fn vector(&self, idx: usize) -> &[f64] {
        &self.vectors[idx]
    }

    pub fn topic(&self, idx: usize) -> usize {
        self.topic[idx]
    }

    pub fn cosine(&self, a: usize, b: usize) -> f64 {
        cosine(&self.vectors[a], &self.vectors[b]).expect("generated vectors are unit length")
    }

    pub fn embeddings(&self) -> EmbeddingTable<f64> {
        let mut t = EmbeddingTable::new(self.config.embed_dim).expect("dim validated");
        for (label, v) in self.graph.nodes().iter().zip(&self.vectors) {
            t.insert(label, v.clone()).expect("unique labels, unit vectors");
        }
        t
    }

    fn push_node(&mut self, vector: Vec<f64>, topic: usize) -> usize {
        let label = format!("concept_{:06}", self.vectors.len());
        let idx = self.graph.add_node(&label);
        self.vectors.push(vector);
        self.topic.push(topic);
        idx
    }

    /// Adds a node near a random centroid without attaching it.
    pub fn spawn_node<R: Rng>(&mut self, rng: &mut R) -> usize {
        let topic = rng.gen_range(0..self.centroids.len());
        let d = self.config.embed_dim;
        let scale = self.config.embed_noise / (d as f64).sqrt();
        let mut v: Vec<f64> = self.centroids[topic]
            .iter()
            .map(|&c| c + scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        normalize(&mut v);
        self.push_node(v, topic)
    }

    /// Weighted attachment target for `source` among nodes with cosine at least
    /// [`SURPRISE_COSINE`], falling back to all nodes when none qualify. The
    /// flag is false for a fallback pick.
    pub fn weighted_target<R: Rng>(&mut self, rng: &mut R, source: usize, exclude: &[usize]) -> Option<(usize, bool)> {
        let n = self.graph.node_count();
        let eligible = |t: usize| t != source && !exclude.contains(&t) && !self.graph.has_edge(source, t);
        let weight = |t: usize, cos: f64| {
            self.config.pref_weight * self.graph.degree(t) as f64 + self.config.sem_weight * (cos + 1.0) / 2.0
        };
        let mut near = Vec::new();
        let mut all = Vec::new();
        for t in 0..n {
            if !eligible(t) {
                continue;
            }
            let c = self.cosine(source, t);
            let w = weight(t, c);
            all.push((t, w));
            if c >= SURPRISE_COSINE {
                near.push((t, w));
            }
        }
        if near.is_empty() {
            if all.is_empty() {
                return None;
            }
            self.stats.proximity_fallbacks += 1;
            return Some((sample_weighted(rng, &all), false));
        }
        Some((sample_weighted(rng, &near), true))
    }

    /// Uniformly random target with cosine below [`SURPRISE_COSINE`], by rejection.
    pub fn distant_target<R: Rng>(&mut self, rng: &mut R, source: usize, exclude: &[usize]) -> Option<usize> {
        let n = self.graph.node_count();
        for _ in 0..SURPRISE_RETRY_CAP {
            let t = rng.gen_range(0..n);
            if t == source || exclude.contains(&t) || self.graph.has_edge(source, t) {
                continue;
            }
            if self.cosine(source, t) < SURPRISE_COSINE {
                return Some(t);
            }
        }
        None
    }

    /// Attaches a freshly spawned node with up to `m` edges. A node with no
    /// semantically proximate target gets a single fallback edge.
    pub fn attach<R: Rng>(&mut self, rng: &mut R, node: usize) {
        let mut chosen: Vec<usize> = Vec::with_capacity(self.config.edges_per_new_node);
        for _ in 0..self.config.edges_per_new_node {
            let surprise = rng.gen::<f64>() < self.config.surprise_prob;
            if surprise {
                self.stats.surprise_attempts += 1;
                if let Some(t) = self.distant_target(rng, node, &chosen) {
                    chosen.push(t);
                    continue;
                }
                self.stats.surprise_fallbacks += 1;
            }
            match self.weighted_target(rng, node, &chosen) {
                Some((t, true)) => chosen.push(t),
                Some((t, false)) => {
                    if chosen.is_empty() {
                        chosen.push(t);
                    }
                    break;
                }
                None => break,
            }
        }
        for t in chosen {
            self.graph.add_edge_idx(node, t);
        }
    }

    /// Runs one growth iteration with its own random stream.
    pub fn grow(&mut self, iteration: u64) {
        let mut rng = iteration_rng(self.config.seed, iteration);
        for _ in 0..self.config.nodes_per_iter {
            let node = self.spawn_node(&mut rng);
            self.attach(&mut rng, node);
        }
        self.graph.set_iteration(iteration);
    }

    /// Adds an edge between existing nodes; false if it exists or is a loop.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        self.graph.add_edge_idx(a, b)
    }
}

fn normalize(v: &mut [f64]) {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Index drawn with probability proportional to weight; uniform if all weights vanish.
fn sample_weighted<R: Rng>(rng: &mut R, pool: &[(usize, f64)]) -> usize {
    let total: f64 = pool.iter().map(|&(_, w)| w).sum();
    if !(total > 0.0) {
        return pool[rng.gen_range(0..pool.len())].0;
    }
    let mut u = rng.gen::<f64>() * total;
    for &(t, w) in pool {
        if u < w {
            return t;
        }
        u -= w;
    }
    pool[pool.len() - 1].0
}

/// Unit centroids; mutually orthogonal when `k <= dim` (Gram-Schmidt on Gaussian draws).
fn make_centroids<R: Rng>(rng: &mut R, k: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(k);
    while out.len() < k {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if out.len() < dim {
            for c in &out {
                let p = dot(&v, c);
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= p * y);
            }
        }
        if norm(&v) > 1e-8 {
            normalize(&mut v);
            out.push(v);
        }
    }
    out
}

/// A generated series together with its embeddings.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub series: SnapshotSeries,
    pub embeddings: EmbeddingTable<f64>,
    pub stats: GrowthStats,
}

/// Snapshots for iterations `1..=n_iterations`, each taken after that iteration's growth.
pub fn generate_series(config: &GrowthConfig) -> Result<SyntheticCorpus> {
    let mut grower = Grower::new(config.clone())?;
    let mut snapshots = Vec::with_capacity(config.n_iterations);
    for it in 1..=config.n_iterations as u64 {
        grower.grow(it);
        snapshots.push(grower.graph().clone());
    }
    Ok(SyntheticCorpus {
        series: SnapshotSeries::new(snapshots)?,
        embeddings: grower.embeddings(),
        stats: grower.stats(),
    })
}
