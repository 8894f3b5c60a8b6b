//! Structural diagnostics: betweenness, neighbor semantic diversity, Louvain
//! communities, clustering, degree histograms, and distances of nodes from
//! their community centroid in PCA space.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::embeddings::{euclidean, EmbeddingTable, PcaProjection};
use crate::error::{Error, Result};
use crate::format::{f9, Metadata};
use crate::graph::{GraphSnapshot, SnapshotSeries};
use crate::scalar::Scalar;
use crate::stats::pearson;

pub const NODE_METRICS_HEADER: &str = "label,degree,betweenness,diversity,community";
pub const HISTOGRAM_HEADER: &str = "bin_lo,bin_hi,count";
pub const BC_DIVERSITY_HEADER: &str = "iteration,pearson_r,degenerate";

/// Sources handled per parallel task. Fixed so the reduction order does not
/// depend on the thread count.
const BC_CHUNK: usize = 64;

/// Minimum modularity-gain improvement (in edge-weight units) for a Louvain move.
const GAIN_EPS: f64 = 1e-10;

/// Exact unweighted betweenness (Brandes), each unordered pair counted once,
/// endpoints excluded. Disconnected pairs contribute nothing.
pub fn betweenness<T: Scalar>(g: &GraphSnapshot) -> Vec<T> {
    let n = g.node_count();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<T>> = sources
        .par_chunks(BC_CHUNK)
        .map(|chunk| {
            let mut acc = vec![T::zero(); n];
            let mut state = BrandesState::new(n);
            for &s in chunk {
                state.accumulate(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut bc = vec![T::zero(); n];
    for part in partials {
        for (b, p) in bc.iter_mut().zip(part) {
            *b += p;
        }
    }
    let half = T::lit(0.5);
    bc.iter_mut().for_each(|b| *b *= half);
    bc
}

struct BrandesState<T> {
    dist: Vec<i64>,
    sigma: Vec<T>,
    delta: Vec<T>,
    preds: Vec<Vec<usize>>,
    stack: Vec<usize>,
    queue: VecDeque<usize>,
}

impl<T: Scalar> BrandesState<T> {
    fn new(n: usize) -> Self {
        BrandesState {
            dist: vec![-1; n],
            sigma: vec![T::zero(); n],
            delta: vec![T::zero(); n],
            preds: vec![Vec::new(); n],
            stack: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, g: &GraphSnapshot, s: usize, acc: &mut [T]) {
        for v in self.stack.drain(..) {
            self.dist[v] = -1;
            self.sigma[v] = T::zero();
            self.delta[v] = T::zero();
            self.preds[v].clear();
        }
        self.dist[s] = 0;
        self.sigma[s] = T::one();
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            for &w in g.neighbors(v) {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    let sv = self.sigma[v];
                    self.sigma[w] += sv;
                    self.preds[w].push(v);
                }
            }
        }
        for &w in self.stack.iter().rev() {
            let coeff = (T::one() + self.delta[w]) / self.sigma[w];
            for &v in &self.preds[w] {
                let add = self.sigma[v] * coeff;
                self.delta[v] += add;
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

/// Mean pairwise Euclidean distance between the raw embedding vectors of
/// `u`'s neighbors; 0 when `u` has fewer than two neighbors.
pub fn neighbor_diversity<T: Scalar>(g: &GraphSnapshot, u: usize, embeddings: &EmbeddingTable<T>) -> Result<T> {
    let nbrs = g.neighbors(u);
    if nbrs.len() < 2 {
        return Ok(T::zero());
    }
    let labels: Vec<&str> = nbrs.iter().map(|&i| g.label(i)).collect();
    let vectors = embeddings.lookup(&labels)?;
    let mut sum = T::zero();
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            sum += euclidean(vectors[i], vectors[j]);
        }
    }
    let k = vectors.len();
    Ok(sum / T::from_usize_lossy(k * (k - 1) / 2))
}

pub fn diversities<T: Scalar>(g: &GraphSnapshot, embeddings: &EmbeddingTable<T>) -> Result<Vec<T>> {
    embeddings.require(g.nodes())?;
    (0..g.node_count())
        .map(|u| neighbor_diversity(g, u, embeddings))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation<T> {
    pub r: T,
    pub degenerate: bool,
}

/// Pearson r between betweenness and neighbor diversity across all nodes.
pub fn bc_diversity_correlation<T: Scalar>(
    g: &GraphSnapshot,
    embeddings: &EmbeddingTable<T>,
) -> Result<Correlation<T>> {
    if g.node_count() < 3 {
        return Err(Error::InvalidInput(format!(
            "BC-diversity correlation needs at least 3 nodes, got {}",
            g.node_count()
        )));
    }
    let div = diversities(g, embeddings)?;
    let bc = betweenness::<T>(g);
    Ok(correlation(&bc, &div))
}

/// BC-diversity correlation for every snapshot, in series order. Snapshots
/// with fewer than three nodes are reported as degenerate.
pub fn bc_diversity_trace<T: Scalar>(
    series: &SnapshotSeries,
    embeddings: &EmbeddingTable<T>,
) -> Result<Vec<(u64, Correlation<T>)>> {
    series
        .snapshots()
        .par_iter()
        .map(|g| {
            let c = if g.node_count() < 3 {
                Correlation {
                    r: T::zero(),
                    degenerate: true,
                }
            } else {
                bc_diversity_correlation(g, embeddings).map_err(|e| e.at_iteration(g.iteration()))?
            };
            Ok((g.iteration(), c))
        })
        .collect()
}

pub fn write_bc_diversity_csv<T: Scalar, W: Write>(
    mut out: W,
    trace: &[(u64, Correlation<T>)],
    meta: &Metadata,
) -> std::io::Result<()> {
    out.write_all(meta.render().as_bytes())?;
    writeln!(out, "{BC_DIVERSITY_HEADER}")?;
    for (it, c) in trace {
        writeln!(out, "{it},{},{}", f9(c.r.as_f64()), u8::from(c.degenerate))?;
    }
    Ok(())
}

pub(crate) fn correlation<T: Scalar>(x: &[T], y: &[T]) -> Correlation<T> {
    match pearson(x, y) {
        Some(r) => Correlation { r, degenerate: false },
        None => Correlation {
            r: T::zero(),
            degenerate: true,
        },
    }
}

/// Community id per node (in node order), ids contiguous from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityAssignment {
    pub labels: Vec<String>,
    pub community: Vec<usize>,
    pub modularity: f64,
}

impl CommunityAssignment {
    pub fn n_communities(&self) -> usize {
        self.community.iter().max().map_or(0, |m| m + 1)
    }

    pub fn of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label).map(|i| self.community[i])
    }

    /// Community ids ordered by descending size, ties by id.
    pub fn by_size(&self) -> Vec<(usize, usize)> {
        let mut sizes = vec![0usize; self.n_communities()];
        for &c in &self.community {
            sizes[c] += 1;
        }
        let mut out: Vec<(usize, usize)> = sizes.into_iter().enumerate().collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        out
    }
}

/// Weighted graph used across Louvain levels; self-loops carry intra-community weight.
struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl WeightedGraph {
    fn from_snapshot(g: &GraphSnapshot) -> Self {
        WeightedGraph {
            adj: (0..g.node_count())
                .map(|i| g.neighbors(i).iter().map(|&j| (j, 1.0)).collect())
                .collect(),
            self_loops: vec![0.0; g.node_count()],
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Weighted degree; a self-loop counts twice.
    fn strength(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loops[i]
    }
}

/// Modularity of `community` on `g` with resolution `gamma`. Edgeless graphs score 0.
pub fn modularity(g: &GraphSnapshot, community: &[usize], gamma: f64) -> f64 {
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let k = community.iter().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0; k];
    let mut total = vec![0.0; k];
    for &(a, b) in g.edges() {
        if community[a] == community[b] {
            internal[community[a]] += 1.0;
        }
    }
    for (i, &c) in community.iter().enumerate() {
        total[c] += g.degree(i) as f64;
    }
    (0..k)
        .map(|c| internal[c] / m - gamma * (total[c] / (2.0 * m)).powi(2))
        .sum()
}

/// One round of local moves. Returns the community of each node and whether anything moved.
fn local_moves(wg: &WeightedGraph, gamma: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = wg.len();
    let strength: Vec<f64> = (0..n).map(|i| wg.strength(i)).collect();
    let two_m: f64 = strength.iter().sum();
    let mut community: Vec<usize> = (0..n).collect();
    let mut tot = strength.clone();
    if two_m == 0.0 {
        return (community, false);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut links: BTreeMap<usize, f64> = BTreeMap::new();
    let mut moved_any = false;
    for _pass in 0..1000 {
        let mut moved = false;
        for &i in &order {
            let own = community[i];
            tot[own] -= strength[i];
            links.clear();
            links.insert(own, 0.0);
            for &(j, w) in &wg.adj[i] {
                *links.entry(community[j]).or_insert(0.0) += w;
            }
            let gain = |c: usize, k_in: f64| k_in - gamma * tot[c] * strength[i] / two_m;
            let stay = gain(own, links[&own]);
            let mut best = own;
            let mut best_gain = stay;
            // ascending community ids; staying wins ties, then the lowest id
            for (&c, &k_in) in &links {
                let g = gain(c, k_in);
                if g > best_gain + GAIN_EPS {
                    best = c;
                    best_gain = g;
                }
            }
            tot[best] += strength[i];
            if best != own {
                community[i] = best;
                moved = true;
                moved_any = true;
            }
        }
        if !moved {
            break;
        }
    }
    (community, moved_any)
}

/// Renumbers ids to `0..k` by first appearance.
fn renumber(community: &mut [usize]) -> usize {
    let mut map: HashMap<usize, usize> = HashMap::new();
    for c in community.iter_mut() {
        let next = map.len();
        *c = *map.entry(*c).or_insert(next);
    }
    map.len()
}

fn aggregate(wg: &WeightedGraph, community: &[usize], k: usize) -> WeightedGraph {
    let mut self_loops = vec![0.0; k];
    let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
    for i in 0..wg.len() {
        let ci = community[i];
        self_loops[ci] += wg.self_loops[i];
        for &(j, w) in &wg.adj[i] {
            let cj = community[j];
            if ci == cj {
                // each internal edge is seen from both ends
                self_loops[ci] += w / 2.0;
            } else {
                *adj[ci].entry(cj).or_insert(0.0) += w;
            }
        }
    }
    WeightedGraph {
        adj: adj.into_iter().map(|m| m.into_iter().collect()).collect(),
        self_loops,
    }
}

/// Multi-level Louvain modularity optimization. Node visiting order is
/// shuffled from `seed`; results are reproducible for a fixed seed.
pub fn louvain(g: &GraphSnapshot, resolution: f64, seed: u64) -> CommunityAssignment {
    let n = g.node_count();
    let mut membership: Vec<usize> = (0..n).collect();
    let mut wg = WeightedGraph::from_snapshot(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let (mut community, moved) = local_moves(&wg, resolution, &mut rng);
        if !moved {
            break;
        }
        let k = renumber(&mut community);
        for m in membership.iter_mut() {
            *m = community[*m];
        }
        if k == wg.len() {
            break;
        }
        wg = aggregate(&wg, &community, k);
    }
    renumber(&mut membership);
    let q = modularity(g, &membership, resolution);
    CommunityAssignment {
        labels: g.nodes().to_vec(),
        community: membership,
        modularity: q,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentroidHistogram<T> {
    pub bin_edges: Vec<T>,
    pub counts: Vec<usize>,
    pub labels: Vec<String>,
    pub distances: Vec<T>,
}

/// Distance of every node from the mean 2-D position of its community,
/// binned into `n_bins` equal-width bins over `[0, max distance]`.
pub fn centroid_distance_histogram<T: Scalar>(
    proj: &PcaProjection<T>,
    communities: &CommunityAssignment,
    n_bins: usize,
) -> Result<CentroidHistogram<T>> {
    if n_bins < 1 {
        return Err(Error::InvalidInput("histogram needs at least one bin".into()));
    }
    let comm: Vec<usize> = proj
        .labels
        .iter()
        .map(|l| {
            communities
                .of(l)
                .ok_or_else(|| Error::InvalidInput(format!("node {l:?} has no community")))
        })
        .collect::<Result<_>>()?;
    let k = comm.iter().max().map_or(0, |c| c + 1);
    let mut sums = vec![[T::zero(); 2]; k];
    let mut sizes = vec![0usize; k];
    for (c, xy) in comm.iter().zip(&proj.coordinates) {
        sums[*c][0] += xy[0];
        sums[*c][1] += xy[1];
        sizes[*c] += 1;
    }
    let centroids: Vec<[T; 2]> = sums
        .iter()
        .zip(&sizes)
        .map(|(s, &m)| {
            let m = T::from_usize_lossy(m.max(1));
            [s[0] / m, s[1] / m]
        })
        .collect();
    let distances: Vec<T> = comm
        .iter()
        .zip(&proj.coordinates)
        .map(|(c, xy)| euclidean(xy, &centroids[*c]))
        .collect();
    let max = distances.iter().fold(T::zero(), |a, &d| if d > a { d } else { a });
    let upper = if max > T::zero() { max } else { T::one() };
    let nb = T::from_usize_lossy(n_bins);
    let bin_edges: Vec<T> = (0..=n_bins).map(|i| upper * T::from_usize_lossy(i) / nb).collect();
    let mut counts = vec![0usize; n_bins];
    for &d in &distances {
        let b = ((d / upper) * nb).floor().to_usize().unwrap_or(0).min(n_bins - 1);
        counts[b] += 1;
    }
    Ok(CentroidHistogram {
        bin_edges,
        counts,
        labels: proj.labels.clone(),
        distances,
    })
}

pub fn degree_distribution(g: &GraphSnapshot) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for i in 0..g.node_count() {
        *hist.entry(g.degree(i)).or_insert(0) += 1;
    }
    hist
}

/// Local clustering coefficient of every node (0 for degree < 2).
pub fn local_clustering(g: &GraphSnapshot) -> Vec<f64> {
    let n = g.node_count();
    let mut mark = vec![usize::MAX; n];
    (0..n)
        .map(|u| {
            let nb = g.neighbors(u);
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            for &v in nb {
                mark[v] = u;
            }
            let links: usize = nb
                .iter()
                .map(|&v| g.neighbors(v).iter().filter(|&&w| mark[w] == u).count())
                .sum();
            // every neighbor-neighbor link is seen twice
            links as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

/// Average local clustering coefficient.
pub fn clustering_coefficient(g: &GraphSnapshot) -> f64 {
    let local = local_clustering(g);
    if local.is_empty() {
        return 0.0;
    }
    local.iter().sum::<f64>() / local.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeMetrics<T> {
    pub label: String,
    pub degree: usize,
    pub betweenness: T,
    pub diversity: T,
    pub community: Option<usize>,
}

pub fn node_metrics<T: Scalar>(
    g: &GraphSnapshot,
    embeddings: &EmbeddingTable<T>,
    communities: Option<&CommunityAssignment>,
) -> Result<Vec<NodeMetrics<T>>> {
    let div = diversities(g, embeddings)?;
    let bc = betweenness::<T>(g);
    Ok((0..g.node_count())
        .map(|i| NodeMetrics {
            label: g.label(i).to_string(),
            degree: g.degree(i),
            betweenness: bc[i],
            diversity: div[i],
            community: communities.map(|c| c.community[i]),
        })
        .collect())
}

/// Scales pair-count betweenness by `2 / ((n-1)(n-2))`.
pub fn normalize_betweenness<T: Scalar>(bc: &mut [T]) {
    let n = bc.len();
    if n < 3 {
        return;
    }
    let scale = T::lit(2.0) / T::from_usize_lossy((n - 1) * (n - 2));
    bc.iter_mut().for_each(|b| *b *= scale);
}

pub fn write_node_metrics_csv<T: Scalar, W: Write>(
    mut out: W,
    rows: &[NodeMetrics<T>],
    meta: &Metadata,
) -> std::io::Result<()> {
    out.write_all(meta.render().as_bytes())?;
    writeln!(out, "{NODE_METRICS_HEADER}")?;
    for r in rows {
        let c = r.community.map(|c| c.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            r.label,
            r.degree,
            f9(r.betweenness.as_f64()),
            f9(r.diversity.as_f64()),
            c
        )?;
    }
    Ok(())
}

pub fn write_histogram_csv<T: Scalar, W: Write>(
    mut out: W,
    hist: &CentroidHistogram<T>,
    meta: &Metadata,
) -> std::io::Result<()> {
    out.write_all(meta.render().as_bytes())?;
    writeln!(out, "{HISTOGRAM_HEADER}")?;
    for (i, c) in hist.counts.iter().enumerate() {
        writeln!(
            out,
            "{},{},{}",
            f9(hist.bin_edges[i].as_f64()),
            f9(hist.bin_edges[i + 1].as_f64()),
            c
        )?;
    }
    Ok(())
}
