//! Reference implementations used as test oracles. The oracles work on plain
//! `Vec`s and share no code with the library; only [`snapshot`] touches it.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;

pub type Edges = Vec<(usize, usize)>;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: Vec<Vec<f64>>) -> Vec<f64> {
    let (mut d, _) = jacobi(a);
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    d
}

/// Eigenvalues and eigenvectors (columns of the returned matrix), unsorted.
pub fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..200 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

pub fn dense_adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v) in edges {
        a[u][v] = 1.0;
        a[v][u] = 1.0;
    }
    a
}

/// `I - D^{-1/2} A D^{-1/2}` with isolated nodes contributing zero rows.
pub fn normalized_laplacian(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let d: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if d[i] == 0.0 || d[j] == 0.0 {
                continue;
            }
            let base = if i == j { 1.0 } else { 0.0 };
            l[i][j] = base - a[i][j] / (d[i] * d[j]).sqrt();
        }
    }
    l
}

/// Shannon entropy (nats) of the normalized Laplacian spectrum.
pub fn spectral_entropy(a: &[Vec<f64>]) -> f64 {
    let ev: Vec<f64> = jacobi_eigenvalues(normalized_laplacian(a))
        .into_iter()
        .map(|x| x.max(0.0))
        .collect();
    let total: f64 = ev.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    ev.iter()
        .map(|x| x / total)
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.ln())
        .sum()
}

/// Semantic adjacency `(cos + 1) / 2` with a zero diagonal.
pub fn semantic_adjacency(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = vectors.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                a[i][j] = (cosine(&vectors[i], &vectors[j]) + 1.0) / 2.0;
            }
        }
    }
    a
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Edges {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn neighbor_lists(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

fn bfs_dist(adj: &[Vec<usize>], s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[s] = Some(0);
    let mut frontier = vec![s];
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in &adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Every shortest path from `s` to `t`, as node sequences.
pub fn all_shortest_paths(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> Vec<Vec<usize>> {
    let adj = neighbor_lists(n, edges);
    let Some(target_len) = bfs_dist(&adj, s)[t] else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut path = vec![s];
    fn walk(adj: &[Vec<usize>], t: usize, len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if path.len() - 1 == len {
            if u == t {
                out.push(path.clone());
            }
            return;
        }
        for &w in &adj[u] {
            if !path.contains(&w) {
                path.push(w);
                walk(adj, t, len, path, out);
                path.pop();
            }
        }
    }
    walk(&adj, t, target_len, &mut path, &mut out);
    out
}

/// Betweenness by explicit enumeration of shortest paths over unordered pairs.
pub fn brute_betweenness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let paths = all_shortest_paths(n, edges, s, t);
            if paths.is_empty() {
                continue;
            }
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    bc[v] += 1.0 / total;
                }
            }
        }
    }
    bc
}

/// Newman modularity of a partition at resolution `gamma`.
pub fn modularity(n: usize, edges: &[(usize, usize)], community: &[usize], gamma: f64) -> f64 {
    let m = edges.len() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let k = community.iter().max().map_or(0, |&c| c + 1);
    let mut internal = vec![0.0; k];
    let mut degree = vec![0.0; k];
    let deg = neighbor_lists(n, edges);
    for &(u, v) in edges {
        if community[u] == community[v] {
            internal[community[u]] += 1.0;
        }
    }
    for u in 0..n {
        degree[community[u]] += deg[u].len() as f64;
    }
    (0..k)
        .map(|c| internal[c] / m - gamma * (degree[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Exhaustive search over all set partitions (restricted growth strings).
/// Returns the best modularity, a maximizing partition and the number of
/// partitions visited.
pub fn best_partition(n: usize, edges: &[(usize, usize)]) -> (f64, Vec<usize>, usize) {
    let mut a = vec![0usize; n];
    let mut best = (f64::NEG_INFINITY, a.clone());
    let mut visited = 0;
    fn rec(
        i: usize,
        max: usize,
        a: &mut Vec<usize>,
        edges: &[(usize, usize)],
        best: &mut (f64, Vec<usize>),
        visited: &mut usize,
    ) {
        let n = a.len();
        if i == n {
            *visited += 1;
            let q = modularity(n, edges, a, 1.0);
            if q > best.0 + 1e-12 {
                *best = (q, a.clone());
            }
            return;
        }
        for c in 0..=max + 1 {
            a[i] = c;
            rec(i + 1, max.max(c), a, edges, best, visited);
        }
    }
    if n == 0 {
        return (0.0, Vec::new(), 1);
    }
    a[0] = 0;
    rec(1, 0, &mut a, edges, &mut best, &mut visited);
    (best.0, best.1, visited)
}

/// Local clustering by counting closed triangles directly.
pub fn local_clustering(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let a = dense_adjacency(n, edges);
    (0..n)
        .map(|u| {
            let nb: Vec<usize> = (0..n).filter(|&v| a[u][v] == 1.0).collect();
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0.0;
            for i in 0..k {
                for j in (i + 1)..k {
                    links += a[nb[i]][nb[j]];
                }
            }
            links / (k * (k - 1) / 2) as f64
        })
        .collect()
}

/// Fractions of variance on the two leading principal axes of `points`.
pub fn pca_explained(points: &[Vec<f64>]) -> [f64; 2] {
    let n = points.len() as f64;
    let d = points[0].len();
    let mean: Vec<f64> = (0..d).map(|j| points.iter().map(|p| p[j]).sum::<f64>() / n).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for p in points {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += (p[i] - mean[i]) * (p[j] - mean[j]) / (n - 1.0);
            }
        }
    }
    let ev = jacobi_eigenvalues(cov);
    let total: f64 = ev.iter().sum();
    [ev[d - 1] / total, ev[d - 2] / total]
}

/// `Σ_t (R_t - b) log π(a_t)` for a linear softmax policy, computed naively.
pub fn reinforce_objective(theta: &[f64], steps: &[(Vec<Vec<f64>>, usize, f64)], baseline: f64) -> f64 {
    steps
        .iter()
        .map(|(cands, action, r)| {
            let scores: Vec<f64> = cands
                .iter()
                .map(|f| f.iter().zip(theta).map(|(a, b)| a * b).sum())
                .collect();
            let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln();
            (r - baseline) * (scores[*action] - lse)
        })
        .sum()
}

/// Central finite-difference gradient of `f` at `x`.
pub fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], eps: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut hi = x.to_vec();
            let mut lo = x.to_vec();
            hi[i] += eps;
            lo[i] -= eps;
            (f(&hi) - f(&lo)) / (2.0 * eps)
        })
        .collect()
}

/// Means over every complete run of `w` consecutive values.
pub fn full_window_means(x: &[f64], w: usize) -> Vec<f64> {
    x.windows(w).map(|s| s.iter().sum::<f64>() / w as f64).collect()
}

/// Two entropy series that move together for samples `< flip` and in
/// opposite directions afterwards.
pub fn flipped_entropy_series<R: Rng>(rng: &mut R, len: usize, flip: usize) -> Vec<(u64, f64, f64)> {
    (0..len)
        .map(|i| {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let noise: f64 = rng.gen_range(-0.05..0.05);
            let sem = if i < flip { x } else { -x };
            (i as u64, 2.0 + x, 3.0 + sem + noise)
        })
        .collect()
}

/// Two 5-cliques {0..4} and {5..9} joined by the edge (4, 5).
pub fn two_cliques_with_bridge() -> Edges {
    let mut edges = Vec::new();
    for base in [0, 5] {
        for u in base..base + 5 {
            for v in (u + 1)..base + 5 {
                edges.push((u, v));
            }
        }
    }
    edges.push((4, 5));
    edges
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i}")).collect()
}

/// Library snapshot with nodes `n0..n{n-1}` and the given edges.
pub fn snapshot(n: usize, edges: &[(usize, usize)]) -> critdisc::GraphSnapshot {
    let names = labels(n);
    let pairs: Vec<(&str, &str)> = edges
        .iter()
        .map(|&(u, v)| (names[u].as_str(), names[v].as_str()))
        .collect();
    let nodes: Vec<&str> = names.iter().map(String::as_str).collect();
    critdisc::GraphSnapshot::from_parts(0, &nodes, &pairs).expect("valid test graph")
}

/// λ_α-only training on a small three-topic graph. Random candidate pairs
/// are mostly cross-topic bridges, so picking them always moves α toward the
/// target of 1.
pub fn alpha_only_training() -> (
    critdisc::synth::GrowthConfig,
    critdisc::rl::RewardConfig<f64>,
    critdisc::rl::TrainConfig,
) {
    let env = critdisc::synth::GrowthConfig {
        n_iterations: 5,
        n_centroids: 3,
        ..Default::default()
    };
    let reward = critdisc::rl::RewardConfig {
        lambda_d: 0.0,
        lambda_se: 0.0,
        lambda_alpha: 1.0,
        d_target: 0.0,
        alpha_target: 1.0,
    };
    let train = critdisc::rl::TrainConfig {
        episodes: 20,
        steps_per_episode: 20,
        learning_rate: 20.0,
        seed: 0,
        arrival_every: 0,
        ..Default::default()
    };
    (env, reward, train)
}
