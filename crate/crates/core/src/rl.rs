//! Discovery reward and a score-function (REINFORCE) trainer for a linear
//! softmax edge-proposal policy on synthetic graph growth.
//!
//! The reward for a step is
//! `-λ_D (D_t - D_target)^2 + λ_SE S_sem(t) + λ_α (1 - |α_t - α_target|)`,
//! and the update ascends `Σ_t (R_t - b) ∇ log π(a_t)`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::format::{f9, Metadata};
use crate::scalar::Scalar;
use crate::spectral::{discovery_parameter, semantic_adjacency, semantic_entropy, structural_entropy};
use crate::synth::{Grower, GrowthConfig, SURPRISE_COSINE};

/// degree preference, endpoint cosine, bridging indicator, bias
pub const N_FEATURES: usize = 4;
pub const FEATURE_NAMES: [&str; N_FEATURES] = ["degree", "cosine", "bridge", "bias"];
/// Node cap for training environments so exact entropies stay cheap.
pub const MAX_ENV_NODES: usize = 300;
pub const CURVE_HEADER: &str = "episode,mean_reward,alpha_end,d_end";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardConfig<T> {
    pub lambda_d: T,
    pub lambda_se: T,
    pub lambda_alpha: T,
    pub d_target: T,
    pub alpha_target: T,
}

impl<T: Scalar> RewardConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        if self.lambda_d < z || self.lambda_se < z || self.lambda_alpha < z {
            return Err(Error::InvalidInput("reward weights must be non-negative".into()));
        }
        if !(self.lambda_d > z || self.lambda_se > z || self.lambda_alpha > z) {
            return Err(Error::InvalidInput(
                "at least one reward weight must be positive".into(),
            ));
        }
        if !(self.d_target >= -T::one() && self.d_target <= T::one()) {
            return Err(Error::InvalidInput("d_target must lie in [-1, 1]".into()));
        }
        if !(self.alpha_target >= z && self.alpha_target <= T::one()) {
            return Err(Error::InvalidInput("alpha_target must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Whether the reward depends on the entropies at all.
    pub fn needs_entropy(&self) -> bool {
        self.lambda_d > T::zero() || self.lambda_se > T::zero()
    }
}

impl Default for RewardConfig<f64> {
    fn default() -> Self {
        RewardConfig {
            lambda_d: 1.0,
            lambda_se: 0.1,
            lambda_alpha: 1.0,
            d_target: -0.03,
            alpha_target: 0.12,
        }
    }
}

pub fn reward<T: Scalar>(d_t: T, s_sem_t: T, alpha_t: T, cfg: &RewardConfig<T>) -> T {
    let dd = d_t - cfg.d_target;
    let da = alpha_t - cfg.alpha_target;
    let da = if da < T::zero() { -da } else { da };
    -cfg.lambda_d * dd * dd + cfg.lambda_se * s_sem_t + cfg.lambda_alpha * (T::one() - da)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams<T> {
    pub theta: Vec<T>,
}

impl<T: Scalar> PolicyParams<T> {
    pub fn zeros(n: usize) -> Self {
        PolicyParams {
            theta: vec![T::zero(); n],
        }
    }

    fn score(&self, features: &[T]) -> T {
        self.theta
            .iter()
            .zip(features)
            .fold(T::zero(), |acc, (&w, &f)| acc + w * f)
    }
}

fn check_candidates<T: Scalar>(theta: &PolicyParams<T>, candidates: &[Vec<T>]) -> Result<()> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("policy needs at least one candidate action".into()));
    }
    if let Some(c) = candidates.iter().find(|c| c.len() != theta.theta.len()) {
        return Err(Error::InvalidInput(format!(
            "candidate has {} features, policy expects {}",
            c.len(),
            theta.theta.len()
        )));
    }
    Ok(())
}

/// Log-softmax of `θ·f` over the candidates, stabilized by max-subtraction.
pub fn log_policy_probs<T: Scalar>(theta: &PolicyParams<T>, candidates: &[Vec<T>]) -> Result<Vec<T>> {
    check_candidates(theta, candidates)?;
    let scores: Vec<T> = candidates.iter().map(|c| theta.score(c)).collect();
    let max = scores.iter().copied().fold(scores[0], |a, b| if b > a { b } else { a });
    let log_z = scores.iter().fold(T::zero(), |acc, &s| acc + (s - max).exp()).ln();
    Ok(scores.iter().map(|&s| s - max - log_z).collect())
}

pub fn policy_probs<T: Scalar>(theta: &PolicyParams<T>, candidates: &[Vec<T>]) -> Result<Vec<T>> {
    Ok(log_policy_probs(theta, candidates)?
        .into_iter()
        .map(|l| l.exp())
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeStep<T> {
    /// Feature vectors of every candidate offered at this step.
    pub candidates: Vec<Vec<T>>,
    pub action: usize,
    pub log_prob: T,
    pub reward: T,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EpisodeLog<T> {
    pub steps: Vec<EpisodeStep<T>>,
}

impl<T: Scalar> EpisodeLog<T> {
    pub fn mean_reward(&self) -> Option<T> {
        let r: Vec<T> = self.steps.iter().map(|s| s.reward).collect();
        crate::stats::mean(&r)
    }
}

/// `Σ_t (R_t - b) log π_θ(a_t)`, whose gradient is the REINFORCE estimate.
pub fn surrogate_objective<T: Scalar>(theta: &PolicyParams<T>, episode: &EpisodeLog<T>, baseline: T) -> Result<T> {
    let mut total = T::zero();
    for step in &episode.steps {
        let lp = log_policy_probs(theta, &step.candidates)?;
        total += (step.reward - baseline) * lp[step.action];
    }
    Ok(total)
}

/// Gradient-descent loss `-Σ_t (R_t - b) log π_θ(a_t)`.
pub fn loss<T: Scalar>(theta: &PolicyParams<T>, episode: &EpisodeLog<T>, baseline: T) -> Result<T> {
    Ok(-surrogate_objective(theta, episode, baseline)?)
}

/// Analytic gradient of [`surrogate_objective`]: `Σ_t (R_t - b)(f_{a_t} - E_π[f])`.
pub fn score_gradient<T: Scalar>(theta: &PolicyParams<T>, episode: &EpisodeLog<T>, baseline: T) -> Result<Vec<T>> {
    let mut grad = vec![T::zero(); theta.theta.len()];
    for (t, step) in episode.steps.iter().enumerate() {
        let probs = policy_probs(theta, &step.candidates)?;
        if step.action >= step.candidates.len() {
            return Err(Error::InvalidInput(format!("step {t}: action index out of range")));
        }
        let advantage = step.reward - baseline;
        for (k, g) in grad.iter_mut().enumerate() {
            let expected = step
                .candidates
                .iter()
                .zip(&probs)
                .fold(T::zero(), |acc, (f, &p)| acc + p * f[k]);
            *g += advantage * (step.candidates[step.action][k] - expected);
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient { step: t });
        }
    }
    Ok(grad)
}

/// `θ ← θ + lr Σ_t (R_t - b) ∇ log π_θ(a_t)`.
pub fn reinforce_update<T: Scalar>(
    theta: &PolicyParams<T>,
    episode: &EpisodeLog<T>,
    learning_rate: T,
    baseline: T,
) -> Result<PolicyParams<T>> {
    if episode.steps.is_empty() {
        return Err(Error::InvalidInput("cannot update from an empty episode".into()));
    }
    if !(learning_rate >= T::zero()) {
        return Err(Error::InvalidInput("learning rate must be non-negative".into()));
    }
    let grad = score_gradient(theta, episode, baseline)?;
    let updated: Vec<T> = theta
        .theta
        .iter()
        .zip(&grad)
        .map(|(&w, &g)| w + learning_rate * g)
        .collect();
    if updated.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFiniteGradient {
            step: episode.steps.len() - 1,
        });
    }
    Ok(PolicyParams { theta: updated })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub episodes: usize,
    pub steps_per_episode: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Random non-edges offered per step.
    pub random_candidates: usize,
    /// Generator-weighted candidates offered per step.
    pub weighted_candidates: usize,
    /// A generator-driven node arrival happens every this many steps (0 disables).
    pub arrival_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            episodes: 20,
            steps_per_episode: 30,
            learning_rate: 0.5,
            seed: 0,
            random_candidates: 6,
            weighted_candidates: 6,
            arrival_every: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub mean_reward: f64,
    pub alpha_end: f64,
    pub d_end: Option<f64>,
    pub baseline: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingResult {
    pub theta: PolicyParams<f64>,
    pub curve: Vec<EpisodeSummary>,
}

/// Training environment: a grown graph with incremental surprise counts.
struct Env {
    grower: Grower,
    n_edges: usize,
    n_surprising: usize,
    s_sem: Option<f64>,
}

impl Env {
    fn new(config: &GrowthConfig) -> Result<Self> {
        let mut grower = Grower::new(config.clone())?;
        let mut it = 1u64;
        while it <= config.n_iterations as u64
            && grower.graph().node_count() + config.nodes_per_iter <= MAX_ENV_NODES / 2
        {
            grower.grow(it);
            it += 1;
        }
        let mut env = Env {
            grower,
            n_edges: 0,
            n_surprising: 0,
            s_sem: None,
        };
        env.recount();
        Ok(env)
    }

    fn recount(&mut self) {
        let g = self.grower.graph();
        self.n_edges = g.edge_count();
        self.n_surprising = g
            .edges()
            .iter()
            .filter(|&&(a, b)| self.grower.cosine(a, b) < SURPRISE_COSINE)
            .count();
        self.s_sem = None;
    }

    fn alpha(&self) -> f64 {
        if self.n_edges == 0 {
            0.0
        } else {
            self.n_surprising as f64 / self.n_edges as f64
        }
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        if self.grower.add_edge(a, b) {
            self.n_edges += 1;
            if self.grower.cosine(a, b) < SURPRISE_COSINE {
                self.n_surprising += 1;
            }
        }
    }

    fn arrival<R: Rng>(&mut self, rng: &mut R) {
        if self.grower.graph().node_count() >= MAX_ENV_NODES {
            return;
        }
        let node = self.grower.spawn_node(rng);
        self.grower.attach(rng, node);
        self.recount();
    }

    fn features(&self, a: usize, b: usize, max_degree: f64) -> Vec<f64> {
        let g = self.grower.graph();
        let deg = (g.degree(a) + g.degree(b)) as f64 / (2.0 * max_degree.max(1.0));
        let c = self.grower.cosine(a, b);
        let bridge = if c < SURPRISE_COSINE { 1.0 } else { 0.0 };
        vec![deg, c, bridge, 1.0]
    }

    /// Random non-edges plus generator-weighted proposals, without duplicates.
    fn candidates<R: Rng>(&mut self, rng: &mut R, cfg: &TrainConfig) -> Vec<(usize, usize)> {
        let n = self.grower.graph().node_count();
        let mut out: Vec<(usize, usize)> = Vec::new();
        let push = |out: &mut Vec<(usize, usize)>, a: usize, b: usize| {
            let key = (a.min(b), a.max(b));
            if a != b && !out.contains(&key) {
                out.push(key);
            }
        };
        let mut attempts = 0;
        while out.len() < cfg.random_candidates && attempts < 50 * cfg.random_candidates.max(1) {
            attempts += 1;
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b && !self.grower.graph().has_edge(a, b) {
                push(&mut out, a, b);
            }
        }
        for _ in 0..cfg.weighted_candidates {
            let a = rng.gen_range(0..n);
            if let Some((b, _)) = self.grower.weighted_target(rng, a, &[]) {
                push(&mut out, a, b);
            }
        }
        out
    }

    fn entropies(&mut self) -> Result<(f64, f64)> {
        let s_struct = structural_entropy::<f64>(self.grower.graph())?.entropy_nats;
        let s_sem = match self.s_sem {
            Some(s) => s,
            None => {
                let table = self.grower.embeddings();
                let a = semantic_adjacency(&table, self.grower.graph().nodes())?;
                let s = semantic_entropy(&a)?.entropy_nats;
                self.s_sem = Some(s);
                s
            }
        };
        Ok((s_struct, s_sem))
    }
}

fn step_reward(env: &mut Env, cfg: &RewardConfig<f64>) -> Result<f64> {
    let alpha = env.alpha();
    if cfg.needs_entropy() {
        let (s_struct, s_sem) = env.entropies()?;
        let d = discovery_parameter(s_struct, s_sem).unwrap_or(0.0);
        Ok(reward(d, s_sem, alpha, cfg))
    } else {
        Ok(reward(0.0, 0.0, alpha, cfg))
    }
}

fn run_episode(
    theta: &PolicyParams<f64>,
    env_config: &GrowthConfig,
    reward_cfg: &RewardConfig<f64>,
    cfg: &TrainConfig,
    episode: usize,
) -> Result<(EpisodeLog<f64>, Env)> {
    let mut env = Env::new(env_config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(episode as u64 + 1);
    let mut log = EpisodeLog::default();
    for step in 0..cfg.steps_per_episode {
        let ctx = |e: Error| Error::AtStep {
            episode,
            step,
            source: Box::new(e),
        };
        if cfg.arrival_every > 0 && step > 0 && step % cfg.arrival_every == 0 {
            env.arrival(&mut rng);
        }
        let pairs = env.candidates(&mut rng, cfg);
        if pairs.is_empty() {
            break;
        }
        let g = env.grower.graph();
        let max_degree = (0..g.node_count()).map(|i| g.degree(i)).max().unwrap_or(1) as f64;
        let feats: Vec<Vec<f64>> = pairs.iter().map(|&(a, b)| env.features(a, b, max_degree)).collect();
        let log_probs = log_policy_probs(theta, &feats).map_err(ctx)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut action = feats.len() - 1;
        for (i, lp) in log_probs.iter().enumerate() {
            acc += lp.exp();
            if u < acc {
                action = i;
                break;
            }
        }
        let (a, b) = pairs[action];
        env.add_edge(a, b);
        let r = step_reward(&mut env, reward_cfg).map_err(ctx)?;
        log.steps.push(EpisodeStep {
            candidates: feats,
            action,
            log_prob: log_probs[action],
            reward: r,
        });
    }
    Ok((log, env))
}

/// Synchronous REINFORCE: one episode per update, baseline = running mean of
/// earlier episodes' mean rewards (the first episode uses its own mean).
pub fn train(env_config: &GrowthConfig, reward_cfg: &RewardConfig<f64>, cfg: &TrainConfig) -> Result<TrainingResult> {
    env_config.validate()?;
    reward_cfg.validate()?;
    if !(cfg.learning_rate >= 0.0) {
        return Err(Error::InvalidInput("learning rate must be non-negative".into()));
    }
    let mut theta = PolicyParams::zeros(N_FEATURES);
    let mut curve = Vec::with_capacity(cfg.episodes);
    let mut reward_sum = 0.0;
    for episode in 0..cfg.episodes {
        let (log, mut env) = run_episode(&theta, env_config, reward_cfg, cfg, episode)?;
        let Some(mean_reward) = log.mean_reward() else {
            break;
        };
        let baseline = if episode == 0 {
            mean_reward
        } else {
            reward_sum / episode as f64
        };
        reward_sum += mean_reward;
        theta = reinforce_update(&theta, &log, cfg.learning_rate, baseline).map_err(|e| Error::AtStep {
            episode,
            step: log.steps.len(),
            source: Box::new(e),
        })?;
        let d_end = {
            let (s_struct, s_sem) = env.entropies().map_err(|e| Error::AtStep {
                episode,
                step: log.steps.len(),
                source: Box::new(e),
            })?;
            discovery_parameter(s_struct, s_sem)
        };
        curve.push(EpisodeSummary {
            episode,
            mean_reward,
            alpha_end: env.alpha(),
            d_end,
            baseline,
        });
    }
    Ok(TrainingResult { theta, curve })
}

pub fn write_curve_csv<W: Write>(mut out: W, curve: &[EpisodeSummary], meta: &Metadata) -> std::io::Result<()> {
    out.write_all(meta.render().as_bytes())?;
    writeln!(out, "{CURVE_HEADER}")?;
    for e in curve {
        writeln!(
            out,
            "{},{},{},{}",
            e.episode,
            f9(e.mean_reward),
            f9(e.alpha_end),
            e.d_end.map(f9).unwrap_or_else(|| "NaN".into())
        )?;
    }
    Ok(())
}
