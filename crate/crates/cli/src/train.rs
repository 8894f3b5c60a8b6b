use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use critdisc::format::f9;
use critdisc::rl::{train, write_curve_csv, RewardConfig, TrainConfig, FEATURE_NAMES};
use critdisc::synth::GrowthConfig;
use log::info;

use crate::config::{ConfigFile, Resolver};
use crate::error::CliError;
use crate::output::OutDir;
use crate::simulate::GrowthArgs;

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub growth: GrowthArgs,
    /// Training episodes.
    #[arg(long)]
    pub episodes: Option<usize>,
    /// Edge additions per episode.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Policy-gradient step size.
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Random non-edges offered as actions per step.
    #[arg(long)]
    pub random_candidates: Option<usize>,
    /// Generator-weighted edges offered as actions per step.
    #[arg(long)]
    pub weighted_candidates: Option<usize>,
    /// Add a generator-driven node every this many steps (0 disables).
    #[arg(long)]
    pub arrival_every: Option<usize>,
    /// Reward weight of the discovery-parameter term.
    #[arg(long)]
    pub lambda_d: Option<f64>,
    /// Reward weight of the semantic-entropy term.
    #[arg(long)]
    pub lambda_se: Option<f64>,
    /// Reward weight of the surprising-fraction term.
    #[arg(long)]
    pub lambda_alpha: Option<f64>,
    /// Target discovery parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub d_target: Option<f64>,
    /// Target surprising-edge fraction.
    #[arg(long)]
    pub alpha_target: Option<f64>,
    /// `key = value` config file; flags override its entries.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Environment defaults: a short growth run so each episode stays small.
fn env_defaults() -> GrowthConfig {
    GrowthConfig {
        n_iterations: 40,
        ..GrowthConfig::default()
    }
}

pub fn run(args: &TrainArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let mut r = Resolver::new(&file, "rl-train");
    let env = args.growth.resolve(&mut r, env_defaults())?;
    let td = TrainConfig::default();
    let train_cfg = TrainConfig {
        episodes: r.value("episodes", args.episodes, td.episodes)?,
        steps_per_episode: r.value("steps", args.steps, td.steps_per_episode)?,
        learning_rate: r.value("learning-rate", args.learning_rate, td.learning_rate)?,
        seed: env.seed,
        random_candidates: r.value("random-candidates", args.random_candidates, td.random_candidates)?,
        weighted_candidates: r.value("weighted-candidates", args.weighted_candidates, td.weighted_candidates)?,
        arrival_every: r.value("arrival-every", args.arrival_every, td.arrival_every)?,
    };
    let rd = RewardConfig::<f64>::default();
    let reward = RewardConfig {
        lambda_d: r.value("lambda-d", args.lambda_d, rd.lambda_d)?,
        lambda_se: r.value("lambda-se", args.lambda_se, rd.lambda_se)?,
        lambda_alpha: r.value("lambda-alpha", args.lambda_alpha, rd.lambda_alpha)?,
        d_target: r.value("d-target", args.d_target, rd.d_target)?,
        alpha_target: r.value("alpha-target", args.alpha_target, rd.alpha_target)?,
    };
    let out_dir = r.output("out", args.out.clone())?;
    let meta = r.finish()?;

    let result = train(&env, &reward, &train_cfg)?;
    let out = OutDir::create(&out_dir)?;
    out.write("curve.csv", |w| write_curve_csv(w, &result.curve, &meta))?;
    out.write("theta.txt", |w| {
        w.write_all(meta.render().as_bytes())?;
        for (n, t) in FEATURE_NAMES.iter().zip(&result.theta.theta) {
            writeln!(w, "{n} = {}", f9(*t))?;
        }
        Ok(())
    })?;
    info!(
        "trained {} episodes; results in {}",
        result.curve.len(),
        out_dir.display()
    );
    Ok(())
}
