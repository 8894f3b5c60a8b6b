use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use critdisc::embeddings::write_embeddings;
use critdisc::graph::{format_pattern, write_edge_list, DEFAULT_PATTERN};
use critdisc::synth::{generate_series, GrowthConfig};
use log::info;

use crate::config::{ConfigFile, Resolver};
use crate::error::CliError;
use crate::output::OutDir;

/// Growth parameters shared by `simulate` and `rl-train`.
#[derive(Debug, Args, Default)]
pub struct GrowthArgs {
    /// Growth iterations, one snapshot each.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Nodes added per iteration.
    #[arg(long)]
    pub nodes_per_iter: Option<usize>,
    /// Edges attached by each new node.
    #[arg(long)]
    pub edges_per_node: Option<usize>,
    /// Weight of the preferential-attachment term.
    #[arg(long)]
    pub pref_weight: Option<f64>,
    /// Weight of the semantic-proximity term.
    #[arg(long)]
    pub sem_weight: Option<f64>,
    /// Probability that an attachment deliberately links distant topics.
    #[arg(long)]
    pub surprise_prob: Option<f64>,
    /// Number of topic centroids.
    #[arg(long)]
    pub centroids: Option<usize>,
    /// Embedding dimension.
    #[arg(long)]
    pub embed_dim: Option<usize>,
    /// Standard deviation of per-node noise around a centroid.
    #[arg(long)]
    pub embed_noise: Option<f64>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl GrowthArgs {
    pub fn resolve(&self, r: &mut Resolver, defaults: GrowthConfig) -> Result<GrowthConfig, CliError> {
        let cfg = GrowthConfig {
            seed: r.value("seed", self.seed, defaults.seed)?,
            n_iterations: r.value("iterations", self.iterations, defaults.n_iterations)?,
            nodes_per_iter: r.value("nodes-per-iter", self.nodes_per_iter, defaults.nodes_per_iter)?,
            edges_per_new_node: r.value("edges-per-node", self.edges_per_node, defaults.edges_per_new_node)?,
            pref_weight: r.value("pref-weight", self.pref_weight, defaults.pref_weight)?,
            sem_weight: r.value("sem-weight", self.sem_weight, defaults.sem_weight)?,
            surprise_prob: r.value("surprise-prob", self.surprise_prob, defaults.surprise_prob)?,
            n_centroids: r.value("centroids", self.centroids, defaults.n_centroids)?,
            embed_dim: r.value("embed-dim", self.embed_dim, defaults.embed_dim)?,
            embed_noise: r.value("embed-noise", self.embed_noise, defaults.embed_noise)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub growth: GrowthArgs,
    /// `key = value` config file; flags override its entries.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let mut r = Resolver::new(&file, "simulate");
    let cfg = args.growth.resolve(&mut r, GrowthConfig::default())?;
    let out_dir = r.output("out", args.out.clone())?;
    let meta = r.finish()?;

    let corpus = generate_series(&cfg)?;
    let out = OutDir::create(&out_dir)?;
    let header = meta.lines();
    let width = cfg.n_iterations.to_string().len().max(4);
    for g in corpus.series.snapshots() {
        let name = format_pattern(DEFAULT_PATTERN, g.iteration(), width)?;
        out.write(&name, |w| write_edge_list(w, g, &header))?;
    }
    out.write("embeddings.tsv", |w| write_embeddings(w, &corpus.embeddings, &header))?;
    out.write("manifest.txt", |w| {
        w.write_all(meta.render().as_bytes())?;
        for (k, v) in cfg.entries() {
            writeln!(w, "{k} = {v}")?;
        }
        let s = corpus.stats;
        writeln!(w, "surprise_attempts = {}", s.surprise_attempts)?;
        writeln!(w, "surprise_fallbacks = {}", s.surprise_fallbacks)?;
        writeln!(w, "proximity_fallbacks = {}", s.proximity_fallbacks)?;
        writeln!(w, "final_nodes = {}", corpus.series.last().node_count())?;
        writeln!(w, "final_edges = {}", corpus.series.last().edge_count())
    })?;
    info!(
        "wrote {} snapshots ({} nodes) to {}",
        corpus.series.len(),
        corpus.series.last().node_count(),
        out_dir.display()
    );
    Ok(())
}
