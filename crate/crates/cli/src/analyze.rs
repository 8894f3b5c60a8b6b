use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use critdisc::dynamics::{
    build_trace, detect_transition, rolling_cross_correlation, write_trace_csv, write_transition_report,
    write_xcorr_csv, DEFAULT_SUSTAIN, DEFAULT_WINDOW,
};
use critdisc::edges::{
    classify_edges, threshold_sweep, write_surprise_csv, write_sweep_csv, DEFAULT_SWEEP, DEFAULT_THRESHOLD,
};
use critdisc::embeddings::pca_2d;
use critdisc::format::{f9, Metadata};
use critdisc::graph::format_pattern;
use critdisc::topology::{
    bc_diversity_trace, centroid_distance_histogram, clustering_coefficient, degree_distribution, louvain,
    node_metrics, normalize_betweenness, write_bc_diversity_csv, write_histogram_csv, write_node_metrics_csv,
};
use critdisc::Error;
use log::info;

use crate::config::{ConfigFile, Grid, Resolver};
use crate::error::CliError;
use crate::inputs::{load_inputs, InputArgs};
use crate::output::OutDir;
use crate::svg::{bar_chart, line_chart, scatter_chart, Chart, Series};

const MAX_SHOWN_COMMUNITIES: usize = 20;

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    /// `key = value` config file; flags override its entries.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Cosine below which an edge counts as surprising.
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    /// Rolling correlation window, in snapshots.
    #[arg(long)]
    pub window: Option<usize>,
    /// Negative correlations required after a sign change.
    #[arg(long)]
    pub sustain: Option<usize>,
    /// Seed for Louvain node ordering.
    #[arg(long)]
    pub louvain_seed: Option<u64>,
    /// Louvain resolution.
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Scale betweenness by 2 / ((n-1)(n-2)) in the node-metrics CSV.
    #[arg(long)]
    pub normalize_betweenness: bool,
    /// Bins of the centroid-distance histogram.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Comma-separated thresholds for the sensitivity sweep.
    #[arg(long, allow_negative_numbers = true)]
    pub thresholds: Option<Grid>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn csv(out: &OutDir, name: &str, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    out.write(name, |w| f(w))?;
    Ok(())
}

pub fn run(args: &AnalyzeArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let mut r = Resolver::new(&file, "analyze");
    let inputs = load_inputs(&args.inputs, &mut r)?;
    let threshold = r.value("threshold", args.threshold, DEFAULT_THRESHOLD)?;
    let window = r.value("window", args.window, DEFAULT_WINDOW)?;
    let sustain = r.value("sustain", args.sustain, DEFAULT_SUSTAIN)?;
    let louvain_seed = r.value("louvain-seed", args.louvain_seed, 0u64)?;
    let resolution = r.value("resolution", args.resolution, 1.0)?;
    let normalize = r.switch("normalize-betweenness", args.normalize_betweenness)?;
    let bins = r.value("bins", args.bins, 20usize)?;
    let grid = r.value("thresholds", args.thresholds.clone(), Grid(DEFAULT_SWEEP.to_vec()))?;
    let out_dir = r.output("out", args.out.clone())?;
    let meta = r.finish()?;
    if !(resolution > 0.0) {
        return Err(Error::InvalidInput(format!("resolution must be positive, got {resolution}")).into());
    }

    let (series, emb) = (&inputs.series, &inputs.embeddings);
    let out = OutDir::create(&out_dir)?;

    let trace = build_trace(series, emb, threshold)?;
    if trace.len() < window {
        return Err(Error::InvalidInput(format!(
            "{} snapshots is fewer than the correlation window {window}; lower --window or add snapshots",
            trace.len()
        ))
        .into());
    }
    info!("entropy trace over {} snapshots", trace.len());
    let xcorr = rolling_cross_correlation(&trace, window)?;
    let transition = detect_transition(&xcorr, sustain)?;
    let sweep = threshold_sweep(series, emb, &grid.0)?;
    let bc_div = bc_diversity_trace(series, emb)?;

    csv(&out, "trace.csv", |w| write_trace_csv(w, &trace, &meta))?;
    csv(&out, "xcorr.csv", |w| write_xcorr_csv(w, &xcorr, &meta))?;
    csv(&out, "transition.txt", |w| {
        write_transition_report(w, &transition, &meta)
    })?;
    csv(&out, "sweep.csv", |w| write_sweep_csv(w, &sweep, &meta))?;
    csv(&out, "bc_diversity.csv", |w| write_bc_diversity_csv(w, &bc_div, &meta))?;

    let surprise = out.subdir("surprise")?;
    let last_it = series.last().iteration();
    let width = last_it.to_string().len().max(4);
    for g in series.snapshots() {
        let c = classify_edges(g, emb, threshold).map_err(|e| e.at_iteration(g.iteration()))?;
        let name = format_pattern("surprise_{iter}.csv", g.iteration(), width)?;
        let mut m = meta.clone();
        m.push("iteration", g.iteration());
        csv(&surprise, &name, |w| write_surprise_csv(w, g, &c, &m))?;
    }

    let g = series.last();
    let mut final_meta = meta.clone();
    final_meta.push("iteration", last_it);
    let communities = louvain(g, resolution, louvain_seed);
    let mut metrics = node_metrics(g, emb, Some(&communities)).map_err(|e| e.at_iteration(last_it))?;
    if normalize {
        let mut bc: Vec<f64> = metrics.iter().map(|m| m.betweenness).collect();
        normalize_betweenness(&mut bc);
        metrics.iter_mut().zip(bc).for_each(|(m, b)| m.betweenness = b);
    }
    csv(&out, "node_metrics.csv", |w| {
        write_node_metrics_csv(w, &metrics, &final_meta)
    })?;
    csv(&out, "degree_distribution.csv", |w| {
        w.write_all(final_meta.render().as_bytes())?;
        writeln!(w, "degree,count")?;
        for (d, c) in degree_distribution(g) {
            writeln!(w, "{d},{c}")?;
        }
        Ok(())
    })?;

    let proj = pca_2d(emb, g.nodes()).map_err(|e| e.at_iteration(last_it))?;
    let hist = centroid_distance_histogram(&proj, &communities, bins)?;
    csv(&out, "pca.csv", |w| {
        w.write_all(final_meta.render().as_bytes())?;
        writeln!(
            w,
            "# explained_variance = {},{}",
            f9(proj.explained_variance[0]),
            f9(proj.explained_variance[1])
        )?;
        writeln!(w, "label,pc1,pc2,community,centroid_distance")?;
        for (i, l) in proj.labels.iter().enumerate() {
            let c = communities.of(l).map(|c| c.to_string()).unwrap_or_default();
            let [x, y] = proj.coordinates[i];
            writeln!(w, "{l},{},{},{c},{}", f9(x), f9(y), f9(hist.distances[i]))?;
        }
        Ok(())
    })?;
    csv(&out, "histogram.csv", |w| write_histogram_csv(w, &hist, &final_meta))?;

    let last = trace.samples.last().expect("non-empty trace");
    let summary = Summary {
        snapshots: trace.len(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        s_struct: last.s_struct,
        s_sem: last.s_sem,
        d_param: last.d_param,
        alpha: last.alpha,
        n_surprising: last.n_surprising,
        transition: transition.transition_iteration,
        sustain: transition.sustain_length,
        communities: communities.n_communities(),
        modularity: communities.modularity,
        clustering: clustering_coefficient(g),
        explained: proj.explained_variance,
    };
    out.write_str("summary.txt", &format!("{}{}", meta.render(), summary.render()))?;

    plots(
        &out,
        &meta,
        &final_meta,
        &trace,
        &xcorr,
        transition.transition_iteration,
        &sweep,
        &bc_div,
        &proj,
        &communities,
        &hist,
    )?;
    info!("wrote results to {}", out_dir.display());
    Ok(())
}

struct Summary {
    snapshots: usize,
    nodes: usize,
    edges: usize,
    s_struct: f64,
    s_sem: f64,
    d_param: Option<f64>,
    alpha: f64,
    n_surprising: usize,
    transition: Option<u64>,
    sustain: usize,
    communities: usize,
    modularity: f64,
    clustering: f64,
    explained: [f64; 2],
}

impl Summary {
    fn render(&self) -> String {
        let rows = [
            ("snapshots", self.snapshots.to_string()),
            ("final_nodes", self.nodes.to_string()),
            ("final_edges", self.edges.to_string()),
            ("final_s_struct", f9(self.s_struct)),
            ("final_s_sem", f9(self.s_sem)),
            ("final_d_param", self.d_param.map(f9).unwrap_or_else(|| "NaN".into())),
            ("final_alpha", f9(self.alpha)),
            ("final_surprising_edges", self.n_surprising.to_string()),
            (
                "transition_iteration",
                self.transition.map(|t| t.to_string()).unwrap_or_else(|| "none".into()),
            ),
            ("sustain_length", self.sustain.to_string()),
            ("communities", self.communities.to_string()),
            ("modularity", f9(self.modularity)),
            ("clustering_coefficient", f9(self.clustering)),
            (
                "pca_explained_variance",
                format!("{},{}", f9(self.explained[0]), f9(self.explained[1])),
            ),
        ];
        rows.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn plots(
    out: &OutDir,
    meta: &Metadata,
    final_meta: &Metadata,
    trace: &critdisc::EntropyTraceF64,
    xcorr: &critdisc::CrossCorrelationF64,
    transition: Option<u64>,
    sweep: &critdisc::edges::ThresholdSweep<f64>,
    bc_div: &[(u64, critdisc::topology::Correlation<f64>)],
    proj: &critdisc::PcaProjectionF64,
    communities: &critdisc::topology::CommunityAssignment,
    hist: &critdisc::topology::CentroidHistogram<f64>,
) -> Result<(), CliError> {
    let s = &trace.samples;
    let pts = |f: &dyn Fn(&critdisc::dynamics::EntropySample<f64>) -> Option<f64>| -> Vec<(f64, f64)> {
        s.iter().filter_map(|x| f(x).map(|y| (x.iteration as f64, y))).collect()
    };
    let structural = Series::new("structural", pts(&|x| Some(x.s_struct)), 0);
    let semantic = Series::new("semantic", pts(&|x| Some(x.s_sem)), 1);

    out.write_str(
        "structural_entropy.svg",
        &line_chart(
            &Chart::new("Structural entropy", "iteration", "entropy (nats)"),
            std::slice::from_ref(&structural),
            meta,
        ),
    )?;
    out.write_str(
        "entropies.svg",
        &line_chart(
            &Chart::new("Structural and semantic entropy", "iteration", "entropy (nats)"),
            &[structural, semantic],
            meta,
        ),
    )?;

    let mut chart = Chart::new(
        &format!("Rolling correlation (window {})", xcorr.window),
        "iteration",
        "Pearson r",
    );
    chart.h_rules.push(0.0);
    chart.v_rules.extend(transition.map(|t| t as f64));
    let r: Vec<(f64, f64)> = xcorr.points.iter().map(|p| (p.iteration as f64, p.r)).collect();
    out.write_str(
        "cross_correlation.svg",
        &line_chart(&chart, &[Series::new("r", r, 0)], meta),
    )?;

    let mut chart = Chart::new("Discovery parameter", "iteration", "D");
    chart.h_rules.push(0.0);
    out.write_str(
        "discovery.svg",
        &line_chart(&chart, &[Series::new("D", pts(&|x| x.d_param), 0)], meta),
    )?;

    out.write_str(
        "edge_counts.svg",
        &line_chart(
            &Chart::new("Edges and surprising edges", "iteration", "count"),
            &[
                Series::new("edges", pts(&|x| Some(x.n_edges as f64)), 0),
                Series::new("surprising", pts(&|x| Some(x.n_surprising as f64)), 3),
            ],
            meta,
        ),
    )?;

    let alpha_series: Vec<Series> = sweep
        .thresholds
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let p = sweep
                .iterations
                .iter()
                .zip(&sweep.alphas)
                .map(|(&it, row)| (it as f64, row[k]))
                .collect();
            Series::new(&format!("threshold {}", f9(*t)), p, k)
        })
        .collect();
    out.write_str(
        "alpha.svg",
        &line_chart(
            &Chart::new("Surprising-edge fraction", "iteration", "alpha"),
            &alpha_series,
            meta,
        ),
    )?;

    let bc: Vec<(f64, f64)> = bc_div
        .iter()
        .filter(|(_, c)| !c.degenerate)
        .map(|(it, c)| (*it as f64, c.r))
        .collect();
    let mut chart = Chart::new("Betweenness vs neighbor diversity", "iteration", "Pearson r");
    chart.h_rules.push(0.0);
    out.write_str(
        "bc_diversity.svg",
        &line_chart(&chart, &[Series::new("r", bc, 0)], meta),
    )?;

    // largest communities get their own color, the rest share one
    let ranked = communities.by_size();
    let top: Vec<(usize, usize)> = ranked.iter().take(MAX_SHOWN_COMMUNITIES).copied().collect();
    let mut scatter: Vec<Series> = top
        .iter()
        .enumerate()
        .map(|(k, (c, n))| Series::new(&format!("community {c} ({n})"), Vec::new(), k))
        .collect();
    let mut other = Vec::new();
    for (l, xy) in proj.labels.iter().zip(&proj.coordinates) {
        let c = communities.of(l).unwrap_or(usize::MAX);
        match top.iter().position(|(id, _)| *id == c) {
            Some(k) => scatter[k].points.push((xy[0], xy[1])),
            None => other.push((xy[0], xy[1])),
        }
    }
    if !other.is_empty() {
        let mut rest = Series::new("other", other, 0);
        rest.color = "#000000";
        scatter.push(rest);
    }
    let chart = Chart::new(
        &format!(
            "Embedding PCA ({:.1}% + {:.1}% variance)",
            100.0 * proj.explained_variance[0],
            100.0 * proj.explained_variance[1]
        ),
        "PC1",
        "PC2",
    );
    out.write_str("pca.svg", &scatter_chart(&chart, &scatter, final_meta))?;

    let bars: Vec<(f64, f64, f64)> = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (hist.bin_edges[i], hist.bin_edges[i + 1], c as f64))
        .collect();
    out.write_str(
        "centroid_histogram.svg",
        &bar_chart(
            &Chart::new("Distance to community centroid", "distance in PCA plane", "nodes"),
            &bars,
            final_meta,
        ),
    )?;
    Ok(())
}
