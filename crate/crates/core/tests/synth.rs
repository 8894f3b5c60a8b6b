use critdisc::edges::{classify_edges, threshold_sweep};
use critdisc::synth::{generate_series, GrowthConfig};
use critdisc::GraphSnapshot;

fn degree_spread(g: &GraphSnapshot) -> f64 {
    let mut deg: Vec<usize> = (0..g.node_count()).map(|i| g.degree(i)).collect();
    deg.sort_unstable();
    let median = deg[deg.len() / 2].max(1);
    *deg.last().unwrap() as f64 / median as f64
}

fn spread_at(cfg: &GrowthConfig, early: usize) -> (f64, f64) {
    let corpus = generate_series(cfg).unwrap();
    let snaps = corpus.series.snapshots();
    (degree_spread(&snaps[early - 1]), degree_spread(corpus.series.last()))
}

#[test]
fn default_series_settles_near_twelve_percent() {
    let corpus = generate_series(&GrowthConfig::default()).unwrap();
    assert_eq!(corpus.series.len(), 500);
    let snaps = corpus.series.snapshots();
    let tail = &snaps[snaps.len() - 100..];
    let alphas: Vec<f64> = tail
        .iter()
        .map(|g| classify_edges(g, &corpus.embeddings, 0.1).unwrap().stats.alpha)
        .collect();
    let mean = alphas.iter().sum::<f64>() / alphas.len() as f64;
    assert!((0.09..=0.15).contains(&mean), "steady-state alpha {mean}");
}

#[test]
fn default_series_is_insensitive_to_low_thresholds() {
    let corpus = generate_series(&GrowthConfig::default()).unwrap();
    let sweep = threshold_sweep(&corpus.series, &corpus.embeddings, &[0.05, 0.1, 0.2]).unwrap();
    for row in &sweep.alphas[sweep.alphas.len() - 100..] {
        assert!(
            (row[0] - row[1]).abs() <= 0.05 && (row[2] - row[1]).abs() <= 0.05,
            "{row:?}"
        );
    }
}

#[test]
fn single_topic_without_surprises_has_no_surprising_edges() {
    let cfg = GrowthConfig {
        surprise_prob: 0.0,
        n_centroids: 1,
        embed_noise: 0.01,
        n_iterations: 100,
        ..GrowthConfig::default()
    };
    let corpus = generate_series(&cfg).unwrap();
    for g in corpus.series.snapshots() {
        assert_eq!(
            classify_edges(g, &corpus.embeddings, 0.1).unwrap().stats.n_surprising,
            0
        );
    }
}

#[test]
fn preferential_growth_develops_a_heavy_tail() {
    let base = GrowthConfig {
        n_iterations: 2000,
        surprise_prob: 0.0,
        n_centroids: 1,
        embed_noise: 0.01,
        ..GrowthConfig::default()
    };
    let pref = GrowthConfig {
        pref_weight: 1.0,
        sem_weight: 0.0,
        ..base.clone()
    };
    let flat = GrowthConfig {
        pref_weight: 0.0,
        sem_weight: 1.0,
        ..base
    };
    let (pref_early, pref_late) = spread_at(&pref, 200);
    let (_, flat_late) = spread_at(&flat, 200);
    assert!(pref_late > 2.0 * pref_early, "max/median {pref_early} -> {pref_late}");
    assert!(
        pref_late > 2.0 * flat_late,
        "preferential {pref_late} vs uniform {flat_late}"
    );
}

#[test]
fn same_seed_same_corpus() {
    let cfg = GrowthConfig {
        n_iterations: 80,
        seed: 42,
        ..GrowthConfig::default()
    };
    let a = generate_series(&cfg).unwrap();
    let b = generate_series(&cfg).unwrap();
    assert_eq!(a.embeddings, b.embeddings);
    for (x, y) in a.series.snapshots().iter().zip(b.series.snapshots()) {
        assert_eq!(x.edges(), y.edges());
        assert_eq!(x.nodes(), y.nodes());
    }
    let c = generate_series(&GrowthConfig { seed: 43, ..cfg }).unwrap();
    assert_ne!(a.series.last().edges(), c.series.last().edges());
}
