mod oracle;

use critdisc::embeddings::EmbeddingTable;
use critdisc::spectral::{discovery_parameter, semantic_adjacency, semantic_entropy, structural_entropy};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn complete(n: usize) -> oracle::Edges {
    (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect()
}

#[test]
fn jacobi_oracle_recovers_known_spectrum() {
    let ev = oracle::jacobi_eigenvalues(vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 5.0]]);
    for (got, want) in ev.iter().zip([1.0, 3.0, 5.0]) {
        assert!((got - want).abs() < 1e-12, "{ev:?}");
    }
}

#[test]
fn complete_graphs_have_log_entropy() {
    for n in 2..=12 {
        let s = structural_entropy::<f64>(&oracle::snapshot(n, &complete(n))).unwrap();
        let want = ((n - 1) as f64).ln();
        assert!(
            (s.entropy_nats - want).abs() < 1e-9,
            "K_{n}: {} vs {want}",
            s.entropy_nats
        );
    }
}

#[test]
fn star_with_three_leaves() {
    let s = structural_entropy::<f64>(&oracle::snapshot(4, &[(0, 1), (0, 2), (0, 3)])).unwrap();
    assert!((s.entropy_nats - 1.5 * std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn structural_entropy_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(0.1..0.9);
        let edges = oracle::random_graph(&mut rng, n, p);
        let got = structural_entropy::<f64>(&oracle::snapshot(n, &edges))
            .unwrap()
            .entropy_nats;
        let want = oracle::spectral_entropy(&oracle::dense_adjacency(n, &edges));
        assert!((got - want).abs() < 1e-8, "n={n} edges={edges:?}: {got} vs {want}");
    }
}

#[test]
fn semantic_entropy_matches_dense_oracle() {
    let vectors = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.8, 0.6, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![-0.6, 0.0, 0.8],
    ];
    let mut table = EmbeddingTable::<f64>::new(3).unwrap();
    let names = oracle::labels(4);
    for (l, v) in names.iter().zip(&vectors) {
        table.insert(l, v.clone()).unwrap();
    }
    let a = semantic_adjacency(&table, &names).unwrap();
    let got = semantic_entropy(&a).unwrap().entropy_nats;
    let want = oracle::spectral_entropy(&oracle::semantic_adjacency(&vectors));
    assert!((got - want).abs() < 1e-10, "{got} vs {want}");
}

#[test]
fn single_precision_tracks_double() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let edges = oracle::random_graph(&mut rng, 8, 0.5);
        let g = oracle::snapshot(8, &edges);
        let d = structural_entropy::<f64>(&g).unwrap().entropy_nats;
        let s = structural_entropy::<f32>(&g).unwrap().entropy_nats;
        assert!((d - s as f64).abs() < 1e-4, "{d} vs {s}");
    }
}

#[test]
fn discovery_identities() {
    assert_eq!(discovery_parameter(1.0f64, 0.0), Some(1.0));
    assert_eq!(discovery_parameter(0.0f64, 1.0), Some(-1.0));
    assert_eq!(discovery_parameter(0.0f64, 0.0), None);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let a: f64 = rng.gen_range(0.0..10.0);
        let b: f64 = rng.gen_range(0.0..10.0);
        assert_eq!(discovery_parameter(a, a), Some(0.0));
        let (x, y) = (discovery_parameter(a, b).unwrap(), discovery_parameter(b, a).unwrap());
        assert!((x + y).abs() < 1e-12);
    }
}

fn graph_strategy() -> impl Strategy<Value = (usize, oracle::Edges)> {
    (2usize..=9).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
        let k = pairs.len();
        (Just(n), proptest::sample::subsequence(pairs, 0..=k))
    })
}

proptest! {
    #[test]
    fn entropy_is_relabeling_invariant((n, edges) in graph_strategy(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let permuted: oracle::Edges = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let a = structural_entropy::<f64>(&oracle::snapshot(n, &edges)).unwrap().entropy_nats;
        let b = structural_entropy::<f64>(&oracle::snapshot(n, &permuted)).unwrap().entropy_nats;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn semantic_entropy_ignores_uniform_weight_scale(
        weights in proptest::collection::vec(0.01f64..1.0, 15),
        scale in 0.05f64..1.0,
    ) {
        let n = 6;
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                a[(i, j)] = weights[k];
                a[(j, i)] = weights[k];
                k += 1;
            }
        }
        let base = semantic_entropy(&a).unwrap().entropy_nats;
        let scaled = semantic_entropy(&(a * scale)).unwrap().entropy_nats;
        prop_assert!((base - scaled).abs() < 1e-9);
    }

    #[test]
    fn discovery_is_bounded_and_antisymmetric(a in 0.0f64..50.0, b in 0.0f64..50.0) {
        prop_assume!(a + b > 0.0);
        let d = discovery_parameter(a, b).unwrap();
        prop_assert!((-1.0..=1.0).contains(&d));
        prop_assert!((d + discovery_parameter(b, a).unwrap()).abs() < 1e-12);
    }
}
