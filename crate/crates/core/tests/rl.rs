mod oracle;

use critdisc::rl::{
    log_policy_probs, policy_probs, reinforce_update, reward, score_gradient, train, EpisodeLog, EpisodeStep,
    PolicyParams, RewardConfig, N_FEATURES,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_episode<R: Rng>(rng: &mut R, theta: &PolicyParams<f64>, n_features: usize) -> EpisodeLog<f64> {
    let steps = rng.gen_range(1..8);
    let mut log = EpisodeLog::default();
    for _ in 0..steps {
        let k = rng.gen_range(1..7);
        let candidates: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n_features).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let action = rng.gen_range(0..k);
        let log_prob = log_policy_probs(theta, &candidates).unwrap()[action];
        log.steps.push(EpisodeStep {
            candidates,
            action,
            log_prob,
            reward: rng.gen_range(-3.0..3.0),
        });
    }
    log
}

fn as_oracle_steps(log: &EpisodeLog<f64>) -> Vec<(Vec<Vec<f64>>, usize, f64)> {
    log.steps
        .iter()
        .map(|s| (s.candidates.clone(), s.action, s.reward))
        .collect()
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..50 {
        let n = rng.gen_range(2..=N_FEATURES);
        let theta = PolicyParams {
            theta: (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect(),
        };
        let log = random_episode(&mut rng, &theta, n);
        let baseline = rng.gen_range(-1.0..1.0);
        let steps = as_oracle_steps(&log);
        let numeric =
            oracle::central_gradient(|t| oracle::reinforce_objective(t, &steps, baseline), &theta.theta, 1e-5);
        let analytic = score_gradient(&theta, &log, baseline).unwrap();
        let diff = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale = numeric.iter().map(|b| b * b).sum::<f64>().sqrt().max(1e-8);
        assert!(diff / scale < 1e-4, "trial {trial}: {analytic:?} vs {numeric:?}");
    }
}

#[test]
fn softmax_closed_forms() {
    let theta = PolicyParams { theta: vec![1.0] };
    let p = policy_probs(&theta, &[vec![0.2], vec![0.2 + 3f64.ln()]]).unwrap();
    assert!((p[0] - 0.25).abs() < 1e-12 && (p[1] - 0.75).abs() < 1e-12);
    assert_eq!(policy_probs(&theta, &[vec![5.0]]).unwrap(), vec![1.0]);
    assert!(policy_probs(&theta, &[]).is_err());
}

#[test]
fn zero_learning_rate_keeps_theta() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let theta = PolicyParams {
        theta: vec![0.3, -0.2, 0.1],
    };
    let log = random_episode(&mut rng, &theta, 3);
    assert_eq!(reinforce_update(&theta, &log, 0.0, 0.5).unwrap(), theta);
}

#[test]
fn reward_peaks_at_the_discovery_target() {
    let cfg = RewardConfig::default();
    let at = reward(cfg.d_target, 1.0, 0.3, &cfg);
    for h in [1e-3, 1e-2, 0.1] {
        assert!(reward(cfg.d_target + h, 1.0, 0.3, &cfg) < at);
        assert!(reward(cfg.d_target - h, 1.0, 0.3, &cfg) < at);
    }
}

#[test]
fn alpha_only_training_improves_steadily() {
    let (env, reward_cfg, cfg) = oracle::alpha_only_training();
    let result = train(&env, &reward_cfg, &cfg).unwrap();
    assert_eq!(result.curve.len(), 20);
    let rewards: Vec<f64> = result.curve.iter().map(|e| e.mean_reward).collect();
    let smooth = oracle::full_window_means(&rewards, 5);
    assert!(smooth.windows(2).all(|w| w[1] >= w[0]), "{smooth:?}");
    assert!(smooth.last().unwrap() > smooth.first().unwrap());
    assert!(result.theta.theta[2] > 0.0, "bridging weight {:?}", result.theta.theta);
}

#[test]
fn training_is_reproducible() {
    let (env, reward_cfg, cfg) = oracle::alpha_only_training();
    let cfg = critdisc::rl::TrainConfig {
        episodes: 5,
        arrival_every: 4,
        ..cfg
    };
    let full = RewardConfig::default();
    assert_eq!(train(&env, &full, &cfg).unwrap(), train(&env, &full, &cfg).unwrap());
    assert_eq!(
        train(&env, &reward_cfg, &cfg).unwrap(),
        train(&env, &reward_cfg, &cfg).unwrap()
    );
}

#[test]
fn zero_episodes_leave_theta_at_zero() {
    let (env, reward_cfg, cfg) = oracle::alpha_only_training();
    let result = train(&env, &reward_cfg, &critdisc::rl::TrainConfig { episodes: 0, ..cfg }).unwrap();
    assert!(result.curve.is_empty());
    assert_eq!(result.theta, PolicyParams::zeros(N_FEATURES));
}

proptest! {
    #[test]
    fn softmax_ignores_a_common_score_shift(
        feats in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 3), 1..8),
        theta in proptest::collection::vec(-3.0f64..3.0, 3),
        shift in -50.0f64..50.0,
    ) {
        let bias_theta = PolicyParams { theta: theta.iter().cloned().chain([1.0]).collect() };
        let plain: Vec<Vec<f64>> = feats.iter().map(|f| f.iter().cloned().chain([0.0]).collect()).collect();
        let shifted: Vec<Vec<f64>> = feats.iter().map(|f| f.iter().cloned().chain([shift]).collect()).collect();
        let p = policy_probs(&bias_theta, &plain).unwrap();
        let q = policy_probs(&bias_theta, &shifted).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let lp = log_policy_probs(&bias_theta, &plain).unwrap();
        prop_assert!(lp.iter().all(|&l| l <= 0.0));
    }
}
