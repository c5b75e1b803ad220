mod common;

use std::fmt::Write as _;

use mcts_voc::belief::Belief;
use mcts_voc::bench::{tuned_config, EnvKind};
use mcts_voc::env::{gen_bandit_tree, ArmKind, BanditTree};
use mcts_voc::mdp::{CountingMdp, Mdp, TableMdp};
use mcts_voc::policies::thompson::ThompsonTree;
use mcts_voc::policies::uct::{rollout, uct_run, UctTree};
use mcts_voc::policies::voc_greedy::{score_candidates, scorer_for, Scorer};
use mcts_voc::policies::{plan, Kernel, LeafPrior, PolicyConfig, PolicyKind};
use mcts_voc::pst::build_pst;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn argmax(xs: &[f64]) -> usize {
    (0..xs.len()).fold(0, |b, i| if xs[i] > xs[b] { i } else { b })
}

/// `E[max_a V_a - V_alpha]` after one observation of `leaf`, with `V_a` the
/// best mean in group `a`, by trapezoid quadrature over the standardised outcome.
fn myopic_voi_quadrature(groups: &[usize], means: &[f64], leaf: usize, shift_sd: f64) -> f64 {
    let values = |m: &[f64]| -> Vec<f64> {
        let mut start = 0;
        groups
            .iter()
            .map(|&g| {
                let v = m[start..start + g].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                start += g;
                v
            })
            .collect()
    };
    let alpha = argmax(&values(means));
    let (lo, hi, n) = (-12.0, 12.0, 48_001);
    let h = (hi - lo) / (n - 1) as f64;
    let mut total = 0.0;
    let mut m = means.to_vec();
    for k in 0..n {
        let z = lo + k as f64 * h;
        m[leaf] = means[leaf] + shift_sd * z;
        let v = values(&m);
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        total += w * (v[argmax(&v)] - v[alpha]) * (-0.5 * z * z).exp();
    }
    total * h / (2.0 * std::f64::consts::PI).sqrt()
}

#[test]
fn voi_scores_match_myopic_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let groups: Vec<usize> = (0..rng.random_range(2..=3)).map(|_| rng.random_range(1..=3)).collect();
        let values: Vec<Vec<f64>> = groups.iter().map(|&g| (0..g).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let mdp = TableMdp::choice_tree(&values, 0.3).unwrap();
        let pst = build_pst(&mdp, &0, 1).unwrap();
        let mut config = PolicyConfig::new(PolicyKind::Voi);
        config.prior = LeafPrior { shift: 0.0, variance: 0.5, noise_var: 0.3, kernel: Kernel::Rbf { scale: 1.0 } };
        let prior = config.prior.isotropic().build(&mdp, &pst).unwrap();
        let belief = Belief::new(prior);
        assert_eq!(scorer_for(&config, &pst, &belief).unwrap(), Scorer::StaticPrime);
        let scores = score_candidates(Scorer::StaticPrime, &config, &pst, &belief, &mut rng).unwrap();
        let shift_sd = 0.5 / (0.5f64 + 0.3).sqrt();
        let oracle: Vec<f64> =
            (0..pst.num_leaves()).map(|i| myopic_voi_quadrature(&groups, belief.means(), i, shift_sd)).collect();
        for (s, o) in scores.iter().zip(&oracle) {
            assert!((s.value - o).abs() < 1e-7, "{} vs {o}", s.value);
        }
        let got: Vec<f64> = scores.iter().map(|s| s.value).collect();
        if oracle.iter().filter(|&&o| (o - oracle[argmax(&oracle)]).abs() < 1e-9).count() == 1 {
            assert_eq!(argmax(&got), argmax(&oracle));
        }
    }
}

#[test]
fn voi_stops_when_nothing_can_change() {
    let mdp = TableMdp::choice_tree(&[vec![0.0, 0.1], vec![100.0]], 0.1).unwrap();
    let mut config = PolicyConfig::new(PolicyKind::Voi);
    config.prior = LeafPrior { shift: 0.0, variance: 0.01, noise_var: 0.1, kernel: Kernel::Isotropic };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let counting = CountingMdp::new(&mdp);
    let d = plan(&counting, &0, 50, &config, &mut rng).unwrap();
    // One pull of the 100-valued leaf settles the decision for good.
    assert_eq!(d.action, 1);
    assert!(d.simulations < 50);
    assert_eq!(counting.draws(), d.simulations);
}

#[test]
fn uct_finds_optimal_action_on_small_tree() {
    let mdp = TableMdp::choice_tree(&[vec![0.3, 0.45], vec![0.5, 0.35]], 0.1).unwrap();
    let mut hits = 0;
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = uct_run(&mdp, &0, 10_000, 1.0, &mut rng);
        hits += (d.action == 1) as usize;
    }
    assert!(hits >= 190, "{hits}/200");
}

#[test]
fn uct_visits_sum_to_budget() {
    let t = gen_bandit_tree(4, ArmKind::Correlated, 2).unwrap();
    let mut tree = UctTree::new(&t, t.root(), 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..77 {
        tree.iterate(&t, &mut rng);
    }
    assert_eq!(tree.root_visits(), 77);
    assert_eq!(tree.root_edges().iter().map(|e| e.visits).sum::<u32>(), 77);
}

#[test]
fn thompson_counts_sum_to_budget() {
    let t = gen_bandit_tree(4, ArmKind::Correlated, 2).unwrap();
    let mut tree = ThompsonTree::new(&t, t.root(), 0.5, 1.0, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..53 {
        tree.iterate(&t, &mut rng);
    }
    assert_eq!(tree.root_edges().iter().map(|e| e.count).sum::<u32>(), 53);
}

#[test]
fn thompson_zero_variance_is_greedy() {
    let mdp = TableMdp::choice_tree(&[vec![0.9], vec![0.1]], 0.1).unwrap();
    let mut config = PolicyConfig::new(PolicyKind::Thompson);
    config.prior.variance = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    // Both priors are equal, so the greedy choice is the first action.
    assert_eq!(plan(&mdp, &0, 30, &config, &mut rng).unwrap().action, 0);
}

/// Spreads the budget evenly over the root actions, estimating each by random
/// rollouts, and picks the best sample mean.
fn uniform_sampling(t: &BanditTree, budget: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut sums = [0.0; 2];
    let mut counts = [0usize; 2];
    for k in 0..budget {
        let a = k % 2;
        let (next, _) = t.sample_transition(&t.root(), a, rng);
        sums[a] += rollout(t, &next, rng);
        counts[a] += 1;
    }
    let means: Vec<f64> = (0..2).map(|a| if counts[a] == 0 { 0.0 } else { sums[a] / counts[a] as f64 }).collect();
    argmax(&means)
}

// With a noise variance matching the spread of returns (arm variance 1 plus
// pull noise 0.1) Thompson sampling should be at least as good as flat
// sampling. Depth-3 trees are easy enough that both medians are zero.
#[test]
fn thompson_no_worse_than_uniform_sampling_on_depth_three() {
    let mut config = tuned_config(PolicyKind::Thompson, EnvKind::BanditCorr);
    config.prior.variance = 1.0;
    config.prior.noise_var = 1.1;
    let mut ts = Vec::new();
    let mut uni = Vec::new();
    for seed in 0..400 {
        let t = gen_bandit_tree(3, ArmKind::Correlated, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ts.push(t.objective_regret(plan(&t, &t.root(), 128, &config, &mut rng).unwrap().action).unwrap());
        uni.push(t.objective_regret(uniform_sampling(&t, 128, &mut rng)).unwrap());
    }
    let diff: Vec<f64> = uni.iter().zip(&ts).map(|(u, t)| u - t).collect();
    let (mean, se) = common::mean_se(&diff);
    let median = |xs: &mut Vec<f64>| {
        xs.sort_by(f64::total_cmp);
        xs[xs.len() / 2]
    };
    assert!(median(&mut ts) <= median(&mut uni));
    assert!(mean > -3.0 * se, "paired difference {mean} ± {se}");
}

#[test]
fn bayes_uct_snapshot() {
    let config = tuned_config(PolicyKind::BayesUct, EnvKind::BanditCorr);
    let mut out = String::new();
    for seed in 0..25 {
        let t = gen_bandit_tree(5, ArmKind::Correlated, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let d = plan(&t, &t.root(), 32, &config, &mut rng).unwrap();
        writeln!(out, "{seed} {} {} {:.12}", d.action, d.simulations, t.objective_regret(d.action).unwrap()).unwrap();
    }
    common::check_golden("bayes_uct_d5_b32.txt", &out);
}

#[test]
fn policies_are_deterministic_given_seeds() {
    let t = gen_bandit_tree(5, ArmKind::Correlated, 3).unwrap();
    for kind in [PolicyKind::Uct, PolicyKind::BayesUct, PolicyKind::Thompson, PolicyKind::Voi, PolicyKind::VocPhi, PolicyKind::VocPsi] {
        let config = tuned_config(kind, EnvKind::BanditCorr);
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            plan(&t, &t.root(), 24, &config, &mut rng).unwrap()
        };
        assert_eq!(run(), run(), "{kind}");
    }
}

