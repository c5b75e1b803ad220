//! Every policy on the same handful of correlated bandit-trees.

use mcts_voc::bench::{tuned_config, EnvKind};
use mcts_voc::env::{gen_bandit_tree, ArmKind};
use mcts_voc::mdp::CountingMdp;
use mcts_voc::policies::{plan, PolicyKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mcts_voc::error::Result<()> {
    let kinds = [PolicyKind::Uct, PolicyKind::BayesUct, PolicyKind::Thompson, PolicyKind::Voi, PolicyKind::VocPhi, PolicyKind::VocPsi];
    let trees: Vec<_> = (0..12).map(|s| gen_bandit_tree(6, ArmKind::Correlated, s)).collect::<Result<_, _>>()?;
    let budget = 64;

    println!("{:<10} {:>12} {:>10}", "policy", "mean regret", "sims/run");
    for kind in kinds {
        let config = tuned_config(kind, EnvKind::BanditCorr);
        let (mut regret, mut sims) = (0.0, 0);
        for (i, tree) in trees.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            let counting = CountingMdp::new(tree);
            let d = plan(&counting, &tree.root(), budget, &config, &mut rng)?;
            assert_eq!(counting.draws(), d.simulations);
            regret += tree.objective_regret(d.action)?;
            sims += d.simulations;
        }
        let n = trees.len() as f64;
        println!("{:<10} {:>12.4} {:>10.1}", kind.name(), regret / n, sims as f64 / n);
    }
    Ok(())
}
