//! Plan one root decision on a bandit-tree with VOC(φ)-greedy and compare it
//! to the optimal action.

use mcts_voc::bench::{tuned_config, EnvKind};
use mcts_voc::env::{gen_bandit_tree, ArmKind};
use mcts_voc::policies::{plan, PolicyKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mcts_voc::error::Result<()> {
    let tree = gen_bandit_tree(7, ArmKind::Correlated, 2024)?;
    let config = tuned_config(PolicyKind::VocPhi, EnvKind::BanditCorr);
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    println!("{}", config.describe());
    for budget in [0, 16, 64, 128] {
        let d = plan(&tree, &tree.root(), budget, &config, &mut rng)?;
        println!(
            "budget {budget:>3}: action {} after {:>3} simulations, regret {:.4}",
            d.action,
            d.simulations,
            tree.objective_regret(d.action)?
        );
    }
    println!("optimal action: {}", tree.optimal_root_action());
    Ok(())
}
