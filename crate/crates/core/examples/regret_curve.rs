//! A small regret-versus-budget experiment, written as CSV to a temporary
//! directory.

use mcts_voc::bench::{run_experiment, summary_path, tuned_config, EnvKind, ExperimentConfig};
use mcts_voc::policies::PolicyKind;

fn main() -> mcts_voc::error::Result<()> {
    let env = EnvKind::BanditCorr;
    let kinds = [PolicyKind::Uct, PolicyKind::VocPhi];
    let mut cfg = ExperimentConfig::new(env, kinds.iter().map(|&k| tuned_config(k, env)).collect());
    cfg.env.depth = 5;
    cfg.budgets = vec![8, 16, 32];
    cfg.seeds = 40;
    cfg.master_seed = 99;
    let out = std::env::temp_dir().join("regret_curve.csv");
    cfg.out = Some(out.clone());

    let curve = run_experiment(&cfg)?;
    for p in &curve.points {
        println!("{:<8} B={:<3} {:.4} ± {:.4}", p.policy, p.budget, p.mean, p.se);
    }
    println!("rows in {}, summary in {}", out.display(), summary_path(&out).display());
    Ok(())
}
