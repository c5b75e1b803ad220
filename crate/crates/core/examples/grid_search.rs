//! Tune UCT's exploration constant and Thompson sampling's prior variance
//! with the same number of evaluations each.

use mcts_voc::bench::tune::{grid_search, parse_grid, results_to_overrides};
use mcts_voc::bench::{EnvKind, ExperimentConfig};
use mcts_voc::kv::KvFile;

fn main() -> mcts_voc::error::Result<()> {
    let grid = KvFile::parse(
        "uct.c = 0.25, 0.5, 1, 2\n\
         thompson.prior.variance = 0.1, 1\n\
         thompson.prior.noise_var = 0.1, 1\n",
    )?;
    let (grids, _) = parse_grid(&grid)?;
    let mut base = ExperimentConfig::new(EnvKind::BanditCorr, Vec::new());
    base.env.depth = 5;
    base.budgets = vec![16, 32];

    let results = grid_search(&base, &grids, 80)?;
    for r in &results {
        for c in &r.candidates {
            println!("{:<9} {:?} {:.4} ± {:.4}", r.kind.name(), c.assignment, c.score.mean, c.score.se);
        }
    }
    print!("{}", results_to_overrides(&results));
    Ok(())
}
