//! The expected-maximum bound on the dynamic value next to a Monte Carlo
//! estimate of the dynamic value itself.

use mcts_voc::belief::{Belief, Prior};
use mcts_voc::mdp::TableMdp;
use mcts_voc::pst::build_pst;
use mcts_voc::values::{dynamic_root_values, dynamic_value_bound, static_root_values};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mcts_voc::error::Result<()> {
    let mdp = TableMdp::choice_tree(&[vec![0.0, 0.0], vec![0.0, 0.0]], 0.1)?;
    let pst = build_pst(&mdp, &0, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    for var in [0.0, 0.05, 0.5, 2.0] {
        let belief = Belief::new(Prior::isotropic(vec![0.4, 0.0, 0.3, -0.2], vec![var; 4], 0.1)?);
        let phi = static_root_values(&pst, &belief)?.into_iter().fold(f64::NEG_INFINITY, f64::max);
        let psi = dynamic_root_values(&pst, &belief.sampler()?, 200_000, &mut rng)?.expected_max;
        let bound = dynamic_value_bound(&pst, &belief, pst.root())?;
        println!(
            "leaf variance {var:<4}  static {phi:.4}  dynamic {:.4} ± {:.4}  bound {:.4} (c = {:+.4})",
            psi.mean, psi.se, bound.lambda, bound.c
        );
    }
    Ok(())
}
