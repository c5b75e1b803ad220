//! A tree where no single computation can change the root decision, so
//! VOC′ is zero for every leaf and a VOC′-greedy policy would stop, while
//! the static VOC still sees value in computing.

use mcts_voc::belief::{Belief, Prior};
use mcts_voc::mdp::{TableMdp, Transition};
use mcts_voc::pst::build_pst;
use mcts_voc::voc::{voc_prime_static, voc_static};

fn main() -> mcts_voc::error::Result<()> {
    let mut mdp = TableMdp::new(1.0)?;
    let root = mdp.add_state(0.0);
    let s0 = mdp.add_state(0.0);
    let s1 = mdp.add_state(0.0);
    let (s00, s01, s10) = (mdp.add_state(0.0), mdp.add_state(0.0), mdp.add_state(0.0));
    for (from, to) in [(root, s0), (root, s1), (s0, s00), (s0, s01), (s1, s10)] {
        mdp.add_action(from, vec![Transition::new(to, 1.0, 0.0)])?;
    }
    for s in [s00, s01, s10] {
        let end = mdp.add_state(0.0);
        mdp.add_action(s, vec![Transition::new(end, 1.0, 0.0)])?;
    }
    let pst = build_pst(&mdp, &root, 2)?;

    // Action 0 holds two uncertain leaves at 1.0; action 1 a known leaf at 0.9.
    let belief = Belief::new(Prior::isotropic(vec![1.0, 1.0, 0.9], vec![0.25, 0.25, 0.0], 0.25)?);
    for i in 0..pst.num_leaves() {
        println!(
            "leaf {i}: VOC(φ) = {:.5}, VOC′(φ) = {}",
            voc_static(&pst, &belief, i)?.value,
            voc_prime_static(&pst, &belief, i)?.value
        );
    }
    Ok(())
}
