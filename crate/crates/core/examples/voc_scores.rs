//! Values of computation for each leaf of a small tree, before and after
//! observing a few leaf samples.

use mcts_voc::belief::{rbf_covariance, Belief, Prior};
use mcts_voc::mdp::TableMdp;
use mcts_voc::pst::build_pst;
use mcts_voc::values::static_root_values;
use mcts_voc::voc::{voc_dynamic_proxy, voc_prime_static, voc_static};

fn report(title: &str, pst: &mcts_voc::pst::PartialSearchTree<usize>, belief: &Belief) -> mcts_voc::error::Result<()> {
    println!("{title}");
    println!("  root values {:?}", static_root_values(pst, belief)?);
    for i in 0..pst.num_leaves() {
        let voc = voc_static(pst, belief, i)?;
        let prime = voc_prime_static(pst, belief, i)?;
        let proxy = if belief.is_isotropic() {
            format!("{:.5}", voc_dynamic_proxy(pst, belief, i)?.value)
        } else {
            "-".into()
        };
        println!(
            "  leaf {i}: mean {:+.3} var {:.3}  VOC(φ) {:.5}  VOC′(φ) {:.5}  -∂λ/∂n {proxy}",
            belief.mean(i),
            belief.variance(i),
            voc.value,
            prime.value
        );
    }
    Ok(())
}

fn main() -> mcts_voc::error::Result<()> {
    // Two root actions leading to two and three leaves.
    let mdp = TableMdp::choice_tree(&[vec![0.0, 0.0], vec![0.0, 0.0, 0.0]], 0.2)?;
    let pst = build_pst(&mdp, &0, 1)?;

    let means = vec![0.3, 0.1, 0.2, 0.25, -0.1];
    let mut belief = Belief::new(Prior::isotropic(means.clone(), vec![0.5; 5], 0.2)?);
    report("independent leaves", &pst, &belief)?;
    belief.update(0, 0.9)?;
    belief.update(3, -0.4)?;
    report("after two observations", &pst, &belief)?;

    let correlated = Belief::new(Prior::correlated(means, rbf_covariance(5, 1.0, 0.5)?, 0.2)?);
    report("RBF-correlated leaves", &pst, &correlated)?;
    Ok(())
}
