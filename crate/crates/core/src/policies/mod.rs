//! Planning policies. Every policy spends a budget of simulations (one
//! terminal draw each) at a root state and returns an action.

pub mod bayes_uct;
pub mod config;
pub mod thompson;
pub mod uct;
pub mod voc_greedy;

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{exact_qstar, Mdp};
use crate::pst::{build_pst, PartialSearchTree};
use crate::values::argmax;

pub use config::{Kernel, LeafPrior, PolicyConfig, PolicyKind, PsiMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub action: usize,
    /// Simulations actually spent (at most the budget).
    pub simulations: usize,
}

/// A partial search tree, or the optimal action when every path from the
/// root ends within the tree height and nothing is left to learn.
#[derive(Debug, Clone)]
pub enum Planned<S> {
    Tree(PartialSearchTree<S>),
    Solved(usize),
}

pub fn plan_tree<M: Mdp>(mdp: &M, root: &M::State, height: usize) -> Result<Planned<M::State>> {
    match build_pst(mdp, root, height) {
        Ok(pst) => Ok(Planned::Tree(pst)),
        Err(Error::NoLeaves) => {
            let q = exact_qstar(mdp, root, height)?;
            let values: Vec<f64> =
                (0..mdp.num_actions(root)).map(|a| q.q(root, a).unwrap_or(f64::NEG_INFINITY)).collect();
            Ok(Planned::Solved(argmax(&values)))
        }
        Err(e) => Err(e),
    }
}

/// Runs the configured policy at `root` with the given simulation budget.
pub fn plan<M: Mdp, R: Rng + ?Sized>(
    mdp: &M,
    root: &M::State,
    budget: usize,
    config: &PolicyConfig,
    rng: &mut R,
) -> Result<Decision> {
    if mdp.num_actions(root) == 0 {
        return Err(Error::TerminalRoot);
    }
    match config.kind {
        PolicyKind::Uct => {
            config.validate()?;
            Ok(uct::uct_run(mdp, root, budget, config.c, rng))
        }
        PolicyKind::BayesUct => bayes_uct::bayes_uct_run(mdp, root, budget, config, rng),
        PolicyKind::Thompson => thompson::thompson_run(mdp, root, budget, config, rng),
        PolicyKind::Voi | PolicyKind::VocPhi | PolicyKind::VocPsi => {
            voc_greedy::voc_greedy_run(mdp, root, budget, config, rng)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{CountingMdp, TableMdp};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shallow_mdp_is_solved_without_simulations() {
        let mdp = TableMdp::choice_tree(&[vec![0.2], vec![0.9]], 0.1).unwrap();
        for kind in [PolicyKind::BayesUct, PolicyKind::VocPhi] {
            let mut c = PolicyConfig::new(kind);
            c.height = 3;
            let d = plan(&mdp, &0, 10, &c, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
            assert_eq!(d, Decision { action: 1, simulations: 0 });
        }
    }

    #[test]
    fn simulations_match_terminal_draws() {
        let mdp = TableMdp::choice_tree(&[vec![0.0, 0.4, 0.1], vec![0.5, 0.2], vec![0.3]], 0.1).unwrap();
        for kind in PolicyKind::ALL {
            let counting = CountingMdp::new(&mdp);
            let mut c = PolicyConfig::new(kind);
            c.height = 1;
            c.psi_mode = PsiMode::Proxy;
            let d = plan(&counting, &0, 25, &c, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
            assert!(d.simulations <= 25, "{kind}");
            assert_eq!(counting.draws(), d.simulations, "{kind}");
        }
    }

    #[test]
    fn terminal_root_is_an_error() {
        let mdp = TableMdp::choice_tree(&[vec![0.2]], 0.1).unwrap();
        let c = PolicyConfig::new(PolicyKind::Uct);
        assert!(matches!(plan(&mdp, &2, 5, &c, &mut ChaCha8Rng::seed_from_u64(0)), Err(Error::TerminalRoot)));
    }
}
