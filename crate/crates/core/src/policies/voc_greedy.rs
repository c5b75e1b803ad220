//! VOC-greedy planning: repeatedly perform the computation with the highest
//! value of computation on the partial search tree, sampling leaves with UCT
//! below it, until no computation is worth doing or the budget runs out.

use rand::Rng;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::mdp::Mdp;
use crate::pst::PartialSearchTree;
use crate::values::{argmax, dynamic_root_values};
use crate::voc::{voc_dynamic_mc_score, voc_prime_static, voc_static, LambdaSensitivity, VocResult};

use super::config::{PolicyConfig, PolicyKind, PsiMode};
use super::uct::LeafSampler;
use super::{plan_tree, Decision, Planned};

/// Candidate scoring rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scorer {
    Static,
    StaticPrime,
    Proxy,
    MonteCarlo,
}

/// Chooses the scorer for `config` on `pst` with the given belief.
pub fn scorer_for<S: Clone>(config: &PolicyConfig, pst: &PartialSearchTree<S>, belief: &Belief) -> Result<Scorer> {
    Ok(match config.kind {
        PolicyKind::VocPhi => Scorer::Static,
        PolicyKind::Voi => Scorer::StaticPrime,
        PolicyKind::VocPsi => match config.psi_mode {
            PsiMode::Proxy => Scorer::Proxy,
            PsiMode::MonteCarlo => Scorer::MonteCarlo,
            PsiMode::Auto if pst.is_deterministic() && belief.is_isotropic() => Scorer::Proxy,
            PsiMode::Auto => Scorer::MonteCarlo,
        },
        other => return Err(Error::InvalidParameter(format!("{other} is not a VOC policy"))),
    })
}

/// Scores every candidate leaf.
pub fn score_candidates<S: Clone, R: Rng + ?Sized>(
    scorer: Scorer,
    config: &PolicyConfig,
    pst: &PartialSearchTree<S>,
    belief: &Belief,
    rng: &mut R,
) -> Result<Vec<VocResult>> {
    let m = pst.num_leaves();
    match scorer {
        Scorer::Static => (0..m).map(|i| voc_static(pst, belief, i)).collect(),
        Scorer::StaticPrime => (0..m).map(|i| voc_prime_static(pst, belief, i)).collect(),
        Scorer::Proxy => {
            let sens = LambdaSensitivity::new(pst, belief)?;
            (0..m).map(|i| sens.score(belief, i)).collect()
        }
        Scorer::MonteCarlo => (0..m).map(|i| voc_dynamic_mc_score(pst, belief, i, &config.psi_mc, rng)).collect(),
    }
}

/// Best candidate, or `None` if no computation is worth performing.
pub fn choose_candidate(scores: &[VocResult], scorer: Scorer, epsilon: f64) -> Option<usize> {
    let values: Vec<f64> = scores.iter().map(|s| s.value).collect();
    if values.is_empty() {
        return None;
    }
    let best = argmax(&values);
    let worth = match scorer {
        Scorer::MonteCarlo => values[best] > 0.0 && values[best] >= scores[best].se,
        _ => values[best] > epsilon,
    };
    worth.then_some(best)
}

/// Runs a VOC policy (VOC(φ)-greedy, VOC(ψ)-greedy, or VOI-based) at `root`.
pub fn voc_greedy_run<M: Mdp, R: Rng + ?Sized>(
    mdp: &M,
    root: &M::State,
    budget: usize,
    config: &PolicyConfig,
    rng: &mut R,
) -> Result<Decision> {
    config.validate()?;
    let height = if config.kind == PolicyKind::Voi { 1 } else { config.height };
    let pst = match plan_tree(mdp, root, height)? {
        Planned::Tree(pst) => pst,
        Planned::Solved(action) => return Ok(Decision { action, simulations: 0 }),
    };
    let prior = match config.kind {
        PolicyKind::Voi => config.prior.isotropic(),
        _ => config.prior,
    };
    let mut belief = Belief::new(prior.build(mdp, &pst)?);
    let scorer = scorer_for(config, &pst, &belief)?;
    let mut sampler = LeafSampler::new(config.base_c);
    let mut simulations = 0;
    while simulations < budget {
        let scores = score_candidates(scorer, config, &pst, &belief, rng)?;
        let Some(leaf) = choose_candidate(&scores, scorer, config.epsilon) else { break };
        let outcome = sampler.compute(mdp, &pst, leaf, rng);
        simulations += 1;
        belief.update(leaf, outcome)?;
    }
    let action = final_action(config, &pst, &belief, rng)?;
    Ok(Decision { action, simulations })
}

/// Root action with the best static value (VOC(φ), VOI) or estimated
/// dynamic value (VOC(ψ)).
pub fn final_action<S: Clone, R: Rng + ?Sized>(
    config: &PolicyConfig,
    pst: &PartialSearchTree<S>,
    belief: &Belief,
    rng: &mut R,
) -> Result<usize> {
    Ok(match config.kind {
        PolicyKind::VocPsi => dynamic_root_values(pst, &belief.sampler()?, config.psi_samples, rng)?.argmax(),
        _ => argmax(&pst.root_action_values(belief.means())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::TableMdp;
    use crate::policies::config::LeafPrior;
    use crate::policies::config::Kernel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config(kind: PolicyKind) -> PolicyConfig {
        let mut c = PolicyConfig::new(kind);
        c.height = 1;
        c.prior = LeafPrior { shift: 0.0, variance: 1.0, noise_var: 0.5, kernel: Kernel::Isotropic };
        c
    }

    #[test]
    fn zero_budget_returns_prior_argmax() {
        let mdp = TableMdp::choice_tree(&[vec![0.0, 0.0], vec![1.0]], 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for kind in [PolicyKind::VocPhi, PolicyKind::VocPsi, PolicyKind::Voi] {
            let d = voc_greedy_run(&mdp, &0, 0, &config(kind), &mut rng).unwrap();
            assert_eq!(d.simulations, 0);
            assert_eq!(d.action, 0, "{kind}");
        }
    }

    #[test]
    fn known_leaves_stop_immediately() {
        let mdp = TableMdp::choice_tree(&[vec![0.0], vec![1.0]], 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut c = config(PolicyKind::VocPhi);
        c.prior.variance = 0.0;
        c.prior.shift = 0.0;
        let d = voc_greedy_run(&mdp, &0, 100, &c, &mut rng).unwrap();
        assert_eq!(d.simulations, 0);
    }

    #[test]
    fn finds_better_group() {
        let mdp = TableMdp::choice_tree(&[vec![0.0, 0.1], vec![1.0, 0.2]], 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [PolicyKind::VocPhi, PolicyKind::VocPsi] {
            let d = voc_greedy_run(&mdp, &0, 200, &config(kind), &mut rng).unwrap();
            assert_eq!(d.action, 1, "{kind}");
            assert!(d.simulations <= 200);
        }
    }
}
