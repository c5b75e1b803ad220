//! Bayes-UCT on the partial search tree: Normal leaf posteriors are backed
//! up as Normal approximations (moment-matched maxima, exact mixtures over
//! transitions) and the tree is descended by `mean + c · sd`.

use rand::Rng;

use crate::belief::Belief;
use crate::error::Result;
use crate::gaussian::{clark_max, Normal};
use crate::mdp::Mdp;
use crate::pst::{NodeId, NodeKind, Outcome, PartialSearchTree};
use crate::values::argmax;

use super::config::PolicyConfig;
use super::uct::LeafSampler;
use super::{plan_tree, Decision, Planned};

/// Approximate value distributions of every node and action of a tree.
#[derive(Debug, Clone)]
pub struct NormalBackup {
    nodes: Vec<Normal>,
    /// Whether a leaf can be reached below each node.
    live: Vec<bool>,
}

fn fold_max(items: impl Iterator<Item = Normal>) -> Normal {
    items.reduce(clark_max).unwrap_or(Normal::new(0.0, 0.0))
}

impl NormalBackup {
    pub fn new<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief) -> Self {
        let n = pst.num_nodes();
        let mut b = Self { nodes: vec![Normal::new(0.0, 0.0); n], live: vec![false; n] };
        for i in (0..n).rev() {
            let (normal, live) = match &pst.node(NodeId(i)).kind {
                NodeKind::Terminal { value } => (Normal::new(*value, 0.0), false),
                NodeKind::Frontier { leaves } => {
                    (fold_max(leaves.iter().map(|&l| Normal::new(belief.mean(l), belief.variance(l)))), true)
                }
                NodeKind::Interior { actions } => {
                    let live = actions.iter().flatten().any(|o| b.live[o.child.0]);
                    (fold_max(actions.iter().map(|o| b.action(pst, o))), live)
                }
            };
            b.nodes[i] = normal;
            b.live[i] = live;
        }
        b
    }

    fn action<S: Clone>(&self, pst: &PartialSearchTree<S>, outcomes: &[Outcome]) -> Normal {
        let g = pst.discount();
        let mut mean = 0.0;
        let mut var = 0.0;
        for o in outcomes {
            let c = self.nodes[o.child.0];
            mean += o.prob * (o.reward + g * c.mean);
            var += o.prob * o.prob * g * g * c.variance;
        }
        Normal::new(mean, var)
    }

    pub fn node(&self, id: NodeId) -> Normal {
        self.nodes[id.0]
    }

    /// Approximate value distribution of every root action.
    pub fn root_actions<S: Clone>(&self, pst: &PartialSearchTree<S>, belief: &Belief) -> Vec<Normal> {
        match &pst.node(pst.root()).kind {
            NodeKind::Interior { actions } => actions.iter().map(|o| self.action(pst, o)).collect(),
            NodeKind::Frontier { leaves } => {
                leaves.iter().map(|&l| Normal::new(belief.mean(l), belief.variance(l))).collect()
            }
            NodeKind::Terminal { .. } => Vec::new(),
        }
    }
}

fn ucb(n: Normal, c: f64) -> f64 {
    n.mean + c * n.std_dev()
}

/// Descends from the root by `mean + c · sd`, sampling transitions among
/// outcomes that still lead to leaves, and returns the chosen leaf.
pub fn select_leaf<S: Clone, R: Rng + ?Sized>(
    pst: &PartialSearchTree<S>,
    belief: &Belief,
    backup: &NormalBackup,
    c: f64,
    rng: &mut R,
) -> usize {
    let mut node = pst.root();
    loop {
        match &pst.node(node).kind {
            NodeKind::Frontier { leaves } => {
                let scores: Vec<f64> =
                    leaves.iter().map(|&l| ucb(Normal::new(belief.mean(l), belief.variance(l)), c)).collect();
                return leaves[argmax(&scores)];
            }
            NodeKind::Interior { actions } => {
                let scores: Vec<f64> = actions
                    .iter()
                    .map(|o| {
                        if o.iter().any(|x| backup.live[x.child.0]) {
                            ucb(backup.action(pst, o), c)
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect();
                let outcomes = &actions[argmax(&scores)];
                let live: Vec<&Outcome> = outcomes.iter().filter(|o| backup.live[o.child.0]).collect();
                let total: f64 = live.iter().map(|o| o.prob).sum();
                let mut u = rng.random::<f64>() * total;
                node = live[live.len() - 1].child;
                for o in &live {
                    if u < o.prob {
                        node = o.child;
                        break;
                    }
                    u -= o.prob;
                }
            }
            NodeKind::Terminal { .. } => unreachable!("descent only enters live nodes"),
        }
    }
}

pub fn bayes_uct_run<M: Mdp, R: Rng + ?Sized>(
    mdp: &M,
    root: &M::State,
    budget: usize,
    config: &PolicyConfig,
    rng: &mut R,
) -> Result<Decision> {
    config.validate()?;
    let pst = match plan_tree(mdp, root, config.height)? {
        Planned::Tree(pst) => pst,
        Planned::Solved(action) => return Ok(Decision { action, simulations: 0 }),
    };
    let mut belief = Belief::new(config.prior.isotropic().build(mdp, &pst)?);
    let mut sampler = LeafSampler::new(config.base_c);
    let mut backup = NormalBackup::new(&pst, &belief);
    for _ in 0..budget {
        let leaf = select_leaf(&pst, &belief, &backup, config.c, rng);
        let outcome = sampler.compute(mdp, &pst, leaf, rng);
        belief.update(leaf, outcome)?;
        backup = NormalBackup::new(&pst, &belief);
    }
    let means: Vec<f64> = backup.root_actions(&pst, &belief).iter().map(|n| n.mean).collect();
    Ok(Decision { action: argmax(&means), simulations: budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::Prior;
    use crate::mdp::TableMdp;
    use crate::pst::build_pst;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_variance_reduces_to_greedy_means() {
        let mdp = TableMdp::choice_tree(&[vec![0.0, 0.3], vec![0.6, 0.1]], 0.1).unwrap();
        let pst = build_pst(&mdp, &0, 1).unwrap();
        let b = Belief::new(Prior::isotropic(vec![0.0, 0.3, 0.6, 0.1], vec![0.0; 4], 0.1).unwrap());
        let backup = NormalBackup::new(&pst, &b);
        let root: Vec<f64> = backup.root_actions(&pst, &b).iter().map(|n| n.mean).collect();
        assert_eq!(root, vec![0.3, 0.6]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_leaf(&pst, &b, &backup, 5.0, &mut rng), 2);
    }

    #[test]
    fn equal_sd_orders_like_means() {
        let mdp = TableMdp::choice_tree(&[vec![0.0], vec![0.0], vec![0.0]], 0.1).unwrap();
        let pst = build_pst(&mdp, &0, 1).unwrap();
        let b = Belief::new(Prior::isotropic(vec![0.2, 0.5, 0.1], vec![1.0; 3], 0.1).unwrap());
        let backup = NormalBackup::new(&pst, &b);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_leaf(&pst, &b, &backup, 1.0, &mut rng), 1);
    }
}
