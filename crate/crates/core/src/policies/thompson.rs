//! Thompson sampling for tree search: each (node, action) pair keeps a
//! conjugate Normal posterior over its return; actions are chosen by drawing
//! from every posterior and taking the largest draw.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::gaussian::Normal;
use crate::mdp::Mdp;
use crate::values::argmax;

use super::config::PolicyConfig;
use super::uct::rollout;
use super::Decision;

/// Return posterior of one edge under a Normal prior and Normal noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePosterior {
    pub prior_mean: f64,
    pub prior_var: f64,
    pub count: u32,
    pub sum: f64,
}

impl EdgePosterior {
    pub fn new(prior_mean: f64, prior_var: f64) -> Self {
        Self { prior_mean, prior_var, count: 0, sum: 0.0 }
    }

    pub fn observe(&mut self, ret: f64) {
        self.count += 1;
        self.sum += ret;
    }

    pub fn posterior(&self, noise_var: f64) -> Normal {
        if self.prior_var == 0.0 {
            return Normal::new(self.prior_mean, 0.0);
        }
        let precision = 1.0 / self.prior_var + self.count as f64 / noise_var;
        let mean = (self.prior_mean / self.prior_var + self.sum / noise_var) / precision;
        Normal::new(mean, 1.0 / precision)
    }
}

#[derive(Debug, Clone)]
struct TsNode<S> {
    state: S,
    terminal: bool,
    edges: Vec<EdgePosterior>,
    children: Vec<Vec<(S, usize)>>,
}

#[derive(Debug, Clone)]
pub struct ThompsonTree<S> {
    nodes: Vec<TsNode<S>>,
    shift: f64,
    prior_var: f64,
    noise_var: f64,
}

impl<S: Clone + Eq + std::hash::Hash + std::fmt::Debug> ThompsonTree<S> {
    pub fn new<M: Mdp<State = S>>(mdp: &M, root: S, shift: f64, prior_var: f64, noise_var: f64) -> Self {
        let mut t = Self { nodes: Vec::new(), shift, prior_var, noise_var };
        t.add_node(mdp, root);
        t
    }

    fn add_node<M: Mdp<State = S>>(&mut self, mdp: &M, state: S) -> usize {
        let na = mdp.num_actions(&state);
        let prior = EdgePosterior::new(mdp.value_hint(&state) + self.shift, self.prior_var);
        self.nodes.push(TsNode { state, terminal: na == 0, edges: vec![prior; na], children: vec![Vec::new(); na] });
        self.nodes.len() - 1
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn root_edges(&self) -> &[EdgePosterior] {
        &self.nodes[0].edges
    }

    pub fn root_posteriors(&self) -> Vec<Normal> {
        self.nodes[0].edges.iter().map(|e| e.posterior(self.noise_var)).collect()
    }

    fn sample_action<R: Rng + ?Sized>(&self, node: usize, rng: &mut R) -> usize {
        let draws: Vec<f64> = self.nodes[node]
            .edges
            .iter()
            .map(|e| {
                let p = e.posterior(self.noise_var);
                let z: f64 = StandardNormal.sample(rng);
                p.mean + p.std_dev() * z
            })
            .collect();
        argmax(&draws)
    }

    /// One descent/expansion/rollout/backup pass; exactly one terminal draw.
    pub fn iterate<M: Mdp<State = S>, R: Rng + ?Sized>(&mut self, mdp: &M, rng: &mut R) -> f64 {
        let gamma = mdp.discount();
        let mut path: Vec<(usize, usize, f64)> = Vec::new();
        let mut node = 0;
        let mut ret;
        loop {
            if self.nodes[node].terminal {
                ret = mdp.sample_terminal(&self.nodes[node].state, rng);
                break;
            }
            let a = self.sample_action(node, rng);
            let (next, r) = mdp.sample_transition(&self.nodes[node].state, a, rng);
            path.push((node, a, r));
            let known = self.nodes[node].children[a].iter().find(|(s, _)| *s == next).map(|&(_, i)| i);
            match known {
                Some(child) => node = child,
                None => {
                    let child = self.add_node(mdp, next.clone());
                    self.nodes[node].children[a].push((next.clone(), child));
                    ret = rollout(mdp, &next, rng);
                    break;
                }
            }
        }
        for &(n, a, r) in path.iter().rev() {
            ret = r + gamma * ret;
            self.nodes[n].edges[a].observe(ret);
        }
        ret
    }

    /// Root action with the largest posterior mean.
    pub fn best_root_action(&self) -> usize {
        let means: Vec<f64> = self.root_posteriors().iter().map(|p| p.mean).collect();
        argmax(&means)
    }
}

pub fn thompson_run<M: Mdp, R: Rng + ?Sized>(
    mdp: &M,
    root: &M::State,
    budget: usize,
    config: &PolicyConfig,
    rng: &mut R,
) -> Result<Decision> {
    config.validate()?;
    if mdp.num_actions(root) == 0 {
        return Err(crate::error::Error::TerminalRoot);
    }
    let p = &config.prior;
    let mut tree = ThompsonTree::new(mdp, root.clone(), p.shift, p.variance, p.noise_var);
    for _ in 0..budget {
        tree.iterate(mdp, rng);
    }
    Ok(Decision { action: tree.best_root_action(), simulations: budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::TableMdp;
    use crate::policies::config::PolicyKind;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conjugate_update() {
        let mut e = EdgePosterior::new(0.0, 1.0);
        e.observe(2.0);
        let p = e.posterior(1.0);
        assert_relative_eq!(p.mean, 1.0);
        assert_relative_eq!(p.variance, 0.5);
        e.observe(2.0);
        let p = e.posterior(1.0);
        assert_relative_eq!(p.mean, 4.0 / 3.0);
        assert_relative_eq!(p.variance, 1.0 / 3.0);
    }

    #[test]
    fn finds_better_group() {
        let mdp = TableMdp::choice_tree(&[vec![0.0, 0.1], vec![1.0, 0.2]], 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut c = PolicyConfig::new(PolicyKind::Thompson);
        c.prior.shift = 0.0;
        let d = thompson_run(&mdp, &0, 300, &c, &mut rng).unwrap();
        assert_eq!(d, Decision { action: 1, simulations: 300 });
    }
}
