//! UCT: UCB1 applied recursively down a search tree grown one node per
//! iteration, with uniform random rollouts.

use std::collections::HashMap;

use rand::Rng;

use crate::mdp::Mdp;
use crate::pst::PartialSearchTree;

use super::Decision;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeStats {
    pub visits: u32,
    /// Running mean of the returns backed up through this edge.
    pub mean: f64,
}

#[derive(Debug, Clone)]
struct UctNode<S> {
    state: S,
    /// `N(s)`: times an action was taken from this node.
    visits: u32,
    terminal: bool,
    edges: Vec<EdgeStats>,
    /// Expanded successors per action.
    children: Vec<Vec<(S, usize)>>,
}

/// UCB1 choice: unvisited actions first, then the highest
/// `mean + c √(2 ln N / n)`; ties go to the lowest index.
pub fn uct_select(edges: &[EdgeStats], parent_visits: u32, c: f64) -> usize {
    if let Some(a) = edges.iter().position(|e| e.visits == 0) {
        return a;
    }
    let ln_n = (parent_visits.max(1) as f64).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (a, e) in edges.iter().enumerate() {
        let score = e.mean + c * (2.0 * ln_n / e.visits as f64).sqrt();
        if score > best_score {
            best = a;
            best_score = score;
        }
    }
    best
}

/// Return of a uniform random playout from `state` to a terminal state.
pub fn rollout<M: Mdp, R: Rng + ?Sized>(mdp: &M, state: &M::State, rng: &mut R) -> f64 {
    let gamma = mdp.discount();
    let mut s = state.clone();
    let mut total = 0.0;
    let mut weight = 1.0;
    loop {
        let na = mdp.num_actions(&s);
        if na == 0 {
            return total + weight * mdp.sample_terminal(&s, rng);
        }
        let a = rng.random_range(0..na);
        let (next, r) = mdp.sample_transition(&s, a, rng);
        total += weight * r;
        weight *= gamma;
        s = next;
    }
}

#[derive(Debug, Clone)]
pub struct UctTree<S> {
    nodes: Vec<UctNode<S>>,
    c: f64,
}

impl<S: Clone + Eq + std::hash::Hash + std::fmt::Debug> UctTree<S> {
    pub fn new<M: Mdp<State = S>>(mdp: &M, root: S, c: f64) -> Self {
        let mut t = Self { nodes: Vec::new(), c };
        t.add_node(mdp, root);
        t
    }

    fn add_node<M: Mdp<State = S>>(&mut self, mdp: &M, state: S) -> usize {
        let na = mdp.num_actions(&state);
        self.nodes.push(UctNode {
            state,
            visits: 0,
            terminal: na == 0,
            edges: vec![EdgeStats::default(); na],
            children: vec![Vec::new(); na],
        });
        self.nodes.len() - 1
    }

    pub fn root_state(&self) -> &S {
        &self.nodes[0].state
    }

    pub fn root_edges(&self) -> &[EdgeStats] {
        &self.nodes[0].edges
    }

    pub fn root_visits(&self) -> u32 {
        self.nodes[0].visits
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// One selection/expansion/rollout/backup pass from the root; returns
    /// the sampled return. Exactly one terminal draw per call.
    pub fn iterate<M: Mdp<State = S>, R: Rng + ?Sized>(&mut self, mdp: &M, rng: &mut R) -> f64 {
        let gamma = mdp.discount();
        let mut path: Vec<(usize, usize, f64)> = Vec::new();
        let mut node = 0;
        let mut leaf_return;
        loop {
            if self.nodes[node].terminal {
                leaf_return = mdp.sample_terminal(&self.nodes[node].state, rng);
                break;
            }
            let a = uct_select(&self.nodes[node].edges, self.nodes[node].visits, self.c);
            let (next, r) = mdp.sample_transition(&self.nodes[node].state, a, rng);
            path.push((node, a, r));
            let known = self.nodes[node].children[a].iter().find(|(s, _)| *s == next).map(|&(_, i)| i);
            match known {
                Some(child) => node = child,
                None => {
                    let child = self.add_node(mdp, next.clone());
                    self.nodes[node].children[a].push((next.clone(), child));
                    leaf_return = rollout(mdp, &next, rng);
                    break;
                }
            }
        }
        for &(n, a, r) in path.iter().rev() {
            leaf_return = r + gamma * leaf_return;
            let node = &mut self.nodes[n];
            node.visits += 1;
            let e = &mut node.edges[a];
            e.visits += 1;
            e.mean += (leaf_return - e.mean) / e.visits as f64;
        }
        leaf_return
    }

    /// Most visited root action; ties go to the higher mean, then the lower index.
    pub fn best_root_action(&self) -> usize {
        let edges = self.root_edges();
        let mut best = 0;
        for (a, e) in edges.iter().enumerate().skip(1) {
            let b = &edges[best];
            if e.visits > b.visits || (e.visits == b.visits && e.mean > b.mean) {
                best = a;
            }
        }
        best
    }
}

/// Plain UCT from `root` for `budget` iterations.
pub fn uct_run<M: Mdp, R: Rng + ?Sized>(mdp: &M, root: &M::State, budget: usize, c: f64, rng: &mut R) -> Decision {
    if budget == 0 || mdp.num_actions(root) == 0 {
        return Decision { action: 0, simulations: 0 };
    }
    let mut tree = UctTree::new(mdp, root.clone(), c);
    for _ in 0..budget {
        tree.iterate(mdp, rng);
    }
    Decision { action: tree.best_root_action(), simulations: budget }
}

/// The UCT forest below a partial search tree: one lazily created UCT tree
/// per successor of a leaf, kept for the whole decision.
#[derive(Debug, Clone)]
pub struct LeafSampler<S> {
    forest: HashMap<S, UctTree<S>>,
    c: f64,
}

impl<S: Clone + Eq + std::hash::Hash + std::fmt::Debug> LeafSampler<S> {
    pub fn new(c: f64) -> Self {
        Self { forest: HashMap::new(), c }
    }

    /// Performs the computation on `leaf`: draws a successor of the leaf's
    /// state-action and returns the immediate reward plus one UCT sample
    /// from that successor.
    pub fn compute<M: Mdp<State = S>, R: Rng + ?Sized>(
        &mut self,
        mdp: &M,
        pst: &PartialSearchTree<S>,
        leaf: usize,
        rng: &mut R,
    ) -> f64 {
        let state = pst.leaf_state(leaf).clone();
        let action = pst.leaf(leaf).action;
        let (next, r) = mdp.sample_transition(&state, action, rng);
        let c = self.c;
        let tree = self.forest.entry(next.clone()).or_insert_with(|| UctTree::new(mdp, next, c));
        r + mdp.discount() * tree.iterate(mdp, rng)
    }

    pub fn num_trees(&self) -> usize {
        self.forest.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::TableMdp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn edges(stats: &[(u32, f64)]) -> Vec<EdgeStats> {
        stats.iter().map(|&(visits, mean)| EdgeStats { visits, mean }).collect()
    }

    #[test]
    fn select_examples() {
        assert_eq!(uct_select(&edges(&[(1, 0.5), (1, 0.5)]), 2, 1.0), 0);
        assert_eq!(uct_select(&edges(&[(1, 0.5), (1, 0.0)]), 2, 1.0), 0);
        assert_eq!(uct_select(&edges(&[(5, 9.0), (0, 0.0)]), 5, 1.0), 1);
        // Exploration bonus overturns a small mean gap.
        assert_eq!(uct_select(&edges(&[(10, 0.5), (1, 0.45)]), 11, 1.0), 1);
    }

    #[test]
    fn zero_budget_returns_first_action() {
        let mdp = TableMdp::choice_tree(&[vec![0.0], vec![1.0]], 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(uct_run(&mdp, &0, 0, 1.0, &mut rng), Decision { action: 0, simulations: 0 });
    }

    #[test]
    fn visit_accounting() {
        let mdp = TableMdp::choice_tree(&[vec![0.0, 0.2], vec![1.0, 0.3]], 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut tree = UctTree::new(&mdp, 0, 1.0);
        for _ in 0..200 {
            tree.iterate(&mdp, &mut rng);
        }
        let total: u32 = tree.root_edges().iter().map(|e| e.visits).sum();
        assert_eq!(total, 200);
        assert_eq!(tree.root_visits(), 200);
        for n in &tree.nodes {
            assert_eq!(n.visits, n.edges.iter().map(|e| e.visits).sum::<u32>());
        }
        assert_eq!(tree.best_root_action(), 1);
    }

    #[test]
    fn terminal_root_returns_its_value() {
        let mdp = TableMdp::choice_tree(&[vec![0.7]], 0.0).unwrap();
        let mut tree = UctTree::new(&mdp, 2, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(tree.iterate(&mdp, &mut rng), 0.7);
    }
}
