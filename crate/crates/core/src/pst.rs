//! The n-step partial search tree (PST) rooted at the planning state.
//!
//! Nodes are states reachable from the root in fewer than `depth` steps plus
//! the frontier states reachable in exactly `depth` steps. Every action of a
//! non-terminal frontier state is a *leaf*; the belief lives on leaves.
//! States reached more than once at the same depth are merged, so the PST is
//! in general a DAG with explicit chance outcomes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mdp::Mdp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub child: NodeId,
    pub prob: f64,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Terminal { value: f64 },
    Interior { actions: Vec<Vec<Outcome>> },
    /// Frontier state; `leaves[a]` is the leaf index of action `a`.
    Frontier { leaves: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct PstNode<S> {
    pub state: S,
    pub depth: usize,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafRef {
    pub node: NodeId,
    pub action: usize,
}

/// A leaf whose value enters a node's value through a deterministic path:
/// it contributes `offset + scale * value(leaf)`. Terminal states reached
/// inside the tree appear with `leaf: None` and contribute `offset` alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatLeaf {
    pub leaf: Option<usize>,
    pub offset: f64,
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct PartialSearchTree<S> {
    nodes: Vec<PstNode<S>>,
    leaves: Vec<LeafRef>,
    depth: usize,
    discount: f64,
    deterministic: bool,
}

/// Values that can be backed up through the tree: plain reals, or affine
/// functions of a scalar tracked as (value, slope).
pub trait Backup: Copy {
    fn constant(v: f64) -> Self;
    /// `self + w * other`
    fn add_scaled(self, w: f64, other: Self) -> Self;
    fn max(self, other: Self) -> Self;
}

impl Backup for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn add_scaled(self, w: f64, other: Self) -> Self {
        self + w * other
    }
    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// The value and right derivative of a piecewise-linear function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub value: f64,
    pub slope: f64,
}

impl Backup for Line {
    fn constant(v: f64) -> Self {
        Line { value: v, slope: 0.0 }
    }
    fn add_scaled(self, w: f64, other: Self) -> Self {
        Line { value: self.value + w * other.value, slope: self.slope + w * other.slope }
    }
    fn max(self, other: Self) -> Self {
        if other.value > self.value || (other.value == self.value && other.slope > self.slope) {
            other
        } else {
            self
        }
    }
}

/// Expands `root` for `depth` steps.
pub fn build_pst<M: Mdp>(mdp: &M, root: &M::State, depth: usize) -> Result<PartialSearchTree<M::State>> {
    if depth == 0 {
        return Err(Error::InvalidDepth(depth));
    }
    if mdp.is_terminal(root) {
        return Err(Error::TerminalRoot);
    }
    let gamma = mdp.discount();
    let mut nodes: Vec<PstNode<M::State>> = Vec::new();
    let mut leaves = Vec::new();
    let mut deterministic = true;

    let mut frontier = vec![NodeId(0)];
    nodes.push(PstNode { state: root.clone(), depth: 0, kind: NodeKind::Terminal { value: 0.0 } });

    for d in 0..=depth {
        let mut next_level: Vec<NodeId> = Vec::new();
        let mut index: HashMap<M::State, NodeId> = HashMap::new();
        for &id in &frontier {
            let state = nodes[id.0].state.clone();
            let na = mdp.num_actions(&state);
            if na == 0 {
                nodes[id.0].kind = NodeKind::Terminal { value: mdp.terminal_value(&state) };
                continue;
            }
            if d == depth {
                let first = leaves.len();
                leaves.extend((0..na).map(|action| LeafRef { node: id, action }));
                nodes[id.0].kind = NodeKind::Frontier { leaves: (first..first + na).collect() };
                continue;
            }
            let mut actions = Vec::with_capacity(na);
            for a in 0..na {
                let transitions = mdp.transitions(&state, a);
                crate::mdp::validate_transitions(&transitions)?;
                if transitions.len() > 1 {
                    deterministic = false;
                }
                let mut outcomes: Vec<Outcome> = Vec::with_capacity(transitions.len());
                for t in transitions {
                    let child = *index.entry(t.next.clone()).or_insert_with(|| {
                        let cid = NodeId(nodes.len());
                        nodes.push(PstNode {
                            state: t.next.clone(),
                            depth: d + 1,
                            kind: NodeKind::Terminal { value: 0.0 },
                        });
                        next_level.push(cid);
                        cid
                    });
                    // Two transitions of one action into the same state are merged.
                    match outcomes.iter_mut().find(|o| o.child == child) {
                        Some(o) => {
                            let p = o.prob + t.prob;
                            o.reward = (o.prob * o.reward + t.prob * t.reward) / p;
                            o.prob = p;
                        }
                        None => outcomes.push(Outcome { child, prob: t.prob, reward: t.reward }),
                    }
                }
                actions.push(outcomes);
            }
            nodes[id.0].kind = NodeKind::Interior { actions };
        }
        frontier = next_level;
    }

    if leaves.is_empty() {
        return Err(Error::NoLeaves);
    }
    Ok(PartialSearchTree { nodes, leaves, depth, discount: gamma, deterministic })
}

impl<S: Clone> PartialSearchTree<S> {
    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &PstNode<S> {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[PstNode<S>] {
        &self.nodes
    }

    pub fn leaf(&self, index: usize) -> LeafRef {
        self.leaves[index]
    }

    pub fn leaf_state(&self, index: usize) -> &S {
        &self.nodes[self.leaves[index].node.0].state
    }

    /// Leaves as (state, action) pairs, in breadth-first order with the
    /// action index breaking ties.
    pub fn leaf_set(&self) -> Vec<(S, usize)> {
        self.leaves.iter().map(|l| (self.nodes[l.node.0].state.clone(), l.action)).collect()
    }

    pub fn num_actions(&self, id: NodeId) -> usize {
        match &self.nodes[id.0].kind {
            NodeKind::Terminal { .. } => 0,
            NodeKind::Interior { actions } => actions.len(),
            NodeKind::Frontier { leaves } => leaves.len(),
        }
    }

    pub fn root_actions(&self) -> usize {
        self.num_actions(self.root())
    }

    /// Backs `leaf_values` up to every node, writing node values into `out`.
    pub fn evaluate_into<B: Backup>(&self, leaf_values: &[B], out: &mut Vec<B>) {
        debug_assert_eq!(leaf_values.len(), self.leaves.len());
        out.clear();
        out.resize(self.nodes.len(), B::constant(0.0));
        for i in (0..self.nodes.len()).rev() {
            out[i] = match &self.nodes[i].kind {
                NodeKind::Terminal { value } => B::constant(*value),
                NodeKind::Frontier { leaves } => {
                    let mut best = leaf_values[leaves[0]];
                    for &l in &leaves[1..] {
                        best = best.max(leaf_values[l]);
                    }
                    best
                }
                NodeKind::Interior { actions } => {
                    let mut best = self.backup_action(&actions[0], out);
                    for outcomes in &actions[1..] {
                        best = best.max(self.backup_action(outcomes, out));
                    }
                    best
                }
            };
        }
    }

    fn backup_action<B: Backup>(&self, outcomes: &[Outcome], node_values: &[B]) -> B {
        let mut q = B::constant(0.0);
        for o in outcomes {
            q = q.add_scaled(o.prob, B::constant(o.reward).add_scaled(self.discount, node_values[o.child.0]));
        }
        q
    }

    pub fn evaluate<B: Backup>(&self, leaf_values: &[B]) -> Vec<B> {
        let mut out = Vec::new();
        self.evaluate_into(leaf_values, &mut out);
        out
    }

    /// Value of `(node, action)` given node values from [`Self::evaluate`].
    pub fn action_value<B: Backup>(
        &self,
        node_values: &[B],
        leaf_values: &[B],
        node: NodeId,
        action: usize,
    ) -> Result<B> {
        match self.nodes.get(node.0).map(|n| &n.kind) {
            Some(NodeKind::Interior { actions }) if action < actions.len() => {
                Ok(self.backup_action(&actions[action], node_values))
            }
            Some(NodeKind::Frontier { leaves }) if action < leaves.len() => Ok(leaf_values[leaves[action]]),
            _ => Err(Error::NotInTree { node: node.0, action }),
        }
    }

    /// Values of all root actions.
    pub fn root_action_values<B: Backup>(&self, leaf_values: &[B]) -> Vec<B> {
        let mut buf = Vec::new();
        let mut out = Vec::new();
        self.root_action_values_into(leaf_values, &mut buf, &mut out);
        out
    }

    pub fn root_action_values_into<B: Backup>(&self, leaf_values: &[B], buf: &mut Vec<B>, out: &mut Vec<B>) {
        self.evaluate_into(leaf_values, buf);
        out.clear();
        match &self.nodes[0].kind {
            NodeKind::Interior { actions } => out.extend(actions.iter().map(|o| self.backup_action(o, buf))),
            NodeKind::Frontier { leaves } => out.extend(leaves.iter().map(|&l| leaf_values[l])),
            NodeKind::Terminal { .. } => {}
        }
    }

    /// Depth remaining below `(node, action)`: 0 for leaves.
    pub fn levels_below(&self, node: NodeId) -> usize {
        self.depth - self.nodes[node.0].depth
    }

    /// The flat form of a node's value for deterministic trees: its value is
    /// the maximum over the returned entries of `offset + scale * leaf value`
    /// (or `offset` for terminal entries). When several paths reach the same
    /// leaf the best path offset is kept.
    pub fn flat_leaves(&self, from: NodeId) -> Result<Vec<FlatLeaf>> {
        if !self.deterministic {
            return Err(Error::RequiresDeterministic("the flat leaf form"));
        }
        self.flat_from(from, None)
    }

    /// Flat form restricted to one action of `node`.
    pub fn flat_leaves_of_action(&self, node: NodeId, action: usize) -> Result<Vec<FlatLeaf>> {
        if !self.deterministic {
            return Err(Error::RequiresDeterministic("the flat leaf form"));
        }
        if action >= self.num_actions(node) {
            return Err(Error::NotInTree { node: node.0, action });
        }
        self.flat_from(node, Some(action))
    }

    fn flat_from(&self, from: NodeId, only_action: Option<usize>) -> Result<Vec<FlatLeaf>> {
        let mut offset: Vec<Option<f64>> = vec![None; self.nodes.len()];
        let mut leaf_offset: Vec<Option<f64>> = vec![None; self.leaves.len()];
        let mut terminals = Vec::new();
        offset[from.0] = Some(0.0);
        let base_depth = self.nodes[from.0].depth;
        for i in from.0..self.nodes.len() {
            let Some(off) = offset[i] else { continue };
            let scale = self.discount.powi((self.nodes[i].depth - base_depth) as i32);
            let restrict = if i == from.0 { only_action } else { None };
            match &self.nodes[i].kind {
                NodeKind::Terminal { value } => terminals.push(FlatLeaf { leaf: None, offset: off + scale * value, scale: 0.0 }),
                NodeKind::Frontier { leaves } => {
                    for (a, &l) in leaves.iter().enumerate() {
                        if restrict.is_some_and(|r| r != a) {
                            continue;
                        }
                        leaf_offset[l] = Some(leaf_offset[l].map_or(off, |o: f64| o.max(off)));
                    }
                }
                NodeKind::Interior { actions } => {
                    for (a, outcomes) in actions.iter().enumerate() {
                        if restrict.is_some_and(|r| r != a) {
                            continue;
                        }
                        let o = outcomes[0];
                        let child_off = off + scale * o.reward;
                        let slot = &mut offset[o.child.0];
                        *slot = Some(slot.map_or(child_off, |x: f64| x.max(child_off)));
                    }
                }
            }
        }
        let leaf_scale = self.discount.powi((self.depth - base_depth) as i32);
        let mut flat: Vec<FlatLeaf> = leaf_offset
            .iter()
            .enumerate()
            .filter_map(|(l, o)| o.map(|offset| FlatLeaf { leaf: Some(l), offset, scale: leaf_scale }))
            .collect();
        flat.extend(terminals);
        Ok(flat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{TableMdp, Transition};

    /// Complete binary tree of the given height with `p`-biased transitions.
    fn binary_tree(height: usize, p: f64) -> TableMdp {
        let mut mdp = TableMdp::new(1.0).unwrap();
        let mut level = vec![mdp.add_state(0.0)];
        for _ in 0..height {
            let mut next = Vec::new();
            for &s in &level {
                let l = mdp.add_state(0.0);
                let r = mdp.add_state(0.0);
                if p < 1.0 {
                    mdp.add_action(s, vec![Transition::new(l, p, 0.0), Transition::new(r, 1.0 - p, 0.0)]).unwrap();
                    mdp.add_action(s, vec![Transition::new(l, 1.0 - p, 0.0), Transition::new(r, p, 0.0)]).unwrap();
                } else {
                    mdp.add_action(s, vec![Transition::new(l, 1.0, 0.0)]).unwrap();
                    mdp.add_action(s, vec![Transition::new(r, 1.0, 0.0)]).unwrap();
                }
                next.push(l);
                next.push(r);
            }
            level = next;
        }
        mdp
    }

    #[test]
    fn bandit_tree_height_7_depth_4_has_32_leaves() {
        let mdp = binary_tree(7, 0.75);
        let pst = build_pst(&mdp, &0, 4).unwrap();
        assert_eq!(pst.num_leaves(), 32);
        assert!(!pst.is_deterministic());
        let states: std::collections::HashSet<_> = pst.leaf_set().into_iter().map(|(s, _)| s).collect();
        assert_eq!(states.len(), 16);
    }

    #[test]
    fn chain_has_single_leaf() {
        let mut mdp = TableMdp::new(1.0).unwrap();
        let states: Vec<usize> = (0..5).map(|_| mdp.add_state(0.0)).collect();
        for w in states.windows(2) {
            mdp.add_action(w[0], vec![Transition::new(w[1], 1.0, 0.0)]).unwrap();
        }
        let last = *states.last().unwrap();
        let end = mdp.add_state(0.0);
        mdp.add_action(last, vec![Transition::new(end, 1.0, 0.0)]).unwrap();
        let pst = build_pst(&mdp, &0, 3).unwrap();
        assert_eq!(pst.num_leaves(), 1);
    }

    #[test]
    fn depth_one_binary_deterministic_has_four_leaves_in_bfs_order() {
        let mdp = binary_tree(3, 1.0);
        let pst = build_pst(&mdp, &0, 1).unwrap();
        assert_eq!(pst.leaf_set(), vec![(1, 0), (1, 1), (2, 0), (2, 1)]);
        let again = build_pst(&mdp, &0, 1).unwrap();
        assert_eq!(pst.leaf_set(), again.leaf_set());
    }

    #[test]
    fn duplicate_states_merge_into_one_leaf() {
        let mut mdp = TableMdp::new(1.0).unwrap();
        let root = mdp.add_state(0.0);
        let shared = mdp.add_state(0.0);
        let end = mdp.add_state(1.0);
        mdp.add_action(root, vec![Transition::new(shared, 1.0, 0.0)]).unwrap();
        mdp.add_action(root, vec![Transition::new(shared, 1.0, 0.0)]).unwrap();
        mdp.add_action(shared, vec![Transition::new(end, 1.0, 0.0)]).unwrap();
        let pst = build_pst(&mdp, &root, 1).unwrap();
        assert_eq!(pst.leaf_set(), vec![(shared, 0)]);
    }

    #[test]
    fn rejects_invalid_requests() {
        let mdp = binary_tree(2, 1.0);
        assert!(matches!(build_pst(&mdp, &0, 0), Err(Error::InvalidDepth(0))));
        let leaf_state = mdp.num_states() - 1;
        assert!(matches!(build_pst(&mdp, &leaf_state, 1), Err(Error::TerminalRoot)));
        // Every path ends inside the horizon.
        assert!(matches!(build_pst(&mdp, &0, 2), Err(Error::NoLeaves)));
    }

    #[test]
    fn terminal_states_inside_horizon_contribute_their_value() {
        let mut mdp = TableMdp::new(1.0).unwrap();
        let root = mdp.add_state(0.0);
        let done = mdp.add_state(3.0);
        let mid = mdp.add_state(0.0);
        let end = mdp.add_state(0.0);
        mdp.add_action(root, vec![Transition::new(done, 1.0, 0.0)]).unwrap();
        mdp.add_action(root, vec![Transition::new(mid, 1.0, 0.0)]).unwrap();
        mdp.add_action(mid, vec![Transition::new(end, 1.0, 0.0)]).unwrap();
        let pst = build_pst(&mdp, &root, 1).unwrap();
        assert_eq!(pst.num_leaves(), 1);
        assert_eq!(pst.root_action_values(&[1.0]), vec![3.0, 1.0]);
    }

    #[test]
    fn stochastic_backup_is_expectation_of_max() {
        let mdp = binary_tree(2, 0.75);
        let pst = build_pst(&mdp, &0, 1).unwrap();
        // leaves: (L,0) (L,1) (R,0) (R,1)
        let v = [0.2, 0.8, 0.5, 0.4];
        let q = pst.root_action_values(&v);
        assert!((q[0] - (0.75 * 0.8 + 0.25 * 0.5)).abs() < 1e-15);
        assert!((q[1] - (0.25 * 0.8 + 0.75 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn flat_form_tracks_rewards_and_discount() {
        let mut mdp = TableMdp::new(0.5).unwrap();
        let root = mdp.add_state(0.0);
        let a = mdp.add_state(0.0);
        let b = mdp.add_state(0.0);
        let end = mdp.add_state(0.0);
        mdp.add_action(root, vec![Transition::new(a, 1.0, 1.0)]).unwrap();
        mdp.add_action(root, vec![Transition::new(b, 1.0, 2.0)]).unwrap();
        mdp.add_action(a, vec![Transition::new(end, 1.0, 0.0)]).unwrap();
        mdp.add_action(b, vec![Transition::new(end, 1.0, 0.0)]).unwrap();
        let pst = build_pst(&mdp, &root, 1).unwrap();
        let flat = pst.flat_leaves(pst.root()).unwrap();
        assert_eq!(flat.len(), 2);
        assert_eq!(flat[0], FlatLeaf { leaf: Some(0), offset: 1.0, scale: 0.5 });
        assert_eq!(flat[1], FlatLeaf { leaf: Some(1), offset: 2.0, scale: 0.5 });
        let only_b = pst.flat_leaves_of_action(pst.root(), 1).unwrap();
        assert_eq!(only_b, vec![FlatLeaf { leaf: Some(1), offset: 2.0, scale: 0.5 }]);
    }
}
