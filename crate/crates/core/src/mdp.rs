//! Finite MDPs with known dynamics.

use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Probability tolerance for transition distributions.
pub const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Transition<S> {
    pub next: S,
    pub prob: f64,
    /// Expected immediate reward for this transition.
    pub reward: f64,
}

impl<S> Transition<S> {
    pub fn new(next: S, prob: f64, reward: f64) -> Self {
        Self { next, prob, reward }
    }
}

/// A finite MDP whose dynamics are known to the planner.
///
/// Actions are indexed `0..num_actions(s)`. A state with no actions is
/// terminal; its value is [`Mdp::terminal_value`].
pub trait Mdp {
    type State: Clone + Eq + Hash + Debug;

    fn num_actions(&self, state: &Self::State) -> usize;

    /// Successor distribution of `(state, action)`. Order is significant: it
    /// fixes the breadth-first order of partial search trees.
    fn transitions(&self, state: &Self::State, action: usize) -> Vec<Transition<Self::State>>;

    fn discount(&self) -> f64 {
        1.0
    }

    fn is_terminal(&self, state: &Self::State) -> bool {
        self.num_actions(state) == 0
    }

    /// Expected value collected on reaching a terminal state.
    fn terminal_value(&self, _state: &Self::State) -> f64 {
        0.0
    }

    /// Cheap guess at a state's value, used to centre leaf priors.
    fn value_hint(&self, _state: &Self::State) -> f64 {
        0.0
    }

    /// One noisy draw of the terminal value. Defaults to the expectation.
    fn sample_terminal<R: Rng + ?Sized>(&self, state: &Self::State, _rng: &mut R) -> f64 {
        self.terminal_value(state)
    }

    /// Simulate one step; returns the successor and the realised reward.
    fn sample_transition<R: Rng + ?Sized>(
        &self,
        state: &Self::State,
        action: usize,
        rng: &mut R,
    ) -> (Self::State, f64) {
        let mut outcomes = self.transitions(state, action);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let last = outcomes.len() - 1;
        for (i, t) in outcomes.iter().enumerate() {
            acc += t.prob;
            if u < acc || i == last {
                return (t.next.clone(), t.reward);
            }
        }
        let t = outcomes.swap_remove(last);
        (t.next, t.reward)
    }
}

/// Checks that a transition list is a probability distribution.
pub fn validate_transitions<S>(outcomes: &[Transition<S>]) -> Result<()> {
    if outcomes.is_empty() {
        return Err(Error::InvalidParameter("empty transition distribution".into()));
    }
    let mut total = 0.0;
    for t in outcomes {
        if !(t.prob >= 0.0) || !t.reward.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "invalid transition (prob {}, reward {})",
                t.prob, t.reward
            )));
        }
        total += t.prob;
    }
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "transition probabilities sum to {total}"
        )));
    }
    Ok(())
}

/// An explicitly tabulated MDP over integer states.
#[derive(Debug, Clone, Default)]
pub struct TableMdp {
    actions: Vec<Vec<Vec<Transition<usize>>>>,
    terminal_values: Vec<f64>,
    terminal_noise_sd: Vec<f64>,
    discount: f64,
}

impl TableMdp {
    pub fn new(discount: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&discount) {
            return Err(Error::InvalidParameter(format!("discount {discount} outside [0, 1]")));
        }
        Ok(Self { discount, ..Default::default() })
    }

    pub fn add_state(&mut self, terminal_value: f64) -> usize {
        self.actions.push(Vec::new());
        self.terminal_values.push(terminal_value);
        self.terminal_noise_sd.push(0.0);
        self.actions.len() - 1
    }

    /// Adds an action to `state` and returns its index.
    pub fn add_action(&mut self, state: usize, outcomes: Vec<Transition<usize>>) -> Result<usize> {
        validate_transitions(&outcomes)?;
        if state >= self.actions.len() || outcomes.iter().any(|t| t.next >= self.actions.len()) {
            return Err(Error::InvalidParameter("unknown state in transition".into()));
        }
        self.actions[state].push(outcomes);
        Ok(self.actions[state].len() - 1)
    }

    pub fn set_terminal_noise(&mut self, state: usize, variance: f64) {
        self.terminal_noise_sd[state] = variance.max(0.0).sqrt();
    }

    pub fn num_states(&self) -> usize {
        self.actions.len()
    }

    /// Root with one action per group; each group state has one action per
    /// value, leading deterministically to a terminal state worth that value.
    /// Terminal draws carry Normal noise of the given variance.
    ///
    /// The resulting height-1 partial search tree has one leaf per value.
    pub fn choice_tree(groups: &[Vec<f64>], noise_var: f64) -> Result<Self> {
        let mut mdp = Self::new(1.0)?;
        let root = mdp.add_state(0.0);
        for group in groups {
            let inner = mdp.add_state(0.0);
            for &v in group {
                let leaf = mdp.add_state(v);
                mdp.set_terminal_noise(leaf, noise_var);
                mdp.add_action(inner, vec![Transition::new(leaf, 1.0, 0.0)])?;
            }
            mdp.add_action(root, vec![Transition::new(inner, 1.0, 0.0)])?;
        }
        Ok(mdp)
    }
}

impl Mdp for TableMdp {
    type State = usize;

    fn num_actions(&self, state: &usize) -> usize {
        self.actions[*state].len()
    }

    fn transitions(&self, state: &usize, action: usize) -> Vec<Transition<usize>> {
        self.actions[*state][action].clone()
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn terminal_value(&self, state: &usize) -> f64 {
        self.terminal_values[*state]
    }

    fn sample_terminal<R: Rng + ?Sized>(&self, state: &usize, rng: &mut R) -> f64 {
        let sd = self.terminal_noise_sd[*state];
        let v = self.terminal_values[*state];
        if sd > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            v + sd * z
        } else {
            v
        }
    }
}

/// Exact optimal values of every reachable state-action.
#[derive(Debug, Clone)]
pub struct QTable<S: Eq + Hash> {
    q: HashMap<(S, usize), f64>,
    v: HashMap<S, f64>,
}

impl<S: Eq + Hash + Clone> QTable<S> {
    pub fn q(&self, state: &S, action: usize) -> Option<f64> {
        self.q.get(&(state.clone(), action)).copied()
    }

    pub fn v(&self, state: &S) -> Option<f64> {
        self.v.get(state).copied()
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(S, usize), &f64)> {
        self.q.iter()
    }
}

/// Optimal action values by backward induction over the states reachable
/// from `root` within `horizon` steps.
///
/// Only tree and DAG MDPs are supported; a cycle is an error, as is a
/// non-terminal state at the horizon.
pub fn exact_qstar<M: Mdp>(mdp: &M, root: &M::State, horizon: usize) -> Result<QTable<M::State>> {
    struct Solver<'a, M: Mdp> {
        mdp: &'a M,
        q: HashMap<(M::State, usize), f64>,
        v: HashMap<M::State, f64>,
        on_stack: HashSet<M::State>,
    }

    impl<M: Mdp> Solver<'_, M> {
        fn value(&mut self, s: &M::State, remaining: usize) -> Result<f64> {
            if let Some(&v) = self.v.get(s) {
                return Ok(v);
            }
            let na = self.mdp.num_actions(s);
            if na == 0 {
                let v = self.mdp.terminal_value(s);
                self.v.insert(s.clone(), v);
                return Ok(v);
            }
            if remaining == 0 {
                return Err(Error::HorizonTooShort);
            }
            if !self.on_stack.insert(s.clone()) {
                return Err(Error::Cyclic);
            }
            let gamma = self.mdp.discount();
            let mut best = f64::NEG_INFINITY;
            for a in 0..na {
                let mut qa = 0.0;
                for t in self.mdp.transitions(s, a) {
                    qa += t.prob * (t.reward + gamma * self.value(&t.next, remaining - 1)?);
                }
                self.q.insert((s.clone(), a), qa);
                best = best.max(qa);
            }
            self.on_stack.remove(s);
            self.v.insert(s.clone(), best);
            Ok(best)
        }
    }

    let mut solver = Solver { mdp, q: HashMap::new(), v: HashMap::new(), on_stack: HashSet::new() };
    solver.value(root, horizon)?;
    Ok(QTable { q: solver.q, v: solver.v })
}

/// Wraps an MDP and counts terminal draws, i.e. simulations.
#[derive(Debug)]
pub struct CountingMdp<'a, M> {
    inner: &'a M,
    draws: std::cell::Cell<usize>,
}

impl<'a, M: Mdp> CountingMdp<'a, M> {
    pub fn new(inner: &'a M) -> Self {
        Self { inner, draws: std::cell::Cell::new(0) }
    }

    pub fn draws(&self) -> usize {
        self.draws.get()
    }
}

impl<M: Mdp> Mdp for CountingMdp<'_, M> {
    type State = M::State;

    fn num_actions(&self, state: &Self::State) -> usize {
        self.inner.num_actions(state)
    }

    fn transitions(&self, state: &Self::State, action: usize) -> Vec<Transition<Self::State>> {
        self.inner.transitions(state, action)
    }

    fn discount(&self) -> f64 {
        self.inner.discount()
    }

    fn is_terminal(&self, state: &Self::State) -> bool {
        self.inner.is_terminal(state)
    }

    fn terminal_value(&self, state: &Self::State) -> f64 {
        self.inner.terminal_value(state)
    }

    fn value_hint(&self, state: &Self::State) -> f64 {
        self.inner.value_hint(state)
    }

    fn sample_terminal<R: Rng + ?Sized>(&self, state: &Self::State, rng: &mut R) -> f64 {
        self.draws.set(self.draws.get() + 1);
        self.inner.sample_terminal(state, rng)
    }

    fn sample_transition<R: Rng + ?Sized>(&self, state: &Self::State, action: usize, rng: &mut R) -> (Self::State, f64) {
        self.inner.sample_transition(state, action, rng)
    }
}
