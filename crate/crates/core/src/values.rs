//! Static and dynamic value functions over a partial search tree.
//!
//! The static value backs posterior *means* up through the tree (max of
//! expectations). The dynamic value is the expectation, over joint posterior
//! draws of the leaves, of the backed-up draw (expectation of max); it is
//! estimated by Monte Carlo, or bounded above in closed form for
//! deterministic trees.

use rand::Rng;

use crate::belief::{Belief, JointSampler};
use crate::error::{Error, Result};
use crate::gaussian::{expected_excess, std_sf};
use crate::pst::{NodeId, PartialSearchTree};

/// Default Monte Carlo sample count for dynamic values.
pub const DEFAULT_PSI_SAMPLES: usize = 2048;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    pub fn exact(v: f64) -> Self {
        Self { mean: v, se: 0.0 }
    }
}

/// Welford running mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let se = if self.n < 2 { 0.0 } else { (self.sample_variance() / self.n as f64).sqrt() };
        Estimate { mean: self.mean, se }
    }
}

fn check_belief<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief) -> Result<()> {
    if pst.num_leaves() != belief.dim() {
        return Err(Error::DimensionMismatch { expected: pst.num_leaves(), found: belief.dim() });
    }
    Ok(())
}

/// Static value of `(node, action)`: the Bellman backup of posterior means.
pub fn static_value<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief, node: NodeId, action: usize) -> Result<f64> {
    check_belief(pst, belief)?;
    upsilon_sample(pst, belief.means(), node, action)
}

/// Static values of every root action.
pub fn static_root_values<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief) -> Result<Vec<f64>> {
    check_belief(pst, belief)?;
    Ok(pst.root_action_values(belief.means()))
}

/// The backed-up value of `(node, action)` for one joint assignment of leaf
/// values.
pub fn upsilon_sample<S: Clone>(pst: &PartialSearchTree<S>, draw: &[f64], node: NodeId, action: usize) -> Result<f64> {
    if draw.len() != pst.num_leaves() {
        return Err(Error::DimensionMismatch { expected: pst.num_leaves(), found: draw.len() });
    }
    let values = pst.evaluate(draw);
    pst.action_value(&values, draw, node, action)
}

/// Dynamic value of `(node, action)` by antithetic Monte Carlo over joint
/// posterior draws.
pub fn dynamic_value_mc<S: Clone, R: Rng + ?Sized>(
    pst: &PartialSearchTree<S>,
    belief: &Belief,
    node: NodeId,
    action: usize,
    samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    check_belief(pst, belief)?;
    if samples < 1 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if action >= pst.num_actions(node) {
        return Err(Error::NotInTree { node: node.0, action });
    }
    let sampler = belief.sampler()?;
    let m = pst.num_leaves();
    let (mut plus, mut minus) = (vec![0.0; m], vec![0.0; m]);
    let mut buf = Vec::new();
    let mut acc = Accumulator::default();
    for _ in 0..samples.div_ceil(2) {
        sampler.draw_pair(rng, &mut plus, &mut minus);
        pst.evaluate_into(&plus, &mut buf);
        let a = pst.action_value(&buf, &plus, node, action)?;
        pst.evaluate_into(&minus, &mut buf);
        let b = pst.action_value(&buf, &minus, node, action)?;
        acc.push(0.5 * (a + b));
    }
    Ok(acc.estimate())
}

/// Dynamic values of all root actions and of the expected root maximum
/// `E[max_a Υ(root, a)]`, from one shared set of draws.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicRootValues {
    pub actions: Vec<Estimate>,
    pub expected_max: Estimate,
}

impl DynamicRootValues {
    /// Root action with the largest estimated dynamic value (lowest index on ties).
    pub fn argmax(&self) -> usize {
        argmax(&self.actions.iter().map(|e| e.mean).collect::<Vec<_>>())
    }
}

pub fn dynamic_root_values<S: Clone, R: Rng + ?Sized>(
    pst: &PartialSearchTree<S>,
    sampler: &JointSampler,
    samples: usize,
    rng: &mut R,
) -> Result<DynamicRootValues> {
    if samples < 1 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if sampler.dim() != pst.num_leaves() {
        return Err(Error::DimensionMismatch { expected: pst.num_leaves(), found: sampler.dim() });
    }
    let m = pst.num_leaves();
    let k = pst.root_actions();
    let (mut plus, mut minus) = (vec![0.0; m], vec![0.0; m]);
    let (mut buf, mut qa, mut qb) = (Vec::new(), Vec::new(), Vec::new());
    let mut accs = vec![Accumulator::default(); k];
    let mut max_acc = Accumulator::default();
    for _ in 0..samples.div_ceil(2) {
        sampler.draw_pair(rng, &mut plus, &mut minus);
        pst.root_action_values_into(&plus, &mut buf, &mut qa);
        pst.root_action_values_into(&minus, &mut buf, &mut qb);
        for a in 0..k {
            accs[a].push(0.5 * (qa[a] + qb[a]));
        }
        let ma = qa.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mb = qb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max_acc.push(0.5 * (ma + mb));
    }
    Ok(DynamicRootValues { actions: accs.iter().map(|a| a.estimate()).collect(), expected_max: max_acc.estimate() })
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Marginal Normal of one term `Z = offset + scale · Q_leaf` of the flat
/// deterministic form. `leaf` is `None` for terminal point masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafGaussian {
    pub leaf: Option<usize>,
    pub mean: f64,
    pub sd: f64,
    /// `dZ/dQ`, needed to map leaf-level sensitivities onto `Z`.
    pub scale: f64,
}

impl LeafGaussian {
    /// Upper tail `1 - F(c)`.
    pub fn survival(&self, c: f64) -> f64 {
        if self.sd <= 0.0 {
            if self.mean > c {
                1.0
            } else {
                0.0
            }
        } else {
            std_sf((c - self.mean) / self.sd)
        }
    }
}

/// Flat-form marginals of the leaves below `node` (all actions collapsed).
pub fn leaf_summaries<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief, node: NodeId) -> Result<Vec<LeafGaussian>> {
    check_belief(pst, belief)?;
    let flat = pst.flat_leaves(node)?;
    Ok(flat
        .into_iter()
        .map(|f| match f.leaf {
            Some(l) => LeafGaussian {
                leaf: Some(l),
                mean: f.offset + f.scale * belief.mean(l),
                sd: f.scale * belief.variance(l).sqrt(),
                scale: f.scale,
            },
            None => LeafGaussian { leaf: None, mean: f.offset, sd: 0.0, scale: 0.0 },
        })
        .collect())
}

/// The expected-maximum bound `λ(c) = c + Σ E[(Z - c)^+]` at its minimiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CBound {
    pub c: f64,
    pub lambda: f64,
}

/// `c + Σ E[(Z_i - c)^+]`, an upper bound on `E[max_i Z_i]` for any `c`.
pub fn lambda_at(leaves: &[LeafGaussian], c: f64) -> f64 {
    c + leaves.iter().map(|l| expected_excess(l.mean, l.sd, c)).sum::<f64>()
}

/// `Σ (1 - F_i(c)) - 1`, strictly decreasing in `c` while some leaf is uncertain.
pub fn c_condition(leaves: &[LeafGaussian], c: f64) -> f64 {
    leaves.iter().map(|l| l.survival(c)).sum::<f64>() - 1.0
}

/// Solves `Σ (1 - F_i(c)) = 1` by bisection and evaluates the bound there.
pub fn optimal_c(leaves: &[LeafGaussian]) -> Result<CBound> {
    if leaves.is_empty() {
        return Err(Error::InvalidParameter("bound over zero leaves".into()));
    }
    let max_mean = leaves.iter().map(|l| l.mean).fold(f64::NEG_INFINITY, f64::max);
    let min_mean = leaves.iter().map(|l| l.mean).fold(f64::INFINITY, f64::min);
    let max_sd = leaves.iter().map(|l| l.sd).fold(0.0, f64::max);
    if max_sd <= 0.0 {
        return Ok(CBound { c: max_mean, lambda: max_mean });
    }
    let (mut lo, mut hi) = (min_mean - 6.0 * max_sd, max_mean + 6.0 * max_sd);
    if c_condition(leaves, lo) <= 0.0 {
        return Ok(CBound { c: lo, lambda: lambda_at(leaves, lo) });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if c_condition(leaves, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // At a point-mass jump the condition has no exact root; both ends bracket
    // the minimiser of λ, so take the smaller bound.
    let (l_lo, l_hi) = (lambda_at(leaves, lo), lambda_at(leaves, hi));
    Ok(if l_lo <= l_hi { CBound { c: lo, lambda: l_lo } } else { CBound { c: hi, lambda: l_hi } })
}

/// Upper bound on the dynamic value of every action at `node`, from the
/// collapsed flat form. Deterministic trees only.
pub fn dynamic_value_bound<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief, node: NodeId) -> Result<CBound> {
    if !pst.is_deterministic() {
        return Err(Error::RequiresDeterministic("the dynamic value bound"));
    }
    optimal_c(&leaf_summaries(pst, belief, node)?)
}
