//! Value of computation.
//!
//! A computation samples one leaf of the partial search tree. Its value is
//! the expected increase, over the predictive distribution of its outcome, of
//! the root's maximal static or dynamic action value. After observing
//! `o = μ_i + sd_pred · z` the posterior means move along a fixed direction,
//! so every static value is a convex piecewise-linear function of `z` and
//! the static VOC is an expected maximum of lines, computed exactly.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::gaussian::{kg_f, std_cdf, std_pdf};
use crate::pst::{Line, PartialSearchTree};
use crate::values::{argmax, leaf_summaries, optimal_c, Accumulator, Estimate, LeafGaussian};

/// Outcomes beyond this many predictive standard deviations carry no weight
/// in double precision.
const Z_RANGE: f64 = 40.0;
const MAX_PIECES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VocMethod {
    /// Truncated-Normal closed form (deterministic tree, independent leaves).
    IsotropicExact,
    /// Exact expected maximum of a piecewise-linear function of the outcome.
    KgExact,
    /// `-∂λ/∂n` at fixed `c`; a ranking proxy, not an expectation.
    LambdaSensitivity,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VocResult {
    pub candidate: usize,
    pub value: f64,
    /// Monte Carlo standard error; zero for the other methods.
    pub se: f64,
    pub method: VocMethod,
}

/// Selects static (`φ`) or dynamic (`ψ`) values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Static,
    Dynamic,
}

fn check<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief, candidate: usize) -> Result<()> {
    if pst.num_leaves() != belief.dim() {
        return Err(Error::DimensionMismatch { expected: pst.num_leaves(), found: belief.dim() });
    }
    if candidate >= belief.dim() {
        return Err(Error::InvalidCandidate { index: candidate, count: belief.dim() });
    }
    Ok(())
}

/// `E[max_k (a_k + b_k Z)] - max_k a_k` for a standard Normal `Z`.
///
/// Sorts the lines by slope, keeps the upper envelope and sums the slope
/// increments at each breakpoint against `f(-|c|)`. O(k log k).
pub fn expected_max_gain(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| b[i].total_cmp(&b[j]).then(a[i].total_cmp(&a[j])));
    // (slope, intercept, breakpoint where the line becomes maximal)
    let mut env: Vec<(f64, f64, f64)> = Vec::with_capacity(order.len());
    for &i in &order {
        let (bi, ai) = (b[i], a[i]);
        if let Some(last) = env.last() {
            if last.0 == bi {
                // Equal slopes: the sort put the larger intercept last.
                env.pop();
            }
        }
        loop {
            let Some(&(bt, at, ct)) = env.last() else {
                env.push((bi, ai, f64::NEG_INFINITY));
                break;
            };
            let z = (at - ai) / (bi - bt);
            if z <= ct {
                env.pop();
            } else {
                env.push((bi, ai, z));
                break;
            }
        }
    }
    env.windows(2).map(|w| (w[1].0 - w[0].0) * kg_f(-w[1].2.abs())).sum()
}

/// Which root quantity a piecewise-linear evaluation tracks.
#[derive(Debug, Clone, Copy)]
enum Target {
    RootMax,
    RootAction(usize),
}

/// Evaluates a static value along the update direction of one candidate.
struct Pl<'a, S> {
    pst: &'a PartialSearchTree<S>,
    mean: &'a [f64],
    dir: Vec<f64>,
    target: Target,
    leaves: Vec<Line>,
    nodes: Vec<Line>,
    actions: Vec<Line>,
}

impl<'a, S: Clone> Pl<'a, S> {
    fn new(pst: &'a PartialSearchTree<S>, mean: &'a [f64], dir: Vec<f64>, target: Target) -> Self {
        Self { pst, mean, dir, target, leaves: Vec::new(), nodes: Vec::new(), actions: Vec::new() }
    }

    /// Value and one-sided slope at `z` (right slope if `right`, else left).
    fn eval(&mut self, z: f64, right: bool) -> Line {
        let sign = if right { 1.0 } else { -1.0 };
        self.leaves.clear();
        self.leaves
            .extend(self.mean.iter().zip(&self.dir).map(|(m, d)| Line { value: m + d * z, slope: sign * d }));
        self.pst.root_action_values_into(&self.leaves, &mut self.nodes, &mut self.actions);
        let line = match self.target {
            Target::RootAction(a) => self.actions[a],
            Target::RootMax => {
                let mut best = self.actions[0];
                for l in &self.actions[1..] {
                    best = crate::pst::Backup::max(best, *l);
                }
                best
            }
        };
        Line { value: line.value, slope: sign * line.slope }
    }

    /// Kinks of the (convex) function in `[-Z_RANGE, Z_RANGE]` as
    /// (location, slope increase), sorted by location.
    ///
    /// Keeps pairs of supporting lines; where their intersection lies on the
    /// function the interval holds exactly one kink, otherwise the tangent
    /// there splits it. Each split finds a new linear piece.
    fn kinks(&mut self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let (lo, hi) = (-Z_RANGE, Z_RANGE);
        let mut stack = vec![(lo, self.eval(lo, true), hi, self.eval(hi, false))];
        let mut splits = 0;
        while let Some((a, la, b, lb)) = stack.pop() {
            if lb.slope - la.slope <= 1e-14 * (1.0 + la.slope.abs() + lb.slope.abs()) {
                continue;
            }
            let z = (((lb.value - lb.slope * b) - (la.value - la.slope * a)) / (la.slope - lb.slope)).clamp(a, b);
            let tangent = self.eval(z, true);
            let support = la.value + la.slope * (z - a);
            let scale = 1.0 + la.value.abs() + lb.value.abs();
            splits += 1;
            if tangent.value <= support + 1e-12 * scale || z <= a || z >= b || splits > MAX_PIECES {
                out.push((z, lb.slope - la.slope));
                continue;
            }
            stack.push((a, la, z, tangent));
            stack.push((z, tangent, b, lb));
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }
}

/// Exact static VOC of sampling `candidate`.
///
/// Deterministic trees with independent leaves use the truncated-Normal
/// closed form; deterministic correlated beliefs use the line-envelope
/// algorithm over the flat leaf form; stochastic trees recover the
/// piecewise-linear root maximum by breakpoint search.
pub fn voc_static<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief, candidate: usize) -> Result<VocResult> {
    check(pst, belief, candidate)?;
    let done = |value: f64, method| Ok(VocResult { candidate, value: value.max(0.0), se: 0.0, method });
    if belief.variance(candidate) <= 0.0 {
        return done(0.0, if belief.is_isotropic() { VocMethod::IsotropicExact } else { VocMethod::KgExact });
    }
    if pst.is_deterministic() {
        let flat = pst.flat_leaves(pst.root())?;
        if belief.is_isotropic() {
            let mut own = None;
            let mut best_other = f64::NEG_INFINITY;
            for f in &flat {
                let mean = match f.leaf {
                    Some(l) => f.offset + f.scale * belief.mean(l),
                    None => f.offset,
                };
                if f.leaf == Some(candidate) {
                    own = Some((mean, f.scale));
                } else {
                    best_other = best_other.max(mean);
                }
            }
            let Some((mean, scale)) = own else { return done(0.0, VocMethod::IsotropicExact) };
            if best_other == f64::NEG_INFINITY {
                return done(0.0, VocMethod::IsotropicExact);
            }
            let v = belief.variance(candidate);
            let sigma_tilde = scale * v / (v + belief.noise_var()).sqrt();
            if sigma_tilde <= 0.0 {
                return done(0.0, VocMethod::IsotropicExact);
            }
            let delta = mean - best_other;
            return done(sigma_tilde * kg_f(-delta.abs() / sigma_tilde), VocMethod::IsotropicExact);
        }
        let dir = belief.update_direction(candidate)?;
        let (mut a, mut b) = (Vec::with_capacity(flat.len()), Vec::with_capacity(flat.len()));
        for f in &flat {
            match f.leaf {
                Some(l) => {
                    a.push(f.offset + f.scale * belief.mean(l));
                    b.push(f.scale * dir[l]);
                }
                None => {
                    a.push(f.offset);
                    b.push(0.0);
                }
            }
        }
        return done(expected_max_gain(&a, &b), VocMethod::KgExact);
    }
    let dir = belief.update_direction(candidate)?;
    let mut pl = Pl::new(pst, belief.means(), dir, Target::RootMax);
    let gain = pl.kinks().iter().map(|&(z, jump)| jump * kg_f(-z.abs())).sum::<f64>();
    done(gain, VocMethod::KgExact)
}

/// Static VOC of every leaf.
pub fn voc_static_all<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief) -> Result<Vec<VocResult>> {
    (0..pst.num_leaves()).map(|i| voc_static(pst, belief, i)).collect()
}

/// `E[(A + B(Z - z0)) 1{l < Z < r}]` for a standard Normal `Z`.
fn linear_piece_mass(a: f64, b: f64, z0: f64, l: f64, r: f64) -> f64 {
    let mass = std_cdf(r) - std_cdf(l);
    let first = std_pdf(l) - std_pdf(r);
    a * mass + b * (first - z0 * mass)
}

/// Exact static VOC′: the expected regret of the current root decision under
/// the post-computation belief. Zero whenever one outcome cannot change the
/// root decision.
pub fn voc_prime_static<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief, candidate: usize) -> Result<VocResult> {
    check(pst, belief, candidate)?;
    let result = |value: f64| Ok(VocResult { candidate, value, se: 0.0, method: VocMethod::KgExact });
    if belief.variance(candidate) <= 0.0 {
        return result(0.0);
    }
    let alpha = argmax(&pst.root_action_values(belief.means()));
    let dir = belief.update_direction(candidate)?;
    let mut g = Pl::new(pst, belief.means(), dir.clone(), Target::RootMax);
    let mut h = Pl::new(pst, belief.means(), dir, Target::RootAction(alpha));
    let mut cuts: Vec<f64> = g.kinks().into_iter().chain(h.kinks()).map(|(z, _)| z).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    // Each piece is evaluated at an interior point, away from the kinks.
    let mut total = 0.0;
    for k in 0..=cuts.len() {
        let l = if k == 0 { f64::NEG_INFINITY } else { cuts[k - 1] };
        let r = cuts.get(k).copied().unwrap_or(f64::INFINITY);
        let zm = match (l.is_finite(), r.is_finite()) {
            (true, true) => 0.5 * (l + r),
            (true, false) => l + 1.0,
            (false, true) => r - 1.0,
            (false, false) => 0.0,
        };
        let (gl, hl) = (g.eval(zm, true), h.eval(zm, true));
        let (a, b) = (gl.value - hl.value, gl.slope - hl.slope);
        if a == 0.0 && b == 0.0 {
            continue;
        }
        total += linear_piece_mass(a, b, zm, l, r);
    }
    result(total.max(0.0))
}

/// The four partial derivatives composing `∂λ/∂n` for one leaf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPartials {
    pub dlambda_dsigma: f64,
    pub dsigma_dn: f64,
    pub dlambda_dmu: f64,
    pub dmu_dn: f64,
}

impl LambdaPartials {
    pub fn dlambda_dn(&self) -> f64 {
        self.dlambda_dsigma * self.dsigma_dn + self.dlambda_dmu * self.dmu_dn
    }
}

/// Posterior mean and standard deviation of a leaf after `n` (possibly
/// fractional) observations with empirical mean `obs_mean`.
pub fn posterior_after(prior_mean: f64, prior_var: f64, noise_var: f64, n: f64, obs_mean: f64) -> (f64, f64) {
    let denom = n * prior_var + noise_var;
    let mean = (noise_var * prior_mean + n * prior_var * obs_mean) / denom;
    (mean, (prior_var * noise_var / denom).sqrt())
}

/// Partials of `E[(Z - c)^+]` with `Z ~ N(μ, σ²)` and of the conjugate
/// posterior `(μ, σ)` with respect to the observation count `n`.
pub fn lambda_partials(
    prior_mean: f64,
    prior_var: f64,
    noise_var: f64,
    n: f64,
    obs_mean: f64,
    c: f64,
) -> LambdaPartials {
    let (mu, sigma) = posterior_after(prior_mean, prior_var, noise_var, n, obs_mean);
    let (dlambda_dsigma, dlambda_dmu) = if sigma > 0.0 {
        let z = (mu - c) / sigma;
        (std_pdf(z), std_cdf(z))
    } else {
        (0.0, if mu > c { 1.0 } else { 0.0 })
    };
    let denom = n * prior_var + noise_var;
    let s0 = prior_var.sqrt();
    let s = noise_var.sqrt();
    LambdaPartials {
        dlambda_dsigma,
        dsigma_dn: -s * s0 * s0 * s0 / (2.0 * denom.powf(1.5)),
        dlambda_dmu,
        dmu_dn: noise_var * prior_var * (obs_mean - prior_mean) / (denom * denom),
    }
}

/// Sensitivity of the dynamic-value bound to one more observation of each
/// leaf, with `c` solved once for the current belief.
#[derive(Debug, Clone)]
pub struct LambdaSensitivity {
    pub c: f64,
    pub lambda: f64,
    summaries: Vec<LeafGaussian>,
}

impl LambdaSensitivity {
    /// Requires deterministic transitions and an isotropic belief.
    pub fn new<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief) -> Result<Self> {
        if !pst.is_deterministic() {
            return Err(Error::RequiresDeterministic("the lambda sensitivity proxy"));
        }
        if !belief.is_isotropic() {
            return Err(Error::RequiresIsotropic("the lambda sensitivity proxy"));
        }
        let summaries = leaf_summaries(pst, belief, pst.root())?;
        let cb = optimal_c(&summaries)?;
        Ok(Self { c: cb.c, lambda: cb.lambda, summaries })
    }

    /// Partials for leaf `candidate`, expressed on the flat term `Z` that
    /// contains it (so the `μ` and `σ` derivatives carry the path scale).
    pub fn partials(&self, belief: &Belief, candidate: usize) -> Result<LambdaPartials> {
        belief.check_leaf(candidate)?;
        let Some(term) = self.summaries.iter().find(|s| s.leaf == Some(candidate)) else {
            return Ok(LambdaPartials { dlambda_dsigma: 0.0, dsigma_dn: 0.0, dlambda_dmu: 0.0, dmu_dn: 0.0 });
        };
        let prior = belief.prior();
        let (m0, v0) = (prior.mean()[candidate], prior.variance(candidate));
        let n = belief.count(candidate) as f64;
        let obs = belief.empirical_mean(candidate).unwrap_or(m0);
        let offset = term.mean - term.scale * belief.mean(candidate);
        // Solve on the leaf scale, then map through Z = offset + scale Q.
        let c_leaf = if term.scale > 0.0 { (self.c - offset) / term.scale } else { f64::INFINITY };
        let p = lambda_partials(m0, v0, belief.noise_var(), n, obs, c_leaf);
        Ok(LambdaPartials {
            dlambda_dsigma: p.dlambda_dsigma,
            dsigma_dn: term.scale * p.dsigma_dn,
            dlambda_dmu: p.dlambda_dmu,
            dmu_dn: term.scale * p.dmu_dn,
        })
    }

    /// Proxy score `-∂λ/∂n`; larger means a larger expected tightening.
    pub fn score(&self, belief: &Belief, candidate: usize) -> Result<VocResult> {
        let p = self.partials(belief, candidate)?;
        Ok(VocResult { candidate, value: -p.dlambda_dn(), se: 0.0, method: VocMethod::LambdaSensitivity })
    }
}

/// Dynamic VOC proxy of one candidate.
pub fn voc_dynamic_proxy<S: Clone>(pst: &PartialSearchTree<S>, belief: &Belief, candidate: usize) -> Result<VocResult> {
    check(pst, belief, candidate)?;
    LambdaSensitivity::new(pst, belief)?.score(belief, candidate)
}

/// Sample sizes for nested Monte Carlo over dynamic values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsiMcConfig {
    /// Predictive outcomes drawn for the candidate.
    pub outer: usize,
    /// Posterior draws per outcome (rounded up to an even count).
    pub inner: usize,
    /// Draws for the current dynamic values.
    pub baseline: usize,
}

impl Default for PsiMcConfig {
    fn default() -> Self {
        Self { outer: 128, inner: 64, baseline: 2048 }
    }
}

/// Nested Monte Carlo estimates around one candidate computation.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicVocEstimate {
    /// Current dynamic root action values.
    pub baseline: Vec<Estimate>,
    /// Expected post-computation dynamic root action values.
    pub posterior: Vec<Estimate>,
    /// `E[max_a ψ'(a)] - max_a ψ(a)`.
    pub voc: Estimate,
    /// `E[max_a ψ'(a) - ψ'(α)]` with `α` the current argmax.
    pub voc_prime: Estimate,
    /// `voc - voc_prime`, estimated from shared draws.
    pub difference: Estimate,
}

/// Dynamic VOC and VOC′ by nested Monte Carlo. Post-outcome draws use
/// `Q' = Q + Σ_i/(Σ_ii + σ²) (o - Q_i - ε)`, which samples the updated
/// posterior exactly without refactorising it.
pub fn voc_dynamic_mc<S: Clone, R: Rng + ?Sized>(
    pst: &PartialSearchTree<S>,
    belief: &Belief,
    candidate: usize,
    config: &PsiMcConfig,
    rng: &mut R,
) -> Result<DynamicVocEstimate> {
    check(pst, belief, candidate)?;
    if config.outer < 2 || config.inner < 1 || config.baseline < 2 {
        return Err(Error::InvalidParameter("nested Monte Carlo needs outer >= 2, baseline >= 2".into()));
    }
    let sampler = belief.sampler()?;
    // α is chosen on one batch and valued on another: reusing the draws would
    // bias ψ(α) upward whenever actions are close.
    let alpha = crate::values::dynamic_root_values(pst, &sampler, config.baseline, rng)?.argmax();
    let base = crate::values::dynamic_root_values(pst, &sampler, config.baseline, rng)?;
    let k = pst.root_actions();
    let base_max = base.actions[alpha];

    let m = pst.num_leaves();
    let noise_var = belief.noise_var();
    let pred_sd = (belief.variance(candidate) + noise_var).sqrt();
    let gain: Vec<f64> = (0..m).map(|j| belief.covariance(j, candidate) / (pred_sd * pred_sd)).collect();
    let noise_sd = noise_var.sqrt();

    let (mut plus, mut minus) = (vec![0.0; m], vec![0.0; m]);
    let (mut buf, mut qa, mut qb) = (Vec::new(), Vec::new(), Vec::new());
    let mut post_acc = vec![Accumulator::default(); k];
    let (mut voc_acc, mut prime_acc, mut diff_acc) =
        (Accumulator::default(), Accumulator::default(), Accumulator::default());
    let mut inner = vec![0.0; k];
    for _ in 0..config.outer {
        let z: f64 = StandardNormal.sample(rng);
        let outcome = belief.mean(candidate) + pred_sd * z;
        inner.iter_mut().for_each(|x| *x = 0.0);
        let pairs = config.inner.div_ceil(2);
        for _ in 0..pairs {
            sampler.draw_pair(rng, &mut plus, &mut minus);
            let e: f64 = StandardNormal.sample(rng);
            let eps = noise_sd * e;
            let (ip, im) = (outcome - plus[candidate] - eps, outcome - minus[candidate] + eps);
            for j in 0..m {
                plus[j] += gain[j] * ip;
                minus[j] += gain[j] * im;
            }
            pst.root_action_values_into(&plus, &mut buf, &mut qa);
            pst.root_action_values_into(&minus, &mut buf, &mut qb);
            for a in 0..k {
                inner[a] += 0.5 * (qa[a] + qb[a]);
            }
        }
        inner.iter_mut().for_each(|x| *x /= pairs as f64);
        let best = inner.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for a in 0..k {
            post_acc[a].push(inner[a]);
        }
        voc_acc.push(best - base_max.mean);
        prime_acc.push(best - inner[alpha]);
        diff_acc.push(inner[alpha]);
    }
    let with_baseline = |e: Estimate| Estimate { mean: e.mean, se: (e.se * e.se + base_max.se * base_max.se).sqrt() };
    let diff = diff_acc.estimate();
    Ok(DynamicVocEstimate {
        baseline: base.actions.clone(),
        posterior: post_acc.iter().map(|a| a.estimate()).collect(),
        voc: with_baseline(voc_acc.estimate()),
        voc_prime: prime_acc.estimate(),
        difference: with_baseline(Estimate { mean: diff.mean - base_max.mean, se: diff.se }),
    })
}

/// Dynamic VOC by nested Monte Carlo, as a scored candidate.
pub fn voc_dynamic_mc_score<S: Clone, R: Rng + ?Sized>(
    pst: &PartialSearchTree<S>,
    belief: &Belief,
    candidate: usize,
    config: &PsiMcConfig,
    rng: &mut R,
) -> Result<VocResult> {
    let est = voc_dynamic_mc(pst, belief, candidate, config, rng)?;
    Ok(VocResult { candidate, value: est.voc.mean, se: est.voc.se, method: VocMethod::MonteCarlo })
}

/// VOC′ for static (exact) or dynamic (nested Monte Carlo) values.
pub fn voc_prime<S: Clone, R: Rng + ?Sized>(
    pst: &PartialSearchTree<S>,
    belief: &Belief,
    candidate: usize,
    kind: ValueKind,
    config: &PsiMcConfig,
    rng: &mut R,
) -> Result<Estimate> {
    match kind {
        ValueKind::Static => voc_prime_static(pst, belief, candidate).map(|r| Estimate::exact(r.value)),
        ValueKind::Dynamic => {
            check(pst, belief, candidate)?;
            if belief.variance(candidate) <= 0.0 {
                return Ok(Estimate::exact(0.0));
            }
            voc_dynamic_mc(pst, belief, candidate, config, rng).map(|e| e.voc_prime)
        }
    }
}

/// Bayesian simple regret `E[max_a Υ(root, a)] - max_a f(root, a)`.
pub fn bayesian_simple_regret<S: Clone, R: Rng + ?Sized>(
    pst: &PartialSearchTree<S>,
    belief: &Belief,
    kind: ValueKind,
    samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if pst.num_leaves() != belief.dim() {
        return Err(Error::DimensionMismatch { expected: pst.num_leaves(), found: belief.dim() });
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("regret needs at least 2 samples".into()));
    }
    let sampler = belief.sampler()?;
    let m = pst.num_leaves();
    let k = pst.root_actions();
    let (mut plus, mut minus) = (vec![0.0; m], vec![0.0; m]);
    let (mut buf, mut qa, mut qb) = (Vec::new(), Vec::new(), Vec::new());
    // Per antithetic pair: averaged action values and averaged maximum.
    let mut draws: Vec<(Vec<f64>, f64)> = Vec::with_capacity(samples.div_ceil(2));
    for _ in 0..samples.div_ceil(2) {
        sampler.draw_pair(rng, &mut plus, &mut minus);
        pst.root_action_values_into(&plus, &mut buf, &mut qa);
        pst.root_action_values_into(&minus, &mut buf, &mut qb);
        let ma = qa.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mb = qb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let avg: Vec<f64> = (0..k).map(|a| 0.5 * (qa[a] + qb[a])).collect();
        draws.push((avg, 0.5 * (ma + mb)));
    }
    let reference = match kind {
        ValueKind::Static => {
            let phi = pst.root_action_values(belief.means());
            let alpha = argmax(&phi);
            return Ok({
                let mut acc = Accumulator::default();
                draws.iter().for_each(|(_, mx)| acc.push(mx - phi[alpha]));
                acc.estimate()
            });
        }
        ValueKind::Dynamic => {
            let n = draws.len() as f64;
            let psi: Vec<f64> = (0..k).map(|a| draws.iter().map(|(v, _)| v[a]).sum::<f64>() / n).collect();
            argmax(&psi)
        }
    };
    let mut acc = Accumulator::default();
    draws.iter().for_each(|(v, mx)| acc.push(mx - v[reference]));
    Ok(acc.estimate())
}
