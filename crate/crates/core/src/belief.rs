//! Normal beliefs over leaf values and their conjugate updates.
//!
//! Outcomes of a computation on leaf `i` are modelled as `Q_i + ε` with
//! `ε ~ N(0, σ²)` i.i.d. Under an isotropic (diagonal) prior each leaf keeps
//! its own sufficient statistics and updates in O(1); under a full prior
//! covariance the mean and covariance take a rank-one Kalman update in O(m²).

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gaussian::Normal;
use crate::pst::{NodeKind, PartialSearchTree};

/// Largest diagonal jitter accepted when checking a covariance for PSD.
pub const MAX_PRIOR_JITTER: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum PriorCovariance {
    /// Independent leaves with the given variances.
    Isotropic(Vec<f64>),
    Full(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    mean: Vec<f64>,
    covariance: PriorCovariance,
    noise_var: f64,
}

impl Prior {
    pub fn isotropic(mean: Vec<f64>, variances: Vec<f64>, noise_var: f64) -> Result<Self> {
        if mean.len() != variances.len() {
            return Err(Error::DimensionMismatch { expected: mean.len(), found: variances.len() });
        }
        if let Some(&v) = variances.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("prior variance {v}")));
        }
        Self::checked(mean, PriorCovariance::Isotropic(variances), noise_var)
    }

    /// Identical independent priors on `m` leaves.
    pub fn uniform(m: usize, mean: f64, variance: f64, noise_var: f64) -> Result<Self> {
        Self::isotropic(vec![mean; m], vec![variance; m], noise_var)
    }

    pub fn correlated(mean: Vec<f64>, covariance: DMatrix<f64>, noise_var: f64) -> Result<Self> {
        let m = mean.len();
        if covariance.nrows() != m || covariance.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: covariance.nrows() });
        }
        for i in 0..m {
            for j in 0..i {
                let (a, b) = (covariance[(i, j)], covariance[(j, i)]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidParameter("prior covariance is not symmetric".into()));
                }
            }
        }
        cholesky_with_jitter(&covariance, MAX_PRIOR_JITTER)?;
        Self::checked(mean, PriorCovariance::Full(covariance), noise_var)
    }

    fn checked(mean: Vec<f64>, covariance: PriorCovariance, noise_var: f64) -> Result<Self> {
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise variance {noise_var}")));
        }
        if let Some(&v) = mean.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(v));
        }
        Ok(Self { mean, covariance, noise_var })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &PriorCovariance {
        &self.covariance
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn variance(&self, i: usize) -> f64 {
        match &self.covariance {
            PriorCovariance::Isotropic(v) => v[i],
            PriorCovariance::Full(c) => c[(i, i)],
        }
    }
}

/// One performed computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub leaf: usize,
    pub outcome: f64,
    pub time: usize,
}

/// The append-only sequence of performed computations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeState {
    observations: Vec<Observation>,
}

impl KnowledgeState {
    pub fn push(&mut self, obs: Observation) -> Result<()> {
        if let Some(last) = self.observations.last() {
            if obs.time <= last.time {
                return Err(Error::InvalidParameter(format!(
                    "observation time {} not after {}",
                    obs.time, last.time
                )));
            }
        }
        self.observations.push(obs);
        Ok(())
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Posterior {
    Diagonal(Vec<f64>),
    Full(DMatrix<f64>),
}

/// Posterior over leaf values given the knowledge state.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    prior: Prior,
    mean: Vec<f64>,
    posterior: Posterior,
    counts: Vec<u32>,
    sums: Vec<f64>,
    knowledge: KnowledgeState,
}

impl Belief {
    pub fn new(prior: Prior) -> Self {
        let posterior = match prior.covariance() {
            PriorCovariance::Isotropic(v) => Posterior::Diagonal(v.clone()),
            PriorCovariance::Full(c) => Posterior::Full(c.clone()),
        };
        let m = prior.dim();
        Self {
            mean: prior.mean().to_vec(),
            posterior,
            counts: vec![0; m],
            sums: vec![0.0; m],
            knowledge: KnowledgeState::default(),
            prior,
        }
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self.posterior, Posterior::Diagonal(_))
    }

    pub fn noise_var(&self) -> f64 {
        self.prior.noise_var
    }

    /// Number of performed computations.
    pub fn time(&self) -> usize {
        self.knowledge.len()
    }

    pub fn knowledge(&self) -> &KnowledgeState {
        &self.knowledge
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    pub fn means(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance(&self, i: usize) -> f64 {
        match &self.posterior {
            Posterior::Diagonal(v) => v[i],
            Posterior::Full(c) => c[(i, i)].max(0.0),
        }
    }

    pub fn variances(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.variance(i)).collect()
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        match &self.posterior {
            Posterior::Diagonal(v) => {
                if i == j {
                    v[i]
                } else {
                    0.0
                }
            }
            Posterior::Full(c) => c[(i, j)],
        }
    }

    /// Full posterior covariance matrix.
    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        match &self.posterior {
            Posterior::Diagonal(v) => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v.clone())),
            Posterior::Full(c) => c.clone(),
        }
    }

    pub fn count(&self, i: usize) -> u32 {
        self.counts[i]
    }

    /// Empirical mean of the outcomes observed on leaf `i`.
    pub fn empirical_mean(&self, i: usize) -> Option<f64> {
        (self.counts[i] > 0).then(|| self.sums[i] / self.counts[i] as f64)
    }

    pub fn check_leaf(&self, i: usize) -> Result<()> {
        if i < self.dim() {
            Ok(())
        } else {
            Err(Error::InvalidCandidate { index: i, count: self.dim() })
        }
    }

    /// Conditions on `outcome` observed for leaf `i`.
    pub fn update(&mut self, i: usize, outcome: f64) -> Result<()> {
        self.check_leaf(i)?;
        if !outcome.is_finite() {
            return Err(Error::NonFinite(outcome));
        }
        let time = self.knowledge.len() + 1;
        self.knowledge.push(Observation { leaf: i, outcome, time })?;
        self.counts[i] += 1;
        self.sums[i] += outcome;
        let noise = self.prior.noise_var;
        match &mut self.posterior {
            Posterior::Diagonal(var) => {
                let v0 = self.prior.variance(i);
                if v0 > 0.0 {
                    let precision = 1.0 / v0 + self.counts[i] as f64 / noise;
                    self.mean[i] = (self.prior.mean[i] / v0 + self.sums[i] / noise) / precision;
                    var[i] = 1.0 / precision;
                }
            }
            Posterior::Full(cov) => {
                let s = cov[(i, i)].max(0.0) + noise;
                let col: Vec<f64> = cov.column(i).iter().copied().collect();
                let innovation = outcome - self.mean[i];
                for (mj, cj) in self.mean.iter_mut().zip(&col) {
                    *mj += cj / s * innovation;
                }
                let m = col.len();
                for c in 0..m {
                    for r in 0..m {
                        cov[(r, c)] -= col[r] * col[c] / s;
                    }
                }
                for j in 0..m {
                    if cov[(j, j)] < 0.0 {
                        cov[(j, j)] = 0.0;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn updated(&self, i: usize, outcome: f64) -> Result<Self> {
        let mut b = self.clone();
        b.update(i, outcome)?;
        Ok(b)
    }

    /// Predictive distribution of the next outcome on leaf `i`.
    pub fn predictive_outcome(&self, i: usize) -> Result<Normal> {
        self.check_leaf(i)?;
        Ok(Normal::new(self.mean[i], self.variance(i) + self.prior.noise_var))
    }

    /// Change of the posterior mean vector per standard deviation of the
    /// predictive outcome on leaf `i`: after observing outcome
    /// `o = μ_i + sd_pred · z`, the new means are `μ + z · direction`.
    pub fn update_direction(&self, i: usize) -> Result<Vec<f64>> {
        self.check_leaf(i)?;
        let s = (self.variance(i) + self.prior.noise_var).sqrt();
        Ok(match &self.posterior {
            Posterior::Diagonal(v) => {
                let mut d = vec![0.0; self.dim()];
                d[i] = v[i] / s;
                d
            }
            Posterior::Full(c) => c.column(i).iter().map(|x| x / s).collect(),
        })
    }

    /// Joint sampler of leaf values from this posterior.
    pub fn sampler(&self) -> Result<JointSampler> {
        let factor = match &self.posterior {
            Posterior::Diagonal(v) => Factor::Diagonal(v.iter().map(|x| x.max(0.0).sqrt()).collect()),
            Posterior::Full(c) => Factor::Lower(cholesky_with_jitter(c, 1e-6)?),
        };
        Ok(JointSampler { mean: self.mean.clone(), factor })
    }
}

#[derive(Debug, Clone)]
enum Factor {
    Diagonal(Vec<f64>),
    Lower(DMatrix<f64>),
}

/// Draws joint leaf values `μ + L z` with a factor computed once.
#[derive(Debug, Clone)]
pub struct JointSampler {
    mean: Vec<f64>,
    factor: Factor,
}

impl JointSampler {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Writes an antithetic pair `μ + Lz`, `μ - Lz` into `plus`/`minus`.
    pub fn draw_pair<R: Rng + ?Sized>(&self, rng: &mut R, plus: &mut [f64], minus: &mut [f64]) {
        let m = self.mean.len();
        match &self.factor {
            Factor::Diagonal(sd) => {
                for i in 0..m {
                    let z: f64 = StandardNormal.sample(rng);
                    let d = sd[i] * z;
                    plus[i] = self.mean[i] + d;
                    minus[i] = self.mean[i] - d;
                }
            }
            Factor::Lower(l) => {
                let z: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
                for i in 0..m {
                    let mut d = 0.0;
                    for k in 0..=i {
                        d += l[(i, k)] * z[k];
                    }
                    plus[i] = self.mean[i] + d;
                    minus[i] = self.mean[i] - d;
                }
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let mut scratch = vec![0.0; self.mean.len()];
        self.draw_pair(rng, out, &mut scratch);
    }
}

/// Lower Cholesky factor, adding diagonal jitter (up to `max_jitter`) if the
/// matrix is only numerically semi-definite.
pub fn cholesky_with_jitter(cov: &DMatrix<f64>, max_jitter: f64) -> Result<DMatrix<f64>> {
    let m = cov.nrows();
    let mut jitter = 0.0;
    loop {
        let mut a = cov.clone();
        for i in 0..m {
            a[(i, i)] += jitter;
        }
        if let Some(ch) = a.cholesky() {
            return Ok(ch.l());
        }
        jitter = if jitter == 0.0 { 1e-14 } else { jitter * 10.0 };
        if jitter > max_jitter {
            return Err(Error::NotPositiveDefinite);
        }
    }
}

/// RBF kernel over leaf positions `0..m`:
/// `Σ[i][j] = variance · exp(-(i-j)² / (2 scale²))`.
pub fn rbf_covariance(m: usize, scale: f64, variance: f64) -> Result<DMatrix<f64>> {
    if m == 0 {
        return Err(Error::InvalidParameter("RBF kernel over zero leaves".into()));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("RBF scale {scale}")));
    }
    if !(variance >= 0.0) {
        return Err(Error::InvalidParameter(format!("RBF variance {variance}")));
    }
    Ok(DMatrix::from_fn(m, m, |i, j| {
        let d = i as f64 - j as f64;
        variance * (-d * d / (2.0 * scale * scale)).exp()
    }))
}

/// Covariance in which leaves sharing a frontier state have correlation
/// `rho` and all other pairs are independent.
pub fn sibling_covariance<S: Clone>(pst: &PartialSearchTree<S>, variance: f64, rho: f64) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("sibling correlation {rho}")));
    }
    let m = pst.num_leaves();
    let mut cov = DMatrix::from_diagonal_element(m, m, variance);
    for node in pst.nodes() {
        if let NodeKind::Frontier { leaves } = &node.kind {
            for &i in leaves {
                for &j in leaves {
                    if i != j {
                        cov[(i, j)] = rho * variance;
                    }
                }
            }
        }
    }
    Ok(cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fresh_belief_equals_prior() {
        let prior = Prior::uniform(4, 0.5, 1.0, 0.1).unwrap();
        let b = Belief::new(prior);
        assert_eq!(b.means(), &[0.5; 4]);
        assert_eq!(b.variances(), vec![1.0; 4]);
        assert_eq!(b.time(), 0);

        let cov = rbf_covariance(3, 1.0, 2.0).unwrap();
        let b = Belief::new(Prior::correlated(vec![0.0; 3], cov.clone(), 1.0).unwrap());
        assert_eq!(b.covariance_matrix(), cov);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(matches!(
            Prior::isotropic(vec![0.0; 3], vec![1.0; 4], 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        let cov = rbf_covariance(3, 1.0, 1.0).unwrap();
        assert!(Prior::correlated(vec![0.0; 4], cov, 1.0).is_err());
        assert!(Prior::uniform(2, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn equal_precision_conjugate_update() {
        let mut b = Belief::new(Prior::uniform(1, 0.0, 1.0, 1.0).unwrap());
        b.update(0, 2.0).unwrap();
        assert_relative_eq!(b.mean(0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(b.variance(0), 0.5, epsilon = 1e-15);
        let p = b.predictive_outcome(0).unwrap();
        assert_relative_eq!(p.variance, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn known_leaf_never_moves() {
        let mut b = Belief::new(Prior::isotropic(vec![0.9], vec![0.0], 1.0).unwrap());
        b.update(0, -5.0).unwrap();
        assert_eq!(b.mean(0), 0.9);
        assert_eq!(b.variance(0), 0.0);
        assert_eq!(b.predictive_outcome(0).unwrap().variance, 1.0);
    }

    #[test]
    fn rejects_bad_updates() {
        let mut b = Belief::new(Prior::uniform(2, 0.0, 1.0, 1.0).unwrap());
        assert!(matches!(b.update(0, f64::NAN), Err(Error::NonFinite(_))));
        assert!(matches!(b.update(2, 0.0), Err(Error::InvalidCandidate { .. })));
        assert_eq!(b.time(), 0);
    }

    #[test]
    fn correlated_update_shifts_neighbour() {
        let (s0, s1, rho, noise) = (1.0f64, 0.8f64, 0.9, 0.5);
        let cov = DMatrix::from_row_slice(2, 2, &[s0 * s0, rho * s0 * s1, rho * s0 * s1, s1 * s1]);
        let mut b = Belief::new(Prior::correlated(vec![0.0, 0.0], cov, noise).unwrap());
        b.update(0, 1.5).unwrap();
        let expected = rho * s0 * s1 / (s0 * s0 + noise) * 1.5;
        assert_relative_eq!(b.mean(1), expected, epsilon = 1e-14);
    }

    #[test]
    fn rbf_reference_values() {
        let k = rbf_covariance(2, 1.0, 1.0).unwrap();
        assert_eq!(k[(0, 0)], 1.0);
        assert_relative_eq!(k[(0, 1)], (-0.5f64).exp(), epsilon = 1e-15);
        let tiny = rbf_covariance(5, 1e-3, 1.0).unwrap();
        assert_eq!(tiny, DMatrix::identity(5, 5));
        assert!(rbf_covariance(3, 0.0, 1.0).is_err());
        assert!(rbf_covariance(3, -1.0, 1.0).is_err());
    }

    #[test]
    fn rbf_128_is_positive_definite() {
        let k = rbf_covariance(128, 1.0, 1.0).unwrap();
        let eig = k.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0, "min eigenvalue {min}");
        assert!(cholesky_with_jitter(&k, 1e-9).is_ok());
    }

    #[test]
    fn knowledge_state_times_increase() {
        let mut ks = KnowledgeState::default();
        ks.push(Observation { leaf: 0, outcome: 1.0, time: 1 }).unwrap();
        assert!(ks.push(Observation { leaf: 0, outcome: 1.0, time: 1 }).is_err());
        let mut b = Belief::new(Prior::uniform(2, 0.0, 1.0, 1.0).unwrap());
        b.update(1, 0.3).unwrap();
        b.update(0, 0.1).unwrap();
        let times: Vec<usize> = b.knowledge().observations().iter().map(|o| o.time).collect();
        assert_eq!(times, vec![1, 2]);
    }

    #[test]
    fn sampler_moments() {
        let cov = rbf_covariance(3, 1.0, 2.0).unwrap();
        let b = Belief::new(Prior::correlated(vec![1.0, 0.0, -1.0], cov.clone(), 1.0).unwrap());
        let s = b.sampler().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let (mut p, mut q) = (vec![0.0; 3], vec![0.0; 3]);
        let mut c01 = 0.0;
        let mut m0 = 0.0;
        for _ in 0..n {
            s.draw_pair(&mut rng, &mut p, &mut q);
            c01 += (p[0] - 1.0) * p[1];
            m0 += p[0] + q[0];
        }
        assert_relative_eq!(m0 / (2.0 * n as f64), 1.0, epsilon = 1e-12);
        assert!((c01 / n as f64 - cov[(0, 1)]).abs() < 0.03);
    }
}
