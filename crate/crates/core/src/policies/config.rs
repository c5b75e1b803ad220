//! Policy configuration.

use std::fmt;
use std::str::FromStr;

use crate::belief::{rbf_covariance, sibling_covariance, Prior};
use crate::error::{Error, Result};
use crate::mdp::Mdp;
use crate::pst::PartialSearchTree;
use crate::voc::PsiMcConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Uct,
    BayesUct,
    Thompson,
    Voi,
    VocPhi,
    VocPsi,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] =
        [PolicyKind::Uct, PolicyKind::BayesUct, PolicyKind::Thompson, PolicyKind::Voi, PolicyKind::VocPhi, PolicyKind::VocPsi];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Uct => "uct",
            PolicyKind::BayesUct => "bayes-uct",
            PolicyKind::Thompson => "thompson",
            PolicyKind::Voi => "voi",
            PolicyKind::VocPhi => "voc-phi",
            PolicyKind::VocPsi => "voc-psi",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::UnknownPolicy(s.to_string()))
    }
}

/// Covariance structure of the leaf prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Isotropic,
    /// RBF over leaf indices (breadth-first order).
    Rbf { scale: f64 },
    /// Correlation `rho` between leaves of the same frontier state.
    Siblings { rho: f64 },
}

/// Normal prior over leaf values: mean `value_hint(state) + shift`, the
/// given variance and kernel, and Normal outcome noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafPrior {
    pub shift: f64,
    pub variance: f64,
    pub noise_var: f64,
    pub kernel: Kernel,
}

impl LeafPrior {
    pub fn build<M: Mdp>(&self, mdp: &M, pst: &PartialSearchTree<M::State>) -> Result<Prior> {
        let m = pst.num_leaves();
        let mean: Vec<f64> = (0..m).map(|i| mdp.value_hint(pst.leaf_state(i)) + self.shift).collect();
        match self.kernel {
            Kernel::Isotropic => Prior::isotropic(mean, vec![self.variance; m], self.noise_var),
            Kernel::Rbf { scale } => Prior::correlated(mean, rbf_covariance(m, scale, self.variance)?, self.noise_var),
            Kernel::Siblings { rho } => {
                Prior::correlated(mean, sibling_covariance(pst, self.variance, rho)?, self.noise_var)
            }
        }
    }

    /// Same prior with independent leaves.
    pub fn isotropic(self) -> Self {
        Self { kernel: Kernel::Isotropic, ..self }
    }
}

/// How VOC-greedy scores candidates under dynamic values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiMode {
    /// λ-sensitivity where applicable, nested Monte Carlo otherwise.
    Auto,
    Proxy,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    /// Partial search tree height (Bayes-UCT and VOC-greedy; VOI uses 1).
    pub height: usize,
    pub prior: LeafPrior,
    /// Exploration constant of the policy's own selection rule.
    pub c: f64,
    /// Exploration constant of the UCT sampler below the partial search tree.
    pub base_c: f64,
    /// Stop once the best exact VOC falls to this value or below it; 0 stops
    /// only when no computation has positive value.
    pub epsilon: f64,
    /// Samples for the final dynamic-value decision.
    pub psi_samples: usize,
    pub psi_mode: PsiMode,
    pub psi_mc: PsiMcConfig,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            height: if kind == PolicyKind::Voi { 1 } else { 4 },
            prior: LeafPrior { shift: 0.5, variance: 1.0, noise_var: 0.1, kernel: Kernel::Isotropic },
            c: 1.0,
            base_c: 1.0,
            epsilon: 0.0,
            psi_samples: crate::values::DEFAULT_PSI_SAMPLES,
            psi_mode: PsiMode::Auto,
            psi_mc: PsiMcConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{}: {what}", self.kind)));
        if self.height == 0 {
            return bad("height must be at least 1");
        }
        if !(self.prior.variance >= 0.0) || !(self.prior.noise_var > 0.0) {
            return bad("prior variances");
        }
        if !(self.c >= 0.0) || !(self.base_c >= 0.0) {
            return bad("exploration constants must be non-negative");
        }
        if self.psi_samples < 1 {
            return bad("psi_samples must be at least 1");
        }
        Ok(())
    }

    /// Sets one parameter from a `key = value` pair (keys as in grid files,
    /// without the policy prefix).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad value `{v}` for `{key}`")))
        }
        match key {
            "height" => self.height = num(key, value)?,
            "c" => self.c = num(key, value)?,
            "base_c" => self.base_c = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "psi_samples" => self.psi_samples = num(key, value)?,
            "prior.shift" => self.prior.shift = num(key, value)?,
            "prior.variance" => self.prior.variance = num(key, value)?,
            "prior.noise_var" => self.prior.noise_var = num(key, value)?,
            "prior.kernel" => {
                self.prior.kernel = match value.trim() {
                    "isotropic" => Kernel::Isotropic,
                    "rbf" => Kernel::Rbf { scale: 1.0 },
                    "siblings" => Kernel::Siblings { rho: 0.5 },
                    other => return Err(Error::InvalidParameter(format!("unknown kernel `{other}`"))),
                }
            }
            "prior.scale" => match &mut self.prior.kernel {
                Kernel::Rbf { scale } => *scale = num(key, value)?,
                _ => return Err(Error::InvalidParameter("prior.scale needs prior.kernel = rbf".into())),
            },
            "prior.rho" => match &mut self.prior.kernel {
                Kernel::Siblings { rho } => *rho = num(key, value)?,
                _ => return Err(Error::InvalidParameter("prior.rho needs prior.kernel = siblings".into())),
            },
            "psi_mode" => {
                self.psi_mode = match value.trim() {
                    "auto" => PsiMode::Auto,
                    "proxy" => PsiMode::Proxy,
                    "mc" => PsiMode::MonteCarlo,
                    other => return Err(Error::InvalidParameter(format!("unknown psi_mode `{other}`"))),
                }
            }
            "mc.outer" => self.psi_mc.outer = num(key, value)?,
            "mc.inner" => self.psi_mc.inner = num(key, value)?,
            "mc.baseline" => self.psi_mc.baseline = num(key, value)?,
            _ => return Err(Error::InvalidParameter(format!("unknown parameter `{key}` for {}", self.kind))),
        }
        Ok(())
    }

    /// One-line `key=value` description of the tunable parameters.
    pub fn describe(&self) -> String {
        let kernel = match self.prior.kernel {
            Kernel::Isotropic => "isotropic".to_string(),
            Kernel::Rbf { scale } => format!("rbf(scale={scale})"),
            Kernel::Siblings { rho } => format!("siblings(rho={rho})"),
        };
        format!(
            "{} height={} c={} base_c={} prior.shift={} prior.variance={} prior.noise_var={} prior.kernel={}",
            self.kind, self.height, self.c, self.base_c, self.prior.shift, self.prior.variance, self.prior.noise_var, kernel
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in PolicyKind::ALL {
            assert_eq!(k.name().parse::<PolicyKind>().unwrap(), k);
        }
        assert!(matches!("mcts".parse::<PolicyKind>(), Err(Error::UnknownPolicy(_))));
    }

    #[test]
    fn set_parameters() {
        let mut c = PolicyConfig::new(PolicyKind::VocPhi);
        c.set("prior.kernel", "rbf").unwrap();
        c.set("prior.scale", "2.5").unwrap();
        c.set("c", "0.5").unwrap();
        assert_eq!(c.prior.kernel, Kernel::Rbf { scale: 2.5 });
        assert_eq!(c.c, 0.5);
        assert!(c.set("prior.rho", "0.3").is_err());
        assert!(c.set("nonsense", "1").is_err());
        assert!(c.set("height", "x").is_err());
        c.height = 0;
        assert!(c.validate().is_err());
    }
}
