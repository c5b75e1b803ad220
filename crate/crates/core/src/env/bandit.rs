//! Bandit-trees: complete binary trees whose leaves are noisy bandit arms.
//!
//! At every internal state the agent picks the desired subtree (`LEFT` = 0,
//! `RIGHT` = 1) and lands there with probability `p`, otherwise in the other
//! subtree. Rewards only arrive when an arm is pulled at the bottom.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::belief::{cholesky_with_jitter, rbf_covariance};
use crate::error::{Error, Result};
use crate::kv::KvFile;
use crate::mdp::{Mdp, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BanditNode {
    pub level: u8,
    /// Left-to-right position within the level.
    pub pos: u32,
}

impl BanditNode {
    fn index(self) -> usize {
        (1usize << self.level) - 1 + self.pos as usize
    }

    fn child(self, right: bool) -> Self {
        BanditNode { level: self.level + 1, pos: 2 * self.pos + right as u32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmKind {
    /// Arm means jointly Normal with an RBF kernel over arm positions.
    Correlated,
    /// Arm means independent uniform on `[0.45, 0.55]`.
    Uncorrelated,
}

/// Generation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditSpec {
    pub depth: usize,
    pub kind: ArmKind,
    pub p: f64,
    /// Variance of the Normal noise on each arm pull.
    pub noise_var: f64,
    pub rbf_scale: f64,
    pub rbf_variance: f64,
}

impl BanditSpec {
    pub fn correlated(depth: usize) -> Self {
        Self { depth, kind: ArmKind::Correlated, p: 0.75, noise_var: 0.1, rbf_scale: 1.0, rbf_variance: 1.0 }
    }

    pub fn uncorrelated(depth: usize) -> Self {
        Self { depth, kind: ArmKind::Uncorrelated, p: 0.75, noise_var: 0.01, rbf_scale: 1.0, rbf_variance: 1.0 }
    }
}

/// Draws bandit-trees from a spec; the correlated kind factorises its
/// kernel once.
#[derive(Debug, Clone)]
pub struct BanditGenerator {
    spec: BanditSpec,
    factor: Option<DMatrix<f64>>,
}

impl BanditGenerator {
    pub fn new(spec: BanditSpec) -> Result<Self> {
        if spec.depth == 0 || spec.depth > 24 {
            return Err(Error::InvalidDepth(spec.depth));
        }
        if !(spec.p > 0.5 && spec.p <= 1.0) {
            return Err(Error::InvalidParameter(format!("desired-transition probability {}", spec.p)));
        }
        if !(spec.noise_var > 0.0) {
            return Err(Error::InvalidParameter(format!("noise variance {}", spec.noise_var)));
        }
        let factor = match spec.kind {
            ArmKind::Correlated => {
                let k = rbf_covariance(1 << spec.depth, spec.rbf_scale, spec.rbf_variance)?;
                Some(cholesky_with_jitter(&k, 1e-9)?)
            }
            ArmKind::Uncorrelated => None,
        };
        Ok(Self { spec, factor })
    }

    pub fn spec(&self) -> &BanditSpec {
        &self.spec
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> BanditTree {
        let n = 1usize << self.spec.depth;
        let means = match &self.factor {
            Some(l) => {
                let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
                (0..n).map(|i| 0.5 + (0..=i).map(|k| l[(i, k)] * z[k]).sum::<f64>()).collect()
            }
            None => (0..n).map(|_| rng.random_range(0.45..=0.55)).collect(),
        };
        BanditTree::new(self.spec.depth, self.spec.p, means, self.spec.noise_var)
            .expect("generator parameters were validated")
    }
}

/// Bandit-tree drawn reproducibly from `seed`.
pub fn gen_bandit_tree(depth: usize, kind: ArmKind, seed: u64) -> Result<BanditTree> {
    let spec = match kind {
        ArmKind::Correlated => BanditSpec::correlated(depth),
        ArmKind::Uncorrelated => BanditSpec::uncorrelated(depth),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(BanditGenerator::new(spec)?.generate(&mut rng))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditTree {
    depth: usize,
    p: f64,
    means: Vec<f64>,
    noise_var: f64,
    noise_sd: f64,
    /// Optimal state values in level order.
    vstar: Vec<f64>,
}

impl BanditTree {
    pub fn new(depth: usize, p: f64, means: Vec<f64>, noise_var: f64) -> Result<Self> {
        if depth == 0 || depth > 24 {
            return Err(Error::InvalidDepth(depth));
        }
        if means.len() != 1 << depth {
            return Err(Error::DimensionMismatch { expected: 1 << depth, found: means.len() });
        }
        if !(p > 0.5 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!("desired-transition probability {p}")));
        }
        if !(noise_var >= 0.0) {
            return Err(Error::InvalidParameter(format!("noise variance {noise_var}")));
        }
        if let Some(&m) = means.iter().find(|m| !m.is_finite()) {
            return Err(Error::NonFinite(m));
        }
        let first_arm = (1 << depth) - 1;
        let mut vstar = vec![0.0; first_arm + means.len()];
        vstar[first_arm..].copy_from_slice(&means);
        for i in (0..first_arm).rev() {
            let (l, r) = (vstar[2 * i + 1], vstar[2 * i + 2]);
            vstar[i] = p * l.max(r) + (1.0 - p) * l.min(r);
        }
        Ok(Self { depth, p, means, noise_var, noise_sd: noise_var.sqrt(), vstar })
    }

    pub fn root(&self) -> BanditNode {
        BanditNode { level: 0, pos: 0 }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn num_arms(&self) -> usize {
        self.means.len()
    }

    pub fn vstar(&self, node: BanditNode) -> f64 {
        self.vstar[node.index()]
    }

    /// `Q*(node, action)`; `None` at arms or for actions other than 0 and 1.
    pub fn qstar(&self, node: BanditNode, action: usize) -> Option<f64> {
        if node.level as usize >= self.depth || action > 1 {
            return None;
        }
        let want = self.vstar(node.child(action == 1));
        let other = self.vstar(node.child(action != 1));
        Some(self.p * want + (1.0 - self.p) * other)
    }

    /// `max_a Q*(root, a) - Q*(root, action)`.
    pub fn objective_regret(&self, action: usize) -> Result<f64> {
        let root = self.root();
        let q = self.qstar(root, action).ok_or(Error::NotInTree { node: 0, action })?;
        Ok(self.vstar(root) - q)
    }

    pub fn optimal_root_action(&self) -> usize {
        let root = self.root();
        if self.qstar(root, 1).unwrap() > self.qstar(root, 0).unwrap() {
            1
        } else {
            0
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "env = bandit-tree").unwrap();
        writeln!(s, "depth = {}", self.depth).unwrap();
        writeln!(s, "p = {}", self.p).unwrap();
        writeln!(s, "noise_var = {}", self.noise_var).unwrap();
        let means: Vec<String> = self.means.iter().map(|m| m.to_string()).collect();
        writeln!(s, "means = {}", means.join(", ")).unwrap();
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let f = KvFile::parse(text)?;
        let env: String = f.require("env")?;
        if env != "bandit-tree" {
            return Err(Error::UnknownEnvironment(env));
        }
        let means = f.get("means").ok_or(Error::Parse { line: 0, msg: "missing key `means`".into() })?.parse_list()?;
        Self::new(f.require("depth")?, f.require("p")?, means, f.require("noise_var")?)
    }
}

impl Mdp for BanditTree {
    type State = BanditNode;

    fn num_actions(&self, state: &BanditNode) -> usize {
        if (state.level as usize) < self.depth {
            2
        } else {
            0
        }
    }

    fn transitions(&self, state: &BanditNode, action: usize) -> Vec<Transition<BanditNode>> {
        let p_left = if action == 0 { self.p } else { 1.0 - self.p };
        [(state.child(false), p_left), (state.child(true), 1.0 - p_left)]
            .into_iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|(next, p)| Transition::new(next, p, 0.0))
            .collect()
    }

    fn terminal_value(&self, state: &BanditNode) -> f64 {
        self.means[state.pos as usize]
    }

    fn sample_terminal<R: Rng + ?Sized>(&self, state: &BanditNode, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.means[state.pos as usize] + self.noise_sd * z
    }
}
