//! Experiment harness: runs policy × budget × seed grids on the benchmark
//! environments and aggregates the metric into curves.

pub mod defaults;
pub mod rng;
pub mod tune;

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::env::{BanditGenerator, BanditSpec, PegBoard, PegSolitaire};
use crate::error::{Error, Result};
use crate::mdp::CountingMdp;
use crate::policies::{plan, PolicyConfig};
use crate::values::Accumulator;

pub use defaults::tuned_config;

/// Offset added to seed indices of tuning runs so they never meet
/// evaluation seeds.
pub const TUNING_SEED_OFFSET: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvKind {
    BanditCorr,
    BanditUncorr,
    Pegs,
}

impl EnvKind {
    pub const ALL: [EnvKind; 3] = [EnvKind::BanditCorr, EnvKind::BanditUncorr, EnvKind::Pegs];

    pub fn name(self) -> &'static str {
        match self {
            EnvKind::BanditCorr => "bandit-corr",
            EnvKind::BanditUncorr => "bandit-uncorr",
            EnvKind::Pegs => "pegs",
        }
    }

    pub fn default_seeds(self) -> usize {
        match self {
            EnvKind::Pegs => 200,
            _ => 500,
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnvKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::UnknownEnvironment(s.to_string()))
    }
}

/// Environment family with its size parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvSpec {
    pub kind: EnvKind,
    /// Bandit-tree depth.
    pub depth: usize,
    /// Initial pegs on the solitaire board.
    pub pegs: usize,
}

impl EnvSpec {
    pub fn new(kind: EnvKind) -> Self {
        Self { kind, depth: 7, pegs: 9 }
    }

    fn bandit_spec(&self) -> Option<BanditSpec> {
        match self.kind {
            EnvKind::BanditCorr => Some(BanditSpec::correlated(self.depth)),
            EnvKind::BanditUncorr => Some(BanditSpec::uncorrelated(self.depth)),
            EnvKind::Pegs => None,
        }
    }
}

pub const DEFAULT_BUDGETS: [usize; 4] = [16, 32, 64, 128];

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub env: EnvSpec,
    pub policies: Vec<PolicyConfig>,
    pub budgets: Vec<usize>,
    pub seeds: usize,
    /// Index of the first seed.
    pub first_seed: u64,
    pub master_seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(env: EnvKind, policies: Vec<PolicyConfig>) -> Self {
        Self {
            env: EnvSpec::new(env),
            policies,
            budgets: DEFAULT_BUDGETS.to_vec(),
            seeds: env.default_seeds(),
            first_seed: 0,
            master_seed: 0,
            workers: 1,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budgets.is_empty() || self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("budgets must be non-empty and strictly increasing".into()));
        }
        if self.seeds == 0 {
            return Err(Error::InvalidParameter("seed count must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("worker count must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::InvalidParameter("no policies".into()));
        }
        for (i, p) in self.policies.iter().enumerate() {
            p.validate()?;
            if self.policies[..i].iter().any(|q| q.kind == p.kind) {
                return Err(Error::InvalidParameter(format!("policy {} listed twice", p.kind)));
            }
        }
        Ok(())
    }
}

/// One run: a policy at one budget on one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub env: EnvKind,
    pub policy: String,
    pub budget: usize,
    pub seed: u64,
    /// Objective regret (bandit trees) or pegs remaining (solitaire).
    pub metric: f64,
    /// Simulations spent; for solitaire summed over all moves of the game.
    pub simulations: usize,
}

/// Plays one solitaire game from `board`, planning every move with `config`
/// and `budget` simulations; returns pegs remaining and simulations spent.
pub fn play_pegs<R: rand::Rng + ?Sized>(
    board: PegBoard,
    config: &PolicyConfig,
    budget: usize,
    rng: &mut R,
) -> Result<(u32, usize)> {
    let mut board = board;
    let mut simulations = 0;
    while !board.is_terminal() {
        let counting = CountingMdp::new(&PegSolitaire);
        let d = plan(&counting, &board, budget, config, rng)?;
        debug_assert_eq!(counting.draws(), d.simulations);
        simulations += d.simulations;
        let m = board.nth_legal_move(d.action).ok_or(Error::IllegalMove)?;
        board = board.apply(m)?;
    }
    Ok((board.pegs(), simulations))
}

fn run_seed(cfg: &ExperimentConfig, policy: &PolicyConfig, seed: u64) -> Result<Vec<Row>> {
    let name = policy.kind.name();
    let mut env_rng = rng::env_rng(cfg.master_seed, seed);
    let row = |budget, metric, simulations| Row {
        env: cfg.env.kind,
        policy: name.to_string(),
        budget,
        seed,
        metric,
        simulations,
    };
    match cfg.env.bandit_spec() {
        Some(spec) => {
            let tree = BanditGenerator::new(spec)?.generate(&mut env_rng);
            cfg.budgets
                .iter()
                .map(|&budget| {
                    let mut rng = rng::policy_rng(cfg.master_seed, name, seed, budget);
                    let counting = CountingMdp::new(&tree);
                    let d = plan(&counting, &tree.root(), budget, policy, &mut rng)?;
                    debug_assert_eq!(counting.draws(), d.simulations);
                    Ok(row(budget, tree.objective_regret(d.action)?, d.simulations))
                })
                .collect()
        }
        None => {
            let board = PegBoard::random(cfg.env.pegs, &mut env_rng)?;
            cfg.budgets
                .iter()
                .map(|&budget| {
                    let mut rng = rng::policy_rng(cfg.master_seed, name, seed, budget);
                    let (pegs, sims) = play_pegs(board, policy, budget, &mut rng)?;
                    Ok(row(budget, pegs as f64, sims))
                })
                .collect()
        }
    }
}

/// Runs every (seed, policy) pair on a pool of `workers` threads. Rows are
/// returned in policy-list, budget, seed order whatever the worker count.
pub fn run_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    let jobs: Vec<(usize, u64)> = (0..cfg.policies.len())
        .flat_map(|p| (0..cfg.seeds as u64).map(move |s| (p, cfg.first_seed + s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let results: Vec<Result<Vec<Row>>> =
        pool.install(|| jobs.par_iter().map(|&(p, seed)| run_seed(cfg, &cfg.policies[p], seed)).collect());
    let mut rows = Vec::with_capacity(jobs.len() * cfg.budgets.len());
    for r in results {
        rows.extend(r?);
    }
    let order = |name: &str| cfg.policies.iter().position(|p| p.kind.name() == name);
    rows.sort_by_key(|r| (order(&r.policy), r.budget, r.seed));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub policy: String,
    pub budget: usize,
    pub mean: f64,
    /// Sample standard deviation over √seeds.
    pub se: f64,
    pub seeds: usize,
}

/// Mean metric with standard error per (policy, budget).
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub env: EnvKind,
    pub points: Vec<CurvePoint>,
}

impl RegretCurve {
    /// Aggregates rows sorted by policy then budget (as [`run_rows`] returns them).
    pub fn from_rows(env: EnvKind, rows: &[Row]) -> Self {
        let mut points: Vec<CurvePoint> = Vec::new();
        let mut acc = Accumulator::default();
        for (i, r) in rows.iter().enumerate() {
            acc.push(r.metric);
            let last = rows.get(i + 1).is_none_or(|n| n.policy != r.policy || n.budget != r.budget);
            if last {
                let e = acc.estimate();
                points.push(CurvePoint {
                    policy: r.policy.clone(),
                    budget: r.budget,
                    mean: e.mean,
                    se: e.se,
                    seeds: acc.count() as usize,
                });
                acc = Accumulator::default();
            }
        }
        Self { env, points }
    }

    pub fn point(&self, policy: &str, budget: usize) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.policy == policy && p.budget == budget)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("env,policy,budget,mean,se,seeds\n");
        for p in &self.points {
            writeln!(s, "{},{},{},{},{},{}", self.env, p.policy, p.budget, p.mean, p.se, p.seeds).unwrap();
        }
        s
    }
}

pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut s = String::from("env,policy,budget,seed,metric\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{}", r.env, r.policy, r.budget, r.seed, r.metric).unwrap();
    }
    s
}

/// Path of the summary file written next to `out`.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.csv");
    PathBuf::from(s)
}

/// Runs the experiment, writes the CSV files if an output path is set, and
/// returns the curve.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RegretCurve> {
    let rows = run_rows(cfg)?;
    let curve = RegretCurve::from_rows(cfg.env.kind, &rows);
    if let Some(out) = &cfg.out {
        std::fs::write(out, rows_to_csv(&rows))?;
        std::fs::write(summary_path(out), curve.to_csv())?;
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::PolicyKind;

    fn small(env: EnvKind, kinds: &[PolicyKind]) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(env, kinds.iter().map(|&k| tuned_config(k, env)).collect());
        cfg.env.depth = 3;
        cfg.budgets = vec![4, 8, 16];
        cfg.seeds = 10;
        cfg.master_seed = 7;
        cfg
    }

    #[test]
    fn row_accounting() {
        let cfg = small(EnvKind::BanditUncorr, &[PolicyKind::Uct, PolicyKind::VocPhi]);
        let rows = run_rows(&cfg).unwrap();
        assert_eq!(rows.len(), 60);
        assert!(rows.iter().all(|r| r.metric >= 0.0 && r.simulations <= r.budget));
        assert_eq!(rows[0].policy, "uct");
        assert_eq!(rows[59].policy, "voc-phi");
        let curve = RegretCurve::from_rows(cfg.env.kind, &rows);
        assert_eq!(curve.points.len(), 6);
        assert!(curve.points.iter().all(|p| p.seeds == 10));
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let mut cfg = small(EnvKind::BanditCorr, &[PolicyKind::Thompson, PolicyKind::BayesUct]);
        let serial = rows_to_csv(&run_rows(&cfg).unwrap());
        cfg.workers = 3;
        assert_eq!(serial, rows_to_csv(&run_rows(&cfg).unwrap()));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = small(EnvKind::Pegs, &[PolicyKind::Uct]);
        cfg.budgets = vec![8, 8];
        assert!(run_rows(&cfg).is_err());
        cfg.budgets = vec![8];
        cfg.seeds = 0;
        assert!(run_rows(&cfg).is_err());
        assert!(matches!("maze".parse::<EnvKind>(), Err(Error::UnknownEnvironment(_))));
    }

    #[test]
    fn pegs_game_ends_on_terminal_board() {
        let mut rng = rng::env_rng(3, 0);
        let board = PegBoard::random(9, &mut rng).unwrap();
        let cfg = tuned_config(crate::policies::PolicyKind::Uct, EnvKind::Pegs);
        let (pegs, sims) = play_pegs(board, &cfg, 8, &mut rng).unwrap();
        assert!((1..=9).contains(&pegs));
        assert!(pegs >= crate::env::min_pegs(board));
        assert_eq!(sims % 8, 0);
    }
}
