use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mcts_voc::bench::tune::{apply_overrides, grid_search, parse_grid, results_to_overrides};
use mcts_voc::bench::{run_experiment, tuned_config, EnvKind, ExperimentConfig};
use mcts_voc::error::{Error, Result};
use mcts_voc::kv::{parse_list, KvFile};
use mcts_voc::policies::PolicyKind;

#[derive(Parser)]
#[command(name = "bench", about = "Run and tune planning benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate policies over a budget grid and write per-seed and summary CSV.
    Run {
        #[command(flatten)]
        common: Common,
        /// Comma-separated policy names (default depends on the environment).
        #[arg(long)]
        policies: Option<String>,
        /// `policy.param = value` overrides applied on top of the tuned defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid-search policy parameters on tuning seeds.
    Tune {
        #[command(flatten)]
        common: Common,
        /// File of `policy.param = v1, v2, ...` lines.
        #[arg(long)]
        grid: PathBuf,
        /// Evaluations per policy (seed runs over the budget grid).
        #[arg(long)]
        evals: Option<usize>,
        /// Where to write the winning overrides.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "bandit-corr")]
    env: String,
    /// Comma-separated, strictly increasing.
    #[arg(long)]
    budgets: Option<String>,
    /// Seed count (default 500 for bandit trees, 200 for pegs).
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    master_seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Bandit-tree depth.
    #[arg(long, default_value_t = 7)]
    depth: usize,
}

impl Common {
    fn experiment(&self, policies: &[PolicyKind]) -> Result<ExperimentConfig> {
        let env: EnvKind = self.env.parse()?;
        let mut cfg = ExperimentConfig::new(env, policies.iter().map(|&k| tuned_config(k, env)).collect());
        cfg.env.depth = self.depth;
        if let Some(b) = &self.budgets {
            cfg.budgets = parse_list(b).map_err(|_| Error::InvalidParameter(format!("bad budget list `{b}`")))?;
        }
        if let Some(s) = self.seeds {
            cfg.seeds = s;
        }
        cfg.master_seed = self.master_seed;
        cfg.workers = self.workers;
        Ok(cfg)
    }
}

fn default_policies(env: EnvKind) -> Vec<PolicyKind> {
    use PolicyKind::*;
    match env {
        EnvKind::Pegs => vec![Uct, BayesUct, Thompson, Voi, VocPhi, VocPsi],
        _ => vec![Uct, BayesUct, Thompson, Voi, VocPhi],
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, policies, config, out } => {
            let env: EnvKind = common.env.parse()?;
            let kinds = match policies {
                Some(list) => list.split(',').map(|s| s.trim().parse()).collect::<Result<Vec<_>>>()?,
                None => default_policies(env),
            };
            let mut cfg = common.experiment(&kinds)?;
            if let Some(path) = config {
                apply_overrides(&KvFile::parse(&std::fs::read_to_string(path)?)?, &mut cfg.policies)?;
            }
            cfg.out = Some(out);
            let curve = run_experiment(&cfg)?;
            print!("{}", curve.to_csv());
        }
        Command::Tune { common, grid, evals, out } => {
            let file = KvFile::parse(&std::fs::read_to_string(grid)?)?;
            let (grids, other) = parse_grid(&file)?;
            if let Some((k, _)) = other.first() {
                return Err(Error::InvalidParameter(format!("grid key `{k}` has no policy prefix")));
            }
            let base = common.experiment(&[])?;
            let evals = match evals {
                Some(e) => e,
                None => {
                    let l = grids.iter().map(|g| g.size()).fold(1, lcm);
                    let want = grids.iter().map(|g| g.size()).max().unwrap_or(1) * common.seeds.unwrap_or(20);
                    want.div_ceil(l) * l
                }
            };
            let results = grid_search(&base, &grids, evals)?;
            for r in &results {
                for c in &r.candidates {
                    let a: Vec<String> = c.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    println!("{} {} mean={:.5} se={:.5}", r.kind, a.join(" "), c.score.mean, c.score.se);
                }
            }
            let best = results_to_overrides(&results);
            print!("{best}");
            if let Some(out) = out {
                std::fs::write(out, best)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
