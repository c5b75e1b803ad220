//! Hyperparameter grid search.
//!
//! A grid file lists `<policy>.<param> = v1, v2, ...` lines; a policy's
//! candidate configurations are the cartesian product of its lines, applied
//! in file order. Every policy gets the same number of evaluations (one
//! evaluation is one seed run over the whole budget grid) split evenly over
//! its candidates, on seeds disjoint from evaluation seeds.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kv::KvFile;
use crate::policies::{PolicyConfig, PolicyKind};
use crate::values::{Accumulator, Estimate};

use super::{run_rows, ExperimentConfig, TUNING_SEED_OFFSET};

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGrid {
    pub kind: PolicyKind,
    pub params: Vec<(String, Vec<String>)>,
}

impl PolicyGrid {
    pub fn size(&self) -> usize {
        self.params.iter().map(|(_, v)| v.len()).product()
    }

    /// All assignments in row-major order (last parameter varies fastest).
    pub fn assignments(&self) -> Vec<Vec<(String, String)>> {
        let mut out: Vec<Vec<(String, String)>> = vec![Vec::new()];
        for (key, values) in &self.params {
            out = out
                .into_iter()
                .flat_map(|a| {
                    values.iter().map(move |v| {
                        let mut a = a.clone();
                        a.push((key.clone(), v.clone()));
                        a
                    })
                })
                .collect();
        }
        out
    }
}

/// Splits `policy.param` keys; keys without a known policy prefix are
/// returned in the second list for the caller.
pub fn parse_grid(file: &KvFile) -> Result<(Vec<PolicyGrid>, Vec<(String, String)>)> {
    let mut grids: Vec<PolicyGrid> = Vec::new();
    let mut other = Vec::new();
    for e in &file.entries {
        let policy = e.key.split_once('.').and_then(|(p, k)| p.parse::<PolicyKind>().ok().map(|p| (p, k)));
        let Some((kind, param)) = policy else {
            other.push((e.key.clone(), e.value.clone()));
            continue;
        };
        let values: Vec<String> = e.parse_list()?;
        if values.is_empty() {
            return Err(Error::Parse { line: e.line, msg: format!("empty grid for `{}`", e.key) });
        }
        let grid = match grids.iter_mut().find(|g| g.kind == kind) {
            Some(g) => g,
            None => {
                grids.push(PolicyGrid { kind, params: Vec::new() });
                grids.last_mut().unwrap()
            }
        };
        grid.params.push((param.to_string(), values));
    }
    Ok((grids, other))
}

/// Applies `policy.param = value` overrides to the matching configs.
pub fn apply_overrides(file: &KvFile, configs: &mut [PolicyConfig]) -> Result<()> {
    for e in &file.entries {
        let Some((p, k)) = e.key.split_once('.') else {
            return Err(Error::Parse { line: e.line, msg: format!("expected `<policy>.<param>`, got `{}`", e.key) });
        };
        let kind: PolicyKind = p.parse()?;
        for c in configs.iter_mut().filter(|c| c.kind == kind) {
            c.set(k, &e.value)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub assignment: Vec<(String, String)>,
    pub config: PolicyConfig,
    /// Metric averaged over budgets and tuning seeds.
    pub score: Estimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub kind: PolicyKind,
    pub candidates: Vec<Candidate>,
    /// Index of the candidate with the lowest score (first on ties).
    pub best: usize,
    pub evaluations: usize,
}

impl TuneResult {
    pub fn best(&self) -> &Candidate {
        &self.candidates[self.best]
    }
}

/// Grid search over each policy grid. `base` supplies the environment,
/// budgets, master seed and workers, and the starting configuration of each
/// policy (defaults if absent); `evaluations` is the per-policy total and
/// must be a multiple of every grid size.
pub fn grid_search(base: &ExperimentConfig, grids: &[PolicyGrid], evaluations: usize) -> Result<Vec<TuneResult>> {
    if grids.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let mut results = Vec::new();
    for grid in grids {
        let n = grid.size();
        if n == 0 || evaluations == 0 || !evaluations.is_multiple_of(n) {
            return Err(Error::InvalidParameter(format!(
                "{}: {evaluations} evaluations cannot be split evenly over {n} configurations",
                grid.kind
            )));
        }
        let start = base
            .policies
            .iter()
            .find(|c| c.kind == grid.kind)
            .cloned()
            .unwrap_or_else(|| super::tuned_config(grid.kind, base.env.kind));
        let mut candidates = Vec::with_capacity(n);
        for assignment in grid.assignments() {
            let mut config = start.clone();
            for (k, v) in &assignment {
                config.set(k, v)?;
            }
            let mut cfg = base.clone();
            cfg.policies = vec![config.clone()];
            cfg.seeds = evaluations / n;
            cfg.first_seed = TUNING_SEED_OFFSET + base.first_seed;
            cfg.out = None;
            let mut acc = Accumulator::default();
            let rows = run_rows(&cfg)?;
            let per_seed = rows.len() / cfg.seeds;
            for s in 0..cfg.seeds as u64 {
                let seed = cfg.first_seed + s;
                let total: f64 = rows.iter().filter(|r| r.seed == seed).map(|r| r.metric).sum();
                acc.push(total / per_seed as f64);
            }
            candidates.push(Candidate { assignment, config, score: acc.estimate() });
        }
        let best = candidates
            .iter()
            .enumerate()
            .fold(0, |b, (i, c)| if c.score.mean < candidates[b].score.mean { i } else { b });
        results.push(TuneResult { kind: grid.kind, candidates, best, evaluations });
    }
    Ok(results)
}

/// Best assignments as an override file accepted by [`apply_overrides`].
pub fn results_to_overrides(results: &[TuneResult]) -> String {
    let mut s = String::new();
    for r in results {
        for (k, v) in &r.best().assignment {
            writeln!(s, "{}.{k} = {v}", r.kind).unwrap();
        }
    }
    s
}
