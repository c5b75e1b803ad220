#![allow(dead_code)]

use std::path::PathBuf;

use mcts_voc::belief::{Belief, Prior};
use mcts_voc::mdp::TableMdp;
use mcts_voc::pst::{build_pst, PartialSearchTree};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Random two-level choice tree with at most `max_leaves` leaves and its
/// height-1 partial search tree.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, max_leaves: usize) -> (TableMdp, PartialSearchTree<usize>) {
    let mut groups: Vec<Vec<f64>> = Vec::new();
    let mut left = rng.random_range(2..=max_leaves);
    while left > 0 {
        let g = rng.random_range(1..=left.min(3));
        groups.push(vec![0.0; g]);
        left -= g;
    }
    if groups.len() == 1 {
        let last = groups[0].pop().unwrap();
        groups.push(vec![last]);
    }
    let mdp = TableMdp::choice_tree(&groups, 0.5).unwrap();
    let pst = build_pst(&mdp, &0, 1).unwrap();
    (mdp, pst)
}

pub fn random_covariance<R: Rng + ?Sized>(rng: &mut R, m: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| normal(rng));
    let mut c = &a * a.transpose() / m as f64;
    for i in 0..m {
        c[(i, i)] += rng.random_range(0.01..0.5);
    }
    c
}

/// Random belief, correlated or independent, with a few observations already made.
pub fn random_belief<R: Rng + ?Sized>(rng: &mut R, m: usize, correlated: bool) -> Belief {
    let mean: Vec<f64> = (0..m).map(|_| normal(rng)).collect();
    let noise = rng.random_range(0.1..1.0);
    let prior = if correlated {
        Prior::correlated(mean, random_covariance(rng, m), noise).unwrap()
    } else {
        let vars = (0..m).map(|_| rng.random_range(0.05..2.0)).collect();
        Prior::isotropic(mean, vars, noise).unwrap()
    };
    let mut b = Belief::new(prior);
    for _ in 0..rng.random_range(0..4) {
        let i = rng.random_range(0..m);
        let o = b.mean(i) + normal(rng);
        b.update(i, o).unwrap();
    }
    b
}

/// Draws an outcome for leaf `i` from the predictive distribution.
pub fn predictive_draw<R: Rng + ?Sized>(b: &Belief, i: usize, rng: &mut R) -> f64 {
    let p = b.predictive_outcome(i).unwrap();
    p.mean + p.variance.sqrt() * normal(rng)
}

pub fn max(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a golden file, writing it first when `UPDATE_GOLDEN` is set.
pub fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}
