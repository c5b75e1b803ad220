//! Benchmark environments.

pub mod bandit;
pub mod pegs;

pub use bandit::{gen_bandit_tree, ArmKind, BanditGenerator, BanditNode, BanditSpec, BanditTree};
pub use pegs::{min_pegs, Move, PegBoard, PegSolitaire, MOVES};
