//! Monte-Carlo tree search that chooses which simulation to run next by its
//! value of computation under a Gaussian belief over leaf values.

pub mod belief;
pub mod error;
pub mod gaussian;
pub mod mdp;
pub mod pst;
pub mod values;
pub mod voc;
pub mod env;
pub mod kv;
pub mod policies;
pub mod bench;
