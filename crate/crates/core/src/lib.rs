//! Position statistics of pattern-avoiding permutations: exact counts,
//! bijections and samplers, asymptotic regimes, and permutation statistics.

pub mod error;
pub mod exact;
pub mod perm;
pub mod bijections;
pub mod asymptotics;
pub mod statlab;

pub use error::{Error, Result};
