//! Residue patterns of consecutive primes: exact counts from a segmented
//! sieve, and the conjectural predictions for those counts built from
//! Hardy–Littlewood singular series and Dirichlet L-values.

pub mod arith;
pub mod characters;
pub mod constants;
pub mod error;
pub mod lfun;
pub mod predict;
pub mod quad;
pub mod sieve;
pub mod singular;

pub use error::{Error, Result};
