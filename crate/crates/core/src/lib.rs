//! Finite-level models of triangular UHF algebra towers.

pub mod automorphism;
pub mod checks;
pub mod embedding;
pub mod gelfand;
pub mod partition;
pub mod primes;
pub mod sample;
pub mod supernatural;
pub mod tower;
