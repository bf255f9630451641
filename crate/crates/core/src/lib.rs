//! Adaptive, error-aware estimation of observables on qudit registers.
//!
//! Observables are decomposed into generalized Pauli strings, grouped into
//! commuting cliques, measured through diagonalizing Clifford circuits and
//! estimated with Bayesian posteriors whose pairwise covariances come from a
//! constrained Metropolis–Hastings sampler.

pub mod bayes;
pub mod cli;
pub mod clifford;
pub mod engine;
pub mod error;
pub mod graph;
pub mod pauli;
pub mod rng;
pub mod simulator;

pub use error::{Error, Result};
