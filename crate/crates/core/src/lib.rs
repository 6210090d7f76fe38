//! Nonlocal games built from the two-qubit Pauli group.
//!
//! Covers the magic square (MS), augmented magic square (AMS) and
//! p-synchronous AMS (p-SAMS) games. Classical values are computed exactly by
//! exhaustive search; the perfect two-Bell-pair strategy is simulated with
//! dense matrices.
//!
//! - [`pauli`]: products, commutation, commuting triples, operator magic squares.
//! - [`game`]: game definitions, payoff predicate, question samplers.
//! - [`classical`]: exact evaluation and optimization of deterministic strategies.
//! - [`quantum`]: Born-rule simulation of the entangled strategy.
//! - [`harness`]: verification suite and Monte Carlo referee.

pub mod classical;
pub mod error;
pub mod game;
pub mod harness;
pub mod linalg;
pub mod pauli;
pub mod quantum;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
