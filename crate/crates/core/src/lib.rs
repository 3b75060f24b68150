//! Learning rationalizable behaviour in multiplayer normal-form games from
//! stochastic bandit feedback.
//!
//! The crate is organised around a dense [`NormalFormGame`] and four layers on
//! top of it:
//!
//! - [`ide`]: exact Δ-iterated dominance elimination (LP dominance margins,
//!   elimination ladders, the dual never-best-response oracle);
//! - [`bandit`]: a seeded simulator that only reveals noisy payoffs;
//! - [`learners`] and [`reductions`]: sample-based algorithms that find a
//!   rationalizable action profile or a rationalizable ε-CCE / ε-CE;
//! - [`verify`]: exact, enumeration-based checks of every guarantee.
//!
//! [`experiment`] wires these into reproducible multi-trial runs and is what
//! the `ratl` binary drives.

pub mod bandit;
pub mod error;
pub mod experiment;
pub mod game;
pub mod ide;
pub mod learners;
pub mod lp;
pub mod reductions;
pub mod verify;

pub use bandit::{BanditEnv, MixedFeedback, Noise};
pub use error::{Error, Result};
pub use game::{ActionProfile, JointDistribution, MixedStrategy, NormalFormGame, ProductComponent};
pub use ide::{compute_ladder, DominanceCertificate, EliminationLadder};
pub use learners::{LearnerConfig, RunReport};

/// Version string embedded in every run report and trial record.
pub const CODE_VERSION: &str = concat!("ratl ", env!("CARGO_PKG_VERSION"));

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;
