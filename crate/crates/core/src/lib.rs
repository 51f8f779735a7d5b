//! Genuine multipartite nonlocality (GMNL) from network-distributed two-party
//! entanglement.
//!
//! The crate is organised bottom-up:
//!
//! - [`bitcode`]: bit strings, the Hadamard code and its orbits on the Boolean cube.
//! - [`kvgame`]: the L-fold Khot-Vishnoi game, its classical bound, exact and
//!   Monte Carlo scoring, and the orbit-basis quantum strategy.
//! - [`netgraph`]: network graphs, cuts and the global min-cut.
//! - [`games`]: generic bipartite Bell games, k-repetitions, network-extension
//!   games and brute-force local / biseparable bounds.
//! - [`quantum`]: dense density operators, twirling, entanglement fractions and
//!   the flag-distillation bookkeeping.
//! - [`certify`]: superactivation certificates built from the pieces above.
//! - [`verify`]: the end-to-end acceptance checks, shared by the test suite and
//!   the `gmnl verify` subcommand.

#![forbid(unsafe_code)]

pub mod bitcode;
pub mod certify;
mod error;
pub mod games;
pub mod kvgame;
pub mod netgraph;
pub mod quantum;
pub mod seed;
pub mod verify;

pub use bitcode::{BitString, HadamardCode, Orbit};
pub use certify::{Certificate, Verdict};
pub use error::{Error, Result};
pub use games::{Behavior, BellGame, NetworkGame};
pub use kvgame::{KVParams, KVStrategy, ScoreEstimate};
pub use netgraph::{Cut, NetworkGraph};
pub use quantum::{DensityOperator, EdgeAssignment};
pub use seed::SeedStream;

/// Crate version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
