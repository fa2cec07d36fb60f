//! Computational laboratory for nilsystems and related topological dynamics.
//!
//! - [`nilgroup`]: group law in Mal'cev coordinates.
//! - [`nilmetric`]: right-invariant metric on `G` and its quotient on `G / Gamma`.
//! - [`systems`]: rotations, nilsystems, symbolic and skew-product systems, towers.
//! - [`cubes`]: dynamical parallelepipeds, regional proximality search, cube criterion.
//! - [`independence`]: finite IP-sets and independence sets.
//! - [`complexity`]: shadowing nets, cover complexity, growth classification.
//! - [`averages`]: Birkhoff averages and ergodicity probes.
//! - [`cli`]: the `nildyn` command-line front end.

pub mod averages;
pub mod budget;
pub mod cli;
pub mod complexity;
pub mod cubes;
pub mod error;
pub mod independence;
pub mod nilgroup;
pub mod nilmetric;
pub mod stats;
pub mod systems;

pub use budget::SearchBudget;
pub use error::{Error, Result};

/// Crate version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
