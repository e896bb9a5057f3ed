//! Exact and asymptotic enumeration of galled phylogenetic networks,
//! one-component galled networks and dup-trees.
//!
//! The crate is organized bottom-up:
//!
//! * [`series`]: big-number helpers and truncated marked power series.
//! * [`one_component`]: the `N_n^(k)` table and one-component counts.
//! * [`galled`]: `GN_{n,k,j}` via the tree decomposition, bounds, and a
//!   brute-force tree oracle.
//! * [`dup_trees`]: dup-tree counts and a direct enumeration oracle.
//! * [`asymptotics`]: first-order asymptotic evaluators and the limit law.
//! * [`distributions`]: exact finite-n distributions and convergence
//!   diagnostics.
//! * [`io`]: cache files and distribution CSV/JSON formats.

pub mod error;
pub mod series;
pub mod one_component;
pub mod galled;
pub mod dup_trees;
pub mod asymptotics;
pub mod distributions;
pub mod io;

pub use error::{Error, Result};
