//! Incentive processes on the discrete population simplex.
//!
//! An incentive process is a birth-death Markov chain over the compositions of
//! a population of `N` individuals split among `n` types. At each step one
//! individual reproduces in proportion to an *incentive* (a generalization of
//! fitness-proportionate selection), the offspring may mutate, and a uniformly
//! random individual is replaced. The Moran process is the special case of the
//! linear replicator incentive.
//!
//! This crate is `no_std` (it needs `alloc`) and holds the numerical core:
//!
//! - [`lattice`]: enumeration, ranking and adjacency of population states
//! - [`dynamics`]: game matrices, incentives, mutation and reproduction probabilities
//! - [`kernel`]: the sparse transition matrix of the process
//! - [`stationary`]: closed-form, reversible and iterative stationary distributions
//! - [`entropy`]: transition entropies, entropy rates, their upper bound, and a
//!   plug-in estimator for sampled trajectories
//! - [`sampler`]: seeded trajectory simulation
//! - [`catalog`]: the named fitness landscapes
//!
//! ```
//! use incentive_core::{catalog::Landscape, dynamics::{Incentive, Mutation}, IncentiveProcess};
//! use incentive_core::{entropy, stationary};
//!
//! let process = IncentiveProcess::new(
//!     3,
//!     30,
//!     Incentive::Fermi { q: 1.0, beta: 1.0 },
//!     Landscape::Neutral(3).matrix(),
//!     Mutation::Uniform(1.0 / 30.0),
//! )
//! .unwrap();
//! let kernel = process.build_kernel().unwrap();
//! let s = stationary::solve_stationary(&kernel, 1e-12, 1_000_000).unwrap();
//! let report = entropy::entropy_rate(&kernel, &s).unwrap();
//! assert!((report.entropy_rate - 1.155).abs() < 5e-3);
//! ```
#![no_std]
// NaN must fail these checks, which `!(x > 0.0)` does and `x <= 0.0` does not
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod catalog;
pub mod dynamics;
pub mod entropy;
mod error;
pub mod kernel;
pub mod lattice;
mod process;
pub mod sampler;
pub mod stationary;

pub use error::{Error, Result};
pub use kernel::TransitionKernel;
pub use lattice::{Lattice, PopulationState, StateIndex, Step};
pub use process::IncentiveProcess;
