//! Seeded trajectory simulation.
//!
//! Trajectories are driven by ChaCha8 seeded from a single `u64`, so equal
//! seeds reproduce the same path on every platform and distinct seeds give
//! independent streams.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::TransitionKernel;
use crate::lattice::StateIndex;
use crate::{Error, Result};

/// Name of the generator, for output metadata.
pub const GENERATOR: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryConfig {
    pub start: StateIndex,
    /// Number of states in the output, start included.
    pub length: usize,
    pub seed: u64,
}

/// Walks `kernel` from `config.start`, choosing each successor by inverse
/// CDF over the stored entries of the current row.
pub fn sample_trajectory(kernel: &TransitionKernel, config: &TrajectoryConfig) -> Result<Vec<StateIndex>> {
    if config.start >= kernel.len() {
        return Err(Error::IndexOutOfRange {
            index: config.start,
            len: kernel.len(),
        });
    }
    if config.length == 0 {
        return Err(Error::InvalidParameter("trajectory length must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut path = Vec::with_capacity(config.length);
    let mut state = config.start;
    path.push(state);
    for _ in 1..config.length {
        let (cols, vals) = kernel.row(state);
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        // rounding can leave the row sum just below u; fall back to the last entry
        let mut next = cols[cols.len() - 1];
        for (&c, &p) in cols.iter().zip(vals) {
            acc += p;
            if u < acc {
                next = c;
                break;
            }
        }
        state = next as usize;
        path.push(state);
    }
    Ok(path)
}
