//! Kernel, stationary distribution and entropy rate in one pass.

use incentive_core::entropy::{entropy_rate, EntropyReport};
use incentive_core::stationary::{
    neutral_stationary, reversible_stationary, solve_on_class, solve_stationary, StationaryDistribution,
    DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use incentive_core::{IncentiveProcess, TransitionKernel};
use rayon::prelude::*;

use crate::Result;

/// Builds the kernel with rows computed in parallel.
pub fn build_kernel(process: &IncentiveProcess) -> Result<TransitionKernel> {
    let rows = (0..process.lattice().len())
        .into_par_iter()
        .map(|i| process.kernel_row(i))
        .collect::<incentive_core::Result<Vec<_>>>()?;
    Ok(TransitionKernel::from_lattice_rows(process.lattice().clone(), rows)?)
}

/// Picks a solver: the closed form for neutral processes with uniform
/// mutation, the birth-death product for two types, power iteration
/// otherwise. A reducible kernel is solved on its recurrent class when
/// there is exactly one.
pub fn solve(process: &IncentiveProcess, kernel: &TransitionKernel) -> Result<StationaryDistribution> {
    let lattice = process.lattice();
    if process.is_neutral() {
        if let Some(mu) = process.mutation().uniform_rate().filter(|&mu| mu > 0.0 && mu < 1.0) {
            return Ok(neutral_stationary(lattice.types(), lattice.size(), mu)?.with_residual(kernel)?);
        }
    }
    if !kernel.is_irreducible() {
        let classes = kernel.recurrent_classes();
        if classes.len() != 1 {
            return Err(incentive_core::Error::Reducible { recurrent_classes: classes.len() }.into());
        }
        return Ok(solve_on_class(kernel, &classes[0], DEFAULT_TOL, DEFAULT_MAX_ITERS)?);
    }
    if lattice.types() == 2 {
        match reversible_stationary(kernel) {
            Ok(s) => return Ok(s),
            Err(incentive_core::Error::NotReversible(reason)) => {
                log::warn!("two-type kernel failed detailed balance ({reason}); iterating")
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(solve_stationary(kernel, DEFAULT_TOL, DEFAULT_MAX_ITERS)?)
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub kernel: TransitionKernel,
    pub stationary: StationaryDistribution,
    pub report: EntropyReport,
}

pub fn analyze(process: &IncentiveProcess) -> Result<Analysis> {
    let kernel = build_kernel(process)?;
    let stationary = solve(process, &kernel)?;
    let report = entropy_rate(&kernel, &stationary)?;
    Ok(Analysis { kernel, stationary, report })
}
