//! Shannon entropy, transition entropies and entropy rates (in nats).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::kernel::TransitionKernel;
use crate::lattice::StateIndex;
use crate::stationary::StationaryDistribution;
use crate::{Error, Result};

/// `-sum p ln p` with `0 ln 0 = 0`, for a validated probability vector.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if let Some(i) = p.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidDistribution(format!(
            "entry {i} = {} is not a probability",
            p[i]
        )));
    }
    let total: f64 = p.iter().sum();
    if libm::fabs(total - 1.0) > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(entropy_of(p.iter().copied()))
}

fn entropy_of(p: impl Iterator<Item = f64>) -> f64 {
    -p.filter(|&x| x > 0.0).map(|x| x * libm::log(x)).sum::<f64>()
}

/// Entropy of the full outgoing distribution of state `index`, self-loop
/// included.
pub fn transition_entropy(kernel: &TransitionKernel, index: StateIndex) -> Result<f64> {
    if index >= kernel.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: kernel.len(),
        });
    }
    Ok(entropy_of(kernel.row(index).1.iter().copied()))
}

/// Transition entropy of every state.
pub fn transition_entropies(kernel: &TransitionKernel) -> Vec<f64> {
    (0..kernel.len())
        .map(|i| entropy_of(kernel.row(i).1.iter().copied()))
        .collect()
}

/// Largest possible entropy rate of an incentive process on `n` types,
/// `(2n - 1) / n * ln n`.
pub fn entropy_rate_bound(types: usize) -> Result<f64> {
    if types < 2 {
        return Err(Error::InvalidDimension { types, size: 0 });
    }
    let n = types as f64;
    Ok((2.0 * n - 1.0) / n * libm::log(n))
}

/// The bound as a fraction of `ln(n(n - 1) + 1)`, the entropy of a uniform
/// distribution over the `n(n - 1) + 1` possible moves.
pub fn bound_fraction(types: usize) -> Result<f64> {
    let moves = (types * (types - 1) + 1) as f64;
    Ok(entropy_rate_bound(types)? / libm::log(moves))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub entropy_rate: f64,
    pub per_state_transition_entropy: Vec<f64>,
    /// Upper bound on the rate. For kernels without a lattice this is
    /// `ln k`, with `k` the largest row support.
    pub bound: f64,
    pub types: Option<usize>,
    pub size: Option<u32>,
    pub residual: f64,
}

/// `sum_a s_a H(T_a)` together with the per-state entropies and the bound.
pub fn entropy_rate(kernel: &TransitionKernel, s: &StationaryDistribution) -> Result<EntropyReport> {
    if s.len() != kernel.len() {
        return Err(Error::DimensionMismatch {
            expected: kernel.len(),
            found: s.len(),
        });
    }
    let per_state = transition_entropies(kernel);
    let rate = per_state
        .iter()
        .zip(s.probabilities())
        .map(|(h, p)| h * p)
        .sum();
    let (bound, types, size) = match kernel.lattice() {
        Some(lattice) => (
            entropy_rate_bound(lattice.types())?,
            Some(lattice.types()),
            Some(lattice.size()),
        ),
        None => (libm::log(kernel.max_row_nnz() as f64), None, None),
    };
    Ok(EntropyReport {
        entropy_rate: rate,
        per_state_transition_entropy: per_state,
        bound,
        types,
        size,
        residual: s.residual(),
    })
}

/// States whose transition entropy is maximal, up to a relative tolerance
/// of `1e-12`. Ascending.
pub fn max_transition_entropy_states(kernel: &TransitionKernel) -> Vec<StateIndex> {
    let entropies = transition_entropies(kernel);
    let max = entropies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-12 * max.abs().max(f64::MIN_POSITIVE);
    entropies
        .iter()
        .enumerate()
        .filter(|(_, &h)| h >= max - slack)
        .map(|(i, _)| i)
        .collect()
}

/// Plug-in estimate of the entropy rate from an observed path: the
/// empirical occupation of each state (as a source of a transition) times
/// the entropy of its empirical outgoing frequencies.
pub fn plug_in_entropy_rate(trajectory: &[StateIndex]) -> Result<f64> {
    if trajectory.len() < 2 {
        return Err(Error::TrajectoryTooShort {
            len: trajectory.len(),
        });
    }
    let mut pairs: BTreeMap<(StateIndex, StateIndex), u64> = BTreeMap::new();
    for w in trajectory.windows(2) {
        *pairs.entry((w[0], w[1])).or_insert(0) += 1;
    }
    let steps = (trajectory.len() - 1) as f64;
    // pairs iterate grouped by source state
    let mut rate = 0.0;
    let mut entries = pairs.into_iter().peekable();
    while let Some(((source, _), first)) = entries.next() {
        let mut counts = Vec::from([first]);
        while let Some(&((next_source, _), c)) = entries.peek() {
            if next_source != source {
                break;
            }
            counts.push(c);
            entries.next();
        }
        let visits: u64 = counts.iter().sum();
        let visits_f = visits as f64;
        let h = entropy_of(counts.iter().map(|&c| c as f64 / visits_f));
        rate += visits_f / steps * h;
    }
    Ok(rate)
}
