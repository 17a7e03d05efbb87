//! Stationary distributions.
//!
//! Three routes are provided: the closed-form Dirichlet-multinomial law of
//! the neutral process, the path-product construction for reversible
//! kernels, and power iteration for everything else. Reducible kernels are
//! handled by solving on one closed class.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::Landscape;
use crate::dynamics::{Incentive, Mutation};
use crate::kernel::TransitionKernel;
use crate::lattice::{Lattice, StateIndex};
use crate::{Error, IncentiveProcess, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    ReversibleExact,
    Iterative,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::ReversibleExact => "reversible_exact",
            Method::Iterative => "iterative",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    probabilities: Vec<f64>,
    residual: f64,
    method: Method,
}

impl StationaryDistribution {
    /// Normalizes a non-negative vector; `residual` is recorded as given.
    pub fn new(mut probabilities: Vec<f64>, residual: f64, method: Method) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if probabilities.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(
                "stationary weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidDistribution("stationary weights sum to zero".into()));
        }
        probabilities.iter_mut().for_each(|p| *p /= total);
        Ok(StationaryDistribution {
            probabilities,
            residual,
            method,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn into_probabilities(self) -> Vec<f64> {
        self.probabilities
    }

    /// `max |s T - s|` as measured against a kernel; zero for the closed form
    /// until [`with_residual`](Self::with_residual) is called.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Records the residual of this distribution against `kernel`.
    pub fn with_residual(mut self, kernel: &TransitionKernel) -> Result<Self> {
        if kernel.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: kernel.len(),
                found: self.len(),
            });
        }
        self.residual = kernel.residual(&self.probabilities);
        Ok(self)
    }

    /// State of largest mass, when unique.
    pub fn unique_argmax(&self) -> Option<StateIndex> {
        unique_extreme(&self.probabilities, |a, b| a > b)
    }

    /// State of smallest mass, when unique.
    pub fn unique_argmin(&self) -> Option<StateIndex> {
        unique_extreme(&self.probabilities, |a, b| a < b)
    }
}

fn unique_extreme(values: &[f64], better: impl Fn(f64, f64) -> bool) -> Option<usize> {
    let mut best = 0;
    let mut tied = false;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if better(v, values[best]) {
            best = i;
            tied = false;
        } else if v == values[best] {
            tied = true;
        }
    }
    (!tied).then_some(best)
}

/// `x (x + 1) ... (x + y - 1)`, one for `y = 0`.
pub fn rising_factorial(x: f64, y: u32) -> f64 {
    (0..y).map(|i| x + i as f64).product()
}

/// `N mu / (n - 1 - n mu)`, undefined at `mu = (n - 1) / n`.
pub fn alpha(types: usize, size: u32, mu: f64) -> Option<f64> {
    let n = types as f64;
    let denom = n - 1.0 - n * mu;
    (denom != 0.0).then(|| size as f64 * mu / denom)
}

/// `(sign, ln |(x)_y|)` for `y = 0..=max`, cumulatively.
fn signed_log_rising(x: f64, max: u32) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let (mut sign, mut log) = (1.0, 0.0);
    out.push((sign, log));
    for i in 0..max {
        let term = x + i as f64;
        if term == 0.0 {
            sign = 0.0;
        } else if term < 0.0 {
            sign = -sign;
        }
        log += libm::log(libm::fabs(term));
        out.push((sign, log));
    }
    out
}

/// Closed-form stationary distribution of the neutral process with uniform
/// mutation: a Dirichlet-multinomial law, or the multinomial `C(N; a) n^-N`
/// at `mu = (n - 1) / n`. Evaluated in log-space.
///
/// For `mu > (n - 1) / n` the parameter `alpha` is negative. The same formula
/// is used whenever every state comes out with positive mass; otherwise the
/// neutral kernel is solved iteratively.
pub fn neutral_stationary(types: usize, size: u32, mu: f64) -> Result<StationaryDistribution> {
    let lattice = Lattice::new(types, size)?;
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "neutral stationary distribution needs 0 < mu < 1, got {mu}"
        )));
    }
    let n = types as f64;
    let log_factorial = signed_log_rising(1.0, size);
    let log_multinomial = |counts: &[u32]| {
        log_factorial[size as usize].1
            - counts.iter().map(|&c| log_factorial[c as usize].1).sum::<f64>()
    };

    let uniformizing = libm::fabs(mu - (n - 1.0) / n) <= 1e-15;
    let mut logs = Vec::with_capacity(lattice.len());
    if uniformizing {
        let log_n = libm::log(n);
        for state in lattice.states() {
            logs.push(log_multinomial(state.counts()) - size as f64 * log_n);
        }
    } else {
        let a = alpha(types, size, mu).expect("alpha defined away from (n-1)/n");
        let single = signed_log_rising(a, size);
        let (total_sign, total_log) = signed_log_rising(n * a, size)[size as usize];
        let mut representable = total_sign != 0.0;
        for state in lattice.states() {
            if !representable {
                break;
            }
            let mut sign = total_sign;
            let mut log = log_multinomial(state.counts()) - total_log;
            for &c in state.counts() {
                let (s, l) = single[c as usize];
                sign *= s;
                log += l;
            }
            if sign <= 0.0 {
                representable = false;
            }
            logs.push(log);
        }
        if !representable {
            log::warn!(
                "closed form not positive for n={types}, N={size}, mu={mu} (alpha={a}); solving iteratively"
            );
            let kernel = IncentiveProcess::new(
                types,
                size,
                Incentive::Neutral,
                Landscape::Neutral(types).matrix(),
                Mutation::Uniform(mu),
            )?
            .build_kernel()?;
            return solve_stationary(&kernel, DEFAULT_TOL, DEFAULT_MAX_ITERS);
        }
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights = logs.into_iter().map(|l| libm::exp(l - max)).collect();
    StationaryDistribution::new(weights, 0.0, Method::ClosedForm)
}

/// Power iteration `s <- s T` from the uniform vector until
/// `max |s T - s| <= tol`. The kernel must be irreducible. Kernels without
/// any self-loop are iterated lazily, `(s + s T) / 2`, which has the same
/// fixed point.
pub fn solve_stationary(
    kernel: &TransitionKernel,
    tol: f64,
    max_iters: usize,
) -> Result<StationaryDistribution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let (_, components) = kernel.strongly_connected_components();
    if components != 1 {
        return Err(Error::Reducible {
            recurrent_classes: kernel.recurrent_classes().len(),
        });
    }
    let len = kernel.len();
    let lazy = !kernel.has_self_loop();
    let mut s = vec![1.0 / len as f64; len];
    let mut next = vec![0.0; len];
    let mut residual = f64::INFINITY;
    for _ in 0..=max_iters {
        kernel.left_multiply(&s, &mut next);
        residual = next
            .iter()
            .zip(&s)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max);
        if residual <= tol {
            return StationaryDistribution::new(s, residual, Method::Iterative);
        }
        if lazy {
            next.iter_mut().zip(&s).for_each(|(n, &c)| *n = 0.5 * (*n + c));
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        core::mem::swap(&mut s, &mut next);
    }
    Err(Error::NotConverged {
        iterations: max_iters,
        residual,
    })
}

/// Stationary distribution supported on the closed class `class`, extended
/// by zeros to the whole state space.
pub fn solve_on_class(
    kernel: &TransitionKernel,
    class: &[StateIndex],
    tol: f64,
    max_iters: usize,
) -> Result<StationaryDistribution> {
    let restricted = kernel.restrict(class)?;
    let local = if class.len() == 1 {
        StationaryDistribution::new(vec![1.0], 0.0, Method::ReversibleExact)?
    } else {
        match reversible_stationary(&restricted) {
            Ok(s) => s,
            Err(Error::NotReversible(_)) => solve_stationary(&restricted, tol, max_iters)?,
            Err(e) => return Err(e),
        }
    };
    let mut full = vec![0.0; kernel.len()];
    for (&i, &p) in class.iter().zip(local.probabilities()) {
        full[i] = p;
    }
    StationaryDistribution::new(full, 0.0, local.method())?.with_residual(kernel)
}

/// Exact stationary distribution of a reversible kernel, built by
/// multiplying ratios `T[i][j] / T[j][i]` along a spanning tree of the
/// support graph and then checking detailed balance on every edge. For two
/// types the support is a path and this is the usual birth-death product.
pub fn reversible_stationary(kernel: &TransitionKernel) -> Result<StationaryDistribution> {
    let len = kernel.len();
    let mut log_mass = vec![f64::NAN; len];
    let mut queue = alloc::collections::VecDeque::new();
    log_mass[0] = 0.0;
    queue.push_back(0usize);
    while let Some(i) = queue.pop_front() {
        for (j, forward) in kernel.row_entries(i) {
            if j == i {
                continue;
            }
            let backward = kernel.get(j, i);
            if backward == 0.0 {
                return Err(Error::NotReversible(format!(
                    "transition {i} -> {j} has no reverse transition"
                )));
            }
            if log_mass[j].is_nan() {
                log_mass[j] = log_mass[i] + libm::log(forward) - libm::log(backward);
                queue.push_back(j);
            }
        }
    }
    if log_mass.iter().any(|l| l.is_nan()) {
        return Err(Error::NotReversible("support graph is not connected".into()));
    }
    let max = log_mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights = log_mass.iter().map(|l| libm::exp(l - max)).collect();
    let s = StationaryDistribution::new(weights, 0.0, Method::ReversibleExact)?;

    let p = s.probabilities();
    let mut worst: f64 = 0.0;
    for (i, j, forward) in kernel.triplets() {
        if i < j {
            let a = p[i] * forward;
            let b = p[j] * kernel.get(j, i);
            worst = worst.max(libm::fabs(a - b) / a.max(b));
        }
    }
    if worst > 1e-9 {
        return Err(Error::NotReversible(format!(
            "detailed balance fails with relative violation {worst:e}"
        )));
    }
    s.with_residual(kernel)
}

/// Checks `s_i T[i][j] = s_j T[j][i]` over every pair joined by a
/// transition. Returns whether the largest absolute violation is within
/// `tol`, and that violation.
pub fn check_detailed_balance(kernel: &TransitionKernel, s: &[f64], tol: f64) -> (bool, f64) {
    if s.len() != kernel.len() {
        return (false, f64::INFINITY);
    }
    let worst = kernel
        .triplets()
        .filter(|&(i, j, _)| i != j)
        .map(|(i, j, forward)| libm::fabs(s[i] * forward - s[j] * kernel.get(j, i)))
        .fold(0.0, f64::max);
    (worst <= tol, worst)
}
