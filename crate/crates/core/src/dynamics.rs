//! Fitness, incentives, mutation, and the reproduction distribution.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::PopulationState;
use crate::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-12;

/// Square payoff matrix defining the linear landscape `f(x) = A x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl GameMatrix {
    /// Builds an `n x n` matrix from row-major entries.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) is not finite",
                pos / n,
                pos % n
            )));
        }
        Ok(GameMatrix { n, entries })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.n)
    }

    /// True when every entry is the same, so fitness is constant on the simplex.
    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|&x| x == self.entries[0])
    }

    /// `A x`. `x` must lie on the simplex.
    pub fn fitness(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let total: f64 = x.iter().sum();
        if x.iter().any(|&v| v < 0.0 || !v.is_finite()) || libm::fabs(total - 1.0) > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "fitness needs a point on the simplex, got {x:?}"
            )));
        }
        Ok(self.apply(x))
    }

    pub(crate) fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// The function `phi` mediating between the landscape and reproduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Incentive {
    /// `phi_i = x_i^q f_i(x)`; `q = 1` is the Moran process.
    Replicator { q: f64 },
    /// `phi_i = x_i^q exp(beta f_i) / sum_j x_j^q exp(beta f_j)`.
    Fermi { q: f64, beta: f64 },
    /// Two types only: all weight on the fitter type present.
    BestReply,
    /// `phi = x`, ignoring the landscape.
    Neutral,
}

impl Incentive {
    pub fn validate(&self) -> Result<()> {
        let check_q = |q: f64| {
            if q.is_finite() && q >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("q must be finite and >= 0, got {q}")))
            }
        };
        match *self {
            Incentive::Replicator { q } => check_q(q),
            Incentive::Fermi { q, beta } => {
                check_q(q)?;
                if beta.is_finite() && beta >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "beta must be finite and >= 0, got {beta}"
                    )))
                }
            }
            Incentive::BestReply | Incentive::Neutral => Ok(()),
        }
    }

    /// The incentive vector at `state`, non-negative with a positive sum.
    pub fn values(&self, game: &GameMatrix, state: &PopulationState) -> Result<Vec<f64>> {
        if game.dim() != state.types() {
            return Err(Error::DimensionMismatch {
                expected: game.dim(),
                found: state.types(),
            });
        }
        self.validate()?;
        self.values_at(game, &state.distribution())
            .map_err(|e| e.at_state(state.counts()))
    }

    pub(crate) fn values_at(&self, game: &GameMatrix, x: &[f64]) -> Result<Vec<f64>> {
        let phi = match *self {
            Incentive::Neutral => x.to_vec(),
            Incentive::Replicator { q } => {
                let f = game.apply(x);
                let phi: Vec<f64> = x.iter().zip(&f).map(|(&xi, &fi)| pow0(xi, q) * fi).collect();
                if let Some(i) = phi.iter().position(|&v| v < 0.0) {
                    return Err(Error::IllDefinedIncentive {
                        state: None,
                        reason: format!("negative replicator incentive for type {i} (fitness {})", f[i]),
                    });
                }
                phi
            }
            Incentive::Fermi { q, beta } => {
                let f = game.apply(x);
                // exp(beta f_i - max) keeps the largest term at 1
                let shift = f
                    .iter()
                    .zip(x)
                    .filter(|(_, &xi)| pow0(xi, q) > 0.0)
                    .map(|(&fi, _)| beta * fi)
                    .fold(f64::NEG_INFINITY, f64::max);
                let weights: Vec<f64> = x
                    .iter()
                    .zip(&f)
                    .map(|(&xi, &fi)| {
                        let w = pow0(xi, q);
                        if w == 0.0 {
                            0.0
                        } else {
                            w * libm::exp(beta * fi - shift)
                        }
                    })
                    .collect();
                let total: f64 = weights.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::IllDefinedIncentive {
                        state: None,
                        reason: "Fermi weights sum to zero".to_string(),
                    });
                }
                weights.into_iter().map(|w| w / total).collect()
            }
            Incentive::BestReply => {
                if x.len() != 2 {
                    return Err(Error::Unsupported(format!(
                        "best-reply incentive is defined for 2 types, got {}",
                        x.len()
                    )));
                }
                let f = game.apply(x);
                match (x[0] > 0.0, x[1] > 0.0) {
                    (true, true) if f[0] > f[1] => vec![x[0], 0.0],
                    (true, true) if f[1] > f[0] => vec![0.0, x[1]],
                    _ => x.to_vec(),
                }
            }
        };
        if !(phi.iter().sum::<f64>() > 0.0) {
            return Err(Error::IllDefinedIncentive {
                state: None,
                reason: "incentive sums to zero".to_string(),
            });
        }
        Ok(phi)
    }
}

/// `x^q` with `0^0 = 1`.
fn pow0(x: f64, q: f64) -> f64 {
    if q == 0.0 {
        1.0
    } else if q == 1.0 {
        x
    } else {
        libm::pow(x, q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mutation {
    /// Probability `mu` of mutating, spread evenly over the other types.
    Uniform(f64),
    /// Explicit row-stochastic matrix; row `k` is the offspring-type
    /// distribution of a type-`k` parent.
    Matrix(MutationMatrix),
}

impl Mutation {
    pub fn matrix(&self, n: usize) -> Result<MutationMatrix> {
        match self {
            Mutation::Uniform(mu) => MutationMatrix::uniform(n, *mu),
            Mutation::Matrix(m) if m.dim() == n => Ok(m.clone()),
            Mutation::Matrix(m) => Err(Error::DimensionMismatch {
                expected: n,
                found: m.dim(),
            }),
        }
    }

    /// The mutation probability when uniform.
    pub fn uniform_rate(&self) -> Option<f64> {
        match self {
            Mutation::Uniform(mu) => Some(*mu),
            Mutation::Matrix(_) => None,
        }
    }
}

/// A validated row-stochastic `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MutationMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl MutationMatrix {
    pub fn uniform(n: usize, mu: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension { types: n, size: 0 });
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidParameter(format!("mutation rate {mu} outside [0, 1]")));
        }
        let off = mu / (n - 1) as f64;
        let mut entries = vec![off; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0 - mu;
        }
        Ok(MutationMatrix { n, entries })
    }

    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {n}x{n} mutation matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidMatrix(format!(
                "mutation probability ({}, {}) = {} outside [0, 1]",
                pos / n,
                pos % n,
                entries[pos]
            )));
        }
        for (i, row) in entries.chunks(n).enumerate() {
            let total: f64 = row.iter().sum();
            if libm::fabs(total - 1.0) > STOCHASTIC_TOL {
                return Err(Error::InvalidMatrix(format!(
                    "mutation row {i} sums to {total}, expected 1"
                )));
            }
        }
        Ok(MutationMatrix { n, entries })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.as_ref().len() != n {
                return Err(Error::InvalidMatrix(format!("mutation row {i} has wrong length")));
            }
            entries.extend_from_slice(row.as_ref());
        }
        Self::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Probability that a type-`parent` birth yields a type-`child` offspring.
    pub fn get(&self, parent: usize, child: usize) -> f64 {
        self.entries[parent * self.n + child]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.n)
    }
}

/// Offspring-type distribution: the incentive normalized to a parent
/// distribution, pushed through the mutation matrix.
pub fn reproduction_probabilities(phi: &[f64], mutation: &MutationMatrix) -> Result<Vec<f64>> {
    if phi.len() != mutation.dim() {
        return Err(Error::DimensionMismatch {
            expected: mutation.dim(),
            found: phi.len(),
        });
    }
    if phi.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::IllDefinedIncentive {
            state: None,
            reason: format!("incentive {phi:?} has negative or non-finite entries"),
        });
    }
    let total: f64 = phi.iter().sum();
    if !(total > 0.0) {
        return Err(Error::IllDefinedIncentive {
            state: None,
            reason: "incentive sums to zero".to_string(),
        });
    }
    let n = phi.len();
    let mut p = vec![0.0; n];
    for (parent, &weight) in phi.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        let share = weight / total;
        for (child, pc) in p.iter_mut().enumerate() {
            *pc += share * mutation.get(parent, child);
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn state(counts: &[u32]) -> PopulationState {
        PopulationState::new(counts.to_vec()).unwrap()
    }

    #[test]
    fn fitness_examples() {
        let id = GameMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(id.fitness(&[0.5, 0.5]).unwrap(), vec![0.5, 0.5]);

        let rsp = GameMatrix::from_rows(&[[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
            .unwrap();
        let f = rsp.fitness(&[1.0 / 3.0; 3]).unwrap();
        assert!(f.iter().all(|v| v.abs() < 1e-15));

        let moran = GameMatrix::from_rows(&[[2.0, 2.0], [1.0, 1.0]]).unwrap();
        assert_eq!(moran.fitness(&[0.5, 0.5]).unwrap(), vec![2.0, 1.0]);

        assert!(matches!(
            moran.fitness(&[1.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            moran.fitness(&[0.7, 0.7]),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn game_matrix_validation() {
        assert!(GameMatrix::new(2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(GameMatrix::new(2, vec![1.0, f64::NAN, 3.0, 4.0]).is_err());
        assert!(GameMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).is_err());
    }

    #[test]
    fn incentive_examples() {
        let ones = GameMatrix::new(2, vec![1.0; 4]).unwrap();
        let s = state(&[3, 7]);
        let phi = Incentive::Replicator { q: 1.0 }.values(&ones, &s).unwrap();
        assert_abs_diff_eq!(phi[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(phi[1], 0.7, epsilon = 1e-15);

        let any = GameMatrix::from_rows(&[[3.0, -1.0], [0.5, 2.0]]).unwrap();
        let phi = Incentive::Fermi { q: 1.0, beta: 0.0 }.values(&any, &s).unwrap();
        assert_abs_diff_eq!(phi[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(phi[1], 0.7, epsilon = 1e-15);

        let hawk_dove = GameMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        let phi = Incentive::BestReply.values(&hawk_dove, &state(&[1, 3])).unwrap();
        assert_eq!(phi, vec![0.25, 0.0]);
        let phi = Incentive::BestReply.values(&hawk_dove, &state(&[2, 2])).unwrap();
        assert_eq!(phi, vec![0.5, 0.5]);
        // the fitter type is absent: only the present type can reproduce
        let phi = Incentive::BestReply.values(&hawk_dove, &state(&[4, 0])).unwrap();
        assert_eq!(phi, vec![1.0, 0.0]);
    }

    #[test]
    fn incentive_errors() {
        let rsp = GameMatrix::from_rows(&[[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
            .unwrap();
        let err = Incentive::Replicator { q: 1.0 }
            .values(&rsp, &state(&[2, 2, 2]))
            .unwrap_err();
        assert_eq!(
            err,
            Error::IllDefinedIncentive {
                state: Some(vec![2, 2, 2]),
                reason: "incentive sums to zero".into()
            }
        );
        let err = Incentive::Replicator { q: 1.0 }
            .values(&rsp, &state(&[4, 1, 1]))
            .unwrap_err();
        assert!(matches!(err, Error::IllDefinedIncentive { .. }));
        assert!(matches!(
            Incentive::BestReply.values(&rsp, &state(&[1, 1, 1])),
            Err(Error::Unsupported(_))
        ));
        assert!(Incentive::Fermi { q: 1.0, beta: -1.0 }
            .values(&rsp, &state(&[1, 1, 1]))
            .is_err());
    }

    #[test]
    fn zero_q_reintroduces_absent_types() {
        let ones = GameMatrix::new(2, vec![1.0; 4]).unwrap();
        let phi = Incentive::Replicator { q: 0.0 }.values(&ones, &state(&[5, 0])).unwrap();
        assert_eq!(phi, vec![1.0, 1.0]);
        let phi = Incentive::Fermi { q: 0.0, beta: 1.0 }
            .values(&ones, &state(&[5, 0]))
            .unwrap();
        assert_eq!(phi, vec![0.5, 0.5]);
    }

    #[test]
    fn fermi_survives_large_beta() {
        let g = GameMatrix::from_rows(&[[1000.0, 0.0], [0.0, 1.0]]).unwrap();
        let phi = Incentive::Fermi { q: 1.0, beta: 50.0 }
            .values(&g, &state(&[5, 5]))
            .unwrap();
        assert!(phi.iter().all(|v| v.is_finite()));
        assert_abs_diff_eq!(phi[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mutation_matrix_examples() {
        let m = MutationMatrix::uniform(3, 0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        let m = MutationMatrix::uniform(3, 0.1).unwrap();
        assert_abs_diff_eq!(m.get(1, 1), 0.9);
        assert_abs_diff_eq!(m.get(0, 2), 0.05);
        let m = MutationMatrix::uniform(3, 2.0 / 3.0).unwrap();
        assert!(m.rows().flatten().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));

        assert!(MutationMatrix::from_rows(&[[0.5, 0.6], [0.5, 0.5]]).is_err());
        assert!(MutationMatrix::from_rows(&[[1.5, -0.5], [0.5, 0.5]]).is_err());
        assert!(MutationMatrix::uniform(2, 1.2).is_err());
        assert!(Mutation::Matrix(MutationMatrix::uniform(2, 0.1).unwrap())
            .matrix(3)
            .is_err());
    }

    #[test]
    fn reproduction_examples() {
        for mu in [0.0, 0.1, 0.5, 1.0] {
            let m = MutationMatrix::uniform(2, mu).unwrap();
            let p = reproduction_probabilities(&[1.0, 1.0], &m).unwrap();
            assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
            let p = reproduction_probabilities(&[1.0, 0.0], &m).unwrap();
            assert_abs_diff_eq!(p[0], 1.0 - mu, epsilon = 1e-15);
            assert_abs_diff_eq!(p[1], mu, epsilon = 1e-15);
        }
        let m = MutationMatrix::uniform(3, 0.3).unwrap();
        let p = reproduction_probabilities(&[1.0, 0.0, 0.0], &m).unwrap();
        assert_abs_diff_eq!(p[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 0.15, epsilon = 1e-15);

        assert!(matches!(
            reproduction_probabilities(&[0.0, 0.0], &MutationMatrix::uniform(2, 0.1).unwrap()),
            Err(Error::IllDefinedIncentive { .. })
        ));
    }

    #[test]
    fn explicit_matrix_rows_are_parent_distributions() {
        let m = MutationMatrix::from_rows(&[[0.9, 0.1, 0.0], [0.0, 1.0, 0.0], [0.2, 0.3, 0.5]])
            .unwrap();
        let p = reproduction_probabilities(&[0.0, 0.0, 2.0], &m).unwrap();
        assert_eq!(p, vec![0.2, 0.3, 0.5]);
    }
}
