use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{reproduction_probabilities, GameMatrix, Incentive, Mutation, MutationMatrix};
use crate::kernel::{TransitionKernel, ROW_SUM_TOL};
use crate::lattice::{Lattice, PopulationState, StateIndex};
use crate::{Error, Result};

/// An incentive process: birth proportional to the incentive with
/// mutation, death uniformly at random.
#[derive(Debug, Clone, PartialEq)]
pub struct IncentiveProcess {
    lattice: Lattice,
    incentive: Incentive,
    game: GameMatrix,
    mutation: Mutation,
    mutation_matrix: MutationMatrix,
}

impl IncentiveProcess {
    pub fn new(
        types: usize,
        size: u32,
        incentive: Incentive,
        game: GameMatrix,
        mutation: Mutation,
    ) -> Result<Self> {
        let lattice = Lattice::new(types, size)?;
        if game.dim() != types {
            return Err(Error::DimensionMismatch {
                expected: types,
                found: game.dim(),
            });
        }
        incentive.validate()?;
        if incentive == Incentive::BestReply && types != 2 {
            return Err(Error::Unsupported(format!(
                "best-reply incentive is defined for 2 types, got {types}"
            )));
        }
        let mutation_matrix = mutation.matrix(types)?;
        Ok(IncentiveProcess {
            lattice,
            incentive,
            game,
            mutation,
            mutation_matrix,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn incentive(&self) -> Incentive {
        self.incentive
    }

    pub fn game(&self) -> &GameMatrix {
        &self.game
    }

    pub fn mutation(&self) -> &Mutation {
        &self.mutation
    }

    /// True when the incentive reduces to `phi = x` everywhere, so the
    /// process is the neutral Moran process with mutation.
    pub fn is_neutral(&self) -> bool {
        match self.incentive {
            Incentive::Neutral => true,
            Incentive::Replicator { q } => {
                q == 1.0 && self.game.is_constant() && self.game.get(0, 0) > 0.0
            }
            Incentive::Fermi { q, .. } => q == 1.0 && self.game.is_constant(),
            Incentive::BestReply => self.game.is_constant(),
        }
    }

    // Extension seam for state-dependent mutation; constant for now.
    fn mutation_at(&self, _counts: &[u32]) -> &MutationMatrix {
        &self.mutation_matrix
    }

    /// Offspring-type distribution at `state`.
    pub fn reproduction_probabilities(&self, state: &PopulationState) -> Result<Vec<f64>> {
        let phi = self.incentive.values(&self.game, state)?;
        reproduction_probabilities(&phi, self.mutation_at(state.counts()))
            .map_err(|e| e.at_state(state.counts()))
    }

    /// Outgoing transitions of `state` with positive probability, including
    /// the self-loop, sorted by target rank.
    pub fn transition_row(&self, state: &PopulationState) -> Result<Vec<(PopulationState, f64)>> {
        let index = self.lattice.rank(state.counts())?;
        let row = self.kernel_row(index)?;
        Ok(row
            .into_iter()
            .map(|(j, p)| (self.lattice.unrank(j).expect("rank from lattice"), p))
            .collect())
    }

    /// Row `index` of the kernel as `(target, probability)` pairs.
    pub fn kernel_row(&self, index: StateIndex) -> Result<Vec<(StateIndex, f64)>> {
        let n = self.lattice.types();
        let mut counts = vec![0u32; n];
        if index >= self.lattice.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.lattice.len(),
            });
        }
        self.lattice.unrank_into(index, &mut counts);
        let size = self.lattice.size() as f64;
        let x: Vec<f64> = counts.iter().map(|&c| c as f64 / size).collect();

        let phi = self
            .incentive
            .values_at(&self.game, &x)
            .map_err(|e| e.at_state(&counts))?;
        let p = reproduction_probabilities(&phi, self.mutation_at(&counts))
            .map_err(|e| e.at_state(&counts))?;

        let mut row = Vec::with_capacity(n * (n - 1) + 1);
        let mut outflow = 0.0;
        for gain in 0..n {
            for lose in 0..n {
                if gain == lose || counts[lose] == 0 {
                    continue;
                }
                let prob = p[gain] * x[lose];
                if prob > 0.0 {
                    counts[lose] -= 1;
                    counts[gain] += 1;
                    row.push((self.lattice.rank_unchecked(&counts), prob));
                    counts[gain] -= 1;
                    counts[lose] += 1;
                    outflow += prob;
                }
            }
        }
        let stay = 1.0 - outflow;
        if stay < 0.0 {
            if -stay > ROW_SUM_TOL {
                return Err(Error::NumericalInconsistency {
                    state: index,
                    defect: -stay,
                });
            }
            row.iter_mut().for_each(|(_, prob)| *prob /= outflow);
        } else if stay > 0.0 {
            row.push((index, stay));
        }
        row.sort_unstable_by_key(|&(j, _)| j);
        Ok(row)
    }

    /// The full transition kernel, one row per lattice state.
    pub fn build_kernel(&self) -> Result<TransitionKernel> {
        let rows = (0..self.lattice.len())
            .map(|i| self.kernel_row(i))
            .collect::<Result<Vec<_>>>()?;
        TransitionKernel::from_lattice_rows(self.lattice.clone(), rows)
    }
}
