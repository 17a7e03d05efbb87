//! Sparse row-stochastic transition matrices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{GameMatrix, Incentive, Mutation};
use crate::lattice::{Lattice, PopulationState, StateIndex};
use crate::IncentiveProcess;
use crate::{Error, Result};

/// Tolerance on row sums of a stochastic matrix.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Transition matrix in compressed sparse row layout. Only positive
/// probabilities are stored, columns ascending within each row, and the
/// self-loop is stored like any other entry.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    lattice: Option<Lattice>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl TransitionKernel {
    /// A kernel over an arbitrary finite state space, one list of
    /// `(column, probability)` per row.
    pub fn from_rows(rows: Vec<Vec<(StateIndex, f64)>>) -> Result<Self> {
        Self::assemble(None, rows)
    }

    /// A kernel whose rows are indexed by the states of `lattice`.
    pub fn from_lattice_rows(lattice: Lattice, rows: Vec<Vec<(StateIndex, f64)>>) -> Result<Self> {
        if rows.len() != lattice.len() {
            return Err(Error::DimensionMismatch {
                expected: lattice.len(),
                found: rows.len(),
            });
        }
        Self::assemble(Some(lattice), rows)
    }

    fn assemble(lattice: Option<Lattice>, rows: Vec<Vec<(StateIndex, f64)>>) -> Result<Self> {
        let len = rows.len();
        if len == 0 {
            return Err(Error::InvalidMatrix("kernel has no rows".into()));
        }
        if len > u32::MAX as usize {
            return Err(Error::InvalidMatrix("kernel too large".into()));
        }
        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(len + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut total = 0.0;
            for (k, &(c, p)) in row.iter().enumerate() {
                if c >= len {
                    return Err(Error::IndexOutOfRange { index: c, len });
                }
                if k > 0 && row[k - 1].0 == c {
                    return Err(Error::InvalidMatrix(format!("row {i} repeats column {c}")));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {c}) = {p} is not a probability"
                    )));
                }
                total += p;
                if p > 0.0 {
                    cols.push(c as u32);
                    vals.push(p);
                }
            }
            if libm::fabs(total - 1.0) > ROW_SUM_TOL {
                return Err(Error::InvalidMatrix(format!("row {i} sums to {total}")));
            }
            row_ptr.push(cols.len());
        }
        Ok(TransitionKernel {
            lattice,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn max_row_nnz(&self) -> usize {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Columns and probabilities of row `i`.
    pub fn row(&self, i: StateIndex) -> (&[u32], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[range.clone()], &self.vals[range])
    }

    pub fn row_entries(&self, i: StateIndex) -> impl Iterator<Item = (StateIndex, f64)> + '_ {
        let (cols, vals) = self.row(i);
        cols.iter().map(|&c| c as usize).zip(vals.iter().copied())
    }

    /// Iterates `(row, col, probability)` over all stored entries.
    pub fn triplets(&self) -> impl Iterator<Item = (StateIndex, StateIndex, f64)> + '_ {
        (0..self.len()).flat_map(move |i| self.row_entries(i).map(move |(j, p)| (i, j, p)))
    }

    /// `T[i][j]`, zero when not stored.
    pub fn get(&self, i: StateIndex, j: StateIndex) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// `out = s T`.
    pub fn left_multiply(&self, s: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (i, &si) in s.iter().enumerate() {
            if si == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&c, &p) in cols.iter().zip(vals) {
                out[c as usize] += si * p;
            }
        }
    }

    /// `max_j |(s T)_j - s_j|`.
    pub fn residual(&self, s: &[f64]) -> f64 {
        let mut next = vec![0.0; self.len()];
        self.left_multiply(s, &mut next);
        next.iter()
            .zip(s)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }

    pub fn has_self_loop(&self) -> bool {
        (0..self.len()).any(|i| self.get(i, i) > 0.0)
    }

    /// Component id per state for the strongly connected components of the
    /// support graph, and the number of components.
    pub fn strongly_connected_components(&self) -> (Vec<usize>, usize) {
        const UNSET: usize = usize::MAX;
        let len = self.len();
        let mut index = vec![UNSET; len];
        let mut low = vec![0usize; len];
        let mut on_stack = vec![false; len];
        let mut component = vec![UNSET; len];
        let mut stack = Vec::new();
        let mut frames: Vec<(usize, usize)> = Vec::new();
        let mut next_index = 0;
        let mut count = 0;

        for root in 0..len {
            if index[root] != UNSET {
                continue;
            }
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            frames.push((root, self.row_ptr[root]));

            while let Some(frame) = frames.last_mut() {
                let v = frame.0;
                if frame.1 < self.row_ptr[v + 1] {
                    let w = self.cols[frame.1] as usize;
                    frame.1 += 1;
                    if index[w] == UNSET {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, self.row_ptr[w]));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    frames.pop();
                    if low[v] == index[v] {
                        while let Some(w) = stack.pop() {
                            on_stack[w] = false;
                            component[w] = count;
                            if w == v {
                                break;
                            }
                        }
                        count += 1;
                    }
                    if let Some(parent) = frames.last() {
                        low[parent.0] = low[parent.0].min(low[v]);
                    }
                }
            }
        }
        (component, count)
    }

    /// True iff the support graph is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        self.strongly_connected_components().1 == 1
    }

    /// Closed communicating classes, each as ascending state indices. The
    /// classes are ordered by their smallest state.
    pub fn recurrent_classes(&self) -> Vec<Vec<StateIndex>> {
        let (component, count) = self.strongly_connected_components();
        let mut closed = vec![true; count];
        for (i, j, _) in self.triplets() {
            if component[i] != component[j] {
                closed[component[i]] = false;
            }
        }
        let mut classes: Vec<Vec<StateIndex>> = vec![Vec::new(); count];
        for (i, &c) in component.iter().enumerate() {
            if closed[c] {
                classes[c].push(i);
            }
        }
        let mut classes: Vec<_> = classes.into_iter().filter(|c| !c.is_empty()).collect();
        classes.sort_by_key(|c| c[0]);
        classes
    }

    /// The kernel restricted to a closed class. Row `k` of the result is
    /// state `class[k]` of `self`.
    pub fn restrict(&self, class: &[StateIndex]) -> Result<TransitionKernel> {
        let mut position = vec![usize::MAX; self.len()];
        for (k, &i) in class.iter().enumerate() {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                });
            }
            position[i] = k;
        }
        let mut rows = Vec::with_capacity(class.len());
        for &i in class {
            let mut row = Vec::new();
            for (j, p) in self.row_entries(i) {
                if position[j] == usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "state {i} leaves the class through state {j}"
                    )));
                }
                row.push((position[j], p));
            }
            rows.push(row);
        }
        Self::from_rows(rows)
    }
}

/// Builds the kernel of the incentive process with the given ingredients.
pub fn build_kernel(
    types: usize,
    size: u32,
    incentive: Incentive,
    game: GameMatrix,
    mutation: Mutation,
) -> Result<TransitionKernel> {
    IncentiveProcess::new(types, size, incentive, game, mutation)?.build_kernel()
}

/// Outgoing transitions of `state`, self-loop included.
pub fn transition_row(
    state: &PopulationState,
    incentive: Incentive,
    game: &GameMatrix,
    mutation: &Mutation,
) -> Result<Vec<(PopulationState, f64)>> {
    let size = state.size();
    IncentiveProcess::new(state.types(), size, incentive, game.clone(), mutation.clone())?
        .transition_row(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_rows() {
        assert!(TransitionKernel::from_rows(vec![vec![(0, 0.5)]]).is_err());
        assert!(TransitionKernel::from_rows(vec![vec![(1, 1.0)]]).is_err());
        assert!(TransitionKernel::from_rows(vec![vec![(0, 0.5), (0, 0.5)]]).is_err());
        assert!(TransitionKernel::from_rows(vec![vec![(0, 1.5), (0, -0.5)]]).is_err());
        assert!(TransitionKernel::from_rows(Vec::new()).is_err());
    }

    #[test]
    fn stores_sorted_positive_entries() {
        let k = TransitionKernel::from_rows(vec![
            vec![(1, 0.25), (0, 0.75), (2, 0.0)],
            vec![(1, 1.0)],
            vec![(0, 0.5), (2, 0.5)],
        ])
        .unwrap();
        assert_eq!(k.row(0), (&[0u32, 1][..], &[0.75, 0.25][..]));
        assert_eq!(k.get(0, 2), 0.0);
        assert_eq!(k.nnz(), 5);
        assert_eq!(k.max_row_nnz(), 2);
    }

    #[test]
    fn classes_of_a_reducible_chain() {
        // 0 -> 1 <-> 2, 3 absorbing, 4 -> 3
        let k = TransitionKernel::from_rows(vec![
            vec![(0, 0.5), (1, 0.5)],
            vec![(2, 1.0)],
            vec![(1, 1.0)],
            vec![(3, 1.0)],
            vec![(3, 1.0)],
        ])
        .unwrap();
        assert!(!k.is_irreducible());
        assert_eq!(k.recurrent_classes(), vec![vec![1, 2], vec![3]]);
        let sub = k.restrict(&[1, 2]).unwrap();
        assert_eq!(sub.get(0, 1), 1.0);
        assert!(sub.is_irreducible());
        assert!(k.restrict(&[0, 1]).is_err());
    }

    #[test]
    fn left_multiply_and_residual() {
        let k = TransitionKernel::from_rows(vec![vec![(0, 0.9), (1, 0.1)], vec![(0, 0.1), (1, 0.9)]])
            .unwrap();
        assert!(k.is_irreducible());
        assert!(k.residual(&[0.5, 0.5]) < 1e-16);
        assert!((k.residual(&[1.0, 0.0]) - 0.1).abs() < 1e-15);
    }
}
