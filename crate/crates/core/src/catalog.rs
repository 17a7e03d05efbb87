//! Named fitness landscapes.

use alloc::vec;

use crate::dynamics::GameMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Landscape {
    /// Constant fitness on `n` types.
    Neutral(usize),
    /// Two types, the first with relative fitness `r`: `[[r, r], [1, 1]]`.
    Moran { r: f64 },
    /// `[[1, 2], [2, 1]]`; the mixed state is stable for the replicator dynamic.
    HawkDove,
    /// `[[0, 1], [1, 0]]`.
    ZeroDiagonal,
    /// Generalized rock-paper-scissors: `[[0, -b, a], [a, 0, -b], [-b, a, 0]]`.
    Rsp { a: f64, b: f64 },
}

impl Landscape {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Landscape::Neutral(n) if n < 2 => Err(Error::InvalidDimension { types: n, size: 0 }),
            Landscape::Moran { r } if !(r.is_finite() && r > 0.0) => Err(Error::InvalidParameter(
                alloc::format!("Moran relative fitness must be positive, got {r}"),
            )),
            Landscape::Rsp { a, b } if !(a.is_finite() && b.is_finite()) => Err(
                Error::InvalidParameter(alloc::format!("RSP parameters must be finite, got a={a}, b={b}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn types(&self) -> usize {
        match *self {
            Landscape::Neutral(n) => n,
            Landscape::Moran { .. } | Landscape::HawkDove | Landscape::ZeroDiagonal => 2,
            Landscape::Rsp { .. } => 3,
        }
    }

    pub fn matrix(&self) -> GameMatrix {
        let (n, entries) = match *self {
            Landscape::Neutral(n) => (n, vec![1.0; n * n]),
            Landscape::Moran { r } => (2, vec![r, r, 1.0, 1.0]),
            Landscape::HawkDove => (2, vec![1.0, 2.0, 2.0, 1.0]),
            Landscape::ZeroDiagonal => (2, vec![0.0, 1.0, 1.0, 0.0]),
            Landscape::Rsp { a, b } => (3, vec![0.0, -b, a, a, 0.0, -b, -b, a, 0.0]),
        };
        GameMatrix::new(n, entries).expect("catalog matrices are square and finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Incentive;
    use crate::lattice::Lattice;

    #[test]
    fn catalog_matrices() {
        assert_eq!(
            Landscape::Moran { r: 2.0 }.matrix(),
            GameMatrix::from_rows(&[[2.0, 2.0], [1.0, 1.0]]).unwrap()
        );
        assert_eq!(
            Landscape::Rsp { a: 1.0, b: 1.0 }.matrix(),
            GameMatrix::from_rows(&[[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]]).unwrap()
        );
        assert_eq!(Landscape::Neutral(3).matrix(), GameMatrix::new(3, vec![1.0; 9]).unwrap());
        assert_eq!(
            Landscape::HawkDove.matrix(),
            GameMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap()
        );
        assert_eq!(
            Landscape::ZeroDiagonal.matrix(),
            GameMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()
        );
        assert!(Landscape::Moran { r: 0.0 }.validate().is_err());
        assert!(Landscape::Neutral(1).validate().is_err());
    }

    #[test]
    fn rsp_is_circulant() {
        for (a, b) in [(1.0, 1.0), (2.0, -0.5), (-1.5, 0.3)] {
            let m = Landscape::Rsp { a, b }.matrix();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(m.get(i, j), m.get((i + 1) % 3, (j + 1) % 3));
                }
            }
        }
    }

    #[test]
    fn neutral_landscape_gives_population_distribution() {
        for n in 2..5 {
            let game = Landscape::Neutral(n).matrix();
            let lattice = Lattice::new(n, 7).unwrap();
            for state in lattice.states() {
                let x = state.distribution();
                for incentive in [Incentive::Replicator { q: 1.0 }, Incentive::Fermi { q: 1.0, beta: 3.0 }] {
                    let phi = incentive.values(&game, &state).unwrap();
                    for (a, b) in phi.iter().zip(&x) {
                        assert!((a - b).abs() < 1e-15);
                    }
                }
            }
        }
    }
}
