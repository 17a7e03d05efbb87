//! Serializable process descriptions.

use incentive_core::catalog::Landscape;
use incentive_core::dynamics::{GameMatrix, Incentive, Mutation, MutationMatrix};
use incentive_core::IncentiveProcess;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IncentiveConfig {
    Replicator {
        #[serde(default = "one")]
        q: f64,
    },
    Fermi {
        #[serde(default = "one")]
        q: f64,
        #[serde(default = "one")]
        beta: f64,
    },
    BestReply,
    Neutral,
}

impl From<IncentiveConfig> for Incentive {
    fn from(c: IncentiveConfig) -> Self {
        match c {
            IncentiveConfig::Replicator { q } => Incentive::Replicator { q },
            IncentiveConfig::Fermi { q, beta } => Incentive::Fermi { q, beta },
            IncentiveConfig::BestReply => Incentive::BestReply,
            IncentiveConfig::Neutral => Incentive::Neutral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MutationConfig {
    Uniform { mu: f64 },
    Matrix { matrix: Vec<Vec<f64>> },
}

impl MutationConfig {
    pub fn to_mutation(&self) -> Result<Mutation> {
        Ok(match self {
            MutationConfig::Uniform { mu } => Mutation::Uniform(*mu),
            MutationConfig::Matrix { matrix } => Mutation::Matrix(MutationMatrix::from_rows(matrix)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LandscapeConfig {
    Neutral,
    Moran { r: f64 },
    HawkDove,
    ZeroDiagonal,
    Rsp { a: f64, b: f64 },
    Matrix { matrix: Vec<Vec<f64>> },
}

impl LandscapeConfig {
    pub fn name(&self) -> &'static str {
        match self {
            LandscapeConfig::Neutral => "neutral",
            LandscapeConfig::Moran { .. } => "moran",
            LandscapeConfig::HawkDove => "hawk_dove",
            LandscapeConfig::ZeroDiagonal => "zero_diagonal",
            LandscapeConfig::Rsp { .. } => "rsp",
            LandscapeConfig::Matrix { .. } => "matrix",
        }
    }

    /// The catalog entry, if this is one.
    pub fn catalog(&self, types: usize) -> Option<Landscape> {
        Some(match *self {
            LandscapeConfig::Neutral => Landscape::Neutral(types),
            LandscapeConfig::Moran { r } => Landscape::Moran { r },
            LandscapeConfig::HawkDove => Landscape::HawkDove,
            LandscapeConfig::ZeroDiagonal => Landscape::ZeroDiagonal,
            LandscapeConfig::Rsp { a, b } => Landscape::Rsp { a, b },
            LandscapeConfig::Matrix { .. } => return None,
        })
    }

    pub fn game(&self, types: usize) -> Result<GameMatrix> {
        match (self, self.catalog(types)) {
            (_, Some(landscape)) => {
                landscape.validate()?;
                if landscape.types() != types {
                    return Err(incentive_core::Error::InvalidParameter(format!(
                        "the {} landscape has {} types, the process has {types}",
                        self.name(),
                        landscape.types()
                    ))
                    .into());
                }
                Ok(landscape.matrix())
            }
            (LandscapeConfig::Matrix { matrix }, None) => Ok(GameMatrix::from_rows(matrix)?),
            _ => unreachable!("only explicit matrices lack a catalog entry"),
        }
    }
}

/// A complete process: lattice dimensions, incentive, mutation and
/// landscape. Without a mutation entry the rate defaults to `1 / N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: u32,
    pub incentive: IncentiveConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<MutationConfig>,
    pub landscape: LandscapeConfig,
}

impl ProcessConfig {
    pub fn mutation(&self) -> MutationConfig {
        self.mutation
            .clone()
            .unwrap_or(MutationConfig::Uniform { mu: 1.0 / self.size.max(1) as f64 })
    }

    pub fn build(&self) -> Result<IncentiveProcess> {
        let game = self.landscape.game(self.n)?;
        let mutation = self.mutation().to_mutation()?;
        IncentiveProcess::new(self.n, self.size, self.incentive.into(), game, mutation).map_err(Error::from)
    }
}
