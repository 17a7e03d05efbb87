//! Parameter sweeps over grids of up to two axes.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use incentive_core::entropy::entropy_rate_bound;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{IncentiveConfig, LandscapeConfig, MutationConfig, ProcessConfig};
use crate::pipeline::analyze;
use crate::{Error, Result};

/// Slack allowed above the entropy-rate bound before a row counts as a
/// violation.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "mu")]
    Mu,
    #[serde(rename = "N")]
    Size,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "r")]
    R,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "k")]
    K,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: Param,
    pub values: Vec<f64>,
}

/// Mutation rate tied to the population size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum DerivedMu {
    /// `mu = (n - 1) / n * (N + offset)^-k`. The default offset of 1 keeps
    /// the neutral `alpha` fixed at `1 / n` for `k = 1`; offset 0 gives
    /// `N^-k`.
    #[serde(rename = "scaling_k")]
    ScalingK {
        k: f64,
        #[serde(default = "default_offset")]
        offset: u32,
    },
    /// `mu = c / N`.
    #[serde(rename = "c_over_N")]
    COverN { c: f64 },
}

fn default_offset() -> u32 {
    1
}

impl DerivedMu {
    pub fn mu(&self, types: usize, size: u32, k: Option<f64>) -> f64 {
        match *self {
            DerivedMu::ScalingK { k: base, offset } => {
                let n = types as f64;
                (n - 1.0) / n * (size as f64 + offset as f64).powf(-k.unwrap_or(base))
            }
            DerivedMu::COverN { c } => c / size as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(flatten)]
    pub base: ProcessConfig,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived_mu: Option<DerivedMu>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

/// One grid point. Parameters that do not apply to the process are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: u32,
    pub mu: Option<f64>,
    pub q: Option<f64>,
    pub beta: Option<f64>,
    pub landscape: String,
    pub param_a: Option<f64>,
    pub param_b: Option<f64>,
    pub r: Option<f64>,
    pub k: Option<f64>,
    pub entropy_rate: Option<f64>,
    pub bound: Option<f64>,
    pub residual: Option<f64>,
    pub method: Option<String>,
    pub error: Option<String>,
}

/// Rows in grid order, with the time spent on each. Timings are not
/// written to output files, which stay a deterministic function of the
/// spec.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub wall_times: Vec<Duration>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&crate::formats::read_file(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Sweep(m));
        if self.axes.len() > 2 {
            return fail(format!("at most two axes, found {}", self.axes.len()));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            let name = param_name(axis.name);
            if self.axes[..i].iter().any(|a| a.name == axis.name) {
                return fail(format!("axis {name} appears twice"));
            }
            if axis.values.is_empty() {
                return fail(format!("axis {name} has no values"));
            }
            if let Some(v) = axis.values.iter().find(|v| !v.is_finite()) {
                return fail(format!("axis {name} has non-finite value {v}"));
            }
            let applies = match axis.name {
                Param::Mu => {
                    if self.derived_mu.is_some() {
                        return fail("derived_mu and a mu axis are mutually exclusive".into());
                    }
                    !matches!(self.base.mutation, Some(MutationConfig::Matrix { .. }))
                }
                Param::Size => {
                    if let Some(v) = axis.values.iter().find(|v| v.fract() != 0.0 || **v < 1.0 || **v > u32::MAX as f64) {
                        return fail(format!("axis N has non-integral or non-positive value {v}"));
                    }
                    true
                }
                Param::Beta => matches!(self.base.incentive, IncentiveConfig::Fermi { .. }),
                Param::Q => matches!(
                    self.base.incentive,
                    IncentiveConfig::Fermi { .. } | IncentiveConfig::Replicator { .. }
                ),
                Param::R => matches!(self.base.landscape, LandscapeConfig::Moran { .. }),
                Param::A | Param::B => matches!(self.base.landscape, LandscapeConfig::Rsp { .. }),
                Param::K => matches!(self.derived_mu, Some(DerivedMu::ScalingK { .. })),
            };
            if !applies {
                return fail(format!("axis {name} does not apply to this process"));
            }
        }
        if self.derived_mu.is_some() && self.base.mutation.is_some() {
            return fail("derived_mu and an explicit mutation model are mutually exclusive".into());
        }
        Ok(())
    }

    /// Grid points in row-major order: the first axis varies slowest.
    pub fn grid(&self) -> Vec<(ProcessConfig, Option<f64>)> {
        let base_k = match self.derived_mu {
            Some(DerivedMu::ScalingK { k, .. }) => Some(k),
            _ => None,
        };
        let mut points = vec![(self.base.clone(), base_k)];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|(config, k)| axis.values.iter().map(move |&v| apply(config.clone(), k, axis.name, v)))
                .collect();
        }
        if let Some(rule) = self.derived_mu {
            for (config, k) in &mut points {
                let mu = rule.mu(config.n, config.size, *k);
                config.mutation = Some(MutationConfig::Uniform { mu });
            }
        }
        points
    }

    /// Evaluates every grid point on a pool of `threads` workers (`None`
    /// for one per core). Failures at a point are recorded in its row; a
    /// rate above the bound aborts the sweep.
    pub fn run(&self, threads: Option<usize>) -> Result<Sweep> {
        self.validate()?;
        let points = self.grid();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()?;
        let timed: Vec<(SweepRow, Duration)> =
            pool.install(|| points.par_iter().map(|(config, k)| evaluate(config, *k)).collect());
        for (point, (row, _)) in timed.iter().enumerate() {
            if let (Some(rate), Some(bound)) = (row.entropy_rate, row.bound) {
                if rate.is_nan() || rate > bound + BOUND_SLACK {
                    return Err(Error::BoundViolation { point, rate, bound });
                }
            }
        }
        let (rows, wall_times) = timed.into_iter().unzip();
        Ok(Sweep { rows, wall_times })
    }

    /// Runs the sweep and writes the configured output. The output file is
    /// created before any computation, so an unwritable path fails fast.
    pub fn execute(&self, threads: Option<usize>) -> Result<Sweep> {
        self.validate()?;
        let sink = match &self.output {
            Some(out) => Some((File::create(&out.path).map_err(|e| Error::io(&out.path, e))?, out.format)),
            None => None,
        };
        let sweep = self.run(threads)?;
        if let Some((file, format)) = sink {
            write_rows(BufWriter::new(file), format, &sweep.rows)?;
        }
        Ok(sweep)
    }
}

fn param_name(p: Param) -> &'static str {
    match p {
        Param::Mu => "mu",
        Param::Size => "N",
        Param::Beta => "beta",
        Param::Q => "q",
        Param::R => "r",
        Param::A => "a",
        Param::B => "b",
        Param::K => "k",
    }
}

fn apply(mut c: ProcessConfig, mut k: Option<f64>, param: Param, v: f64) -> (ProcessConfig, Option<f64>) {
    match (param, &mut c.incentive, &mut c.landscape) {
        (Param::Mu, _, _) => c.mutation = Some(MutationConfig::Uniform { mu: v }),
        (Param::Size, _, _) => c.size = v as u32,
        (Param::Beta, IncentiveConfig::Fermi { beta, .. }, _) => *beta = v,
        (Param::Q, IncentiveConfig::Fermi { q, .. } | IncentiveConfig::Replicator { q }, _) => *q = v,
        (Param::R, _, LandscapeConfig::Moran { r }) => *r = v,
        (Param::A, _, LandscapeConfig::Rsp { a, .. }) => *a = v,
        (Param::B, _, LandscapeConfig::Rsp { b, .. }) => *b = v,
        (Param::K, _, _) => k = Some(v),
        _ => unreachable!("axes are validated against the process"),
    }
    (c, k)
}

fn evaluate(config: &ProcessConfig, k: Option<f64>) -> (SweepRow, Duration) {
    let start = Instant::now();
    let (q, beta) = match config.incentive {
        IncentiveConfig::Replicator { q } => (Some(q), None),
        IncentiveConfig::Fermi { q, beta } => (Some(q), Some(beta)),
        _ => (None, None),
    };
    let (param_a, param_b, r) = match config.landscape {
        LandscapeConfig::Rsp { a, b } => (Some(a), Some(b), None),
        LandscapeConfig::Moran { r } => (None, None, Some(r)),
        _ => (None, None, None),
    };
    let mu = match config.mutation() {
        MutationConfig::Uniform { mu } => Some(mu),
        MutationConfig::Matrix { .. } => None,
    };
    let mut row = SweepRow {
        n: config.n,
        size: config.size,
        mu,
        q,
        beta,
        landscape: config.landscape.name().to_string(),
        param_a,
        param_b,
        r,
        k,
        entropy_rate: None,
        bound: entropy_rate_bound(config.n).ok(),
        residual: None,
        method: None,
        error: None,
    };
    match config.build().and_then(|p| analyze(&p)) {
        Ok(analysis) => {
            row.entropy_rate = Some(analysis.report.entropy_rate);
            row.residual = Some(analysis.report.residual);
            row.method = Some(analysis.stationary.method().as_str().to_string());
        }
        Err(e) => {
            log::info!("grid point n={} N={} failed: {e}", config.n, config.size);
            row.error = Some(e.to_string());
        }
    }
    (row, start.elapsed())
}

pub fn write_rows(mut w: impl Write, format: Format, rows: &[SweepRow]) -> Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv::Writer::from_writer(&mut w);
            if rows.is_empty() {
                out.write_record(CSV_COLUMNS)?;
            }
            for row in rows {
                out.serialize(row)?;
            }
            out.flush().map_err(Error::Write)?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w).map_err(Error::Write)?;
        }
    }
    w.flush().map_err(Error::Write)
}

pub const CSV_COLUMNS: [&str; 15] = [
    "n",
    "N",
    "mu",
    "q",
    "beta",
    "landscape",
    "param_a",
    "param_b",
    "r",
    "k",
    "entropy_rate",
    "bound",
    "residual",
    "method",
    "error",
];

pub fn read_rows(r: impl Read, format: Format) -> Result<Vec<SweepRow>> {
    match format {
        Format::Csv => csv::Reader::from_reader(r)
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(Error::from),
        Format::Json => Ok(serde_json::from_reader(r)?),
    }
}
