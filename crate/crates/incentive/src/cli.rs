//! The `incentive` command-line tool.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use incentive_core::entropy::plug_in_entropy_rate;
use incentive_core::sampler::{sample_trajectory, TrajectoryConfig, GENERATOR};
use incentive_core::Lattice;

use crate::config::{IncentiveConfig, LandscapeConfig, MutationConfig, ProcessConfig};
use crate::formats::{self, EntropySummary, TrajectoryHeader};
use crate::pipeline::{analyze, build_kernel, solve};
use crate::sweep::SweepSpec;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "incentive", version, about = "Entropy rates of incentive processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Size and central states of the state lattice
    States {
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        size: u32,
        /// Print every state as `rank a1 ... an`
        #[arg(long)]
        list: bool,
    },
    /// Build the transition kernel and dump it as `row col prob` triplets
    Kernel {
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Solve for the stationary distribution and write it as CSV
    Stationary {
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Entropy rate, bound and solver residual as JSON
    EntropyRate {
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a parameter sweep described by a JSON file
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; defaults to one per core
        #[arg(long, env = "INCENTIVE_THREADS")]
        threads: Option<usize>,
    },
    /// Simulate a trajectory
    Sample {
        #[command(flatten)]
        process: ProcessArgs,
        /// Starting state rank; defaults to the first central state
        #[arg(long)]
        start: Option<usize>,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Plug-in entropy rate of a trajectory file
    Estimate {
        #[arg(long)]
        trajectory: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LandscapeArg {
    Neutral,
    Moran,
    HawkDove,
    ZeroDiag,
    Rsp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum IncentiveArg {
    Replicator,
    Fermi,
    BestReply,
    Neutral,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    /// Number of types; implied by two- and three-type landscapes
    #[arg(long)]
    n: Option<usize>,
    /// Population size
    #[arg(long = "N")]
    size: u32,
    /// Mutation probability; defaults to 1/N
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_enum, default_value = "neutral")]
    landscape: LandscapeArg,
    /// Relative fitness for the moran landscape
    #[arg(long)]
    r: Option<f64>,
    /// Rock-paper-scissors parameter a
    #[arg(long)]
    a: Option<f64>,
    /// Rock-paper-scissors parameter b
    #[arg(long)]
    b: Option<f64>,
    /// Game matrix JSON file, replacing --landscape
    #[arg(long, conflicts_with = "landscape")]
    matrix: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fermi")]
    incentive: IncentiveArg,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

fn required(value: Option<f64>, flag: &str, landscape: &str) -> Result<f64> {
    value.ok_or_else(|| {
        incentive_core::Error::InvalidParameter(format!("--{flag} is required for the {landscape} landscape")).into()
    })
}

impl ProcessArgs {
    pub fn to_config(&self) -> Result<ProcessConfig> {
        let landscape = match (&self.matrix, self.landscape) {
            (Some(path), _) => {
                let game = formats::load_game_matrix(path)?;
                LandscapeConfig::Matrix { matrix: game.rows().map(<[f64]>::to_vec).collect() }
            }
            (None, LandscapeArg::Neutral) => LandscapeConfig::Neutral,
            (None, LandscapeArg::Moran) => LandscapeConfig::Moran { r: required(self.r, "r", "moran")? },
            (None, LandscapeArg::HawkDove) => LandscapeConfig::HawkDove,
            (None, LandscapeArg::ZeroDiag) => LandscapeConfig::ZeroDiagonal,
            (None, LandscapeArg::Rsp) => LandscapeConfig::Rsp {
                a: required(self.a, "a", "rsp")?,
                b: required(self.b, "b", "rsp")?,
            },
        };
        let implied = match &landscape {
            LandscapeConfig::Neutral => None,
            LandscapeConfig::Matrix { matrix } => Some(matrix.len()),
            other => other.catalog(0).map(|l| l.types()),
        };
        let n = match (self.n, implied) {
            (Some(n), _) => n,
            (None, Some(n)) => n,
            (None, None) => {
                return Err(incentive_core::Error::InvalidParameter(
                    "--n is required for the neutral landscape".into(),
                )
                .into())
            }
        };
        let incentive = match self.incentive {
            IncentiveArg::Replicator => IncentiveConfig::Replicator { q: self.q },
            IncentiveArg::Fermi => IncentiveConfig::Fermi { q: self.q, beta: self.beta },
            IncentiveArg::BestReply => IncentiveConfig::BestReply,
            IncentiveArg::Neutral => IncentiveConfig::Neutral,
        };
        Ok(ProcessConfig {
            n,
            size: self.size,
            incentive,
            mutation: self.mu.map(|mu| MutationConfig::Uniform { mu }),
            landscape,
        })
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::States { n, size, list } => {
            let lattice = Lattice::new(n, size)?;
            let mut out = sink(None)?;
            if list {
                for (rank, state) in lattice.states().enumerate() {
                    let counts: Vec<String> = state.counts().iter().map(u32::to_string).collect();
                    writeln!(out, "{rank} {}", counts.join(" ")).map_err(Error::Write)?;
                }
            } else {
                let central = lattice
                    .central_states()
                    .into_iter()
                    .map(|r| lattice.unrank(r).map(|s| s.into_counts()))
                    .collect::<incentive_core::Result<Vec<_>>>()?;
                let doc = serde_json::json!({ "n": n, "N": size, "states": lattice.len(), "central": central });
                writeln!(out, "{doc}").map_err(Error::Write)?;
            }
            out.flush().map_err(Error::Write)
        }
        Command::Kernel { process, output } => {
            let kernel = build_kernel(&process.to_config()?.build()?)?;
            formats::write_kernel(sink(output.as_deref())?, &kernel)
        }
        Command::Stationary { process, output } => {
            let process = process.to_config()?.build()?;
            let kernel = build_kernel(&process)?;
            let s = solve(&process, &kernel)?;
            log::info!("method {}, residual {:e}", s.method(), s.residual());
            formats::write_stationary(sink(output.as_deref())?, process.lattice(), &s)
        }
        Command::EntropyRate { process, output } => {
            let analysis = analyze(&process.to_config()?.build()?)?;
            log::info!("stationary method {}", analysis.stationary.method());
            let mut out = sink(output.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &EntropySummary::from(&analysis.report))?;
            writeln!(out).map_err(Error::Write)?;
            out.flush().map_err(Error::Write)
        }
        Command::Sweep { config, threads } => {
            let spec = SweepSpec::load(&config)?;
            let sweep = spec.execute(threads)?;
            let failed = sweep.rows.iter().filter(|r| r.error.is_some()).count();
            match &spec.output {
                Some(out) => eprintln!(
                    "{} rows ({failed} failed) written to {}",
                    sweep.rows.len(),
                    out.path.display()
                ),
                None => crate::sweep::write_rows(sink(None)?, crate::sweep::Format::Csv, &sweep.rows)?,
            }
            Ok(())
        }
        Command::Sample { process, start, length, seed, output } => {
            let process = process.to_config()?.build()?;
            let kernel = build_kernel(&process)?;
            let start = start.unwrap_or_else(|| process.lattice().central_states()[0]);
            let path = sample_trajectory(&kernel, &TrajectoryConfig { start, length, seed })?;
            let header = TrajectoryHeader { seed, length, start, generator: GENERATOR.into() };
            formats::write_trajectory(sink(output.as_deref())?, &header, &path)
        }
        Command::Estimate { trajectory } => {
            let file = File::open(&trajectory).map_err(|e| Error::io(&trajectory, e))?;
            let (_, path) = formats::read_trajectory(BufReader::new(file))?;
            let estimate = plug_in_entropy_rate(&path)?;
            let doc = serde_json::json!({ "entropy_rate": estimate, "transitions": path.len() - 1 });
            println!("{doc}");
            Ok(())
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code:
/// 0 on success, 1 for usage and validation errors, 2 for numerical
/// failures.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
