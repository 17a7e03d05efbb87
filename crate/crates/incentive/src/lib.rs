//! File formats, parameter sweeps and the command-line front end for
//! [`incentive_core`].
//!
//! ```no_run
//! use incentive::config::ProcessConfig;
//! use incentive::pipeline::analyze;
//!
//! let config: ProcessConfig = serde_json::from_str(
//!     r#"{"n": 3, "N": 30, "incentive": {"kind": "fermi", "beta": 1},
//!         "landscape": {"kind": "rsp", "a": 1, "b": 1}}"#,
//! )?;
//! let analysis = analyze(&config.build()?)?;
//! println!("{:.3}", analysis.report.entropy_rate);
//! # Ok::<(), incentive::Error>(())
//! ```

pub mod cli;
pub mod config;
mod error;
pub mod formats;
pub mod pipeline;
pub mod sweep;

pub use error::{Error, Result};
