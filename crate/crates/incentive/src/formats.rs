//! Text formats: game matrices (JSON), kernel dumps, stationary vectors
//! (CSV), trajectories and entropy reports (JSON).

use std::io::{BufRead, Write};
use std::path::Path;

use incentive_core::dynamics::GameMatrix;
use incentive_core::entropy::EntropyReport;
use incentive_core::stationary::StationaryDistribution;
use incentive_core::{Lattice, StateIndex, TransitionKernel};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

/// Shortest representation that parses back to the same value; exponent
/// notation for very small or very large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

// ---- game matrices ----

/// Parses `{"n": 2, "matrix": [[1, 2], [2, 1]]}`.
pub fn parse_game_matrix(text: &str) -> Result<GameMatrix> {
    let doc: Value = serde_json::from_str(text)?;
    game_matrix_from_value(&doc, "$")
}

pub fn load_game_matrix(path: &Path) -> Result<GameMatrix> {
    parse_game_matrix(&read_file(path)?).map_err(|e| match e {
        Error::Schema { location, message } => Error::schema(format!("{}: {location}", path.display()), message),
        other => other,
    })
}

pub(crate) fn game_matrix_from_value(doc: &Value, at: &str) -> Result<GameMatrix> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::schema(at, "expected an object with fields \"n\" and \"matrix\""))?;
    let n = match obj.get("n") {
        Some(v) => v
            .as_u64()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::schema(format!("{at}.n"), format!("expected a positive integer, found {v}")))?
            as usize,
        None => return Err(Error::schema(at, "missing field \"n\"")),
    };
    let matrix = obj.get("matrix").ok_or_else(|| Error::schema(at, "missing field \"matrix\""))?;
    let rows = parse_square(matrix, &format!("{at}.matrix"), Some(n))?;
    Ok(GameMatrix::from_rows(&rows)?)
}

/// A square array of numbers; `expected` fixes the dimension.
pub(crate) fn parse_square(value: &Value, at: &str, expected: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::schema(at, format!("expected an array of rows, found {value}")))?;
    let n = expected.unwrap_or(rows.len());
    if rows.len() != n {
        return Err(Error::schema(at, format!("expected {n} rows, found {}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let here = format!("{at}[{i}]");
            let row = row
                .as_array()
                .ok_or_else(|| Error::schema(&here, format!("expected an array, found {row}")))?;
            if row.len() != n {
                return Err(Error::schema(&here, format!("expected {n} entries, found {}", row.len())));
            }
            row.iter()
                .enumerate()
                .map(|(j, v)| {
                    v.as_f64()
                        .ok_or_else(|| Error::schema(format!("{here}[{j}]"), format!("expected a number, found {v}")))
                })
                .collect()
        })
        .collect()
}

pub fn game_matrix_to_json(game: &GameMatrix) -> String {
    let rows: Vec<&[f64]> = game.rows().collect();
    serde_json::json!({ "n": game.dim(), "matrix": rows }).to_string()
}

// ---- kernel dump ----

/// Header `n N state_count`, then one `row col prob` line per stored entry.
pub fn write_kernel(mut w: impl Write, kernel: &TransitionKernel) -> Result<()> {
    let lattice = kernel
        .lattice()
        .ok_or_else(|| Error::Sweep("kernel dump needs a lattice-indexed kernel".into()))?;
    writeln!(w, "{} {} {}", lattice.types(), lattice.size(), kernel.len()).map_err(Error::Write)?;
    for (i, j, p) in kernel.triplets() {
        writeln!(w, "{i} {j} {}", format_float(p)).map_err(Error::Write)?;
    }
    w.flush().map_err(Error::Write)
}

pub fn read_kernel(r: impl BufRead) -> Result<TransitionKernel> {
    let mut lines = r.lines().enumerate();
    let (types, size, count) = loop {
        let Some((i, line)) = lines.next() else {
            return Err(Error::Parse { line: 1, message: "missing header".into() });
        };
        let line = line.map_err(Error::Write)?;
        if line.trim().is_empty() {
            continue;
        }
        let f = fields::<3>(&line, i + 1)?;
        break (
            parse_field::<usize>(f[0], i + 1)?,
            parse_field::<u32>(f[1], i + 1)?,
            parse_field::<usize>(f[2], i + 1)?,
        );
    };
    let lattice = Lattice::new(types, size)?;
    if lattice.len() != count {
        return Err(Error::Parse {
            line: 1,
            message: format!("{count} states declared, the lattice has {}", lattice.len()),
        });
    }
    let mut rows = vec![Vec::new(); count];
    for (i, line) in lines {
        let line = line.map_err(Error::Write)?;
        if line.trim().is_empty() {
            continue;
        }
        let f = fields::<3>(&line, i + 1)?;
        let row = parse_field::<usize>(f[0], i + 1)?;
        let col = parse_field::<usize>(f[1], i + 1)?;
        let p = parse_field::<f64>(f[2], i + 1)?;
        if row >= count || col >= count {
            return Err(Error::Parse { line: i + 1, message: format!("index out of range for {count} states") });
        }
        rows[row].push((col, p));
    }
    Ok(TransitionKernel::from_lattice_rows(lattice, rows)?)
}

fn fields<const K: usize>(line: &str, number: usize) -> Result<[&str; K]> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    parts.try_into().map_err(|parts: Vec<&str>| Error::Parse {
        line: number,
        message: format!("expected {K} fields, found {}", parts.len()),
    })
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, message: format!("cannot parse {s:?}") })
}

// ---- stationary CSV ----

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryRecord {
    pub rank: StateIndex,
    pub counts: Vec<u32>,
    pub probability: f64,
}

/// `rank,a1,...,an,probability` with a header row.
pub fn write_stationary(w: impl Write, lattice: &Lattice, s: &StationaryDistribution) -> Result<()> {
    if s.len() != lattice.len() {
        return Err(incentive_core::Error::DimensionMismatch { expected: lattice.len(), found: s.len() }.into());
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["rank".to_string()];
    header.extend((1..=lattice.types()).map(|i| format!("a{i}")));
    header.push("probability".into());
    out.write_record(&header)?;
    for (rank, (state, p)) in lattice.states().zip(s.probabilities()).enumerate() {
        let mut record = vec![rank.to_string()];
        record.extend(state.counts().iter().map(u32::to_string));
        record.push(format_float(*p));
        out.write_record(&record)?;
    }
    out.flush().map_err(Error::Write)
}

pub fn read_stationary(r: impl std::io::Read) -> Result<Vec<StationaryRecord>> {
    let mut input = csv::Reader::from_reader(r);
    let width = input.headers()?.len();
    if width < 4 {
        return Err(Error::Parse { line: 1, message: "expected rank, at least two counts and probability".into() });
    }
    let mut out = Vec::new();
    for (i, record) in input.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let rank = parse_field(&record[0], line)?;
        let counts = (1..width - 1)
            .map(|k| parse_field(&record[k], line))
            .collect::<Result<_>>()?;
        let probability = parse_field(&record[width - 1], line)?;
        out.push(StationaryRecord { rank, counts, probability });
    }
    Ok(out)
}

// ---- trajectories ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryHeader {
    pub seed: u64,
    pub length: usize,
    pub start: StateIndex,
    pub generator: String,
}

/// `# key=value` metadata lines followed by one state rank per line.
pub fn write_trajectory(mut w: impl Write, header: &TrajectoryHeader, path: &[StateIndex]) -> Result<()> {
    let TrajectoryHeader { seed, length, start, generator } = header;
    write!(w, "# seed={seed}\n# length={length}\n# start={start}\n# generator={generator}\n").map_err(Error::Write)?;
    for s in path {
        writeln!(w, "{s}").map_err(Error::Write)?;
    }
    w.flush().map_err(Error::Write)
}

/// Reads a trajectory; the header is returned only when all of its keys
/// are present.
pub fn read_trajectory(r: impl BufRead) -> Result<(Option<TrajectoryHeader>, Vec<StateIndex>)> {
    let (mut seed, mut length, mut start, mut generator) = (None, None, None, None);
    let mut path = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(Error::Write)?;
        let line = line.trim();
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((key, value)) = meta.trim().split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "seed" => seed = Some(parse_field(value, i + 1)?),
                    "length" => length = Some(parse_field(value, i + 1)?),
                    "start" => start = Some(parse_field(value, i + 1)?),
                    "generator" => generator = Some(value.to_string()),
                    _ => {}
                }
            }
        } else if !line.is_empty() {
            path.push(parse_field(line, i + 1)?);
        }
    }
    let header = match (seed, length, start, generator) {
        (Some(seed), Some(length), Some(start), Some(generator)) => Some(TrajectoryHeader { seed, length, start, generator }),
        _ => None,
    };
    Ok((header, path))
}

// ---- entropy report ----

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    pub entropy_rate: f64,
    pub bound: f64,
    pub n: Option<usize>,
    #[serde(rename = "N")]
    pub size: Option<u32>,
    pub residual: f64,
}

impl From<&EntropyReport> for EntropySummary {
    fn from(r: &EntropyReport) -> Self {
        EntropySummary {
            entropy_rate: r.entropy_rate,
            bound: r.bound,
            n: r.types,
            size: r.size,
            residual: r.residual,
        }
    }
}
