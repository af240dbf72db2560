use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;

pub const CSV_HEADER: [&str; 8] = [
    "benchmark",
    "schedule",
    "pinning",
    "median",
    "stddev",
    "n_chunks",
    "imbalance_pct",
    "repetitions",
];

/// One (benchmark, schedule, pinning) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub benchmark: String,
    pub schedule: String,
    pub pinning: String,
    /// Median makespan: cost units when simulated, seconds when executed.
    pub median: f64,
    pub stddev: f64,
    pub n_chunks: u64,
    pub imbalance_pct: f64,
    pub repetitions: usize,
}

/// Writes the header and one line per row, `\n`-terminated.
pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReportRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::Usage(format!(
            "unexpected csv header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn emit_csv(rows: &[ReportRow], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_csv(rows, std::io::BufWriter::new(file))
}
