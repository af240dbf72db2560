//! Trace files: one decimal cost per line. `#` starts a comment that runs to
//! the end of the line; blank lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::{WorkloadError, WorkloadTrace};

pub fn parse_trace(text: &str) -> Result<WorkloadTrace, WorkloadError> {
    let mut costs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cost: f64 = line.parse().map_err(|_| WorkloadError::Parse {
            line: i + 1,
            msg: format!("not a number: `{line}`"),
        })?;
        if !cost.is_finite() || cost < 0.0 {
            return Err(WorkloadError::Parse {
                line: i + 1,
                msg: format!("cost must be finite and non-negative: `{line}`"),
            });
        }
        costs.push(cost);
    }
    WorkloadTrace::new(costs)
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<WorkloadTrace, WorkloadError> {
    parse_trace(&std::fs::read_to_string(path)?)
}

pub fn write_trace(path: impl AsRef<Path>, trace: &WorkloadTrace) -> Result<(), WorkloadError> {
    let mut out = String::with_capacity(trace.len() * 8);
    out.push_str("# chunkwise cost trace\n");
    for c in trace.costs() {
        let _ = writeln!(out, "{c}");
    }
    std::fs::write(path, out)?;
    Ok(())
}
