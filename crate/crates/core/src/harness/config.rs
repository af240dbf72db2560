//! Line-oriented experiment files.
//!
//! ```text
//! # comment
//! [experiment]
//! mode = simulate          # or execute
//! reps = 20
//! seed = 7
//! overhead = 5*mean        # or plain cost units, e.g. 0.25
//! queue = locked           # or atomic (execute mode)
//! cost_unit_us = 1         # execute mode
//!
//! [workload]
//! preset = ac              # or: trace = costs.txt
//!
//! [sweep]
//! schedules = STATIC, SS, GSS, TSS, FAC2, WF2, RAND
//! pinnings = PIN1, PIN2
//!
//! [output]
//! csv = results.csv
//! gantt = run.svg
//! ```
//!
//! Keys before the first header belong to `[experiment]`. Relative paths
//! are taken as written; unknown sections or keys and repeated keys are
//! errors.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Duration;

use super::{ExperimentConfig, HarnessError, WorkloadSource};
use crate::exec::QueueMode;
use crate::schedule::ScheduleName;

pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::default();
    apply_config(&mut cfg, text)?;
    Ok(cfg)
}

/// Like [`parse_config`], but only overwrites the keys present in `text`.
pub fn apply_config(cfg: &mut ExperimentConfig, text: &str) -> Result<(), HarnessError> {
    let mut section = String::from("experiment");
    let mut seen = BTreeSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| HarnessError::Usage(format!("config line {}: {msg}", i + 1));
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err("unterminated section header".into()))?;
            section = name.trim().to_ascii_lowercase();
            if !matches!(
                section.as_str(),
                "experiment" | "workload" | "sweep" | "output"
            ) {
                return Err(err(format!("unknown section [{section}]")));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err("expected `key = value`".into()))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if !seen.insert(format!("{section}.{key}")) {
            return Err(err(format!("`{key}` given twice in [{section}]")));
        }
        let number = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| err(format!("`{key}` expects an integer, got `{v}`")))
        };
        match (section.as_str(), key.as_str()) {
            ("experiment", "mode") => cfg.mode = value.parse()?,
            ("experiment", "reps") => cfg.reps = number(value)? as usize,
            ("experiment", "seed") => cfg.seed = number(value)?,
            ("experiment", "overhead") => cfg.overhead = value.parse()?,
            ("experiment", "queue") => cfg.queue = parse_queue(value).map_err(err)?,
            ("experiment", "cost_unit_us") => {
                let us: f64 = value
                    .parse()
                    .map_err(|_| err(format!("invalid cost unit `{value}`")))?;
                cfg.cost_unit = Duration::try_from_secs_f64(us * 1e-6)
                    .map_err(|_| err(format!("invalid cost unit `{value}`")))?;
            }
            ("workload", "preset") => cfg.workload = WorkloadSource::Preset(value.to_string()),
            ("workload", "trace") => cfg.workload = WorkloadSource::TraceFile(PathBuf::from(value)),
            ("sweep", "schedules") => {
                cfg.schedules = split_list(value)
                    .map(|s| s.parse::<ScheduleName>().map_err(|e| err(e.to_string())))
                    .collect::<Result<_, _>>()?;
            }
            ("sweep", "pinnings") => cfg.pinnings = split_list(value).map(str::to_string).collect(),
            ("output", "csv") => cfg.out = Some(PathBuf::from(value)),
            ("output", "gantt") => cfg.gantt = Some(PathBuf::from(value)),
            _ => return Err(err(format!("unknown key `{key}` in [{section}]"))),
        }
    }
    Ok(())
}

pub(crate) fn parse_queue(s: &str) -> Result<QueueMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "locked" => Ok(QueueMode::Locked),
        "atomic" => Ok(QueueMode::Atomic),
        _ => Err(format!("unknown queue `{s}` (valid: locked, atomic)")),
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|s| !s.is_empty())
}
