//! Synthetic per-iteration cost traces.
//!
//! Costs are in abstract time units. The shapes (ramp, lognormal, two-point
//! mixture) are models chosen to hit a target iteration count and coefficient
//! of variation; they are not measurements of any real code.

mod gen;
mod io;
mod preset;
mod spin;

use thiserror::Error;

pub use gen::{
    gen_constant, gen_decreasing_linear, gen_lognormal_like, gen_mixture, gen_mixture_fixed_count,
    mixture_cv, mixture_fraction_for_cv, MAX_LOGNORMAL_CV,
};
pub use io::{parse_trace, read_trace, write_trace};
pub use preset::{builtin_workloads, workload_preset, Generator, Workload, WorkloadPreset};
pub use spin::{spin_body, thread_cpu_time, Calibration};

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("cost at index {index} is negative or not finite")]
    InvalidCost { index: usize },
    #[error("trace is empty")]
    Empty,
    #[error("trace mean is zero")]
    ZeroMean,
    #[error(
        "cv {cv} exceeds {max} for the lognormal model; use gen_mixture for heavy-tailed traces"
    )]
    CvTooLarge { cv: f64, max: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown workload `{name}` (valid: {valid})")]
    UnknownPreset { name: String, valid: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-iteration costs; every entry is finite and non-negative.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WorkloadTrace {
    costs: Vec<f64>,
}

impl WorkloadTrace {
    pub fn new(costs: Vec<f64>) -> Result<Self, WorkloadError> {
        if let Some(index) = costs.iter().position(|c| !c.is_finite() || *c < 0.0) {
            return Err(WorkloadError::InvalidCost { index });
        }
        Ok(Self { costs })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.costs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        if self.costs.is_empty() {
            0.0
        } else {
            self.total() / self.costs.len() as f64
        }
    }

    /// Every cost multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, WorkloadError> {
        Self::new(self.costs.iter().map(|c| c * factor).collect())
    }
}

/// Population standard deviation over mean.
pub fn measured_cv(trace: &WorkloadTrace) -> Result<f64, WorkloadError> {
    let costs = trace.costs();
    if costs.is_empty() {
        return Err(WorkloadError::Empty);
    }
    let n = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Err(WorkloadError::ZeroMean);
    }
    let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}
