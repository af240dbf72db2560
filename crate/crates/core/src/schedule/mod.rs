//! Chunk-size generators for loop self-scheduling.
//!
//! Every technique is a pure integer state machine: given the same kind,
//! loop and request order it hands out the same chunks on every platform.

mod kind;
mod state;
mod trace;
mod weights;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kind::{ScheduleKind, ScheduleName};
pub use state::{Scheduler, TrapezoidParams};
pub use trace::{chunk_trace, RequestOrder};
pub use weights::WorkerWeights;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("worker count must be at least 1")]
    InvalidWorkerCount,
    #[error("worker {worker} out of range for {workers} workers")]
    InvalidWorker { worker: usize, workers: usize },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("unknown schedule `{0}` (valid: {valid})", valid = ScheduleName::VALID)]
    UnknownSchedule(String),
    #[error("request order cannot drain the loop: {remaining} iterations left")]
    Stalled { remaining: u64 },
}

/// One loop instance: `n` iterations spread over `p` workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub n: u64,
    pub p: usize,
}

impl LoopSpec {
    pub fn new(n: u64, p: usize) -> Result<Self, ScheduleError> {
        if p == 0 {
            return Err(ScheduleError::InvalidWorkerCount);
        }
        Ok(Self { n, p })
    }
}

/// A contiguous run of iterations handed to one worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chunk {
    pub start: u64,
    pub size: u64,
    pub worker: usize,
    /// Position of this chunk in the global request sequence.
    pub seq: u64,
}

impl Chunk {
    pub fn end(&self) -> u64 {
        self.start + self.size
    }

    pub fn range(&self) -> std::ops::Range<u64> {
        self.start..self.end()
    }
}

/// Convenience for [`Scheduler::new`].
pub fn make_scheduler(kind: ScheduleKind, spec: LoopSpec) -> Result<Scheduler, ScheduleError> {
    Scheduler::new(kind, spec)
}
