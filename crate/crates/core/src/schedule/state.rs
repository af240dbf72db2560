use super::{Chunk, LoopSpec, ScheduleError, ScheduleKind, WorkerWeights};
use crate::rng::SplitMix64;

/// Precomputed trapezoid parameters.
///
/// Chunk `i` is `floor(first - i * step)` with `step = (first - last) / (count - 1)`
/// held as the exact fraction `step_num / step_den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrapezoidParams {
    pub first: u64,
    pub last: u64,
    pub count: u64,
    pub step_num: u64,
    pub step_den: u64,
}

impl TrapezoidParams {
    fn new(spec: LoopSpec) -> Self {
        let n = spec.n as u128;
        let p = spec.p as u128;
        let first = n.div_ceil(2 * p) as u64;
        let last = 1u64.min(first);
        let count = if first + last == 0 {
            0
        } else {
            (2 * n).div_ceil(first as u128 + last as u128) as u64
        };
        let (step_num, step_den) = if count <= 1 {
            (0, 1)
        } else {
            (first - last, count - 1)
        };
        Self {
            first,
            last,
            count,
            step_num,
            step_den,
        }
    }

    /// Nominal size of chunk `index`, never below 1.
    pub fn size(&self, index: u64) -> u64 {
        let top = self.first as u128 * self.step_den as u128;
        let drop = index as u128 * self.step_num as u128;
        if drop >= top {
            1
        } else {
            ((top - drop) / self.step_den as u128).max(1) as u64
        }
    }
}

#[derive(Debug, Clone)]
enum Rule {
    Block {
        block: u64,
        served: Vec<bool>,
    },
    Cyclic {
        served: Vec<u64>,
    },
    Fixed {
        chunk: u64,
    },
    Guided {
        min_chunk: u64,
    },
    Trapezoid {
        params: TrapezoidParams,
        index: u64,
    },
    Factoring {
        chunk: u64,
        left_in_batch: usize,
    },
    Weighted {
        weights: WorkerWeights,
        // R frozen at the opening of each batch, indexed by batch number.
        batch_base: Vec<u64>,
        served: Vec<usize>,
    },
    Random {
        lo: u64,
        hi: u64,
        rng: SplitMix64,
    },
}

/// Mutable scheduling state for one loop instance.
///
/// Not synchronized; callers sharing it across threads must serialize
/// [`Scheduler::next_chunk`].
#[derive(Debug, Clone)]
pub struct Scheduler {
    kind: ScheduleKind,
    spec: LoopSpec,
    remaining: u64,
    next_start: u64,
    seq: u64,
    rule: Rule,
}

impl Scheduler {
    pub fn new(kind: ScheduleKind, spec: LoopSpec) -> Result<Self, ScheduleError> {
        let p = spec.p;
        let rule = match &kind {
            ScheduleKind::StaticBlock => Rule::Block {
                block: spec.n.div_ceil(p as u64),
                served: vec![false; p],
            },
            ScheduleKind::StaticCyclic => Rule::Cyclic { served: vec![0; p] },
            ScheduleKind::Dynamic { chunk } => {
                if *chunk == 0 {
                    return Err(ScheduleError::InvalidParameter(
                        "dynamic chunk must be at least 1",
                    ));
                }
                Rule::Fixed { chunk: *chunk }
            }
            ScheduleKind::SelfScheduling => Rule::Fixed { chunk: 1 },
            ScheduleKind::Guided => Rule::Guided { min_chunk: 1 },
            ScheduleKind::GuidedMin { min_chunk } => {
                if *min_chunk == 0 {
                    return Err(ScheduleError::InvalidParameter(
                        "guided minimum must be at least 1",
                    ));
                }
                Rule::Guided {
                    min_chunk: *min_chunk,
                }
            }
            ScheduleKind::Trapezoid => Rule::Trapezoid {
                params: TrapezoidParams::new(spec),
                index: 0,
            },
            ScheduleKind::Factoring => Rule::Factoring {
                chunk: 0,
                left_in_batch: 0,
            },
            ScheduleKind::WeightedFactoring(weights) => {
                if weights.len() != p {
                    return Err(ScheduleError::WeightCount {
                        expected: p,
                        got: weights.len(),
                    });
                }
                Rule::Weighted {
                    weights: weights.clone(),
                    batch_base: Vec::new(),
                    served: vec![0; p],
                }
            }
            ScheduleKind::Random { seed } => {
                let (lo, hi) = random_bounds(spec);
                Rule::Random {
                    lo,
                    hi,
                    rng: SplitMix64::new(*seed),
                }
            }
        };
        Ok(Self {
            kind,
            spec,
            remaining: spec.n,
            next_start: 0,
            seq: 0,
            rule,
        })
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn spec(&self) -> LoopSpec {
        self.spec
    }

    /// Iterations not yet handed out.
    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    /// Number of chunks handed out so far.
    pub fn issued(&self) -> u64 {
        self.seq
    }

    pub fn trapezoid_params(&self) -> Option<TrapezoidParams> {
        match &self.rule {
            Rule::Trapezoid { params, .. } => Some(*params),
            _ => None,
        }
    }

    /// `(lo, hi)` bounds of a random schedule.
    pub fn random_bounds(&self) -> Option<(u64, u64)> {
        match &self.rule {
            Rule::Random { lo, hi, .. } => Some((*lo, *hi)),
            _ => None,
        }
    }

    /// Claims the next chunk for `worker`.
    ///
    /// Returns `Ok(None)` once nothing is left for this worker: for the static
    /// kinds that happens when the worker's own share is done, for every other
    /// kind exactly when no iterations remain.
    pub fn next_chunk(&mut self, worker: usize) -> Result<Option<Chunk>, ScheduleError> {
        let p = self.spec.p;
        if worker >= p {
            return Err(ScheduleError::InvalidWorker { worker, workers: p });
        }
        if self.remaining == 0 {
            return Ok(None);
        }
        let n = self.spec.n;

        // Static kinds place chunks by worker id rather than at the queue head.
        match &mut self.rule {
            Rule::Block { block, served } => {
                let start = worker as u64 * *block;
                if served[worker] || start >= n {
                    return Ok(None);
                }
                served[worker] = true;
                let size = (*block).min(n - start);
                return Ok(Some(self.emit_at(worker, start, size)));
            }
            Rule::Cyclic { served } => {
                let index = worker as u64 + served[worker] * p as u64;
                if index >= n {
                    return Ok(None);
                }
                served[worker] += 1;
                return Ok(Some(self.emit_at(worker, index, 1)));
            }
            _ => {}
        }

        let r = self.remaining;
        let nominal = match &mut self.rule {
            Rule::Fixed { chunk } => *chunk,
            Rule::Guided { min_chunk } => r.div_ceil(p as u64).max(*min_chunk),
            Rule::Trapezoid { params, index } => {
                let s = params.size(*index);
                *index += 1;
                s
            }
            Rule::Factoring {
                chunk,
                left_in_batch,
            } => {
                if *left_in_batch == 0 {
                    *chunk = r.div_ceil(2 * p as u64);
                    *left_in_batch = p;
                }
                *left_in_batch -= 1;
                *chunk
            }
            Rule::Weighted {
                weights,
                batch_base,
                served,
            } => {
                let batch = served[worker];
                if batch == batch_base.len() {
                    batch_base.push(r);
                }
                served[worker] += 1;
                weights.factored_chunk(worker, batch_base[batch]).max(1)
            }
            Rule::Random { lo, hi, rng } => rng.range_inclusive(*lo, *hi),
            Rule::Block { .. } | Rule::Cyclic { .. } => unreachable!(),
        };
        let size = nominal.min(r);
        let start = self.next_start;
        self.next_start += size;
        Ok(Some(self.emit_at(worker, start, size)))
    }

    fn emit_at(&mut self, worker: usize, start: u64, size: u64) -> Chunk {
        debug_assert!(size >= 1 && size <= self.remaining);
        self.remaining -= size;
        let chunk = Chunk {
            start,
            size,
            worker,
            seq: self.seq,
        };
        self.seq += 1;
        chunk
    }
}

/// `lo = max(1, floor(n / 100p))`, `hi = max(lo + 1, floor(n / 2p))`.
fn random_bounds(spec: LoopSpec) -> (u64, u64) {
    let n = spec.n as u128;
    let p = spec.p as u128;
    let lo = ((n / (100 * p)) as u64).max(1);
    let hi = ((n / (2 * p)) as u64).max(lo + 1);
    (lo, hi)
}
