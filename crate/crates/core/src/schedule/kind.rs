use std::fmt;
use std::str::FromStr;

use super::{ScheduleError, WorkerWeights};

/// Loop scheduling technique, with whatever parameters it needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `p` contiguous blocks of `ceil(n/p)`; worker `j` owns block `j`.
    StaticBlock,
    /// Iteration `i` belongs to worker `i mod p`.
    StaticCyclic,
    /// Fixed-size chunks claimed from the central queue.
    Dynamic { chunk: u64 },
    /// Pure self-scheduling: one iteration per request. Same as `Dynamic { chunk: 1 }`.
    SelfScheduling,
    /// Guided self-scheduling: `ceil(R/p)` of the remaining iterations.
    Guided,
    /// Guided with a floor on the chunk size.
    GuidedMin { min_chunk: u64 },
    /// Trapezoid self-scheduling: linearly shrinking chunks from `ceil(n/2p)` down to 1.
    Trapezoid,
    /// Factoring with factor two: batches of `p` equal chunks, each batch half the remainder.
    Factoring,
    /// Weighted factoring with factor two.
    WeightedFactoring(WorkerWeights),
    /// Uniformly random chunk sizes between fixed bounds.
    Random { seed: u64 },
}

impl ScheduleKind {
    /// The seven techniques compared in the experiments, in report order.
    pub fn standard_names() -> [ScheduleName; 7] {
        [
            ScheduleName::StaticBlock,
            ScheduleName::SelfScheduling,
            ScheduleName::Guided,
            ScheduleName::Trapezoid,
            ScheduleName::Factoring,
            ScheduleName::WeightedFactoring,
            ScheduleName::Random,
        ]
    }

    pub fn name(&self) -> ScheduleName {
        match self {
            Self::StaticBlock => ScheduleName::StaticBlock,
            Self::StaticCyclic => ScheduleName::StaticCyclic,
            Self::Dynamic { chunk } => ScheduleName::Dynamic(*chunk),
            Self::SelfScheduling => ScheduleName::SelfScheduling,
            Self::Guided => ScheduleName::Guided,
            Self::GuidedMin { min_chunk } => ScheduleName::GuidedMin(*min_chunk),
            Self::Trapezoid => ScheduleName::Trapezoid,
            Self::Factoring => ScheduleName::Factoring,
            Self::WeightedFactoring(_) => ScheduleName::WeightedFactoring,
            Self::Random { .. } => ScheduleName::Random,
        }
    }

    /// True for techniques whose assignment is fixed before execution.
    pub fn is_static(&self) -> bool {
        matches!(self, Self::StaticBlock | Self::StaticCyclic)
    }

    pub fn is_random(&self) -> bool {
        matches!(self, Self::Random { .. })
    }

    /// Replaces the seed of a `Random` schedule; other kinds are returned unchanged.
    pub fn reseeded(&self, seed: u64) -> Self {
        match self {
            Self::Random { .. } => Self::Random { seed },
            other => other.clone(),
        }
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.name().fmt(f)
    }
}

/// A technique selected by name, before per-run parameters (weights, seed) are bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScheduleName {
    StaticBlock,
    StaticCyclic,
    Dynamic(u64),
    SelfScheduling,
    Guided,
    GuidedMin(u64),
    Trapezoid,
    Factoring,
    WeightedFactoring,
    Random,
}

impl ScheduleName {
    pub const VALID: &'static str =
        "STATIC, CYCLIC, SS, DYNAMIC:<k>, GSS, GUIDED:<kmin>, TSS, FAC2, WF2, RAND";

    /// Binds run parameters. `WF2` takes its weights from `speeds`
    /// (uniform when `None`), `RAND` takes `seed`.
    pub fn resolve(
        self,
        workers: usize,
        speeds: Option<&[f64]>,
        seed: u64,
    ) -> Result<ScheduleKind, ScheduleError> {
        Ok(match self {
            Self::StaticBlock => ScheduleKind::StaticBlock,
            Self::StaticCyclic => ScheduleKind::StaticCyclic,
            Self::Dynamic(chunk) => ScheduleKind::Dynamic { chunk },
            Self::SelfScheduling => ScheduleKind::SelfScheduling,
            Self::Guided => ScheduleKind::Guided,
            Self::GuidedMin(min_chunk) => ScheduleKind::GuidedMin { min_chunk },
            Self::Trapezoid => ScheduleKind::Trapezoid,
            Self::Factoring => ScheduleKind::Factoring,
            Self::WeightedFactoring => ScheduleKind::WeightedFactoring(match speeds {
                Some(s) => WorkerWeights::from_f64(s)?,
                None => WorkerWeights::uniform(workers)?,
            }),
            Self::Random => ScheduleKind::Random { seed },
        })
    }
}

impl fmt::Display for ScheduleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::StaticBlock => f.write_str("STATIC"),
            Self::StaticCyclic => f.write_str("CYCLIC"),
            Self::Dynamic(k) => write!(f, "DYNAMIC:{k}"),
            Self::SelfScheduling => f.write_str("SS"),
            Self::Guided => f.write_str("GSS"),
            Self::GuidedMin(k) => write!(f, "GUIDED:{k}"),
            Self::Trapezoid => f.write_str("TSS"),
            Self::Factoring => f.write_str("FAC2"),
            Self::WeightedFactoring => f.write_str("WF2"),
            Self::Random => f.write_str("RAND"),
        }
    }
}

impl FromStr for ScheduleName {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        let (head, arg) = match upper.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (upper.as_str(), None),
        };
        let unknown = || ScheduleError::UnknownSchedule(s.trim().to_string());
        let param = |a: Option<&str>| -> Result<u64, ScheduleError> {
            let v: u64 = a.ok_or_else(unknown)?.parse().map_err(|_| unknown())?;
            if v == 0 {
                return Err(ScheduleError::InvalidParameter(
                    "chunk parameter must be at least 1",
                ));
            }
            Ok(v)
        };
        let plain = |name: Self| {
            if arg.is_some() {
                Err(unknown())
            } else {
                Ok(name)
            }
        };
        match head {
            "STATIC" => plain(Self::StaticBlock),
            "CYCLIC" => plain(Self::StaticCyclic),
            "SS" => plain(Self::SelfScheduling),
            "DYNAMIC" => Ok(Self::Dynamic(param(arg)?)),
            "GSS" => plain(Self::Guided),
            "GUIDED" => Ok(Self::GuidedMin(param(arg)?)),
            "TSS" => plain(Self::Trapezoid),
            "FAC2" => plain(Self::Factoring),
            "WF2" => plain(Self::WeightedFactoring),
            "RAND" => plain(Self::Random),
            _ => Err(unknown()),
        }
    }
}
