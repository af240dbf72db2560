use super::gen::{
    gen_decreasing_linear, gen_lognormal_like, gen_mixture_fixed_count, mixture_fraction_for_cv,
};
use super::{WorkloadError, WorkloadTrace};
use crate::rng::SplitMix64;

/// How a preset builds its costs.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Linearly decreasing costs from `peak` towards zero.
    Ramp { peak: f64 },
    /// Lognormal costs.
    Lognormal { mean: f64, cv: f64 },
    /// Two-point mixture with the heavy count fixed at `round(q * n)`, `q`
    /// solved from the target CV.
    Mixture { base: f64, heavy: f64, cv: f64 },
    /// Many short loops run back to back. Each loop draws its size uniformly
    /// from `sizes` and its lognormal CV uniformly from `cvs`.
    LoopSequence {
        loops: usize,
        sizes: (usize, usize),
        cvs: (f64, f64),
        mean: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadPreset {
    /// Stable identifier used on the command line.
    pub name: &'static str,
    /// Iteration count of the loop, or of the largest loop for sequences.
    pub n: usize,
    /// CV the generated trace should show; `None` for sequences whose CV varies per loop.
    pub target_cv: Option<f64>,
    pub generator: Generator,
    pub description: &'static str,
}

/// One loop, or several loops separated by barriers.
#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    Single(WorkloadTrace),
    Sequence(Vec<WorkloadTrace>),
}

impl Workload {
    pub fn loops(&self) -> &[WorkloadTrace] {
        match self {
            Self::Single(t) => std::slice::from_ref(t),
            Self::Sequence(ts) => ts,
        }
    }

    pub fn total_iterations(&self) -> usize {
        self.loops().iter().map(WorkloadTrace::len).sum()
    }
}

impl WorkloadPreset {
    pub fn generate(&self, seed: u64) -> Result<Workload, WorkloadError> {
        let n = self.n;
        Ok(match &self.generator {
            Generator::Ramp { peak } => Workload::Single(gen_decreasing_linear(n, *peak)?),
            Generator::Lognormal { mean, cv } => {
                Workload::Single(gen_lognormal_like(n, *mean, *cv, seed)?)
            }
            Generator::Mixture { base, heavy, cv } => {
                let q = mixture_fraction_for_cv(*base, *heavy, *cv).ok_or(
                    WorkloadError::InvalidParameter("mixture cannot reach target cv"),
                )?;
                let count = ((q * n as f64).round() as usize).clamp(1, n);
                Workload::Single(gen_mixture_fixed_count(n, *base, *heavy, count, seed)?)
            }
            Generator::LoopSequence {
                loops,
                sizes,
                cvs,
                mean,
            } => {
                let mut rng = SplitMix64::new(seed);
                let mut out = Vec::with_capacity(*loops);
                for _ in 0..*loops {
                    let len = rng.range_inclusive(sizes.0 as u64, sizes.1 as u64) as usize;
                    let cv = cvs.0 + (cvs.1 - cvs.0) * rng.unit_f64();
                    out.push(gen_lognormal_like(len, *mean, cv, rng.next())?);
                }
                Workload::Sequence(out)
            }
        })
    }
}

/// Built-in workloads modeled on the molecular-dynamics and multigrid loops
/// used in the experiments. Sizes and CVs follow the reported figures; the
/// cost distributions are synthetic.
pub fn builtin_workloads() -> Vec<WorkloadPreset> {
    vec![
        WorkloadPreset {
            name: "ac",
            n: 100_000,
            target_cv: Some(1.0 / 3f64.sqrt()),
            generator: Generator::Ramp { peak: 1.0 },
            description: "adjoint convolution, decreasing task size, scaled to 1e5 iterations",
        },
        WorkloadPreset {
            name: "ac_full",
            n: 10_000_000,
            target_cv: Some(1.0 / 3f64.sqrt()),
            generator: Generator::Ramp { peak: 1.0 },
            description: "adjoint convolution at its full 1e7 iterations",
        },
        WorkloadPreset {
            name: "c_md",
            n: 16_384,
            target_cv: Some(0.57),
            generator: Generator::Lognormal {
                mean: 1.0,
                cv: 0.57,
            },
            description: "molecular dynamics, ~16e3 iterations, CV 57%",
        },
        WorkloadPreset {
            name: "lava_md",
            n: 130_000,
            target_cv: Some(0.14),
            generator: Generator::Lognormal {
                mean: 1.0,
                cv: 0.14,
            },
            description: "lava molecular dynamics, 13e4 iterations, CV 14%",
        },
        WorkloadPreset {
            name: "md350",
            n: 27_000,
            target_cv: Some(87.0),
            generator: Generator::Mixture {
                base: 1.0,
                heavy: 1e6,
                cv: 87.0,
            },
            description: "molecular dynamics with rare huge iterations, ~27e3 iterations, CV 8700%",
        },
        WorkloadPreset {
            name: "nas_mg",
            n: 1000,
            target_cv: None,
            generator: Generator::LoopSequence {
                loops: 5000,
                sizes: (2, 1000),
                cvs: (0.0, 1.0),
                mean: 1.0,
            },
            description: "multigrid, 5000 short loops of 2..1000 iterations, per-loop CV 0..1",
        },
    ]
}

pub fn workload_preset(name: &str) -> Result<WorkloadPreset, WorkloadError> {
    let all = builtin_workloads();
    all.iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .cloned()
        .ok_or_else(|| WorkloadError::UnknownPreset {
            name: name.to_string(),
            valid: all.iter().map(|p| p.name).collect::<Vec<_>>().join(", "),
        })
}
