use rand_distr::{Distribution, LogNormal};

use super::{WorkloadError, WorkloadTrace};
use crate::rng::SplitMix64;

/// Largest CV accepted by [`gen_lognormal_like`]. Past this the sample CV of a
/// lognormal converges too slowly to be useful at desk-scale `n`.
pub const MAX_LOGNORMAL_CV: f64 = 1.0;

pub fn gen_constant(n: usize, cost: f64) -> Result<WorkloadTrace, WorkloadError> {
    WorkloadTrace::new(vec![cost; n])
}

/// `cost(i) = c0 * (n - i) / n`. The CV tends to `1/sqrt(3)`.
pub fn gen_decreasing_linear(n: usize, c0: f64) -> Result<WorkloadTrace, WorkloadError> {
    if n == 0 {
        return Err(WorkloadError::InvalidParameter(
            "ramp needs at least one iteration",
        ));
    }
    if c0.is_nan() || c0 <= 0.0 {
        return Err(WorkloadError::InvalidParameter(
            "ramp peak must be positive",
        ));
    }
    let nf = n as f64;
    WorkloadTrace::new((0..n).map(|i| c0 * (n - i) as f64 / nf).collect())
}

/// Analytic CV of a two-point law: `heavy` with probability `q`, `base` otherwise.
pub fn mixture_cv(base: f64, heavy: f64, q: f64) -> f64 {
    let mean = q * heavy + (1.0 - q) * base;
    (q * (1.0 - q)).sqrt() * (heavy - base).abs() / mean
}

/// Heavy fraction `q` whose two-point law has the requested CV.
///
/// Of the two roots the larger one is returned, since it puts more heavy
/// iterations into a finite trace. `None` when the CV is out of reach.
pub fn mixture_fraction_for_cv(base: f64, heavy: f64, cv: f64) -> Option<f64> {
    // cv^2 (b + q d)^2 = q (1 - q) d^2, with d = heavy - base
    let d = heavy - base;
    if d == 0.0 || cv < 0.0 {
        return None;
    }
    let c2 = cv * cv;
    let a = d * d * (c2 + 1.0);
    let b = 2.0 * c2 * base * d - d * d;
    let c = c2 * base * base;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let q = (-b + disc.sqrt()) / (2.0 * a);
    (0.0..=1.0).contains(&q).then_some(q)
}

/// Independent two-point draws: each iteration costs `heavy` with probability
/// `heavy_fraction`, `base` otherwise.
pub fn gen_mixture(
    n: usize,
    base: f64,
    heavy: f64,
    heavy_fraction: f64,
    seed: u64,
) -> Result<WorkloadTrace, WorkloadError> {
    if !(0.0..=1.0).contains(&heavy_fraction) {
        return Err(WorkloadError::InvalidParameter(
            "heavy fraction must be within [0, 1]",
        ));
    }
    let mut rng = SplitMix64::new(seed);
    WorkloadTrace::new(
        (0..n)
            .map(|_| {
                if rng.unit_f64() < heavy_fraction {
                    heavy
                } else {
                    base
                }
            })
            .collect(),
    )
}

/// Two-point trace with exactly `heavy_count` heavy iterations at uniformly
/// random positions.
pub fn gen_mixture_fixed_count(
    n: usize,
    base: f64,
    heavy: f64,
    heavy_count: usize,
    seed: u64,
) -> Result<WorkloadTrace, WorkloadError> {
    if heavy_count > n {
        return Err(WorkloadError::InvalidParameter(
            "more heavy iterations than iterations",
        ));
    }
    let mut rng = SplitMix64::new(seed);
    // Partial Fisher-Yates over the index set.
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..heavy_count {
        let j = rng.range_inclusive(i as u64, (n - 1) as u64) as usize;
        idx.swap(i, j);
    }
    let mut costs = vec![base; n];
    for &i in &idx[..heavy_count] {
        costs[i] = heavy;
    }
    WorkloadTrace::new(costs)
}

/// Lognormal costs with the given mean and coefficient of variation.
pub fn gen_lognormal_like(
    n: usize,
    mean: f64,
    cv: f64,
    seed: u64,
) -> Result<WorkloadTrace, WorkloadError> {
    if !mean.is_finite() || mean <= 0.0 {
        return Err(WorkloadError::InvalidParameter("mean must be positive"));
    }
    if cv.is_nan() || cv < 0.0 {
        return Err(WorkloadError::InvalidParameter("cv must be non-negative"));
    }
    if cv > MAX_LOGNORMAL_CV {
        return Err(WorkloadError::CvTooLarge {
            cv,
            max: MAX_LOGNORMAL_CV,
        });
    }
    if cv == 0.0 {
        return gen_constant(n, mean);
    }
    let sigma2 = (1.0 + cv * cv).ln();
    let mu = mean.ln() - sigma2 / 2.0;
    let law = LogNormal::new(mu, sigma2.sqrt())
        .map_err(|_| WorkloadError::InvalidParameter("lognormal parameters"))?;
    let mut rng = SplitMix64::new(seed);
    WorkloadTrace::new((0..n).map(|_| law.sample(&mut rng)).collect())
}
