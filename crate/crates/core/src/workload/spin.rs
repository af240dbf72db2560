use std::hint::black_box;
use std::time::{Duration, Instant};

use super::WorkloadTrace;

/// How many spin steps make up one cost unit on this machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub spins_per_unit: f64,
    pub unit: Duration,
}

impl Calibration {
    /// Times the spin kernel until it has used at least 20 ms of this
    /// thread's CPU time and scales the rate to `unit`.
    pub fn measure(unit: Duration) -> Self {
        let mut spins: u64 = 1 << 12;
        loop {
            let t = thread_cpu_time();
            spin(spins);
            let elapsed = thread_cpu_time() - t;
            if elapsed >= Duration::from_millis(20) {
                let per_sec = spins as f64 / elapsed.as_secs_f64();
                return Self {
                    spins_per_unit: per_sec * unit.as_secs_f64(),
                    unit,
                };
            }
            spins *= 2;
        }
    }

    /// One cost unit per microsecond.
    pub fn microseconds() -> Self {
        Self::measure(Duration::from_micros(1))
    }

    pub fn spins_for(&self, cost: f64) -> u64 {
        (cost * self.spins_per_unit).round() as u64
    }
}

/// CPU time consumed by the calling thread. Falls back to a monotonic
/// wall clock where per-thread accounting is unavailable.
pub fn thread_cpu_time() -> Duration {
    #[cfg(unix)]
    {
        let mut ts = libc::timespec {
            tv_sec: 0,
            tv_nsec: 0,
        };
        // SAFETY: `ts` is a valid, writable timespec.
        if unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) } == 0 {
            return Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32);
        }
    }
    static START: std::sync::OnceLock<Instant> = std::sync::OnceLock::new();
    START.get_or_init(Instant::now).elapsed()
}

#[inline(never)]
fn spin(steps: u64) -> u64 {
    let mut x = 0x2545_F491_4F6C_DD1Du64;
    for _ in 0..steps {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        x = black_box(x);
    }
    x
}

/// Loop body that busy-computes for roughly `trace[i]` cost units.
pub fn spin_body<'a>(
    trace: &'a WorkloadTrace,
    calibration: &Calibration,
) -> impl Fn(u64) + Sync + 'a {
    let per_unit = calibration.spins_per_unit;
    move |i: u64| {
        let cost = trace.costs()[i as usize];
        black_box(spin((cost * per_unit).round() as u64));
    }
}
