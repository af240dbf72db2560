//! Fixtures shared by the benchmarks.

use chunkwise::schedule::{ScheduleKind, ScheduleName};

/// The seven standard techniques bound for `p` equal workers.
pub fn standard_kinds(p: usize) -> Vec<ScheduleKind> {
    ScheduleKind::standard_names()
        .into_iter()
        .map(|name: ScheduleName| {
            name.resolve(p, None, 7)
                .expect("standard schedules resolve")
        })
        .collect()
}
