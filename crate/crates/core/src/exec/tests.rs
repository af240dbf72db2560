use std::sync::atomic::{AtomicU64, AtomicU8, Ordering};

use super::*;
use crate::schedule::WorkerWeights;

fn kinds(p: usize) -> Vec<ScheduleKind> {
    vec![
        ScheduleKind::StaticBlock,
        ScheduleKind::StaticCyclic,
        ScheduleKind::Dynamic { chunk: 7 },
        ScheduleKind::SelfScheduling,
        ScheduleKind::Guided,
        ScheduleKind::GuidedMin { min_chunk: 4 },
        ScheduleKind::Trapezoid,
        ScheduleKind::Factoring,
        ScheduleKind::WeightedFactoring(WorkerWeights::uniform(p).unwrap()),
        ScheduleKind::WeightedFactoring(
            WorkerWeights::from_units(&(1..=p as u64).collect::<Vec<_>>()).unwrap(),
        ),
        ScheduleKind::Random { seed: 99 },
    ]
}

fn bitmap_run(n: u64, opts: &ExecOptions) -> ExecReport {
    let hits: Vec<AtomicU8> = (0..n).map(|_| AtomicU8::new(0)).collect();
    let report = parallel_for(
        n,
        |i| {
            hits[i as usize].fetch_add(1, Ordering::Relaxed);
        },
        opts,
    )
    .unwrap();
    let bad = hits.iter().position(|h| h.load(Ordering::Relaxed) != 1);
    assert_eq!(bad, None, "{} p={} n={n}", opts.kind, opts.workers);
    assert_eq!(report.iterations(), n);
    report
}

#[test]
fn every_index_runs_once() {
    for p in [1, 2, 4, 20] {
        for n in [1, 100, 100_000] {
            for kind in kinds(p) {
                bitmap_run(n, &ExecOptions::new(p, kind));
            }
        }
    }
}

#[test]
fn atomic_queue_runs_every_index_once() {
    for p in [1, 3, 20] {
        for kind in [
            ScheduleKind::SelfScheduling,
            ScheduleKind::Dynamic { chunk: 64 },
        ] {
            let opts = ExecOptions::new(p, kind).queue(QueueMode::Atomic);
            let r = bitmap_run(100_000, &opts);
            let expected = if opts.kind == ScheduleKind::SelfScheduling {
                100_000
            } else {
                1563
            };
            assert_eq!(r.chunks(), expected);
        }
    }
}

fn replay(log: &[ExecChunk], kind: &ScheduleKind, n: u64, p: usize) {
    let mut s = Scheduler::new(kind.clone(), LoopSpec::new(n, p).unwrap()).unwrap();
    for (k, c) in log.iter().enumerate() {
        assert_eq!(c.seq, k as u64);
        let want = s.next_chunk(c.worker).unwrap().unwrap();
        assert_eq!(
            (want.start, want.size),
            (c.start, c.size),
            "{kind} chunk {k}"
        );
    }
    assert_eq!(s.remaining(), 0);
}

#[test]
fn claim_order_is_a_sequential_trace() {
    let (n, p) = (20_000, 6);
    for kind in kinds(p) {
        let r = bitmap_run(n, &ExecOptions::new(p, kind.clone()).with_log());
        let log = r.chunk_log.as_ref().unwrap();
        assert_eq!(log.len() as u64, r.chunks());
        replay(log, &kind, n, p);
    }
    for kind in [
        ScheduleKind::SelfScheduling,
        ScheduleKind::Dynamic { chunk: 9 },
    ] {
        let opts = ExecOptions::new(p, kind.clone())
            .queue(QueueMode::Atomic)
            .with_log();
        let log = bitmap_run(n, &opts).chunk_log.unwrap();
        replay(&log, &kind, n, p);
    }
}

#[test]
fn single_worker_runs_in_order() {
    for kind in kinds(1).into_iter().filter(|k| !k.is_random()) {
        let seen = Mutex::new(Vec::new());
        parallel_for(
            500,
            |i| seen.lock().unwrap().push(i),
            &ExecOptions::new(1, kind),
        )
        .unwrap();
        assert_eq!(seen.into_inner().unwrap(), (0..500).collect::<Vec<_>>());
    }
}

#[test]
fn static_block_hands_each_worker_its_block() {
    let sums: Vec<AtomicU64> = (0..4).map(|_| AtomicU64::new(0)).collect();
    let opts = ExecOptions::new(4, ScheduleKind::StaticBlock).with_log();
    let r = parallel_for(
        100,
        |i| {
            sums[(i / 25) as usize].fetch_add(i, Ordering::Relaxed);
        },
        &opts,
    )
    .unwrap();
    let log = r.chunk_log.unwrap();
    assert_eq!(log.len(), 4);
    let mut blocks: Vec<_> = log.iter().map(|c| (c.worker, c.start, c.size)).collect();
    blocks.sort();
    assert_eq!(
        blocks,
        vec![(0, 0, 25), (1, 25, 25), (2, 50, 25), (3, 75, 25)]
    );
    for (j, s) in sums.iter().enumerate() {
        let lo = 25 * j as u64;
        assert_eq!(s.load(Ordering::Relaxed), (lo..lo + 25).sum::<u64>());
    }
    assert!(r
        .per_worker
        .iter()
        .all(|w| w.chunks == 1 && w.iterations == 25));
}

#[test]
fn empty_loop() {
    for kind in kinds(3) {
        let r = parallel_for(0, |_| panic!("no iterations"), &ExecOptions::new(3, kind)).unwrap();
        assert_eq!((r.chunks(), r.iterations()), (0, 0));
    }
}

#[test]
fn reductions_match_the_sequential_fold() {
    for p in [1, 4, 20] {
        for kind in kinds(p) {
            let opts = ExecOptions::new(p, kind);
            let (s, _) = parallel_reduce(100, |i| i, |a, b| a + b, 0u64, &opts).unwrap();
            assert_eq!(s, 4950);
            let (s, _) = parallel_reduce(0, |i| i, |a, b| a * b, 1u64, &opts).unwrap();
            assert_eq!(s, 1);
        }
    }
    let opts = ExecOptions::new(20, ScheduleKind::Factoring);
    let (s, _) = parallel_reduce(16_384, |_| 1u64, |a, b| a + b, 0, &opts).unwrap();
    assert_eq!(s, 16_384);
    // Wrapping arithmetic is still exact modulo 2^64.
    let fold = (0..50_000u64).fold(0u64, |a, i| {
        a.wrapping_add(i.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    });
    let opts = ExecOptions::new(7, ScheduleKind::Random { seed: 5 });
    let (s, _) = parallel_reduce(
        50_000,
        |i| i.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        u64::wrapping_add,
        0,
        &opts,
    )
    .unwrap();
    assert_eq!(s, fold);
}

#[test]
fn body_panic_propagates_after_draining() {
    let ran = AtomicU64::new(0);
    let opts = ExecOptions::new(4, ScheduleKind::SelfScheduling);
    let result = panic::catch_unwind(AssertUnwindSafe(|| {
        parallel_for(
            10_000,
            |i| {
                if i == 10 {
                    panic!("boom at {i}");
                }
                ran.fetch_add(1, Ordering::Relaxed);
            },
            &opts,
        )
    }));
    let payload = result.unwrap_err();
    assert_eq!(
        payload.downcast_ref::<String>().map(String::as_str),
        Some("boom at 10")
    );
    assert!(ran.load(Ordering::Relaxed) < 10_000);
}

#[test]
fn pin_failures_degrade_with_a_warning() {
    let opts = ExecOptions::new(2, ScheduleKind::Guided).pinned(vec![1_000_000, 1_000_001]);
    let r = bitmap_run(1000, &opts);
    assert!(r.pin_warning);
    assert_eq!(r.per_worker[0].pin, PinStatus::Failed(1_000_000));

    let cpu = allowed_cpus().first().copied().unwrap_or(0);
    let r = bitmap_run(
        1000,
        &ExecOptions::new(2, ScheduleKind::Guided).pinned(vec![cpu, cpu]),
    );
    if cfg!(target_os = "linux") {
        assert!(!r.pin_warning);
        assert_eq!(r.per_worker[1].pin, PinStatus::Pinned(cpu));
    }
}

#[test]
fn rejects_bad_options() {
    let opts = ExecOptions::new(2, ScheduleKind::Guided).pinned(vec![0]);
    assert_eq!(
        parallel_for(10, |_| {}, &opts).unwrap_err(),
        ExecError::PinMapLength { workers: 2, got: 1 }
    );
    let opts = ExecOptions::new(0, ScheduleKind::Guided);
    assert!(matches!(
        parallel_for(10, |_| {}, &opts),
        Err(ExecError::Schedule(_))
    ));
    let opts = ExecOptions::new(
        3,
        ScheduleKind::WeightedFactoring(WorkerWeights::uniform(2).unwrap()),
    );
    assert!(matches!(
        parallel_for(10, |_| {}, &opts),
        Err(ExecError::Schedule(_))
    ));
}
