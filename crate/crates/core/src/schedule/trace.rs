use super::{Chunk, LoopSpec, ScheduleError, ScheduleKind, Scheduler};

/// Which worker issues each request when replaying a schedule offline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RequestOrder {
    /// Workers `0, 1, .., p-1, 0, 1, ..`.
    RoundRobin,
    /// An explicit worker sequence, repeated until the loop drains.
    Sequence(Vec<usize>),
}

/// Replays a schedule to completion and returns every chunk in issue order.
///
/// Workers that have nothing left (a static worker whose share is done) are
/// skipped. An explicit order that can never drain the loop is an error.
pub fn chunk_trace(
    kind: ScheduleKind,
    spec: LoopSpec,
    order: &RequestOrder,
) -> Result<Vec<Chunk>, ScheduleError> {
    let mut sched = Scheduler::new(kind, spec)?;
    let workers: Vec<usize> = match order {
        RequestOrder::RoundRobin => (0..spec.p).collect(),
        RequestOrder::Sequence(seq) => {
            if let Some(&w) = seq.iter().find(|&&w| w >= spec.p) {
                return Err(ScheduleError::InvalidWorker {
                    worker: w,
                    workers: spec.p,
                });
            }
            seq.clone()
        }
    };
    let mut out = Vec::new();
    if spec.n == 0 {
        return Ok(out);
    }
    if workers.is_empty() {
        return Err(ScheduleError::Stalled { remaining: spec.n });
    }
    let mut idle = 0;
    for &w in workers.iter().cycle() {
        if sched.remaining() == 0 {
            break;
        }
        match sched.next_chunk(w)? {
            Some(c) => {
                out.push(c);
                idle = 0;
            }
            None => {
                idle += 1;
                if idle >= workers.len() {
                    return Err(ScheduleError::Stalled {
                        remaining: sched.remaining(),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::WorkerWeights;
    use proptest::prelude::*;

    fn rr(kind: ScheduleKind, n: u64, p: usize) -> Vec<Chunk> {
        chunk_trace(
            kind,
            LoopSpec::new(n, p).unwrap(),
            &RequestOrder::RoundRobin,
        )
        .unwrap()
    }

    fn sizes(trace: &[Chunk]) -> Vec<u64> {
        trace.iter().map(|c| c.size).collect()
    }

    // Independent oracles: the textbook recurrences written out directly.

    fn gss_oracle(n: u64, p: u64) -> Vec<u64> {
        let mut r = n;
        let mut out = vec![];
        while r > 0 {
            let k = r.div_ceil(p);
            out.push(k);
            r -= k;
        }
        out
    }

    fn fac2_oracle(n: u64, p: u64) -> Vec<u64> {
        let mut r = n;
        let mut out = vec![];
        while r > 0 {
            let k = ((r as f64) / (2.0 * p as f64)).ceil() as u64;
            for _ in 0..p {
                if r == 0 {
                    break;
                }
                let s = k.min(r);
                out.push(s);
                r -= s;
            }
        }
        out
    }

    fn tss_oracle(n: u64, p: u64) -> Vec<u64> {
        let f = ((n as f64) / (2.0 * p as f64)).ceil();
        let c = ((2 * n) as f64 / (f + 1.0)).ceil();
        let delta = if c > 1.0 { (f - 1.0) / (c - 1.0) } else { 0.0 };
        let mut r = n;
        let mut out = vec![];
        let mut i = 0.0;
        while r > 0 {
            // Small epsilon guards exact integers such as 13 - 7 * (12/14) = 7.
            let s = ((f - i * delta + 1e-9).floor() as u64).max(1).min(r);
            out.push(s);
            r -= s;
            i += 1.0;
        }
        out
    }

    #[test]
    fn gss_hundred_on_four() {
        let expected = vec![25, 19, 14, 11, 8, 6, 5, 3, 3, 2, 1, 1, 1, 1];
        assert_eq!(gss_oracle(100, 4), expected);
        assert_eq!(sizes(&rr(ScheduleKind::Guided, 100, 4)), expected);
    }

    #[test]
    fn fac2_hundred_on_four() {
        let mut expected = vec![];
        for k in [13, 6, 3, 2, 1] {
            expected.extend([k; 4]);
        }
        assert_eq!(fac2_oracle(100, 4), expected);
        assert_eq!(sizes(&rr(ScheduleKind::Factoring, 100, 4)), expected);
    }

    #[test]
    fn tss_hundred_on_four() {
        let expected = vec![13, 12, 11, 10, 9, 8, 7, 7, 6, 5, 4, 3, 2, 1, 1, 1];
        assert_eq!(tss_oracle(100, 4), expected);
        assert_eq!(sizes(&rr(ScheduleKind::Trapezoid, 100, 4)), expected);
    }

    #[test]
    fn oracles_agree_on_larger_loops() {
        for (n, p) in [(16384, 20), (100_000, 20), (7, 4), (1, 1), (999, 7)] {
            assert_eq!(
                sizes(&rr(ScheduleKind::Guided, n, p)),
                gss_oracle(n, p as u64)
            );
            assert_eq!(
                sizes(&rr(ScheduleKind::Factoring, n, p)),
                fac2_oracle(n, p as u64)
            );
            assert_eq!(
                sizes(&rr(ScheduleKind::Trapezoid, n, p)),
                tss_oracle(n, p as u64)
            );
        }
    }

    #[test]
    fn static_block_hundred_on_four() {
        let t = rr(ScheduleKind::StaticBlock, 100, 4);
        assert_eq!(sizes(&t), vec![25; 4]);
        assert_eq!(
            t.iter().map(|c| c.worker).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn ss_hundred_on_four() {
        assert_eq!(
            sizes(&rr(ScheduleKind::SelfScheduling, 100, 4)),
            vec![1; 100]
        );
    }

    #[test]
    fn static_cyclic_five_on_two() {
        let t = rr(ScheduleKind::StaticCyclic, 5, 2);
        let got: Vec<_> = t.iter().map(|c| (c.start, c.size, c.worker)).collect();
        assert_eq!(
            got,
            vec![(0, 1, 0), (1, 1, 1), (2, 1, 0), (3, 1, 1), (4, 1, 0)]
        );
    }

    #[test]
    fn static_cyclic_ignores_request_order() {
        let spec = LoopSpec::new(6, 3).unwrap();
        let t = chunk_trace(
            ScheduleKind::StaticCyclic,
            spec,
            &RequestOrder::Sequence(vec![2, 2, 0, 1]),
        )
        .unwrap();
        for c in &t {
            assert_eq!(c.start % 3, c.worker as u64);
        }
    }

    #[test]
    fn random_golden_trace() {
        let t = rr(ScheduleKind::Random { seed: 42 }, 100, 4);
        let s = sizes(&t);
        assert_eq!(s.iter().sum::<u64>(), 100);
        assert!(s.iter().all(|&k| (1..=12).contains(&k)));
        // Frozen from an independent replay of the SplitMix64 stream.
        assert_eq!(
            s,
            vec![9, 2, 4, 5, 1, 11, 3, 10, 5, 8, 3, 6, 7, 7, 8, 3, 2, 6]
        );
    }

    #[test]
    fn wf2_equal_weights_match_fac2() {
        for (n, p) in [(100, 4), (16384, 20), (100_000, 20)] {
            let w = WorkerWeights::uniform(p).unwrap();
            assert_eq!(
                rr(ScheduleKind::WeightedFactoring(w), n, p),
                rr(ScheduleKind::Factoring, n, p)
            );
        }
    }

    #[test]
    fn wf2_favors_heavier_workers() {
        let w = WorkerWeights::from_f64(&[1.0, 0.5]).unwrap();
        let t = rr(ScheduleKind::WeightedFactoring(w), 120, 2);
        // w = (4/3, 2/3); first batch base 120: ceil(4/3*30)=40, ceil(2/3*30)=20
        assert_eq!((t[0].size, t[1].size), (40, 20));
    }

    #[test]
    fn explicit_order_validation() {
        let spec = LoopSpec::new(10, 2).unwrap();
        assert!(matches!(
            chunk_trace(
                ScheduleKind::Guided,
                spec,
                &RequestOrder::Sequence(vec![0, 5])
            ),
            Err(ScheduleError::InvalidWorker { worker: 5, .. })
        ));
        assert!(matches!(
            chunk_trace(
                ScheduleKind::StaticBlock,
                spec,
                &RequestOrder::Sequence(vec![0])
            ),
            Err(ScheduleError::Stalled { remaining: 5 })
        ));
        assert!(matches!(
            chunk_trace(ScheduleKind::Guided, spec, &RequestOrder::Sequence(vec![])),
            Err(ScheduleError::Stalled { .. })
        ));
    }

    fn any_kind(p: usize) -> impl Strategy<Value = ScheduleKind> {
        let weights = proptest::collection::vec(1u64..10, p);
        prop_oneof![
            Just(ScheduleKind::StaticBlock),
            Just(ScheduleKind::StaticCyclic),
            (1u64..50).prop_map(|chunk| ScheduleKind::Dynamic { chunk }),
            Just(ScheduleKind::SelfScheduling),
            Just(ScheduleKind::Guided),
            (1u64..50).prop_map(|min_chunk| ScheduleKind::GuidedMin { min_chunk }),
            Just(ScheduleKind::Trapezoid),
            Just(ScheduleKind::Factoring),
            weights.prop_map(|w| ScheduleKind::WeightedFactoring(
                WorkerWeights::from_units(&w).unwrap()
            )),
            any::<u64>().prop_map(|seed| ScheduleKind::Random { seed }),
        ]
    }

    fn kind_and_spec() -> impl Strategy<Value = (ScheduleKind, LoopSpec, Vec<usize>)> {
        (1usize..24, 0u64..5000).prop_flat_map(|(p, n)| {
            (
                any_kind(p),
                Just(LoopSpec::new(n, p).unwrap()),
                proptest::collection::vec(0..p, 1..3 * p),
            )
        })
    }

    fn covers_all(order: &[usize], p: usize) -> bool {
        (0..p).all(|w| order.contains(&w))
    }

    proptest! {
        #[test]
        fn trace_partitions_iteration_space((kind, spec, order) in kind_and_spec()) {
            let order = if covers_all(&order, spec.p) {
                RequestOrder::Sequence(order)
            } else {
                RequestOrder::RoundRobin
            };
            let t = chunk_trace(kind, spec, &order).unwrap();
            let mut seen = t.iter().map(|c| (c.start, c.size)).collect::<Vec<_>>();
            seen.sort_unstable();
            let mut next = 0;
            for (start, size) in seen {
                prop_assert!(size >= 1);
                prop_assert_eq!(start, next);
                next += size;
            }
            prop_assert_eq!(next, spec.n);
            for (i, c) in t.iter().enumerate() {
                prop_assert_eq!(c.seq, i as u64);
                prop_assert!(c.worker < spec.p);
            }
        }

        #[test]
        fn trace_is_deterministic((kind, spec, order) in kind_and_spec()) {
            let order = if covers_all(&order, spec.p) {
                RequestOrder::Sequence(order)
            } else {
                RequestOrder::RoundRobin
            };
            prop_assert_eq!(
                chunk_trace(kind.clone(), spec, &order).unwrap(),
                chunk_trace(kind, spec, &order).unwrap()
            );
        }

        #[test]
        fn decreasing_techniques_never_grow(n in 0u64..20_000, p in 1usize..32) {
            for kind in [ScheduleKind::Guided, ScheduleKind::Trapezoid, ScheduleKind::Factoring] {
                let s = sizes(&rr(kind, n, p));
                prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
            }
            let s = sizes(&rr(ScheduleKind::StaticBlock, n, p));
            if let Some((last, head)) = s.split_last() {
                prop_assert!(head.iter().all(|&k| k == s[0] && k >= *last));
            }
        }

        #[test]
        fn chunk_count_bracket(n in 0u64..20_000, p in 1usize..32) {
            let count = |k| rr(k, n, p).len();
            let block = count(ScheduleKind::StaticBlock);
            let ss = count(ScheduleKind::SelfScheduling);
            prop_assert_eq!(ss as u64, n);
            if n > 0 {
                // p blocks of ceil(n/p), fewer when the rounded blocks cover n early.
                let b = n.div_ceil(p as u64);
                prop_assert_eq!(block as u64, n.div_ceil(b));
                prop_assert!(block <= p);
            }
            for kind in [
                ScheduleKind::Guided,
                ScheduleKind::Trapezoid,
                ScheduleKind::Factoring,
                ScheduleKind::StaticCyclic,
            ] {
                let c = count(kind);
                prop_assert!(block <= c && c <= ss);
                if n >= p as u64 {
                    prop_assert!(c >= p);
                }
            }
            // RAND may take up to floor(n/2p) per chunk, so only the outer bracket holds.
            let c = count(ScheduleKind::Random { seed: n });
            prop_assert!(c <= ss);
            prop_assert!(n == 0 || c >= 1);
        }

        #[test]
        fn alias_forms_agree(n in 0u64..3000, p in 1usize..16) {
            prop_assert_eq!(
                rr(ScheduleKind::SelfScheduling, n, p),
                rr(ScheduleKind::Dynamic { chunk: 1 }, n, p)
            );
            prop_assert_eq!(
                rr(ScheduleKind::StaticCyclic, n, p),
                rr(ScheduleKind::Dynamic { chunk: 1 }, n, p)
            );
            prop_assert_eq!(
                rr(ScheduleKind::Guided, n, p),
                rr(ScheduleKind::GuidedMin { min_chunk: 1 }, n, p)
            );
        }

        #[test]
        fn wf2_uniform_reduces_to_fac2(n in 0u64..50_000, p in 1usize..32, unit in 1u64..1000) {
            let w = WorkerWeights::from_units(&vec![unit; p]).unwrap();
            prop_assert_eq!(
                rr(ScheduleKind::WeightedFactoring(w), n, p),
                rr(ScheduleKind::Factoring, n, p)
            );
        }

        #[test]
        fn random_sizes_within_bounds(n in 1u64..100_000, p in 1usize..32, seed in any::<u64>()) {
            let spec = LoopSpec::new(n, p).unwrap();
            let (lo, hi) = Scheduler::new(ScheduleKind::Random { seed }, spec)
                .unwrap()
                .random_bounds()
                .unwrap();
            prop_assert!(lo >= 1 && hi > lo);
            let s = sizes(&rr(ScheduleKind::Random { seed }, n, p));
            let (last, head) = s.split_last().unwrap();
            prop_assert!(head.iter().all(|k| (lo..=hi).contains(k)));
            prop_assert!(*last >= 1 && *last <= hi);
        }
    }
}
