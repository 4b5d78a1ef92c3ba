//! Test-only helpers: a naive stack-replay accumulator and a seeded random
//! trace generator. Nothing here reuses the library's tree code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use cct_lens::trace_model::{format_trace, EventKind, MethodName, TraceEvent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const METHOD_POOL: [&str; 8] = [
    "p.A.f()",
    "p.A.g()",
    "p.A.h(int)",
    "p.B.f()",
    "p.B.g()",
    "q.C.run()",
    "q.C.<init>()",
    "q.D.call(java.lang.String)",
];

/// Per-method (self ns, invocations).
pub type Aggregate = BTreeMap<String, (u64, u64)>;

/// Replays each thread with a plain stack. Every interval between two
/// consecutive events of a thread is charged to the frame on top of the
/// stack at the start of the interval. Invocations count enters.
pub fn stack_replay(events: &[TraceEvent]) -> Aggregate {
    let mut by_tid: BTreeMap<u32, Vec<&TraceEvent>> = BTreeMap::new();
    for e in events {
        by_tid.entry(e.tid).or_default().push(e);
    }
    let mut out = Aggregate::new();
    for evs in by_tid.values() {
        let mut stack: Vec<&str> = Vec::new();
        let mut last_ts: Option<u64> = None;
        for e in evs {
            if let (Some(prev), Some(top)) = (last_ts, stack.last()) {
                out.entry(top.to_string()).or_default().0 += e.ts - prev;
            }
            last_ts = Some(e.ts);
            match e.kind {
                EventKind::Enter => {
                    stack.push(e.method.as_str());
                    out.entry(e.method.to_string()).or_default().1 += 1;
                }
                EventKind::Exit => {
                    assert_eq!(stack.pop(), Some(e.method.as_str()), "generator bug");
                }
            }
        }
        assert!(stack.is_empty(), "generator bug");
    }
    out
}

/// Sum of per-thread activity spans (first to last timestamp).
pub fn span_sum(events: &[TraceEvent]) -> u64 {
    let mut spans: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for e in events {
        let s = spans.entry(e.tid).or_insert((e.ts, e.ts));
        s.0 = s.0.min(e.ts);
        s.1 = s.1.max(e.ts);
    }
    spans.values().map(|(a, b)| b - a).sum()
}

/// A balanced random trace with at most `max_events` events, `max_methods`
/// distinct methods and `max_threads` threads. Timestamps per thread are
/// non-decreasing, with gaps between top-level frames and repeated
/// timestamps both possible. Events are returned interleaved across threads
/// in timestamp order.
pub fn random_trace(
    seed: u64,
    max_events: usize,
    max_methods: usize,
    max_threads: u32,
) -> Vec<TraceEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let methods = rng.random_range(1..=max_methods.min(METHOD_POOL.len()));
    let threads = rng.random_range(1..=max_threads);
    let budget = rng.random_range(0..=max_events / 2);
    let mut pairs_left: Vec<usize> = vec![0; threads as usize];
    for _ in 0..budget {
        pairs_left[rng.random_range(0..threads as usize)] += 1;
    }

    let mut all = Vec::new();
    for (t, &pairs) in pairs_left.iter().enumerate() {
        let tid = t as u32 + 1;
        let mut ts: u64 = rng.random_range(0..1_000);
        let mut stack: Vec<MethodName> = Vec::new();
        let mut entered = 0;
        while entered < pairs || !stack.is_empty() {
            let can_enter = entered < pairs;
            let enter = can_enter && (stack.is_empty() || rng.random_bool(0.55));
            ts += if rng.random_bool(0.1) {
                0
            } else {
                rng.random_range(1..500)
            };
            if enter {
                let m = MethodName::new(METHOD_POOL[rng.random_range(0..methods)]).unwrap();
                all.push(TraceEvent::enter(ts, tid, m.clone()));
                stack.push(m);
                entered += 1;
            } else {
                let m = stack.pop().unwrap();
                all.push(TraceEvent::exit(ts, tid, m));
            }
        }
    }
    all.sort_by_key(|e| e.ts);
    all
}

pub fn random_trace_text(seed: u64) -> String {
    format_trace(&random_trace(seed, 200, 8, 4))
}

const PATTERN_POOL: [&str; 12] = [
    "p.A.f()",
    "p.A.g()",
    "p.B.g()",
    "q.C.run()",
    "q.D.call(java.lang.String)",
    "p.A.*",
    "p.B.*",
    "p.*",
    "q.C.*",
    "q.*",
    "p.A.h*",
    "z.Nothing.*",
];

/// Up to two include and three exclude patterns from a fixed pool.
pub fn random_filter(seed: u64) -> cct_lens::filters::FilterSet {
    use cct_lens::filters::{FilterPattern, FilterSet};
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut pick = |n: usize| -> Vec<FilterPattern> {
        (0..rng.random_range(0..=n))
            .map(|_| {
                FilterPattern::new(PATTERN_POOL[rng.random_range(0..PATTERN_POOL.len())]).unwrap()
            })
            .collect()
    };
    let includes = if seed.is_multiple_of(3) {
        pick(2)
    } else {
        Vec::new()
    };
    let excludes = pick(3);
    FilterSet::new(includes, excludes)
}
