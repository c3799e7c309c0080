//! Fixtures shared by the benchmarks.

use daisen_core::synth::{synthetic_trace, SynthOptions};
use daisen_core::{Mode, TraceStore};

/// Strictly valid synthetic store of `tasks` records over one millisecond.
pub fn store(tasks: usize) -> TraceStore {
    let records = synthetic_trace(SynthOptions { tasks, seed: 42, ..Default::default() });
    TraceStore::ingest(records, Mode::Strict).expect("synthetic traces are valid")
}

/// Deterministic pseudo-random intervals, some nested and some disjoint.
pub fn intervals(n: usize) -> Vec<(usize, f64, f64)> {
    let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        (x >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..n)
        .map(|i| {
            let s = next() * 1000.0;
            (i, s, s + next() * 50.0)
        })
        .collect()
}
