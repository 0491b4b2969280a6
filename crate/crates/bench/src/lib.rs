//! Fixtures shared by the criterion benchmarks.

use ntangle_core::{random_pure, PureState};

/// Seed used for every benchmark state.
pub const BENCH_SEED: u64 = 0x7a61;

pub fn bench_state(n: usize) -> PureState {
    random_pure(n, BENCH_SEED)
}
