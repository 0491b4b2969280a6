//! Multiplication counting and wall-clock comparison of the two evaluators.
//!
//! The unit counted is one complex multiplication of two amplitudes (or of an
//! amplitude product by a further amplitude). Sign factors, the real scalings
//! by 2 and 4 and the final modulus are not counted. The reduced formula
//! additionally needs two complex products of sums (T² and PQ); those are
//! reported separately as `combine_mults` so the amplitude count is a clean
//! `2^n`.

use std::time::Instant;

use crate::error::Result;
use crate::fast::{compute_tpq_tallied, tangle_1_fast};
use crate::naive::{tangle_i_naive_tallied, OracleOptions, SumMode, DEFAULT_ORACLE_CAP, FULL_SUM_CAP};
use crate::qstate::PureState;
use crate::stategen::random_pure;

/// Sink for multiplication counts.
pub trait MulTally {
    fn add(&mut self, mults: u64);
}

/// Discards counts; the uncounted evaluation paths use this.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoTally;

impl MulTally for NoTally {
    #[inline(always)]
    fn add(&mut self, _mults: u64) {}
}

/// Running tally of complex multiplications.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    complex_mults: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn complex_mults(&self) -> u64 {
        self.complex_mults
    }
}

impl MulTally for OpCounter {
    fn add(&mut self, mults: u64) {
        self.complex_mults += mults;
    }
}

/// Reference operation count of the reduced formula, `2^n + 3`.
pub fn reference_fast_count(n: usize) -> u64 {
    (1u64 << n) + 3
}

/// Reference operation count of the direct contraction, `3 · 2^(4n)`.
pub fn reference_naive_count(n: usize) -> u64 {
    3u64 << (4 * n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastCount {
    /// Amplitude products inside T, P and Q.
    pub amplitude_mults: u64,
    /// T² and PQ.
    pub combine_mults: u64,
    /// The value computed while counting.
    pub tangle: f64,
}

impl FastCount {
    pub fn total(&self) -> u64 {
        self.amplitude_mults + self.combine_mults
    }
}

/// Counts the multiplications of one τ⁽¹⁾ evaluation by the reduced formula.
pub fn count_fast_path(s: &PureState) -> Result<FastCount> {
    s.require_odd()?;
    let mut counter = OpCounter::new();
    let tpq = compute_tpq_tallied(s.amplitudes(), s.n(), &mut counter);
    Ok(FastCount { amplitude_mults: counter.complex_mults(), combine_mults: 2, tangle: tpq.tangle() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveCount {
    /// Literal `2^(4n)` loop; `None` above [`FULL_SUM_CAP`].
    pub literal: Option<u64>,
    /// Loop over nonzero-ε tuples only.
    pub pruned: u64,
    pub tangle: f64,
}

/// Counts amplitude multiplications of the brute-force τ⁽ⁱ⁾ in both modes.
pub fn count_naive_path(s: &PureState, i: usize) -> Result<NaiveCount> {
    count_naive_path_with(s, i, &OracleOptions::default())
}

pub fn count_naive_path_with(s: &PureState, i: usize, opts: &OracleOptions) -> Result<NaiveCount> {
    let opts = OracleOptions { mode: SumMode::Pruned, ..*opts };
    let mut pruned = OpCounter::new();
    let tangle = tangle_i_naive_tallied(s, i, &opts, &mut pruned)?;
    let literal = if s.n() <= FULL_SUM_CAP {
        let mut counter = OpCounter::new();
        tangle_i_naive_tallied(s, i, &OracleOptions { mode: SumMode::Full, ..opts }, &mut counter)?;
        Some(counter.complex_mults())
    } else {
        None
    };
    Ok(NaiveCount { literal, pruned: pruned.complex_mults(), tangle })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fast,
    NaivePruned,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Fast => "fast",
            Method::NaivePruned => "naive_pruned",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub n: usize,
    pub method: Method,
    pub mult_count: u64,
    pub paper_count: u64,
    /// Median over repetitions of the per-call time.
    pub median_seconds: f64,
}

pub const TIMING_CSV_HEADER: &str = "n,method,mult_count,paper_count,median_seconds";

impl TimingRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{:.16e}",
            self.n,
            self.method.name(),
            self.mult_count,
            self.paper_count,
            self.median_seconds
        )
    }
}

/// Minimum wall time of one timed batch.
const BATCH_SECONDS: f64 = 2e-3;

fn time_per_call(mut f: impl FnMut() -> f64) -> f64 {
    let mut iters = 1u64;
    loop {
        let start = Instant::now();
        let mut sink = 0.0;
        for _ in 0..iters {
            sink += f();
        }
        let elapsed = start.elapsed().as_secs_f64();
        std::hint::black_box(sink);
        if elapsed >= BATCH_SECONDS || iters >= 1 << 24 {
            return elapsed / iters as f64;
        }
        iters *= 2;
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

/// Median per-call time of τ⁽¹⁾ by both evaluators, two rows per `n`.
///
/// The state for each `n` is `random_pure(n, seed)`. The brute-force row is
/// omitted above the default oracle cap.
pub fn timing_sweep(n_list: &[usize], repetitions: usize, seed: u64) -> Result<Vec<TimingRow>> {
    let repetitions = repetitions.max(1);
    let mut rows = Vec::with_capacity(2 * n_list.len());
    for &n in n_list {
        let s = random_pure(n, seed);
        let fast = count_fast_path(&s)?;
        let opts = OracleOptions::default();

        let fast_times =
            (0..repetitions).map(|_| time_per_call(|| tangle_1_fast(std::hint::black_box(&s)).unwrap())).collect();
        rows.push(TimingRow {
            n,
            method: Method::Fast,
            mult_count: fast.amplitude_mults,
            paper_count: reference_fast_count(n),
            median_seconds: median(fast_times),
        });

        if n > DEFAULT_ORACLE_CAP {
            continue;
        }
        let naive = count_naive_path(&s, 1)?;
        let naive_times = (0..repetitions)
            .map(|_| time_per_call(|| crate::naive::tangle_i_naive_with(std::hint::black_box(&s), 1, &opts).unwrap()))
            .collect();
        rows.push(TimingRow {
            n,
            method: Method::NaivePruned,
            mult_count: naive.pruned,
            paper_count: reference_naive_count(n),
            median_seconds: median(naive_times),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naive::tangle_i_naive;
    use crate::stategen::random_pure;

    #[test]
    fn fast_counts_within_reference_window() {
        let c3 = count_fast_path(&random_pure(3, 0)).unwrap();
        assert_eq!(c3.amplitude_mults, 8);
        assert!((8..=16).contains(&c3.amplitude_mults));
        assert_eq!(reference_fast_count(3), 11);
        assert_eq!(c3.total(), 10);

        let c5 = count_fast_path(&random_pure(5, 0)).unwrap();
        assert!((32..=40).contains(&c5.amplitude_mults));
        let c7 = count_fast_path(&random_pure(7, 0)).unwrap();
        let ratio = c7.amplitude_mults as f64 / c5.amplitude_mults as f64;
        assert!((ratio - 4.0).abs() <= 0.5);
    }

    #[test]
    fn naive_counts() {
        let c3 = count_naive_path(&random_pure(3, 0), 1).unwrap();
        assert_eq!(c3.literal, Some(3 * (1 << 12)));
        assert_eq!(c3.literal, Some(reference_naive_count(3)));
        assert_eq!(c3.pruned, 192);

        let c5 = count_naive_path(&random_pure(5, 0), 1).unwrap();
        assert_eq!(c5.literal, None);
        assert_eq!(c5.pruned, 3 * (1 << 10));
        let fast = count_fast_path(&random_pure(5, 0)).unwrap();
        // 3·2^10 / 2^5
        assert_eq!(c5.pruned / fast.amplitude_mults, 96);
    }

    #[test]
    fn counting_does_not_change_values() {
        for seed in 0..5 {
            let s = random_pure(5, seed);
            assert_eq!(count_fast_path(&s).unwrap().tangle.to_bits(), tangle_1_fast(&s).unwrap().to_bits());
            assert_eq!(count_naive_path(&s, 2).unwrap().tangle.to_bits(), tangle_i_naive(&s, 2).unwrap().to_bits());
        }
    }

    #[test]
    fn sweep_shape() {
        let rows = timing_sweep(&[3, 5], 1, 7).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].method, Method::Fast);
        assert_eq!(rows[1].method, Method::NaivePruned);
        assert!(rows.iter().all(|r| r.median_seconds > 0.0));
        assert_eq!(rows[2].csv_line().split(',').count(), TIMING_CSV_HEADER.split(',').count());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
