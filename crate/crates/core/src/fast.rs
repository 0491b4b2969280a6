//! Reduced O(2^n) evaluation of the n-tangle of odd n qubits.
//!
//! With `N(l)` the popcount of `l`:
//!
//! ```text
//! T = Σ_{i < 2^(n-1)} (-1)^N(i) a_i a_(2^n - i - 1)
//! P = 2 Σ_{i < 2^(n-2)} (-1)^N(i) a_(2i) a_(2^(n-1) - 2i - 1)
//! Q = 2 Σ_{i < 2^(n-2)} (-1)^N(i) a_(2^(n-1) + 2i) a_(2^n - 2i - 1)
//! τ⁽¹⁾ = 4 |T² - PQ|
//! ```
//!
//! τ⁽ⁱ⁾ is τ⁽¹⁾ of the state with qubits 1 and i exchanged, and the n-tangle
//! is the mean over i. Each sum runs left to right in index order.

use num_complex::Complex64;

use crate::cost::{MulTally, NoTally};
use crate::error::{Result, TangleError};
use crate::qstate::{permute_qubits, PureState, QubitPermutation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tpq {
    pub t: Complex64,
    pub p: Complex64,
    pub q: Complex64,
}

impl Tpq {
    /// `4 |T² - PQ|`.
    pub fn tangle(&self) -> f64 {
        4.0 * (self.t * self.t - self.p * self.q).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangleReport {
    pub n: usize,
    /// τ⁽ⁱ⁾ for i = 1..=n.
    pub per_qubit: Vec<f64>,
    pub average: f64,
    /// T, P, Q of the state with qubits 1 and i exchanged.
    pub tpq_per_qubit: Vec<Tpq>,
    pub mult_count: Option<u64>,
}

#[inline]
fn parity_sign(i: usize) -> f64 {
    if i.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn compute_tpq_tallied<C: MulTally>(a: &[Complex64], n: usize, tally: &mut C) -> Tpq {
    let dim = 1usize << n;
    let half = dim >> 1;
    let quarter = dim >> 2;

    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..half {
        t += a[i] * a[dim - i - 1] * parity_sign(i);
    }
    tally.add(half as u64);

    let mut p = Complex64::new(0.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    for i in 0..quarter {
        let sign = parity_sign(i);
        p += a[2 * i] * a[half - 2 * i - 1] * sign;
        q += a[half + 2 * i] * a[dim - 2 * i - 1] * sign;
    }
    tally.add(2 * quarter as u64);

    Tpq { t, p: p * 2.0, q: q * 2.0 }
}

pub fn compute_tpq(s: &PureState) -> Result<Tpq> {
    if s.n() < 2 {
        return Err(TangleError::TooFewQubits { min: 2, got: s.n() });
    }
    Ok(compute_tpq_tallied(s.amplitudes(), s.n(), &mut NoTally))
}

/// τ⁽¹⁾ = 4|T² − PQ|.
pub fn tangle_1_fast(s: &PureState) -> Result<f64> {
    s.require_odd()?;
    Ok(compute_tpq_tallied(s.amplitudes(), s.n(), &mut NoTally).tangle())
}

fn transposed(s: &PureState, i: usize) -> Result<PureState> {
    permute_qubits(s, &QubitPermutation::transposition(s.n(), 1, i)?)
}

fn tpq_for_qubit(s: &PureState, i: usize) -> Result<Tpq> {
    if i == 1 {
        return compute_tpq(s);
    }
    compute_tpq(&transposed(s, i)?)
}

/// τ⁽ⁱ⁾, evaluated as τ⁽¹⁾ of the state with qubits 1 and i exchanged.
pub fn tangle_i_fast(s: &PureState, i: usize) -> Result<f64> {
    s.require_odd()?;
    s.require_qubit(i)?;
    Ok(tpq_for_qubit(s, i)?.tangle())
}

/// Every τ⁽ⁱ⁾ and their mean.
pub fn n_tangle(s: &PureState) -> Result<TangleReport> {
    s.require_odd()?;
    let n = s.n();
    let tpq_per_qubit = (1..=n).map(|i| tpq_for_qubit(s, i)).collect::<Result<Vec<_>>>()?;
    let per_qubit: Vec<f64> = tpq_per_qubit.iter().map(Tpq::tangle).collect();
    let average = per_qubit.iter().sum::<f64>() / n as f64;
    Ok(TangleReport { n, per_qubit, average, tpq_per_qubit, mult_count: None })
}

/// Reusable n-tangle evaluation on raw amplitude slices, for inner loops
/// that would otherwise allocate a state and its transposed copies per call.
#[derive(Debug, Clone)]
pub(crate) struct AverageEvaluator {
    n: usize,
    /// `maps[i - 2][index]`: index after exchanging qubits 1 and i.
    maps: Vec<Vec<usize>>,
    scratch: Vec<Complex64>,
}

impl AverageEvaluator {
    pub(crate) fn new(n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(TangleError::RequiresOddQubits(n));
        }
        let maps = (2..=n)
            .map(|i| {
                let p = QubitPermutation::transposition(n, 1, i)?;
                Ok((0..1usize << n).map(|index| p.permute_index(index)).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self { n, maps, scratch: vec![Complex64::new(0.0, 0.0); 1 << n] })
    }

    /// Mean of τ⁽ⁱ⁾ over all qubits; `a` need not be normalized.
    pub(crate) fn average(&mut self, a: &[Complex64]) -> f64 {
        let mut total = compute_tpq_tallied(a, self.n, &mut NoTally).tangle();
        for map in &self.maps {
            for (index, &target) in map.iter().enumerate() {
                self.scratch[target] = a[index];
            }
            total += compute_tpq_tallied(&self.scratch, self.n, &mut NoTally).tangle();
        }
        total / self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naive::tangle_i_naive;
    use crate::stategen::{basis_product, ghz, random_pure, w};
    use proptest::prelude::*;

    fn close(a: Complex64, re: f64) -> bool {
        (a - Complex64::new(re, 0.0)).norm() < 1e-15
    }

    #[test]
    fn tpq_examples() {
        let g = compute_tpq(&ghz(5).unwrap()).unwrap();
        assert!(close(g.t, 0.5) && close(g.p, 0.0) && close(g.q, 0.0));

        let ws = compute_tpq(&w(3).unwrap()).unwrap();
        assert!(close(ws.t, 0.0) && close(ws.p, -2.0 / 3.0) && close(ws.q, 0.0));

        let zero = compute_tpq(&basis_product(&[0, 0, 0, 0, 0]).unwrap()).unwrap();
        assert_eq!(zero.tangle(), 0.0);
        assert!(compute_tpq(&PureState::from_real(1, &[1.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn ghz_and_w_for_every_odd_n() {
        for n in [3, 5, 7, 9, 11] {
            assert!((tangle_1_fast(&ghz(n).unwrap()).unwrap() - 1.0).abs() < 1e-14);
            assert!(tangle_1_fast(&w(n).unwrap()).unwrap().abs() < 1e-14);
        }
        for i in 1..=7 {
            assert!((tangle_i_fast(&ghz(7).unwrap(), i).unwrap() - 1.0).abs() < 1e-14);
        }
        let report = n_tangle(&ghz(5).unwrap()).unwrap();
        assert!(report.per_qubit.iter().all(|&t| (t - 1.0).abs() < 1e-14));
        assert!(n_tangle(&w(5).unwrap()).unwrap().average.abs() < 1e-14);
    }

    #[test]
    fn even_counts_rejected() {
        let s = random_pure(4, 0);
        assert!(tangle_1_fast(&s).is_err());
        assert!(n_tangle(&s).is_err());
        assert!(tangle_i_fast(&random_pure(3, 0), 4).is_err());
    }

    #[test]
    fn qubit_one_is_identity_transposition() {
        let s = random_pure(5, 3);
        assert_eq!(tangle_i_fast(&s, 1).unwrap(), tangle_1_fast(&s).unwrap());
    }

    #[test]
    fn matches_oracle_on_three_and_five_qubits() {
        for n in [3, 5] {
            for seed in 0..10 {
                let s = random_pure(n, seed);
                for i in 1..=n {
                    let oracle = tangle_i_naive(&s, i).unwrap();
                    let fast = tangle_i_fast(&s, i).unwrap();
                    assert!((fast - oracle).abs() <= 1e-10 * oracle.max(1.0));
                }
            }
        }
    }

    #[test]
    fn raw_evaluator_matches_report() {
        let mut eval = AverageEvaluator::new(5).unwrap();
        let s = random_pure(5, 12);
        assert_eq!(eval.average(s.amplitudes()), n_tangle(&s).unwrap().average);
        assert!(AverageEvaluator::new(4).is_err());
    }

    #[test]
    fn report_average_is_mean() {
        let r = n_tangle(&random_pure(7, 5)).unwrap();
        let mean = r.per_qubit.iter().sum::<f64>() / 7.0;
        assert!((r.average - mean).abs() < 1e-12);
        assert_eq!(r.tpq_per_qubit.len(), 7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn per_qubit_covariance(seed in any::<u64>(), idx in 0usize..120) {
            let s = random_pure(5, seed);
            let p = &QubitPermutation::all(5)[idx];
            let base = n_tangle(&s).unwrap();
            let moved = n_tangle(&permute_qubits(&s, p).unwrap()).unwrap();
            prop_assert!((moved.average - base.average).abs() < 1e-10);
            for i in 1..=5 {
                prop_assert!((moved.per_qubit[p.apply(i) - 1] - base.per_qubit[i - 1]).abs() < 1e-10);
            }
        }

        #[test]
        fn degree_four_homogeneity(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            prop_assume!(re.abs() + im.abs() > 1e-3);
            let c = Complex64::new(re, im);
            let s = random_pure(5, seed);
            let base = n_tangle(&s).unwrap();
            let scaled = n_tangle(&s.scaled(c).unwrap()).unwrap();
            let factor = c.norm_sqr().powi(2);
            for (a, b) in base.per_qubit.iter().zip(&scaled.per_qubit) {
                prop_assert!((b - a * factor).abs() <= 1e-12 * (a * factor).max(f64::MIN_POSITIVE) + 1e-300);
            }
        }
    }
}
