//! Brute-force evaluation of the ε-contraction sums.
//!
//! This is the ground truth the reduced formulas in [`crate::fast`] are
//! tested against, so it deliberately shares nothing with them: no sign
//! tables from popcounts, no T/P/Q grouping. Each term is built from the
//! four multi-indices and the ε symbol exactly as the contraction is written.
//!
//! Two summation modes exist:
//!
//! * [`SumMode::Pruned`] (default) enumerates only tuples whose ε factors are
//!   all nonzero. For each qubit, the ε pairs force two of the four bits to be
//!   complements of the other two, leaving `2^(2n)` tuples. The enumeration
//!   order is the integer `t` in `0..2^(2n)`, whose high `n` bits give the
//!   first free bit of every qubit and whose low `n` bits give the second.
//! * [`SumMode::Full`] runs the literal loop over all `2^(4n)` tuples
//!   (α outermost, δ innermost), multiplying amplitudes before testing ε.
//!   Only available for `n <= 3`.
//!
//! Terms are accumulated in plain double precision in that order.

use num_complex::Complex64;
use rand::seq::SliceRandom;

use crate::cost::{MulTally, NoTally};
use crate::error::{Result, TangleError};
use crate::qstate::{permute_qubits, PureState, QubitPermutation};
use crate::stategen::{random_pure_from, seeded_rng};

/// Default largest qubit count accepted by the oracle.
pub const DEFAULT_ORACLE_CAP: usize = 5;
/// Largest qubit count the oracle accepts even with an explicit override.
pub const MAX_ORACLE_CAP: usize = 7;
/// Largest qubit count for the literal `2^(4n)` loop.
pub const FULL_SUM_CAP: usize = 3;
/// A permuted evaluation must differ by more than this to count as a witness.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

/// The antisymmetric symbol: ε00 = ε11 = 0, ε01 = 1, ε10 = -1.
#[inline]
pub fn epsilon(a: u8, b: u8) -> i8 {
    match (a, b) {
        (0, 1) => 1,
        (1, 0) => -1,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumMode {
    #[default]
    Pruned,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub cap: usize,
    pub mode: SumMode,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_ORACLE_CAP, mode: SumMode::Pruned }
    }
}

/// How the four copies of a qubit's index are contracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contraction {
    /// ε(α,β) ε(γ,δ)
    Pair,
    /// ε(α,γ) ε(β,δ)
    Link,
}

/// The contraction pattern singling out qubit `i`: link on `i`, pairs elsewhere.
pub fn qubit_pattern(n: usize, i: usize) -> Vec<Contraction> {
    (1..=n).map(|k| if k == i { Contraction::Link } else { Contraction::Pair }).collect()
}

/// Pairs on qubits `1..n-1`, link on qubit `n`.
pub fn even_form_pattern(n: usize) -> Vec<Contraction> {
    let mut pattern = vec![Contraction::Pair; n];
    pattern[n - 1] = Contraction::Link;
    pattern
}

fn term_sign(pattern: &[Contraction], bits: [&[u8]; 4]) -> i8 {
    let [alpha, beta, gamma, delta] = bits;
    let mut sign = 1i8;
    for (k, c) in pattern.iter().enumerate() {
        sign *= match c {
            Contraction::Pair => epsilon(alpha[k], beta[k]) * epsilon(gamma[k], delta[k]),
            Contraction::Link => epsilon(alpha[k], gamma[k]) * epsilon(beta[k], delta[k]),
        };
    }
    sign
}

fn index_from_bits(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

fn bit_of(value: usize, k: usize, n: usize) -> u8 {
    ((value >> (n - 1 - k)) & 1) as u8
}

/// The raw contraction sum `Σ a_α a_β a_γ a_δ × (ε factors)`.
pub fn contraction_sum<C: MulTally>(s: &PureState, pattern: &[Contraction], mode: SumMode, tally: &mut C) -> Complex64 {
    let n = s.n();
    assert_eq!(pattern.len(), n, "pattern length must match qubit count");
    let a = s.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    let (mut alpha, mut beta, mut gamma, mut delta) = (vec![0u8; n], vec![0u8; n], vec![0u8; n], vec![0u8; n]);
    match mode {
        SumMode::Pruned => {
            for t in 0..1usize << (2 * n) {
                let (x, y) = (t >> n, t & ((1 << n) - 1));
                for (k, c) in pattern.iter().enumerate() {
                    let (xk, yk) = (bit_of(x, k, n), bit_of(y, k, n));
                    match c {
                        Contraction::Pair => {
                            alpha[k] = xk;
                            beta[k] = 1 - xk;
                            gamma[k] = yk;
                            delta[k] = 1 - yk;
                        }
                        Contraction::Link => {
                            alpha[k] = xk;
                            beta[k] = yk;
                            gamma[k] = 1 - xk;
                            delta[k] = 1 - yk;
                        }
                    }
                }
                let sign = term_sign(pattern, [&alpha, &beta, &gamma, &delta]);
                let product = a[index_from_bits(&alpha)]
                    * a[index_from_bits(&beta)]
                    * a[index_from_bits(&gamma)]
                    * a[index_from_bits(&delta)];
                tally.add(3);
                acc += product * f64::from(sign);
            }
        }
        SumMode::Full => {
            let dim = 1usize << n;
            for ia in 0..dim {
                for (k, bit) in alpha.iter_mut().enumerate() {
                    *bit = bit_of(ia, k, n);
                }
                for ib in 0..dim {
                    for (k, bit) in beta.iter_mut().enumerate() {
                        *bit = bit_of(ib, k, n);
                    }
                    for ig in 0..dim {
                        for (k, bit) in gamma.iter_mut().enumerate() {
                            *bit = bit_of(ig, k, n);
                        }
                        for id in 0..dim {
                            for (k, bit) in delta.iter_mut().enumerate() {
                                *bit = bit_of(id, k, n);
                            }
                            let product = a[ia] * a[ib] * a[ig] * a[id];
                            tally.add(3);
                            let sign = term_sign(pattern, [&alpha, &beta, &gamma, &delta]);
                            if sign != 0 {
                                acc += product * f64::from(sign);
                            }
                        }
                    }
                }
            }
        }
    }
    acc
}

fn check_size(n: usize, opts: &OracleOptions) -> Result<()> {
    let cap = opts.cap.min(MAX_ORACLE_CAP);
    if n > cap {
        return Err(TangleError::AboveCap { n, cap });
    }
    if opts.mode == SumMode::Full && n > FULL_SUM_CAP {
        return Err(TangleError::AboveCap { n, cap: FULL_SUM_CAP });
    }
    Ok(())
}

/// τ⁽ⁱ⁾ = 2|W⁽ⁱ⁾| by direct contraction, default options.
pub fn tangle_i_naive(s: &PureState, i: usize) -> Result<f64> {
    tangle_i_naive_with(s, i, &OracleOptions::default())
}

pub fn tangle_i_naive_with(s: &PureState, i: usize, opts: &OracleOptions) -> Result<f64> {
    tangle_i_naive_tallied(s, i, opts, &mut NoTally)
}

pub(crate) fn tangle_i_naive_tallied<C: MulTally>(
    s: &PureState,
    i: usize,
    opts: &OracleOptions,
    tally: &mut C,
) -> Result<f64> {
    s.require_odd()?;
    s.require_qubit(i)?;
    check_size(s.n(), opts)?;
    let w = contraction_sum(s, &qubit_pattern(s.n(), i), opts.mode, tally);
    Ok(2.0 * w.norm())
}

/// Average of the brute-force τ⁽ⁱ⁾ over all qubits.
pub fn n_tangle_naive(s: &PureState, opts: &OracleOptions) -> Result<f64> {
    let n = s.n();
    let mut total = 0.0;
    for i in 1..=n {
        total += tangle_i_naive_with(s, i, opts)?;
    }
    Ok(total / n as f64)
}

/// The even-n tangle contraction (also valid at n = 3).
///
/// With `force`, odd `n > 3` is evaluated anyway; the value is then not a
/// permutation invariant, which [`find_noninvariance_witness`] exhibits.
pub fn even_form_tangle_naive(s: &PureState, opts: &OracleOptions, force: bool) -> Result<f64> {
    let n = s.n();
    if n < 2 {
        return Err(TangleError::TooFewQubits { min: 2, got: n });
    }
    if n % 2 == 1 && n > 3 && !force {
        return Err(TangleError::EvenFormOnOddQubits(n));
    }
    check_size(n, opts)?;
    let w = contraction_sum(s, &even_form_pattern(n), opts.mode, &mut NoTally);
    Ok(2.0 * w.norm())
}

/// A state and qubit relabeling on which the forced odd-n contraction changes.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub trial: usize,
    pub state: PureState,
    pub permutation: QubitPermutation,
    pub before: f64,
    pub after: f64,
}

impl Witness {
    pub fn delta(&self) -> f64 {
        (self.after - self.before).abs()
    }
}

pub fn find_noninvariance_witness(n: usize, trials: usize, seed: u64) -> Result<Option<Witness>> {
    find_noninvariance_witness_with(n, trials, seed, &OracleOptions::default())
}

/// Random search for a [`Witness`]; `Ok(None)` means none was found.
pub fn find_noninvariance_witness_with(
    n: usize,
    trials: usize,
    seed: u64,
    opts: &OracleOptions,
) -> Result<Option<Witness>> {
    if n.is_multiple_of(2) || n < 5 {
        return Err(TangleError::InvalidArgument(format!("witness search needs odd n >= 5, got {n}")));
    }
    check_size(n, opts)?;
    let mut rng = seeded_rng(seed);
    for trial in 0..trials {
        let state = random_pure_from(n, &mut rng);
        let mut map: Vec<usize> = (1..=n).collect();
        map.shuffle(&mut rng);
        let permutation = QubitPermutation::new(map)?;
        let before = even_form_tangle_naive(&state, opts, true)?;
        let after = even_form_tangle_naive(&permute_qubits(&state, &permutation)?, opts, true)?;
        if (after - before).abs() > WITNESS_THRESHOLD {
            return Ok(Some(Witness { trial, state, permutation, before, after }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stategen::{ghz, random_pure, w};

    #[test]
    fn epsilon_table() {
        assert_eq!(epsilon(0, 1), 1);
        assert_eq!(epsilon(1, 0), -1);
        assert_eq!(epsilon(0, 0), 0);
        assert_eq!(epsilon(1, 1), 0);
    }

    #[test]
    fn ghz_and_w_anchors() {
        let g = ghz(3).unwrap();
        let ws = w(3).unwrap();
        for i in 1..=3 {
            assert!((tangle_i_naive(&g, i).unwrap() - 1.0).abs() < 1e-14);
            assert!(tangle_i_naive(&ws, i).unwrap().abs() < 1e-14);
        }
        let g5 = ghz(5).unwrap();
        assert!((tangle_i_naive(&g5, 2).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn full_and_pruned_sums_agree() {
        let full = OracleOptions { mode: SumMode::Full, ..Default::default() };
        for seed in 0..5 {
            let s = random_pure(3, seed);
            for i in 1..=3 {
                let a = tangle_i_naive(&s, i).unwrap();
                let b = tangle_i_naive_with(&s, i, &full).unwrap();
                assert!((a - b).abs() < 1e-13, "seed {seed} qubit {i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn three_qubit_tangles_coincide() {
        for seed in 0..20 {
            let s = random_pure(3, seed);
            let t1 = tangle_i_naive(&s, 1).unwrap();
            let t2 = tangle_i_naive(&s, 2).unwrap();
            let t3 = tangle_i_naive(&s, 3).unwrap();
            assert!((t1 - t2).abs() < 1e-10 && (t1 - t3).abs() < 1e-10);
            let even = even_form_tangle_naive(&s, &OracleOptions::default(), false).unwrap();
            assert!((even - t3).abs() < 1e-12);
        }
    }

    #[test]
    fn even_n_contraction_anchors() {
        let opts = OracleOptions::default();
        assert!((even_form_tangle_naive(&ghz(4).unwrap(), &opts, false).unwrap() - 1.0).abs() < 1e-14);
        assert!(even_form_tangle_naive(&w(4).unwrap(), &opts, false).unwrap().abs() < 1e-14);
    }

    #[test]
    fn preconditions() {
        let s4 = random_pure(4, 1);
        assert!(matches!(tangle_i_naive(&s4, 1), Err(TangleError::RequiresOddQubits(4))));
        let s7 = random_pure(7, 1);
        assert!(matches!(tangle_i_naive(&s7, 1), Err(TangleError::AboveCap { n: 7, cap: 5 })));
        let raised = OracleOptions { cap: 7, ..Default::default() };
        assert!(tangle_i_naive_with(&s7, 1, &raised).is_ok());
        let full = OracleOptions { mode: SumMode::Full, ..Default::default() };
        assert!(tangle_i_naive_with(&random_pure(5, 1), 1, &full).is_err());
        assert!(tangle_i_naive(&random_pure(5, 1), 6).is_err());
        let s5 = random_pure(5, 2);
        assert!(matches!(
            even_form_tangle_naive(&s5, &OracleOptions::default(), false),
            Err(TangleError::EvenFormOnOddQubits(5))
        ));
        assert!(even_form_tangle_naive(&s5, &OracleOptions::default(), true).is_ok());
    }

    #[test]
    fn homogeneous_of_degree_four() {
        let s = random_pure(5, 8);
        let c = Complex64::new(0.7, -1.3);
        let scaled = s.scaled(c).unwrap();
        for i in 1..=5 {
            let base = tangle_i_naive(&s, i).unwrap();
            let got = tangle_i_naive(&scaled, i).unwrap();
            assert!((got - base * c.norm_sqr().powi(2)).abs() <= 1e-12 * got.max(1.0));
        }
    }

    #[test]
    fn witness_search() {
        let found = find_noninvariance_witness(5, 100, 2024).unwrap().expect("witness");
        assert!(found.delta() > WITNESS_THRESHOLD);
        assert!(!found.permutation.fixes(5));
        assert!(find_noninvariance_witness(3, 10, 0).is_err());
        assert!(find_noninvariance_witness(4, 10, 0).is_err());
    }
}
