//! State vectors, qubit bit indexing, permutations and local operators.
//!
//! Qubit `k` (1-based) is stored in bit `n - k` of the amplitude index, so
//! qubit 1 is the most significant bit and `|a1 a2 ... an>` maps to
//! `sum_k a_k 2^(n-k)`. Every module in the crate relies on this convention.

use num_complex::Complex64;

use crate::error::{Result, TangleError};

/// A single complex amplitude.
pub type Amplitude = Complex64;

/// A 2x2 complex matrix stored row-major.
pub type Mat2 = [[Complex64; 2]; 2];

/// Default tolerance of [`PureState::is_normalized`].
pub const DEFAULT_NORM_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Amplitude vector of an `n`-qubit pure state.
///
/// States are not required to be normalized: images under invertible local
/// operators are generally not, and the tangle polynomials are evaluated on
/// them as they are.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(TangleError::TooFewQubits { min: 1, got: 0 });
        }
        if n >= usize::BITS as usize - 1 {
            return Err(TangleError::InvalidArgument(format!("{n} qubits is too many")));
        }
        let expected = 1usize << n;
        if amps.len() != expected {
            return Err(TangleError::AmplitudeCount { n, expected, got: amps.len() });
        }
        if let Some(index) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(TangleError::NonFinite { index });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() {
            return Err(TangleError::NonFinite { index: 0 });
        }
        if norm_sqr <= 0.0 {
            return Err(TangleError::ZeroNorm);
        }
        Ok(Self { n, amps })
    }

    /// Builds a state from real amplitudes.
    pub fn from_real(n: usize, amps: &[f64]) -> Result<Self> {
        Self::new(n, amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Returns the state rescaled to unit squared norm.
    pub fn normalized(&self) -> Self {
        let s = 1.0 / self.norm_sqr().sqrt();
        Self { n: self.n, amps: self.amps.iter().map(|a| a * s).collect() }
    }

    /// Multiplies every amplitude by `c`.
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        Self::new(self.n, self.amps.iter().map(|a| a * c).collect())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        check_dims(self.n, other.n)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub(crate) fn require_odd(&self) -> Result<()> {
        if self.n < 3 || self.n.is_multiple_of(2) {
            return Err(TangleError::RequiresOddQubits(self.n));
        }
        Ok(())
    }

    pub(crate) fn require_qubit(&self, qubit: usize) -> Result<()> {
        if qubit == 0 || qubit > self.n {
            return Err(TangleError::QubitOutOfRange { qubit, n: self.n });
        }
        Ok(())
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(TangleError::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Maps `(a1, ..., an)` to `sum_k a_k 2^(n-k)`.
pub fn index_of_bits(bits: &[u8], n: usize) -> Result<usize> {
    check_dims(n, bits.len())?;
    bits.iter().enumerate().try_fold(0usize, |acc, (position, &value)| {
        if value > 1 {
            return Err(TangleError::InvalidBit { position, value });
        }
        Ok((acc << 1) | value as usize)
    })
}

/// Inverse of [`index_of_bits`].
pub fn bits_of_index(index: usize, n: usize) -> Result<Vec<u8>> {
    if n >= usize::BITS as usize || index >> n != 0 {
        return Err(TangleError::IndexOutOfRange { index, n });
    }
    Ok((1..=n).map(|k| ((index >> (n - k)) & 1) as u8).collect())
}

/// Number of set bits in the `n`-bit representation of `l`.
pub fn popcount(l: usize, n: usize) -> Result<u32> {
    if n >= usize::BITS as usize || l >> n != 0 {
        return Err(TangleError::IndexOutOfRange { index: l, n });
    }
    Ok(l.count_ones())
}

/// Bit mask of qubit `k` (1-based) in an `n`-qubit index.
#[inline]
pub(crate) fn qubit_mask(k: usize, n: usize) -> usize {
    1usize << (n - k)
}

/// A bijection on the qubit labels `1..=n`.
///
/// Applying it to a state moves the bit of qubit `k` to position `map(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitPermutation {
    map: Vec<usize>,
}

impl QubitPermutation {
    /// `map[k - 1]` is the image of qubit `k`.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v == 0 || v > n {
                return Err(TangleError::InvalidPermutation(format!("value {v} outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(TangleError::InvalidPermutation(format!("value {v} repeated")));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (1..=n).collect() }
    }

    /// The transposition `(i, j)`; `i == j` gives the identity.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        for q in [i, j] {
            if q == 0 || q > n {
                return Err(TangleError::QubitOutOfRange { qubit: q, n });
            }
        }
        let mut map: Vec<usize> = (1..=n).collect();
        map.swap(i - 1, j - 1);
        Ok(Self { map })
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Image of qubit `k`.
    pub fn apply(&self, k: usize) -> usize {
        self.map[k - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (k, &v) in self.map.iter().enumerate() {
            inv[v - 1] = k + 1;
        }
        Self { map: inv }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &QubitPermutation) -> Result<Self> {
        check_dims(self.n(), first.n())?;
        Ok(Self { map: first.map.iter().map(|&k| self.apply(k)).collect() })
    }

    pub fn fixes(&self, k: usize) -> bool {
        self.apply(k) == k
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &v)| v == k + 1)
    }

    /// All `n!` permutations in lexicographic order of their maps.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Self { map: current.clone() });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }

    /// Maps an amplitude index of the input state to its index after permuting.
    pub(crate) fn permute_index(&self, index: usize) -> usize {
        let n = self.map.len();
        let mut out = 0;
        for (k, &target) in self.map.iter().enumerate() {
            if index & qubit_mask(k + 1, n) != 0 {
                out |= qubit_mask(target, n);
            }
        }
        out
    }
}

/// Relabels the qubits of `s` according to `p`.
pub fn permute_qubits(s: &PureState, p: &QubitPermutation) -> Result<PureState> {
    check_dims(s.n, p.n())?;
    let mut amps = vec![ZERO; s.dim()];
    for (index, &a) in s.amps.iter().enumerate() {
        amps[p.permute_index(index)] = a;
    }
    Ok(PureState { n: s.n, amps })
}

pub fn mat2(a: [[f64; 2]; 2]) -> Mat2 {
    a.map(|row| row.map(|x| Complex64::new(x, 0.0)))
}

pub fn det2(m: &Mat2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Conjugate transpose.
pub fn adjoint2(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub const IDENTITY2: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

/// Ratio of the singular values of a 2x2 matrix; infinite when singular.
pub fn condition_number2(m: &Mat2) -> f64 {
    let frob: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let d = det2(m).norm();
    if d == 0.0 {
        return f64::INFINITY;
    }
    // s1^2 + s2^2 = frob, s1 s2 = |det|
    let disc = (frob * frob - 4.0 * d * d).max(0.0).sqrt();
    let s1_sq = 0.5 * (frob + disc);
    let s2_sq = d * d / s1_sq;
    (s1_sq / s2_sq).sqrt()
}

/// Largest entry-wise deviation of `m† m` from the identity.
pub fn unitarity_deviation2(m: &Mat2) -> f64 {
    let g = mul2(&adjoint2(m), m);
    let mut dev: f64 = 0.0;
    for (r, row) in g.iter().enumerate() {
        for (c, z) in row.iter().enumerate() {
            let target = if r == c { ONE } else { ZERO };
            dev = dev.max((z - target).norm());
        }
    }
    dev
}

/// The product `op_1 ⊗ op_2 ⊗ ... ⊗ op_n` of single-qubit operators.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperatorChain {
    ops: Vec<Mat2>,
}

impl LocalOperatorChain {
    pub fn new(ops: Vec<Mat2>) -> Result<Self> {
        if ops.is_empty() {
            return Err(TangleError::TooFewQubits { min: 1, got: 0 });
        }
        if let Some(k) = ops.iter().position(|m| m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(TangleError::InvalidArgument(format!("operator on qubit {} is not finite", k + 1)));
        }
        Ok(Self { ops })
    }

    pub fn identity(n: usize) -> Self {
        Self { ops: vec![IDENTITY2; n] }
    }

    /// Identity everywhere except `op` on qubit `k`.
    pub fn single(n: usize, k: usize, op: Mat2) -> Result<Self> {
        if k == 0 || k > n {
            return Err(TangleError::QubitOutOfRange { qubit: k, n });
        }
        let mut ops = vec![IDENTITY2; n];
        ops[k - 1] = op;
        Ok(Self { ops })
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Mat2] {
        &self.ops
    }

    pub fn dets(&self) -> Vec<Complex64> {
        self.ops.iter().map(det2).collect()
    }

    /// `|prod_k det(op_k)|^2`, the SLOCC scale factor of a degree-4 invariant.
    pub fn det_scale(&self) -> f64 {
        self.ops.iter().map(|m| det2(m).norm_sqr()).product()
    }

    pub fn assert_invertible(&self, tol: f64) -> Result<()> {
        for (k, m) in self.ops.iter().enumerate() {
            let det_abs = det2(m).norm();
            if det_abs <= tol {
                return Err(TangleError::NotInvertible { qubit: k + 1, det_abs });
            }
        }
        Ok(())
    }

    pub fn assert_unitary(&self, tol: f64) -> Result<()> {
        for (k, m) in self.ops.iter().enumerate() {
            let deviation = unitarity_deviation2(m);
            if deviation > tol {
                return Err(TangleError::NotUnitary { qubit: k + 1, deviation });
            }
        }
        Ok(())
    }
}

/// Applies `op_1 ⊗ ... ⊗ op_n` qubit by qubit. The result is not renormalized.
pub fn apply_local_operators(s: &PureState, c: &LocalOperatorChain) -> Result<PureState> {
    check_dims(s.n, c.n())?;
    let mut amps = s.amps.clone();
    for (k, op) in c.ops.iter().enumerate() {
        let mask = qubit_mask(k + 1, s.n);
        for lo in 0..amps.len() {
            if lo & mask != 0 {
                continue;
            }
            let hi = lo | mask;
            let (x0, x1) = (amps[lo], amps[hi]);
            amps[lo] = op[0][0] * x0 + op[0][1] * x1;
            amps[hi] = op[1][0] * x0 + op[1][1] * x1;
        }
    }
    PureState::new(s.n, amps)
}

/// Reduced density matrix of one qubit, tracing out all others.
pub fn reduced_density_single(s: &PureState, qubit: usize) -> Result<Mat2> {
    s.require_qubit(qubit)?;
    if !s.is_normalized(DEFAULT_NORM_TOL) {
        return Err(TangleError::NotNormalized { norm_sqr: s.norm_sqr() });
    }
    let mask = qubit_mask(qubit, s.n);
    let mut rho = [[ZERO; 2]; 2];
    for (lo, &a0) in s.amps.iter().enumerate() {
        if lo & mask != 0 {
            continue;
        }
        let a1 = s.amps[lo | mask];
        rho[0][0] += a0 * a0.conj();
        rho[0][1] += a0 * a1.conj();
        rho[1][0] += a1 * a0.conj();
        rho[1][1] += a1 * a1.conj();
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stategen::{ghz, random_pure, w};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn index_of_bits_examples() {
        assert_eq!(index_of_bits(&[0, 0, 1], 3).unwrap(), 1);
        assert_eq!(index_of_bits(&[1, 0, 0], 3).unwrap(), 4);
        assert_eq!(index_of_bits(&[1, 1, 1, 1, 1], 5).unwrap(), 31);
        assert!(matches!(index_of_bits(&[1, 0], 3), Err(TangleError::DimensionMismatch { .. })));
        assert!(matches!(index_of_bits(&[2, 0, 0], 3), Err(TangleError::InvalidBit { .. })));
    }

    #[test]
    fn popcount_examples() {
        assert_eq!(popcount(0, 5).unwrap(), 0);
        assert_eq!(popcount(5, 5).unwrap(), 2);
        assert_eq!(popcount(31, 5).unwrap(), 5);
        assert!(popcount(32, 5).is_err());
    }

    #[test]
    fn transposition_moves_bits() {
        let s = PureState::from_real(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let p = QubitPermutation::transposition(3, 1, 3).unwrap();
        let out = permute_qubits(&s, &p).unwrap();
        assert_eq!(out.amplitude(4), c(1.0));
        assert_eq!(out.norm_sqr(), 1.0);

        let id = permute_qubits(&s, &QubitPermutation::identity(3)).unwrap();
        assert_eq!(id, s);
    }

    #[test]
    fn permutation_inverse_restores_state() {
        let s = random_pure(5, 17);
        let p = QubitPermutation::new(vec![3, 5, 1, 2, 4]).unwrap();
        let back = permute_qubits(&permute_qubits(&s, &p).unwrap(), &p.inverse()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn invalid_permutations_rejected() {
        assert!(QubitPermutation::new(vec![1, 1, 2]).is_err());
        assert!(QubitPermutation::new(vec![0, 1, 2]).is_err());
        assert!(QubitPermutation::new(vec![1, 2, 4]).is_err());
    }

    #[test]
    fn all_permutations_counts() {
        assert_eq!(QubitPermutation::all(3).len(), 6);
        let all5 = QubitPermutation::all(5);
        assert_eq!(all5.len(), 120);
        let unique: std::collections::HashSet<_> = all5.iter().collect();
        assert_eq!(unique.len(), 120);
    }

    #[test]
    fn local_operator_examples() {
        let g = ghz(3).unwrap();
        assert_eq!(apply_local_operators(&g, &LocalOperatorChain::identity(3)).unwrap(), g);

        let zero = PureState::from_real(1, &[1.0, 0.0]).unwrap();
        let x = mat2([[0.0, 1.0], [1.0, 0.0]]);
        let flipped = apply_local_operators(&zero, &LocalOperatorChain::new(vec![x]).unwrap()).unwrap();
        assert_eq!(flipped.amplitudes(), &[c(0.0), c(1.0)]);

        let chain = LocalOperatorChain::single(3, 1, mat2([[2.0, 0.0], [0.0, 1.0]])).unwrap();
        let out = apply_local_operators(&g, &chain).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (i, a) in out.amplitudes().iter().enumerate() {
            let expected = match i {
                0 => 2.0 * r,
                7 => r,
                _ => 0.0,
            };
            assert!((a - c(expected)).norm() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = ghz(3).unwrap();
        assert!(apply_local_operators(&g, &LocalOperatorChain::identity(4)).is_err());
        assert!(permute_qubits(&g, &QubitPermutation::identity(5)).is_err());
    }

    #[test]
    fn reduced_density_examples() {
        let zero = PureState::from_real(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let rho = reduced_density_single(&zero, 1).unwrap();
        assert_eq!(rho, mat2([[1.0, 0.0], [0.0, 0.0]]));

        let rho = reduced_density_single(&ghz(3).unwrap(), 1).unwrap();
        assert!((det2(&rho) * 4.0 - c(1.0)).norm() < 1e-15);

        let rho = reduced_density_single(&w(3).unwrap(), 1).unwrap();
        assert!((rho[0][0] - c(2.0 / 3.0)).norm() < 1e-15);
        assert!((rho[1][1] - c(1.0 / 3.0)).norm() < 1e-15);
        assert!((det2(&rho) * 4.0 - c(8.0 / 9.0)).norm() < 1e-15);

        let unnormalized = zero.scaled(c(2.0)).unwrap();
        assert!(matches!(reduced_density_single(&unnormalized, 1), Err(TangleError::NotNormalized { .. })));
    }

    #[test]
    fn state_validation() {
        assert!(PureState::from_real(2, &[1.0, 0.0, 0.0]).is_err());
        assert_eq!(PureState::from_real(1, &[0.0, 0.0]), Err(TangleError::ZeroNorm));
        assert!(matches!(PureState::from_real(1, &[f64::NAN, 1.0]), Err(TangleError::NonFinite { index: 0 })));
    }

    #[test]
    fn condition_number_of_diagonal() {
        let m = mat2([[4.0, 0.0], [0.0, 0.5]]);
        assert!((condition_number2(&m) - 8.0).abs() < 1e-12);
        assert!(condition_number2(&mat2([[1.0, 1.0], [1.0, 1.0]])).is_infinite());
    }

    proptest! {
        #[test]
        fn bits_round_trip(n in 1usize..12, seed in any::<u64>()) {
            let index = (seed as usize) & ((1usize << n) - 1);
            let bits = bits_of_index(index, n).unwrap();
            prop_assert_eq!(index_of_bits(&bits, n).unwrap(), index);
        }

        #[test]
        fn popcount_complement(n in 1usize..16, seed in any::<u64>()) {
            let l = (seed as usize) & ((1usize << n) - 1);
            let full = (1usize << n) - 1;
            prop_assert_eq!(popcount(l, n).unwrap() + popcount(full - l, n).unwrap(), n as u32);
        }

        #[test]
        fn permutation_composition_law(seed in any::<u64>(), a in 0usize..120, b in 0usize..120) {
            let all = QubitPermutation::all(5);
            let (p, q) = (&all[a], &all[b]);
            let s = random_pure(5, seed);
            let lhs = permute_qubits(&permute_qubits(&s, p).unwrap(), q).unwrap();
            let rhs = permute_qubits(&s, &q.after(p).unwrap()).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            let sorted = |st: &PureState| {
                let mut v: Vec<(u64, u64)> = st.amplitudes().iter().map(|a| (a.re.to_bits(), a.im.to_bits())).collect();
                v.sort_unstable();
                v
            };
            prop_assert_eq!(sorted(&lhs), sorted(&s));
        }

        #[test]
        fn unitary_chain_preserves_norm(seed in any::<u64>()) {
            let s = random_pure(5, seed);
            let u = crate::slocc::random_local_unitary(5, seed ^ 0x5eed);
            let out = apply_local_operators(&s, &u).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
