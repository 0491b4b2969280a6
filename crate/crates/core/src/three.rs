//! Three-qubit specializations and the bipartite quantities around them.

use num_complex::Complex64;

use crate::error::{Result, TangleError};
use crate::qstate::{det2, reduced_density_single, PureState, DEFAULT_NORM_TOL};

/// Tolerance on `4 det ρ` above 1 before clamping.
const CUT_CLAMP_TOL: f64 = 1e-9;

fn require_n(s: &PureState, expected: usize) -> Result<()> {
    if s.n() != expected {
        return Err(TangleError::WrongQubitCount { expected, got: s.n() });
    }
    Ok(())
}

/// The three coefficient polynomials of the 3-tangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CkwTerms {
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl CkwTerms {
    /// `4 |d1 - 2 d2 + 4 d3|`.
    pub fn tangle(&self) -> f64 {
        4.0 * (self.d1 - self.d2 * 2.0 + self.d3 * 4.0).norm()
    }
}

pub fn ckw_terms(s: &PureState) -> Result<CkwTerms> {
    require_n(s, 3)?;
    let a = s.amplitudes();
    let sq = |z: Complex64| z * z;
    let d1 = sq(a[0]) * sq(a[7]) + sq(a[1]) * sq(a[6]) + sq(a[2]) * sq(a[5]) + sq(a[3]) * sq(a[4]);
    let (p07, p16, p25, p34) = (a[0] * a[7], a[1] * a[6], a[2] * a[5], a[3] * a[4]);
    let d2 = p07 * p34 + p07 * p25 + p07 * p16 + p34 * p25 + p34 * p16 + p25 * p16;
    let d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4];
    Ok(CkwTerms { d1, d2, d3 })
}

/// 3-tangle from the coefficient polynomials d1, d2, d3.
pub fn ckw_tangle(s: &PureState) -> Result<f64> {
    Ok(ckw_terms(s)?.tangle())
}

/// Two-qubit spin-flip quantity `|<ψ|ψ̃>|²` with `ψ̃ = (σy ⊗ σy) ψ*`.
///
/// Note the square: the usual pure-state concurrence is `|<ψ|ψ̃>|`, so this
/// returns the squared concurrence. For `ψ = Σ a_i |i>` it equals
/// `4 |a0 a3 - a1 a2|²`.
pub fn spin_flip_concurrence(s: &PureState) -> Result<f64> {
    require_n(s, 2)?;
    if !s.is_normalized(DEFAULT_NORM_TOL) {
        return Err(TangleError::NotNormalized { norm_sqr: s.norm_sqr() });
    }
    let a = s.amplitudes();
    // σy ⊗ σy maps (a0, a1, a2, a3) to (-a3, a2, a1, -a0)
    let flipped = [-a[3].conj(), a[2].conj(), a[1].conj(), -a[0].conj()];
    let overlap: Complex64 = a.iter().zip(flipped).map(|(x, y)| x.conj() * y).sum();
    Ok(overlap.norm_sqr())
}

/// `C²_{A(BC)} = 4 det ρ_A` for the cut separating `cut_qubit` from the rest.
pub fn c_a_bc_squared(s: &PureState, cut_qubit: usize) -> Result<f64> {
    require_n(s, 3)?;
    let rho = reduced_density_single(s, cut_qubit)?;
    let det = det2(&rho).re;
    let det = if (-1e-12..0.0).contains(&det) { 0.0 } else { det };
    Ok((4.0 * det).clamp(0.0, 1.0 + CUT_CLAMP_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fast::tangle_1_fast;
    use crate::naive::tangle_i_naive;
    use crate::qstate::{permute_qubits, QubitPermutation};
    use crate::stategen::{basis_product, ghz, random_pure, w};

    #[test]
    fn ghz_terms() {
        let t = ckw_terms(&ghz(3).unwrap()).unwrap();
        assert!((t.d1 - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        assert!(t.d2.norm() < 1e-15 && t.d3.norm() < 1e-15);
        assert!((t.tangle() - 1.0).abs() < 1e-14);
        assert!(ckw_tangle(&w(3).unwrap()).unwrap() < 1e-15);
        assert!(ckw_tangle(&random_pure(5, 0)).is_err());
    }

    #[test]
    fn agrees_with_contractions() {
        for seed in 0..20 {
            let s = random_pure(3, seed);
            let ckw = ckw_tangle(&s).unwrap();
            assert!((ckw - tangle_1_fast(&s).unwrap()).abs() <= 1e-11 * ckw.max(1e-300));
            for i in 1..=3 {
                assert!((ckw - tangle_i_naive(&s, i).unwrap()).abs() < 1e-10);
            }
            for p in QubitPermutation::all(3) {
                let moved = ckw_tangle(&permute_qubits(&s, &p).unwrap()).unwrap();
                assert!((moved - ckw).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spin_flip_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::from_real(2, &[r, 0.0, 0.0, r]).unwrap();
        assert!((spin_flip_concurrence(&bell).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(spin_flip_concurrence(&basis_product(&[0, 0]).unwrap()).unwrap(), 0.0);
        let product = PureState::from_real(2, &[r, r, 0.0, 0.0]).unwrap();
        assert!(spin_flip_concurrence(&product).unwrap() < 1e-15);
        assert!(spin_flip_concurrence(&ghz(3).unwrap()).is_err());
    }

    #[test]
    fn cut_examples() {
        assert!((c_a_bc_squared(&ghz(3).unwrap(), 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(c_a_bc_squared(&basis_product(&[0, 0, 0]).unwrap(), 1).unwrap(), 0.0);
        assert!((c_a_bc_squared(&w(3).unwrap(), 1).unwrap() - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn tangle_below_cut_term() {
        for seed in 0..50 {
            let s = random_pure(3, seed);
            let t = ckw_tangle(&s).unwrap();
            assert!(t >= 0.0 && t <= c_a_bc_squared(&s, 1).unwrap() + 1e-9);
        }
    }
}
