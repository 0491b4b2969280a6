//! Random local operators and checks of the SLOCC transformation law
//! `τ(ψ') = τ(ψ) |det α det β ...|²` for `ψ' = (α ⊗ β ⊗ ...) ψ`.

use num_complex::Complex64;

use crate::error::{Result, TangleError};
use crate::fast::{n_tangle, tangle_i_fast};
use crate::qstate::{apply_local_operators, condition_number2, det2, LocalOperatorChain, Mat2, PureState};
use crate::residual::residual_tau;
use crate::stategen::{gaussian_complex, seeded_rng};

/// Default condition-number cap of random invertible operators.
pub const DEFAULT_CONDITION_CAP: f64 = 20.0;
/// Random invertible operators are resampled until `|det|` reaches this.
pub const MIN_RANDOM_DET: f64 = 0.1;
/// Operators are accepted as unitary within this deviation.
pub const UNITARY_TOL: f64 = 1e-10;
/// Operators with `|det|` at or below this are rejected as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

fn gaussian_mat2(rng: &mut rand_chacha::ChaCha8Rng) -> Mat2 {
    [[gaussian_complex(rng), gaussian_complex(rng)], [gaussian_complex(rng), gaussian_complex(rng)]]
}

/// Gaussian 2x2 operators, resampled until `|det| >= 0.1` and the condition
/// number is at most `condition_cap`.
pub fn random_local_invertible(n: usize, seed: u64, condition_cap: f64) -> Result<LocalOperatorChain> {
    if condition_cap.is_nan() || condition_cap <= 1.0 {
        return Err(TangleError::InvalidArgument(format!("condition cap must exceed 1, got {condition_cap}")));
    }
    let mut rng = seeded_rng(seed);
    let ops = (0..n)
        .map(|_| loop {
            let m = gaussian_mat2(&mut rng);
            if det2(&m).norm() >= MIN_RANDOM_DET && condition_number2(&m) <= condition_cap {
                break m;
            }
        })
        .collect();
    LocalOperatorChain::new(ops)
}

/// Random invertible operators rescaled to unit determinant.
pub fn random_local_special(n: usize, seed: u64, condition_cap: f64) -> Result<LocalOperatorChain> {
    let chain = random_local_invertible(n, seed, condition_cap)?;
    let ops = chain
        .ops()
        .iter()
        .map(|m| {
            let scale = Complex64::new(1.0, 0.0) / det2(m).sqrt();
            m.map(|row| row.map(|z| z * scale))
        })
        .collect();
    LocalOperatorChain::new(ops)
}

/// Random unitaries from Gram-Schmidt on Gaussian columns.
pub fn random_local_unitary(n: usize, seed: u64) -> LocalOperatorChain {
    let mut rng = seeded_rng(seed);
    let ops = (0..n)
        .map(|_| loop {
            let m = gaussian_mat2(&mut rng);
            let (c0, c1) = ([m[0][0], m[1][0]], [m[0][1], m[1][1]]);
            let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
            if n0 < 1e-8 {
                continue;
            }
            let u0 = [c0[0] / n0, c0[1] / n0];
            let proj = u0[0].conj() * c1[0] + u0[1].conj() * c1[1];
            let v = [c1[0] - u0[0] * proj, c1[1] - u0[1] * proj];
            let n1 = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if n1 < 1e-8 {
                continue;
            }
            break [[u0[0], v[0] / n1], [u0[1], v[1] / n1]];
        })
        .collect();
    LocalOperatorChain::new(ops).expect("non-empty finite chain")
}

/// Which tangle a check evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TangleMeasure {
    /// τ(ψ) from the residual-entanglement sums.
    Residual,
    /// τ⁽ⁱ⁾ by the reduced formula.
    Qubit(usize),
    /// The n-tangle average.
    Average,
}

impl TangleMeasure {
    pub fn evaluate(&self, s: &PureState) -> Result<f64> {
        match *self {
            TangleMeasure::Residual => residual_tau(s),
            TangleMeasure::Qubit(i) => tangle_i_fast(s, i),
            TangleMeasure::Average => Ok(n_tangle(s)?.average),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TangleMeasure::Residual => "residual".to_string(),
            TangleMeasure::Qubit(i) => format!("tau_{i}"),
            TangleMeasure::Average => "average".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SloccVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    pub passed: bool,
}

impl SloccVerdict {
    /// `|lhs - rhs| / |rhs|`, or `|lhs|` when `rhs` is exactly zero.
    fn relative(lhs: f64, rhs: f64, tol: f64) -> Self {
        let rel_error = if rhs == 0.0 { lhs.abs() } else { (lhs - rhs).abs() / rhs.abs() };
        Self { lhs, rhs, rel_error, passed: rel_error <= tol }
    }

    /// `|lhs - rhs| / max(|rhs|, 1)`: absolute for values of a normalized state.
    fn bounded(lhs: f64, rhs: f64, tol: f64) -> Self {
        let rel_error = (lhs - rhs).abs() / rhs.abs().max(1.0);
        Self { lhs, rhs, rel_error, passed: rel_error <= tol }
    }
}

/// Checks the SLOCC law for the residual τ. `ψ'` is not renormalized.
pub fn verify_slocc_equation(s: &PureState, c: &LocalOperatorChain, tol: f64) -> Result<SloccVerdict> {
    verify_slocc_measure(s, c, TangleMeasure::Residual, tol, false)
}

/// Checks the SLOCC law for any measure.
///
/// With `normalized`, both sides are divided by `‖ψ'‖⁴` and `ψ` is taken at
/// unit norm, comparing `τ(ψ'/‖ψ'‖)` with the predicted value.
pub fn verify_slocc_measure(
    s: &PureState,
    c: &LocalOperatorChain,
    measure: TangleMeasure,
    tol: f64,
    normalized: bool,
) -> Result<SloccVerdict> {
    s.require_odd()?;
    c.assert_invertible(SINGULAR_TOL)?;
    let image = apply_local_operators(s, c)?;
    let before = measure.evaluate(s)?;
    let scale = c.det_scale();
    if normalized {
        let image_norm4 = image.norm_sqr().powi(2);
        let lhs = measure.evaluate(&image.normalized())?;
        let rhs = before * scale / image_norm4;
        Ok(SloccVerdict::relative(lhs, rhs, tol))
    } else {
        let lhs = measure.evaluate(&image)?;
        Ok(SloccVerdict::relative(lhs, before * scale, tol))
    }
}

/// Outcome of [`verify_lu_invariance`], one verdict per tangle.
#[derive(Debug, Clone, PartialEq)]
pub struct LuReport {
    pub residual: SloccVerdict,
    pub per_qubit: Vec<SloccVerdict>,
    pub average: SloccVerdict,
}

impl LuReport {
    pub fn passed(&self) -> bool {
        self.residual.passed && self.average.passed && self.per_qubit.iter().all(|v| v.passed)
    }

    pub fn worst_error(&self) -> f64 {
        self.per_qubit.iter().map(|v| v.rel_error).fold(self.residual.rel_error.max(self.average.rel_error), f64::max)
    }
}

/// Local unitaries have `|det| = 1`, so every tangle must be unchanged.
/// Errors are measured as `|Δ| / max(value, 1)`.
pub fn verify_lu_invariance(s: &PureState, u: &LocalOperatorChain, tol: f64) -> Result<LuReport> {
    s.require_odd()?;
    u.assert_unitary(UNITARY_TOL)?;
    let image = apply_local_operators(s, u)?;
    let residual = SloccVerdict::bounded(residual_tau(&image)?, residual_tau(s)?, tol);
    let (before, after) = (n_tangle(s)?, n_tangle(&image)?);
    let per_qubit =
        before.per_qubit.iter().zip(&after.per_qubit).map(|(&b, &a)| SloccVerdict::bounded(a, b, tol)).collect();
    let average = SloccVerdict::bounded(after.average, before.average, tol);
    Ok(LuReport { residual, per_qubit, average })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SloccClassVerdict {
    DifferentClasses,
    Inconclusive,
}

/// Two states are SLOCC-inequivalent when exactly one of their tangles vanishes.
pub fn slocc_distinguish(tau_a: f64, tau_b: f64, tol: f64) -> SloccClassVerdict {
    if (tau_a <= tol) != (tau_b <= tol) {
        SloccClassVerdict::DifferentClasses
    } else {
        SloccClassVerdict::Inconclusive
    }
}
