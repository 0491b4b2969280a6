//! Convex-roof extension of the n-tangle to mixed states.
//!
//! Every `m`-member decomposition of a rank-`r` state `ρ = Σ λ_j |e_j><e_j|`
//! comes from an `m x r` isometry `V` via `√p_i ψ_i = Σ_j V_ij √λ_j e_j`.
//! The minimizer searches over `V` by left-multiplying with Givens rotations
//! (which keeps `V† V = I`) in a derivative-free pattern search, restarted
//! from seeded random unitaries. Restart 0 always starts from the
//! eigendecomposition. The result is an upper bound on the roof value, never
//! a certified minimum.
//!
//! Because τ is homogeneous of degree 4, a member contributes
//! `p τ(ψ) = τ(φ) / ‖φ‖²` with `φ = √p ψ`, so the search works on the
//! unnormalized member vectors directly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TangleError};
use crate::fast::{n_tangle, AverageEvaluator};
use crate::qstate::PureState;
use crate::stategen::{gaussian_complex, seeded_rng};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-10;
/// Eigenvalues above this count toward the rank.
pub const RANK_TOL: f64 = 1e-10;
pub const ISOMETRY_TOL: f64 = 1e-8;
/// Members lighter than this are dropped from a decomposition.
pub const MIN_WEIGHT: f64 = 1e-12;
pub const DEFAULT_RESTARTS: usize = 32;
/// Largest qubit count accepted without `allow_large_n`.
pub const DEFAULT_ROOF_QUBITS: usize = 3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A density matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl MixedState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        if n == 0 || n > 12 {
            return Err(TangleError::InvalidDensity(format!("unsupported qubit count {n}")));
        }
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(TangleError::InvalidDensity(format!(
                "expected {dim}x{dim} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(TangleError::InvalidDensity("non-finite entry".into()));
        }
        let mut asym: f64 = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                asym = asym.max((matrix[(r, c)] - matrix[(c, r)].conj()).norm());
            }
        }
        if asym > HERMITIAN_TOL {
            return Err(TangleError::InvalidDensity(format!("not Hermitian (deviation {asym:e})")));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(TangleError::InvalidDensity(format!("trace {trace} is not 1")));
        }
        let state = Self { n, matrix };
        let min_eig = state.eigen().0.last().copied().unwrap_or(0.0);
        if min_eig < -EIGEN_TOL {
            return Err(TangleError::InvalidDensity(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(state)
    }

    /// `|ψ><ψ|` of the normalized state.
    pub fn from_pure(s: &PureState) -> Self {
        Self::from_ensemble(&[(1.0, s.clone())]).expect("pure projector is a valid density matrix")
    }

    /// `Σ w_k |ψ_k><ψ_k|` with each `ψ_k` normalized first.
    pub fn from_ensemble(members: &[(f64, PureState)]) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(TangleError::InvalidDensity("empty ensemble".into()));
        };
        let n = first.n();
        let dim = 1usize << n;
        let mut matrix = DMatrix::from_element(dim, dim, ZERO);
        for (w, s) in members {
            if s.n() != n {
                return Err(TangleError::DimensionMismatch { expected: n, got: s.n() });
            }
            if *w < 0.0 {
                return Err(TangleError::InvalidDensity(format!("negative weight {w}")));
            }
            let v = DVector::from_column_slice(s.normalized().amplitudes());
            matrix += (&v * v.adjoint()) * Complex64::new(*w, 0.0);
        }
        Self::new(n, matrix)
    }

    /// `Σ w_k ρ_k`.
    pub fn mixture(parts: &[(f64, &MixedState)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(TangleError::InvalidDensity("empty mixture".into()));
        };
        let dim = first.matrix.nrows();
        let mut matrix = DMatrix::from_element(dim, dim, ZERO);
        for (w, rho) in parts {
            if rho.n != first.n {
                return Err(TangleError::DimensionMismatch { expected: first.n, got: rho.n });
            }
            matrix += &rho.matrix * Complex64::new(*w, 0.0);
        }
        Self::new(first.n, matrix)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Eigenvalues in decreasing order with their unit eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, Vec<DVector<Complex64>>) {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
        (values, vectors)
    }

    /// Number of eigenvalues above [`RANK_TOL`].
    pub fn rank(&self) -> usize {
        self.eigen().0.iter().filter(|&&l| l > RANK_TOL).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub weight: f64,
    /// Normalized.
    pub state: PureState,
}

/// A pure-state ensemble `{(p_i, ψ_i)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub members: Vec<Member>,
}

impl Decomposition {
    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|m| m.weight).sum()
    }

    /// `Σ p_i |ψ_i><ψ_i|`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let dim = self.members.first().map_or(0, |m| m.state.dim());
        let mut out = DMatrix::from_element(dim, dim, ZERO);
        for m in &self.members {
            let v = DVector::from_column_slice(m.state.amplitudes());
            out += (&v * v.adjoint()) * Complex64::new(m.weight, 0.0);
        }
        out
    }

    /// Frobenius distance of the reconstruction from `rho`.
    pub fn reconstruction_error(&self, rho: &MixedState) -> f64 {
        (self.reconstruct() - rho.matrix()).norm()
    }

    /// `Σ p_i τ(ψ_i)` with τ the n-tangle average.
    pub fn average_tangle(&self) -> Result<f64> {
        self.members.iter().map(|m| Ok(m.weight * n_tangle(&m.state)?.average)).sum()
    }
}

/// Scaled eigenvectors `√λ_j e_j` for the `r` leading eigenvalues.
fn scaled_eigenvectors(rho: &MixedState) -> Vec<Vec<Complex64>> {
    let (values, vectors) = rho.eigen();
    values
        .iter()
        .zip(vectors)
        .filter(|(&l, _)| l > RANK_TOL)
        .map(|(&l, v)| v.iter().map(|z| z * l.sqrt()).collect())
        .collect()
}

fn members_from_rows(rows: &DMatrix<Complex64>, basis: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let dim = basis.first().map_or(0, Vec::len);
    (0..rows.nrows())
        .map(|i| {
            let mut phi = vec![ZERO; dim];
            for (j, w) in basis.iter().enumerate() {
                let coeff = rows[(i, j)];
                for (out, x) in phi.iter_mut().zip(w) {
                    *out += coeff * x;
                }
            }
            phi
        })
        .collect()
}

fn decomposition_from_members(n: usize, members: &[Vec<Complex64>]) -> Result<Decomposition> {
    let mut out = Vec::new();
    for phi in members {
        let weight: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        if weight < MIN_WEIGHT {
            continue;
        }
        let state = PureState::new(n, phi.clone())?.normalized();
        out.push(Member { weight, state });
    }
    Ok(Decomposition { members: out })
}

/// Decomposition of `rho` selected by the `m x r` isometry `v`.
pub fn decomposition_from_isometry(rho: &MixedState, v: &DMatrix<Complex64>) -> Result<Decomposition> {
    let basis = scaled_eigenvectors(rho);
    let r = basis.len();
    if v.ncols() != r || v.nrows() < r {
        return Err(TangleError::InvalidArgument(format!(
            "isometry must be m x {r} with m >= {r}, got {}x{}",
            v.nrows(),
            v.ncols()
        )));
    }
    let gram = v.adjoint() * v;
    let deviation = (gram - DMatrix::<Complex64>::identity(r, r)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if deviation > ISOMETRY_TOL {
        return Err(TangleError::NotIsometric(deviation));
    }
    decomposition_from_members(rho.n, &members_from_rows(v, &basis))
}

/// Random `m x m` unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(m, m, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column phases so the distribution does not depend on QR sign conventions
    let phases = DMatrix::from_fn(m, m, |i, j| {
        if i == j && r[(i, i)].norm() > 0.0 {
            r[(i, i)] / r[(i, i)].norm()
        } else if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    q * phases
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofOptions {
    /// Number of decomposition members; defaults to `rank + 2`.
    pub m_max: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// A sweep improving the objective by less than this counts as stalled.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Accept `n > 3`.
    pub allow_large_n: bool,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self { m_max: None, restarts: DEFAULT_RESTARTS, seed: 0, tol: 1e-12, max_sweeps: 4000, allow_large_n: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofResult {
    /// Upper bound on the convex-roof tangle.
    pub value: f64,
    pub best: Decomposition,
    pub restarts_used: usize,
    /// The final sweep of the winning restart improved by less than `tol`.
    pub converged: bool,
    /// Objective at the start point of each restart; restart 0 starts from
    /// the eigendecomposition.
    pub start_values: Vec<f64>,
}

/// Smallest rotation angle tried before a restart stops.
const MIN_STEP: f64 = 1e-10;
const INITIAL_STEP: f64 = 0.5;

struct Search {
    evaluator: AverageEvaluator,
    /// Rows of the current isometry.
    v: DMatrix<Complex64>,
    /// Current unnormalized members `φ_i`.
    phi: Vec<Vec<Complex64>>,
    contrib: Vec<f64>,
}

impl Search {
    fn new(n: usize, v: DMatrix<Complex64>, basis: &[Vec<Complex64>]) -> Result<Self> {
        let mut evaluator = AverageEvaluator::new(n)?;
        let phi = members_from_rows(&v, basis);
        let contrib = phi.iter().map(|p| member_cost(&mut evaluator, p)).collect();
        Ok(Self { evaluator, v, phi, contrib })
    }

    fn objective(&self) -> f64 {
        self.contrib.iter().sum()
    }

    /// Tries rotating rows `a`, `b` by `theta` with phase `phase`; keeps it if
    /// the objective drops.
    fn try_rotation(&mut self, a: usize, b: usize, theta: f64, phase: f64) -> bool {
        let (c, s) = (theta.cos(), theta.sin());
        let e = Complex64::from_polar(1.0, phase);
        let rot = |x: Complex64, y: Complex64| (x * c - e * s * y, e.conj() * s * x + y * c);
        let (new_a, new_b): (Vec<_>, Vec<_>) = self.phi[a].iter().zip(&self.phi[b]).map(|(&x, &y)| rot(x, y)).unzip();
        let ca = member_cost(&mut self.evaluator, &new_a);
        let cb = member_cost(&mut self.evaluator, &new_b);
        if ca + cb < self.contrib[a] + self.contrib[b] {
            for j in 0..self.v.ncols() {
                let (x, y) = rot(self.v[(a, j)], self.v[(b, j)]);
                self.v[(a, j)] = x;
                self.v[(b, j)] = y;
            }
            self.phi[a] = new_a;
            self.phi[b] = new_b;
            self.contrib[a] = ca;
            self.contrib[b] = cb;
            true
        } else {
            false
        }
    }

    /// Pattern search; returns whether the last sweep stalled below `tol`.
    fn run(&mut self, rng: &mut ChaCha8Rng, opts: &RoofOptions) -> bool {
        let m = self.phi.len();
        let mut step = INITIAL_STEP;
        let mut last_decrease = f64::INFINITY;
        for _ in 0..opts.max_sweeps {
            let before = self.objective();
            for a in 0..m {
                for b in a + 1..m {
                    let phases = [0.0, std::f64::consts::FRAC_PI_2, rng.random_range(0.0..std::f64::consts::TAU)];
                    for phase in phases {
                        if !self.try_rotation(a, b, step, phase) {
                            self.try_rotation(a, b, -step, phase);
                        }
                    }
                }
            }
            // recompute to avoid drift from incremental updates
            last_decrease = before - self.objective();
            if last_decrease < opts.tol {
                if step <= MIN_STEP {
                    break;
                }
                step *= 0.5;
            }
        }
        last_decrease < opts.tol
    }
}

fn member_cost(evaluator: &mut AverageEvaluator, phi: &[Complex64]) -> f64 {
    let weight: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    if weight < MIN_WEIGHT {
        // bounded by weight · 1, and dropped from the reported decomposition
        return 0.0;
    }
    evaluator.average(phi) / weight
}

/// Multi-restart upper bound on `min Σ p_i τ(ψ_i)` over decompositions of `rho`.
pub fn convex_roof_tangle(rho: &MixedState, opts: &RoofOptions) -> Result<RoofResult> {
    let n = rho.n();
    if n < 3 || n.is_multiple_of(2) {
        return Err(TangleError::RequiresOddQubits(n));
    }
    if n > DEFAULT_ROOF_QUBITS && !opts.allow_large_n {
        return Err(TangleError::InvalidArgument(format!("convex roof on {n} qubits needs allow_large_n")));
    }
    let basis = scaled_eigenvectors(rho);
    let r = basis.len();
    let m = opts.m_max.unwrap_or(r + 2);
    if m < r {
        return Err(TangleError::InvalidArgument(format!("m_max {m} is below the rank {r}")));
    }
    let mut rng = seeded_rng(opts.seed);
    let restarts = opts.restarts.max(1);

    let mut best: Option<(f64, DMatrix<Complex64>, bool)> = None;
    let mut start_values = Vec::with_capacity(restarts);
    for restart in 0..restarts {
        let v = if restart == 0 {
            DMatrix::from_fn(m, r, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { ZERO })
        } else {
            random_unitary(m, &mut rng).columns(0, r).into_owned()
        };
        let mut search = Search::new(n, v, &basis)?;
        start_values.push(search.objective());
        let converged = search.run(&mut rng, opts);
        let value = search.objective();
        // strict comparison keeps the lowest restart index on ties
        if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
            best = Some((value, search.v.clone(), converged));
        }
    }
    let (_, v, converged) = best.expect("at least one restart");
    let decomposition = decomposition_from_members(n, &members_from_rows(&v, &basis))?;
    let value = decomposition.average_tangle()?;
    Ok(RoofResult { value, best: decomposition, restarts_used: restarts, converged, start_values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stategen::{basis_product, ghz, random_pure, w};

    fn half_half_product() -> MixedState {
        MixedState::from_ensemble(&[
            (0.5, basis_product(&[0, 0, 0]).unwrap()),
            (0.5, basis_product(&[1, 1, 1]).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn validation() {
        let mut m = DMatrix::from_element(2, 2, ZERO);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(MixedState::new(1, m.clone()).is_ok());
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(MixedState::new(1, m.clone()).is_err());
        m[(1, 0)] = Complex64::new(0.1, 0.0);
        // Hermitian, trace 1, but eigenvalue below zero
        assert!(MixedState::new(1, m).is_err());
        let twice = DMatrix::<Complex64>::identity(2, 2);
        assert!(MixedState::new(1, twice).is_err());
    }

    #[test]
    fn identity_isometry_is_eigendecomposition() {
        let rho = half_half_product();
        assert_eq!(rho.rank(), 2);
        let d = decomposition_from_isometry(&rho, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(d.members.len(), 2);
        assert!(d.members.iter().all(|m| (m.weight - 0.5).abs() < 1e-12));
        assert!(d.reconstruction_error(&rho) < 1e-12);
    }

    #[test]
    fn pure_rho_members_equal_state() {
        let s = random_pure(3, 5);
        let rho = MixedState::from_pure(&s);
        let mut rng = seeded_rng(1);
        let v = random_unitary(3, &mut rng).columns(0, 1).into_owned();
        let d = decomposition_from_isometry(&rho, &v).unwrap();
        for m in &d.members {
            assert!((m.state.inner(&s).unwrap().norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn random_isometry_reconstructs() {
        let rho = half_half_product();
        let mut rng = seeded_rng(2);
        for m in 2..6 {
            let v = random_unitary(m, &mut rng).columns(0, 2).into_owned();
            let d = decomposition_from_isometry(&rho, &v).unwrap();
            assert!(d.reconstruction_error(&rho) <= 1e-10);
            assert!((d.total_weight() - 1.0).abs() < 1e-10);
        }
        let bad = DMatrix::from_element(3, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(decomposition_from_isometry(&rho, &bad), Err(TangleError::NotIsometric(_))));
    }

    #[test]
    fn pure_ghz_roof() {
        let rho = MixedState::from_pure(&ghz(3).unwrap());
        let r = convex_roof_tangle(&rho, &RoofOptions { restarts: 4, ..Default::default() }).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn product_mixture_is_zero() {
        let r = convex_roof_tangle(&half_half_product(), &RoofOptions { restarts: 4, ..Default::default() }).unwrap();
        assert!(r.value <= 1e-8);
    }

    #[test]
    fn ghz_w_mixture_is_bounded_and_reproducible() {
        let rho = MixedState::from_ensemble(&[(0.5, ghz(3).unwrap()), (0.5, w(3).unwrap())]).unwrap();
        let values: Vec<f64> = (0..3)
            .map(|seed| {
                let opts = RoofOptions { seed, restarts: 8, ..Default::default() };
                convex_roof_tangle(&rho, &opts).unwrap().value
            })
            .collect();
        for v in &values {
            assert!(*v <= 0.5);
            assert!((v - values[0]).abs() <= 1e-4, "{values:?}");
        }
    }

    #[test]
    fn rejects_even_and_large() {
        let rho = MixedState::from_pure(&random_pure(4, 0));
        assert!(convex_roof_tangle(&rho, &RoofOptions::default()).is_err());
        let rho5 = MixedState::from_pure(&random_pure(5, 0));
        assert!(convex_roof_tangle(&rho5, &RoofOptions::default()).is_err());
        let allowed = RoofOptions { allow_large_n: true, restarts: 1, ..Default::default() };
        let r = convex_roof_tangle(&rho5, &allowed).unwrap();
        assert!((r.value - n_tangle(&random_pure(5, 0)).unwrap().average).abs() < 1e-6);
    }
}
