//! Residual entanglement of odd n qubits and its reduced sums.
//!
//! The defining sums run over `i < 2^(n-3)` with two-term brackets:
//!
//! ```text
//! Ī   = Σ (-1)^N(i) [ (a_(2i) a_(2^n-1-2i) - a_(2i+1) a_(2^n-2-2i))
//!                     - (a_(2^(n-1)-2-2i) a_(2^(n-1)+1+2i) - a_(2^(n-1)-1-2i) a_(2^(n-1)+2i)) ]
//! I*  = Σ (-1)^N(i) (a_(2i) a_(2^(n-1)-1-2i) - a_(2i+1) a_(2^(n-1)-2-2i))
//! I*₊ = Σ (-1)^N(i) (a_(2^(n-1)+2i) a_(2^n-1-2i) - a_(2^(n-1)+1+2i) a_(2^n-2-2i))
//! τ(ψ) = 4 |Ī² - 4 I* I*₊|
//! ```
//!
//! The reduced forms fold each bracket's second term into a single sum over
//! `i < 2^(n-2)`, and Ī collapses to the `T` sum over `i < 2^(n-1)`.

use num_complex::Complex64;

use crate::error::Result;
use crate::qstate::{permute_qubits, PureState, QubitPermutation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualParts {
    pub i_bar: Complex64,
    pub i_star: Complex64,
    pub i_star_shift: Complex64,
}

impl ResidualParts {
    /// `4 |Ī² - 4 I* I*₊|`.
    pub fn tau(&self) -> f64 {
        4.0 * (self.i_bar * self.i_bar - self.i_star * self.i_star_shift * 4.0).norm()
    }

    /// Largest componentwise distance to `other`.
    pub fn max_diff(&self, other: &ResidualParts) -> f64 {
        (self.i_bar - other.i_bar)
            .norm()
            .max((self.i_star - other.i_star).norm())
            .max((self.i_star_shift - other.i_star_shift).norm())
    }
}

#[inline]
fn sign(i: usize) -> f64 {
    if i.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn residual_parts_defining(s: &PureState) -> Result<ResidualParts> {
    s.require_odd()?;
    let a = s.amplitudes();
    let full = 1usize << s.n();
    let half = full >> 1;
    let eighth = full >> 3;
    let zero = Complex64::new(0.0, 0.0);
    let (mut i_bar, mut i_star, mut i_star_shift) = (zero, zero, zero);
    for i in 0..eighth {
        let sg = sign(i);
        let outer = a[2 * i] * a[full - 1 - 2 * i] - a[2 * i + 1] * a[full - 2 - 2 * i];
        let inner = a[half - 2 - 2 * i] * a[half + 1 + 2 * i] - a[half - 1 - 2 * i] * a[half + 2 * i];
        i_bar += (outer - inner) * sg;
        i_star += (a[2 * i] * a[half - 1 - 2 * i] - a[2 * i + 1] * a[half - 2 - 2 * i]) * sg;
        i_star_shift += (a[half + 2 * i] * a[full - 1 - 2 * i] - a[half + 1 + 2 * i] * a[full - 2 - 2 * i]) * sg;
    }
    Ok(ResidualParts { i_bar, i_star, i_star_shift })
}

pub fn residual_parts_reduced(s: &PureState) -> Result<ResidualParts> {
    s.require_odd()?;
    let a = s.amplitudes();
    let full = 1usize << s.n();
    let half = full >> 1;
    let quarter = full >> 2;
    let zero = Complex64::new(0.0, 0.0);

    let mut i_bar = zero;
    for i in 0..half {
        i_bar += a[i] * a[full - 1 - i] * sign(i);
    }
    let (mut i_star, mut i_star_shift) = (zero, zero);
    for i in 0..quarter {
        i_star += a[2 * i] * a[half - 1 - 2 * i] * sign(i);
        i_star_shift += a[half + 2 * i] * a[full - 1 - 2 * i] * sign(i);
    }
    Ok(ResidualParts { i_bar, i_star, i_star_shift })
}

/// τ(ψ) from the defining sums.
pub fn residual_tau(s: &PureState) -> Result<f64> {
    Ok(residual_parts_defining(s)?.tau())
}

/// τ⁽ⁱ⁾(ψ): τ of the state with qubits 1 and i exchanged.
pub fn residual_tau_i(s: &PureState, i: usize) -> Result<f64> {
    s.require_odd()?;
    s.require_qubit(i)?;
    residual_tau(&permute_qubits(s, &QubitPermutation::transposition(s.n(), 1, i)?)?)
}

/// Mean of τ⁽ⁱ⁾(ψ) over all qubits.
pub fn residual_average(s: &PureState) -> Result<f64> {
    let n = s.n();
    let mut total = 0.0;
    for i in 1..=n {
        total += residual_tau_i(s, i)?;
    }
    Ok(total / n as f64)
}
