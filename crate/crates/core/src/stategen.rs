//! Canonical and random test states.
//!
//! Random states use ChaCha8 seeded from a `u64` and draw each amplitude as
//! `(re, im)` from two standard normals, in index order, before normalizing.
//! ChaCha8 is specified independently of platform and word size, so a seed
//! yields the same state everywhere.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, TangleError};
use crate::qstate::{index_of_bits, PureState};

/// Seed used by the command line tools and checks when none is given.
pub const DEFAULT_SEED: u64 = 0;

/// Seeded generator used for every random draw in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

fn require_at_least_two(n: usize) -> Result<()> {
    if n < 2 {
        return Err(TangleError::TooFewQubits { min: 2, got: n });
    }
    Ok(())
}

/// `(|0...0> + |1...1>) / sqrt(2)`.
pub fn ghz(n: usize) -> Result<PureState> {
    require_at_least_two(n)?;
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] = Complex64::new(r, 0.0);
    amps[dim - 1] = Complex64::new(r, 0.0);
    PureState::new(n, amps)
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w(n: usize) -> Result<PureState> {
    require_at_least_two(n)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
    let r = 1.0 / (n as f64).sqrt();
    for k in 0..n {
        amps[1usize << k] = Complex64::new(r, 0.0);
    }
    PureState::new(n, amps)
}

/// Normalized state with i.i.d. complex Gaussian amplitudes.
pub fn random_pure(n: usize, seed: u64) -> PureState {
    let mut rng = seeded_rng(seed);
    random_pure_from(n, &mut rng)
}

pub(crate) fn random_pure_from(n: usize, rng: &mut ChaCha8Rng) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..1usize << n).map(|_| gaussian_complex(rng)).collect();
        if let Ok(s) = PureState::new(n, amps) {
            return s.normalized();
        }
    }
}

/// Computational basis state `|b1 b2 ... bn>`.
pub fn basis_product(bits: &[u8]) -> Result<PureState> {
    let n = bits.len();
    let index = index_of_bits(bits, n)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
    amps[index] = Complex64::new(1.0, 0.0);
    PureState::new(n, amps)
}

/// Parses a bit string such as `"01101"`.
pub fn parse_bitstring(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .enumerate()
        .map(|(position, ch)| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(TangleError::Parse(format!("character {ch:?} at position {position} is not a bit"))),
        })
        .collect()
}
