//! The n-tangle of odd-n-qubit pure states.
//!
//! Two independent evaluators are provided: [`naive`] contracts the
//! ε-tensor sums term by term, and [`fast`] uses the reduced `T`, `P`, `Q`
//! sums in `O(2^n)`. [`residual`] evaluates the residual-entanglement form
//! of the same polynomial, [`slocc`] checks its transformation law under
//! invertible local operators, and [`roof`] extends the measure to mixed
//! states by numerical convex-roof minimization.
//!
//! Amplitude index convention: qubit 1 is the most significant bit.

pub mod cost;
pub mod error;
pub mod fast;
pub mod io;
pub mod naive;
pub mod qstate;
pub mod residual;
pub mod roof;
pub mod slocc;
pub mod stategen;
pub mod three;

pub use error::{Result, TangleError};
pub use fast::{compute_tpq, n_tangle, tangle_1_fast, tangle_i_fast, TangleReport, Tpq};
pub use naive::{tangle_i_naive, OracleOptions, SumMode};
pub use qstate::{
    apply_local_operators, permute_qubits, Amplitude, LocalOperatorChain, Mat2, PureState, QubitPermutation,
};
pub use residual::{residual_tau, ResidualParts};
pub use roof::{convex_roof_tangle, Decomposition, MixedState, RoofOptions, RoofResult};
pub use slocc::{SloccClassVerdict, SloccVerdict};
pub use stategen::{basis_product, ghz, random_pure, w};
