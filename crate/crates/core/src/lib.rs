//! Matrix-product-state emulator for variational quantum chemistry.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. With `std` enabled, Pauli-term evaluation fans out over a rayon
//! thread pool; results are identical to the serial path.
//!
//! Module map:
//!
//! - [`pauli`]: Pauli strings, qubit and fermion operators, Jordan-Wigner.
//! - [`linalg`]: dense complex matrices, GEMM, one-sided Jacobi SVD and the
//!   reference/cross-product backends, truncated SVD.
//! - [`mps`]: right-canonical MPS, gate application, Pauli expectations.
//! - [`ansatz`]: UCCSD and windowed-GSD pool compilation to gate circuits.
//! - [`vqe`]: energy objective, trust-region optimizer, one-shot evaluation.
//! - [`dmet`]: reduced density matrices and fragment energy assembly.

#![cfg_attr(not(feature = "std"), no_std)]
// `num_traits::Float` supplies libm-backed methods without std; with std the
// inherent methods shadow it.
#![cfg_attr(feature = "std", allow(unused_imports))]

extern crate alloc;

pub mod ansatz;
pub mod dmet;
mod error;
#[cfg(test)]
mod oracle;
pub mod linalg;
pub mod mps;
pub mod pauli;
pub mod vqe;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Coefficients with modulus below this are dropped when simplifying operators.
pub const DROP_TOLERANCE: f64 = 1e-12;
