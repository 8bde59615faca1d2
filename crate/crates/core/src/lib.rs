//! Numerical verification of zero-sum identities for Dedekind zeta functions.
//!
//! The library builds the completed function xi_K for K = Q or a quadratic
//! field, locates its critical-line zeros up to a height T, certifies the
//! list complete against the argument-principle count, and compares weighted
//! sums over the zeros with closed-form central quantities (second central
//! derivative ratio, Euler-Kronecker constant, a log|zeta| integral, and the
//! Hadamard second log-derivative at off-line points).
//!
//! Everything runs in f64; each operation states its accuracy target and
//! escalation strategy instead of pretending to arbitrary precision.

pub mod error;
pub mod numerics;
pub mod fields;
pub mod lfun;
pub mod completion;
pub mod zeros;
pub mod identity;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type ComplexValue = num_complex::Complex64;
