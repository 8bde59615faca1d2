//! Shared numerical kernels: precision policy, compensated summation,
//! Bernoulli numbers, log-gamma, derivatives, and adaptive quadrature.

mod bernoulli;
mod derivative;
mod gamma;
mod kahan;
mod precision;
mod quadrature;

pub use bernoulli::{bernoulli_f64, bernoulli_numbers, MAX_BERNOULLI_PAIRS};
pub use derivative::{derivative_at, taylor_coefficients, DEFAULT_DERIVATIVE_RADIUS};
pub use gamma::{digamma, log_gamma};
pub use kahan::{KahanComplex, KahanSum};
pub use precision::{PrecisionPolicy, WorkingPrecision};
pub use quadrature::{adaptive_quadrature, integrate_decaying, Quadrature};

/// Euler-Mascheroni constant, correct to the digits shown (beyond f64).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;
