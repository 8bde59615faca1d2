//! Error type shared by every module.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// log_gamma / digamma evaluated at a non-positive integer.
    #[error("gamma pole at s = {0}: non-positive integers are outside the domain")]
    GammaPole(Complex64),

    /// zeta-like function evaluated at its pole s = 1 (or too close to it).
    #[error("pole at s = {0}: simple pole of the zeta factor at s = 1")]
    ZetaPole(Complex64),

    /// An input is outside an operation's stated domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A result or intermediate stopped being finite.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Escalation ladder exhausted without meeting the accuracy target.
    #[error("precision exhausted in {what}: achieved {achieved:e}, target {target:e}")]
    PrecisionExhausted {
        what: &'static str,
        achieved: f64,
        target: f64,
    },

    /// Requested working precision is not representable in f64.
    #[error("unsupported working precision: {bits} bits (supported: native double, 50..=53)")]
    UnsupportedPrecision { bits: u32 },

    /// Bernoulli table request beyond the supported range.
    #[error("bernoulli index out of range: 2*{k_max} requested, supported up to B_120")]
    BernoulliRange { k_max: usize },

    /// The two independent derivative methods disagree.
    #[error(
        "derivative methods disagree at order {order}: contour {contour}, \
         finite-difference {finite_difference}, allowance {allowance:e}"
    )]
    DerivativeDisagreement {
        order: u32,
        contour: Complex64,
        finite_difference: Complex64,
        allowance: f64,
    },

    /// Adaptive quadrature ran out of budget before reaching its tolerance.
    #[error("quadrature did not converge: error bound {error_bound:e} > target {target:e} after {evaluations} evaluations")]
    QuadratureNoConvergence {
        error_bound: f64,
        target: f64,
        evaluations: usize,
    },

    /// A discriminant that is not fundamental.
    #[error("discriminant {d} is not fundamental; {hint}")]
    NonFundamental { d: i64, hint: String },

    /// Field spec string that does not match the grammar.
    #[error("cannot parse field spec {spec:?}: expected \"Q\" or \"D=<integer>\"")]
    BadFieldSpec { spec: String },

    /// Central multiplicity cannot be certified from f64 data.
    #[error("cannot certify central multiplicity: {0}")]
    CannotCertifyMultiplicity(String),

    /// A value that must be real picked up a non-negligible imaginary part.
    #[error("reality violation in {what} at t = {t}: |Im| = {im:e} exceeds {allowance:e}")]
    RealityViolation {
        what: &'static str,
        t: f64,
        im: f64,
        allowance: f64,
    },

    /// Zero count at T is unstable under small shifts (zero too close to T).
    #[error("zero count unstable near T = {t}: move T away from an ordinate")]
    CountInstability { t: f64 },

    /// Sum over zeros requested from a ledger that is not certified complete.
    #[error("ledger not certified complete (status {status}); zero sums are inapplicable")]
    UncertifiedLedger { status: String },

    /// Ledger file violates the serialization format.
    #[error("ledger parse error at line {line}: {detail}")]
    LedgerFormat { line: usize, detail: String },

    /// Report document violates the serialization format.
    #[error("report parse error: {0}")]
    ReportParse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable coarse category used by the CLI for exit codes.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::GammaPole(_)
                | Error::ZetaPole(_)
                | Error::Domain(_)
                | Error::NonFundamental { .. }
                | Error::UnsupportedPrecision { .. }
                | Error::BernoulliRange { .. }
        )
    }
}
