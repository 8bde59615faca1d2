//! Both sides of each verified identity, assembled into discrepancy reports.
//!
//! Zero sums run over a certified ledger only; the smooth remainder of each
//! sum beyond the scan height is the density integral of the phase
//! derivative, and the oscillatory part it ignores is covered by the
//! fluctuation term folded into every pass tolerance.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

use crate::completion::{completion_profile, detect_multiplicity, phase_deriv, script_x};
use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, QuadraticCharacter};
use crate::lfun::{l_log_derivative_at_one, riemann_zeta};
use crate::numerics::{
    adaptive_quadrature, taylor_coefficients, KahanSum, PrecisionPolicy,
    DEFAULT_DERIVATIVE_RADIUS, EULER_GAMMA,
};
use crate::zeros::{certify, round_sig15, scan_zeros, LedgerStatus, ZeroLedger};

use std::f64::consts::{LN_2, PI};

/// Absolute floor under every pass tolerance; prevents vacuous failures in
/// the fluctuation-dominated small-T regime.
pub const DEFAULT_TOL_FLOOR: f64 = 1e-4;
/// Default pass tolerance of the integral criterion.
pub const DEFAULT_RH_TOL: f64 = 1e-3;
/// Below this height the density tail model is not trustworthy; the tail
/// is reported as zero and the discrepancy shows the truncation honestly.
const TAIL_MIN_HEIGHT: f64 = 50.0;
/// Integration limits accepted by the integral criterion.
const RH_MIN_T: f64 = 50.0;
const RH_MAX_T: f64 = 2000.0;
/// Head cut of the integral criterion, handled by the central Taylor term.
const RH_HEAD: f64 = 1e-3;
const RH_QUAD_TOL: f64 = 6e-4;
const RH_QUAD_BUDGET: usize = 3_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityKind {
    Theorem1,
    EulerKronecker,
    RhIntegral,
    HadamardLogdd,
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentityKind::Theorem1 => "theorem1",
            IdentityKind::EulerKronecker => "euler-kronecker",
            IdentityKind::RhIntegral => "rh-integral",
            IdentityKind::HadamardLogdd => "hadamard-logdd",
        })
    }
}

impl FromStr for IdentityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem1" => Ok(IdentityKind::Theorem1),
            "euler-kronecker" => Ok(IdentityKind::EulerKronecker),
            "rh-integral" => Ok(IdentityKind::RhIntegral),
            "hadamard-logdd" => Ok(IdentityKind::HadamardLogdd),
            other => Err(Error::ReportParse(format!("unknown identity {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportStatus {
    Pass,
    Fail,
    Inapplicable,
}

impl fmt::Display for ReportStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportStatus::Pass => "pass",
            ReportStatus::Fail => "fail",
            ReportStatus::Inapplicable => "inapplicable",
        })
    }
}

impl FromStr for ReportStatus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(ReportStatus::Pass),
            "fail" => Ok(ReportStatus::Fail),
            "inapplicable" => Ok(ReportStatus::Inapplicable),
            other => Err(Error::ReportParse(format!("unknown status {other:?}"))),
        }
    }
}

/// Per-conjugate-pair weight of a zero sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    /// 2/gamma^2: both members of the pair rho = 1/2 +- i gamma weighted
    /// by 1/|1/2 - rho|^2.
    InverseSquareCentered,
    /// 1/(1/4 + gamma^2) = 1/(rho (1-rho)): real already, one term per
    /// pair; this is the normalization whose total equals xi'/xi(1).
    InverseSquareModulus,
}

fn pair_weight(weight: Weight, gamma: f64) -> f64 {
    match weight {
        Weight::InverseSquareCentered => 2.0 / (gamma * gamma),
        Weight::InverseSquareModulus => 1.0 / (0.25 + gamma * gamma),
    }
}

fn hadamard_weight(shift: f64, gamma: f64) -> f64 {
    let a2 = shift * shift;
    let g2 = gamma * gamma;
    let d = a2 + g2;
    2.0 * (g2 - a2) / (d * d)
}

fn compensated_sum(ordinates: &[f64], weight: impl Fn(f64) -> f64) -> f64 {
    let mut acc = KahanSum::new();
    for &g in ordinates {
        acc.add(weight(g));
    }
    acc.value()
}

/// Weighted sum over the conjugate-paired zeros of a certified ledger.
pub fn zero_sum(ledger: &ZeroLedger, weight: Weight) -> Result<f64> {
    if ledger.status() != LedgerStatus::CertifiedComplete {
        return Err(Error::UncertifiedLedger {
            status: ledger.status().to_string(),
        });
    }
    Ok(compensated_sum(ledger.ordinates(), |g| pair_weight(weight, g)))
}

/// Smooth remainder of a weighted zero sum beyond height T: the density
/// integral of theta_K'(t)/pi against the pair weight, via u = 1/t.
pub fn tail_estimate(field: &FieldDescriptor, t: f64, weight: Weight) -> Result<f64> {
    tail_with(field, t, move |g| pair_weight(weight, g))
}

fn tail_with(field: &FieldDescriptor, t: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
    if !t.is_finite() || t < TAIL_MIN_HEIGHT {
        return Err(Error::Domain(format!(
            "tail density model requires T >= {TAIL_MIN_HEIGHT}, got {t}"
        )));
    }
    let integrand = |u: f64| -> Result<f64> {
        let height = 1.0 / u;
        Ok(weight(height) * (height * height) * phase_deriv(field, height)? / PI)
    };
    let quad = adaptive_quadrature(integrand, 0.0, 1.0 / t, 1e-11, 200_000)?;
    Ok(quad.value)
}

fn tail_or_zero(field: &FieldDescriptor, t: f64, weight: Weight) -> Result<f64> {
    if t < TAIL_MIN_HEIGHT {
        Ok(0.0)
    } else {
        tail_estimate(field, t, weight)
    }
}

/// Size model of the oscillatory S_K(t) contribution the density tail
/// ignores: O((n/2) log T / T^2).
pub fn fluctuation_bound(field: &FieldDescriptor, t: f64) -> f64 {
    0.5 * field.degree() as f64 * t.ln() / (t * t)
}

fn pass_tolerance(field: &FieldDescriptor, t: f64, tol_floor: f64) -> f64 {
    (3.0 * fluctuation_bound(field, t)).max(tol_floor)
}

/// X''_K(1/2) / X_K(1/2); the profile machinery asserts the reality of the
/// central derivatives and the vanishing of the central slope.
pub fn central_ratio(field: &FieldDescriptor) -> Result<f64> {
    let profile = completion_profile(field)?;
    Ok(profile.central_second() / profile.central_value())
}

/// Value and first two derivatives of the deflated completion at a real
/// point, from one validated Taylor ring.
fn real_point_jet(field: &FieldDescriptor, s0: f64) -> Result<(f64, f64, f64)> {
    let policy = PrecisionPolicy::default();
    let multiplicity = detect_multiplicity(field)?;
    let f = |z| script_x(field, z, multiplicity);
    let center = Complex64::new(s0, 0.0);
    let coeffs = taylor_coefficients(&f, center, DEFAULT_DERIVATIVE_RADIUS, 2, &policy)?;
    let scale = coeffs[0].norm().max(1.0);
    for (k, a) in coeffs.iter().enumerate() {
        let allowance = 1e-10 * scale / DEFAULT_DERIVATIVE_RADIUS.powi(k as i32);
        if a.im.abs() > allowance {
            return Err(Error::RealityViolation {
                what: "derivative of the completed function at a real point",
                t: s0,
                im: a.im.abs(),
                allowance,
            });
        }
    }
    Ok((coeffs[0].re, coeffs[1].re, 2.0 * coeffs[2].re))
}

/// One identity check: both sides, their gap, and the verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    field: String,
    identity: IdentityKind,
    t: f64,
    partial_sum: f64,
    tail_estimate: f64,
    rhs_value: f64,
    discrepancy: f64,
    status: ReportStatus,
    tolerance: f64,
    ledger_status: String,
    timestamp: Option<String>,
}

impl VerificationReport {
    fn assemble(
        field: &FieldDescriptor,
        identity: IdentityKind,
        t: f64,
        partial_sum: f64,
        tail: f64,
        rhs_value: f64,
        tolerance: f64,
        ledger_status: Option<LedgerStatus>,
    ) -> Self {
        let partial_sum = round_sig15(partial_sum);
        let tail = round_sig15(tail);
        let rhs_value = round_sig15(rhs_value);
        let tolerance = round_sig15(tolerance);
        let discrepancy = round_sig15((partial_sum + tail - rhs_value).abs());
        let status = match ledger_status {
            Some(LedgerStatus::CertifiedComplete) | None => {
                if discrepancy <= tolerance {
                    ReportStatus::Pass
                } else {
                    ReportStatus::Fail
                }
            }
            Some(_) => ReportStatus::Inapplicable,
        };
        VerificationReport {
            field: field.spec(),
            identity,
            t: round_sig15(t),
            partial_sum,
            tail_estimate: tail,
            rhs_value,
            discrepancy,
            status,
            tolerance,
            ledger_status: ledger_status
                .map(|s| s.to_string())
                .unwrap_or_else(|| "none".into()),
            timestamp: None,
        }
    }

    pub fn field(&self) -> &str {
        &self.field
    }
    pub fn identity(&self) -> IdentityKind {
        self.identity
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn partial_sum(&self) -> f64 {
        self.partial_sum
    }
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }
    pub fn rhs_value(&self) -> f64 {
        self.rhs_value
    }
    pub fn discrepancy(&self) -> f64 {
        self.discrepancy
    }
    pub fn status(&self) -> ReportStatus {
        self.status
    }
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
    pub fn ledger_status(&self) -> &str {
        &self.ledger_status
    }
    pub fn timestamp(&self) -> Option<&str> {
        self.timestamp.as_deref()
    }

    pub fn with_timestamp(mut self, timestamp: String) -> Self {
        self.timestamp = Some(timestamp);
        self
    }

    /// Flat key-value JSON document, numerics at 15 significant digits.
    pub fn to_json(&self) -> String {
        let ts = match &self.timestamp {
            Some(t) => format!("\"{t}\""),
            None => "null".into(),
        };
        format!(
            concat!(
                "{{\"field\":\"{}\",\"identity\":\"{}\",\"t\":{:.14e},",
                "\"partial_sum\":{:.14e},\"tail_estimate\":{:.14e},",
                "\"rhs_value\":{:.14e},\"discrepancy\":{:.14e},",
                "\"status\":\"{}\",\"tolerance\":{:.14e},",
                "\"ledger_status\":\"{}\",\"timestamp\":{}}}"
            ),
            self.field,
            self.identity,
            self.t,
            self.partial_sum,
            self.tail_estimate,
            self.rhs_value,
            self.discrepancy,
            self.status,
            self.tolerance,
            self.ledger_status,
            ts,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::ReportParse(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::ReportParse("expected a JSON object".into()))?;
        let num = |key: &str| -> Result<f64> {
            obj.get(key)
                .and_then(|v| v.as_f64())
                .ok_or_else(|| Error::ReportParse(format!("missing numeric field {key:?}")))
        };
        let text_field = |key: &str| -> Result<String> {
            obj.get(key)
                .and_then(|v| v.as_str())
                .map(str::to_owned)
                .ok_or_else(|| Error::ReportParse(format!("missing string field {key:?}")))
        };
        let timestamp = match obj.get("timestamp") {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::String(s)) => Some(s.clone()),
            Some(other) => {
                return Err(Error::ReportParse(format!(
                    "timestamp must be a string or null, got {other}"
                )))
            }
        };
        Ok(VerificationReport {
            field: text_field("field")?,
            identity: text_field("identity")?.parse()?,
            t: num("t")?,
            partial_sum: num("partial_sum")?,
            tail_estimate: num("tail_estimate")?,
            rhs_value: num("rhs_value")?,
            discrepancy: num("discrepancy")?,
            status: text_field("status")?.parse()?,
            tolerance: num("tolerance")?,
            ledger_status: text_field("ledger_status")?,
            timestamp,
        })
    }

    pub fn csv_header() -> &'static str {
        "field,identity,t,partial_sum,tail_estimate,rhs_value,discrepancy,status,tolerance,ledger_status,timestamp"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{},{:.14e},{},{}",
            self.field,
            self.identity,
            self.t,
            self.partial_sum,
            self.tail_estimate,
            self.rhs_value,
            self.discrepancy,
            self.status,
            self.tolerance,
            self.ledger_status,
            self.timestamp.as_deref().unwrap_or(""),
        )
    }
}

fn validate_tol_floor(tol_floor: f64) -> Result<()> {
    if !(tol_floor.is_finite() && tol_floor > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance floor must be positive, got {tol_floor}"
        )));
    }
    Ok(())
}

/// Ordinates of the ledger at or below t, re-certified at that height; a
/// tampered or incomplete list surfaces as a non-certified status.
fn certified_subset(ledger: &ZeroLedger, t: f64) -> Result<(&[f64], LedgerStatus)> {
    if !(t.is_finite() && t > 0.0 && t <= ledger.height()) {
        return Err(Error::Domain(format!(
            "verification height {t} outside the ledger's range (0, {}]",
            ledger.height()
        )));
    }
    let cut = ledger.ordinates().partition_point(|&g| g <= t);
    let subset = &ledger.ordinates()[..cut];
    let status = match ledger.status() {
        LedgerStatus::CertifiedComplete => certify(ledger.field(), subset, t)?,
        other => other,
    };
    Ok((subset, status))
}

/// Sum over zeros of 1/|1/2 - rho|^2 against X''(1/2)/X(1/2).
pub fn verify_theorem1(field: &FieldDescriptor, t: f64, tol_floor: f64) -> Result<VerificationReport> {
    let ledger = scan_zeros(field, t)?;
    verify_theorem1_on(&ledger, t, tol_floor)
}

pub fn verify_theorem1_on(
    ledger: &ZeroLedger,
    t: f64,
    tol_floor: f64,
) -> Result<VerificationReport> {
    validate_tol_floor(tol_floor)?;
    let field = ledger.field();
    let (subset, status) = certified_subset(ledger, t)?;
    let partial = compensated_sum(subset, |g| pair_weight(Weight::InverseSquareCentered, g));
    let tail = tail_or_zero(field, t, Weight::InverseSquareCentered)?;
    let rhs = central_ratio(field)?;
    Ok(VerificationReport::assemble(
        field,
        IdentityKind::Theorem1,
        t,
        partial,
        tail,
        rhs,
        pass_tolerance(field, t, tol_floor),
        Some(status),
    ))
}

/// Closed form of the modulus-weighted zero sum: xi'/xi(1), written in the
/// invariants of the field.
pub fn euler_kronecker_rhs(field: &FieldDescriptor) -> Result<f64> {
    let n = field.degree() as f64;
    let r_total = (field.real_embeddings() + field.complex_pairs()) as f64;
    let gamma_k = if field.is_rational() {
        EULER_GAMMA
    } else {
        EULER_GAMMA + l_log_derivative_at_one(&QuadraticCharacter::new(field.discriminant())?)?
    };
    Ok(gamma_k + 0.5 * field.abs_discriminant().ln() - EULER_GAMMA * n / 2.0 - r_total * LN_2
        - 0.5 * n * PI.ln()
        + 1.0)
}

/// Sum over zeros of 1/(rho (1-rho)) against the Euler-Kronecker form.
pub fn verify_euler_kronecker(
    field: &FieldDescriptor,
    t: f64,
    tol_floor: f64,
) -> Result<VerificationReport> {
    let ledger = scan_zeros(field, t)?;
    verify_euler_kronecker_on(&ledger, t, tol_floor)
}

pub fn verify_euler_kronecker_on(
    ledger: &ZeroLedger,
    t: f64,
    tol_floor: f64,
) -> Result<VerificationReport> {
    validate_tol_floor(tol_floor)?;
    let field = ledger.field();
    let (subset, status) = certified_subset(ledger, t)?;
    let partial = compensated_sum(subset, |g| pair_weight(Weight::InverseSquareModulus, g));
    let tail = tail_or_zero(field, t, Weight::InverseSquareModulus)?;
    let rhs = euler_kronecker_rhs(field)?;
    Ok(VerificationReport::assemble(
        field,
        IdentityKind::EulerKronecker,
        t,
        partial,
        tail,
        rhs,
        pass_tolerance(field, t, tol_floor),
        Some(status),
    ))
}

/// (1/pi) Int_0^inf log|zeta(1/2+it)/zeta(1/2)| dt/t^2 against its closed
/// form pi/8 + gamma/4 + log(8 pi)/4 - 2. Defined for the rationals only.
pub fn verify_rh_integral(
    field: &FieldDescriptor,
    t_max: f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    validate_tol_floor(tolerance)?;
    let rhs = PI / 8.0 + EULER_GAMMA / 4.0 + (8.0 * PI).ln() / 4.0 - 2.0;
    if !field.is_rational() {
        let mut report = VerificationReport::assemble(
            field,
            IdentityKind::RhIntegral,
            t_max,
            0.0,
            0.0,
            0.0,
            tolerance,
            None,
        );
        report.status = ReportStatus::Inapplicable;
        return Ok(report);
    }
    if !(RH_MIN_T..=RH_MAX_T).contains(&t_max) {
        return Err(Error::Domain(format!(
            "integral cutoff {t_max} outside supported range [{RH_MIN_T}, {RH_MAX_T}]"
        )));
    }
    let policy = PrecisionPolicy::default();
    let half = Complex64::new(0.5, 0.0);
    let log_central = riemann_zeta(half)?.norm().ln();

    // Head [0, eps]: log|zeta/zeta(1/2)| = -(c0/2) t^2 + O(t^4) with
    // c0 = (log(-zeta))''(1/2), so the integrand opens at -c0/2.
    let neg_log_zeta = |z: Complex64| Ok((-riemann_zeta(z)?).ln());
    let curvature =
        taylor_coefficients(&neg_log_zeta, half, DEFAULT_DERIVATIVE_RADIUS, 2, &policy)?;
    let c0 = 2.0 * curvature[2].re;
    let head = -c0 * RH_HEAD / 2.0;

    // Main body: log singularities at each zero are integrable; the clamp
    // keeps a node that lands super-close to one finite.
    let integrand = |t: f64| -> Result<f64> {
        let z = riemann_zeta(Complex64::new(0.5, t))?;
        Ok((z.norm().max(1e-300).ln() - log_central) / (t * t))
    };
    let quad = adaptive_quadrature(integrand, RH_HEAD, t_max, RH_QUAD_TOL, RH_QUAD_BUDGET)?;
    let partial = (head + quad.value) / PI;

    // Beyond t_max the oscillatory log|zeta| integrates to nearly zero;
    // the constant subtraction is the whole smooth tail.
    let tail = -log_central / (PI * t_max);

    Ok(VerificationReport::assemble(
        field,
        IdentityKind::RhIntegral,
        t_max,
        partial,
        tail,
        rhs,
        tolerance,
        None,
    ))
}

fn validate_hadamard_point(s0: f64) -> Result<()> {
    if !s0.is_finite() || s0.abs() > 10.0 {
        return Err(Error::Domain(format!(
            "expansion point {s0} outside supported range |s0| <= 10"
        )));
    }
    // The log-assembly of xi is singular at 0 and 1; the derivative ring
    // of radius 0.25 must clear both.
    if s0.abs() < 0.35 || (s0 - 1.0).abs() < 0.35 {
        return Err(Error::Domain(format!(
            "expansion point {s0} too close to the assembly singularities at 0 and 1"
        )));
    }
    Ok(())
}

/// (X'' X - X'^2)/X^2 at a real point s0 against the conjugate-paired sum
/// of 1/(s0-rho)^2 over the ledger (which it equals with sign flipped).
pub fn verify_hadamard_logdd(
    field: &FieldDescriptor,
    s0: f64,
    t: f64,
    tol_floor: f64,
) -> Result<VerificationReport> {
    let ledger = scan_zeros(field, t)?;
    verify_hadamard_logdd_on(&ledger, s0, t, tol_floor)
}

pub fn verify_hadamard_logdd_on(
    ledger: &ZeroLedger,
    s0: f64,
    t: f64,
    tol_floor: f64,
) -> Result<VerificationReport> {
    validate_tol_floor(tol_floor)?;
    validate_hadamard_point(s0)?;
    let field = ledger.field();
    let (subset, status) = certified_subset(ledger, t)?;
    let shift = s0 - 0.5;
    let partial = compensated_sum(subset, |g| hadamard_weight(shift, g));
    let tail = if t < TAIL_MIN_HEIGHT {
        0.0
    } else {
        tail_with(field, t, |g| hadamard_weight(shift, g))?
    };

    let (value, d1, d2) = real_point_jet(field, s0)?;
    let log_dd = (d2 * value - d1 * d1) / (value * value);

    Ok(VerificationReport::assemble(
        field,
        IdentityKind::HadamardLogdd,
        t,
        partial,
        tail,
        log_dd,
        pass_tolerance(field, t, tol_floor),
        Some(status),
    ))
}
