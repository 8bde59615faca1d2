//! L-functions by Euler-Maclaurin: Hurwitz zeta (plain, pole-regularized,
//! and term-wise differentiated), Riemann zeta, Dirichlet L for quadratic
//! characters, and the Dedekind zeta of the supported fields.
//!
//! Accuracy model: the correction series truncation error is bounded by the
//! first omitted term; every public entry point escalates its plan (double
//! the cutoff, deepen the corrections) until the bound meets the target or
//! reports PrecisionExhausted.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, QuadraticCharacter};
use crate::numerics::{KahanComplex, MAX_BERNOULLI_PAIRS};

/// Shape of one Euler-Maclaurin evaluation: `cutoff` direct terms, then a
/// boundary block and `correction_terms` Bernoulli corrections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EulerMaclaurinPlan {
    pub cutoff: usize,
    pub correction_terms: usize,
}

const MAX_CORRECTION_TERMS: usize = 30;
/// Largest |Im s| the plan model is tuned for; the linear cutoff keeps the
/// correction series contracting all the way up, at linear cost in height.
pub const MAX_HEIGHT: f64 = 2100.0;
/// Most negative Re s accepted by the direct series (reflection territory
/// further left is out of scope).
pub const MIN_SIGMA: f64 = -60.0;

impl EulerMaclaurinPlan {
    /// Plan adequate for evaluation at `s`: cutoff grows linearly with the
    /// height so the correction series contracts by ~1/60 per term.
    pub fn for_point(s: Complex64) -> Self {
        let cutoff = (1.3 * s.im.abs()).ceil().max(20.0) as usize;
        EulerMaclaurinPlan {
            cutoff,
            correction_terms: 15,
        }
    }

    /// Escalated plan: double the cutoff, deepen the tail.
    pub fn doubled(&self) -> Self {
        EulerMaclaurinPlan {
            cutoff: self.cutoff * 2,
            correction_terms: (self.correction_terms + 5).min(25),
        }
    }

    /// Structural invariants: enough direct terms for the height, and a
    /// correction depth the Bernoulli table supports.
    pub fn validate(&self, s: Complex64) -> Result<()> {
        let min_cutoff = (s.im.abs() / 2.0).max(10.0);
        if (self.cutoff as f64) < min_cutoff {
            return Err(Error::Domain(format!(
                "plan cutoff {} below minimum {min_cutoff} for Im s = {}",
                self.cutoff, s.im
            )));
        }
        if self.correction_terms == 0 || self.correction_terms > MAX_CORRECTION_TERMS {
            return Err(Error::Domain(format!(
                "correction_terms must be in 1..={MAX_CORRECTION_TERMS}, got {}",
                self.correction_terms
            )));
        }
        Ok(())
    }
}

/// x^(-s) for real x > 0.
#[inline]
fn pow_neg(x: f64, s: Complex64) -> Complex64 {
    let l = x.ln();
    Complex64::from_polar((-s.re * l).exp(), -s.im * l)
}

/// B_{2j} / (2j)! for j = 1..=MAX_BERNOULLI_PAIRS-ish, shared.
fn correction_coeffs() -> &'static [f64] {
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| {
        let b = crate::numerics::bernoulli_f64(MAX_BERNOULLI_PAIRS.min(31))
            .expect("static table within range");
        let mut fact = 1.0f64; // (2j)! built incrementally
        let mut out = Vec::with_capacity(b.len());
        for (j, bj) in b.iter().enumerate() {
            let two_j = 2 * (j + 1);
            fact *= ((two_j - 1) * two_j) as f64;
            out.push(bj / fact);
        }
        out
    })
}

/// Output of one Euler-Maclaurin pass.
#[derive(Clone, Copy, Debug)]
pub(crate) struct EmOutput {
    pub value: Complex64,
    /// d/ds of value (populated when requested, else zero).
    pub derivative: Complex64,
    /// Bound on the truncation error: 4x the first omitted correction term.
    pub bound: f64,
}

/// Euler-Maclaurin for zeta(s, a) with 0 < a <= 1.
///
/// `regularized` replaces the boundary pole block (N+a)^{1-s}/(s-1) by the
/// finite part ((N+a)^{1-s} - 1)/(s-1), analytic at s = 1; summing a full
/// character period against it cancels the omitted 1/(s-1) exactly.
pub(crate) fn em_hurwitz(
    s: Complex64,
    a: f64,
    plan: EulerMaclaurinPlan,
    regularized: bool,
    with_derivative: bool,
) -> Result<EmOutput> {
    plan.validate(s)?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("hurwitz shift a must be in (0, 1], got {a}")));
    }
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::NonFinite("hurwitz argument".into()));
    }
    if s.re < MIN_SIGMA {
        return Err(Error::Domain(format!(
            "Re s >= {MIN_SIGMA} supported by the direct series, got {}",
            s.re
        )));
    }
    if s.im.abs() > MAX_HEIGHT {
        return Err(Error::Domain(format!(
            "|Im s| <= {MAX_HEIGHT} supported, got {}",
            s.im
        )));
    }
    if !regularized && (s - 1.0).norm() < 1e-12 {
        return Err(Error::ZetaPole(s));
    }

    let n = plan.cutoff;
    let na = n as f64 + a;
    let l = na.ln();

    // Direct block and its term-wise derivative.
    let mut main = KahanComplex::new();
    let mut dmain = KahanComplex::new();
    for k in 0..n {
        let x = k as f64 + a;
        let term = pow_neg(x, s);
        main.add(term);
        if with_derivative {
            dmain.add(-x.ln() * term);
        }
    }

    // Boundary blocks.
    let u = s - 1.0;
    let na_pow = pow_neg(na, s); // (N+a)^{-s}
    let (pole, dpole) = if regularized {
        regularized_pole(u, l)
    } else {
        let p = pow_neg(na, u) / u; // (N+a)^{1-s}/(s-1)
        let dp = -p * (l + u.finv());
        (p, dp)
    };
    let half = 0.5 * na_pow;
    let dhalf = -l * half;

    // Bernoulli corrections, built by ratio recurrence to dodge overflow:
    // t_j = c_j * (s)_{2j-1} * (N+a)^{-s-2j+1}.
    let c = correction_coeffs();
    let m = plan.correction_terms;
    let mut corr = KahanComplex::new();
    let mut dcorr = KahanComplex::new();
    let mut poch = s; // (s)_1
    let mut dpoch = Complex64::new(1.0, 0.0);
    let mut w = pow_neg(na, s + 1.0); // (N+a)^{-s-1}
    let inv_na2 = 1.0 / (na * na);
    let mut first_omitted = 0.0f64;
    for j in 1..=m + 1 {
        let term = c[j - 1] * poch * w;
        if j <= m {
            corr.add(term);
            if with_derivative {
                dcorr.add(c[j - 1] * (dpoch * w - l * poch * w));
            }
        } else {
            first_omitted = term.norm();
        }
        // Advance to j+1: multiply pochhammer by (s+2j-1)(s+2j), power by (N+a)^-2.
        let f1 = s + (2 * j - 1) as f64;
        let f2 = s + (2 * j) as f64;
        dpoch = dpoch * (f1 * f2) + poch * (f1 + f2);
        poch *= f1 * f2;
        w *= inv_na2;
    }

    let value = main.value() + pole + half + corr.value();
    let derivative = if with_derivative {
        dmain.value() + dpole + dhalf + dcorr.value()
    } else {
        Complex64::default()
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite("hurwitz value".into()));
    }
    Ok(EmOutput {
        value,
        derivative,
        bound: 4.0 * first_omitted,
    })
}

/// Finite part ((N+a)^{1-s} - 1)/(s-1) and its s-derivative, as series in
/// u = s-1 (used only for |u| small, where the direct quotient cancels).
fn regularized_pole(u: Complex64, l: f64) -> (Complex64, Complex64) {
    // r(u)  = sum_{k>=1} (-l)^k u^{k-1} / k!
    // r'(u) = sum_{k>=2} (-l)^k (k-1) u^{k-2} / k!
    let mut value = KahanComplex::new();
    let mut deriv = KahanComplex::new();
    let mut pow_u = Complex64::new(1.0, 0.0); // u^{k-1}
    let mut coeff = 1.0f64; // (-l)^k / k!
    for k in 1..=60 {
        coeff *= -l / k as f64;
        let term = coeff * pow_u;
        value.add(term);
        pow_u *= u;
        if term.norm() < 1e-22 * (1.0 + value.value().norm()) {
            break;
        }
    }
    // Second pass for the derivative (cheap, <= 60 scalar ops).
    let mut pow_u = Complex64::new(1.0, 0.0); // u^{k-2}
    let mut coeff = -l; // (-l)^k / k! at k = 1
    for k in 2..=60 {
        coeff *= -l / k as f64;
        let term = coeff * (k - 1) as f64 * pow_u;
        deriv.add(term);
        pow_u *= u;
        if term.norm() < 1e-22 * (1.0 + deriv.value().norm()) {
            break;
        }
    }
    (value.value(), deriv.value())
}

/// Escalation ladder shared by the public wrappers.
fn em_auto(
    s: Complex64,
    a: f64,
    regularized: bool,
    with_derivative: bool,
    target_abs: f64,
) -> Result<EmOutput> {
    let mut plan = EulerMaclaurinPlan::for_point(s);
    let mut out = em_hurwitz(s, a, plan, regularized, with_derivative)?;
    for _ in 0..2 {
        if out.bound <= target_abs * (1.0 + out.value.norm()) {
            return Ok(out);
        }
        plan = plan.doubled();
        out = em_hurwitz(s, a, plan, regularized, with_derivative)?;
    }
    if out.bound <= target_abs * (1.0 + out.value.norm()) {
        return Ok(out);
    }
    Err(Error::PrecisionExhausted {
        what: "euler-maclaurin escalation",
        achieved: out.bound,
        target: target_abs,
    })
}

const ZETA_TARGET: f64 = 1e-13;

/// Hurwitz zeta(s, a), 0 < a <= 1, pole at s = 1 rejected.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    Ok(em_auto(s, a, false, false, ZETA_TARGET)?.value)
}

/// Riemann zeta via zeta(s, 1).
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    Ok(em_auto(s, 1.0, false, false, ZETA_TARGET)?.value)
}

/// Dirichlet L(s, chi) = q^{-s} sum_r chi(r) zeta(s, r/q).
///
/// Near s = 1 (|s-1| < 1e-3) each Hurwitz term switches to the regularized
/// finite part; orthogonality sums the omitted poles to zero exactly, so the
/// value is analytic there.
pub fn dirichlet_l(s: Complex64, chi: &QuadraticCharacter) -> Result<Complex64> {
    let q = chi.modulus();
    let regularized = (s - 1.0).norm() < 1e-3;
    let mut plan = EulerMaclaurinPlan::for_point(s);
    let mut last_bound = f64::INFINITY;
    for _ in 0..3 {
        let mut acc = KahanComplex::new();
        let mut bound = 0.0f64;
        for r in 1..=q {
            let cr = chi.eval(r);
            if cr == 0 {
                continue;
            }
            let out = em_hurwitz(s, r as f64 / q as f64, plan, regularized, false)?;
            acc.add(cr as f64 * out.value);
            bound += out.bound;
        }
        let scaled = acc.value() * pow_neg(q as f64, s);
        if bound <= ZETA_TARGET * q as f64 * (1.0 + scaled.norm()) {
            return Ok(scaled);
        }
        last_bound = bound;
        plan = plan.doubled();
    }
    Err(Error::PrecisionExhausted {
        what: "dirichlet_l escalation",
        achieved: last_bound,
        target: ZETA_TARGET,
    })
}

/// Dedekind zeta of the field: zeta(s) for Q, zeta(s) L(s, chi_D) quadratic.
pub fn dedekind_zeta(field: &FieldDescriptor, s: Complex64) -> Result<Complex64> {
    let z = riemann_zeta(s)?;
    match field.character() {
        None => Ok(z),
        Some(chi) => Ok(z * dirichlet_l(s, chi)?),
    }
}

/// L'(1, chi) / L(1, chi), real.
///
/// Both L(1) and L'(1) come from the regularized Hurwitz pass with term-wise
/// derivatives: L'(1) = -ln q * L(1) + q^{-1} sum_r chi(r) zeta_reg'(1, r/q).
pub fn l_log_derivative_at_one(chi: &QuadraticCharacter) -> Result<f64> {
    let q = chi.modulus();
    let s = Complex64::new(1.0, 0.0);
    let plan = EulerMaclaurinPlan::for_point(s);
    let mut value = KahanComplex::new();
    let mut deriv = KahanComplex::new();
    for r in 1..=q {
        let cr = chi.eval(r);
        if cr == 0 {
            continue;
        }
        let out = em_hurwitz(s, r as f64 / q as f64, plan, true, true)?;
        value.add(cr as f64 * out.value);
        deriv.add(cr as f64 * out.derivative);
    }
    let qf = q as f64;
    let l1 = value.value() / qf;
    let l1_deriv = -qf.ln() * l1 + deriv.value() / qf;
    if l1.norm() < 1e-8 {
        return Err(Error::Domain(format!(
            "L(1, chi_{}) unexpectedly near zero: {}",
            chi.discriminant(),
            l1
        )));
    }
    let ratio = l1_deriv / l1;
    if ratio.im.abs() > 1e-10 * (1.0 + ratio.norm()) {
        return Err(Error::RealityViolation {
            what: "L'/L at 1",
            t: 0.0,
            im: ratio.im.abs(),
            allowance: 1e-10,
        });
    }
    Ok(ratio.re)
}
