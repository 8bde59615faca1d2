//! Derivatives of holomorphic functions by two independent methods:
//! a Cauchy-integral ring (trapezoid on a circle, spectrally accurate)
//! cross-checked against Richardson-extrapolated central differences.
//! Disagreement beyond the stated allowance is an error, not a guess.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::kahan::KahanComplex;
use super::precision::PrecisionPolicy;

/// Radius used by callers that have no better analyticity information.
pub const DEFAULT_DERIVATIVE_RADIUS: f64 = 0.25;

const RING_SIZES: [usize; 4] = [64, 128, 256, 512];

/// Order-1 or order-2 derivative of `f` at `center`.
///
/// `f` must be holomorphic on the closed disk of the given radius. The
/// contour result is accepted only if the finite-difference estimate agrees
/// within 10x the policy allowance; otherwise DerivativeDisagreement.
pub fn derivative_at<F>(
    f: F,
    center: Complex64,
    order: u32,
    radius: f64,
    policy: &PrecisionPolicy,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    policy.validate()?;
    if !(order == 1 || order == 2) {
        return Err(Error::Domain(format!(
            "derivative_at supports orders 1 and 2, got {order}"
        )));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Domain(format!("derivative radius must be positive, got {radius}")));
    }

    let contour = cauchy_derivative(&f, center, order, radius, policy)?;
    // h0 = radius/4 keeps the Richardson remainder negligible even when a
    // singularity sits just outside the ring (derivatives growing like k!).
    let finite_difference = fd_derivative(&f, center, order, radius / 4.0)?;

    let allowance = 10.0 * policy.allowance(contour.norm());
    if (contour - finite_difference).norm() > allowance {
        return Err(Error::DerivativeDisagreement {
            order,
            contour,
            finite_difference,
            allowance,
        });
    }
    Ok(contour)
}

/// Taylor coefficients a_0..a_k_max of `f` around `center` from one ring,
/// validated by doubling the node count until consecutive rings agree.
pub fn taylor_coefficients<F>(
    f: F,
    center: Complex64,
    radius: f64,
    k_max: usize,
    policy: &PrecisionPolicy,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    policy.validate()?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Domain(format!("ring radius must be positive, got {radius}")));
    }
    if k_max > 16 {
        return Err(Error::Domain(format!(
            "taylor_coefficients supports k_max <= 16, got {k_max}"
        )));
    }

    let mut previous: Option<Vec<Complex64>> = None;
    let mut last_gap = f64::INFINITY;
    for &n in &RING_SIZES {
        if n <= 2 * k_max {
            continue;
        }
        let (coeffs, scale) = ring_coefficients(&f, center, radius, n, k_max)?;
        if let Some(prev) = &previous {
            // Compare in function units: a_k roundoff is amplified by r^-k,
            // so re-scale by r^k before judging agreement.
            last_gap = coeffs
                .iter()
                .zip(prev)
                .enumerate()
                .map(|(k, (a, b))| (a - b).norm() * radius.powi(k as i32))
                .fold(0.0f64, f64::max);
            let allowance = 10.0 * policy.allowance(scale);
            if last_gap <= allowance {
                return Ok(coeffs);
            }
        }
        previous = Some(coeffs);
    }
    Err(Error::PrecisionExhausted {
        what: "taylor_coefficients ring doubling",
        achieved: last_gap,
        target: policy.target_abs_tol,
    })
}

/// One trapezoid ring: a_k = (1/(N r^k)) sum_j f(c + r e^{i t_j}) e^{-i k t_j}.
fn ring_coefficients<F>(
    f: &F,
    center: Complex64,
    radius: f64,
    n: usize,
    k_max: usize,
) -> Result<(Vec<Complex64>, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut samples = Vec::with_capacity(n);
    let mut scale = 0.0f64;
    for j in 0..n {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let v = f(center + Complex64::from_polar(radius, theta))?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite("taylor ring sample".into()));
        }
        scale = scale.max(v.norm());
        samples.push((theta, v));
    }
    let mut coeffs = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut acc = KahanComplex::new();
        for (theta, v) in &samples {
            acc.add(v * Complex64::from_polar(1.0, -(k as f64) * theta));
        }
        coeffs.push(acc.value() / (n as f64 * radius.powi(k as i32)));
    }
    Ok((coeffs, scale))
}

/// Contour derivative with ring doubling until two sizes agree.
pub(crate) fn cauchy_derivative<F>(
    f: &F,
    center: Complex64,
    order: u32,
    radius: f64,
    policy: &PrecisionPolicy,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let factorial = if order == 1 { 1.0 } else { 2.0 };
    let mut previous: Option<Complex64> = None;
    let mut best = Complex64::default();
    let mut gap = f64::INFINITY;
    for &n in &RING_SIZES {
        let mut acc = KahanComplex::new();
        for j in 0..n {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let v = f(center + Complex64::from_polar(radius, theta))?;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite("contour derivative sample".into()));
            }
            acc.add(v * Complex64::from_polar(1.0, -(order as f64) * theta));
        }
        let value = acc.value() * factorial / (n as f64 * radius.powi(order as i32));
        if let Some(prev) = previous {
            gap = (value - prev).norm();
            best = value;
            if gap <= policy.allowance(value.norm()) {
                return Ok(value);
            }
        } else {
            best = value;
        }
        previous = Some(value);
    }
    // The ring is spectrally accurate; reaching here means f is rough on the
    // circle. Return the finest estimate and let the cross-check decide.
    let _ = gap;
    Ok(best)
}

/// Central finite differences with a 4-level Richardson tableau.
pub(crate) fn fd_derivative<F>(
    f: &F,
    center: Complex64,
    order: u32,
    h0: f64,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    const LEVELS: usize = 4;
    let f0 = if order == 2 { Some(f(center)?) } else { None };
    let mut tableau = [[Complex64::default(); LEVELS]; LEVELS];
    for i in 0..LEVELS {
        let h = h0 / 2f64.powi(i as i32);
        let fp = f(center + h)?;
        let fm = f(center - h)?;
        tableau[i][0] = match order {
            1 => (fp - fm) / (2.0 * h),
            _ => (fp - 2.0 * f0.unwrap() + fm) / (h * h),
        };
        for k in 1..=i {
            let pow = 4f64.powi(k as i32);
            tableau[i][k] = (pow * tableau[i][k - 1] - tableau[i - 1][k - 1]) / (pow - 1.0);
        }
    }
    Ok(tableau[LEVELS - 1][LEVELS - 1])
}
