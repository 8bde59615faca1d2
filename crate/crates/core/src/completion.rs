//! The completed zeta xi_K and its derived objects: central multiplicity,
//! the deflated central function, real traces on the critical line, and the
//! gamma-factor phase used for zero counting.
//!
//! xi_K(s) = (1/2) s (s-1) |d_K|^{s/2} pi^{-ns/2} 2^{(1-s) r2}
//!           Gamma(s/2)^{r1} Gamma(s)^{r2} zeta_K(s),
//! assembled as a sum of logarithms exponentiated once, so huge and tiny
//! factors never meet in the significand.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::FieldDescriptor;
use crate::lfun::dedekind_zeta;
use crate::numerics::{digamma, log_gamma, taylor_coefficients, PrecisionPolicy};

use std::f64::consts::{LN_2, PI};

/// Radius of analyticity freely available around s = 1/2 (the zeta pole of
/// the log-assembly sits at distance 1/2).
const CENTRAL_RING_RADIUS: f64 = 0.25;

/// log of everything in xi_K except zeta_K, principal branches.
pub(crate) fn log_prefactor(field: &FieldDescriptor, s: Complex64) -> Result<Complex64> {
    let n = field.degree() as f64;
    let r1 = field.real_embeddings() as f64;
    let r2 = field.complex_pairs() as f64;
    let abs_disc = field.abs_discriminant();

    let mut acc = Complex64::new(0.5f64.ln(), 0.0);
    acc += s.ln() + (s - 1.0).ln();
    acc += (s / 2.0) * abs_disc.ln();
    acc -= (n * PI.ln() / 2.0) * s;
    acc += (1.0 - s) * (r2 * LN_2);
    if r1 > 0.0 {
        acc += r1 * log_gamma(s / 2.0)?;
    }
    if r2 > 0.0 {
        acc += r2 * log_gamma(s)?;
    }
    Ok(acc)
}

/// xi_K(s). The assembly through logs is undefined at s = 0 and s = 1
/// (zeros of the polynomial factor, pole of zeta_K), so both are rejected.
pub fn xi(field: &FieldDescriptor, s: Complex64) -> Result<Complex64> {
    if s.norm() < 1e-12 || (s - 1.0).norm() < 1e-12 {
        return Err(Error::Domain(format!(
            "xi log-assembly undefined at s = {s}; 0 and 1 are excluded"
        )));
    }
    let z = dedekind_zeta(field, s)?;
    let pref = log_prefactor(field, s)?;
    let v = pref.exp() * z;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::NonFinite("xi".into()));
    }
    Ok(v)
}

/// Generic central deflation: f(s)/(s - 1/2)^m, with a ring-series takeover
/// inside |s - 1/2| < 1e-6 where the quotient loses digits.
pub(crate) fn deflate_central<F>(f: F, s: Complex64, m: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let half = Complex64::new(0.5, 0.0);
    if m == 0 {
        return f(s);
    }
    let dist = (s - half).norm();
    if dist >= 1e-6 {
        return Ok(f(s)? / (s - half).powu(m as u32));
    }
    let coeffs = taylor_coefficients(
        &f,
        half,
        CENTRAL_RING_RADIUS,
        m + 6,
        &PrecisionPolicy::default(),
    )?;
    let mut acc = Complex64::default();
    for j in (0..=6).rev() {
        acc = acc * (s - half) + coeffs[m + j];
    }
    Ok(acc)
}

/// Order of the zero of xi_K at s = 1/2 (zero for every supported field
/// unless zeta_K(1/2) itself vanishes, which f64 cannot certify anyway).
pub fn detect_multiplicity(field: &FieldDescriptor) -> Result<usize> {
    let central = dedekind_zeta(field, Complex64::new(0.5, 0.0))?;
    if central.norm() > 1e-6 {
        return Ok(0);
    }
    let order = central_order_of(|z| xi(field, z), Complex64::new(0.5, 0.0))?;
    if order % 2 != 0 {
        return Err(Error::CannotCertifyMultiplicity(format!(
            "leading central order {order} is odd, which the functional \
             equation forbids; data too noisy to certify"
        )));
    }
    Ok(order)
}

/// Leading Taylor order of `f` at `center`, from ring coefficients compared
/// in function units against a relative noise floor.
pub(crate) fn central_order_of<F>(f: F, center: Complex64) -> Result<usize>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    const K_MAX: usize = 8;
    let coeffs = taylor_coefficients(
        &f,
        center,
        CENTRAL_RING_RADIUS,
        K_MAX,
        &PrecisionPolicy::default(),
    )?;
    // Function-unit magnitude of each term on the ring.
    let scaled: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm() * CENTRAL_RING_RADIUS.powi(k as i32))
        .collect();
    let scale = scaled.iter().fold(0.0f64, |m, &x| m.max(x));
    if scale == 0.0 {
        return Err(Error::CannotCertifyMultiplicity(
            "function vanishes identically on the ring".into(),
        ));
    }
    let threshold = 1e-7 * scale;
    match scaled.iter().position(|&x| x > threshold) {
        Some(k) => Ok(k),
        None => Err(Error::CannotCertifyMultiplicity(format!(
            "no coefficient clears the noise floor {threshold:e}"
        ))),
    }
}

/// The deflated completed function: xi_K(s) / (s-1/2)^m.
pub fn script_x(field: &FieldDescriptor, s: Complex64, multiplicity: usize) -> Result<Complex64> {
    deflate_central(|z| xi(field, z), s, multiplicity)
}

/// xi_K(1/2 + it) as a real number; the imaginary residue must be noise.
pub fn critical_trace(field: &FieldDescriptor, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("critical_trace ordinate".into()));
    }
    let v = xi(field, Complex64::new(0.5, t))?;
    let allowance = 1e-9 * (1.0 + v.norm());
    if v.im.abs() > allowance {
        return Err(Error::RealityViolation {
            what: "xi on the critical line",
            t,
            im: v.im.abs(),
            allowance,
        });
    }
    Ok(v.re)
}

/// Positively rescaled trace exp(-Re log-prefactor) * xi_K(1/2+it): same
/// zeros and signs as xi_K but O(|zeta_K|), immune to the e^{-pi n t / 4}
/// underflow of the literal trace at large heights.
pub(crate) fn scaled_trace(field: &FieldDescriptor, t: f64) -> Result<f64> {
    let s = Complex64::new(0.5, t);
    let z = dedekind_zeta(field, s)?;
    let pref = log_prefactor(field, s)?;
    let v = Complex64::from_polar(1.0, pref.im) * z;
    let allowance = 1e-9 * (1.0 + v.norm());
    if v.im.abs() > allowance {
        return Err(Error::RealityViolation {
            what: "rescaled xi on the critical line",
            t,
            im: v.im.abs(),
            allowance,
        });
    }
    Ok(v.re)
}

/// Gamma-factor phase theta_K(t) = Im log of the archimedean part of xi_K
/// at 1/2 + it; N(T) = theta_K(T)/pi + 1 + S(T).
pub fn phase(field: &FieldDescriptor, t: f64) -> Result<f64> {
    let n = field.degree() as f64;
    let r1 = field.real_embeddings() as f64;
    let r2 = field.complex_pairs() as f64;
    let mut theta = 0.5 * t * field.abs_discriminant().ln();
    theta -= 0.5 * n * t * PI.ln();
    theta -= r2 * t * LN_2;
    if r1 > 0.0 {
        theta += r1 * log_gamma(Complex64::new(0.25, t / 2.0))?.im;
    }
    if r2 > 0.0 {
        theta += r2 * log_gamma(Complex64::new(0.5, t))?.im;
    }
    Ok(theta)
}

/// d theta_K / dt, through digamma.
pub(crate) fn phase_deriv(field: &FieldDescriptor, t: f64) -> Result<f64> {
    let n = field.degree() as f64;
    let r1 = field.real_embeddings() as f64;
    let r2 = field.complex_pairs() as f64;
    let mut d = 0.5 * field.abs_discriminant().ln();
    d -= 0.5 * n * PI.ln();
    d -= r2 * LN_2;
    if r1 > 0.0 {
        d += 0.5 * r1 * digamma(Complex64::new(0.25, t / 2.0))?.re;
    }
    if r2 > 0.0 {
        d += r2 * digamma(Complex64::new(0.5, t))?.re;
    }
    Ok(d)
}

/// Certified central data: multiplicity plus the first few derivatives of
/// the deflated function at 1/2, all real to within the stated floor.
#[derive(Clone, Debug)]
pub struct CompletionProfile {
    field: FieldDescriptor,
    multiplicity: usize,
    derivatives: [f64; 5],
}

impl CompletionProfile {
    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }
    /// k-th derivative of the deflated function at 1/2, k <= 4.
    pub fn central_derivative(&self, k: usize) -> f64 {
        self.derivatives[k]
    }
    pub fn central_value(&self) -> f64 {
        self.derivatives[0]
    }
    pub fn central_second(&self) -> f64 {
        self.derivatives[2]
    }
}

/// Build the central profile: detect multiplicity, extract derivatives 0..4
/// of the deflated function, enforce reality and the odd-slope vanishing.
pub fn completion_profile(field: &FieldDescriptor) -> Result<CompletionProfile> {
    let multiplicity = detect_multiplicity(field)?;
    let half = Complex64::new(0.5, 0.0);
    let coeffs = taylor_coefficients(
        |z| script_x(field, z, multiplicity),
        half,
        CENTRAL_RING_RADIUS,
        4,
        &PrecisionPolicy::default(),
    )?;
    let mut derivatives = [0.0f64; 5];
    let mut factorial = 1.0f64;
    for (k, a) in coeffs.iter().enumerate() {
        if k > 0 {
            factorial *= k as f64;
        }
        let d = a * factorial;
        let allowance = 1e-10 * (1.0 + d.norm());
        if d.im.abs() > allowance {
            return Err(Error::RealityViolation {
                what: "central derivative of the deflated function",
                t: 0.0,
                im: d.im.abs(),
                allowance,
            });
        }
        derivatives[k] = d.re;
    }
    let slope_allowance = 1e-9 * derivatives[0].abs();
    if derivatives[1].abs() > slope_allowance {
        return Err(Error::RealityViolation {
            what: "central slope (must vanish by the functional equation)",
            t: 0.0,
            im: derivatives[1].abs(),
            allowance: slope_allowance,
        });
    }
    Ok(CompletionProfile {
        field: field.clone(),
        multiplicity,
        derivatives,
    })
}

/// |zeta_K(1-s) - reflection(s) zeta_K(s)| / scale for the asymmetric form
/// of the functional equation; exercises the whole gamma-factor stack.
pub fn reflection_residual(field: &FieldDescriptor, s: Complex64) -> Result<f64> {
    let n = field.degree() as f64;
    let r1 = field.real_embeddings() as f64;
    let r2 = field.complex_pairs() as f64;
    let lhs = dedekind_zeta(field, Complex64::new(1.0, 0.0) - s)?;

    // log of |d|^{s-1/2} cos(pi s/2)^{r1+r2} sin(pi s/2)^{r2}
    //        2^{n(1-s)} pi^{-ns} Gamma(s)^n
    let mut lg = (s - 0.5) * field.abs_discriminant().ln();
    lg += (r1 + r2) * (PI * s / 2.0).cos().ln();
    if r2 > 0.0 {
        lg += r2 * (PI * s / 2.0).sin().ln();
    }
    lg += n * (1.0 - s) * LN_2;
    lg -= n * s * PI.ln();
    lg += n * log_gamma(s)?;
    let rhs = lg.exp() * dedekind_zeta(field, s)?;

    let scale = lhs.norm().max(rhs.norm()).max(1e-300);
    Ok((lhs - rhs).norm() / scale)
}
