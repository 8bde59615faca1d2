//! Globally adaptive Gauss-Kronrod 7-15 quadrature with a conservative
//! error bound, plus a 1/t substitution for infinite upper limits.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

use super::kahan::KahanSum;
use super::precision::PrecisionPolicy;

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    /// Conservative bound: sum over panels of |K15 - G7|.
    pub error_bound: f64,
    pub evaluations: usize,
}

// 15-point Kronrod abscissae (positive half) and weights; the embedded
// 7-point Gauss rule sits on nodes 1, 3, 5 and the center.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One K15/G7 panel. Returns (kronrod value, |k15 - g7|).
fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("integrand at t = {x}")));
        }
        Ok(v)
    };

    let fc = eval(center)?;
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate().take(7) {
        let fp = eval(center + half * x)?;
        let fm = eval(center - half * x)?;
        kron += wk * (fp + fm);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (fp + fm);
        }
    }
    Ok((kron * half, (kron - gauss).abs() * half.abs()))
}

#[derive(Debug)]
struct Panel {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Deterministic total order: worst error first, endpoints break ties.
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
            .then_with(|| other.b.total_cmp(&self.b))
    }
}

/// Integrate `f` over the finite interval [a, b] to absolute tolerance.
pub fn adaptive_quadrature<F>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_evaluations: usize,
) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("adaptive_quadrature needs finite endpoints".into()));
    }
    if !(abs_tol.is_finite() && abs_tol > 0.0) {
        return Err(Error::Domain(format!("quadrature tolerance must be positive, got {abs_tol}")));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error_bound: 0.0, evaluations: 0 });
    }

    let width_floor = 1e-13 * (1.0 + a.abs() + b.abs());
    let mut evaluations = 15usize;
    let (v0, e0) = gk15(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { err: e0, a, b, value: v0 });
    let mut frozen: Vec<Panel> = Vec::new();
    let mut frozen_err = 0.0f64;

    loop {
        let active_err: f64 = heap.iter().map(|p| p.err).sum();
        let total_err = active_err + frozen_err;
        if total_err <= abs_tol || heap.is_empty() {
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.extend(frozen);
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value: KahanSum = panels.iter().map(|p| p.value).collect();
            let bound: KahanSum = panels.iter().map(|p| p.err).collect();
            let result = Quadrature {
                value: value.value(),
                error_bound: bound.value(),
                evaluations,
            };
            if result.error_bound > abs_tol {
                return Err(Error::QuadratureNoConvergence {
                    error_bound: result.error_bound,
                    target: abs_tol,
                    evaluations,
                });
            }
            return Ok(result);
        }
        if evaluations + 30 > max_evaluations {
            return Err(Error::QuadratureNoConvergence {
                error_bound: total_err,
                target: abs_tol,
                evaluations,
            });
        }

        let worst = heap.pop().expect("heap checked non-empty");
        if worst.b - worst.a < width_floor {
            frozen_err += worst.err;
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, mid)?;
        let (v2, e2) = gk15(&f, mid, worst.b)?;
        evaluations += 30;
        heap.push(Panel { err: e1, a: worst.a, b: mid, value: v1 });
        heap.push(Panel { err: e2, a: mid, b: worst.b, value: v2 });
    }
}

/// Integral of a decaying function over [a, b], b possibly infinite.
///
/// Infinite tails are mapped through u = 1/t, which requires f to decay at
/// least as fast as 1/t^2 up to logarithmic factors.
pub fn integrate_decaying<F>(f: F, a: f64, b: f64, policy: &PrecisionPolicy) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    policy.validate()?;
    let tol = policy.target_abs_tol;
    const BUDGET: usize = 400_000;
    if b.is_finite() {
        return Ok(adaptive_quadrature(&f, a, b, tol, BUDGET)?.value);
    }
    if !(a.is_finite() && a > 0.0) {
        // The substitution needs a positive finite split point.
        let head = if a < 1.0 {
            adaptive_quadrature(&f, a, 1.0, tol / 2.0, BUDGET)?.value
        } else {
            0.0
        };
        let split = a.max(1.0);
        let tail = transformed_tail(&f, split, tol / 2.0)?;
        return Ok(head + tail);
    }
    Ok(transformed_tail(&f, a, tol)?)
}

/// Integral over [split, infinity) via u = 1/t.
fn transformed_tail<F>(f: &F, split: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = |u: f64| -> Result<f64> {
        let t = 1.0 / u;
        Ok(f(t)? * t * t)
    };
    Ok(adaptive_quadrature(g, 0.0, 1.0 / split, tol, 400_000)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn tol_policy(tol: f64) -> PrecisionPolicy {
        PrecisionPolicy {
            target_abs_tol: tol,
            ..Default::default()
        }
    }

    #[test]
    fn closed_form_library_with_honest_bounds() {
        let cases: [(fn(f64) -> Result<f64>, f64, f64, f64); 5] = [
            (|t| Ok(t * t * t), 0.0, 1.0, 0.25),
            (|t| Ok(t.sin()), 0.0, PI, 2.0),
            (|t| Ok(t.exp()), 0.0, 1.0, E - 1.0),
            (|t| Ok(1.0 / t), 1.0, 2.0, 2f64.ln()),
            (|t| Ok(1.0 / (1.0 + t * t)), 0.0, 1.0, PI / 4.0),
        ];
        for (f, a, b, exact) in cases {
            let q = adaptive_quadrature(f, a, b, 1e-12, 100_000).unwrap();
            let err = (q.value - exact).abs();
            assert!(err <= 1e-12, "value error {err:e} for exact {exact}");
            assert!(
                err <= q.error_bound + 1e-15,
                "bound {:e} fails to cover error {err:e}",
                q.error_bound
            );
        }
    }

    #[test]
    fn single_panel_is_exact_for_low_degree() {
        let (v, _) = gk15(&|t: f64| Ok(t.powi(8)), 0.0, 1.0).unwrap();
        assert!((v - 1.0 / 9.0).abs() < 1e-15);
        let (v13, _) = gk15(&|t: f64| Ok(t.powi(13)), 0.0, 1.0).unwrap();
        assert!((v13 - 1.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn infinite_tails() {
        let p = tol_policy(1e-11);
        let inv_sq = integrate_decaying(|t| Ok(1.0 / (t * t)), 1.0, f64::INFINITY, &p).unwrap();
        assert!((inv_sq - 1.0).abs() < 1e-10);

        let exp_tail = integrate_decaying(|t| Ok((-t).exp()), 0.0, f64::INFINITY, &p).unwrap();
        assert!((exp_tail - 1.0).abs() < 1e-10);

        // Logarithmic factor on top of 1/t^2: closed form (ln T + 1)/T.
        let t0 = 50.0;
        let v = integrate_decaying(|t| Ok(t.ln() / (t * t)), t0, f64::INFINITY, &p).unwrap();
        assert!((v - (t0.ln() + 1.0) / t0).abs() < 1e-10);
    }

    #[test]
    fn integrable_log_singularity() {
        let q = adaptive_quadrature(|t: f64| Ok(t.ln()), 0.0, 1.0, 1e-10, 200_000).unwrap();
        assert!((q.value + 1.0).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn budget_exhaustion_reports_failure() {
        // Integrable inverse-sqrt singularity: needs many panels near 0.
        let f = |t: f64| Ok(1.0 / t.sqrt());
        match adaptive_quadrature(f, 0.0, 1.0, 1e-12, 100) {
            Err(Error::QuadratureNoConvergence { evaluations, .. }) => {
                assert!(evaluations <= 100);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
        // With budget it converges to 2 (1e-7: the width floor near the
        // endpoint caps what plain panels can do against t^{-1/2}).
        let q = adaptive_quadrature(f, 0.0, 1.0, 1e-7, 400_000).unwrap();
        assert!((q.value - 2.0).abs() < 1e-7, "{}", q.value);
    }

    #[test]
    fn deterministic_repeat() {
        let run = || {
            adaptive_quadrature(|t: f64| Ok((10.0 * t).sin() / (1.0 + t)), 0.0, 20.0, 1e-11, 200_000)
                .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let f = |t: f64| Ok(if t > 0.5 { f64::NAN } else { 1.0 });
        assert!(matches!(
            adaptive_quadrature(f, 0.0, 1.0, 1e-10, 10_000),
            Err(Error::NonFinite(_))
        ));
    }
}
