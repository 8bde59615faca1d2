//! Working-precision declaration and accuracy targets for the f64 engine.

use crate::error::{Error, Result};

/// Requested mantissa model. Everything maps onto native f64; requests that
/// f64 cannot honor are rejected up front instead of silently degrading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkingPrecision {
    NativeDouble,
    /// Explicit bit request; 50..=53 is accepted (f64 has a 53-bit mantissa).
    Bits(u32),
}

/// Accuracy contract threaded through derivative and quadrature kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionPolicy {
    pub working: WorkingPrecision,
    pub target_abs_tol: f64,
    pub target_rel_tol: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            working: WorkingPrecision::NativeDouble,
            target_abs_tol: 1e-12,
            target_rel_tol: 1e-12,
        }
    }
}

impl PrecisionPolicy {
    pub fn validate(&self) -> Result<()> {
        if let WorkingPrecision::Bits(b) = self.working {
            if !(50..=53).contains(&b) {
                return Err(Error::UnsupportedPrecision { bits: b });
            }
        }
        for (name, v) in [
            ("target_abs_tol", self.target_abs_tol),
            ("target_rel_tol", self.target_rel_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Mantissa bits actually used. Always 53 for accepted configurations.
    pub fn effective_bits(&self) -> u32 {
        53
    }

    /// Mixed absolute/relative allowance around a value of magnitude `scale`.
    pub fn allowance(&self, scale: f64) -> f64 {
        self.target_abs_tol.max(self.target_rel_tol * scale.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_policy_validates() {
        let p = PrecisionPolicy::default();
        p.validate().unwrap();
        assert_eq!(p.effective_bits(), 53);
    }

    #[test]
    fn bits_in_f64_range_accepted() {
        for b in 50..=53 {
            let p = PrecisionPolicy {
                working: WorkingPrecision::Bits(b),
                ..Default::default()
            };
            p.validate().unwrap();
            assert_eq!(p.effective_bits(), 53);
        }
    }

    #[test]
    fn excess_bits_rejected() {
        let p = PrecisionPolicy {
            working: WorkingPrecision::Bits(100),
            ..Default::default()
        };
        match p.validate() {
            Err(Error::UnsupportedPrecision { bits: 100 }) => {}
            other => panic!("expected UnsupportedPrecision, got {other:?}"),
        }
    }

    #[test]
    fn bad_tolerances_rejected() {
        for bad in [0.0, -1e-9, f64::NAN, f64::INFINITY] {
            let p = PrecisionPolicy {
                target_abs_tol: bad,
                ..Default::default()
            };
            assert!(p.validate().is_err(), "tolerance {bad} should be rejected");
        }
    }

    #[test]
    fn allowance_mixes_abs_and_rel() {
        let p = PrecisionPolicy::default();
        assert_eq!(p.allowance(0.0), 1e-12);
        assert!((p.allowance(1e6) - 1e-6).abs() < 1e-18);
    }
}
