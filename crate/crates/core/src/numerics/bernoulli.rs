//! Bernoulli numbers, exact in big rationals, with a cached f64 table.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest supported pair count: B_2 .. B_120.
pub const MAX_BERNOULLI_PAIRS: usize = 60;

/// Even-index Bernoulli numbers B_2, B_4, ..., B_{2*k_max}, exact.
///
/// Uses the defining recurrence sum_{k=0}^{n} C(n+1,k) B_k = 0 over
/// arbitrary-precision rationals, so no rounding enters the table.
pub fn bernoulli_numbers(k_max: usize) -> Result<Vec<BigRational>> {
    if k_max > MAX_BERNOULLI_PAIRS {
        return Err(Error::BernoulliRange { k_max });
    }
    let all = bernoulli_all(2 * k_max);
    Ok((1..=k_max).map(|k| all[2 * k].clone()).collect())
}

/// Same table converted to f64 once (every entry is exactly representable
/// far more accurately than f64, so conversion error is one rounding).
pub fn bernoulli_f64(k_max: usize) -> Result<Vec<f64>> {
    if k_max > MAX_BERNOULLI_PAIRS {
        return Err(Error::BernoulliRange { k_max });
    }
    Ok(cached_f64()[..k_max].to_vec())
}

/// Shared f64 table of B_2..B_120 for the gamma and Euler-Maclaurin kernels.
pub(crate) fn cached_f64() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let all = bernoulli_all(2 * MAX_BERNOULLI_PAIRS);
        (1..=MAX_BERNOULLI_PAIRS)
            .map(|k| {
                all[2 * k]
                    .to_f64()
                    .expect("bernoulli numbers up to B_120 fit in f64 range")
            })
            .collect()
    })
}

/// B_0 .. B_n as rationals (odd entries beyond B_1 are exactly zero).
fn bernoulli_all(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // binom accumulates C(m+1, k) incrementally over k.
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            if !bk.is_zero() {
                acc += BigRational::from_integer(binom.clone()) * bk;
            }
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        let divisor = BigRational::from_integer(BigInt::from(m + 1));
        b.push(-acc / divisor);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{FromPrimitive, Signed};

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn first_pairs_exact() {
        let b = bernoulli_numbers(4).unwrap();
        assert_eq!(b[0], frac(1, 6));
        assert_eq!(b[1], frac(-1, 30));
        assert_eq!(b[2], frac(1, 42));
        assert_eq!(b[3], frac(-1, 30));
    }

    #[test]
    fn b12_is_minus_691_over_2730() {
        let b = bernoulli_numbers(6).unwrap();
        assert_eq!(b[5], frac(-691, 2730));
    }

    #[test]
    fn odd_entries_vanish() {
        let all = bernoulli_all(21);
        assert_eq!(all[1], frac(-1, 2));
        for m in (3..=21).step_by(2) {
            assert!(all[m].is_zero(), "B_{m} should be zero");
        }
    }

    #[test]
    fn f64_table_matches_rationals() {
        let exact = bernoulli_numbers(20).unwrap();
        let approx = bernoulli_f64(20).unwrap();
        for (e, a) in exact.iter().zip(&approx) {
            let ef = e.to_f64().unwrap();
            assert_eq!(ef, *a);
        }
        // Spot value: B_12 = -691/2730.
        assert!((approx[5] - (-691.0 / 2730.0)).abs() < 1e-16);
    }

    #[test]
    fn von_staudt_clausen_denominator() {
        // denom(B_2k) = product of primes p with (p-1) | 2k.
        let b = bernoulli_numbers(15).unwrap();
        let b30 = &b[14]; // B_30
        let denom = b30.denom().clone();
        // primes p with p-1 | 30: 2,3,7,11,31
        assert_eq!(denom, BigInt::from(2 * 3 * 7 * 11 * 31));
        // B_{4k+2} are positive, B_{4k} negative.
        assert!(b30.is_positive());
        assert!(b[13].is_negative()); // B_28
    }

    #[test]
    fn range_guard() {
        assert!(bernoulli_numbers(MAX_BERNOULLI_PAIRS).is_ok());
        match bernoulli_numbers(MAX_BERNOULLI_PAIRS + 1) {
            Err(Error::BernoulliRange { k_max }) => {
                assert_eq!(k_max, MAX_BERNOULLI_PAIRS + 1)
            }
            other => panic!("expected BernoulliRange, got {other:?}"),
        }
    }

    #[test]
    fn growth_sanity_against_asymptotic() {
        // |B_2k| ~ 2 (2k)! / (2 pi)^{2k}; check order of magnitude at 2k=60.
        let b = bernoulli_f64(30).unwrap();
        let k = 30usize;
        let mut fact = BigRational::one();
        for i in 1..=(2 * k) {
            fact *= BigRational::from_u64(i as u64).unwrap();
        }
        let asym = 2.0 * fact.to_f64().unwrap() / (2.0 * std::f64::consts::PI).powi(2 * k as i32);
        let ratio = b[k - 1].abs() / asym;
        assert!((0.9..1.1).contains(&ratio), "ratio {ratio}");
    }
}
