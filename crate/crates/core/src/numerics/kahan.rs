//! Kahan-compensated accumulation for long slowly-converging sums.

use num_complex::Complex64;

/// Compensated real accumulator (Kahan-Neumaier variant, handles terms
/// larger than the running sum).
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Component-wise compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: Complex64) {
        self.re.add(term.re);
        self.im.add(term.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation_naive_sum_loses() {
        // 1 + 1e-16 repeated: naive accumulation drops every small term.
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..1000 {
            k.add(1e-16);
        }
        let exact = 1.0 + 1000.0 * 1e-16;
        assert!((k.value() - exact).abs() < 1e-18);
    }

    #[test]
    fn order_insensitive_to_1e13() {
        // Inverse-square tail terms, ascending vs descending.
        let terms: Vec<f64> = (1..50_000u64).map(|n| 1.0 / (n * n) as f64).collect();
        let asc: KahanSum = terms.iter().rev().copied().collect();
        let desc: KahanSum = terms.iter().copied().collect();
        assert!((asc.value() - desc.value()).abs() < 1e-13);
    }

    #[test]
    fn neumaier_handles_large_late_term() {
        let mut k = KahanSum::new();
        k.add(1.0);
        k.add(1e100);
        k.add(1.0);
        k.add(-1e100);
        assert_eq!(k.value(), 2.0);
    }

    #[test]
    fn complex_matches_componentwise() {
        let mut k = KahanComplex::new();
        for n in 1..1000u64 {
            let x = 1.0 / n as f64;
            k.add(Complex64::new(x, -x));
        }
        let v = k.value();
        assert_eq!(v.re, -v.im);
    }
}
