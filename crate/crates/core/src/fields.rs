//! Field descriptors for Q and quadratic fields, and the attached
//! real primitive character of fundamental-discriminant conductor.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest |discriminant| accepted; keeps character tables and conductor
/// powers comfortably inside exact i64/f64 arithmetic.
pub const MAX_ABS_DISCRIMINANT: i64 = 1_000_000;

/// Invariants of the base field needed by the analytic machinery.
///
/// degree n, real embeddings r1, complex pairs r2, discriminant, and for
/// quadratic fields the Kronecker character mod |discriminant|.
#[derive(Clone, Debug)]
pub struct FieldDescriptor {
    degree: u32,
    real_embeddings: u32,
    complex_pairs: u32,
    discriminant: i64,
    character: Option<QuadraticCharacter>,
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.discriminant == other.discriminant && self.degree == other.degree
    }
}
impl Eq for FieldDescriptor {}

impl FieldDescriptor {
    /// The rational field: n = 1, r1 = 1, discriminant 1.
    pub fn rationals() -> Self {
        FieldDescriptor {
            degree: 1,
            real_embeddings: 1,
            complex_pairs: 0,
            discriminant: 1,
            character: None,
        }
    }

    /// Quadratic field of fundamental discriminant `d`.
    pub fn quadratic(d: i64) -> Result<Self> {
        let character = QuadraticCharacter::new(d)?;
        let (r1, r2) = if d > 0 { (2, 0) } else { (0, 1) };
        Ok(FieldDescriptor {
            degree: 2,
            real_embeddings: r1,
            complex_pairs: r2,
            discriminant: d,
            character: Some(character),
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn real_embeddings(&self) -> u32 {
        self.real_embeddings
    }
    pub fn complex_pairs(&self) -> u32 {
        self.complex_pairs
    }
    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }
    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }
    pub fn character(&self) -> Option<&QuadraticCharacter> {
        self.character.as_ref()
    }
    pub fn abs_discriminant(&self) -> f64 {
        self.discriminant.unsigned_abs() as f64
    }

    /// Canonical spec string: "Q" or "D=<int>".
    pub fn spec(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "Q")
        } else {
            write!(f, "D={}", self.discriminant)
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        make_field(s)
    }
}

/// Parse "Q" or "D=<int>" into a validated descriptor.
pub fn make_field(spec: &str) -> Result<FieldDescriptor> {
    let trimmed = spec.trim();
    if trimmed == "Q" {
        return Ok(FieldDescriptor::rationals());
    }
    if let Some(num) = trimmed.strip_prefix("D=") {
        let d: i64 = num.parse().map_err(|_| Error::BadFieldSpec {
            spec: spec.to_string(),
        })?;
        return FieldDescriptor::quadratic(d);
    }
    Err(Error::BadFieldSpec {
        spec: spec.to_string(),
    })
}

/// True iff d is a fundamental discriminant (of a quadratic field, so d != 1).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

fn squarefree(n: i64) -> bool {
    let mut m = n.unsigned_abs();
    let mut p: u64 = 2;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        while m % p == 0 {
            m /= p;
        }
        p += 1;
    }
    true
}

/// Fundamental discriminant attached to sqrt(n), for error hints.
fn fundamental_of(n: i64) -> Option<i64> {
    if n == 0 {
        return None;
    }
    // Squarefree kernel: product of primes dividing n to an odd power.
    let mut m = n;
    let mut p: i64 = 2;
    while p * p <= m.abs() {
        while m % (p * p) == 0 {
            m /= p * p;
        }
        p += 1;
    }
    if m == 1 {
        return None; // square: no quadratic field
    }
    Some(if m.rem_euclid(4) == 1 { m } else { 4 * m })
}

/// Kronecker symbol (d/k) for k >= 1, by reciprocity on the binary expansion.
pub fn kronecker_symbol(d: i64, k: u64) -> i32 {
    let mut a = d;
    let mut n = k as i64;
    debug_assert!(n >= 1);
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    // (a/2) factor: strip twos from n.
    let mut twos = 0u32;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        // (a/2) = +1 if a = +-1 mod 8, -1 if a = +-3 mod 8.
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Now n odd positive; standard Jacobi with a possibly negative.
    a = a.rem_euclid(n);
    while a != 0 {
        let mut twos = 0u32;
        while a % 2 == 0 {
            a /= 2;
            twos += 1;
        }
        if twos % 2 == 1 && matches!(n.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        // Quadratic reciprocity for odd positive a, n.
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.rem_euclid(n);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Real primitive character chi_d(k) = (d/k), tabulated over one period.
#[derive(Clone)]
pub struct QuadraticCharacter {
    discriminant: i64,
    modulus: u64,
    table: Arc<[i8]>,
}

impl fmt::Debug for QuadraticCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadraticCharacter")
            .field("discriminant", &self.discriminant)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl QuadraticCharacter {
    pub fn new(d: i64) -> Result<Self> {
        if d.abs() > MAX_ABS_DISCRIMINANT {
            return Err(Error::Domain(format!(
                "|discriminant| up to {MAX_ABS_DISCRIMINANT} supported, got {d}"
            )));
        }
        if !is_fundamental_discriminant(d) {
            let hint = match fundamental_of(d) {
                Some(f) => format!("nearest fundamental discriminant with the same field: {f}"),
                None => "the value is a perfect square or zero, no quadratic field".to_string(),
            };
            return Err(Error::NonFundamental { d, hint });
        }
        let modulus = d.unsigned_abs();
        let table: Vec<i8> = (0..modulus)
            .map(|k| if k == 0 { 0 } else { kronecker_symbol(d, k) as i8 })
            .collect();
        Ok(QuadraticCharacter {
            discriminant: d,
            modulus,
            table: table.into(),
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    /// Conductor = |discriminant| for fundamental discriminants.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// chi(k), periodic with the modulus.
    pub fn eval(&self, k: u64) -> i32 {
        self.table[(k % self.modulus) as usize] as i32
    }

    /// Parity: even (chi(-1) = 1) iff d > 0.
    pub fn is_even(&self) -> bool {
        self.discriminant > 0
    }
}
