//! Real values with an exact-rational fast path.
//!
//! Rational inputs stay rational through arithmetic; as soon as a float
//! enters, the value degrades to `f64`. Downstream code can then make
//! exact claims (sign tests, identities) whenever every input was exact.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_biguint(v: &BigUint) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v.clone())))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(r)
    }

    pub fn from_f64(v: f64) -> Self {
        Scalar::Approx(v)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Approx(v) => *v,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Approx(v) => *v > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Approx(v) => *v < 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(v) => *v == 0.0,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => Scalar::Approx(self.to_f64() - other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Approx(self.to_f64() * other.to_f64()),
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) if !b.is_zero() => Scalar::Exact(a / b),
            _ => Scalar::Approx(self.to_f64() / other.to_f64()),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(v) => Scalar::Approx(-v),
        }
    }

    pub fn powu(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                let mut acc = BigRational::from_integer(BigInt::from(1));
                for _ in 0..exp {
                    acc *= r;
                }
                Scalar::Exact(acc)
            }
            Scalar::Approx(v) => Scalar::Approx(v.powi(exp as i32)),
        }
    }

    /// Renders the value for canonical JSON: decimal string at a fixed
    /// precision, plus exact numerator/denominator when available.
    pub fn to_json(&self, precision: usize) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert(
            "decimal".into(),
            serde_json::Value::String(format_decimal(self.to_f64(), precision)),
        );
        if let Scalar::Exact(r) = self {
            map.insert("num".into(), serde_json::Value::String(r.numer().to_string()));
            map.insert("den".into(), serde_json::Value::String(r.denom().to_string()));
        }
        serde_json::Value::Object(map)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", r),
            Scalar::Approx(v) => write!(f, "{}", v),
        }
    }
}

pub fn format_decimal(v: f64, precision: usize) -> String {
    if v.is_finite() {
        format!("{:.*e}", precision, v)
    } else {
        format!("{}", v)
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerator/denominator; fall back to a scaled division.
        let n = r.numer();
        let d = r.denom();
        let shift = (d.bits() as i64 - 64).max(0) as u64;
        let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
        let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
        nf / df
    })
}
