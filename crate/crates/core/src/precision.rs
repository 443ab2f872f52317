// SPDX-License-Identifier: Apache-2.0

//! Arbitrary-precision complex points.
//!
//! Everything in the crate computes on [`ComplexPoint`], a pair of MPFR
//! floats sharing one precision. Binary operations produce a result at the
//! larger of the two operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::Float;
use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::error::{OrbitError, Result};

/// Working precision used when a caller does not ask for one.
pub const DEFAULT_PRECISION: u32 = 256;

/// Lowest precision accepted anywhere (binary64 mantissa width).
pub const MIN_PRECISION: u32 = 53;

/// Float at `prec` bits from an `f64`.
pub fn real(prec: u32, value: f64) -> Float {
    Float::with_val(prec, value)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `2^-bits` at `prec` bits; exact for any representable exponent.
pub fn pow2(prec: u32, exponent: i64) -> Float {
    let e = i32::try_from(exponent).expect("binary exponent out of i32 range");
    Float::with_val(prec, 1) << e
}

/// Parses a decimal string at `prec` bits without any intermediate rounding.
pub fn parse_real(text: &str, prec: u32) -> Result<Float> {
    let trimmed = text.trim();
    let parsed = Float::parse(trimmed).map_err(|_| OrbitError::Parse {
        text: trimmed.to_string(),
    })?;
    let value = Float::with_val(prec, parsed);
    if !value.is_finite() {
        return Err(OrbitError::Parse {
            text: trimmed.to_string(),
        });
    }
    Ok(value)
}

/// Shortest decimal string that reads back to the same bits at the value's
/// precision.
pub fn real_to_string(value: &Float) -> String {
    value.to_string_radix(10, None)
}

/// Natural log of a positive float as `f64`. The result is finite even when
/// the argument lies far outside the binary64 exponent range.
pub fn ln_f64(value: &Float) -> f64 {
    Float::with_val(value.prec().max(64), value.ln_ref()).to_f64()
}

/// A point of the complex plane stored at arbitrary binary precision.
#[derive(Clone, PartialEq)]
pub struct ComplexPoint {
    re: Float,
    im: Float,
}

impl ComplexPoint {
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        let mut point = ComplexPoint { re, im };
        point.set_prec(prec);
        point
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexPoint {
            re: real(prec, re),
            im: real(prec, im),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        ComplexPoint { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexPoint {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(1.0, 0.0, prec)
    }

    /// Parses a pair of decimal strings at `prec` bits.
    pub fn parse(re: &str, im: &str, prec: u32) -> Result<Self> {
        Ok(ComplexPoint {
            re: parse_real(re, prec)?,
            im: parse_real(im, prec)?,
        })
    }

    /// `r·e^{iθ}`.
    pub fn polar(modulus: &Float, angle: &Float) -> Self {
        let prec = modulus.prec().max(angle.prec());
        let (sin, cos) = Float::with_val(prec, angle).sin_cos(Float::new(prec));
        ComplexPoint {
            re: Float::with_val(prec, modulus * &cos),
            im: Float::with_val(prec, modulus * &sin),
        }
    }

    /// Unit vector `e^{iθ}`.
    pub fn cis(angle: &Float) -> Self {
        let prec = angle.prec();
        let (sin, cos) = angle.clone().sin_cos(Float::new(prec));
        ComplexPoint { re: cos, im: sin }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn set_prec(&mut self, prec: u32) {
        self.re.set_prec(prec);
        self.im.set_prec(prec);
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.set_prec(prec);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_sq(&self) -> Float {
        let p = self.prec();
        let a = Float::with_val(p, self.re.square_ref());
        a + Float::with_val(p, self.im.square_ref())
    }

    /// Principal argument in `(-π, π]`; `arg 0 = 0`.
    pub fn arg(&self) -> Float {
        let prec = self.prec();
        let mut angle = Float::with_val(prec, self.im.atan2_ref(&self.re));
        let neg_pi = -pi(prec);
        if angle <= neg_pi {
            angle = pi(prec);
        }
        angle
    }

    pub fn distance(&self, other: &ComplexPoint) -> Float {
        (self - other).abs()
    }

    pub fn conj(&self) -> Self {
        ComplexPoint {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn scale(&self, factor: &Float) -> Self {
        let p = self.prec().max(factor.prec());
        ComplexPoint {
            re: Float::with_val(p, &self.re * factor),
            im: Float::with_val(p, &self.im * factor),
        }
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i32) -> Self {
        ComplexPoint {
            re: self.re.clone() << k,
            im: self.im.clone() << k,
        }
    }

    /// Complex quotient. Dividing by zero yields non-finite parts.
    pub fn div(&self, other: &ComplexPoint) -> Self {
        let p = self.prec().max(other.prec());
        let denom = other.abs_sq();
        let num = self * &other.conj();
        ComplexPoint {
            re: Float::with_val(p, &num.re / &denom),
            im: Float::with_val(p, &num.im / &denom),
        }
    }

    pub fn recip(&self) -> Self {
        ComplexPoint::one(self.prec()).div(self)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let modulus = Float::with_val(p, self.re.exp_ref());
        ComplexPoint::polar(&modulus, &self.im)
    }

    /// Principal logarithm `ln|z| + i·arg z`.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        ComplexPoint {
            re: Float::with_val(p, self.abs().ln_ref()),
            im: self.arg(),
        }
    }

    pub fn powu(&self, k: u32) -> Self {
        let mut result = ComplexPoint::one(self.prec());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Nearest binary64 approximation of both parts.
    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Round-trip decimal strings for both parts.
    pub fn to_strings(&self) -> (String, String) {
        (real_to_string(&self.re), real_to_string(&self.im))
    }

    /// Exact equality of both parts.
    pub fn same_as(&self, other: &ComplexPoint) -> bool {
        self.re == other.re && self.im == other.im
    }

    /// Orders by modulus.
    pub fn cmp_abs(&self, other: &ComplexPoint) -> Ordering {
        self.abs_sq()
            .partial_cmp(&other.abs_sq())
            .unwrap_or(Ordering::Equal)
    }
}

impl fmt::Debug for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "({re:e}{im:+e}i @{}b)", self.prec())
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = self.re.to_string_radix(10, Some(17));
        let im = self.im.to_string_radix(10, Some(17));
        write!(f, "{re} + {im}i")
    }
}

impl Serialize for ComplexPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (re, im) = self.to_strings();
        let mut tuple = serializer.serialize_tuple(2)?;
        tuple.serialize_element(&re)?;
        tuple.serialize_element(&im)?;
        tuple.end()
    }
}

impl<'a> Add<&'a ComplexPoint> for &'a ComplexPoint {
    type Output = ComplexPoint;

    fn add(self, rhs: &'a ComplexPoint) -> ComplexPoint {
        let p = self.prec().max(rhs.prec());
        ComplexPoint {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a ComplexPoint> for &'a ComplexPoint {
    type Output = ComplexPoint;

    fn sub(self, rhs: &'a ComplexPoint) -> ComplexPoint {
        let p = self.prec().max(rhs.prec());
        ComplexPoint {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a ComplexPoint> for &'a ComplexPoint {
    type Output = ComplexPoint;

    fn mul(self, rhs: &'a ComplexPoint) -> ComplexPoint {
        let p = self.prec().max(rhs.prec());
        let rr = Float::with_val(p, &self.re * &rhs.re);
        let ii = Float::with_val(p, &self.im * &rhs.im);
        let ri = Float::with_val(p, &self.re * &rhs.im);
        let ir = Float::with_val(p, &self.im * &rhs.re);
        ComplexPoint {
            re: rr - ii,
            im: ri + ir,
        }
    }
}

impl Neg for &ComplexPoint {
    type Output = ComplexPoint;

    fn neg(self) -> ComplexPoint {
        ComplexPoint {
            re: Float::with_val(self.re.prec(), -&self.re),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }
}
