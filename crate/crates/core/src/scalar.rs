//! Numeric backend shared by every module: plain `f64` or exact `BigRational`.

use std::fmt::{Debug, Display};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Arithmetic the algorithms need. Exact backends use zero tolerance.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    /// Absolute slack used by approximate comparisons; zero when exact.
    fn tolerance() -> Self;

    /// Exact value of the given float (no decimal rounding for rationals).
    fn from_f64_lossy(x: f64) -> Self;

    fn to_f64_lossy(&self) -> f64;

    fn to_rational(&self) -> Rational;

    fn from_rational(r: &Rational) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn int(x: u64) -> Self {
        <Self as FromPrimitive>::from_u64(x).expect("u64 is representable")
    }

    /// Float powers, used only for irrational parameters such as sqrt(1+eps).
    fn powf_lossy(&self, e: f64) -> Self {
        Self::from_f64_lossy(self.to_f64_lossy().powf(e))
    }

    fn powi(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let scale = self.abs().max_of(&other.abs()).max_of(&Self::one());
        (self.clone() - other.clone()).abs() <= Self::tolerance() * scale
    }

    /// `self <= other` up to tolerance.
    fn approx_le(&self, other: &Self) -> bool {
        let scale = self.abs().max_of(&other.abs()).max_of(&Self::one());
        self.clone() <= other.clone() + Self::tolerance() * scale
    }

    fn max_of(&self, other: &Self) -> Self {
        if other > self {
            other.clone()
        } else {
            self.clone()
        }
    }

    fn min_of(&self, other: &Self) -> Self {
        if other < self {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Smallest integer `n >= 0` with `n >= self` (exact for rationals).
    fn ceil_u64(&self) -> u64 {
        let r = self.to_rational();
        if r <= Rational::zero() {
            return 0;
        }
        r.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
    }

    fn floor_u64(&self) -> u64 {
        let r = self.to_rational();
        if r <= Rational::zero() {
            return 0;
        }
        r.floor().to_integer().to_u64().unwrap_or(u64::MAX)
    }

    fn to_json(&self) -> serde_json::Value;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-9
    }
    fn from_f64_lossy(x: f64) -> Self {
        x
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("finite float")
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn powf_lossy(&self, e: f64) -> Self {
        self.powf(e)
    }
    fn powi(&self, e: u32) -> Self {
        f64::powi(*self, e as i32)
    }
    fn ceil_u64(&self) -> u64 {
        // Going through the exact rational keeps ceil(t*q) honest at integers.
        if *self <= 0.0 {
            0
        } else {
            let r = Rational::from_float(*self).expect("finite float");
            r.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
        }
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Rational::zero()
    }
    fn from_f64_lossy(x: f64) -> Self {
        Rational::from_float(x).expect("finite float")
    }
    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

/// `to_f64` that survives numerators and denominators beyond f64 range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() && (x != 0.0 || r.is_zero()) {
            return x;
        }
    }
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let (n2, d2) = if shift > 0 {
        (n.clone(), d.clone() << (shift as usize))
    } else {
        (n.clone() << ((-shift) as usize), d.clone())
    };
    let mantissa = Rational::new(n2, d2).to_f64().unwrap_or(f64::NAN);
    mantissa * 2f64.powi(shift as i32)
}

/// Parses "3", "-0.125", "1/3" or "2.5e-3" into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let num = parse_rational(a)?;
        let den = parse_rational(b)?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    if !all.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let num = BigInt::from_str_radix(&all, 10).ok()?;
    let ten = BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let mut r = Rational::from_integer(num);
    if scale >= 0 {
        r *= Rational::from_integer(num::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Smallest `k >= 0` with `base^k >= x` (up to the backend tolerance).
pub fn ceil_log<S: Scalar>(base: &S, x: &S) -> u64 {
    assert!(*base > S::one(), "log base must exceed 1");
    let mut k = 0u64;
    let mut p = S::one();
    let target = x.clone() - S::tolerance() * x.abs();
    while p < target {
        p = p * base.clone();
        k += 1;
    }
    k
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}
