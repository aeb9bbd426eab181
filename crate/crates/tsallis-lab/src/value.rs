//! Exact-or-approximate scalar values, the entropy parameter alpha, and
//! extended-precision powers and logarithms.
//!
//! The exactness boundary: arithmetic stays in exact rationals whenever the
//! operands allow it (in particular for positive integer alpha); everything
//! else goes through extended-precision binary floats of configurable
//! precision (default 128 bits) and is rounded to an `f64` witness value.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::simplex::{parse_rational, Rational};

/// Default working precision for inexact arithmetic, in bits.
pub const DEFAULT_PRECISION_BITS: usize = 128;

/// Working precision for inexact arithmetic, passed explicitly everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision(pub usize);

impl Default for Precision {
    fn default() -> Self {
        Precision(DEFAULT_PRECISION_BITS)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValueError {
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(String),
    #[error("alpha = 1 is the Shannon branch; this operation requires alpha != 1")]
    AlphaIsOne,
    #[error("cannot parse alpha from {0:?}")]
    ParseAlpha(String),
}

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    // astro-float's cache of computed constants (ln 2, pi, ...); per-thread,
    // so concurrent evaluation stays safe and deterministic
    static CONSTS: std::cell::RefCell<Consts> =
        std::cell::RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

fn bigint_to_float(x: &BigInt) -> BigFloat {
    let (sign, digits) = x.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::new(64);
    }
    let s = match sign {
        num_bigint::Sign::Minus => Sign::Neg,
        _ => Sign::Pos,
    };
    // words are little-endian; the value is 0.m * 2^e, so an integer needs
    // e = 64 * number_of_words
    BigFloat::from_words(&digits, s, (64 * digits.len()) as i32)
}

/// Converts a rational to a `BigFloat` at precision `p` bits.
pub fn rational_to_big_float(r: &Rational, p: usize) -> BigFloat {
    let num = bigint_to_float(r.numer());
    let den = bigint_to_float(r.denom());
    num.div(&den, p, RM)
}

/// Rounds a `BigFloat` to the nearest `f64`.
pub fn big_float_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _n, sign, e, _inexact)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    // mantissa words are little-endian with the value 0.m * 2^e
    let mut acc = 0.0f64;
    let len = words.len();
    for (i, &w) in words.iter().enumerate().rev().take(2) {
        let shift = e as i64 - 64 * (len - i) as i64;
        acc += (w as f64) * 2.0f64.powi(shift as i32);
    }
    if sign == Sign::Neg {
        acc = -acc;
    }
    acc
}

/// Accurate rational-to-f64 conversion (through a 128-bit intermediate).
pub fn rational_to_f64(r: &Rational) -> f64 {
    if r.is_integer() {
        if let Some(v) = r.numer().to_f64() {
            return v;
        }
    }
    big_float_to_f64(&rational_to_big_float(r, 128))
}

/// Exact integer power of a rational (negative exponents need nonzero base).
pub fn pow_int(base: &Rational, exp: i64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    let positive = base.pow(exp.unsigned_abs() as u32 as i32);
    if exp > 0 {
        positive
    } else {
        positive.recip()
    }
}

/// A scalar that is exact whenever possible. When `exact` is present,
/// `approx` is its rounding; arithmetic drops exactness as soon as an
/// inexact operand enters.
#[derive(Clone, Debug)]
pub struct EntropyValue {
    exact: Option<Rational>,
    approx: f64,
}

impl EntropyValue {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        let approx = rational_to_f64(&r);
        Self {
            exact: Some(r),
            approx,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Self {
            exact: None,
            approx: x,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(r) => r.is_zero(),
            None => self.approx == 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            exact: self.exact.as_ref().map(|r| r.abs()),
            approx: self.approx.abs(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            exact: self.exact.as_ref().map(|r| r * c),
            approx: self.approx * rational_to_f64(c),
        }
    }

    pub fn div_rational(&self, c: &Rational) -> Self {
        Self {
            exact: self.exact.as_ref().map(|r| r / c),
            approx: self.approx / rational_to_f64(c),
        }
    }

    fn combine(&self, other: &Self, f64_op: impl Fn(f64, f64) -> f64, exact_op: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Self::from_rational(exact_op(a, b)),
            _ => Self::from_f64(f64_op(self.approx, other.approx)),
        }
    }
}

impl Add for &EntropyValue {
    type Output = EntropyValue;
    fn add(self, rhs: Self) -> EntropyValue {
        self.combine(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for &EntropyValue {
    type Output = EntropyValue;
    fn sub(self, rhs: Self) -> EntropyValue {
        self.combine(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for &EntropyValue {
    type Output = EntropyValue;
    fn mul(self, rhs: Self) -> EntropyValue {
        self.combine(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl Neg for &EntropyValue {
    type Output = EntropyValue;
    fn neg(self) -> EntropyValue {
        EntropyValue {
            exact: self.exact.as_ref().map(|r| -r),
            approx: -self.approx,
        }
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "{r}"),
            // 15 significant digits, '~' marks an inexact value
            None => write!(f, "~{:.14e}", self.approx),
        }
    }
}

impl Serialize for EntropyValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("EntropyValue", 2)?;
        s.serialize_field("decimal", &format!("{:.14e}", self.approx))?;
        s.serialize_field("exact", &self.exact.as_ref().map(|r| r.to_string()))?;
        s.end()
    }
}

/// The entropy parameter alpha > 0, carried exactly when possible.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaValue {
    Exact(Rational),
    Approx(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Alpha {
    value: AlphaValue,
}

impl Alpha {
    pub fn from_rational(r: Rational) -> Result<Self, ValueError> {
        if !r.is_positive() {
            return Err(ValueError::NonPositiveAlpha(r.to_string()));
        }
        Ok(Self {
            value: AlphaValue::Exact(r),
        })
    }

    pub fn from_u64(n: u64) -> Self {
        Self::from_rational(Rational::from(BigInt::from(n))).expect("positive integer")
    }

    pub fn from_f64(x: f64) -> Result<Self, ValueError> {
        if !(x > 0.0) {
            return Err(ValueError::NonPositiveAlpha(x.to_string()));
        }
        Ok(Self {
            value: AlphaValue::Approx(x),
        })
    }

    /// Parses `2`, `3/2`, or `0.5` (exact), falling back to float syntax.
    pub fn parse(s: &str) -> Result<Self, ValueError> {
        if let Ok(r) = parse_rational(s) {
            return Self::from_rational(r);
        }
        match s.trim().parse::<f64>() {
            Ok(x) => Self::from_f64(x),
            Err(_) => Err(ValueError::ParseAlpha(s.to_string())),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.value, AlphaValue::Exact(_))
    }

    pub fn exact(&self) -> Option<&Rational> {
        match &self.value {
            AlphaValue::Exact(r) => Some(r),
            AlphaValue::Approx(_) => None,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.value {
            AlphaValue::Exact(r) => r.is_one(),
            AlphaValue::Approx(x) => *x == 1.0,
        }
    }

    /// `Some(k)` iff alpha is exactly the positive integer k.
    pub fn as_positive_integer(&self) -> Option<u64> {
        match &self.value {
            AlphaValue::Exact(r) if r.is_integer() => r.numer().to_u64(),
            _ => None,
        }
    }

    pub fn approx(&self) -> f64 {
        match &self.value {
            AlphaValue::Exact(r) => rational_to_f64(r),
            AlphaValue::Approx(x) => *x,
        }
    }

    fn to_big_float(&self, p: usize) -> BigFloat {
        match &self.value {
            AlphaValue::Exact(r) => rational_to_big_float(r, p),
            AlphaValue::Approx(x) => BigFloat::from_f64(*x, p),
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            AlphaValue::Exact(r) => write!(f, "{r}"),
            AlphaValue::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// p^alpha for p >= 0, with 0^alpha = 0 for every alpha > 0.
///
/// Exact when alpha is a positive integer or p is 0 or 1; otherwise an
/// extended-precision computation rounded to f64.
pub fn pow_alpha(p: &Rational, alpha: &Alpha, prec: Precision) -> EntropyValue {
    assert!(!p.is_negative(), "pow_alpha needs p >= 0, got {p}");
    if p.is_zero() {
        return EntropyValue::zero();
    }
    if p.is_one() {
        return EntropyValue::from_rational(Rational::one());
    }
    if let Some(k) = alpha.as_positive_integer() {
        return EntropyValue::from_rational(pow_int(p, k as i64));
    }
    let base = rational_to_big_float(p, prec.0);
    let a = alpha.to_big_float(prec.0);
    let r = with_consts(|cc| base.pow(&a, prec.0, RM, cc));
    EntropyValue::from_f64(big_float_to_f64(&r))
}

/// 2^(1-alpha), exact for positive integer alpha.
pub fn two_pow_one_minus_alpha(alpha: &Alpha, prec: Precision) -> EntropyValue {
    if let Some(k) = alpha.as_positive_integer() {
        let two = Rational::from(BigInt::from(2));
        return EntropyValue::from_rational(pow_int(&two, 1 - k as i64));
    }
    let two = BigFloat::from_i8(2, prec.0);
    let one = BigFloat::from_i8(1, prec.0);
    let e = one.sub(&alpha.to_big_float(prec.0), prec.0, RM);
    let r = with_consts(|cc| two.pow(&e, prec.0, RM, cc));
    EntropyValue::from_f64(big_float_to_f64(&r))
}

/// base^exp for a positive rational base and arbitrary rational exponent;
/// exact when the exponent is an integer.
pub fn pow_exp_rational(base: &Rational, exp: &Rational, prec: Precision) -> EntropyValue {
    assert!(base.is_positive(), "pow_exp_rational needs base > 0, got {base}");
    if exp.is_integer() {
        if let Some(k) = exp.numer().to_i64() {
            return EntropyValue::from_rational(pow_int(base, k));
        }
    }
    let b = rational_to_big_float(base, prec.0);
    let e = rational_to_big_float(exp, prec.0);
    let r = with_consts(|cc| b.pow(&e, prec.0, RM, cc));
    EntropyValue::from_f64(big_float_to_f64(&r))
}

/// base^exp for a positive rational base and float exponent.
pub fn pow_exp_f64(base: &Rational, exp: f64, prec: Precision) -> EntropyValue {
    assert!(base.is_positive(), "pow_exp_f64 needs base > 0, got {base}");
    let b = rational_to_big_float(base, prec.0);
    let e = BigFloat::from_f64(exp, prec.0);
    let r = with_consts(|cc| b.pow(&e, prec.0, RM, cc));
    EntropyValue::from_f64(big_float_to_f64(&r))
}

/// Natural logarithm of a positive rational, extended precision inside.
pub fn ln_rational(p: &Rational, prec: Precision) -> f64 {
    assert!(p.is_positive(), "ln needs p > 0, got {p}");
    let x = rational_to_big_float(p, prec.0);
    with_consts(|cc| big_float_to_f64(&x.ln(prec.0, RM, cc)))
}

/// Base-2 logarithm of a positive rational, extended precision inside.
pub fn log2_rational(p: &Rational, prec: Precision) -> f64 {
    assert!(p.is_positive(), "log2 needs p > 0, got {p}");
    let x = rational_to_big_float(p, prec.0);
    with_consts(|cc| big_float_to_f64(&x.log2(prec.0, RM, cc)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn rational_to_f64_is_accurate() {
        assert_eq!(rational_to_f64(&r("1/2")), 0.5);
        assert_eq!(rational_to_f64(&r("1/3")), 1.0 / 3.0);
        assert_eq!(rational_to_f64(&r("-7/8")), -0.875);
        assert_eq!(rational_to_f64(&r("0")), 0.0);
    }

    #[test]
    fn pow_alpha_integer_is_exact() {
        let v = pow_alpha(&r("1/2"), &Alpha::from_u64(3), Precision::default());
        assert_eq!(v.exact(), Some(&r("1/8")));
    }

    #[test]
    fn pow_alpha_zero_convention() {
        let half = Alpha::parse("1/2").unwrap();
        let v = pow_alpha(&r("0"), &half, Precision::default());
        assert_eq!(v.exact(), Some(&r("0")));
    }

    #[test]
    fn pow_alpha_sqrt_matches_oracle() {
        let half = Alpha::parse("1/2").unwrap();
        let v = pow_alpha(&r("1/2"), &half, Precision::default());
        assert!(!v.is_exact());
        assert!((v.approx() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn two_pow_one_minus_alpha_cases() {
        assert_eq!(
            two_pow_one_minus_alpha(&Alpha::from_u64(3), Precision::default()).exact(),
            Some(&r("1/4"))
        );
        let half = Alpha::parse("1/2").unwrap();
        let v = two_pow_one_minus_alpha(&half, Precision::default());
        assert!((v.approx() - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ln_and_log2() {
        assert!((ln_rational(&r("2"), Precision::default()) - std::f64::consts::LN_2).abs() < 1e-16);
        assert!((log2_rational(&r("8"), Precision::default()) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_parsing_and_flags() {
        assert_eq!(Alpha::parse("2").unwrap().as_positive_integer(), Some(2));
        assert_eq!(Alpha::parse("3/2").unwrap().as_positive_integer(), None);
        assert!(Alpha::parse("1").unwrap().is_one());
        assert!(Alpha::parse("0").is_err());
        assert!(Alpha::parse("-2").is_err());
        assert_eq!(Alpha::parse("0.5").unwrap().exact(), Some(&r("1/2")));
    }

    #[test]
    fn value_arithmetic_tracks_exactness() {
        let a = EntropyValue::from_rational(r("1/2"));
        let b = EntropyValue::from_rational(r("1/3"));
        assert_eq!((&a + &b).exact(), Some(&r("5/6")));
        let c = EntropyValue::from_f64(0.1);
        assert!(!(&a + &c).is_exact());
        assert_eq!((-&a).exact(), Some(&r("-1/2")));
    }

    #[test]
    fn display_marks_exactness() {
        assert_eq!(EntropyValue::from_rational(r("5/8")).to_string(), "5/8");
        assert!(EntropyValue::from_f64(0.5).to_string().starts_with('~'));
    }
}
