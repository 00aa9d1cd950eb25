//! Exact rational scalars and plane points.

use alloc::string::String;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// An exact arbitrary-precision rational number, always in lowest terms
/// with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::Parse(String::from("zero denominator")));
        }
        Ok(Scalar(BigRational::new(num, den)))
    }

    /// The exact value of a finite binary float.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Scalar)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    /// `self / 2^k`.
    pub fn halved(&self, k: u32) -> Self {
        let den = BigInt::one() << k as usize;
        Scalar(&self.0 / BigRational::from_integer(den))
    }

    pub fn midpoint(a: &Scalar, b: &Scalar) -> Self {
        (a + b).halved(1)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Sign as -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn min_of<'a>(a: &'a Scalar, b: &'a Scalar) -> &'a Scalar {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max_of<'a>(a: &'a Scalar, b: &'a Scalar) -> &'a Scalar {
        if a >= b {
            a
        } else {
            b
        }
    }

    /// Parses `"p/q"`, an integer, or a decimal literal such as `"-1.25e-3"`.
    /// Decimal literals are converted exactly from their text.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let s = text.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num = parse_int(p.trim())?;
            let den = parse_int(q.trim())?;
            return Scalar::from_bigints(num, den);
        }
        parse_decimal(s)
    }

    /// True when `text` is a literal that is not a plain integer or `p/q`.
    pub fn is_decimal_literal(text: &str) -> bool {
        let s = text.trim();
        !s.contains('/') && s.contains(['.', 'e', 'E'])
    }
}

fn parse_int(s: &str) -> Result<BigInt, Error> {
    BigInt::from_str(s).map_err(|_| Error::Parse(alloc::format!("invalid integer {s:?}")))
}

fn parse_decimal(s: &str) -> Result<Scalar, Error> {
    let bad = || Error::Parse(alloc::format!("invalid number {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut all = String::from(int_part);
    all.push_str(frac_part);
    let mut num = BigInt::from_str(&all).map_err(|_| bad())?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(Scalar(value))
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Scalar::parse(s)
    }
}

/// Always `p/q`, including integers (`1/1`).
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

/// Number types the verifier and oracles can run on: exact [`Scalar`] or `f64`.
pub trait Coord: Clone + PartialOrd + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;

    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            self.neg()
        } else {
            self.clone()
        }
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

impl Coord for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn to_f64(&self) -> f64 {
        Scalar::to_f64(self)
    }
}

impl Coord for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// A point in the plane.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Point<T = Scalar> {
    pub x: T,
    pub y: T,
}

impl<T> Point<T> {
    pub const fn new(x: T, y: T) -> Self {
        Point { x, y }
    }
}

impl<T: Coord> Point<T> {
    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    pub fn unit() -> Self {
        Point::new(T::one(), T::one())
    }

    pub fn to_f64(&self) -> Point<f64> {
        Point::new(self.x.to_f64(), self.y.to_f64())
    }

    pub fn swapped(&self) -> Self {
        Point::new(self.y.clone(), self.x.clone())
    }
}

impl Point<Scalar> {
    pub fn ratio(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Point::new(Scalar::ratio(xn, xd), Scalar::ratio(yn, yd))
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Scalar::from(x), Scalar::from(y))
    }
}

impl<T: fmt::Debug> fmt::Debug for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.x, self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn lowest_terms_and_sign() {
        let s = Scalar::ratio(6, -8);
        assert_eq!(s.to_string(), "-3/4");
        assert_eq!(Scalar::from(2).to_string(), "2/1");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Scalar::parse("3/6").unwrap(), Scalar::ratio(1, 2));
        assert_eq!(Scalar::parse("0.125").unwrap(), Scalar::ratio(1, 8));
        assert_eq!(Scalar::parse("-1.5e-1").unwrap(), Scalar::ratio(-3, 20));
        assert_eq!(Scalar::parse("2E2").unwrap(), Scalar::from(200));
        assert_eq!(Scalar::parse(".5").unwrap(), Scalar::ratio(1, 2));
        assert!(Scalar::parse("1/0").is_err());
        assert!(Scalar::parse("abc").is_err());
        assert!(Scalar::parse("").is_err());
        assert!(Scalar::is_decimal_literal("0.1"));
        assert!(!Scalar::is_decimal_literal("1/10"));
        assert!(!Scalar::is_decimal_literal("7"));
    }

    #[test]
    fn arithmetic_is_exact() {
        let third = Scalar::ratio(1, 3);
        let sum = &third + &third + &third;
        assert_eq!(sum, Scalar::one());
        assert_eq!(Scalar::one().halved(3), Scalar::ratio(1, 8));
        assert_eq!(Scalar::ratio(-2, 7).signum(), -1);
    }
}
