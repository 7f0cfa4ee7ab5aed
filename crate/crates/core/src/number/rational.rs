use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::NumberError;

/// Arbitrary-precision rational number, always held in canonical form
/// (positive denominator, numerator and denominator coprime).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `n/d` in canonical form.
    pub fn new(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self, NumberError> {
        let d = d.into();
        if d.is_zero() {
            return Err(NumberError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(n.into(), d)))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Shorthand for small literals; panics on a zero denominator.
    pub fn frac(n: i64, d: i64) -> Self {
        Self::new(n, d).expect("zero denominator in literal")
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `2^{-k}`.
    pub fn pow2_neg(k: u32) -> Self {
        Rational(BigRational::new(BigInt::one(), BigInt::one() << k as usize))
    }

    /// `2^{k}` for signed `k`.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Rational::from_int(BigInt::one() << k as usize)
        } else {
            Rational::pow2_neg((-k) as u32)
        }
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

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, NumberError> {
        if self.is_zero() {
            return Err(NumberError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self, NumberError> {
        if rhs.is_zero() {
            return Err(NumberError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn square(&self) -> Self {
        Rational(&self.0 * &self.0)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Floor as a big integer.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Nearest rational with denominator `2^k`, rounding to nearest (ties up).
    /// The result is within `2^{-(k+1)}` of `self`.
    pub fn round_dyadic(&self, k: u32) -> Self {
        let scale = BigInt::one() << k as usize;
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let n = (scaled + half).floor().to_integer();
        Rational(BigRational::new(n, scale))
    }

    /// Lossy conversion for reporting and plotting only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // huge numerator/denominator: fall back to bit-length scaling
            let n = self.0.numer();
            let d = self.0.denom();
            let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
            let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    /// Exact value of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }

    /// Tightest floats `lo ≤ self ≤ hi`.
    pub fn f64_bounds(&self) -> (f64, f64) {
        let v = self.to_f64();
        let Some(exact) = Rational::from_f64(v) else {
            return (f64::NEG_INFINITY, f64::INFINITY);
        };
        match exact.cmp(self) {
            std::cmp::Ordering::Equal => (v, v),
            std::cmp::Ordering::Less => (v, v.next_up()),
            std::cmp::Ordering::Greater => (v.next_down(), v),
        }
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = NumberError;

    /// Accepts `p/q`, plain integers and finite decimals such as `-0.125`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || NumberError::Parse(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Rational::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.trim_start().starts_with('-');
            let int_part: BigInt = match int {
                "" | "-" | "+" => BigInt::zero(),
                _ => int.parse().map_err(|_| bad())?,
            };
            let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let mag = int_part.abs() * &scale + frac_part;
            let n = if negative { -mag } else { mag };
            return Rational::new(n, scale);
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_int(n))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(i) => Ok(Rational::from_int(i)),
        }
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_int(v)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(&self.0 $op rhs.0)
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);
// Division panics on zero like the integer types; use `checked_div` when the
// divisor is data-dependent.
forward_binop!(Div, div, /);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Canonical `n/d`; fails on a zero denominator.
pub fn rat_normalize(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Rational, NumberError> {
    Rational::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_reduces_and_moves_sign() {
        let r = rat_normalize(2, 4).unwrap();
        assert_eq!(r.to_string(), "1/2");
        let r = rat_normalize(-3, -6).unwrap();
        assert_eq!(r.to_string(), "1/2");
        let r = rat_normalize(0, 7).unwrap();
        assert_eq!(r.to_string(), "0/1");
        let r = rat_normalize(3, -9).unwrap();
        assert_eq!(r.to_string(), "-1/3");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(rat_normalize(1, 0), Err(NumberError::ZeroDenominator));
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn parses_integers_fractions_and_decimals() {
        assert_eq!("7".parse::<Rational>().unwrap(), Rational::from_int(7));
        assert_eq!("-3/4".parse::<Rational>().unwrap(), Rational::frac(-3, 4));
        assert_eq!("-0.125".parse::<Rational>().unwrap(), Rational::frac(-1, 8));
        assert_eq!("2.5".parse::<Rational>().unwrap(), Rational::frac(5, 2));
        assert!("abc".parse::<Rational>().is_err());
        assert!("1.".parse::<Rational>().is_err());
    }

    #[test]
    fn serde_uses_canonical_strings() {
        let r = Rational::frac(6, -8);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "\"-3/4\"");
        let back: Rational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let from_int: Rational = serde_json::from_str("5").unwrap();
        assert_eq!(from_int, Rational::from_int(5));
    }

    #[test]
    fn dyadic_rounding_is_within_half_ulp() {
        let third = Rational::frac(1, 3);
        for k in 0..20 {
            let r = third.round_dyadic(k);
            assert!((&r - &third).abs() <= Rational::pow2_neg(k + 1));
        }
    }

    #[test]
    fn float_bounds_bracket() {
        for r in [Rational::frac(1, 3), Rational::frac(-2, 7), Rational::frac(3, 4), Rational::zero()] {
            let (lo, hi) = r.f64_bounds();
            assert!(Rational::from_f64(lo).unwrap() <= r && r <= Rational::from_f64(hi).unwrap());
            assert!(hi == lo || hi == lo.next_up());
        }
    }
}
