use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{DyadicInterval, NumberError, Rational};

/// Largest trial divisor used when stripping square factors from a radicand.
const SQUARE_FREE_TRIAL_LIMIT: u64 = 1 << 16;

/// Element `a + b·√d` of the quadratic field ℚ(√d).
///
/// Values with `b = 0` are stored with `d = 1`, so equality is structural.
/// Otherwise `d > 1` is not a perfect square and carries no square factor
/// below [`SQUARE_FREE_TRIAL_LIMIT`]².
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
    d: BigUint,
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational, d: impl Into<BigUint>) -> Result<Self, NumberError> {
        let d = d.into();
        if d.is_zero() {
            return Ok(QuadExt::rational(a));
        }
        let (outside, inside) = split_square_factor(&d);
        let b = b * Rational::from_int(BigInt::from(outside));
        if inside.is_one() {
            return Ok(QuadExt::rational(a + b));
        }
        Ok(QuadExt::normalized(a, b, inside))
    }

    fn normalized(a: Rational, b: Rational, d: BigUint) -> Self {
        if b.is_zero() {
            QuadExt { a, b, d: BigUint::one() }
        } else {
            QuadExt { a, b, d }
        }
    }

    /// Embeds a rational (`b = 0`).
    pub fn rational(a: Rational) -> Self {
        QuadExt { a, b: Rational::zero(), d: BigUint::one() }
    }

    /// `√q` for a non-negative rational `q`.
    pub fn sqrt_of(q: &Rational) -> Result<Self, NumberError> {
        if q.signum() < 0 {
            return Err(NumberError::NegativeRadicand(Box::new(q.clone())));
        }
        // √(p/r) = √(p·r) / r
        let pr = (q.numer() * q.denom()).to_biguint().expect("non-negative");
        let inv_r = Rational::new(1, q.denom().clone())?;
        QuadExt::new(Rational::zero(), inv_r, pr)
    }

    pub fn zero() -> Self {
        QuadExt::rational(Rational::zero())
    }

    pub fn one() -> Self {
        QuadExt::rational(Rational::one())
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn d(&self) -> &BigUint {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Shared radicand of two operands, or an error if both are irrational
    /// over different radicands.
    fn common_radicand(&self, other: &QuadExt) -> Result<BigUint, NumberError> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(BigUint::one()),
            (false, true) => Ok(self.d.clone()),
            (true, false) => Ok(other.d.clone()),
            (false, false) if self.d == other.d => Ok(self.d.clone()),
            _ => Err(NumberError::MixedRadicand {
                left: self.d.clone(),
                right: other.d.clone(),
            }),
        }
    }

    pub fn try_add(&self, other: &QuadExt) -> Result<Self, NumberError> {
        let d = self.common_radicand(other)?;
        Ok(QuadExt::normalized(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn try_sub(&self, other: &QuadExt) -> Result<Self, NumberError> {
        let d = self.common_radicand(other)?;
        Ok(QuadExt::normalized(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn try_mul(&self, other: &QuadExt) -> Result<Self, NumberError> {
        let d = self.common_radicand(other)?;
        let dr = Rational::from_int(BigInt::from(d.clone()));
        let a = &self.a * &other.a + &self.b * &other.b * &dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(QuadExt::normalized(a, b, d))
    }

    pub fn try_div(&self, other: &QuadExt) -> Result<Self, NumberError> {
        if other.is_zero() {
            return Err(NumberError::DivisionByZero);
        }
        let d = self.common_radicand(other)?;
        let dr = Rational::from_int(BigInt::from(d.clone()));
        // (a + b√d)(c − e√d) / (c² − e²d); the norm vanishes only at zero
        let norm = other.a.square() - other.b.square() * &dr;
        let conj = QuadExt::normalized(other.a.clone(), -&other.b, d);
        let num = self.try_mul(&conj)?;
        let inv = norm.recip()?;
        Ok(QuadExt::normalized(&num.a * &inv, &num.b * &inv, num.d))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadExt::normalized(&self.a * r, &self.b * r, self.d.clone())
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        QuadExt::normalized(&self.a + r, self.b.clone(), self.d.clone())
    }

    /// Exact sign of `a + b√d`.
    pub fn signum(&self) -> i8 {
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = self.a.square();
        let b2d = self.b.square() * Rational::from_int(BigInt::from(self.d.clone()));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Exact comparison, allowed across different radicands.
    pub fn cmp_exact(&self, other: &QuadExt) -> Ordering {
        if self.common_radicand(other).is_ok() {
            return self.try_sub(other).expect("common radicand").signum().cmp(&0);
        }
        // sign of L + R with L = (a1 − a2) + b1√d1 ∈ ℚ(√d1), R = −b2√d2
        let left = QuadExt::normalized(&self.a - &other.a, self.b.clone(), self.d.clone());
        let right_coeff = -&other.b;
        let sl = left.signum();
        let sr = right_coeff.signum();
        let s = if sl == 0 {
            sr
        } else if sr == 0 || sl == sr {
            sl
        } else {
            // opposite signs: compare L² with R² = b2²·d2
            let l2 = left.try_mul(&left).expect("same radicand");
            let r2 = right_coeff.square() * Rational::from_int(BigInt::from(other.d.clone()));
            match l2.add_rational(&-r2).signum() {
                1 => sl,
                -1 => sr,
                _ => 0,
            }
        };
        s.cmp(&0)
    }

    /// Rational within `2^{-k}` of the value.
    pub fn approx(&self, k: u32) -> Rational {
        self.enclosure(k).midpoint()
    }

    /// Rational interval of width at most `2^{-k}` containing the value.
    pub fn enclosure(&self, k: u32) -> DyadicInterval {
        if self.is_rational() {
            return DyadicInterval::point(self.a.clone());
        }
        let b_abs = self.b.abs();
        let b_bits = b_abs.ceil().bits() as u32;
        let s = k + b_bits + 1;
        let scaled = &self.d << (2 * s as usize);
        let r = scaled.sqrt();
        let pow = Rational::pow2_neg(s);
        let lo_root = Rational::from_int(BigInt::from(r.clone())) * &pow;
        let hi_root = Rational::from_int(BigInt::from(r + 1u32)) * &pow;
        let (lo, hi) = if self.b.signum() > 0 {
            (&self.a + &self.b * &lo_root, &self.a + &self.b * &hi_root)
        } else {
            (&self.a + &self.b * &hi_root, &self.a + &self.b * &lo_root)
        };
        DyadicInterval::new(lo, hi).expect("ordered by construction")
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return self.a.to_f64();
        }
        self.approx(64).to_f64()
    }
}

/// Writes `d = s²·r` with `r` free of small square factors; if the leftover
/// cofactor is itself a perfect square it is folded into `s`.
fn split_square_factor(d: &BigUint) -> (BigUint, BigUint) {
    let mut outside = BigUint::one();
    let mut rest = d.clone();
    let mut p = 2u64;
    while p <= SQUARE_FREE_TRIAL_LIMIT {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let p2 = &pb * &pb;
        while (&rest % &p2).is_zero() {
            rest /= &p2;
            outside *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        outside *= &root;
        rest = BigUint::one();
    }
    (outside, rest)
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + ({})·√{}", self.a, self.b, self.d)
        }
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt::rational(r)
    }
}

macro_rules! panicking_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a, 'b> $trait<&'b QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &'b QuadExt) -> QuadExt {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
    };
}

// The operator forms panic on mixed radicands or division by zero; the
// `try_*` methods report those as errors.
panicking_binop!(Add, add, try_add);
panicking_binop!(Sub, sub, try_sub);
panicking_binop!(Mul, mul, try_mul);
panicking_binop!(Div, div, try_div);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::normalized(-self.a, -self.b, self.d)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -self.clone()
    }
}

/// Exact sign of `v`: -1, 0 or +1.
pub fn quadext_sign(v: &QuadExt) -> i8 {
    v.signum()
}

#[derive(Serialize, Deserialize)]
struct QuadExtRepr {
    a: Rational,
    b: Rational,
    d: RadicandRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RadicandRepr {
    Small(u64),
    Big(String),
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let d = match self.d.to_u64() {
            Some(v) => RadicandRepr::Small(v),
            None => RadicandRepr::Big(self.d.to_string()),
        };
        QuadExtRepr { a: self.a.clone(), b: self.b.clone(), d }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = QuadExtRepr::deserialize(deserializer)?;
        let d = match repr.d {
            RadicandRepr::Small(v) => BigUint::from(v),
            RadicandRepr::Big(s) => s.parse().map_err(serde::de::Error::custom)?,
        };
        QuadExt::new(repr.a, repr.b, d).map_err(serde::de::Error::custom)
    }
}

/// True when `n` has no repeated prime factor (full trial division; test-sized inputs only).
pub fn is_square_free(n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    n != 0
}
