use std::fmt;

use serde::{Deserialize, Serialize};

use super::{NumberError, Rational};

/// Closed interval `[lo, hi]` with exact rational endpoints.
///
/// Endpoints are exact, so every operation returns the true image hull of
/// its operands with no outward rounding step.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicInterval {
    lo: Rational,
    hi: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl DyadicInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, NumberError> {
        if lo > hi {
            return Err(NumberError::InvertedInterval { lo: Box::new(lo), hi: Box::new(hi) });
        }
        Ok(DyadicInterval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        DyadicInterval { lo: x.clone(), hi: x }
    }

    /// `[center − radius, center + radius]`; `radius` must be non-negative.
    pub fn ball(center: &Rational, radius: &Rational) -> Self {
        debug_assert!(radius.signum() >= 0);
        DyadicInterval { lo: center - radius, hi: center + radius }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) * Rational::frac(1, 2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn encloses(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn inflate(&self, r: &Rational) -> Self {
        DyadicInterval { lo: &self.lo - r, hi: &self.hi + r }
    }

    pub fn hull(&self, other: &DyadicInterval) -> Self {
        DyadicInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn add(&self, other: &DyadicInterval) -> Self {
        DyadicInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &DyadicInterval) -> Self {
        DyadicInterval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn neg(&self) -> Self {
        DyadicInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, other: &DyadicInterval) -> Self {
        if self.is_point() && other.is_point() {
            return DyadicInterval::point(&self.lo * &other.lo);
        }
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().expect("non-empty").clone();
        let hi = products.iter().max().expect("non-empty").clone();
        DyadicInterval { lo, hi }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.signum() >= 0 {
            DyadicInterval { lo: &self.lo * c, hi: &self.hi * c }
        } else {
            DyadicInterval { lo: &self.hi * c, hi: &self.lo * c }
        }
    }

    /// Fails when the divisor contains zero: the caller should refine its
    /// inputs and retry.
    pub fn div(&self, other: &DyadicInterval) -> Result<Self, NumberError> {
        if other.contains_zero() {
            return Err(NumberError::RefinementRequired);
        }
        let inv = DyadicInterval { lo: other.hi.recip()?, hi: other.lo.recip()? };
        Ok(self.mul(&inv))
    }

    /// Image of `max(0, ·)`.
    pub fn relu(&self) -> Self {
        DyadicInterval {
            lo: self.lo.clone().max(Rational::zero()),
            hi: self.hi.clone().max(Rational::zero()),
        }
    }

    /// Image of `x ↦ x²`.
    pub fn square(&self) -> Self {
        let a = self.lo.square();
        let b = self.hi.square();
        if self.contains_zero() {
            DyadicInterval { lo: Rational::zero(), hi: a.max(b) }
        } else {
            DyadicInterval { lo: a.clone().min(b.clone()), hi: a.max(b) }
        }
    }

    /// Image of `x ↦ |x|`.
    pub fn abs(&self) -> Self {
        if self.contains_zero() {
            DyadicInterval { lo: Rational::zero(), hi: self.lo.abs().max(self.hi.abs()) }
        } else if self.lo.signum() > 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// Splits at the midpoint.
    pub fn bisect(&self) -> (Self, Self) {
        let m = self.midpoint();
        (
            DyadicInterval { lo: self.lo.clone(), hi: m.clone() },
            DyadicInterval { lo: m, hi: self.hi.clone() },
        )
    }
}

/// Applies one arithmetic operation to two intervals.
pub fn interval_op(
    op: ArithOp,
    a: &DyadicInterval,
    b: &DyadicInterval,
) -> Result<DyadicInterval, NumberError> {
    match op {
        ArithOp::Add => Ok(a.add(b)),
        ArithOp::Sub => Ok(a.sub(b)),
        ArithOp::Mul => Ok(a.mul(b)),
        ArithOp::Div => a.div(b),
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
