//! Exact scalars: rationals, quadratic extensions ℚ(√d), rational-endpoint
//! intervals, and precision-indexed oracles for computable reals.

mod interval;
mod oracle;
mod quadext;
mod rational;

use num_bigint::BigUint;
use thiserror::Error;

pub use interval::{interval_op, ArithOp, DyadicInterval};
pub use oracle::{oracle_from_rational, oracle_perturbed, RealOracle, SignPattern};
pub use quadext::{is_square_free, quadext_sign, QuadExt};
pub use rational::{rat_normalize, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("divisor interval contains zero; precision refinement required")]
    RefinementRequired,
    #[error("interval endpoints out of order: [{lo}, {hi}]")]
    InvertedInterval { lo: Box<Rational>, hi: Box<Rational> },
    #[error("arithmetic across different radicands √{left} and √{right}")]
    MixedRadicand { left: BigUint, right: BigUint },
    #[error("square root of negative rational {0}")]
    NegativeRadicand(Box<Rational>),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// Ordered field operations shared by [`Rational`] and [`QuadExt`], enough
/// for exact Gaussian elimination and certificate checks.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self, NumberError>;
    fn neg(&self) -> Self;
    fn signum(&self) -> i8;

    fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    fn abs(&self) -> Self {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Result<Self, NumberError> {
        self.checked_div(rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn signum(&self) -> i8 {
        Rational::signum(self)
    }
}

// QuadExt operations panic on mixed radicands; the solvers only ever combine
// values over one radicand.
impl Scalar for QuadExt {
    fn zero() -> Self {
        QuadExt::zero()
    }
    fn one() -> Self {
        QuadExt::one()
    }
    fn from_rational(r: &Rational) -> Self {
        QuadExt::rational(r.clone())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Result<Self, NumberError> {
        self.try_div(rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn signum(&self) -> i8 {
        QuadExt::signum(self)
    }
}
