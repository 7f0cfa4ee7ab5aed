use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DyadicInterval, Rational};

/// Deterministic sign sequence `σ_k ∈ {−1, 0, +1}` used to build alternative
/// representations of the same real number.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum SignPattern {
    Zero,
    /// Same sign at every precision.
    Constant(i8),
    /// `first, −first, first, …`
    Alternating(i8),
    /// Repeats the given signs.
    Cycle(Vec<i8>),
    /// Pseudo-random signs derived from a seed.
    Seeded(u64),
}

impl SignPattern {
    pub fn sign(&self, k: u32) -> i8 {
        match self {
            SignPattern::Zero => 0,
            SignPattern::Constant(s) => s.signum(),
            SignPattern::Alternating(s) => {
                if k.is_multiple_of(2) {
                    s.signum()
                } else {
                    -s.signum()
                }
            }
            SignPattern::Cycle(signs) if signs.is_empty() => 0,
            SignPattern::Cycle(signs) => signs[k as usize % signs.len()].signum(),
            SignPattern::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(k as u64);
                rng.gen_range(-1i8..=1)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SignPattern::Zero => true,
            SignPattern::Constant(s) | SignPattern::Alternating(s) => *s == 0,
            SignPattern::Cycle(signs) => signs.iter().all(|s| *s == 0),
            SignPattern::Seeded(_) => false,
        }
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignPattern::Zero => write!(f, "zero"),
            SignPattern::Constant(s) => write!(f, "constant({s:+})"),
            SignPattern::Alternating(s) => write!(f, "alternating({s:+})"),
            SignPattern::Cycle(signs) => write!(f, "cycle({signs:?})"),
            SignPattern::Seeded(seed) => write!(f, "seeded({seed})"),
        }
    }
}

type QueryFn = dyn Fn(u32) -> Rational + Send + Sync;

/// A representation of a real number `x`: a pure program mapping a precision
/// index `k` to a rational `r_k` with `|r_k − x| ≤ 2^{-k}`.
///
/// Oracles built from a rational with no perturbation are flagged exact; their
/// enclosures are degenerate points.
#[derive(Clone)]
pub struct RealOracle {
    query: Arc<QueryFn>,
    exact: bool,
    label: Arc<str>,
}

impl RealOracle {
    /// Wraps an arbitrary approximation program. The caller vouches for the
    /// `2^{-k}` error bound.
    pub fn from_fn(label: impl Into<String>, f: impl Fn(u32) -> Rational + Send + Sync + 'static) -> Self {
        RealOracle { query: Arc::new(f), exact: false, label: Arc::from(label.into()) }
    }

    /// Constant representation `r_k = q`.
    pub fn from_rational(q: Rational) -> Self {
        let label = q.to_string();
        RealOracle { query: Arc::new(move |_| q.clone()), exact: true, label: Arc::from(label) }
    }

    /// `r_k = q + σ_k·2^{-(k+1)}`. A zero pattern yields the constant representation.
    pub fn perturbed(q: Rational, pattern: SignPattern) -> Self {
        if pattern.is_zero() {
            return RealOracle::from_rational(q);
        }
        let label = format!("{q}~{pattern}");
        let query = move |k: u32| {
            let s = pattern.sign(k);
            let step = Rational::pow2_neg(k + 1);
            match s {
                1 => &q + &step,
                -1 => &q - &step,
                _ => q.clone(),
            }
        };
        RealOracle { query: Arc::new(query), exact: false, label: Arc::from(label) }
    }

    pub fn query(&self, k: u32) -> Rational {
        (self.query)(k)
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Interval guaranteed to contain the represented real, built from the
    /// query at precision `k`.
    pub fn enclosure(&self, k: u32) -> DyadicInterval {
        let q = self.query(k);
        if self.exact {
            DyadicInterval::point(q)
        } else {
            DyadicInterval::ball(&q, &Rational::pow2_neg(k))
        }
    }
}

impl fmt::Debug for RealOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealOracle").field("label", &self.label).field("exact", &self.exact).finish()
    }
}

pub fn oracle_from_rational(q: Rational) -> RealOracle {
    RealOracle::from_rational(q)
}

pub fn oracle_perturbed(q: Rational, pattern: SignPattern) -> RealOracle {
    RealOracle::perturbed(q, pattern)
}
