use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::instance::{check_positive, check_shape, norm1, norm_sq, residual, Matrix};
use super::kkt::kkt_check_lasso2;
use super::linalg::solve_many;
use super::{Certificate, InvProbError, SolveResult};
use crate::number::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum PathEvent {
    Join { index: usize, sign: i8 },
    Leave { index: usize },
}

impl PathEvent {
    pub fn index(&self) -> usize {
        match self {
            PathEvent::Join { index, .. } | PathEvent::Leave { index } => *index,
        }
    }

    fn is_leave(&self) -> bool {
        matches!(self, PathEvent::Leave { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub lambda: Rational,
    #[serde(flatten)]
    pub event: PathEvent,
}

/// One linear piece of the regularization path: on `[lo, hi]` the minimizer
/// is `x_S(λ) = u − λ·v` on `support` and zero elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSegment {
    pub hi: Rational,
    pub lo: Rational,
    pub support: Vec<usize>,
    pub signs: Vec<i8>,
    pub u: Vec<Rational>,
    pub v: Vec<Rational>,
}

impl PathSegment {
    pub fn x_at(&self, lambda: &Rational, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (k, &j) in self.support.iter().enumerate() {
            x[j] = &self.u[k] - lambda * &self.v[k];
        }
        x
    }

    /// `(p, q)` with `Ax(λ) − y = p + λ·q` on this piece.
    pub fn residual_line(&self, a: &Matrix, y: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let n = a.cols();
        let mut u = vec![Rational::zero(); n];
        let mut v = vec![Rational::zero(); n];
        for (k, &j) in self.support.iter().enumerate() {
            u[j] = self.u[k].clone();
            v[j] = -&self.v[k];
        }
        (residual(a, &u, y), a.mul_vec(&v))
    }
}

/// Piecewise-linear lasso² path from `λ_max = ‖2Aᵀy‖∞` down to `stop`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoPath {
    pub lambda_max: Rational,
    pub segments: Vec<PathSegment>,
    pub breakpoints: Vec<Breakpoint>,
}

impl LassoPath {
    /// Minimizer at `lambda ≥ stop`.
    pub fn minimizer_at(&self, lambda: &Rational, n: usize) -> Vec<Rational> {
        self.segments
            .iter()
            .find(|s| &s.lo <= lambda && lambda <= &s.hi)
            .map_or_else(|| vec![Rational::zero(); n], |s| s.x_at(lambda, n))
    }
}

pub fn default_max_events(n: usize) -> usize {
    64 * (n + 1)
}

struct Candidate {
    lambda: Rational,
    event: PathEvent,
}

impl Candidate {
    /// Earlier on the (descending) path first, then leaves, then lowest index.
    fn precedes(&self, other: &Candidate) -> bool {
        match self.lambda.cmp(&other.lambda) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match (self.event.is_leave(), other.event.is_leave()) {
                (true, false) => true,
                (false, true) => false,
                _ => self.event.index() < other.event.index(),
            },
        }
    }
}

/// Follows the homotopy with field operations and comparisons only.
///
/// Ties between simultaneous events are broken by processing one event per
/// step, leaves before joins and lower coordinate index first. A singular
/// active-set Gram matrix or more than `max_events` events yields
/// [`InvProbError::Degenerate`].
pub fn lasso_path(a: &Matrix, y: &[Rational], stop: &Rational, max_events: usize) -> Result<LassoPath, InvProbError> {
    let n = a.cols();
    let two = Rational::from_int(2);
    let c0: Vec<Rational> = a.tr_mul_vec(y).into_iter().map(|c| c * &two).collect();
    let lambda_max = c0.iter().map(Rational::abs).fold(Rational::zero(), Rational::max);
    let mut path = LassoPath { lambda_max: lambda_max.clone(), segments: Vec::new(), breakpoints: Vec::new() };
    if lambda_max.is_zero() || stop >= &lambda_max {
        return Ok(path);
    }
    let j0 = c0.iter().position(|c| c.abs() == lambda_max).expect("maximum attained");
    let mut active: Vec<(usize, i8)> = vec![(j0, c0[j0].signum())];
    let mut lam = lambda_max;
    let mut last = PathEvent::Join { index: j0, sign: c0[j0].signum() };
    path.breakpoints.push(Breakpoint { lambda: lam.clone(), event: last.clone() });

    for _ in 0..max_events {
        let support: Vec<usize> = active.iter().map(|&(j, _)| j).collect();
        let signs: Vec<i8> = active.iter().map(|&(_, s)| s).collect();
        let gram: Vec<Vec<Rational>> = support
            .iter()
            .map(|&i| support.iter().map(|&j| (0..a.rows()).map(|r| a.get(r, i) * a.get(r, j)).sum()).collect())
            .collect();
        let aty: Vec<Rational> = support.iter().map(|&j| a.col_dot(j, y)).collect();
        let half_s: Vec<Rational> = signs.iter().map(|&s| Rational::frac(s as i64, 2)).collect();
        let Some(mut sol) = solve_many(gram, &[aty, half_s]) else {
            return Err(InvProbError::Degenerate { reason: "singular active-set system".into(), support, lambda: Box::new(lam) });
        };
        let v = sol.pop().expect("two right-hand sides");
        let u = sol.pop().expect("two right-hand sides");
        let seg = PathSegment { hi: lam.clone(), lo: stop.clone(), support, signs, u, v };

        // c_j(λ) = α_j + λ β_j for the inactive coordinates
        let (p, q) = seg.residual_line(a, y);
        let mut best: Option<Candidate> = None;
        let mut offer = |cand: Candidate| {
            if cand.lambda > lam || cand.lambda <= *stop {
                return;
            }
            if best.as_ref().is_none_or(|b| cand.precedes(b)) {
                best = Some(cand);
            }
        };
        for j in 0..n {
            if seg.support.contains(&j) {
                continue;
            }
            let alpha = -(a.col_dot(j, &p) * &two);
            let beta = -(a.col_dot(j, &q) * &two);
            let one = Rational::one();
            for (sign, denom, numer) in [(1i8, &one - &beta, alpha.clone()), (-1i8, &one + &beta, -&alpha)] {
                if denom.signum() <= 0 {
                    continue;
                }
                let at = numer.checked_div(&denom).expect("positive denominator");
                if at == lam && last == (PathEvent::Leave { index: j }) {
                    continue;
                }
                offer(Candidate { lambda: at, event: PathEvent::Join { index: j, sign } });
            }
        }
        for (k, &j) in seg.support.iter().enumerate() {
            if seg.v[k].signum() * seg.signs[k] >= 0 {
                continue;
            }
            let at = seg.u[k].checked_div(&seg.v[k]).expect("nonzero slope");
            if at == lam && matches!(last, PathEvent::Join { index, .. } if index == j) {
                continue;
            }
            offer(Candidate { lambda: at, event: PathEvent::Leave { index: j } });
        }

        let Some(next) = best else {
            path.segments.push(seg);
            return Ok(path);
        };
        path.segments.push(PathSegment { lo: next.lambda.clone(), ..seg });
        match &next.event {
            PathEvent::Join { index, sign } => {
                let pos = active.partition_point(|&(j, _)| j < *index);
                active.insert(pos, (*index, *sign));
            }
            PathEvent::Leave { index } => active.retain(|&(j, _)| j != *index),
        }
        lam = next.lambda.clone();
        last = next.event.clone();
        path.breakpoints.push(Breakpoint { lambda: next.lambda, event: next.event });
    }
    Err(InvProbError::Degenerate {
        reason: format!("path did not terminate within {max_events} events"),
        support: active.iter().map(|&(j, _)| j).collect(),
        lambda: Box::new(lam),
    })
}

/// Exact minimizer of `λ‖x‖₁ + ‖Ax − y‖₂²` at the endpoint of the homotopy.
pub fn solve_lasso2_homotopy(a: &Matrix, y: &[Rational], lambda: &Rational) -> Result<SolveResult<Rational>, InvProbError> {
    check_shape(a, y)?;
    check_positive("lambda", lambda)?;
    let path = lasso_path(a, y, lambda, default_max_events(a.cols()))?;
    let x = path.minimizer_at(lambda, a.cols());
    let objective = lambda * norm1(&x) + norm_sq(&residual(a, &x, y));
    let verdict = kkt_check_lasso2(a, y, lambda, &x);
    Ok(SolveResult {
        minimizer: x,
        objective,
        certificate: Certificate::Kkt { lambda: lambda.clone(), verdict },
        breakpoints: path.breakpoints,
    })
}
