use std::cmp::Ordering;

use super::homotopy::{default_max_events, lasso_path};
use super::instance::{check_positive, check_shape, dot, norm_sq, Matrix};
use super::kkt::kkt_check_lasso2;
use super::{Certificate, InvProbError, SolveResult};
use crate::number::{QuadExt, Rational, Scalar};

/// One minimizer of `‖x‖₁` subject to `‖Ax − y‖₂ ≤ ε`.
///
/// Walks the lasso² path, on which the squared residual is a nondecreasing
/// piecewise quadratic in λ, and solves `‖r(λ)‖² = ε²` on the bracketing
/// piece. The root is a quadratic irrational, so the minimizer has entries
/// in ℚ(√d); its certificate is the λ-KKT system plus exact constraint
/// activity, both evaluated in ℚ(√d).
pub fn solve_bp(a: &Matrix, y: &[Rational], epsilon: &Rational) -> Result<SolveResult<QuadExt>, InvProbError> {
    check_shape(a, y)?;
    check_positive("epsilon", epsilon)?;
    let n = a.cols();
    let eps_sq = epsilon.square();
    let norm_y_sq = norm_sq(y);
    if norm_y_sq <= eps_sq {
        return Ok(SolveResult {
            minimizer: vec![QuadExt::zero(); n],
            objective: QuadExt::zero(),
            certificate: Certificate::FeasibleOrigin { norm_y_sq, epsilon_sq: eps_sq },
            breakpoints: Vec::new(),
        });
    }

    let path = lasso_path(a, y, &Rational::zero(), default_max_events(n))?;
    let mut min_residual_sq = norm_y_sq;
    for seg in &path.segments {
        let (p, q) = seg.residual_line(a, y);
        let qa = norm_sq(&q);
        let qb = dot(&p, &q) * Rational::from_int(2);
        let pp = norm_sq(&p);
        let at = |l: &Rational| &pp + &qb * l + &qa * l.square();
        min_residual_sq = at(&seg.lo);
        if min_residual_sq > eps_sq {
            continue;
        }
        let lambda = if at(&seg.hi) <= eps_sq {
            QuadExt::rational(seg.hi.clone())
        } else {
            // larger root of qa·λ² + qb·λ + (pp − ε²); qa > 0 since R varies
            let disc = qb.square() - Rational::from_int(4) * &qa * (&pp - &eps_sq);
            let two_a = &qa * Rational::from_int(2);
            QuadExt::sqrt_of(&disc)?
                .scale(&two_a.recip()?)
                .add_rational(&(-&qb / &two_a))
        };
        if lambda.cmp_exact(&QuadExt::rational(seg.lo.clone())) == Ordering::Less
            || lambda.cmp_exact(&QuadExt::rational(seg.hi.clone())) == Ordering::Greater
        {
            return Err(InvProbError::Degenerate {
                reason: "residual root outside its bracketing path segment".into(),
                support: seg.support.clone(),
                lambda: Box::new(seg.lo.clone()),
            });
        }
        let mut x = vec![QuadExt::zero(); n];
        for (k, &j) in seg.support.iter().enumerate() {
            x[j] = QuadExt::rational(seg.u[k].clone()).try_sub(&lambda.scale(&seg.v[k]))?;
        }
        let residual_sq = quad_residual_sq(a, y, &x);
        let verdict = kkt_check_lasso2(a, y, &lambda, &x);
        let objective = x.iter().fold(QuadExt::zero(), |acc, xi| Scalar::add(&acc, &xi.abs()));
        return Ok(SolveResult {
            minimizer: x,
            objective,
            certificate: Certificate::ActiveConstraint { lambda, residual_sq, epsilon_sq: eps_sq, verdict },
            breakpoints: path.breakpoints,
        });
    }
    Err(InvProbError::Infeasible { min_residual_sq: Box::new(min_residual_sq), epsilon_sq: Box::new(eps_sq) })
}

pub(crate) fn quad_residual_sq(a: &Matrix, y: &[Rational], x: &[QuadExt]) -> QuadExt {
    (0..a.rows()).fold(QuadExt::zero(), |acc, i| {
        let ax = a.row(i).iter().zip(x).fold(QuadExt::zero(), |s, (aij, xj)| Scalar::add(&s, &xj.scale(aij)));
        let ri = ax.add_rational(&-&y[i]);
        Scalar::add(&acc, &Scalar::mul(&ri, &ri))
    })
}
