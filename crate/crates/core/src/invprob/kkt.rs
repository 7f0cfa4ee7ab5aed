use serde::{Deserialize, Serialize};

use super::instance::Matrix;
use crate::number::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KktVerdict {
    Valid,
    Invalid { index: usize, reason: String },
}

impl KktVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, KktVerdict::Valid)
    }
}

/// Exact optimality test for `λ‖x‖₁ + ‖Ax − y‖₂²` with `c = 2Aᵀ(y − Ax)`:
/// `c_i = λ·sign(x_i)` on the support and `|c_i| ≤ λ` off it.
///
/// Generic over the scalar field so that minimizers with quadratic-irrational
/// entries are checked in ℚ(√d).
pub fn kkt_check_lasso2<S: Scalar>(a: &Matrix, y: &[Rational], lambda: &S, x: &[S]) -> KktVerdict {
    if x.len() != a.cols() || y.len() != a.rows() {
        return KktVerdict::Invalid {
            index: 0,
            reason: format!("dimension mismatch: A is {}×{}, |x| = {}, |y| = {}", a.rows(), a.cols(), x.len(), y.len()),
        };
    }
    let two = S::from_rational(&Rational::from_int(2));
    let r: Vec<S> = (0..a.rows())
        .map(|i| {
            let ax = a.row(i).iter().zip(x).fold(S::zero(), |acc, (aij, xj)| acc.add(&S::from_rational(aij).mul(xj)));
            S::from_rational(&y[i]).sub(&ax)
        })
        .collect();
    for (j, xj) in x.iter().enumerate() {
        let c = (0..a.rows())
            .fold(S::zero(), |acc, i| acc.add(&S::from_rational(a.get(i, j)).mul(&r[i])))
            .mul(&two);
        match xj.signum() {
            0 => {
                if lambda.sub(&c.abs()).signum() < 0 {
                    return KktVerdict::Invalid { index: j, reason: format!("|c_{j}| = {:?} exceeds λ", c.abs()) };
                }
            }
            s => {
                let target = if s > 0 { lambda.clone() } else { lambda.neg() };
                if c != target {
                    return KktVerdict::Invalid {
                        index: j,
                        reason: format!("c_{j} = {c:?} differs from λ·sign(x_{j}) = {target:?}"),
                    };
                }
            }
        }
    }
    KktVerdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn soft_threshold_point_is_valid() {
        let a = Matrix::from_i64(&[&[1, 0]]);
        let x = [r(3, 4), r(0, 1)];
        assert!(kkt_check_lasso2(&a, &[r(1, 1)], &r(1, 2), &x).is_valid());
    }

    #[test]
    fn zero_is_valid_above_lambda_max() {
        let a = Matrix::from_i64(&[&[1, 2, -1]]);
        let y = [r(1, 1)];
        // ‖2Aᵀy‖∞ = 4
        assert!(kkt_check_lasso2(&a, &y, &r(4, 1), &vec![r(0, 1); 3]).is_valid());
        let v = kkt_check_lasso2(&a, &y, &r(7, 2), &vec![r(0, 1); 3]);
        assert!(matches!(v, KktVerdict::Invalid { index: 1, .. }));
    }

    #[test]
    fn least_squares_point_fails_for_large_lambda() {
        // x = (1, 0) fits y exactly, so c = 0 ≠ λ on the support
        let a = Matrix::from_i64(&[&[1, 0]]);
        let v = kkt_check_lasso2(&a, &[r(1, 1)], &r(3, 1), &[r(1, 1), r(0, 1)]);
        assert!(matches!(v, KktVerdict::Invalid { index: 0, .. }));
    }
}
