use super::instance::{Instance, Matrix, Param};
use crate::number::Rational;

/// Parameter value at which the BP minimizer switches support.
pub const FAMILY_THRESHOLD: (i64, i64) = (1, 1);
/// Constraint radius of the family.
pub const FAMILY_EPSILON: (i64, i64) = (1, 8);
/// Interval of `t` on which the family is analysed.
pub const FAMILY_PARAMETER_RANGE: ((i64, i64), (i64, i64)) = ((1, 2), (2, 1));

/// BP instance `A = [1  t]`, `y = (1)`, `ε = 1/8`.
///
/// For `t < 1` the unique minimizer is `(1 − ε, 0)`; for `t > 1` it is
/// `(0, (1 − ε)/t)`; at `t = 1` every convex combination is optimal and the
/// homotopy picks coordinate 0 (lowest index). Across the threshold the
/// minimizer jumps by at least `1 − ε` in max-norm on `[1/2, 2]`.
pub fn discontinuity_family(t: &Rational) -> Instance {
    let a = Matrix::from_rows(vec![vec![Rational::one(), t.clone()]]).expect("1×2");
    let eps = Rational::frac(FAMILY_EPSILON.0, FAMILY_EPSILON.1);
    Instance::new(a, vec![Rational::one()], Param::Epsilon(eps)).expect("valid shape")
}

/// Max-norm jump `c = 1 − ε` of the family's minimizer at the threshold.
pub fn family_jump_constant() -> Rational {
    Rational::one() - Rational::frac(FAMILY_EPSILON.0, FAMILY_EPSILON.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invprob::{kkt_check_lasso2, solve_bp, Certificate};
    use crate::number::QuadExt;

    fn solve(t: &Rational) -> Vec<QuadExt> {
        let inst = discontinuity_family(t);
        solve_bp(&inst.a, &inst.y, inst.param.value()).unwrap().minimizer
    }

    #[test]
    fn supports_are_disjoint_across_threshold() {
        let below = solve(&Rational::frac(1023, 1024));
        let above = solve(&Rational::frac(1025, 1024));
        assert!(!below[0].is_zero() && below[1].is_zero());
        assert!(above[0].is_zero() && !above[1].is_zero());
    }

    #[test]
    fn threshold_tie_breaks_to_first_coordinate() {
        let t = Rational::one();
        let x = solve(&t);
        assert_eq!(x, vec![QuadExt::rational(Rational::frac(7, 8)), QuadExt::zero()]);
        // the other vertex is optimal as well: both pass the KKT system at λ = 2ε
        let inst = discontinuity_family(&t);
        let lambda = Rational::frac(1, 4);
        for cand in [[Rational::frac(7, 8), Rational::zero()], [Rational::zero(), Rational::frac(7, 8)]] {
            assert!(kkt_check_lasso2(&inst.a, &inst.y, &lambda, &cand).is_valid());
        }
    }

    #[test]
    fn jump_exceeds_constant_near_threshold() {
        let c = QuadExt::rational(family_jump_constant());
        for i in 1..=100i64 {
            let d = Rational::frac(1, 64 * i);
            let lo = solve(&(Rational::one() - &d));
            let hi = solve(&(Rational::one() + &d));
            let jump = lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| a.try_sub(b).unwrap().abs())
                .max_by(|a, b| a.cmp_exact(b))
                .unwrap();
            assert!(jump.cmp_exact(&c) != std::cmp::Ordering::Less, "i = {i}");
        }
    }

    #[test]
    fn certificates_hold_across_range() {
        for (n, d) in [(1, 2), (3, 4), (1, 1), (5, 4), (2, 1)] {
            let inst = discontinuity_family(&Rational::frac(n, d));
            let res = solve_bp(&inst.a, &inst.y, inst.param.value()).unwrap();
            assert!(matches!(res.certificate, Certificate::ActiveConstraint { .. }));
            assert!(res.certificate.is_valid());
        }
    }
}
