use realgap_core::number::{Rational, RealOracle};

/// `atan(1/x)` truncated once the next alternating term drops to `2^{-bits}`,
/// so the truncation error is below `2^{-bits}`.
fn atan_inv(x: i64, bits: u32) -> Rational {
    let tol = Rational::pow2_neg(bits);
    let step = Rational::frac(1, x * x);
    let mut power = Rational::frac(1, x);
    let mut sum = Rational::zero();
    let mut j = 0i64;
    loop {
        let term = &power / &Rational::from_int(2 * j + 1);
        if term <= tol {
            return sum;
        }
        sum = if j % 2 == 0 { sum + term } else { sum - term };
        power = &power * &step;
        j += 1;
    }
}

/// π = 16·atan(1/5) − 4·atan(1/239), each series cut with enough slack that
/// the rounded dyadic answer stays within `2^{-k}`.
pub fn machin_pi() -> RealOracle {
    RealOracle::from_fn("pi-machin", |k| {
        // 16·2^{-(k+8)} + 4·2^{-(k+6)} = 2^{-(k+3)}, rounding adds 2^{-(k+2)}
        let v = atan_inv(5, k + 8) * Rational::from_int(16) - atan_inv(239, k + 6) * Rational::from_int(4);
        v.round_dyadic(k + 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_float_pi() {
        let pi = machin_pi();
        for k in [0, 5, 20, 45] {
            let q = pi.query(k);
            assert!((q.to_f64() - std::f64::consts::PI).abs() <= 2f64.powi(-(k as i32)) + 1e-15);
        }
    }

    #[test]
    fn successive_queries_are_consistent() {
        // |r_k − r_j| ≤ 2^{-k} + 2^{-j}
        let pi = machin_pi();
        let (a, b) = (pi.query(100), pi.query(120));
        assert!((a - b).abs() <= Rational::pow2_neg(100) + Rational::pow2_neg(120));
    }
}
