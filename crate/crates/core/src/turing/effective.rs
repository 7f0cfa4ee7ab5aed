use std::fmt;
use std::sync::Arc;

use super::expr::{default_budget, refine_loop, Expr};
use super::TuringError;
use crate::number::{Rational, RealOracle};

type EvalFn = dyn Fn(&[RealOracle], u32) -> Result<Vec<Rational>, TuringError> + Send + Sync;

/// A map `ℝ^m → ℝ^n` realized on representations: given input oracles and a
/// target precision `k`, it returns rationals within `2^{-k}` of `f(x)`.
#[derive(Clone)]
pub struct EffectiveMap {
    name: Arc<str>,
    arity_in: usize,
    arity_out: usize,
    eval: Arc<EvalFn>,
}

impl EffectiveMap {
    pub fn new(
        name: impl Into<String>,
        arity_in: usize,
        arity_out: usize,
        eval: impl Fn(&[RealOracle], u32) -> Result<Vec<Rational>, TuringError> + Send + Sync + 'static,
    ) -> Self {
        EffectiveMap { name: Arc::from(name.into()), arity_in, arity_out, eval: Arc::new(eval) }
    }

    /// Map obtained by running [`refine_loop`] on an expression.
    pub fn from_expr(name: impl Into<String>, expr: Expr, budget: Option<u32>) -> Self {
        let (m, n) = (expr.arity(), expr.output_count());
        let expr = Arc::new(expr);
        EffectiveMap::new(name, m, n, move |inputs, k| {
            refine_loop(&expr, inputs, k, Some(budget.unwrap_or_else(|| default_budget(k))))
        })
    }

    pub fn identity(dim: usize) -> Self {
        EffectiveMap::new("identity", dim, dim, |inputs, k| {
            // r_{k+1} is within 2^{-(k+1)} ≤ 2^{-k}
            Ok(inputs.iter().map(|o| o.query(k + 1)).collect())
        })
    }

    /// Ignores its inputs.
    pub fn constant(arity_in: usize, values: Vec<Rational>) -> Self {
        let n = values.len();
        EffectiveMap::new("constant", arity_in, n, move |_, _| Ok(values.clone()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity_in(&self) -> usize {
        self.arity_in
    }

    pub fn arity_out(&self) -> usize {
        self.arity_out
    }
}

impl fmt::Debug for EffectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EffectiveMap")
            .field("name", &self.name)
            .field("arity_in", &self.arity_in)
            .field("arity_out", &self.arity_out)
            .finish()
    }
}

/// Runs `map` on the given representations at target precision `k`.
pub fn evaluate_effective(map: &EffectiveMap, inputs: &[RealOracle], k: u32) -> Result<Vec<Rational>, TuringError> {
    if inputs.len() != map.arity_in {
        return Err(TuringError::Arity { expected: map.arity_in, got: inputs.len() });
    }
    let out = (map.eval)(inputs, k)?;
    if out.len() != map.arity_out {
        return Err(TuringError::Domain(format!(
            "{} produced {} outputs, declared {}",
            map.name,
            out.len(),
            map.arity_out
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::SignPattern;

    #[test]
    fn identity_on_third() {
        let third = Rational::frac(1, 3);
        let out = evaluate_effective(&EffectiveMap::identity(1), &[RealOracle::from_rational(third.clone())], 10).unwrap();
        assert!((&out[0] - &third).abs() <= Rational::pow2_neg(10));
        let perturbed = RealOracle::perturbed(third.clone(), SignPattern::Constant(1));
        let out = evaluate_effective(&EffectiveMap::identity(1), &[perturbed], 10).unwrap();
        assert!((&out[0] - &third).abs() <= Rational::pow2_neg(10));
    }

    #[test]
    fn arity_checked() {
        let err = evaluate_effective(&EffectiveMap::identity(2), &[RealOracle::from_rational(Rational::one())], 3);
        assert!(matches!(err, Err(TuringError::Arity { expected: 2, got: 1 })));
    }

    #[test]
    fn deterministic_on_rerun() {
        let mut e = Expr::new();
        let x = e.input(0);
        let y = e.input(1);
        let p = e.mul(x, y);
        e.output(p);
        let map = EffectiveMap::from_expr("product", e, None);
        let inputs = [
            RealOracle::perturbed(Rational::frac(2, 3), SignPattern::Seeded(3)),
            RealOracle::perturbed(Rational::frac(-5, 7), SignPattern::Alternating(1)),
        ];
        let a = evaluate_effective(&map, &inputs, 12).unwrap();
        let b = evaluate_effective(&map, &inputs, 12).unwrap();
        assert_eq!(a, b);
        assert!((&a[0] - Rational::frac(-10, 21)).abs() <= Rational::pow2_neg(12));
    }
}
