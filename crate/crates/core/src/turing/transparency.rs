use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::effective::{evaluate_effective, EffectiveMap};
use super::TuringError;
use crate::number::{Rational, RealOracle, SignPattern};

/// One representation of an input vector: a sign pattern per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub id: usize,
    pub patterns: Vec<SignPattern>,
}

impl Representation {
    pub fn uniform(id: usize, dim: usize, pattern: SignPattern) -> Self {
        Representation { id, patterns: vec![pattern; dim] }
    }

    pub fn oracles(&self, x: &[Rational]) -> Vec<RealOracle> {
        x.iter()
            .zip(&self.patterns)
            .map(|(q, p)| RealOracle::perturbed(q.clone(), p.clone()))
            .collect()
    }
}

/// `count` deterministic representations of a `dim`-vector.
///
/// The first five are fixed (constant, all-up, all-down, and the two
/// alternating patterns); the rest draw per-coordinate seeded signs.
pub fn representation_variants(dim: usize, count: usize, seed: u64) -> Vec<Representation> {
    let fixed = [
        SignPattern::Zero,
        SignPattern::Constant(1),
        SignPattern::Constant(-1),
        SignPattern::Alternating(1),
        SignPattern::Alternating(-1),
    ];
    (0..count)
        .map(|id| match fixed.get(id) {
            Some(p) => Representation::uniform(id, dim, p.clone()),
            None => Representation {
                id,
                patterns: (0..dim)
                    .map(|c| SignPattern::Seeded(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((id as u64) << 32) ^ c as u64))
                    .collect(),
            },
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantOutcome {
    pub variant: usize,
    pub patterns: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Vec<Rational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub first: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<Rational>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransparencyReport {
    pub candidate: String,
    pub input: Vec<Rational>,
    pub precision: u32,
    pub tolerance: Rational,
    pub outputs: Vec<VariantOutcome>,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl TransparencyReport {
    /// Largest pairwise max-norm distance among successful outputs.
    pub fn max_distance(&self) -> Option<Rational> {
        let outs = self.successful();
        let mut best: Option<Rational> = None;
        for (i, (_, a)) in outs.iter().enumerate() {
            for (_, b) in &outs[i + 1..] {
                let d = max_norm_distance(a, b);
                if best.as_ref().is_none_or(|cur| d > *cur) {
                    best = Some(d);
                }
            }
        }
        best
    }

    /// Variants whose output differs from some other variant's by more than
    /// `threshold` in max-norm.
    pub fn disagreeing_variants(&self, threshold: &Rational) -> Vec<usize> {
        let outs = self.successful();
        let mut ids: Vec<usize> = outs
            .iter()
            .filter(|(_, a)| outs.iter().any(|(_, b)| max_norm_distance(a, b) > *threshold))
            .map(|(id, _)| *id)
            .collect();
        ids.sort_unstable();
        ids
    }

    fn successful(&self) -> Vec<(usize, &Vec<Rational>)> {
        self.outputs.iter().filter_map(|o| o.output.as_ref().map(|v| (o.variant, v))).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn max_norm_distance(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(Rational::zero(), Rational::max)
}

/// Runs `candidate` on several representations of the same input `x` and
/// flags a violation when two outputs differ by more than `2·2^{-k}`, or when
/// any run fails.
pub fn check_transparency(
    candidate: &EffectiveMap,
    x: &[Rational],
    variants: &[Representation],
    k: u32,
) -> Result<TransparencyReport, TuringError> {
    if variants.len() < 2 {
        return Err(TuringError::TooFewVariants(variants.len()));
    }
    if x.len() != candidate.arity_in() {
        return Err(TuringError::Arity { expected: candidate.arity_in(), got: x.len() });
    }
    let tolerance = Rational::pow2_neg(k) * Rational::from_int(2);

    let outputs: Vec<VariantOutcome> = variants
        .par_iter()
        .map(|rep| {
            let oracles = rep.oracles(x);
            let result = evaluate_effective(candidate, &oracles, k);
            VariantOutcome {
                variant: rep.id,
                patterns: rep.patterns.iter().map(ToString::to_string).collect(),
                output: result.as_ref().ok().cloned(),
                error: result.err().map(|e| e.to_string()),
            }
        })
        .collect();

    let mut witness = outputs.iter().find_map(|o| {
        o.error.as_ref().map(|e| Witness {
            first: o.variant,
            second: None,
            distance: None,
            reason: format!("evaluation failed: {e}"),
        })
    });

    if witness.is_none() {
        let mut best: Option<(usize, usize, Rational)> = None;
        for (i, a) in outputs.iter().enumerate() {
            for b in &outputs[i + 1..] {
                let d = max_norm_distance(a.output.as_ref().expect("ok"), b.output.as_ref().expect("ok"));
                if d > tolerance && best.as_ref().is_none_or(|(_, _, cur)| d > *cur) {
                    best = Some((a.variant, b.variant, d));
                }
            }
        }
        witness = best.map(|(first, second, distance)| Witness {
            first,
            second: Some(second),
            reason: format!("outputs differ by {} > {}", distance, tolerance),
            distance: Some(distance),
        });
    }

    Ok(TransparencyReport {
        candidate: candidate.name().to_string(),
        input: x.to_vec(),
        precision: k,
        tolerance,
        verdict: if witness.is_some() { Verdict::Violation } else { Verdict::Consistent },
        witness,
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_sign() -> EffectiveMap {
        EffectiveMap::new("naive-sign", 1, 1, |x, _| Ok(vec![Rational::from_int(x[0].query(1).signum() as i64)]))
    }

    #[test]
    fn naive_sign_is_not_transparent_at_zero() {
        let variants = vec![
            Representation::uniform(0, 1, SignPattern::Constant(1)),
            Representation::uniform(1, 1, SignPattern::Constant(-1)),
        ];
        let report = check_transparency(&naive_sign(), &[Rational::zero()], &variants, 8).unwrap();
        assert_eq!(report.verdict, Verdict::Violation);
        let w = report.witness.unwrap();
        assert_eq!((w.first, w.second), (0, Some(1)));
        assert_eq!(w.distance, Some(Rational::from_int(2)));
    }

    #[test]
    fn constant_map_is_consistent() {
        let map = EffectiveMap::constant(2, vec![Rational::from_int(42)]);
        let x = [Rational::frac(1, 3), Rational::frac(-2, 5)];
        let report = check_transparency(&map, &x, &representation_variants(2, 10, 5), 6).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent);
        assert!(report.witness.is_none());
        assert_eq!(report.outputs.len(), 10);
    }

    #[test]
    fn identity_is_consistent() {
        let x = [Rational::frac(1, 3)];
        let report = check_transparency(&EffectiveMap::identity(1), &x, &representation_variants(1, 12, 9), 10).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent);
    }

    #[test]
    fn failures_count_as_violations() {
        let map = EffectiveMap::new("fails-on-positive", 1, 1, |x, _| {
            if x[0].query(0).signum() > 0 {
                Err(TuringError::Domain("positive".into()))
            } else {
                Ok(vec![Rational::zero()])
            }
        });
        let variants = representation_variants(1, 3, 0);
        let report = check_transparency(&map, &[Rational::zero()], &variants, 4).unwrap();
        assert_eq!(report.verdict, Verdict::Violation);
        assert!(report.witness.unwrap().reason.contains("evaluation failed"));
    }

    #[test]
    fn needs_two_variants() {
        let variants = representation_variants(1, 1, 0);
        assert!(check_transparency(&naive_sign(), &[Rational::zero()], &variants, 4).is_err());
    }

    #[test]
    fn report_is_reproducible() {
        let variants = representation_variants(1, 8, 77);
        let a = check_transparency(&naive_sign(), &[Rational::zero()], &variants, 4).unwrap().to_json();
        let b = check_transparency(&naive_sign(), &[Rational::zero()], &variants, 4).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"verdict\": \"violation\""));
    }
}
