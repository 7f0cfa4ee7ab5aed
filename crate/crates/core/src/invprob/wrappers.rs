use serde::{Deserialize, Serialize};

use super::bp::solve_bp;
use super::family::discontinuity_family;
use super::homotopy::solve_lasso2_homotopy;
use super::instance::Matrix;
use super::InvProbError;
use crate::number::{QuadExt, Rational, RealOracle};
use crate::turing::{EffectiveMap, TuringError};

/// Extra bits read beyond the requested output precision.
pub const DEFAULT_SNAPSHOT_GUARD: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotSolver {
    Lasso2,
    Bp,
}

fn domain(e: InvProbError) -> TuringError {
    TuringError::Domain(e.to_string())
}

/// Dyadic rational within `2^{-(k+2)}` of `v`.
fn round_quad(v: &QuadExt, k: u32) -> Rational {
    v.approx(k + 3).round_dyadic(k + 3)
}

fn snapshot(inputs: &[RealOracle], precision: u32) -> Vec<Rational> {
    inputs.iter().map(|o| o.query(precision)).collect()
}

fn solve_snapshot(solver: SnapshotSolver, a: &Matrix, y: &[Rational], param: &Rational, k: u32) -> Result<Vec<Rational>, TuringError> {
    match solver {
        SnapshotSolver::Lasso2 => {
            let res = solve_lasso2_homotopy(a, y, param).map_err(domain)?;
            Ok(res.minimizer.iter().map(|v| v.round_dyadic(k + 2)).collect())
        }
        SnapshotSolver::Bp => {
            let res = solve_bp(a, y, param).map_err(domain)?;
            Ok(res.minimizer.iter().map(|v| round_quad(v, k)).collect())
        }
    }
}

/// Exact solver consuming oracle inputs: reads every entry of `(A, y)` once at
/// precision `k₀ = k + guard`, solves the rational snapshot exactly and rounds
/// the minimizer to `2^{-(k+2)}`. Inputs are `A` row-major followed by `y`.
pub fn instance_map(solver: SnapshotSolver, m: usize, n: usize, param: Rational, guard: u32) -> EffectiveMap {
    let name = match solver {
        SnapshotSolver::Lasso2 => format!("exact-lasso2-snapshot(k0=k+{guard})"),
        SnapshotSolver::Bp => format!("exact-bp-snapshot(k0=k+{guard})"),
    };
    EffectiveMap::new(name, m * n + m, n, move |inputs, k| {
        let data = snapshot(inputs, k + guard);
        let a = Matrix::from_rows(data[..m * n].chunks(n).map(<[Rational]>::to_vec).collect()).map_err(domain)?;
        solve_snapshot(solver, &a, &data[m * n..], &param, k)
    })
}

/// `t ↦` BP minimizer of the discontinuity family at `t`, read at precision
/// `k + guard`. With `guard = 0` this is the naive fixed-precision heuristic.
pub fn family_bp_map(guard: u32) -> EffectiveMap {
    let name = if guard == 0 { "naive-bp-fixed-precision".to_string() } else { format!("exact-bp-snapshot(k0=k+{guard})") };
    EffectiveMap::new(name, 1, 2, move |inputs, k| {
        let t = inputs[0].query(k + guard);
        let inst = discontinuity_family(&t);
        solve_snapshot(SnapshotSolver::Bp, &inst.a, &inst.y, inst.param.value(), k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invprob::{family_jump_constant, random_instance, Param};
    use crate::turing::{check_transparency, representation_variants, Verdict};

    #[test]
    fn naive_heuristic_violates_at_threshold() {
        let k = 10;
        let report = check_transparency(&family_bp_map(0), &[Rational::one()], &representation_variants(1, 10, 7), k).unwrap();
        assert_eq!(report.verdict, Verdict::Violation);
        let threshold = Rational::pow2_neg(k) * Rational::from_int(2) + family_jump_constant() / Rational::from_int(2);
        assert!(report.disagreeing_variants(&threshold).len() >= 2);
    }

    #[test]
    fn exact_snapshot_consistent_away_from_threshold() {
        let report =
            check_transparency(&family_bp_map(DEFAULT_SNAPSHOT_GUARD), &[Rational::frac(3, 2)], &representation_variants(1, 10, 7), 12)
                .unwrap();
        assert_eq!(report.verdict, Verdict::Consistent, "{}", report.to_json());
    }

    #[test]
    fn lasso_snapshot_on_random_instance() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let inst = random_instance(&mut rng, 2, 4, Param::Lambda(Rational::one())).unwrap();
        let map = instance_map(SnapshotSolver::Lasso2, 2, 4, Rational::one(), DEFAULT_SNAPSHOT_GUARD);
        let report = check_transparency(&map, &inst.data_vector(), &representation_variants(10, 10, 1), 10).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent, "{}", report.to_json());
        // exact data gives the exact solution up to rounding
        let exact = solve_lasso2_homotopy(&inst.a, &inst.y, &Rational::one()).unwrap().minimizer;
        let zero_variant = report.outputs[0].output.as_ref().unwrap();
        for (o, e) in zero_variant.iter().zip(&exact) {
            assert!((o - e).abs() <= Rational::pow2_neg(12));
        }
    }
}
