use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::bernstein::BernsteinApprox;
use super::bp::solve_bp;
use super::instance::{check_positive, check_shape, norm_sq, residual, Matrix};
use super::linalg::solve_many;
use super::InvProbError;
use crate::number::{DyadicInterval, QuadExt, Rational, Scalar};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchBoundConfig {
    pub tol: Rational,
    pub node_budget: u64,
}

impl BranchBoundConfig {
    pub fn new(tol: Rational) -> Self {
        BranchBoundConfig { tol, node_budget: DEFAULT_NODE_BUDGET }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BpaStatus {
    Converged,
    /// Node budget exhausted; bounds are valid but the gap may exceed `tol`.
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpaResult {
    pub status: BpaStatus,
    /// Leaf box attaining the global lower bound.
    pub enclosure: Vec<DyadicInterval>,
    /// Certified `objective_lower ≤ min p ≤ objective_upper` over the
    /// closed feasible set.
    pub objective_lower: Rational,
    pub objective_upper: Option<Rational>,
    /// Feasible point whose value is bounded by `objective_upper`.
    pub incumbent: Option<Vec<Rational>>,
    pub nodes: u64,
    pub excluded: u64,
    pub open_boxes: usize,
    /// Whether the enclosure meets the sphere `‖x‖₂ = √N·β`.
    pub boundary_contact: bool,
}

impl BpaResult {
    pub fn gap(&self) -> Option<Rational> {
        self.objective_upper.as_ref().map(|u| u - &self.objective_lower)
    }
}

/// Whether the BP minimizer chosen by [`solve_bp`] lies in the open ball
/// `‖x‖₂ < √N·β` on which the surrogate is certified.
pub fn bp_within_ball(a: &Matrix, y: &[Rational], epsilon: &Rational, beta: &Rational) -> Result<bool, InvProbError> {
    let res = solve_bp(a, y, epsilon)?;
    let norm = res.minimizer.iter().fold(QuadExt::zero(), |acc, x| Scalar::add(&acc, &Scalar::mul(x, x)));
    let bound = QuadExt::rational(beta.square() * Rational::from_int(a.cols() as i64));
    Ok(norm.cmp_exact(&bound) == Ordering::Less)
}

struct Node {
    id: Vec<u8>,
    bounds: Vec<DyadicInterval>,
    lower: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Max-heap order: smallest lower bound, then lexicographically smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other.lower.total_cmp(&self.lower).then_with(|| other.id.cmp(&self.id))
    }
}

/// Evaluates `q` on the grid `{k·h}` with memoization; monotonicity of `q`
/// in `|t|` turns grid values into rigorous bounds at arbitrary points.
struct GridBounds<'a> {
    p: &'a BernsteinApprox,
    h: Rational,
    memo: HashMap<u64, (f64, f64)>,
}

impl GridBounds<'_> {
    fn at(&mut self, k: u64) -> (f64, f64) {
        let (p, h) = (self.p, &self.h);
        *self.memo.entry(k).or_insert_with(|| {
            let t = (h * Rational::from_int(k)).min(p.radius().clone());
            p.coord_enclosure(&t)
        })
    }

    /// Lower bound of `q` over `[u, ∞) ∩ [−R, R]` in absolute value.
    fn lower(&mut self, u: &Rational) -> f64 {
        let k = (u / &self.h).floor().to_u64().unwrap_or(u64::MAX);
        self.at(k).0
    }

    fn upper(&mut self, u: &Rational) -> f64 {
        let k = (u / &self.h).ceil().to_u64().unwrap_or(u64::MAX);
        self.at(k).1
    }
}

fn sum_down(vals: impl Iterator<Item = f64>) -> f64 {
    vals.fold(0.0, |s, v| {
        let t = s + v;
        if t == 0.0 {
            0.0
        } else {
            t.next_down()
        }
    })
}

fn sum_up(vals: impl Iterator<Item = f64>) -> f64 {
    vals.fold(0.0, |s, v| (s + v).next_up())
}

fn dist_to_zero(iv: &DyadicInterval) -> Rational {
    if iv.contains_zero() {
        Rational::zero()
    } else {
        iv.lo().abs().min(iv.hi().abs())
    }
}

/// Interval-arithmetic global minimization of `p` over
/// `{x : ‖x‖₂ ≤ √N·β, ‖Ax − y‖₂ ≤ ε}` (the closure of the certified ball).
///
/// Lower bounds come from convexity and evenness of the Bernstein factor:
/// over a box, `q(x_i)` is smallest at the point of `[lo_i, hi_i]` nearest 0.
/// Boxes are excluded when an interval test proves either constraint fails.
/// The incumbent is seeded from the least-norm solution pulled towards the
/// exact BP minimizer, then improved by feasible box midpoints.
pub fn solve_bpa_branch_bound(
    a: &Matrix,
    y: &[Rational],
    epsilon: &Rational,
    p: &BernsteinApprox,
    tol: &Rational,
) -> Result<BpaResult, InvProbError> {
    solve_bpa_branch_bound_with(a, y, epsilon, p, &BranchBoundConfig::new(tol.clone()))
}

pub fn solve_bpa_branch_bound_with(
    a: &Matrix,
    y: &[Rational],
    epsilon: &Rational,
    p: &BernsteinApprox,
    cfg: &BranchBoundConfig,
) -> Result<BpaResult, InvProbError> {
    check_shape(a, y)?;
    check_positive("epsilon", epsilon)?;
    check_positive("tol", &cfg.tol)?;
    let n = a.cols();
    if p.dim() != n {
        return Err(InvProbError::Shape(format!("surrogate has dimension {}, A has {n} columns", p.dim())));
    }
    let eps_sq = epsilon.square();
    let ball_sq = p.beta().square() * Rational::from_int(n as i64);
    let feasible = |x: &[Rational]| norm_sq(x) <= ball_sq && norm_sq(&residual(a, x, y)) <= eps_sq;
    let excluded_box = |b: &[DyadicInterval]| {
        let min_norm: Rational = b.iter().map(|iv| dist_to_zero(iv).square()).sum();
        if min_norm > ball_sq {
            return true;
        }
        let mut min_res = Rational::zero();
        for (i, yi) in y.iter().enumerate() {
            let mut acc = DyadicInterval::point(-yi);
            for (j, iv) in b.iter().enumerate() {
                acc = acc.add(&iv.scale(a.get(i, j)));
            }
            min_res += &dist_to_zero(&acc).square();
        }
        min_res > eps_sq
    };

    // grid spacing 2^{-j} ≤ tol / (8N)
    let target = &cfg.tol / Rational::from_int(8 * n as i64);
    let mut j = 0u32;
    while Rational::pow2_neg(j) > target {
        j += 1;
    }
    let mut grid = GridBounds { p, h: Rational::pow2_neg(j), memo: HashMap::new() };

    let mut best: Option<(f64, Vec<Rational>)> = None;
    let offer = |x: Vec<Rational>, grid: &mut GridBounds, best: &mut Option<(f64, Vec<Rational>)>| {
        if !feasible(&x) {
            return;
        }
        let v = sum_up(x.iter().map(|t| grid.upper(&t.abs())));
        if best.as_ref().is_none_or(|(u, _)| v < *u) {
            *best = Some((v, x));
        }
    };
    for seed in seeds(a, y, epsilon) {
        offer(seed, &mut grid, &mut best);
    }

    let r = p.radius().clone();
    let root = vec![DyadicInterval::new(-&r, r).expect("ordered"); n];
    let mut excluded = 0u64;
    if excluded_box(&root) {
        return Err(InvProbError::EmptyFeasibleRegion { excluded: 1 });
    }
    let lower_of = |b: &[DyadicInterval], grid: &mut GridBounds| sum_down(b.iter().map(|iv| grid.lower(&dist_to_zero(iv))));
    let mut heap = BinaryHeap::new();
    let root_lower = lower_of(&root, &mut grid);
    heap.push(Node { id: Vec::new(), bounds: root, lower: root_lower });
    let mut nodes = 0u64;
    let mut pruned_lower = f64::INFINITY;

    let finish = |status, node: &Node, upper: Option<&(f64, Vec<Rational>)>, nodes, excluded, open| {
        let contact = node.bounds.iter().map(|iv| iv.lo().square().max(iv.hi().square())).sum::<Rational>() >= ball_sq;
        BpaResult {
            status,
            enclosure: node.bounds.clone(),
            objective_lower: Rational::from_f64(node.lower).expect("finite bound"),
            objective_upper: upper.map(|(u, _)| Rational::from_f64(*u).expect("finite bound")),
            incumbent: upper.map(|(_, x)| x.clone()),
            nodes,
            excluded,
            open_boxes: open,
            boundary_contact: contact,
        }
    };

    while let Some(node) = heap.pop() {
        if let Some((u, _)) = &best {
            if node.lower > *u {
                pruned_lower = pruned_lower.min(node.lower);
                continue;
            }
        }
        let widest = node
            .bounds
            .iter()
            .enumerate()
            .map(|(i, iv)| (iv.width(), i))
            .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)))
            .expect("non-empty box");
        let gap_closed = best.as_ref().is_some_and(|(u, _)| {
            Rational::from_f64(*u).expect("finite") - Rational::from_f64(node.lower).expect("finite") <= cfg.tol
        });
        if widest.0 <= cfg.tol && gap_closed {
            return Ok(finish(BpaStatus::Converged, &node, best.as_ref(), nodes, excluded, heap.len()));
        }
        if nodes >= cfg.node_budget {
            return Ok(finish(BpaStatus::Budget, &node, best.as_ref(), nodes, excluded, heap.len() + 1));
        }
        nodes += 1;
        let (left, right) = node.bounds[widest.1].bisect();
        for (bit, half) in [(0u8, left), (1u8, right)] {
            let mut bounds = node.bounds.clone();
            bounds[widest.1] = half;
            if excluded_box(&bounds) {
                excluded += 1;
                continue;
            }
            offer(bounds.iter().map(DyadicInterval::midpoint).collect(), &mut grid, &mut best);
            let lower = lower_of(&bounds, &mut grid);
            if best.as_ref().is_some_and(|(u, _)| lower > *u) {
                pruned_lower = pruned_lower.min(lower);
                continue;
            }
            let mut id = node.id.clone();
            id.push(bit);
            heap.push(Node { id, bounds, lower });
        }
    }
    match best {
        // every box was pruned against the incumbent: rounding-level tie
        Some((u, x)) => {
            let node = Node {
                id: Vec::new(),
                bounds: x.iter().map(|t| DyadicInterval::point(t.clone())).collect(),
                lower: pruned_lower.min(u),
            };
            Ok(finish(BpaStatus::Converged, &node, Some(&(u, x)), nodes, excluded, 0))
        }
        None => Err(InvProbError::EmptyFeasibleRegion { excluded }),
    }
}

/// Candidate feasible points: the least-norm solution of `Ax = y` and a
/// point slightly inside the segment towards the exact BP minimizer.
fn seeds(a: &Matrix, y: &[Rational], epsilon: &Rational) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    let aat: Vec<Vec<Rational>> =
        (0..a.rows()).map(|i| (0..a.rows()).map(|k| super::instance::dot(a.row(i), a.row(k))).collect()).collect();
    let ls = solve_many(aat, &[y.to_vec()]).map(|mut w| a.tr_mul_vec(&w.pop().expect("one rhs")));
    if let Some(ls) = &ls {
        out.push(ls.clone());
    }
    if let Ok(bp) = solve_bp(a, y, epsilon) {
        let approx: Vec<Rational> = bp.minimizer.iter().map(|v| v.approx(48)).collect();
        match &ls {
            Some(ls) => {
                let shrink = Rational::one() - Rational::pow2_neg(20);
                out.push(ls.iter().zip(&approx).map(|(l, b)| l + &shrink * (b - l)).collect());
            }
            None => out.push(approx),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invprob::build_bernstein_l1;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn equal_columns_bracket_bp_optimum() {
        let a = Matrix::from_i64(&[&[1, 1]]);
        let eps = r(1, 8);
        let gamma = r(1, 16);
        let tol = r(1, 32);
        let p = build_bernstein_l1(2, &r(1, 1), &gamma).unwrap();
        assert!(bp_within_ball(&a, &[r(1, 1)], &eps, &r(1, 1)).unwrap());
        let res = solve_bpa_branch_bound(&a, &[r(1, 1)], &eps, &p, &tol).unwrap();
        assert_eq!(res.status, BpaStatus::Converged);
        let bp_opt = r(7, 8);
        let upper = res.objective_upper.clone().unwrap();
        assert!(res.objective_lower <= upper);
        assert!(&res.objective_lower - &gamma - &tol <= bp_opt && bp_opt <= &upper + &gamma + &tol);
        assert!(res.gap().unwrap() <= tol);
        assert!(res.enclosure.iter().all(|iv| iv.width() <= tol));
    }

    #[test]
    fn zero_data_encloses_origin() {
        let a = Matrix::from_i64(&[&[2, -1]]);
        let gamma = r(1, 16);
        let p = build_bernstein_l1(2, &r(1, 1), &gamma).unwrap();
        let res = solve_bpa_branch_bound(&a, &[r(0, 1)], &r(1, 8), &p, &r(1, 16)).unwrap();
        assert!(res.enclosure.iter().all(|iv| iv.contains(&Rational::zero())), "{:?}", res.enclosure);
        assert!(res.objective_upper.unwrap() <= gamma);
    }

    #[test]
    fn huge_tolerance_stops_at_root() {
        let a = Matrix::from_i64(&[&[1, 1]]);
        let p = build_bernstein_l1(2, &r(1, 1), &r(1, 4)).unwrap();
        let res = solve_bpa_branch_bound(&a, &[r(1, 1)], &r(1, 8), &p, &r(100, 1)).unwrap();
        assert_eq!(res.nodes, 0);
        assert_eq!(res.enclosure[0].width(), p.radius() * r(2, 1));
    }

    #[test]
    fn budget_flag() {
        let a = Matrix::from_i64(&[&[1, 1]]);
        let p = build_bernstein_l1(2, &r(1, 1), &r(1, 4)).unwrap();
        let cfg = BranchBoundConfig { tol: r(1, 1024), node_budget: 5 };
        let res = solve_bpa_branch_bound_with(&a, &[r(1, 1)], &r(1, 8), &p, &cfg).unwrap();
        assert_eq!(res.status, BpaStatus::Budget);
        assert_eq!(res.nodes, 5);
    }

    #[test]
    fn infeasible_inside_ball() {
        // solutions of x₁ + x₂ = 10 all lie far outside ‖x‖ ≤ √2
        let a = Matrix::from_i64(&[&[1, 1]]);
        let p = build_bernstein_l1(2, &r(1, 1), &r(1, 4)).unwrap();
        let err = solve_bpa_branch_bound(&a, &[r(10, 1)], &r(1, 8), &p, &r(1, 16)).unwrap_err();
        assert!(matches!(err, InvProbError::EmptyFeasibleRegion { .. }), "{err}");
    }
}
