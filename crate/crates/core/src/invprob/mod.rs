//! Sparse regularization problems: basis pursuit (BP), lasso², and the
//! polynomial surrogate BP-A, with exact solvers over ℚ and ℚ(√d), a
//! certified Bernstein approximation of the ℓ1 norm, and an interval
//! branch-and-bound for the surrogate.

mod bernstein;
mod bp;
mod branch_bound;
mod family;
mod homotopy;
mod instance;
mod kkt;
mod linalg;
mod wrappers;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bernstein::{build_bernstein_l1, BernsteinApprox, GridCertificate, DEFAULT_DEGREE_CAP};
pub use bp::solve_bp;
pub use branch_bound::{
    bp_within_ball, solve_bpa_branch_bound, solve_bpa_branch_bound_with, BpaResult, BpaStatus, BranchBoundConfig, DEFAULT_NODE_BUDGET,
};
pub use family::{
    discontinuity_family, family_jump_constant, FAMILY_EPSILON, FAMILY_PARAMETER_RANGE, FAMILY_THRESHOLD,
};
pub use homotopy::{default_max_events, lasso_path, solve_lasso2_homotopy, Breakpoint, LassoPath, PathEvent, PathSegment};
pub use instance::{
    check_shape, dot, norm1, norm_sq, random_instance, random_rational, residual, Instance, Matrix, Param,
};
pub use kkt::{kkt_check_lasso2, KktVerdict};
pub use linalg::solve_many;
pub use wrappers::{family_bp_map, instance_map, SnapshotSolver, DEFAULT_SNAPSHOT_GUARD};

use crate::number::{NumberError, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvProbError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate instance: {reason} (support {support:?} at λ = {lambda})")]
    Degenerate { reason: String, support: Vec<usize>, lambda: Box<Rational> },
    #[error("infeasible: minimal residual² {min_residual_sq} exceeds ε² = {epsilon_sq}")]
    Infeasible { min_residual_sq: Box<Rational>, epsilon_sq: Box<Rational> },
    #[error("Bernstein degree {required} exceeds cap {cap}")]
    DegreeCap { required: u64, cap: u64 },
    #[error("constraint set is empty inside the domain: {excluded} boxes excluded by interval tests")]
    EmptyFeasibleRegion { excluded: u64 },
    #[error(transparent)]
    Number(#[from] NumberError),
}

/// Optimality evidence attached to a [`SolveResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate<S> {
    /// Lasso² stationarity at the given λ.
    Kkt { lambda: S, verdict: KktVerdict },
    /// BP with `‖y‖² ≤ ε²`: the origin is feasible and has zero norm.
    FeasibleOrigin { norm_y_sq: Rational, epsilon_sq: Rational },
    /// BP through the penalized form: the point is lasso²-optimal at λ and
    /// the constraint is active, so every feasible point has larger ℓ1 norm.
    ActiveConstraint { lambda: S, residual_sq: S, epsilon_sq: Rational, verdict: KktVerdict },
}

impl<S: Scalar> Certificate<S> {
    pub fn is_valid(&self) -> bool {
        match self {
            Certificate::Kkt { lambda, verdict } => lambda.signum() > 0 && verdict.is_valid(),
            Certificate::FeasibleOrigin { norm_y_sq, epsilon_sq } => norm_y_sq <= epsilon_sq,
            Certificate::ActiveConstraint { lambda, residual_sq, epsilon_sq, verdict } => {
                lambda.signum() > 0 && verdict.is_valid() && *residual_sq == S::from_rational(epsilon_sq)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult<S> {
    pub minimizer: Vec<S>,
    pub objective: S,
    pub certificate: Certificate<S>,
    /// Homotopy events visited, in path order.
    pub breakpoints: Vec<Breakpoint>,
}
