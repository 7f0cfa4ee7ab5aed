//! Exact and effective computation for sparse inverse problems.
//!
//! Two machine models side by side: BSS-style programs over ℚ (and ℚ(√d))
//! with exact field operations and sign tests, and Turing-style effective
//! maps that only ever see rational approximations of their real inputs.
//! On top of both sit exact solvers for basis pursuit and lasso², a certified
//! Bernstein surrogate of the ℓ1 norm, ReLU networks, and a checker that
//! catches solvers whose output depends on the input's representation.
//!
//! ```
//! use realgap_core::{kkt_check_lasso2, solve_bp, solve_lasso2_homotopy, Matrix, Rational};
//!
//! let a = Matrix::from_i64(&[&[1, 0]]);
//! let y = [Rational::one()];
//!
//! let res = solve_lasso2_homotopy(&a, &y, &Rational::frac(1, 2)).unwrap();
//! assert_eq!(res.minimizer, vec![Rational::frac(3, 4), Rational::zero()]);
//! assert!(kkt_check_lasso2(&a, &y, &Rational::frac(1, 2), &res.minimizer).is_valid());
//!
//! let bp = solve_bp(&a, &y, &Rational::frac(1, 8)).unwrap();
//! assert!(bp.certificate.is_valid());
//! ```

pub mod bss;
pub mod invprob;
pub mod neural;
pub mod number;
pub mod turing;

pub use bss::{compile_relu_net, parse_program, run, BssError, BssProgram, Trace};
pub use invprob::{
    build_bernstein_l1, discontinuity_family, kkt_check_lasso2, solve_bp, solve_bpa_branch_bound,
    solve_lasso2_homotopy, BernsteinApprox, Certificate, Instance, InvProbError, KktVerdict, Matrix, Param,
    SolveResult,
};
pub use neural::{forward_effective, forward_exact, NeuralError, NeuralNet, OracleNet};
pub use number::{DyadicInterval, NumberError, QuadExt, Rational, RealOracle, Scalar, SignPattern};
pub use turing::{
    check_transparency, representation_variants, EffectiveMap, Representation, TransparencyReport, TuringError,
    Verdict,
};
