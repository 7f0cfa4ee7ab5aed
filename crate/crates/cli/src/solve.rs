use std::path::Path;

use realgap_core::invprob::{
    bp_within_ball, build_bernstein_l1, solve_bp, solve_bpa_branch_bound_with, solve_lasso2_homotopy, BpaStatus,
    BranchBoundConfig, Instance, InvProbError, Param, SolveResult,
};
use realgap_core::number::Rational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::io::{emit, read_input};
use crate::Problem;

pub struct BpaOptions {
    pub beta: Rational,
    pub gamma: Rational,
    pub tol: Rational,
    pub node_budget: Option<u64>,
}

pub fn invprob_error(e: InvProbError) -> CliError {
    match e {
        InvProbError::Shape(_) | InvProbError::InvalidParameter(_) | InvProbError::Parse(_) => CliError::Usage(e.into()),
        other => CliError::Failure(other.into()),
    }
}

fn required(inst: &Instance, problem: Problem) -> Result<&Rational, CliError> {
    match (&inst.param, problem) {
        (Param::Lambda(l), Problem::Lasso2) => Ok(l),
        (Param::Epsilon(e), Problem::Bp | Problem::Bpa) => Ok(e),
        (_, Problem::Lasso2) => Err(CliError::usage("instance: field `lambda` is required for lasso2")),
        _ => Err(CliError::usage("instance: field `epsilon` is required for bp and bpa")),
    }
}

/// `SolveResult` JSON with the homotopy events moved under `trace`.
fn result_json<S: Serialize>(problem: Problem, res: &SolveResult<S>) -> Value {
    json!({
        "problem": problem,
        "minimizer": res.minimizer,
        "objective": res.objective,
        "certificate": res.certificate,
        "trace": { "events": res.breakpoints.len(), "breakpoints": res.breakpoints },
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

pub fn cmd_solve(problem: Problem, path: &Path, output: Option<&Path>, opts: &BpaOptions) -> Result<bool, CliError> {
    let inst = Instance::from_json(&read_input(path)?).map_err(invprob_error)?;
    let param = required(&inst, problem)?;
    match problem {
        Problem::Lasso2 => {
            let res = solve_lasso2_homotopy(&inst.a, &inst.y, param).map_err(invprob_error)?;
            emit(output, &pretty(&result_json(problem, &res)))?;
            Ok(res.certificate.is_valid())
        }
        Problem::Bp => {
            let res = solve_bp(&inst.a, &inst.y, param).map_err(invprob_error)?;
            emit(output, &pretty(&result_json(problem, &res)))?;
            Ok(res.certificate.is_valid())
        }
        Problem::Bpa => {
            let surrogate = build_bernstein_l1(inst.n(), &opts.beta, &opts.gamma).map_err(invprob_error)?;
            let mut cfg = BranchBoundConfig::new(opts.tol.clone());
            if let Some(b) = opts.node_budget {
                cfg.node_budget = b;
            }
            let res = solve_bpa_branch_bound_with(&inst.a, &inst.y, param, &surrogate, &cfg).map_err(invprob_error)?;
            // exact BP for comparison; the distance between minimizers is only observed
            let reference = match solve_bp(&inst.a, &inst.y, param) {
                Ok(bp) => {
                    let distance = res.incumbent.as_ref().map(|x| {
                        x.iter().zip(&bp.minimizer).map(|(a, b)| (a.to_f64() - b.to_f64()).powi(2)).sum::<f64>().sqrt()
                    });
                    json!({
                        "objective": bp.objective,
                        "objective_approx": bp.objective.to_f64(),
                        "minimizer": bp.minimizer,
                        "incumbent_distance": distance,
                        "inside_ball": bp_within_ball(&inst.a, &inst.y, param, &opts.beta).ok(),
                    })
                }
                Err(e) => json!({ "error": e.to_string() }),
            };
            let out = json!({
                "problem": problem,
                "surrogate": surrogate,
                "tol": opts.tol,
                "node_budget": cfg.node_budget,
                "result": res,
                "gap": res.gap(),
                "bp_reference": reference,
            });
            emit(output, &pretty(&out))?;
            Ok(res.status == BpaStatus::Converged)
        }
    }
}

