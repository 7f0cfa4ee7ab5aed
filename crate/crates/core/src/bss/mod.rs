//! Interpreter for BSS machines over the rational fragment of ℝ: programs
//! are finite graphs of input, compute, branch and output nodes, executed with
//! exact field operations and sign tests.

mod compile;
mod interp;
mod program;

use thiserror::Error;

pub use compile::compile_relu_net;
pub use interp::{run, BssState, RunOutcome, Trace, TraceStep, DEFAULT_MAX_STEPS};
pub use program::{parse_program, BssNode, BssProgram, Diagnostic, FieldOp, Operand, Predicate, Reg};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BssError {
    #[error("malformed program: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Malformed(Vec<Diagnostic>),
    #[error("expected {expected} inputs, got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("division by zero at node {node}")]
    DivisionByZero { node: usize },
    #[error("no termination within {max_steps} steps")]
    StepLimit { max_steps: u64 },
}

#[cfg(test)]
pub(crate) const ABS_PROGRAM: &str = r#"{
    "entry": 0,
    "nodes": [
        {"kind": "input", "count": 1, "next": 1},
        {"kind": "branch", "reg": 0, "pred": "lt0", "then": 2, "else": 3},
        {"kind": "compute", "target": 0, "op": "sub", "lhs": {"const": "0"}, "rhs": {"reg": 0}, "next": 3},
        {"kind": "output", "regs": [0]}
    ]
}"#;
