use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::program::{BssNode, BssProgram, FieldOp, Operand, Reg};
use super::BssError;
use crate::number::Rational;

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// Machine state: register file, program counter and step count.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BssState {
    pub registers: BTreeMap<Reg, Rational>,
    pub pc: usize,
    pub steps: u64,
}

/// One executed node and the registers it wrote.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub node: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub writes: Vec<(Reg, Rational)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// Re-applies every recorded write to an empty register file.
    pub fn replay(&self) -> BssState {
        let mut state = BssState::default();
        for step in &self.steps {
            for (r, v) in &step.writes {
                state.registers.insert(*r, v.clone());
            }
            state.pc = step.node;
            state.steps += 1;
        }
        state
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub outputs: Vec<Rational>,
    pub trace: Trace,
    pub final_state: BssState,
}

fn operand(state: &BssState, o: &Operand) -> Rational {
    match o {
        Operand::Reg(r) => state.registers[r].clone(),
        Operand::Const(q) => q.clone(),
    }
}

/// Executes `program` on `input` with exact rational arithmetic.
pub fn run(program: &BssProgram, input: &[Rational], max_steps: u64) -> Result<RunOutcome, BssError> {
    let expected = program.input_count();
    if input.len() != expected {
        return Err(BssError::InputArity { expected, got: input.len() });
    }
    let mut state = BssState { pc: program.entry(), ..Default::default() };
    let mut trace = Trace::default();
    loop {
        if state.steps >= max_steps {
            return Err(BssError::StepLimit { max_steps });
        }
        state.steps += 1;
        let node_id = state.pc;
        let mut writes = Vec::new();
        let next = match &program.nodes()[node_id] {
            BssNode::Input { count, next } => {
                for (r, v) in input.iter().enumerate().take(*count) {
                    writes.push((r, v.clone()));
                }
                Some(*next)
            }
            BssNode::Compute { target, op, lhs, rhs, next } => {
                let a = operand(&state, lhs);
                let b = operand(&state, rhs);
                let v = match op {
                    FieldOp::Add => a + b,
                    FieldOp::Sub => a - b,
                    FieldOp::Mul => a * b,
                    FieldOp::Div => a.checked_div(&b).map_err(|_| BssError::DivisionByZero { node: node_id })?,
                };
                writes.push((*target, v));
                Some(*next)
            }
            BssNode::Branch { reg, pred, then, otherwise } => {
                Some(if pred.holds(&state.registers[reg]) { *then } else { *otherwise })
            }
            BssNode::Output { .. } => None,
        };
        for (r, v) in &writes {
            state.registers.insert(*r, v.clone());
        }
        trace.steps.push(TraceStep { node: node_id, writes });
        match next {
            Some(n) => state.pc = n,
            None => {
                let BssNode::Output { regs } = &program.nodes()[node_id] else { unreachable!() };
                let outputs = regs.iter().map(|r| state.registers[r].clone()).collect();
                return Ok(RunOutcome { outputs, trace, final_state: state });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bss::{parse_program, ABS_PROGRAM};

    #[test]
    fn abs_on_negative_and_zero() {
        let p = parse_program(ABS_PROGRAM).unwrap();
        let out = run(&p, &[Rational::frac(-3, 2)], DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(out.outputs, vec![Rational::frac(3, 2)]);
        let out = run(&p, &[Rational::zero()], DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(out.outputs, vec![Rational::zero()]);
        // zero takes the non-negating path: input, branch, output
        assert_eq!(out.trace.steps.iter().map(|s| s.node).collect::<Vec<_>>(), vec![0, 1, 3]);
    }

    #[test]
    fn arity_mismatch() {
        let p = parse_program(ABS_PROGRAM).unwrap();
        let err = run(&p, &[Rational::one(), Rational::one()], 10).unwrap_err();
        assert_eq!(err, BssError::InputArity { expected: 1, got: 2 });
    }

    #[test]
    fn division_by_zero_names_node() {
        let text = r#"{"nodes": [
            {"kind": "input", "count": 1, "next": 1},
            {"kind": "compute", "target": 0, "op": "div", "lhs": {"reg": 0}, "rhs": {"const": "0"}, "next": 2},
            {"kind": "output", "regs": [0]}
        ]}"#;
        let p = parse_program(text).unwrap();
        assert_eq!(run(&p, &[Rational::one()], 10).unwrap_err(), BssError::DivisionByZero { node: 1 });
    }

    #[test]
    fn infinite_loop_hits_step_limit() {
        let text = r#"{"nodes": [
            {"kind": "input", "count": 1, "next": 1},
            {"kind": "compute", "target": 0, "op": "add", "lhs": {"reg": 0}, "rhs": {"const": "1"}, "next": 2},
            {"kind": "branch", "reg": 0, "pred": "eq0", "then": 3, "else": 1},
            {"kind": "output", "regs": [0]}
        ]}"#;
        let p = parse_program(text).unwrap();
        assert_eq!(run(&p, &[Rational::one()], 1000).unwrap_err(), BssError::StepLimit { max_steps: 1000 });
        // from −3 the counter reaches zero and halts
        let out = run(&p, &[Rational::from_int(-3)], 1000).unwrap();
        assert_eq!(out.outputs, vec![Rational::zero()]);
    }

    #[test]
    fn trace_replay_reproduces_final_state() {
        let p = parse_program(ABS_PROGRAM).unwrap();
        let out = run(&p, &[Rational::frac(-7, 9)], 100).unwrap();
        assert_eq!(out.trace.replay(), out.final_state);
        let again = run(&p, &[Rational::frac(-7, 9)], 100).unwrap();
        assert_eq!(again.trace, out.trace);
    }
}
