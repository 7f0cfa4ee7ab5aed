use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::BssError;
use crate::number::Rational;

pub type Reg = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operand {
    #[serde(rename = "reg")]
    Reg(Reg),
    #[serde(rename = "const")]
    Const(Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Sign test against zero; `a < b` is expressed as `a − b < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Predicate {
    #[serde(rename = "lt0")]
    Negative,
    #[serde(rename = "eq0")]
    Zero,
    #[serde(rename = "gt0")]
    Positive,
}

impl Predicate {
    pub fn holds(self, v: &Rational) -> bool {
        match self {
            Predicate::Negative => v.signum() < 0,
            Predicate::Zero => v.signum() == 0,
            Predicate::Positive => v.signum() > 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BssNode {
    /// Loads the input vector into registers `0..count`.
    Input { count: usize, next: usize },
    Compute { target: Reg, op: FieldOp, lhs: Operand, rhs: Operand, next: usize },
    Branch { reg: Reg, pred: Predicate, then: usize, otherwise: usize },
    Output { regs: Vec<Reg> },
}

impl BssNode {
    fn successors(&self) -> Vec<usize> {
        match self {
            BssNode::Input { next, .. } | BssNode::Compute { next, .. } => vec![*next],
            BssNode::Branch { then, otherwise, .. } => vec![*then, *otherwise],
            BssNode::Output { .. } => vec![],
        }
    }
}

/// A well-formed BSS program: finite node graph with a single input node at
/// the entry, all targets present and every register read initialized on all
/// paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BssProgram {
    nodes: Vec<BssNode>,
    entry: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some(n) => write!(f, "node {n}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl BssProgram {
    pub fn new(nodes: Vec<BssNode>, entry: usize) -> Result<Self, BssError> {
        let program = BssProgram { nodes, entry };
        let diagnostics = program.validate();
        if diagnostics.is_empty() {
            Ok(program)
        } else {
            Err(BssError::Malformed(diagnostics))
        }
    }

    pub fn nodes(&self) -> &[BssNode] {
        &self.nodes
    }

    pub fn entry(&self) -> usize {
        self.entry
    }

    pub fn input_count(&self) -> usize {
        match self.nodes[self.entry] {
            BssNode::Input { count, .. } => count,
            _ => unreachable!("validated"),
        }
    }

    fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let at = |node: usize, message: String| Diagnostic { node: Some(node), message };
        if self.entry >= self.nodes.len() {
            diags.push(Diagnostic { node: None, message: format!("dangling target: entry {} does not exist", self.entry) });
            return diags;
        }
        if !matches!(self.nodes[self.entry], BssNode::Input { .. }) {
            diags.push(at(self.entry, "entry node must be an input node".into()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if matches!(node, BssNode::Input { .. }) && i != self.entry {
                diags.push(at(i, "only the entry node may be an input node".into()));
            }
            for t in node.successors() {
                if t >= self.nodes.len() {
                    diags.push(at(i, format!("dangling target {t}")));
                }
            }
        }
        if !diags.is_empty() {
            return diags;
        }
        diags.extend(self.check_initialization());
        diags
    }

    /// Must-initialized register analysis: a register is readable at a node
    /// only if every path from the entry writes it first.
    fn check_initialization(&self) -> Vec<Diagnostic> {
        let n = self.nodes.len();
        let mut init_in: Vec<Option<BTreeSet<Reg>>> = vec![None; n];
        init_in[self.entry] = Some(BTreeSet::new());
        let mut work = vec![self.entry];
        while let Some(i) = work.pop() {
            let mut out = init_in[i].clone().expect("visited");
            match &self.nodes[i] {
                BssNode::Input { count, .. } => out.extend(0..*count),
                BssNode::Compute { target, .. } => {
                    out.insert(*target);
                }
                _ => {}
            }
            for s in self.nodes[i].successors() {
                let merged = match &init_in[s] {
                    None => out.clone(),
                    Some(cur) => cur.intersection(&out).copied().collect(),
                };
                if init_in[s].as_ref() != Some(&merged) {
                    init_in[s] = Some(merged);
                    work.push(s);
                }
            }
        }
        let mut diags = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let Some(ready) = &init_in[i] else { continue };
            let reads: Vec<Reg> = match node {
                BssNode::Compute { lhs, rhs, .. } => [lhs, rhs]
                    .into_iter()
                    .filter_map(|o| match o {
                        Operand::Reg(r) => Some(*r),
                        Operand::Const(_) => None,
                    })
                    .collect(),
                BssNode::Branch { reg, .. } => vec![*reg],
                BssNode::Output { regs } => regs.clone(),
                BssNode::Input { .. } => vec![],
            };
            for r in reads {
                if !ready.contains(&r) {
                    diags.push(Diagnostic { node: Some(i), message: format!("uninitialized register r{r}") });
                }
            }
        }
        diags
    }

    pub fn to_json(&self) -> String {
        let raw = RawProgramOut {
            entry: self.entry,
            nodes: self.nodes.iter().map(RawNode::from).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("program serializes")
    }
}

/// On-disk node form. Every node carries a `kind`; the remaining fields
/// depend on it.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<Reg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    op: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lhs: Option<Operand>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rhs: Option<Operand>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reg: Option<Reg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pred: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    then: Option<usize>,
    #[serde(rename = "else", skip_serializing_if = "Option::is_none")]
    otherwise: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regs: Option<Vec<Reg>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    next: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProgram {
    #[serde(default)]
    entry: usize,
    nodes: Vec<serde_json::Value>,
}

#[derive(Serialize)]
struct RawProgramOut {
    entry: usize,
    nodes: Vec<RawNode>,
}

impl From<&BssNode> for RawNode {
    fn from(node: &BssNode) -> Self {
        match node {
            BssNode::Input { count, next } => {
                RawNode { kind: "input".into(), count: Some(*count), next: Some(*next), ..Default::default() }
            }
            BssNode::Compute { target, op, lhs, rhs, next } => RawNode {
                kind: "compute".into(),
                target: Some(*target),
                op: Some(serde_json::to_value(op).expect("op").as_str().expect("str").to_string()),
                lhs: Some(lhs.clone()),
                rhs: Some(rhs.clone()),
                next: Some(*next),
                ..Default::default()
            },
            BssNode::Branch { reg, pred, then, otherwise } => RawNode {
                kind: "branch".into(),
                reg: Some(*reg),
                pred: Some(serde_json::to_value(pred).expect("pred").as_str().expect("str").to_string()),
                then: Some(*then),
                otherwise: Some(*otherwise),
                ..Default::default()
            },
            BssNode::Output { regs } => RawNode { kind: "output".into(), regs: Some(regs.clone()), ..Default::default() },
        }
    }
}

fn convert_node(i: usize, value: serde_json::Value) -> Result<BssNode, Diagnostic> {
    let err = |message: String| Diagnostic { node: Some(i), message };
    let raw: RawNode = serde_json::from_value(value).map_err(|e| err(e.to_string()))?;
    let need = |field: &str| err(format!("missing field '{field}' for {} node", raw.kind));
    match raw.kind.as_str() {
        "input" => Ok(BssNode::Input {
            count: raw.count.ok_or_else(|| need("count"))?,
            next: raw.next.ok_or_else(|| need("next"))?,
        }),
        "compute" => {
            let op_name = raw.op.as_deref().ok_or_else(|| need("op"))?;
            let op = match op_name {
                "add" | "+" => FieldOp::Add,
                "sub" | "-" => FieldOp::Sub,
                "mul" | "*" => FieldOp::Mul,
                "div" | "/" => FieldOp::Div,
                other => return Err(err(format!("unknown op '{other}'"))),
            };
            Ok(BssNode::Compute {
                target: raw.target.ok_or_else(|| need("target"))?,
                op,
                lhs: raw.lhs.clone().ok_or_else(|| need("lhs"))?,
                rhs: raw.rhs.clone().ok_or_else(|| need("rhs"))?,
                next: raw.next.ok_or_else(|| need("next"))?,
            })
        }
        "branch" => {
            let pred = match raw.pred.as_deref().ok_or_else(|| need("pred"))? {
                "lt0" | "<0" => Predicate::Negative,
                "eq0" | "=0" => Predicate::Zero,
                "gt0" | ">0" => Predicate::Positive,
                other => return Err(err(format!("unknown predicate '{other}'"))),
            };
            Ok(BssNode::Branch {
                reg: raw.reg.ok_or_else(|| need("reg"))?,
                pred,
                then: raw.then.ok_or_else(|| need("then"))?,
                otherwise: raw.otherwise.ok_or_else(|| need("else"))?,
            })
        }
        "output" => Ok(BssNode::Output { regs: raw.regs.clone().ok_or_else(|| need("regs"))? }),
        other => Err(err(format!("unknown node kind '{other}'"))),
    }
}

/// Parses and validates a program in the JSON node-array format.
pub fn parse_program(text: &str) -> Result<BssProgram, BssError> {
    let raw: RawProgram = serde_json::from_str(text)
        .map_err(|e| BssError::Malformed(vec![Diagnostic { node: None, message: e.to_string() }]))?;
    let mut nodes = Vec::with_capacity(raw.nodes.len());
    let mut diags = Vec::new();
    for (i, v) in raw.nodes.into_iter().enumerate() {
        match convert_node(i, v) {
            Ok(n) => nodes.push(n),
            Err(d) => diags.push(d),
        }
    }
    if !diags.is_empty() {
        return Err(BssError::Malformed(diags));
    }
    BssProgram::new(nodes, raw.entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bss::ABS_PROGRAM;

    #[test]
    fn abs_program_parses() {
        let p = parse_program(ABS_PROGRAM).unwrap();
        assert_eq!(p.nodes().len(), 4);
        assert_eq!(p.input_count(), 1);
        let again = parse_program(&p.to_json()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn dangling_target() {
        let text = ABS_PROGRAM.replace(r#""else": 3"#, r#""else": 9"#);
        let err = parse_program(&text).unwrap_err();
        assert!(err.to_string().contains("dangling target"), "{err}");
    }

    #[test]
    fn unknown_op_reports_location() {
        let text = ABS_PROGRAM.replace(r#""op": "sub""#, r#""op": "pow""#);
        match parse_program(&text).unwrap_err() {
            BssError::Malformed(d) => {
                assert_eq!(d[0].node, Some(2));
                assert!(d[0].message.contains("unknown op"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uninitialized_register() {
        let text = ABS_PROGRAM.replace(r#""regs": [0]"#, r#""regs": [0, 5]"#);
        let err = parse_program(&text).unwrap_err();
        assert!(err.to_string().contains("uninitialized register r5"), "{err}");
    }

    #[test]
    fn register_written_on_one_branch_only() {
        let text = r#"{"nodes": [
            {"kind": "input", "count": 1, "next": 1},
            {"kind": "branch", "reg": 0, "pred": "gt0", "then": 2, "else": 3},
            {"kind": "compute", "target": 1, "op": "add", "lhs": {"reg": 0}, "rhs": {"const": "1"}, "next": 3},
            {"kind": "output", "regs": [1]}
        ]}"#;
        let err = parse_program(text).unwrap_err();
        assert!(err.to_string().contains("node 3: uninitialized register r1"), "{err}");
    }

    #[test]
    fn division_by_constant_zero_is_accepted_statically() {
        let text = r#"{"nodes": [
            {"kind": "input", "count": 1, "next": 1},
            {"kind": "compute", "target": 0, "op": "div", "lhs": {"reg": 0}, "rhs": {"const": "0"}, "next": 2},
            {"kind": "output", "regs": [0]}
        ]}"#;
        assert!(parse_program(text).is_ok());
    }
}
