use serde::{Deserialize, Serialize};

use super::TuringError;
use crate::number::{DyadicInterval, NumberError, Rational, RealOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Input(usize),
    Const(Rational),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Div(NodeId, NodeId),
    Neg(NodeId),
    Relu(NodeId),
}

/// Straight-line expression DAG over `{+, −, ×, ÷, max(0,·)}`.
///
/// Nodes only reference earlier nodes, so a single forward sweep evaluates
/// the whole graph.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    nodes: Vec<Node>,
    outputs: Vec<NodeId>,
    arity: usize,
}

impl Expr {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, node: Node) -> NodeId {
        let check = |id: &NodeId| assert!(id.0 < self.nodes.len(), "forward reference to node {}", id.0);
        match &node {
            Node::Input(i) => self.arity = self.arity.max(i + 1),
            Node::Const(_) => {}
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                check(a);
                check(b);
            }
            Node::Neg(a) | Node::Relu(a) => check(a),
        }
        self.nodes.push(node);
        NodeId(self.nodes.len() - 1)
    }

    pub fn input(&mut self, i: usize) -> NodeId {
        self.push(Node::Input(i))
    }

    pub fn constant(&mut self, q: Rational) -> NodeId {
        self.push(Node::Const(q))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Mul(a, b))
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Div(a, b))
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.push(Node::Neg(a))
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        self.push(Node::Relu(a))
    }

    pub fn output(&mut self, id: NodeId) {
        assert!(id.0 < self.nodes.len());
        self.outputs.push(id);
    }

    /// Number of inputs referenced (highest input index + 1).
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Interval image of the expression over the given input boxes.
    pub fn eval_intervals(&self, inputs: &[DyadicInterval]) -> Result<Vec<DyadicInterval>, NumberError> {
        let mut vals: Vec<DyadicInterval> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Input(i) => inputs[*i].clone(),
                Node::Const(q) => DyadicInterval::point(q.clone()),
                Node::Add(a, b) => vals[a.0].add(&vals[b.0]),
                Node::Sub(a, b) => vals[a.0].sub(&vals[b.0]),
                Node::Mul(a, b) => vals[a.0].mul(&vals[b.0]),
                Node::Div(a, b) => vals[a.0].div(&vals[b.0])?,
                Node::Neg(a) => vals[a.0].neg(),
                Node::Relu(a) => vals[a.0].relu(),
            };
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|id| vals[id.0].clone()).collect())
    }

    /// Exact rational evaluation at a point.
    pub fn eval_exact(&self, inputs: &[Rational]) -> Result<Vec<Rational>, NumberError> {
        let mut vals: Vec<Rational> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Input(i) => inputs[*i].clone(),
                Node::Const(q) => q.clone(),
                Node::Add(a, b) => &vals[a.0] + &vals[b.0],
                Node::Sub(a, b) => &vals[a.0] - &vals[b.0],
                Node::Mul(a, b) => &vals[a.0] * &vals[b.0],
                Node::Div(a, b) => vals[a.0].checked_div(&vals[b.0])?,
                Node::Neg(a) => -&vals[a.0],
                Node::Relu(a) => vals[a.0].clone().max(Rational::zero()),
            };
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|id| vals[id.0].clone()).collect())
    }
}

/// Default query-depth budget for target precision `k`.
pub fn default_budget(k: u32) -> u32 {
    4 * k + 64
}

/// Enclosures of the outputs with every width at most `2^{-k}`, obtained by
/// querying the inputs at precision `j = k, k+1, …` up to `budget`.
///
/// Returns the enclosures together with the precision `j` that achieved them.
pub fn refine_enclosure(
    expr: &Expr,
    inputs: &[RealOracle],
    k: u32,
    budget: u32,
) -> Result<(Vec<DyadicInterval>, u32), TuringError> {
    if inputs.len() < expr.arity() {
        return Err(TuringError::Arity { expected: expr.arity(), got: inputs.len() });
    }
    let target = Rational::pow2_neg(k);
    for j in k..=budget.max(k) {
        let boxes: Vec<DyadicInterval> = inputs.iter().map(|o| o.enclosure(j)).collect();
        match expr.eval_intervals(&boxes) {
            Ok(out) if out.iter().all(|iv| iv.width() <= target) => return Ok((out, j)),
            Ok(_) | Err(NumberError::RefinementRequired) => {}
            Err(e) => return Err(TuringError::Number(e)),
        }
    }
    Err(TuringError::PrecisionExhausted { target: k, budget })
}

/// Midpoints of the refined enclosures: each coordinate is within `2^{-k}`
/// (in fact `2^{-(k+1)}`) of the exact value.
pub fn refine_loop(
    expr: &Expr,
    inputs: &[RealOracle],
    k: u32,
    budget: Option<u32>,
) -> Result<Vec<Rational>, TuringError> {
    let budget = budget.unwrap_or_else(|| default_budget(k));
    let (enclosures, _) = refine_enclosure(expr, inputs, k, budget)?;
    Ok(enclosures.iter().map(DyadicInterval::midpoint).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::SignPattern;

    fn square_expr() -> Expr {
        let mut e = Expr::new();
        let x = e.input(0);
        let sq = e.mul(x, x);
        e.output(sq);
        e
    }

    #[test]
    fn square_of_constant_is_exact() {
        let out = refine_loop(&square_expr(), &[RealOracle::from_rational(Rational::from_int(2))], 8, None).unwrap();
        assert_eq!(out, vec![Rational::from_int(4)]);
    }

    #[test]
    fn reciprocal_at_zero_exhausts_budget() {
        let mut e = Expr::new();
        let one = e.constant(Rational::one());
        let x = e.input(0);
        let q = e.div(one, x);
        e.output(q);
        for oracle in [
            RealOracle::from_rational(Rational::zero()),
            RealOracle::perturbed(Rational::zero(), SignPattern::Alternating(1)),
        ] {
            let err = refine_loop(&e, &[oracle], 4, Some(40)).unwrap_err();
            assert!(matches!(err, TuringError::PrecisionExhausted { .. }));
        }
    }

    #[test]
    fn relu_at_zero_meets_bound() {
        let mut e = Expr::new();
        let x = e.input(0);
        let r = e.relu(x);
        e.output(r);
        let oracle = RealOracle::perturbed(Rational::zero(), SignPattern::Constant(1));
        let out = refine_loop(&e, &[oracle], 6, None).unwrap();
        assert!(out[0].abs() <= Rational::pow2_neg(6));
    }

    #[test]
    fn add_one_under_perturbation() {
        let mut e = Expr::new();
        let x = e.input(0);
        let one = e.constant(Rational::one());
        let s = e.add(x, one);
        e.output(s);
        let oracle = RealOracle::perturbed(Rational::zero(), SignPattern::Alternating(-1));
        let out = refine_loop(&e, &[oracle], 4, None).unwrap();
        assert!((&out[0] - Rational::one()).abs() <= Rational::frac(1, 16));
    }

    #[test]
    fn missing_inputs_rejected() {
        let err = refine_loop(&square_expr(), &[], 4, None).unwrap_err();
        assert!(matches!(err, TuringError::Arity { expected: 1, got: 0 }));
    }
}
