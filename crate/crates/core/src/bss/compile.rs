use super::program::{BssNode, BssProgram, FieldOp, Operand, Predicate, Reg};
use super::BssError;
use crate::neural::{Activation, NeuralNet};
use crate::number::Rational;

/// Emits nodes sequentially; each emitted node falls through to the next.
struct Emitter {
    nodes: Vec<BssNode>,
    next_reg: Reg,
}

impl Emitter {
    fn fresh(&mut self) -> Reg {
        self.next_reg += 1;
        self.next_reg - 1
    }

    fn compute(&mut self, target: Reg, op: FieldOp, lhs: Operand, rhs: Operand) {
        let next = self.nodes.len() + 1;
        self.nodes.push(BssNode::Compute { target, op, lhs, rhs, next });
    }
}

/// Straight-line program computing Φ exactly; ReLU becomes a sign branch
/// around a zeroing node. Node count is linear in the number of parameters.
pub fn compile_relu_net(net: &NeuralNet) -> Result<BssProgram, BssError> {
    match net.activation() {
        Activation::Relu => {}
    }
    let d = net.input_dim();
    let mut em = Emitter { nodes: vec![BssNode::Input { count: d, next: 1 }], next_reg: d };
    let mut current: Vec<Reg> = (0..d).collect();
    let tmp = em.fresh();
    let last = net.depth() - 1;
    for (l, layer) in net.layers().iter().enumerate() {
        let mut produced = Vec::with_capacity(layer.out_dim());
        for (row, bias) in layer.weights.iter().zip(&layer.b) {
            let acc = em.fresh();
            em.compute(acc, FieldOp::Add, Operand::Const(bias.clone()), Operand::Const(Rational::zero()));
            for (w, &x) in row.iter().zip(&current) {
                if w.is_zero() {
                    continue;
                }
                em.compute(tmp, FieldOp::Mul, Operand::Reg(x), Operand::Const(w.clone()));
                em.compute(acc, FieldOp::Add, Operand::Reg(acc), Operand::Reg(tmp));
            }
            if l < last {
                // branch: acc < 0 → zero it, else skip
                let here = em.nodes.len();
                em.nodes.push(BssNode::Branch { reg: acc, pred: Predicate::Negative, then: here + 1, otherwise: here + 2 });
                em.compute(acc, FieldOp::Mul, Operand::Reg(acc), Operand::Const(Rational::zero()));
            }
            produced.push(acc);
        }
        current = produced;
    }
    em.nodes.push(BssNode::Output { regs: current });
    BssProgram::new(em.nodes, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bss::{run, DEFAULT_MAX_STEPS};
    use crate::neural::{forward_exact, Layer};

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn identity_net_returns_input() {
        let net = NeuralNet::new(vec![Layer::new(vec![vec![r(1)]], vec![r(0)])], Activation::Relu).unwrap();
        let p = compile_relu_net(&net).unwrap();
        let out = run(&p, &[Rational::frac(5, 7)], DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(out.outputs, vec![Rational::frac(5, 7)]);
    }

    #[test]
    fn abs_net_on_minus_two() {
        let net = NeuralNet::new(
            vec![
                Layer::new(vec![vec![r(1)], vec![r(-1)]], vec![r(0), r(0)]),
                Layer::new(vec![vec![r(1), r(1)]], vec![r(0)]),
            ],
            Activation::Relu,
        )
        .unwrap();
        let p = compile_relu_net(&net).unwrap();
        assert_eq!(run(&p, &[r(-2)], DEFAULT_MAX_STEPS).unwrap().outputs, vec![r(2)]);
        assert_eq!(forward_exact(&net, &[r(-2)]).unwrap(), vec![r(2)]);
    }

    #[test]
    fn size_is_linear_in_parameters() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let net = NeuralNet::random(&mut rng, 4, &[5, 5], 3);
        let p = compile_relu_net(&net).unwrap();
        assert!(p.nodes().len() <= 2 + 3 * net.parameter_count());
    }
}
