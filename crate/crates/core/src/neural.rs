//! Feedforward ReLU networks `Φ(x) = T_L ρ(T_{L−1} ρ(… ρ(T_1 x)))` with affine
//! `T_ℓ x = W_ℓ x + b_ℓ`, evaluated exactly over rationals or effectively on
//! representations.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::number::{Rational, RealOracle};
use crate::turing::{refine_loop, Expr, NodeId, TuringError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeuralError {
    #[error("network has no layers")]
    Empty,
    #[error("layer {layer}: {message}")]
    Shape { layer: usize, message: String },
    #[error("expected input of dimension {expected}, got {got}")]
    InputDimension { expected: usize, got: usize },
    #[error(transparent)]
    Effective(#[from] TuringError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Relu,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    #[serde(rename = "W")]
    pub weights: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
}

impl Layer {
    pub fn new(weights: Vec<Vec<Rational>>, b: Vec<Rational>) -> Self {
        Layer { weights, b }
    }

    pub fn out_dim(&self) -> usize {
        self.b.len()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetRepr")]
pub struct NeuralNet {
    layers: Vec<Layer>,
    activation: Activation,
}

#[derive(Deserialize)]
struct NetRepr {
    layers: Vec<Layer>,
    #[serde(default)]
    activation: Activation,
}

impl TryFrom<NetRepr> for NeuralNet {
    type Error = NeuralError;
    fn try_from(r: NetRepr) -> Result<Self, Self::Error> {
        NeuralNet::new(r.layers, r.activation)
    }
}

impl NeuralNet {
    pub fn new(layers: Vec<Layer>, activation: Activation) -> Result<Self, NeuralError> {
        if layers.is_empty() {
            return Err(NeuralError::Empty);
        }
        let mut prev_out: Option<usize> = None;
        for (l, layer) in layers.iter().enumerate() {
            let shape = |message: String| NeuralError::Shape { layer: l, message };
            if layer.weights.len() != layer.b.len() {
                return Err(shape(format!("{} weight rows but {} biases", layer.weights.len(), layer.b.len())));
            }
            if layer.b.is_empty() {
                return Err(shape("zero width".into()));
            }
            let cols = layer.in_dim();
            if cols == 0 || layer.weights.iter().any(|row| row.len() != cols) {
                return Err(shape("ragged or empty weight matrix".into()));
            }
            if let Some(p) = prev_out {
                if p != cols {
                    return Err(shape(format!("expects {cols} inputs but previous layer has {p} outputs")));
                }
            }
            prev_out = Some(layer.out_dim());
        }
        Ok(NeuralNet { layers, activation })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Number of weights and biases.
    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.out_dim() * (l.in_dim() + 1)).sum()
    }

    /// Random net with entries `p/q`, `|p/q| ≤ 2`, `q ≤ 16`.
    pub fn random(rng: &mut impl Rng, input_dim: usize, hidden: &[usize], output_dim: usize) -> Self {
        let mut dims = vec![input_dim];
        dims.extend_from_slice(hidden);
        dims.push(output_dim);
        let layers = dims
            .windows(2)
            .map(|w| {
                let weights = (0..w[1]).map(|_| (0..w[0]).map(|_| random_entry(rng)).collect()).collect();
                let b = (0..w[1]).map(|_| random_entry(rng)).collect();
                Layer { weights, b }
            })
            .collect();
        NeuralNet::new(layers, Activation::Relu).expect("consistent dimensions")
    }

    /// Expression graph of Φ. Inputs `0..d` are `x`; with `symbolic_params`
    /// the parameters follow as further inputs in layer order (each layer's
    /// weights row-major, then its biases), otherwise they are constants.
    pub fn to_expr(&self, symbolic_params: bool) -> Expr {
        let mut e = Expr::new();
        let mut next_input = self.input_dim();
        let mut param = |e: &mut Expr, q: &Rational| -> NodeId {
            if symbolic_params {
                let id = e.input(next_input);
                next_input += 1;
                id
            } else {
                e.constant(q.clone())
            }
        };
        let mut current: Vec<NodeId> = (0..self.input_dim()).map(|i| e.input(i)).collect();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let weight_ids: Vec<Vec<NodeId>> =
                layer.weights.iter().map(|row| row.iter().map(|w| param(&mut e, w)).collect()).collect();
            let bias_ids: Vec<NodeId> = layer.b.iter().map(|b| param(&mut e, b)).collect();
            current = weight_ids
                .iter()
                .zip(&bias_ids)
                .map(|(row, &bias)| {
                    let mut acc = bias;
                    for (&w, &x) in row.iter().zip(&current) {
                        let t = e.mul(w, x);
                        acc = e.add(acc, t);
                    }
                    if l < last {
                        e.relu(acc)
                    } else {
                        acc
                    }
                })
                .collect();
        }
        for id in current {
            e.output(id);
        }
        e
    }
}

fn random_entry(rng: &mut impl Rng) -> Rational {
    let q = rng.gen_range(1..=16i64);
    let p = rng.gen_range(-2 * q..=2 * q);
    Rational::frac(p, q)
}

fn relu(x: Rational) -> Rational {
    x.max(Rational::zero())
}

fn affine(layer: &Layer, x: &[Rational]) -> Vec<Rational> {
    layer
        .weights
        .iter()
        .zip(&layer.b)
        .map(|(row, b)| row.iter().zip(x).fold(b.clone(), |acc, (w, xi)| acc + w * xi))
        .collect()
}

/// Exact rational evaluation of Φ.
pub fn forward_exact(net: &NeuralNet, x: &[Rational]) -> Result<Vec<Rational>, NeuralError> {
    if x.len() != net.input_dim() {
        return Err(NeuralError::InputDimension { expected: net.input_dim(), got: x.len() });
    }
    let last = net.layers.len() - 1;
    let mut v = x.to_vec();
    for (l, layer) in net.layers.iter().enumerate() {
        v = affine(layer, &v);
        if l < last {
            v = v.into_iter().map(relu).collect();
        }
    }
    Ok(v)
}

/// Network whose parameters are given as representations.
#[derive(Clone, Debug)]
pub struct OracleNet {
    shape: NeuralNet,
    params: Vec<RealOracle>,
}

impl OracleNet {
    /// Exact constant representations of every parameter.
    pub fn from_net(net: &NeuralNet) -> Self {
        OracleNet::with_params(net, |_, q| RealOracle::from_rational(q.clone()))
    }

    /// Builds each parameter's oracle from its flat index and rational value.
    pub fn with_params(net: &NeuralNet, mut make: impl FnMut(usize, &Rational) -> RealOracle) -> Self {
        let mut params = Vec::with_capacity(net.parameter_count());
        for layer in &net.layers {
            for row in &layer.weights {
                for w in row {
                    params.push(make(params.len(), w));
                }
            }
            for b in &layer.b {
                params.push(make(params.len(), b));
            }
        }
        OracleNet { shape: net.clone(), params }
    }

    pub fn input_dim(&self) -> usize {
        self.shape.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.shape.output_dim()
    }
}

/// Values within `2^{-k}` of Φ(x), computed from representations of the
/// parameters and the input.
pub fn forward_effective(net: &OracleNet, x: &[RealOracle], k: u32) -> Result<Vec<Rational>, NeuralError> {
    if x.len() != net.input_dim() {
        return Err(NeuralError::InputDimension { expected: net.input_dim(), got: x.len() });
    }
    let expr = net.shape.to_expr(true);
    let mut inputs = x.to_vec();
    inputs.extend(net.params.iter().cloned());
    Ok(refine_loop(&expr, &inputs, k, None)?)
}
