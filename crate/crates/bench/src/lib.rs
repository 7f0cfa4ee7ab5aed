//! Fixed inputs shared by the criterion benches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use realgap_core::bss::{compile_relu_net, BssProgram};
use realgap_core::invprob::{random_instance, Instance, Param};
use realgap_core::neural::NeuralNet;
use realgap_core::number::Rational;

pub fn lasso_instance(m: usize, n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(&mut rng, m, n, Param::Lambda(Rational::frac(1, 4))).expect("valid shape")
}

pub fn bp_instance(m: usize, n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(&mut rng, m, n, Param::Epsilon(Rational::frac(1, 8))).expect("valid shape")
}

/// Compiled random network and a matching input.
pub fn compiled_net(input_dim: usize, hidden: &[usize], seed: u64) -> (BssProgram, Vec<Rational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = NeuralNet::random(&mut rng, input_dim, hidden, 1);
    let x = (0..input_dim).map(|i| Rational::frac(i as i64 - 1, 3)).collect();
    (compile_relu_net(&net).expect("compiles"), x)
}
