//! Turing-model evaluation: maps computed on representations with guaranteed
//! output precision, and a checker that certifies representation dependence.

mod effective;
mod expr;
mod transparency;

use thiserror::Error;

use crate::number::NumberError;

pub use effective::{evaluate_effective, EffectiveMap};
pub use expr::{default_budget, refine_enclosure, refine_loop, Expr, Node, NodeId};
pub use transparency::{
    check_transparency, representation_variants, Representation, TransparencyReport, VariantOutcome, Verdict,
    Witness,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TuringError {
    #[error("precision exhaustion: could not reach 2^-{target} within query depth {budget}")]
    PrecisionExhausted { target: u32, budget: u32 },
    #[error("expected {expected} inputs, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("transparency check needs at least 2 representations, got {0}")]
    TooFewVariants(usize),
    #[error(transparent)]
    Number(#[from] NumberError),
}
