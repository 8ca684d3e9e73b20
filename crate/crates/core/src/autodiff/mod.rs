//! Exact derivatives at two nesting levels.
//!
//! [`HyperDual`] carries input derivatives forward through a network, and
//! [`Tape`] records HyperDual-valued nodes so a reverse sweep returns parameter
//! gradients of losses that contain those input derivatives.

mod hyperdual;
mod scalar;
mod tape;

pub use hyperdual::{Component, HyperDual};
pub use scalar::Scalar;
pub use tape::{Adjoints, NodeId, PrimitiveOp, Tape, Var};

pub(crate) use tape::chain_vjp;

/// A loss value together with its gradient over the trainable parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GradResult {
    pub loss_value: f64,
    pub gradient: Vec<f64>,
}

impl GradResult {
    pub fn zeros(n: usize) -> Self {
        Self {
            loss_value: 0.0,
            gradient: vec![0.0; n],
        }
    }
}
