use std::ops::{Add, Mul, Neg, Sub};

use super::{HyperDual, Var};

/// Number-like values a network can be evaluated over: plain reals,
/// [`HyperDual`]s, or tape nodes.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn tanh(self) -> Self;

    /// Primal value.
    fn primal(&self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn tanh(self) -> Self {
        f64::tanh(self)
    }

    #[inline]
    fn primal(&self) -> f64 {
        *self
    }
}

impl Scalar for HyperDual {
    #[inline]
    fn tanh(self) -> Self {
        HyperDual::tanh(self)
    }

    #[inline]
    fn primal(&self) -> f64 {
        self.val
    }
}

impl Scalar for Var<'_> {
    fn tanh(self) -> Self {
        Var::tanh(self)
    }

    fn primal(&self) -> f64 {
        self.value().val
    }
}
