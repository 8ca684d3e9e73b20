//! Reverse-mode tape whose node values are [`HyperDual`]s.
//!
//! Every node stores a full truncated Taylor value, and the backward sweep
//! propagates one adjoint per Taylor coefficient. Reading the `val` adjoint of
//! a parameter leaf gives the exact gradient of a scalar loss even when that
//! loss is built from `∂u/∂t`, `∂u/∂x` or `∂²u/∂x²` of a network output.
//!
//! ```
//! use hyperpinn::autodiff::{HyperDual, Tape};
//!
//! let tape = Tape::new();
//! let w = tape.leaf(2.0);
//! let x = tape.constant(HyperDual::seed_x(3.0));
//! let u = (w * x).tanh();
//! let du_dx = u.dx();
//! let root = du_dx * du_dx;
//! let adj = tape.backward(root).unwrap();
//! assert!(adj.grad(w).is_finite());
//! ```

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::hyperdual::{Component, HyperDual};
use crate::error::{Error, Result};

/// Index of a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// Operations the tape can record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrimitiveOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Tanh,
    Sin,
    Exp,
    /// Promotes one Taylor coefficient of the operand to the value of a plain node.
    Take(Component),
}

impl PrimitiveOp {
    pub fn arity(self) -> usize {
        match self {
            PrimitiveOp::Add | PrimitiveOp::Sub | PrimitiveOp::Mul | PrimitiveOp::Div => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Leaf,
    Const,
    Prim(PrimitiveOp, [usize; 2]),
}

#[derive(Debug, Clone, Copy)]
struct Node {
    op: Op,
    value: HyperDual,
}

/// Append-only record of a computation. Rebuilt for every loss evaluation.
#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

impl fmt::Debug for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tape").field("len", &self.len()).finish()
    }
}

/// A node handle bound to its tape; arithmetic on it records new nodes.
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    id: NodeId,
}

impl fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Var({}, {:?})", self.id.0, self.value())
    }
}

/// Adjoints produced by [`Tape::backward`], one Taylor-shaped entry per node.
#[derive(Debug, Clone)]
pub struct Adjoints {
    values: Vec<HyperDual>,
}

impl Adjoints {
    /// `∂root/∂leaf` for a parameter leaf.
    pub fn grad(&self, v: Var<'_>) -> f64 {
        self.values[v.id.0].val
    }

    pub fn of(&self, id: NodeId) -> HyperDual {
        self.values[id.0]
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            nodes: RefCell::new(Vec::with_capacity(n)),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, op: Op, value: HyperDual) -> NodeId {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node { op, value });
        NodeId(nodes.len() - 1)
    }

    /// A trainable real parameter.
    pub fn leaf(&self, v: f64) -> Var<'_> {
        let id = self.push(Op::Leaf, HyperDual::constant(v));
        Var { tape: self, id }
    }

    /// A value not differentiated against (inputs, seeds, targets).
    pub fn constant(&self, v: HyperDual) -> Var<'_> {
        let id = self.push(Op::Const, v);
        Var { tape: self, id }
    }

    pub fn var(&self, id: NodeId) -> Result<Var<'_>> {
        if id.0 >= self.len() {
            return Err(Error::Internal(format!("node {} is not on the tape", id.0)));
        }
        Ok(Var { tape: self, id })
    }

    pub fn value(&self, id: NodeId) -> HyperDual {
        self.nodes.borrow()[id.0].value
    }

    /// Appends `op(operands)` and evaluates it eagerly.
    pub fn record(&self, op: PrimitiveOp, operands: &[NodeId]) -> Result<NodeId> {
        if operands.len() != op.arity() {
            return Err(Error::Internal(format!(
                "{op:?} takes {} operand(s), got {}",
                op.arity(),
                operands.len()
            )));
        }
        let len = self.len();
        if let Some(bad) = operands.iter().find(|id| id.0 >= len) {
            return Err(Error::Internal(format!(
                "operand {} out of range (tape has {len} nodes)",
                bad.0
            )));
        }
        let a = self.value(operands[0]);
        let b = operands.get(1).map(|&id| self.value(id));
        let value = match (op, b) {
            (PrimitiveOp::Add, Some(b)) => a + b,
            (PrimitiveOp::Sub, Some(b)) => a - b,
            (PrimitiveOp::Mul, Some(b)) => a * b,
            (PrimitiveOp::Div, Some(b)) => a.checked_div(b)?,
            (PrimitiveOp::Neg, None) => -a,
            (PrimitiveOp::Tanh, None) => a.tanh(),
            (PrimitiveOp::Sin, None) => a.sin(),
            (PrimitiveOp::Exp, None) => a.exp(),
            (PrimitiveOp::Take(c), None) => HyperDual::constant(a.get(c)),
            _ => unreachable!("arity checked above"),
        };
        let args = [operands[0].0, operands.get(1).map_or(usize::MAX, |id| id.0)];
        Ok(self.push(Op::Prim(op, args), value))
    }

    /// Reverse sweep from `root`. The root's `val` adjoint is seeded with 1.
    pub fn backward(&self, root: impl Into<NodeId>) -> Result<Adjoints> {
        let root = root.into();
        let nodes = self.nodes.borrow();
        if root.0 >= nodes.len() {
            return Err(Error::Internal(format!("root {} is not on the tape", root.0)));
        }
        let mut adj = vec![HyperDual::ZERO; nodes.len()];
        adj[root.0].val = 1.0;
        for i in (0..=root.0).rev() {
            let g = adj[i];
            if g == HyperDual::ZERO {
                continue;
            }
            let Op::Prim(op, [ia, ib]) = nodes[i].op else {
                continue;
            };
            let a = nodes[ia].value;
            match op {
                PrimitiveOp::Add => {
                    adj[ia] += g;
                    adj[ib] += g;
                }
                PrimitiveOp::Sub => {
                    adj[ia] += g;
                    adj[ib] += -g;
                }
                PrimitiveOp::Neg => adj[ia] += -g,
                PrimitiveOp::Mul => {
                    let b = nodes[ib].value;
                    let (ga, gb) = mul_vjp(g, a, b);
                    adj[ia] += ga;
                    adj[ib] += gb;
                }
                PrimitiveOp::Div => {
                    let b = nodes[ib].value;
                    let r = 1.0 / b.val;
                    let recip = b.chain(r, -r * r, 2.0 * r * r * r);
                    let (ga, gr) = mul_vjp(g, a, recip);
                    adj[ia] += ga;
                    adj[ib] += chain_vjp(gr, b, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
                }
                PrimitiveOp::Tanh => {
                    let s = a.val.tanh();
                    let g1 = 1.0 - s * s;
                    let g2 = -2.0 * s * g1;
                    let g3 = -2.0 * (g1 * g1 + s * g2);
                    adj[ia] += chain_vjp(g, a, g1, g2, g3);
                }
                PrimitiveOp::Sin => {
                    let (s, c) = a.val.sin_cos();
                    adj[ia] += chain_vjp(g, a, c, -s, -c);
                }
                PrimitiveOp::Exp => {
                    let e = a.val.exp();
                    adj[ia] += chain_vjp(g, a, e, e, e);
                }
                PrimitiveOp::Take(c) => {
                    let slot = match c {
                        Component::Val => &mut adj[ia].val,
                        Component::Dt => &mut adj[ia].dt,
                        Component::Dx => &mut adj[ia].dx,
                        Component::Dxx => &mut adj[ia].dxx,
                    };
                    *slot += g.val;
                }
            }
        }
        Ok(Adjoints { values: adj })
    }
}

/// Adjoint of `c = a·b` in truncated Taylor arithmetic.
#[inline]
fn mul_vjp(g: HyperDual, a: HyperDual, b: HyperDual) -> (HyperDual, HyperDual) {
    let side = |g: HyperDual, other: HyperDual| {
        HyperDual::new(
            g.val * other.val + g.dt * other.dt + g.dx * other.dx + g.dxx * other.dxx,
            g.dt * other.val,
            g.dx * other.val + 2.0 * g.dxx * other.dx,
            g.dxx * other.val,
        )
    };
    (side(g, b), side(g, a))
}

/// Adjoint of `y = f(a)` given `f'`, `f''`, `f'''` at `a.val`.
#[inline]
pub(crate) fn chain_vjp(g: HyperDual, a: HyperDual, g1: f64, g2: f64, g3: f64) -> HyperDual {
    HyperDual::new(
        g.val * g1 + g.dt * g2 * a.dt + g.dx * g2 * a.dx + g.dxx * (g2 * a.dxx + g3 * a.dx * a.dx),
        g.dt * g1,
        g.dx * g1 + 2.0 * g.dxx * g2 * a.dx,
        g.dxx * g1,
    )
}

impl<'t> Var<'t> {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn tape(&self) -> &'t Tape {
        self.tape
    }

    pub fn value(&self) -> HyperDual {
        self.tape.value(self.id)
    }

    fn unary(self, op: PrimitiveOp) -> Self {
        let id = self
            .tape
            .record(op, &[self.id])
            .expect("unary op on a live var cannot fail");
        Var { tape: self.tape, id }
    }

    fn binary(self, op: PrimitiveOp, rhs: Self) -> Self {
        assert!(
            std::ptr::eq(self.tape, rhs.tape),
            "vars from different tapes cannot be combined"
        );
        let id = self
            .tape
            .record(op, &[self.id, rhs.id])
            .expect("binary op on live vars cannot fail");
        Var { tape: self.tape, id }
    }

    pub fn tanh(self) -> Self {
        self.unary(PrimitiveOp::Tanh)
    }

    pub fn sin(self) -> Self {
        self.unary(PrimitiveOp::Sin)
    }

    pub fn exp(self) -> Self {
        self.unary(PrimitiveOp::Exp)
    }

    pub fn take(self, c: Component) -> Self {
        self.unary(PrimitiveOp::Take(c))
    }

    /// `∂/∂t` coefficient as a plain node.
    pub fn dt(self) -> Self {
        self.take(Component::Dt)
    }

    pub fn dx(self) -> Self {
        self.take(Component::Dx)
    }

    pub fn dxx(self) -> Self {
        self.take(Component::Dxx)
    }

    /// The value part with its input derivatives dropped.
    pub fn val(self) -> Self {
        self.take(Component::Val)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        let id = self.tape.record(PrimitiveOp::Div, &[self.id, rhs.id])?;
        Ok(Var { tape: self.tape, id })
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn scale(self, c: f64) -> Self {
        self * self.tape.constant(HyperDual::constant(c))
    }
}

impl From<Var<'_>> for NodeId {
    fn from(v: Var<'_>) -> Self {
        v.id
    }
}

impl<'t> Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Self) -> Self {
        self.binary(PrimitiveOp::Add, rhs)
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Self) -> Self {
        self.binary(PrimitiveOp::Sub, rhs)
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Self) -> Self {
        self.binary(PrimitiveOp::Mul, rhs)
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Self {
        self.unary(PrimitiveOp::Neg)
    }
}
