use super::{StepPair, OUTPUT_SCALE, STATE_SCALE};
use crate::autodiff::GradResult;
use crate::error::{Error, Result};
use crate::nets::batched::{value_and_grad, BatchInput, Jets};
use crate::nets::NetArch;
use crate::optim::Evaluation;

/// Network input rows for a set of states: all `x_prev` first, then all `x_next`.
fn batch_input(arch: &NetArch, pairs: &[StepPair]) -> BatchInput<1> {
    let rows = 2 * pairs.len();
    let states = pairs.iter().map(|p| (p.x_prev, p)).chain(pairs.iter().map(|p| (p.x_next, p)));
    match arch {
        NetArch::Plain(_) => {
            let mut x = Jets::<1>::zeros(rows, 6);
            for (r, (s, p)) in states.enumerate() {
                let enc = p.params.encode();
                for i in 0..3 {
                    x.set(r, 0, i, s[i] / STATE_SCALE);
                    x.set(r, 0, 3 + i, enc[i]);
                }
            }
            BatchInput::Plain(x)
        }
        NetArch::Hyper { .. } => {
            let mut lambda = Jets::<1>::zeros(rows, 3);
            let mut x = Jets::<1>::zeros(rows, 3);
            for (r, (s, p)) in states.enumerate() {
                let enc = p.params.encode();
                for i in 0..3 {
                    lambda.set(r, 0, i, enc[i]);
                    x.set(r, 0, i, s[i] / STATE_SCALE);
                }
            }
            BatchInput::Hyper { lambda, main: x }
        }
    }
}

/// Sum over pairs and components of the squared trapezoid residual
/// `x_n − x_{n−1} − ½Δt(f̂(x_n) + f̂(x_{n−1}))`, with its gradient over the
/// trainable parameters.
pub fn multistep_loss(arch: &NetArch, theta: &[f64], pairs: &[StepPair]) -> Result<Evaluation> {
    if pairs.is_empty() {
        return Err(Error::config("multistep loss needs a non-empty batch of step pairs"));
    }
    let b = pairs.len();
    let (loss, gradient) = value_and_grad(arch, theta, batch_input(arch, pairs), |out| {
        let mut adj = Jets::<1>::zeros(out.rows(), 3);
        let mut loss = 0.0;
        for (n, p) in pairs.iter().enumerate() {
            for i in 0..3 {
                let f_prev = OUTPUT_SCALE * out.get(n, 0, i);
                let f_next = OUTPUT_SCALE * out.get(b + n, 0, i);
                let r = p.x_next[i] - p.x_prev[i] - 0.5 * p.dt * (f_next + f_prev);
                loss += r * r;
                let g = -r * p.dt * OUTPUT_SCALE;
                adj.set(n, 0, i, g);
                adj.set(b + n, 0, i, g);
            }
        }
        Ok((loss, adj))
    })?;
    Ok(Evaluation {
        grad: GradResult {
            loss_value: loss,
            gradient,
        },
        data_loss: loss,
        physics_loss: 0.0,
    })
}

/// Trapezoid residual of a right-hand side `f` on one pair.
pub fn trapezoid_residual(pair: &StepPair, f: impl Fn([f64; 3]) -> [f64; 3]) -> [f64; 3] {
    let (a, b) = (f(pair.x_prev), f(pair.x_next));
    std::array::from_fn(|i| pair.x_next[i] - pair.x_prev[i] - 0.5 * pair.dt * (a[i] + b[i]))
}
