use super::arch::{Activation, ArchSpec, Layer};
use crate::autodiff::Scalar;
use crate::error::{Error, Result};

/// Forward pass of a dense network over any [`Scalar`].
///
/// Weights and inputs share one scalar type; lift real weights with
/// `HyperDual::constant` or `Tape::leaf` as needed.
pub fn forward<S: Scalar>(spec: &ArchSpec, theta: &[S], input: &[S]) -> Result<Vec<S>> {
    if input.len() != spec.input_dim {
        return Err(Error::config(format!(
            "{spec} takes {} inputs, got {}",
            spec.input_dim,
            input.len()
        )));
    }
    if theta.len() != spec.param_count() {
        return Err(Error::config(format!(
            "{spec} needs {} parameters, got {}",
            spec.param_count(),
            theta.len()
        )));
    }
    let mut h: Vec<S> = input.to_vec();
    for layer in spec.layers() {
        let w = &theta[layer.w_offset..layer.b_offset];
        let b = &theta[layer.b_offset..layer.end()];
        let next = (0..layer.fan_out)
            .map(|o| {
                let row = &w[o * layer.fan_in..(o + 1) * layer.fan_in];
                let z = row.iter().zip(&h).fold(b[o], |acc, (&wi, &hi)| acc + wi * hi);
                match layer.activation {
                    Activation::Tanh => z.tanh(),
                    Activation::Identity => z,
                }
            })
            .collect();
        h = next;
    }
    Ok(h)
}

/// Layer table and buffers for repeated real-valued evaluation of one spec.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    layers: Vec<Layer>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Workspace {
    pub fn new(spec: &ArchSpec) -> Self {
        let w = spec.max_width();
        Self {
            layers: spec.layers(),
            a: Vec::with_capacity(w),
            b: Vec::with_capacity(w),
        }
    }
}

/// Allocation-free real forward pass with the spec the workspace was built for.
/// Shapes are the caller's responsibility.
pub fn forward_into(theta: &[f64], input: &[f64], ws: &mut Workspace, out: &mut [f64]) {
    let Workspace { layers, a: cur, b: next } = ws;
    debug_assert_eq!(input.len(), layers[0].fan_in);
    cur.clear();
    cur.extend_from_slice(input);
    for layer in layers.iter() {
        let w = &theta[layer.w_offset..layer.b_offset];
        let b = &theta[layer.b_offset..layer.end()];
        next.clear();
        for o in 0..layer.fan_out {
            let row = &w[o * layer.fan_in..(o + 1) * layer.fan_in];
            let z = b[o] + row.iter().zip(cur.iter()).map(|(x, y)| x * y).sum::<f64>();
            next.push(match layer.activation {
                Activation::Tanh => z.tanh(),
                Activation::Identity => z,
            });
        }
        std::mem::swap(cur, next);
    }
    out.copy_from_slice(cur);
}
