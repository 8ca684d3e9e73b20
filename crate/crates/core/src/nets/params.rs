use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arch::ArchSpec;
use crate::error::{Error, Result};

/// Scale applied to the hypernetwork's output-layer weights.
pub const HYPER_OUTPUT_SCALE: f64 = 0.1;

/// Flat parameters of one network, in the layout described by [`ArchSpec::layers`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    spec: ArchSpec,
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(spec: ArchSpec, values: Vec<f64>) -> Result<Self> {
        let expected = spec.param_count();
        if values.len() != expected {
            return Err(Error::config(format!(
                "{spec} needs {expected} parameters, got {}",
                values.len()
            )));
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: ArchSpec) -> Self {
        let n = spec.param_count();
        Self {
            spec,
            values: vec![0.0; n],
        }
    }

    pub fn spec(&self) -> &ArchSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitMode {
    /// Glorot-uniform weights, zero biases.
    Standard,
    /// Glorot everywhere except the output layer, whose weights are scaled by
    /// [`HYPER_OUTPUT_SCALE`] and whose biases hold a Glorot draw of `main`.
    HyperOutputScaled { main: ArchSpec },
}

pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn glorot_fill(spec: &ArchSpec, out: &mut [f64], rng: &mut ChaCha8Rng) {
    for layer in spec.layers() {
        let bound = glorot_bound(layer.fan_in, layer.fan_out);
        for w in &mut out[layer.w_offset..layer.b_offset] {
            *w = rng.random_range(-bound..bound);
        }
        out[layer.b_offset..layer.end()].fill(0.0);
    }
}

pub fn init_params(spec: &ArchSpec, seed: u64, mode: &InitMode) -> Result<ParamVector> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pv = ParamVector::zeros(spec.clone());
    glorot_fill(spec, &mut pv.values, &mut rng);
    if let InitMode::HyperOutputScaled { main } = mode {
        let n_main = main.param_count();
        if spec.output_dim != n_main {
            return Err(Error::config(format!(
                "hypernetwork {spec} emits {} values but {main} has {n_main} parameters",
                spec.output_dim
            )));
        }
        let last = *spec.layers().last().expect("validated spec has a layer");
        for w in &mut pv.values[last.w_offset..last.b_offset] {
            *w *= HYPER_OUTPUT_SCALE;
        }
        glorot_fill(main, &mut pv.values[last.b_offset..last.end()], &mut rng);
    }
    Ok(pv)
}
