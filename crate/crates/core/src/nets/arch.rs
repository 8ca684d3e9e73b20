use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::load(format!("unknown activation `{other}`"))),
        }
    }
}

/// Shape of a fully-connected network. Hidden layers share one activation and
/// the output layer is always linear.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArchSpec {
    pub input_dim: usize,
    pub hidden_sizes: Vec<usize>,
    pub output_dim: usize,
    pub activation: Activation,
}

/// One dense layer inside a flat parameter vector.
///
/// Weights are stored row-major as `[fan_out][fan_in]` starting at `w_offset`,
/// immediately followed by `fan_out` biases at `b_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layer {
    pub fan_in: usize,
    pub fan_out: usize,
    pub w_offset: usize,
    pub b_offset: usize,
    pub activation: Activation,
}

impl Layer {
    pub fn param_count(&self) -> usize {
        self.fan_in * self.fan_out + self.fan_out
    }

    pub fn end(&self) -> usize {
        self.b_offset + self.fan_out
    }
}

impl ArchSpec {
    /// Tanh hidden layers, linear output.
    pub fn mlp(input_dim: usize, hidden_sizes: &[usize], output_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_sizes: hidden_sizes.to_vec(),
            output_dim,
            activation: Activation::Tanh,
        }
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 || self.hidden_sizes.contains(&0) {
            return Err(Error::config(format!(
                "architecture {self} has a zero-width layer"
            )));
        }
        Ok(())
    }

    /// Layer widths from input to output.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_sizes.len() + 2);
        w.push(self.input_dim);
        w.extend_from_slice(&self.hidden_sizes);
        w.push(self.output_dim);
        w
    }

    pub fn layers(&self) -> Vec<Layer> {
        let widths = self.widths();
        let n = widths.len() - 1;
        let mut offset = 0;
        widths
            .windows(2)
            .enumerate()
            .map(|(i, pair)| {
                let (fan_in, fan_out) = (pair[0], pair[1]);
                let layer = Layer {
                    fan_in,
                    fan_out,
                    w_offset: offset,
                    b_offset: offset + fan_in * fan_out,
                    activation: if i + 1 == n {
                        Activation::Identity
                    } else {
                        self.activation
                    },
                };
                offset = layer.end();
                layer
            })
            .collect()
    }

    /// Σ over layers of `fan_in·fan_out + fan_out`.
    pub fn param_count(&self) -> usize {
        self.widths().windows(2).map(|p| p[0] * p[1] + p[1]).sum()
    }

    pub fn max_width(&self) -> usize {
        self.widths().into_iter().max().unwrap_or(0)
    }
}

/// Renders as `2-8-8-1/tanh`; parsed back by [`FromStr`].
impl fmt::Display for ArchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<String> = self.widths().iter().map(usize::to_string).collect();
        write!(f, "{}/{}", widths.join("-"), self.activation.name())
    }
}

impl FromStr for ArchSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (dims, act) = s
            .split_once('/')
            .ok_or_else(|| Error::load(format!("architecture `{s}` lacks an activation")))?;
        let widths = dims
            .split('-')
            .map(|w| {
                w.parse::<usize>()
                    .map_err(|_| Error::load(format!("bad layer width `{w}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if widths.len() < 2 {
            return Err(Error::load(format!("architecture `{s}` needs at least two widths")));
        }
        let spec = ArchSpec {
            input_dim: widths[0],
            hidden_sizes: widths[1..widths.len() - 1].to_vec(),
            output_dim: widths[widths.len() - 1],
            activation: act.parse()?,
        };
        spec.validate().map_err(|e| Error::load(e.to_string()))?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_counts() {
        assert_eq!(ArchSpec::mlp(2, &[8; 6], 1).param_count(), 393);
        assert_eq!(ArchSpec::mlp(3, &[8; 6], 1).param_count(), 401);
        assert_eq!(ArchSpec::mlp(3, &[32; 10], 1).param_count(), 9665);
        assert_eq!(ArchSpec::mlp(1, &[32, 32, 32, 16], 393).param_count(), 9385);
        assert_eq!(ArchSpec::mlp(3, &[16], 3).param_count(), 115);
    }

    #[test]
    fn layout_is_contiguous() {
        let spec = ArchSpec::mlp(3, &[4, 5], 2);
        let layers = spec.layers();
        assert_eq!(layers[0].w_offset, 0);
        assert_eq!(layers[0].b_offset, 12);
        assert_eq!(layers[1].w_offset, 16);
        assert_eq!(layers.last().unwrap().end(), spec.param_count());
        assert_eq!(layers[0].activation, Activation::Tanh);
        assert_eq!(layers[2].activation, Activation::Identity);
    }

    #[test]
    fn descriptor_round_trip() {
        let spec = ArchSpec::mlp(1, &[32, 32, 32, 16], 393);
        assert_eq!(spec.to_string(), "1-32-32-32-16-393/tanh");
        assert_eq!(spec.to_string().parse::<ArchSpec>().unwrap(), spec);
        assert!("1-0-3/tanh".parse::<ArchSpec>().is_err());
        assert!("1-3".parse::<ArchSpec>().is_err());
        assert!("4/tanh".parse::<ArchSpec>().is_err());
        assert!("2-2/relu".parse::<ArchSpec>().is_err());
    }
}
