//! Hypernetwork → main-network composition.
//!
//! The hypernetwork maps a parameterization to the full flat parameter vector
//! of the main network with one dense output head; the main network is then an
//! ordinary MLP evaluated with those generated parameters.

use super::arch::ArchSpec;
use super::mlp::forward;
use super::params::{init_params, InitMode, ParamVector};
use crate::error::{Error, Result};

/// Input to a hypernetwork: the (encoded) parameters of the differential equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameterization(pub Vec<f64>);

impl Parameterization {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperModel {
    main_spec: ArchSpec,
    theta_h: ParamVector,
}

impl HyperModel {
    pub fn new(main_spec: ArchSpec, theta_h: ParamVector) -> Result<Self> {
        let need = main_spec.param_count();
        if theta_h.spec().output_dim != need {
            return Err(Error::config(format!(
                "hypernetwork {} emits {} values, main network {main_spec} needs {need}",
                theta_h.spec(),
                theta_h.spec().output_dim
            )));
        }
        Ok(Self { main_spec, theta_h })
    }

    /// Builds the hypernetwork shape (`lambda_dim → hidden → param_count(main)`)
    /// and initializes it in [`InitMode::HyperOutputScaled`].
    pub fn init(main_spec: ArchSpec, lambda_dim: usize, hidden: &[usize], seed: u64) -> Result<Self> {
        let hyper_spec = ArchSpec::mlp(lambda_dim, hidden, main_spec.param_count());
        let theta_h = init_params(
            &hyper_spec,
            seed,
            &InitMode::HyperOutputScaled {
                main: main_spec.clone(),
            },
        )?;
        Self::new(main_spec, theta_h)
    }

    pub fn hyper_spec(&self) -> &ArchSpec {
        self.theta_h.spec()
    }

    pub fn main_spec(&self) -> &ArchSpec {
        &self.main_spec
    }

    pub fn theta_h(&self) -> &ParamVector {
        &self.theta_h
    }

    pub fn theta_h_mut(&mut self) -> &mut ParamVector {
        &mut self.theta_h
    }

    /// One hypernetwork pass: the main network's parameters for `lambda`.
    pub fn generate_main(&self, lambda: &Parameterization) -> Result<ParamVector> {
        if lambda.dim() != self.hyper_spec().input_dim {
            return Err(Error::config(format!(
                "hypernetwork takes a {}-dimensional parameterization, got {}",
                self.hyper_spec().input_dim,
                lambda.dim()
            )));
        }
        let values = forward(self.hyper_spec(), self.theta_h.values(), lambda.as_slice())?;
        ParamVector::new(self.main_spec.clone(), values)
    }
}

/// Network structure without parameters; what the training loop needs to
/// interpret a flat trainable vector.
#[derive(Debug, Clone, PartialEq)]
pub enum NetArch {
    Plain(ArchSpec),
    Hyper { hyper: ArchSpec, main: ArchSpec },
}

impl NetArch {
    pub fn trainable_count(&self) -> usize {
        match self {
            NetArch::Plain(s) => s.param_count(),
            NetArch::Hyper { hyper, .. } => hyper.param_count(),
        }
    }

    /// The network evaluated at every query point.
    pub fn evaluated_spec(&self) -> &ArchSpec {
        match self {
            NetArch::Plain(s) => s,
            NetArch::Hyper { main, .. } => main,
        }
    }
}

/// A trained or trainable model: a plain MLP or a hypernetwork/main pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Net {
    Plain(ParamVector),
    Hyper(HyperModel),
}

impl Net {
    pub fn arch(&self) -> NetArch {
        match self {
            Net::Plain(p) => NetArch::Plain(p.spec().clone()),
            Net::Hyper(h) => NetArch::Hyper {
                hyper: h.hyper_spec().clone(),
                main: h.main_spec().clone(),
            },
        }
    }

    pub fn trainable(&self) -> &[f64] {
        match self {
            Net::Plain(p) => p.values(),
            Net::Hyper(h) => h.theta_h().values(),
        }
    }

    pub fn trainable_mut(&mut self) -> &mut [f64] {
        match self {
            Net::Plain(p) => p.values_mut(),
            Net::Hyper(h) => h.theta_h_mut().values_mut(),
        }
    }

    pub fn from_parts(arch: &NetArch, theta: Vec<f64>) -> Result<Self> {
        match arch {
            NetArch::Plain(s) => Ok(Net::Plain(ParamVector::new(s.clone(), theta)?)),
            NetArch::Hyper { hyper, main } => Ok(Net::Hyper(HyperModel::new(
                main.clone(),
                ParamVector::new(hyper.clone(), theta)?,
            )?)),
        }
    }
}
