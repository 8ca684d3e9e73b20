//! The five experiment models and their architectures.
//!
//! | problem | model          | evaluated network     | trainable |
//! |---------|----------------|-----------------------|-----------|
//! | burgers | hyperpinn      | 2 → 8×6 → 1 (393)     | 1 → 32,32,32,16 → 393 (9385) |
//! | burgers | small_baseline | 3 → 8×6 → 1 (401)     | same      |
//! | burgers | large_baseline | 3 → 32×10 → 1 (9665)  | same      |
//! | lorenz  | hyperpinn      | 3 → 16 → 3 (115)      | 3 → 16,8 → 115 (1235) |
//! | lorenz  | small_baseline | 6 → 16 → 3 (163)      | same      |
//! | lorenz  | large_baseline | 6 → 256 → 3 (2563)    | same      |
//!
//! The Lorenz hypernetwork and baselines take the natural input widths
//! (3 parameters, 3 + 3 baseline inputs), so their totals are plain dense-layer
//! counts.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::nets::{init_params, ArchSpec, HyperModel, InitMode, Net, NetArch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Burgers,
    Lorenz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    HyperPinn,
    SmallBaseline,
    LargeBaseline,
}

impl Problem {
    pub fn tag(self) -> &'static str {
        match self {
            Problem::Burgers => "burgers",
            Problem::Lorenz => "lorenz",
        }
    }

    /// Dimension of the equation parameters λ.
    pub fn lambda_dim(self) -> usize {
        match self {
            Problem::Burgers => 1,
            Problem::Lorenz => 3,
        }
    }
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::HyperPinn, ModelKind::SmallBaseline, ModelKind::LargeBaseline];

    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::HyperPinn => "hyperpinn",
            ModelKind::SmallBaseline => "small_baseline",
            ModelKind::LargeBaseline => "large_baseline",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "burgers" => Ok(Problem::Burgers),
            "lorenz" => Ok(Problem::Lorenz),
            _ => Err(Error::key("problem", format!("expected burgers or lorenz, got `{s}`"))),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperpinn" => Ok(ModelKind::HyperPinn),
            "small_baseline" => Ok(ModelKind::SmallBaseline),
            "large_baseline" => Ok(ModelKind::LargeBaseline),
            _ => Err(Error::key(
                "model",
                format!("expected hyperpinn, small_baseline or large_baseline, got `{s}`"),
            )),
        }
    }
}

/// Hidden sizes of the hypernetwork for each problem.
pub fn hyper_hidden(problem: Problem) -> &'static [usize] {
    match problem {
        Problem::Burgers => &[32, 32, 32, 16],
        Problem::Lorenz => &[16, 8],
    }
}

pub fn architecture(problem: Problem, kind: ModelKind) -> NetArch {
    match (problem, kind) {
        (Problem::Burgers, ModelKind::HyperPinn) => {
            let main = ArchSpec::mlp(2, &[8; 6], 1);
            NetArch::Hyper {
                hyper: ArchSpec::mlp(1, hyper_hidden(problem), main.param_count()),
                main,
            }
        }
        (Problem::Burgers, ModelKind::SmallBaseline) => NetArch::Plain(ArchSpec::mlp(3, &[8; 6], 1)),
        (Problem::Burgers, ModelKind::LargeBaseline) => NetArch::Plain(ArchSpec::mlp(3, &[32; 10], 1)),
        (Problem::Lorenz, ModelKind::HyperPinn) => {
            let main = ArchSpec::mlp(3, &[16], 3);
            NetArch::Hyper {
                hyper: ArchSpec::mlp(3, hyper_hidden(problem), main.param_count()),
                main,
            }
        }
        (Problem::Lorenz, ModelKind::SmallBaseline) => NetArch::Plain(ArchSpec::mlp(6, &[16], 3)),
        (Problem::Lorenz, ModelKind::LargeBaseline) => NetArch::Plain(ArchSpec::mlp(6, &[256], 3)),
    }
}

/// Freshly initialized model: Glorot for baselines, output-scaled Glorot for hypernetworks.
pub fn init_model(problem: Problem, kind: ModelKind, seed: u64) -> Result<Net> {
    match architecture(problem, kind) {
        NetArch::Plain(spec) => Ok(Net::Plain(init_params(&spec, seed, &InitMode::Standard)?)),
        NetArch::Hyper { main, .. } => Ok(Net::Hyper(HyperModel::init(
            main,
            problem.lambda_dim(),
            hyper_hidden(problem),
            seed,
        )?)),
    }
}
