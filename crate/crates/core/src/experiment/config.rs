use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::burgers::ReferenceMethod;
use crate::error::{Error, Result};
use crate::lorenz::DatasetSpec;
use crate::models::{ModelKind, Problem};
use crate::optim::TrainingConfig;

/// Everything a CLI command needs. Read from a flat `key = value` file where
/// `#` starts a comment and unknown keys are rejected.
///
/// | key | default |
/// |-----|---------|
/// | `problem` | required (`burgers`, `lorenz`) |
/// | `model` | `hyperpinn` (`small_baseline`, `large_baseline`) |
/// | `workdir` | `run` |
/// | `seed`, `iterations`, `learning_rate`, `lr_decay`, `adam_beta1`, `adam_beta2`, `adam_eps`, `alpha`, `batch_data`, `batch_collocation` | see [`TrainingConfig`]; Lorenz uses `batch_data` pairs per step |
/// | `reference_method` | `cole_hopf` (`finite_difference`) |
/// | `eval_nt`, `eval_nx` | `100`, `256` |
/// | `lorenz_n_params`, `lorenz_n_initial_conditions`, `lorenz_n_test`, `lorenz_duration` | `30`, `100`, `100`, `25` |
/// | `lorenz_eval_limit` | all test trajectories |
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub model: ModelKind,
    pub training: TrainingConfig,
    pub workdir: PathBuf,
    pub reference_method: ReferenceMethod,
    pub eval_nt: usize,
    pub eval_nx: usize,
    pub lorenz: DatasetSpec,
    pub lorenz_eval_limit: Option<usize>,
}

/// Default training budget for the Lorenz models.
pub const LORENZ_ITERATIONS: usize = 20_000;
pub const LORENZ_BATCH: usize = 256;

impl ExperimentConfig {
    /// Defaults for `problem`.
    pub fn new(problem: Problem, model: ModelKind) -> Self {
        let mut training = TrainingConfig::default();
        if problem == Problem::Lorenz {
            training.iterations = LORENZ_ITERATIONS;
            training.batch_data = LORENZ_BATCH;
        }
        Self {
            problem,
            model,
            training,
            workdir: PathBuf::from("run"),
            reference_method: ReferenceMethod::ColeHopf,
            eval_nt: 100,
            eval_nx: 256,
            lorenz: DatasetSpec::default(),
            lorenz_eval_limit: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if pairs.iter().any(|(seen, _): &(&str, &str)| *seen == k) {
                return Err(Error::key(k, "given more than once"));
            }
            pairs.push((k, v));
        }
        let lookup = |key: &str| pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let problem: Problem = lookup("problem").ok_or_else(|| Error::key("problem", "is required"))?.parse()?;
        let model: ModelKind = lookup("model").map_or(Ok(ModelKind::HyperPinn), str::parse)?;
        let mut cfg = Self::new(problem, model);
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::key(key, format!("cannot parse `{v}`")))
        }
        let t = &mut self.training;
        match key {
            "problem" | "model" => {}
            "workdir" => self.workdir = PathBuf::from(value),
            "seed" => t.seed = num(key, value)?,
            "iterations" => t.iterations = num(key, value)?,
            "learning_rate" => t.learning_rate = num(key, value)?,
            "lr_decay" => t.lr_decay = num(key, value)?,
            "adam_beta1" => t.adam_beta1 = num(key, value)?,
            "adam_beta2" => t.adam_beta2 = num(key, value)?,
            "adam_eps" => t.adam_eps = num(key, value)?,
            "alpha" => t.alpha = num(key, value)?,
            "batch_data" => t.batch_data = num(key, value)?,
            "batch_collocation" => t.batch_collocation = num(key, value)?,
            "reference_method" => {
                self.reference_method = match value {
                    "cole_hopf" => ReferenceMethod::ColeHopf,
                    "finite_difference" => ReferenceMethod::FiniteDifference,
                    _ => return Err(Error::key(key, format!("expected cole_hopf or finite_difference, got `{value}`"))),
                }
            }
            "eval_nt" => self.eval_nt = num(key, value)?,
            "eval_nx" => self.eval_nx = num(key, value)?,
            "lorenz_n_params" => self.lorenz.n_params = num(key, value)?,
            "lorenz_n_initial_conditions" => self.lorenz.n_initial_conditions = num(key, value)?,
            "lorenz_n_test" => self.lorenz.n_test = num(key, value)?,
            "lorenz_duration" => self.lorenz.duration = num(key, value)?,
            "lorenz_eval_limit" => self.lorenz_eval_limit = Some(num(key, value)?),
            _ => return Err(Error::key(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.training.validate()?;
        if self.eval_nt < 2 || self.eval_nx < 2 {
            return Err(Error::key("eval_nt", "evaluation lattice needs at least 2 points per axis"));
        }
        let l = &self.lorenz;
        for (k, v) in [
            ("lorenz_n_params", l.n_params),
            ("lorenz_n_initial_conditions", l.n_initial_conditions),
            ("lorenz_n_test", l.n_test),
        ] {
            if v == 0 {
                return Err(Error::key(k, "must be at least 1"));
            }
        }
        if !(l.duration.is_finite() && l.duration >= 2.0 * l.dt) {
            return Err(Error::key("lorenz_duration", format!("must cover at least two steps, got {}", l.duration)));
        }
        if self.lorenz_eval_limit == Some(0) {
            return Err(Error::key("lorenz_eval_limit", "must be at least 1"));
        }
        Ok(())
    }
}
