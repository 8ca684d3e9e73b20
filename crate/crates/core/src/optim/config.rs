use crate::error::{Error, Result};

/// Optimizer and batching hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub iterations: usize,
    pub batch_data: usize,
    pub batch_collocation: usize,
    /// Weight of the physics term in `L_data + α·L_physics`.
    pub alpha: f64,
    pub seed: u64,
    /// Learning-rate factor applied per 1000 iterations (smoothly).
    pub lr_decay: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            iterations: 50_000,
            batch_data: 100,
            batch_collocation: 1024,
            alpha: 1.0,
            seed: 0,
            lr_decay: 0.99,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("learning_rate", self.learning_rate),
            ("adam_eps", self.adam_eps),
            ("lr_decay", self.lr_decay),
        ];
        for (k, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::key(k, format!("must be positive, got {v}")));
            }
        }
        for (k, v) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::key(k, format!("must lie in [0, 1), got {v}")));
            }
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::key("alpha", format!("must be non-negative, got {}", self.alpha)));
        }
        if self.iterations == 0 {
            return Err(Error::key("iterations", "must be at least 1"));
        }
        if self.batch_data == 0 {
            return Err(Error::key("batch_data", "must be at least 1"));
        }
        if self.batch_collocation == 0 {
            return Err(Error::key("batch_collocation", "must be at least 1"));
        }
        Ok(())
    }

    /// Learning rate in effect at `iteration`.
    pub fn lr_at(&self, iteration: usize) -> f64 {
        self.learning_rate * self.lr_decay.powf(iteration as f64 / 1000.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        TrainingConfig::default().validate().unwrap();
    }

    #[test]
    fn zero_iterations_rejected() {
        let cfg = TrainingConfig {
            iterations: 0,
            ..Default::default()
        };
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("iterations"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_rates_name_their_key() {
        let cfg = TrainingConfig {
            alpha: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().unwrap_err().to_string().contains("alpha"));
        let cfg = TrainingConfig {
            learning_rate: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().unwrap_err().to_string().contains("learning_rate"));
    }

    #[test]
    fn decay_is_per_thousand() {
        let cfg = TrainingConfig::default();
        assert!((cfg.lr_at(1000) - 0.99e-3).abs() < 1e-15);
        assert_eq!(cfg.lr_at(0), 1e-3);
    }
}
