use super::config::TrainingConfig;
use crate::autodiff::GradResult;
use crate::error::{Error, Result};

/// First and second moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: usize,
}

impl OptimizerState {
    pub fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }
}

/// One bias-corrected Adam update at learning rate `lr`.
///
/// An identically zero gradient leaves parameters and state untouched.
pub fn adam_step(
    theta: &mut [f64],
    grad: &GradResult,
    state: &mut OptimizerState,
    cfg: &TrainingConfig,
    lr: f64,
) -> Result<()> {
    let g = &grad.gradient;
    if g.len() != theta.len() || state.m.len() != theta.len() || state.v.len() != theta.len() {
        return Err(Error::Internal(format!(
            "adam shapes disagree: theta {}, grad {}, state {}",
            theta.len(),
            g.len(),
            state.m.len()
        )));
    }
    if let Some(i) = g.iter().position(|x| !x.is_finite()) {
        return Err(Error::Training {
            iteration: state.step,
            loss: grad.loss_value,
            reason: format!("gradient component {i} is {}", g[i]),
        });
    }
    if g.iter().all(|&x| x == 0.0) {
        return Ok(());
    }
    state.step += 1;
    let (b1, b2) = (cfg.adam_beta1, cfg.adam_beta2);
    let c1 = 1.0 - b1.powi(state.step as i32);
    let c2 = 1.0 - b2.powi(state.step as i32);
    for (((p, &gi), m), v) in theta.iter_mut().zip(g).zip(&mut state.m).zip(&mut state.v) {
        *m = b1 * *m + (1.0 - b1) * gi;
        *v = b2 * *v + (1.0 - b2) * gi * gi;
        let mhat = *m / c1;
        let vhat = *v / c2;
        *p -= lr * mhat / (vhat.sqrt() + cfg.adam_eps);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grad(g: Vec<f64>) -> GradResult {
        GradResult {
            loss_value: 0.0,
            gradient: g,
        }
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let cfg = TrainingConfig::default();
        let mut theta = vec![0.0];
        let mut st = OptimizerState::new(1);
        adam_step(&mut theta, &grad(vec![1.0]), &mut st, &cfg, 1e-3).unwrap();
        assert!((theta[0] + 1e-3).abs() < 1e-9);
        assert_eq!(st.step, 1);
    }

    #[test]
    fn zero_gradient_is_identity_even_with_momentum() {
        let cfg = TrainingConfig::default();
        let mut theta = vec![0.5, -0.25];
        let mut st = OptimizerState::new(2);
        adam_step(&mut theta, &grad(vec![0.3, -2.0]), &mut st, &cfg, 1e-2).unwrap();
        let (before, st_before) = (theta.clone(), st.clone());
        adam_step(&mut theta, &grad(vec![0.0, 0.0]), &mut st, &cfg, 1e-2).unwrap();
        assert_eq!(theta, before);
        assert_eq!(st, st_before);
    }

    #[test]
    fn non_finite_gradient_aborts() {
        let cfg = TrainingConfig::default();
        let mut theta = vec![0.0, 0.0];
        let mut st = OptimizerState::new(2);
        let err = adam_step(&mut theta, &grad(vec![1.0, f64::NAN]), &mut st, &cfg, 1e-3).unwrap_err();
        assert!(matches!(err, Error::Training { iteration: 0, .. }));
        assert_eq!(err.exit_code(), 4);
    }
}
