use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{adam_step, OptimizerState};
use super::config::TrainingConfig;
use crate::autodiff::GradResult;
use crate::error::{Error, Result};

/// Loss history is recorded every this many iterations (and at the last one).
pub const LOG_EVERY: usize = 100;

/// One loss evaluation split into its terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub grad: GradResult,
    pub data_loss: f64,
    pub physics_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub iteration: usize,
    pub total_loss: f64,
    pub data_loss: f64,
    pub physics_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainStatus {
    Completed,
    Aborted { iteration: usize, reason: String },
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters with the lowest batch loss seen.
    pub theta: Vec<f64>,
    pub best_loss: f64,
    pub initial_loss: f64,
    pub history: Vec<HistoryRow>,
    pub status: TrainStatus,
}

impl TrainOutcome {
    pub fn final_row(&self) -> Option<&HistoryRow> {
        self.history.last()
    }
}

/// Runs `cfg.iterations` Adam steps. `loss` receives the current parameters
/// and the batch RNG (seeded from `cfg.seed`) and draws its own batch.
///
/// A non-finite loss or gradient stops training early; the outcome then
/// carries [`TrainStatus::Aborted`] and the best parameters seen so far.
pub fn train<F>(mut loss: F, theta0: Vec<f64>, cfg: &TrainingConfig) -> Result<TrainOutcome>
where
    F: FnMut(&[f64], &mut ChaCha8Rng) -> Result<Evaluation>,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut theta = theta0;
    let mut state = OptimizerState::new(theta.len());
    let mut best_theta = theta.clone();
    let mut best_loss = f64::INFINITY;
    let mut initial_loss = f64::NAN;
    let mut history = Vec::with_capacity(cfg.iterations / LOG_EVERY + 2);
    let mut status = TrainStatus::Completed;

    for it in 0..cfg.iterations {
        let ev = loss(&theta, &mut rng)?;
        let total = ev.grad.loss_value;
        if it == 0 {
            initial_loss = total;
        }
        let row = HistoryRow {
            iteration: it,
            total_loss: total,
            data_loss: ev.data_loss,
            physics_loss: ev.physics_loss,
        };
        if it % LOG_EVERY == 0 || it + 1 == cfg.iterations || !total.is_finite() {
            history.push(row);
        }
        if !total.is_finite() {
            status = TrainStatus::Aborted {
                iteration: it,
                reason: format!("loss became {total}"),
            };
            break;
        }
        if total < best_loss {
            best_loss = total;
            best_theta.copy_from_slice(&theta);
        }
        match adam_step(&mut theta, &ev.grad, &mut state, cfg, cfg.lr_at(it)) {
            Ok(()) => {}
            Err(Error::Training { reason, .. }) => {
                status = TrainStatus::Aborted { iteration: it, reason };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(TrainOutcome {
        theta: best_theta,
        best_loss,
        initial_loss,
        history,
        status,
    })
}

/// Writes `iteration,total_loss,data_loss,physics_loss`.
pub fn write_history_csv(path: &Path, history: &[HistoryRow]) -> Result<()> {
    let mut out = String::from("iteration,total_loss,data_loss,physics_loss\n");
    for r in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.iteration, r.total_loss, r.data_loss, r.physics_loss
        ));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(theta: &[f64], _: &mut ChaCha8Rng) -> Result<Evaluation> {
        let d = theta[0] - 3.0;
        Ok(Evaluation {
            grad: GradResult {
                loss_value: d * d,
                gradient: vec![2.0 * d],
            },
            data_loss: d * d,
            physics_loss: 0.0,
        })
    }

    #[test]
    fn converges_on_a_quadratic() {
        let cfg = TrainingConfig {
            iterations: 5000,
            learning_rate: 1e-2,
            ..Default::default()
        };
        let out = train(quadratic, vec![0.0], &cfg).unwrap();
        assert_eq!(out.status, TrainStatus::Completed);
        assert!((out.theta[0] - 3.0).abs() < 1e-3, "{}", out.theta[0]);
        assert!(out.best_loss <= out.initial_loss);
        assert_eq!(out.history.len(), 51);
    }

    #[test]
    fn nan_loss_aborts_with_history() {
        let cfg = TrainingConfig {
            iterations: 1000,
            ..Default::default()
        };
        let mut calls = 0;
        let out = train(
            |theta, rng| {
                calls += 1;
                let mut ev = quadratic(theta, rng)?;
                if calls > 150 {
                    ev.grad.loss_value = f64::NAN;
                }
                Ok(ev)
            },
            vec![0.0],
            &cfg,
        )
        .unwrap();
        assert!(matches!(out.status, TrainStatus::Aborted { iteration: 150, .. }));
        assert!(out.history.last().unwrap().total_loss.is_nan());
        assert!(out.best_loss.is_finite());
    }

    #[test]
    fn zero_iterations_is_a_config_error() {
        let cfg = TrainingConfig {
            iterations: 0,
            ..Default::default()
        };
        assert!(matches!(train(quadratic, vec![0.0], &cfg), Err(Error::ConfigKey { .. })));
    }
}
