//! Parameterized Lorenz system
//!
//! ```text
//! x' = σ(y − x),   y' = x(ρ − z) − y,   z' = xy − βz
//! ```
//!
//! with learned right-hand sides trained from trajectory data through the
//! two-step trapezoid rule and scored by rollouts.
//!
//! Networks see scaled quantities: the state divided by [`STATE_SCALE`], the
//! parameters as `(σ/10, 3β/8, ρ/28)`, and their raw output is multiplied by
//! [`OUTPUT_SCALE`] to give a time derivative.

mod data;
mod loss;
pub mod rk45;
mod rollout;

pub use data::{
    generate_lorenz_dataset, load_trajectories, sample_pairs, save_trajectories, trajectories_from_bytes,
    trajectories_to_bytes, DatasetSpec, LorenzDataset, StepPair, Trajectory,
};
pub use loss::{multistep_loss, trapezoid_residual};
pub use rollout::{
    rollout, rollout_and_score, score_rollouts, write_figure_csv, write_rollout_csv, Dynamics, LearnedDynamics,
    RolloutReport, TrajectoryScore,
    BLOWUP_BOUND, DOMAIN_DIAMETER, FIGURE_PARAMS, FIGURE_X0,
};

use crate::error::Result;
use rk45::Tolerances;

pub const SIGMA: f64 = 10.0;
pub const RHO_RANGE: (f64, f64) = (0.0, 28.0);
pub const BETA_RANGE: (f64, f64) = (2.0 / 3.0, 8.0 / 3.0);
pub const X0_BOUND: f64 = 10.0;
pub const DURATION: f64 = 25.0;
pub const DT: f64 = 0.01;

pub const STATE_SCALE: f64 = 20.0;
pub const OUTPUT_SCALE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub beta: f64,
    pub rho: f64,
}

impl LorenzParams {
    pub fn new(sigma: f64, beta: f64, rho: f64) -> Self {
        Self { sigma, beta, rho }
    }

    /// Network-facing encoding `(σ/10, 3β/8, ρ/28)`.
    pub fn encode(&self) -> [f64; 3] {
        [self.sigma / 10.0, 3.0 * self.beta / 8.0, self.rho / 28.0]
    }
}

pub fn lorenz_rhs(s: [f64; 3], p: &LorenzParams) -> [f64; 3] {
    let [x, y, z] = s;
    [p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z]
}

/// Ground-truth trajectory sampled every `dt_out` over `duration`.
pub fn rk45_integrate(x0: [f64; 3], params: LorenzParams, duration: f64, dt_out: f64) -> Result<Trajectory> {
    let mut states = Vec::with_capacity((duration / dt_out).round() as usize + 1);
    rk45::integrate_dense(
        |y, d| d.copy_from_slice(&lorenz_rhs([y[0], y[1], y[2]], &params)),
        &x0,
        duration,
        dt_out,
        Tolerances::default(),
        |_, y| {
            states.push([y[0], y[1], y[2]]);
            true
        },
    )?;
    Ok(Trajectory {
        params,
        x0,
        dt: dt_out,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        let p = LorenzParams::new(10.0, 8.0 / 3.0, 28.0);
        assert_eq!(lorenz_rhs([0.0; 3], &p), [0.0; 3]);
        let d = lorenz_rhs([1.0, 1.0, 1.0], &p);
        assert_eq!(d[0], 0.0);
        assert_eq!(d[1], 26.0);
        assert!((d[2] + 5.0 / 3.0).abs() < 1e-14);
        let d = lorenz_rhs([1.0, 1.0, 25.0], &p);
        assert_eq!(d[0], 0.0);
        assert_eq!(d[1], 2.0);
        assert!((d[2] + 197.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn fixed_point_stays_put() {
        let tr = rk45_integrate([0.0; 3], LorenzParams::new(10.0, 2.0, 20.0), 5.0, 0.01).unwrap();
        assert_eq!(tr.states.len(), 501);
        assert!(tr.states.iter().all(|s| *s == [0.0; 3]));
    }

    #[test]
    fn trajectory_length_and_start() {
        let x0 = [1.0, -2.0, 3.0];
        let tr = rk45_integrate(x0, LorenzParams::new(10.0, 8.0 / 3.0, 28.0), DURATION, DT).unwrap();
        assert_eq!(tr.states.len(), 2501);
        assert_eq!(tr.states[0], x0);
    }

    #[test]
    fn tolerance_self_convergence() {
        let p = LorenzParams::new(10.0, 8.0 / 3.0, 28.0);
        let x0 = [1.0, 1.0, 1.0];
        let run = |tol: f64| {
            let t = Tolerances { atol: tol, rtol: tol, ..Default::default() };
            rk45::integrate(|y, d| d.copy_from_slice(&lorenz_rhs([y[0], y[1], y[2]], &p)), &x0, 1.0, 0.01, t)
                .unwrap()
                .pop()
                .unwrap()
        };
        let (a, b) = (run(1e-9), run(5e-10));
        let diff = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }
}
