use std::fmt::Write as _;
use std::path::Path;

use super::rk45::{integrate_dense, Tolerances};
use super::{lorenz_rhs, LorenzParams, Trajectory, OUTPUT_SCALE, STATE_SCALE};
use crate::error::{Error, Result};
use crate::nets::{forward_into, Net, Parameterization, Workspace};

/// Parameters of the trajectory exported for plotting.
pub const FIGURE_PARAMS: LorenzParams = LorenzParams {
    sigma: 10.0,
    beta: 5.0 / 3.0,
    rho: 21.7,
};
pub const FIGURE_X0: [f64; 3] = [-8.0, 8.0, 27.0];

/// Diameter of the scoring domain `[−50, 50]³`; per-sample deviations are
/// capped at this value.
pub const DOMAIN_DIAMETER: f64 = 173.205_080_756_887_72;
/// A rollout whose state leaves `[−BLOWUP_BOUND, BLOWUP_BOUND]³` is stopped and flagged.
pub const BLOWUP_BOUND: f64 = 1e3;

/// A right-hand side usable in rollouts.
pub trait Dynamics {
    fn eval(&mut self, state: [f64; 3]) -> [f64; 3];
}

/// Exact Lorenz dynamics.
impl Dynamics for LorenzParams {
    fn eval(&mut self, state: [f64; 3]) -> [f64; 3] {
        lorenz_rhs(state, self)
    }
}

/// A trained model specialized to one parameter set. A hypernetwork
/// generates its main network here, once.
#[derive(Debug, Clone)]
pub struct LearnedDynamics {
    theta: Vec<f64>,
    ws: Workspace,
    input: Vec<f64>,
}

impl LearnedDynamics {
    pub fn new(net: &Net, params: &LorenzParams) -> Result<Self> {
        let enc = params.encode();
        match net {
            Net::Hyper(h) => {
                let main = h.generate_main(&Parameterization(enc.to_vec()))?;
                if main.spec().input_dim != 3 || main.spec().output_dim != 3 {
                    return Err(Error::config(format!("{} is not a Lorenz main network", main.spec())));
                }
                Ok(Self {
                    ws: Workspace::new(main.spec()),
                    theta: main.into_values(),
                    input: vec![0.0; 3],
                })
            }
            Net::Plain(p) => {
                if p.spec().input_dim != 6 || p.spec().output_dim != 3 {
                    return Err(Error::config(format!("{} is not a Lorenz baseline", p.spec())));
                }
                Ok(Self {
                    ws: Workspace::new(p.spec()),
                    theta: p.values().to_vec(),
                    input: vec![0.0, 0.0, 0.0, enc[0], enc[1], enc[2]],
                })
            }
        }
    }
}

impl Dynamics for LearnedDynamics {
    fn eval(&mut self, state: [f64; 3]) -> [f64; 3] {
        for i in 0..3 {
            self.input[i] = state[i] / STATE_SCALE;
        }
        let mut out = [0.0; 3];
        forward_into(&self.theta, &self.input, &mut self.ws, &mut out);
        out.map(|v| v * OUTPUT_SCALE)
    }
}

/// Integrates `dynamics` from `x0` with the data-generation integrator
/// settings. Returns the sampled states and whether the run blew up; a
/// blown-up run is truncated at the last sample inside the bound.
pub fn rollout(dynamics: &mut dyn Dynamics, x0: [f64; 3], duration: f64, dt: f64) -> Result<(Vec<[f64; 3]>, bool)> {
    let mut states = Vec::with_capacity((duration / dt).round() as usize + 1);
    let mut escaped = false;
    let tol = Tolerances {
        max_steps: 200_000,
        ..Tolerances::default()
    };
    let run = integrate_dense(
        |y, d| d.copy_from_slice(&dynamics.eval([y[0], y[1], y[2]])),
        &x0,
        duration,
        dt,
        tol,
        |_, y| {
            if y.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP_BOUND) {
                escaped = true;
                return false;
            }
            states.push([y[0], y[1], y[2]]);
            true
        },
    );
    match run {
        Ok(_) => Ok((states, escaped)),
        Err(Error::Integrator(_)) => Ok((states, true)),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryScore {
    pub params: LorenzParams,
    pub x0: [f64; 3],
    /// Time-mean squared Euclidean deviation from the ground truth.
    pub error: f64,
    pub blew_up: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutReport {
    pub scores: Vec<TrajectoryScore>,
    /// Mean of the per-trajectory errors.
    pub aggregate: f64,
}

impl RolloutReport {
    pub fn blow_ups(&self) -> usize {
        self.scores.iter().filter(|s| s.blew_up).count()
    }
}

fn score(truth: &Trajectory, predicted: &[[f64; 3]]) -> f64 {
    let cap = DOMAIN_DIAMETER * DOMAIN_DIAMETER;
    let total: f64 = truth
        .states
        .iter()
        .enumerate()
        .map(|(k, s)| match predicted.get(k) {
            Some(p) => (0..3).map(|i| (p[i] - s[i]).powi(2)).sum::<f64>().min(cap),
            None => cap,
        })
        .sum();
    total / truth.states.len() as f64
}

/// Rolls out the dynamics built by `make` for each test trajectory and scores it.
pub fn score_rollouts<D, F>(test: &[Trajectory], mut make: F) -> Result<RolloutReport>
where
    D: Dynamics,
    F: FnMut(&LorenzParams) -> Result<D>,
{
    if test.is_empty() {
        return Err(Error::config("no test trajectories to score"));
    }
    let mut scores = Vec::with_capacity(test.len());
    for tr in test {
        let mut dynamics = make(&tr.params)?;
        let duration = (tr.states.len() - 1) as f64 * tr.dt;
        let (states, blew_up) = rollout(&mut dynamics, tr.x0, duration, tr.dt)?;
        scores.push(TrajectoryScore {
            params: tr.params,
            x0: tr.x0,
            error: score(tr, &states),
            blew_up,
        });
    }
    let aggregate = scores.iter().map(|s| s.error).sum::<f64>() / scores.len() as f64;
    Ok(RolloutReport { scores, aggregate })
}

pub fn rollout_and_score(net: &Net, test: &[Trajectory]) -> Result<RolloutReport> {
    score_rollouts(test, |p| LearnedDynamics::new(net, p))
}

/// `model,sigma,beta,rho,x0,per_traj_error,blew_up`; `x0` is written as
/// `x;y;z`. A final `all` row carries the aggregate and the blow-up count.
pub fn write_rollout_csv(path: &Path, model: &str, report: &RolloutReport) -> Result<()> {
    let mut s = String::from("model,sigma,beta,rho,x0,per_traj_error,blew_up\n");
    for sc in &report.scores {
        let p = sc.params;
        writeln!(
            s,
            "{model},{:?},{:?},{:?},{:?};{:?};{:?},{:e},{}",
            p.sigma, p.beta, p.rho, sc.x0[0], sc.x0[1], sc.x0[2], sc.error, sc.blew_up
        )
        .unwrap();
    }
    writeln!(s, "{model},all,all,all,all,{:e},{}", report.aggregate, report.blow_ups()).unwrap();
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// `t,x_true,y_true,z_true,x_pred,y_pred,z_pred`; rows past a blow-up leave
/// the prediction columns empty.
pub fn write_figure_csv(path: &Path, truth: &Trajectory, predicted: &[[f64; 3]]) -> Result<()> {
    let mut s = String::from("t,x_true,y_true,z_true,x_pred,y_pred,z_pred\n");
    for (k, st) in truth.states.iter().enumerate() {
        let t = k as f64 * truth.dt;
        write!(s, "{t:?},{:?},{:?},{:?}", st[0], st[1], st[2]).unwrap();
        match predicted.get(k) {
            Some(p) => writeln!(s, ",{:?},{:?},{:?}", p[0], p[1], p[2]).unwrap(),
            None => writeln!(s, ",,,").unwrap(),
        }
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorenz::{generate_lorenz_dataset, DatasetSpec};
    use crate::models::{architecture, init_model, ModelKind, Problem};

    fn test_set() -> Vec<Trajectory> {
        let spec = DatasetSpec {
            n_params: 1,
            n_initial_conditions: 1,
            n_test: 3,
            duration: 2.0,
            dt: 0.01,
        };
        generate_lorenz_dataset(5, &spec).unwrap().test
    }

    #[test]
    fn domain_diameter_constant() {
        assert!((DOMAIN_DIAMETER - 100.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exact_dynamics_reproduce_the_truth() {
        let test = test_set();
        let r = score_rollouts(&test, |p| Ok(*p)).unwrap();
        assert!(r.aggregate < 1e-20);
        assert_eq!(r.blow_ups(), 0);
    }

    #[test]
    fn zero_model_stays_at_the_initial_state() {
        let test = test_set();
        let arch = architecture(Problem::Lorenz, ModelKind::HyperPinn);
        let zero = Net::from_parts(&arch, vec![0.0; arch.trainable_count()]).unwrap();
        let r = rollout_and_score(&zero, &test).unwrap();
        for (sc, tr) in r.scores.iter().zip(&test) {
            let expect = tr
                .states
                .iter()
                .map(|s| (0..3).map(|i| (s[i] - tr.x0[i]).powi(2)).sum::<f64>())
                .sum::<f64>()
                / tr.states.len() as f64;
            assert!((sc.error - expect).abs() < 1e-9 * expect.max(1.0));
        }
    }

    struct Explosive;
    impl Dynamics for Explosive {
        fn eval(&mut self, s: [f64; 3]) -> [f64; 3] {
            s.map(|v| v * v)
        }
    }

    #[test]
    fn blow_up_is_capped_and_flagged() {
        let test = test_set();
        let r = score_rollouts(&test, |_| Ok(Explosive)).unwrap();
        assert_eq!(r.blow_ups(), 3);
        let cap = DOMAIN_DIAMETER * DOMAIN_DIAMETER;
        assert!(r.scores.iter().all(|s| s.error <= cap && s.error > 0.0));
    }

    #[test]
    fn learned_dynamics_shape_checks() {
        let net = init_model(Problem::Burgers, ModelKind::SmallBaseline, 0).unwrap();
        assert!(LearnedDynamics::new(&net, &FIGURE_PARAMS).is_err());
        let net = init_model(Problem::Lorenz, ModelKind::LargeBaseline, 0).unwrap();
        let mut d = LearnedDynamics::new(&net, &FIGURE_PARAMS).unwrap();
        assert!(d.eval([1.0, 2.0, 3.0]).iter().all(|v| v.is_finite()));
    }
}
