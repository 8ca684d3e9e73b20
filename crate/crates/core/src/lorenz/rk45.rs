//! Dormand–Prince 5(4) for autonomous systems, with adaptive steps and the
//! standard quartic dense output.

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    -71.0 / 57600.0,
    0.0,
    71.0 / 16695.0,
    -71.0 / 1920.0,
    17253.0 / 339200.0,
    -22.0 / 525.0,
    1.0 / 40.0,
];
/// Dense-output polynomial coefficients (powers 1..4 of the step fraction).
const P: [[f64; 4]; 7] = [
    [
        1.0,
        -8048581381.0 / 2820520608.0,
        8663915743.0 / 2820520608.0,
        -12715105075.0 / 11282082432.0,
    ],
    [0.0; 4],
    [
        0.0,
        131558114200.0 / 32700410799.0,
        -68118460800.0 / 10900136933.0,
        87487479700.0 / 32700410799.0,
    ],
    [
        0.0,
        -1754552775.0 / 470086768.0,
        14199869525.0 / 1410260304.0,
        -10690763975.0 / 1880347072.0,
    ],
    [
        0.0,
        127303824393.0 / 49829197408.0,
        -318862633887.0 / 49829197408.0,
        701980252875.0 / 199316789632.0,
    ],
    [
        0.0,
        -282668133.0 / 205662961.0,
        2019193451.0 / 616988883.0,
        -1453857185.0 / 822651844.0,
    ],
    [
        0.0,
        40617522.0 / 29380423.0,
        -110615467.0 / 29380423.0,
        69997945.0 / 29380423.0,
    ],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
    /// Upper bound on accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            atol: 1e-9,
            rtol: 1e-9,
            max_steps: 1_000_000,
        }
    }
}

/// Integrates `y' = f(y)` from `y0` over `[0, duration]` and calls `emit(k, y)`
/// with the dense-output state at `t = k·dt_out` for `k = 0, 1, …`. Stops
/// early, returning the number of emitted samples, if `emit` returns `false`.
pub fn integrate_dense<F, G>(
    mut f: F,
    y0: &[f64],
    duration: f64,
    dt_out: f64,
    tol: Tolerances,
    mut emit: G,
) -> Result<usize>
where
    F: FnMut(&[f64], &mut [f64]),
    G: FnMut(usize, &[f64]) -> bool,
{
    if !(duration > 0.0) || !(dt_out > 0.0) {
        return Err(Error::config(format!(
            "duration and output step must be positive, got {duration} and {dt_out}"
        )));
    }
    let n = y0.len();
    let n_out = (duration / dt_out + 1e-9).floor() as usize + 1;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut y_stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut sample = vec![0.0; n];

    if !emit(0, &y) {
        return Ok(1);
    }
    let mut emitted = 1;
    f(&y, &mut k[0]);
    let mut h = initial_step(&mut f, &y, &k[0], tol, &mut y_stage, &mut y_new).min(duration);
    let mut t: f64 = 0.0;
    let mut steps = 0;

    while emitted < n_out {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::Integrator(format!("exceeded {} steps at t = {t}", tol.max_steps)));
        }
        let min_step = 10.0 * f64::EPSILON * t.abs().max(1.0);
        if h < min_step {
            return Err(Error::Integrator(format!("step size underflow at t = {t}")));
        }
        let h_eff = h.min(duration - t).max(min_step);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                y_stage[i] = y[i] + h_eff * acc;
            }
            f(&y_stage, &mut k[s]);
        }
        // the last stage is evaluated at the fifth-order solution
        y_new.copy_from_slice(&y_stage);
        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (s, ks) in k.iter().enumerate() {
                e += E[s] * ks[i];
            }
            let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            let r = h_eff * e / scale;
            err += r * r;
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h = 0.1 * h_eff;
            continue;
        }
        if err <= 1.0 {
            let t_new = if duration - t <= h_eff { duration } else { t + h_eff };
            while emitted < n_out {
                let t_out = (emitted as f64 * dt_out).min(duration);
                if t_out > t_new {
                    break;
                }
                let theta = ((t_out - t) / h_eff).clamp(0.0, 1.0);
                let powers = [theta, theta * theta, theta.powi(3), theta.powi(4)];
                for i in 0..n {
                    let mut acc = 0.0;
                    for (s, ks) in k.iter().enumerate() {
                        let q: f64 = P[s].iter().zip(&powers).map(|(p, w)| p * w).sum();
                        acc += q * ks[i];
                    }
                    sample[i] = y[i] + h_eff * acc;
                }
                if !emit(emitted, &sample) {
                    return Ok(emitted + 1);
                }
                emitted += 1;
            }
            t = t_new;
            y.copy_from_slice(&y_new);
            let last = k[6].clone();
            k[0].copy_from_slice(&last);
            let factor = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).min(10.0) };
            h = h_eff * factor;
        } else {
            h = h_eff * (0.9 * err.powf(-0.2)).max(0.2);
        }
    }
    Ok(emitted)
}

/// Starting step from the local scale of the solution and its derivatives.
fn initial_step<F: FnMut(&[f64], &mut [f64])>(
    f: &mut F,
    y: &[f64],
    f0: &[f64],
    tol: Tolerances,
    y1: &mut [f64],
    f1: &mut [f64],
) -> f64 {
    let n = y.len() as f64;
    let scale: Vec<f64> = y.iter().map(|v| tol.atol + tol.rtol * v.abs()).collect();
    let rms = |v: &mut dyn Iterator<Item = f64>| (v.map(|x| x * x).sum::<f64>() / n).sqrt();
    let d0 = rms(&mut y.iter().zip(&scale).map(|(a, s)| a / s));
    let d1 = rms(&mut f0.iter().zip(&scale).map(|(a, s)| a / s));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    for i in 0..y.len() {
        y1[i] = y[i] + h0 * f0[i];
    }
    f(y1, f1);
    let d2 = rms(&mut f1.iter().zip(f0).zip(&scale).map(|((a, b), s)| (a - b) / s)) / h0;
    let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
        (1e-6f64).max(h0 * 1e-3)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// All dense-output samples as rows.
pub fn integrate<F: FnMut(&[f64], &mut [f64])>(
    f: F,
    y0: &[f64],
    duration: f64,
    dt_out: f64,
    tol: Tolerances,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    integrate_dense(f, y0, duration, dt_out, tol, |_, y| {
        out.push(y.to_vec());
        true
    })?;
    Ok(out)
}
