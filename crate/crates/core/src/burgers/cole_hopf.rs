//! Closed-form Burgers solution through the Cole–Hopf transformation.
//!
//! With `φ₀(y) = exp(−cos(πy) / (2πν))` and the heat kernel of width `√(4νt)`,
//!
//! ```text
//! u(t, x) = −∫ sin(π(x−η)) φ₀(x−η) e^{−η²/4νt} dη  /  ∫ φ₀(x−η) e^{−η²/4νt} dη
//! ```
//!
//! The odd, 2-periodic extension of `−sin(πx)` makes `u(t, ±1) = 0`, so this
//! is the Dirichlet solution on `[−1, 1]`. Two quadratures are provided:
//! [`solution`] integrates in log space with a fine trapezoid rule and stays
//! accurate down to the smallest viscosities; [`solution_gauss_hermite`] uses
//! a Gauss–Hermite rule and is only reliable for moderate `ν`.

use std::f64::consts::PI;

use super::initial_condition;

/// Gauss–Hermite nodes and weights for `∫ e^{−s²} f(s) ds`, nodes descending.
pub fn gauss_hermite_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^(−1/4)
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Cole–Hopf solution by Gauss–Hermite quadrature with the given rule.
pub fn solution_gauss_hermite(nu: f64, t: f64, x: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    if t <= 0.0 {
        return initial_condition(x);
    }
    let c = (4.0 * nu * t).sqrt();
    let (nodes, weights) = rule;
    let expo: Vec<f64> = nodes
        .iter()
        .map(|s| -(PI * (x - c * s)).cos() / (2.0 * PI * nu))
        .collect();
    let top = expo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for ((s, w), e) in nodes.iter().zip(weights).zip(&expo) {
        let f = w * (e - top).exp();
        num += (PI * (x - c * s)).sin() * f;
        den += f;
    }
    -num / den
}

/// Cole–Hopf solution by a log-space trapezoid rule.
pub fn solution(nu: f64, t: f64, x: f64) -> f64 {
    solution_with_step(nu, t, x, 0.05)
}

/// As [`solution`], with the trapezoid step given as a fraction of the
/// narrowest integrand feature.
pub fn solution_with_step(nu: f64, t: f64, x: f64, frac: f64) -> f64 {
    if t <= 0.0 {
        return initial_condition(x);
    }
    // Beyond ±half_width the Gaussian factor is below e^-40 of the peak.
    let half_width = (4.0 * t / PI + 160.0 * nu * t).sqrt();
    let feature = (2.0 * nu * t).sqrt().min((2.0 * nu / PI).sqrt());
    let h = frac * feature;
    let n = (half_width / h).ceil() as usize;
    let exponent = |eta: f64| -(PI * (x - eta)).cos() / (2.0 * PI * nu) - eta * eta / (4.0 * nu * t);
    let mut top = f64::NEG_INFINITY;
    for k in 0..=2 * n {
        let eta = (k as f64 - n as f64) * h;
        top = top.max(exponent(eta));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..=2 * n {
        let eta = (k as f64 - n as f64) * h;
        let f = (exponent(eta) - top).exp();
        num += (PI * (x - eta)).sin() * f;
        den += f;
    }
    -num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_rule_moments() {
        let (x, w) = gauss_hermite_rule(40);
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        let sp = PI.sqrt();
        assert!((m0 - sp).abs() < 1e-13);
        assert!((m2 - sp / 2.0).abs() < 1e-13);
        assert!((m4 - 3.0 * sp / 4.0).abs() < 1e-12);
        let (x3, w3) = gauss_hermite_rule(3);
        assert!((x3[0] - 1.5f64.sqrt()).abs() < 1e-14);
        assert!((w3[1] - 2.0 * sp / 3.0).abs() < 1e-14);
    }

    #[test]
    fn quadratures_agree_at_moderate_viscosity() {
        let rule = gauss_hermite_rule(120);
        for &(t, x) in &[(0.5, 0.0), (0.5, 0.3), (0.1, -0.7), (1.0, 0.9)] {
            let a = solution(0.1, t, x);
            let b = solution_gauss_hermite(0.1, t, x, &rule);
            assert!((a - b).abs() < 1e-10, "t={t} x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn trapezoid_is_step_converged_in_the_shock_regime() {
        for &(t, x) in &[(1.0, 0.001), (0.6, -0.01), (0.3, 0.5), (0.05, -0.2)] {
            let a = solution_with_step(0.001, t, x, 0.05);
            let b = solution_with_step(0.001, t, x, 0.025);
            assert!((a - b).abs() < 1e-11, "t={t} x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn boundary_and_initial_values() {
        for nu in [0.001, 0.01, 0.1] {
            for t in [0.2, 0.7, 1.0] {
                assert!(solution(nu, t, -1.0).abs() < 1e-12);
                assert!(solution(nu, t, 1.0).abs() < 1e-12);
            }
            assert_eq!(solution(nu, 0.0, 0.5), -1.0);
        }
    }

    #[test]
    fn shock_forms_at_low_viscosity() {
        // steep profile around x = 0 at t = 1
        let left = solution(0.001, 1.0, -0.01);
        let right = solution(0.001, 1.0, 0.01);
        assert!(left > 0.5 && right < -0.5, "{left} {right}");
    }
}
