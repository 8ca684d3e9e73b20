//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::ops::{Add, Mul, Sub};

use hyperpinn::autodiff::{HyperDual, Tape, Var};
use hyperpinn::lorenz::{lorenz_rhs, rk45_integrate, trapezoid_residual, LorenzParams};
use hyperpinn::nets::{forward, ArchSpec};
use rand::{Rng, RngExt};

/// Random expression tree over a few leaves.
#[derive(Debug, Clone)]
pub enum Expr {
    Leaf(usize),
    Const(f64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// `a / (1 + b²)`, never singular.
    DivSafe(Box<Expr>, Box<Expr>),
    Tanh(Box<Expr>),
    Sin(Box<Expr>),
    /// `exp(tanh(a))`, bounded.
    ExpTanh(Box<Expr>),
}

pub fn random_expr(rng: &mut impl Rng, n_leaves: usize, depth: usize) -> Expr {
    if depth == 0 || rng.random_bool(0.2) {
        return if rng.random_bool(0.8) {
            Expr::Leaf(rng.random_range(0..n_leaves))
        } else {
            Expr::Const(rng.random_range(-2.0..2.0))
        };
    }
    let mut sub = || Box::new(random_expr(rng, n_leaves, depth - 1));
    let (a, b) = (sub(), sub());
    match rng.random_range(0..7) {
        0 => Expr::Add(a, b),
        1 => Expr::Sub(a, b),
        2 => Expr::Mul(a, b),
        3 => Expr::DivSafe(a, b),
        4 => Expr::Tanh(a),
        5 => Expr::Sin(a),
        _ => Expr::ExpTanh(a),
    }
}

/// Operations an expression needs from its number type.
pub trait ExprScalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn lift(&self, c: f64) -> Self;
    fn tanh(self) -> Self;
    fn sin(self) -> Self;
    fn exp(self) -> Self;
    fn div(self, rhs: Self) -> Self;
}

impl ExprScalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn div(self, rhs: Self) -> Self {
        self / rhs
    }
}

impl<'t> ExprScalar for Var<'t> {
    fn lift(&self, c: f64) -> Self {
        self.tape().constant(HyperDual::constant(c))
    }
    fn tanh(self) -> Self {
        Var::tanh(self)
    }
    fn sin(self) -> Self {
        Var::sin(self)
    }
    fn exp(self) -> Self {
        Var::exp(self)
    }
    fn div(self, rhs: Self) -> Self {
        self.checked_div(rhs).expect("denominator is at least one")
    }
}

impl Expr {
    pub fn eval<S: ExprScalar>(&self, leaves: &[S]) -> S {
        let any = leaves[0];
        match self {
            Expr::Leaf(i) => leaves[*i],
            Expr::Const(c) => any.lift(*c),
            Expr::Add(a, b) => a.eval(leaves) + b.eval(leaves),
            Expr::Sub(a, b) => a.eval(leaves) - b.eval(leaves),
            Expr::Mul(a, b) => a.eval(leaves) * b.eval(leaves),
            Expr::DivSafe(a, b) => {
                let d = b.eval(leaves);
                a.eval(leaves).div(any.lift(1.0) + d * d)
            }
            Expr::Tanh(a) => a.eval(leaves).tanh(),
            Expr::Sin(a) => a.eval(leaves).sin(),
            Expr::ExpTanh(a) => a.eval(leaves).tanh().exp(),
        }
    }
}

/// Central difference of `f` along every coordinate of `x`.
pub fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
        .collect()
}

/// `‖a − b‖₂ / max(‖b‖₂, floor)`.
pub fn relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let norm = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / norm.max(floor)
}

/// Reverse-mode gradient of a random expression against central differences.
/// Returns the relative error of the gradient vector.
pub fn expression_gradient_error(rng: &mut impl Rng) -> f64 {
    let n = 3;
    let expr = random_expr(rng, n, 5);
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let tape = Tape::new();
    let leaves: Vec<Var<'_>> = x.iter().map(|&v| tape.leaf(v)).collect();
    let root = expr.eval(&leaves);
    let adj = tape.backward(root).unwrap();
    let grad: Vec<f64> = leaves.iter().map(|&l| adj.grad(l)).collect();
    let fd = central_gradient(|p| expr.eval(p), &x, 1e-5);
    relative_error(&grad, &fd, 1e-3)
}

/// A random polynomial in `(t, x)` of total degree at most 4 with small
/// integer coefficients, stored as `coef[i][j]` for `t^i x^j`.
pub fn random_poly(rng: &mut impl Rng) -> [[f64; 5]; 5] {
    let mut c = [[0.0; 5]; 5];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i + j <= 4 {
                *v = f64::from(rng.random_range(-5i32..=5));
            }
        }
    }
    c
}

fn powi(x: HyperDual, n: usize) -> HyperDual {
    (0..n).fold(HyperDual::constant(1.0), |acc, _| acc * x)
}

/// Evaluates `p` on seeded HyperDual inputs and compares every coefficient
/// with the term-by-term analytic derivative at a dyadic point. Returns the
/// largest relative mismatch.
pub fn poly_derivative_mismatch(c: &[[f64; 5]; 5], t: f64, x: f64) -> f64 {
    let (ht, hx) = (HyperDual::seed_t(t), HyperDual::seed_x(x));
    let mut got = HyperDual::constant(0.0);
    let mut want = [0.0; 4];
    for i in 0..5 {
        for j in 0..5 {
            let a = c[i][j];
            if a == 0.0 {
                continue;
            }
            got = got + powi(ht, i) * powi(hx, j) * HyperDual::constant(a);
            let (fi, fj) = (i as i32, j as i32);
            want[0] += a * t.powi(fi) * x.powi(fj);
            if i >= 1 {
                want[1] += a * f64::from(fi) * t.powi(fi - 1) * x.powi(fj);
            }
            if j >= 1 {
                want[2] += a * f64::from(fj) * t.powi(fi) * x.powi(fj - 1);
            }
            if j >= 2 {
                want[3] += a * f64::from(fj * (fj - 1)) * t.powi(fi) * x.powi(fj - 2);
            }
        }
    }
    got.to_array()
        .iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs() / w.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// `L(θ) = Σ_points (∂u/∂x)²` for a small tanh network, its tape gradient, and
/// the central-difference gradient of the same loss evaluated through plain
/// HyperDual arithmetic.
pub fn nested_gradient_error(seed: u64) -> f64 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let spec = ArchSpec::mlp(2, &[6, 5], 1);
    let theta: Vec<f64> = (0..spec.param_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let points: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.random_range(0.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();

    let loss_hd = |th: &[f64]| -> f64 {
        let lifted: Vec<HyperDual> = th.iter().map(|&v| HyperDual::constant(v)).collect();
        points
            .iter()
            .map(|&(t, x)| {
                let u = forward(&spec, &lifted, &[HyperDual::seed_t(t), HyperDual::seed_x(x)]).unwrap()[0];
                u.dx * u.dx
            })
            .sum()
    };

    let tape = Tape::new();
    let leaves: Vec<Var<'_>> = theta.iter().map(|&v| tape.leaf(v)).collect();
    let mut total = tape.constant(HyperDual::constant(0.0));
    for &(t, x) in &points {
        let inp = [tape.constant(HyperDual::seed_t(t)), tape.constant(HyperDual::seed_x(x))];
        let u = forward(&spec, &leaves, &inp).unwrap()[0];
        total = total + u.dx().square();
    }
    let adj = tape.backward(total).unwrap();
    let grad: Vec<f64> = leaves.iter().map(|&l| adj.grad(l)).collect();
    let fd = central_gradient(loss_hd, &theta, 1e-6);
    relative_error(&grad, &fd, 1e-3)
}

/// Weight and bias entries of a dense network, counted one at a time.
pub fn enumerate_parameters(spec: &ArchSpec) -> usize {
    let widths = spec.widths();
    let mut n = 0;
    for l in 1..widths.len() {
        for _out in 0..widths[l] {
            for _in in 0..widths[l - 1] {
                n += 1;
            }
            n += 1;
        }
    }
    n
}

/// Statistics of the exact-dynamics trapezoid residual over RK45 data.
#[derive(Debug, Clone, Copy)]
pub struct ResidualStats {
    pub max_norm: f64,
    pub mean_norm: f64,
}

pub fn trapezoid_residual_stats(params: LorenzParams, x0: [f64; 3], duration: f64, dt: f64) -> ResidualStats {
    let traj = rk45_integrate(x0, params, duration, dt).unwrap();
    let norms: Vec<f64> = traj
        .pairs()
        .map(|p| {
            let r = trapezoid_residual(&p, |s| lorenz_rhs(s, &params));
            r.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .collect();
    ResidualStats {
        max_norm: norms.iter().copied().fold(0.0, f64::max),
        mean_norm: norms.iter().sum::<f64>() / norms.len() as f64,
    }
}
