//! Parameterized 1D viscous Burgers problem on `t ∈ [0, 1]`, `x ∈ [−1, 1]`:
//!
//! ```text
//! u_t + u·u_x − ν·u_xx = 0,   u(0, x) = −sin(πx),   u(t, ±1) = 0,   ν ∈ [0.001, 0.1]
//! ```

pub mod cole_hopf;
mod data;
mod eval;
mod loss;
pub mod reference;

pub use data::{sample_collocation, sample_dataset, BurgersDataset, BurgersPoint, PointKind};
pub use eval::{
    evaluate_mse, lattice_errors, predict_lattice, predict_points, write_eval_csv, write_plot_csv, EvalLattice, NuErrors, FIGURE_NU,
    TEST_NUS,
};
pub use loss::{pinn_loss, BurgersBatch};
pub use reference::{cole_hopf_reference, solve_reference, ReferenceMethod, ReferenceSolution};

use crate::autodiff::{HyperDual, Var};

pub const T_END: f64 = 1.0;
pub const X_MIN: f64 = -1.0;
pub const X_MAX: f64 = 1.0;
pub const NU_MIN: f64 = 0.001;
pub const NU_MAX: f64 = 0.1;

/// Network-facing encoding of the viscosity: `log10(ν) + 2`, which maps
/// `[0.001, 0.1]` onto `[−1, 1]`.
pub fn encode_nu(nu: f64) -> f64 {
    nu.log10() + 2.0
}

pub fn initial_condition(x: f64) -> f64 {
    -(std::f64::consts::PI * x).sin()
}

/// `u_t + u·u_x − ν·u_xx` from a network output evaluated at seeded `(t, x)`.
pub fn burgers_residual(u: HyperDual, nu: f64) -> f64 {
    u.dt + u.val * u.dx - nu * u.dxx
}

/// Tape form of [`burgers_residual`]; differentiable in the network parameters.
pub fn burgers_residual_var<'t>(u: Var<'t>, nu: f64) -> Var<'t> {
    u.dt() + u.val() * u.dx() - u.dxx().scale(nu)
}
