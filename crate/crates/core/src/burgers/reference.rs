//! Ground-truth Burgers fields sampled on an evaluation lattice.
//!
//! [`solve_reference`] marches a finite-difference scheme: Crank–Nicolson for
//! diffusion, second-order Adams–Bashforth for convection, and a third-order
//! upwind-biased stencil for `u·u_x`. It doubles both resolutions until two
//! successive solutions agree on the lattice. [`cole_hopf_reference`] samples
//! the closed-form solution instead.

use std::io::Write;
use std::path::Path;

use super::eval::EvalLattice;
use super::{cole_hopf, initial_condition, T_END, X_MAX, X_MIN};
use crate::error::{Error, Result};

pub const DEFAULT_NX: usize = 2048;
pub const DEFAULT_NT: usize = 4096;
pub const REFINE_TOL: f64 = 1e-4;
pub const MAX_REFINEMENTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMethod {
    FiniteDifference,
    ColeHopf,
}

impl ReferenceMethod {
    pub fn tag(self) -> &'static str {
        match self {
            ReferenceMethod::FiniteDifference => "finite_difference",
            ReferenceMethod::ColeHopf => "cole_hopf",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "finite_difference" => Ok(ReferenceMethod::FiniteDifference),
            "cole_hopf" => Ok(ReferenceMethod::ColeHopf),
            _ => Err(Error::load(format!("unknown reference method `{s}`"))),
        }
    }
}

/// `values[i * xs.len() + j] = u(ts[i], xs[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub nu: f64,
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub method: ReferenceMethod,
    /// Estimated max-norm accuracy of `values`.
    pub tolerance: f64,
}

impl ReferenceSolution {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.xs.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.xs.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn max_abs_diff(&self, other: &ReferenceSolution) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form reference on `lattice`.
pub fn cole_hopf_reference(nu: f64, lattice: &EvalLattice) -> Result<ReferenceSolution> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("viscosity must be positive, got {nu}")));
    }
    let mut values = Vec::with_capacity(lattice.ts.len() * lattice.xs.len());
    for &t in &lattice.ts {
        for &x in &lattice.xs {
            values.push(cole_hopf::solution(nu, t, x));
        }
    }
    Ok(ReferenceSolution {
        nu,
        ts: lattice.ts.clone(),
        xs: lattice.xs.clone(),
        values,
        method: ReferenceMethod::ColeHopf,
        tolerance: 1e-10,
    })
}

/// Finite-difference reference with successive refinement starting at
/// `nt × nx` intervals. Fails with the achieved tolerance when two successive
/// solutions still differ by more than [`REFINE_TOL`] after
/// [`MAX_REFINEMENTS`] doublings.
pub fn solve_reference(nu: f64, nt: usize, nx: usize, lattice: &EvalLattice) -> Result<ReferenceSolution> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("viscosity must be positive, got {nu}")));
    }
    if nt < 2 || nx < 4 {
        return Err(Error::config(format!("grid {nt}x{nx} is too coarse")));
    }
    let mut coarse = march(nu, nt, nx, lattice)?;
    let mut achieved = f64::INFINITY;
    for level in 1..=MAX_REFINEMENTS {
        let fine = march(nu, nt << level, nx << level, lattice)?;
        achieved = fine
            .iter()
            .zip(&coarse)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if achieved < REFINE_TOL {
            return Ok(ReferenceSolution {
                nu,
                ts: lattice.ts.clone(),
                xs: lattice.xs.clone(),
                values: fine,
                method: ReferenceMethod::FiniteDifference,
                tolerance: achieved,
            });
        }
        coarse = fine;
    }
    Err(Error::Solver {
        reason: format!("refinement did not converge for nu = {nu}"),
        achieved,
    })
}

/// One fixed-resolution solve, sampled onto the lattice by linear interpolation.
fn march(nu: f64, nt: usize, nx: usize, lattice: &EvalLattice) -> Result<Vec<f64>> {
    let dx = (X_MAX - X_MIN) / nx as f64;
    let dt = T_END / nt as f64;
    let grid: Vec<f64> = (0..=nx).map(|i| X_MIN + i as f64 * dx).collect();
    let mut u: Vec<f64> = grid.iter().map(|&x| initial_condition(x)).collect();
    u[0] = 0.0;
    u[nx] = 0.0;

    let mut conv_prev = convection(&u, dx);
    let mut conv = conv_prev.clone();
    let r = nu * dt / (2.0 * dx * dx);
    let mut rhs = vec![0.0; nx + 1];
    let mut scratch = vec![0.0; nx + 1];
    let mut next = vec![0.0; nx + 1];

    let mut out = vec![0.0; lattice.ts.len() * lattice.xs.len()];
    let mut pending = 0;
    // Emit lattice rows that fall inside [t_n, t_n + dt].
    let mut emit = |n: usize, u_lo: &[f64], u_hi: &[f64], pending: &mut usize| {
        let t_lo = n as f64 * dt;
        while *pending < lattice.ts.len() {
            let t = lattice.ts[*pending];
            if t > t_lo + dt * (1.0 + 1e-9) {
                break;
            }
            let a = ((t - t_lo) / dt).clamp(0.0, 1.0);
            let row = &mut out[*pending * lattice.xs.len()..(*pending + 1) * lattice.xs.len()];
            for (slot, &x) in row.iter_mut().zip(&lattice.xs) {
                let lo = interp(&grid, u_lo, x);
                let hi = interp(&grid, u_hi, x);
                *slot = (1.0 - a) * lo + a * hi;
            }
            *pending += 1;
        }
    };

    for n in 0..nt {
        for i in 1..nx {
            let diffusion = r * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
            rhs[i] = u[i] + diffusion - dt * (1.5 * conv[i] - 0.5 * conv_prev[i]);
        }
        solve_tridiagonal(r, &rhs, &mut next, &mut scratch);
        if !next.iter().all(|v| v.is_finite()) {
            return Err(Error::Solver {
                reason: format!("finite-difference march blew up at step {n} (nu = {nu})"),
                achieved: f64::INFINITY,
            });
        }
        emit(n, &u, &next, &mut pending);
        std::mem::swap(&mut u, &mut next);
        std::mem::swap(&mut conv_prev, &mut conv);
        conv = convection(&u, dx);
    }
    if pending < lattice.ts.len() {
        return Err(Error::Internal("lattice extends past the final time".into()));
    }
    Ok(out)
}

/// `u·u_x` with a third-order upwind-biased stencil (central next to the walls).
fn convection(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len() - 1;
    let mut c = vec![0.0; n + 1];
    for i in 1..n {
        let ux = if i < 2 || i + 2 > n {
            (u[i + 1] - u[i - 1]) / (2.0 * dx)
        } else if u[i] >= 0.0 {
            (2.0 * u[i + 1] + 3.0 * u[i] - 6.0 * u[i - 1] + u[i - 2]) / (6.0 * dx)
        } else {
            (-u[i + 2] + 6.0 * u[i + 1] - 3.0 * u[i] - 2.0 * u[i - 1]) / (6.0 * dx)
        };
        c[i] = u[i] * ux;
    }
    c
}

/// Solves `(1 + 2r)·v_i − r·(v_{i−1} + v_{i+1}) = rhs_i` for interior `i`
/// with `v_0 = v_n = 0` (Thomas algorithm).
fn solve_tridiagonal(r: f64, rhs: &[f64], v: &mut [f64], c_prime: &mut [f64]) {
    let n = rhs.len() - 1;
    let (a, b) = (-r, 1.0 + 2.0 * r);
    v[0] = 0.0;
    v[n] = 0.0;
    // forward sweep over interior unknowns 1..n-1
    let mut denom = b;
    c_prime[1] = a / denom;
    v[1] = rhs[1] / denom;
    for i in 2..n {
        denom = b - a * c_prime[i - 1];
        c_prime[i] = a / denom;
        v[i] = (rhs[i] - a * v[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        v[i] -= c_prime[i] * v[i + 1];
    }
}

fn interp(grid: &[f64], u: &[f64], x: f64) -> f64 {
    let n = grid.len() - 1;
    let dx = grid[1] - grid[0];
    let s = ((x - grid[0]) / dx).clamp(0.0, n as f64);
    let i = (s.floor() as usize).min(n - 1);
    let a = s - i as f64;
    (1.0 - a) * u[i] + a * u[i + 1]
}

// Reference files:
//   magic "HPRF", version u32 LE, desc_len u32 LE, descriptor (`key=value`
//   lines: nu, method, tolerance, nt, nx), then ts (nt f64 LE), xs (nx f64 LE),
//   values (nt·nx f64 LE, row-major in t).
const REF_MAGIC: &[u8; 4] = b"HPRF";
const REF_VERSION: u32 = 1;

impl ReferenceSolution {
    pub fn to_bytes(&self) -> Vec<u8> {
        let desc = format!(
            "nu={:?}\nmethod={}\ntolerance={:?}\nnt={}\nnx={}\n",
            self.nu,
            self.method.tag(),
            self.tolerance,
            self.ts.len(),
            self.xs.len()
        );
        let mut out = Vec::new();
        out.extend_from_slice(REF_MAGIC);
        out.extend_from_slice(&REF_VERSION.to_le_bytes());
        out.extend_from_slice(&(desc.len() as u32).to_le_bytes());
        out.extend_from_slice(desc.as_bytes());
        for v in self.ts.iter().chain(&self.xs).chain(&self.values) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::load(format!("reference file: {m}"));
        if bytes.len() < 12 || &bytes[..4] != REF_MAGIC {
            return Err(bad("bad magic"));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != REF_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let dl = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let desc = bytes
            .get(12..12 + dl)
            .and_then(|d| std::str::from_utf8(d).ok())
            .ok_or_else(|| bad("truncated descriptor"))?;
        let field = |k: &str| {
            desc.lines()
                .find_map(|l| l.strip_prefix(k).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(|| bad(&format!("missing `{k}`")))
        };
        let num = |k: &str| field(k)?.parse::<f64>().map_err(|_| bad(&format!("bad `{k}`")));
        let count = |k: &str| field(k)?.parse::<usize>().map_err(|_| bad(&format!("bad `{k}`")));
        let (nt, nx) = (count("nt")?, count("nx")?);
        let body = &bytes[12 + dl..];
        if body.len() != 8 * (nt + nx + nt * nx) {
            return Err(bad("array length disagrees with the grid shape"));
        }
        let mut floats = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let ts: Vec<f64> = floats.by_ref().take(nt).collect();
        let xs: Vec<f64> = floats.by_ref().take(nx).collect();
        let values: Vec<f64> = floats.collect();
        Ok(Self {
            nu: num("nu")?,
            ts,
            xs,
            values,
            method: ReferenceMethod::parse(field("method")?)?,
            tolerance: num("tolerance")?,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(&self.to_bytes()))
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
