//! Truncated Taylor numbers carrying `∂/∂t`, `∂/∂x` and `∂²/∂x²`.
//!
//! A `HyperDual` is `val + dt·εt + dx·εx + ½·dxx·εx²` with `εt² = εt·εx = εx³ = 0`.
//! Seeding `t` and `x` and pushing the seeds through a network yields the
//! exact input derivatives a Burgers residual needs, with no cross term.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperDual {
    pub val: f64,
    pub dt: f64,
    pub dx: f64,
    pub dxx: f64,
}

/// Names one Taylor coefficient of a [`HyperDual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Val,
    Dt,
    Dx,
    Dxx,
}

impl HyperDual {
    pub const ZERO: HyperDual = HyperDual::constant(0.0);

    #[inline]
    pub const fn new(val: f64, dt: f64, dx: f64, dxx: f64) -> Self {
        Self { val, dt, dx, dxx }
    }

    /// A value with no dependence on the inputs.
    #[inline]
    pub const fn constant(val: f64) -> Self {
        Self::new(val, 0.0, 0.0, 0.0)
    }

    /// The time input: `dt = 1`.
    #[inline]
    pub const fn seed_t(t: f64) -> Self {
        Self::new(t, 1.0, 0.0, 0.0)
    }

    /// The space input: `dx = 1`, `dxx = 0`.
    #[inline]
    pub const fn seed_x(x: f64) -> Self {
        Self::new(x, 0.0, 1.0, 0.0)
    }

    #[inline]
    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::Val => self.val,
            Component::Dt => self.dt,
            Component::Dx => self.dx,
            Component::Dxx => self.dxx,
        }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.val, self.dt, self.dx, self.dxx]
    }

    #[inline]
    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub fn scale(self, c: f64) -> Self {
        Self::new(self.val * c, self.dt * c, self.dx * c, self.dxx * c)
    }

    /// Applies a scalar function given its value and first two derivatives at `self.val`.
    #[inline]
    pub fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        Self::new(
            g,
            g1 * self.dt,
            g1 * self.dx,
            g1 * self.dxx + g2 * self.dx * self.dx,
        )
    }

    #[inline]
    pub fn tanh(self) -> Self {
        let s = self.val.tanh();
        let s1 = 1.0 - s * s;
        self.chain(s, s1, -2.0 * s * s1)
    }

    #[inline]
    pub fn sin(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }

    #[inline]
    pub fn cos(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }

    #[inline]
    pub fn exp(self) -> Self {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    pub fn recip(self) -> Result<Self> {
        if self.val == 0.0 {
            return Err(Error::Domain("reciprocal of a hyper-dual with zero value".into()));
        }
        let r = 1.0 / self.val;
        Ok(self.chain(r, -r * r, 2.0 * r * r * r))
    }

    /// `self / rhs`; fails when `rhs.val == 0`.
    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.val == 0.0 {
            return Err(Error::Domain("division by a hyper-dual with zero value".into()));
        }
        Ok(self * rhs.recip()?)
    }
}

impl From<f64> for HyperDual {
    fn from(v: f64) -> Self {
        HyperDual::constant(v)
    }
}

impl Add for HyperDual {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(self.val + r.val, self.dt + r.dt, self.dx + r.dx, self.dxx + r.dxx)
    }
}

impl AddAssign for HyperDual {
    #[inline]
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl Sub for HyperDual {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(self.val - r.val, self.dt - r.dt, self.dx - r.dx, self.dxx - r.dxx)
    }
}

impl Mul for HyperDual {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.val * r.val,
            self.dt * r.val + self.val * r.dt,
            self.dx * r.val + self.val * r.dx,
            self.dxx * r.val + 2.0 * self.dx * r.dx + self.val * r.dxx,
        )
    }
}

impl Neg for HyperDual {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.val, -self.dt, -self.dx, -self.dxx)
    }
}
