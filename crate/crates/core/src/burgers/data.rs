use std::fmt::Write as _;
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{initial_condition, NU_MAX, NU_MIN, T_END, X_MAX, X_MIN};
use crate::error::{Error, Result};

pub const N_INITIAL: usize = 50;
pub const N_BOUNDARY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Initial,
    Boundary,
}

/// A supervised point on `t = 0` or `x = ±1`. The viscosity is attached at
/// batch time because the conditions do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersPoint {
    pub kind: PointKind,
    pub t: f64,
    pub x: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurgersDataset {
    pub supervised: Vec<BurgersPoint>,
}

/// 50 initial-condition points with `x` uniform in `[−1, 1]` and 50 boundary
/// points with `t` uniform in `[0, 1]` on a uniformly chosen side.
pub fn sample_dataset(seed: u64) -> BurgersDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut supervised = Vec::with_capacity(N_INITIAL + N_BOUNDARY);
    for _ in 0..N_INITIAL {
        let x = rng.random_range(X_MIN..=X_MAX);
        supervised.push(BurgersPoint {
            kind: PointKind::Initial,
            t: 0.0,
            x,
            u: initial_condition(x),
        });
    }
    for _ in 0..N_BOUNDARY {
        let t = rng.random_range(0.0..=T_END);
        let x = if rng.random_bool(0.5) { X_MIN } else { X_MAX };
        supervised.push(BurgersPoint {
            kind: PointKind::Boundary,
            t,
            x,
            u: 0.0,
        });
    }
    BurgersDataset { supervised }
}

/// `n` collocation points `(t, x, ν)` uniform over the domain and viscosity range.
pub fn sample_collocation(n: usize, rng: &mut impl rand::Rng) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| {
            [
                rng.random_range(0.0..=T_END),
                rng.random_range(X_MIN..=X_MAX),
                rng.random_range(NU_MIN..=NU_MAX),
            ]
        })
        .collect()
}

impl BurgersDataset {
    pub fn len(&self) -> usize {
        self.supervised.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supervised.is_empty()
    }

    /// CSV with header `kind,t,x,u`; values in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,t,x,u\n");
        for p in &self.supervised {
            let kind = match p.kind {
                PointKind::Initial => "initial",
                PointKind::Boundary => "boundary",
            };
            writeln!(s, "{kind},{:?},{:?},{:?}", p.t, p.x, p.u).unwrap();
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("kind,t,x,u") {
            return Err(Error::Data("dataset CSV must start with `kind,t,x,u`".into()));
        }
        let supervised = lines
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, l)| {
                let f: Vec<&str> = l.split(',').collect();
                let bad = || Error::Data(format!("dataset row {} is malformed: `{l}`", i + 1));
                if f.len() != 4 {
                    return Err(bad());
                }
                let kind = match f[0] {
                    "initial" => PointKind::Initial,
                    "boundary" => PointKind::Boundary,
                    _ => return Err(bad()),
                };
                let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
                Ok(BurgersPoint {
                    kind,
                    t: num(f[1])?,
                    x: num(f[2])?,
                    u: num(f[3])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { supervised })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conditions_hold() {
        let d = sample_dataset(3);
        assert_eq!(d.len(), 100);
        let ic = d.supervised.iter().filter(|p| p.kind == PointKind::Initial).count();
        assert_eq!(ic, 50);
        for p in &d.supervised {
            match p.kind {
                PointKind::Initial => {
                    assert_eq!(p.t, 0.0);
                    assert!((-1.0..=1.0).contains(&p.x));
                    assert_eq!(p.u, initial_condition(p.x));
                }
                PointKind::Boundary => {
                    assert!(p.x == -1.0 || p.x == 1.0);
                    assert!((0.0..=1.0).contains(&p.t));
                    assert_eq!(p.u, 0.0);
                }
            }
        }
    }

    #[test]
    fn initial_condition_at_half() {
        assert!((initial_condition(0.5) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(sample_dataset(9), sample_dataset(9));
        assert_ne!(sample_dataset(9), sample_dataset(10));
        let mut a = ChaCha8Rng::seed_from_u64(1);
        let mut b = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_collocation(64, &mut a), sample_collocation(64, &mut b));
    }

    #[test]
    fn collocation_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for [t, x, nu] in sample_collocation(2000, &mut rng) {
            assert!((0.0..=1.0).contains(&t));
            assert!((-1.0..=1.0).contains(&x));
            assert!((NU_MIN..=NU_MAX).contains(&nu));
        }
    }

    #[test]
    fn csv_round_trip() {
        let d = sample_dataset(4);
        assert_eq!(BurgersDataset::from_csv(&d.to_csv()).unwrap(), d);
        assert!(BurgersDataset::from_csv("t,x\n").is_err());
        assert!(BurgersDataset::from_csv("kind,t,x,u\ninitial,0,1\n").is_err());
    }
}
