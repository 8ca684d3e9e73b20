use std::io::Write;
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{rk45_integrate, LorenzParams, BETA_RANGE, DT, DURATION, RHO_RANGE, SIGMA, X0_BOUND};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: LorenzParams,
    pub x0: [f64; 3],
    pub dt: f64,
    /// `states[k]` is the state at `t = k·dt`; `states[0] == x0`.
    pub states: Vec<[f64; 3]>,
}

/// Two consecutive states of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPair {
    pub x_prev: [f64; 3],
    pub x_next: [f64; 3],
    pub params: LorenzParams,
    pub dt: f64,
}

impl Trajectory {
    pub fn pair(&self, n: usize) -> StepPair {
        StepPair {
            x_prev: self.states[n - 1],
            x_next: self.states[n],
            params: self.params,
            dt: self.dt,
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = StepPair> + '_ {
        (1..self.states.len()).map(|n| self.pair(n))
    }
}

/// Sizes of a generated dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetSpec {
    pub n_params: usize,
    pub n_initial_conditions: usize,
    pub n_test: usize,
    pub duration: f64,
    pub dt: f64,
}

impl Default for DatasetSpec {
    /// 30 parameter draws × 100 initial conditions for training, 100 test
    /// trajectories, 25 s at 0.01 s.
    fn default() -> Self {
        Self {
            n_params: 30,
            n_initial_conditions: 100,
            n_test: 100,
            duration: DURATION,
            dt: DT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LorenzDataset {
    pub train: Vec<Trajectory>,
    pub test: Vec<Trajectory>,
}

fn draw_params(rng: &mut ChaCha8Rng) -> LorenzParams {
    let rho = rng.random_range(RHO_RANGE.0..=RHO_RANGE.1);
    let beta = rng.random_range(BETA_RANGE.0..=BETA_RANGE.1);
    LorenzParams::new(SIGMA, beta, rho)
}

fn draw_x0(rng: &mut ChaCha8Rng) -> [f64; 3] {
    std::array::from_fn(|_| rng.random_range(-X0_BOUND..=X0_BOUND))
}

/// Training trajectories for `n_params` parameter draws with
/// `n_initial_conditions` initial states each, and `n_test` test trajectories
/// whose parameters never coincide with a training draw.
pub fn generate_lorenz_dataset(seed: u64, spec: &DatasetSpec) -> Result<LorenzDataset> {
    if spec.n_params == 0 || spec.n_initial_conditions == 0 {
        return Err(Error::config("Lorenz dataset needs at least one parameter draw and initial condition"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train_params: Vec<LorenzParams> = (0..spec.n_params).map(|_| draw_params(&mut rng)).collect();
    let mut train = Vec::with_capacity(spec.n_params * spec.n_initial_conditions);
    for p in &train_params {
        for _ in 0..spec.n_initial_conditions {
            let x0 = draw_x0(&mut rng);
            train.push(rk45_integrate(x0, *p, spec.duration, spec.dt)?);
        }
    }
    let mut test = Vec::with_capacity(spec.n_test);
    while test.len() < spec.n_test {
        let p = draw_params(&mut rng);
        if train_params.contains(&p) {
            continue;
        }
        let x0 = draw_x0(&mut rng);
        test.push(rk45_integrate(x0, p, spec.duration, spec.dt)?);
    }
    Ok(LorenzDataset { train, test })
}

/// `n` pairs drawn uniformly over trajectories and positions.
pub fn sample_pairs(trajectories: &[Trajectory], n: usize, rng: &mut impl rand::Rng) -> Vec<StepPair> {
    (0..n)
        .map(|_| {
            let tr = &trajectories[rng.random_range(0..trajectories.len())];
            tr.pair(rng.random_range(1..tr.states.len()))
        })
        .collect()
}

// Trajectory files:
//   magic "HPTJ", version u32 LE, desc_len u32 LE, descriptor (`count`,
//   `length`, `dt` as key=value lines), then per trajectory
//   σ, β, ρ, x0 (3 values), states (length × 3), all f64 LE.
const MAGIC: &[u8; 4] = b"HPTJ";
const VERSION: u32 = 1;

pub fn trajectories_to_bytes(trajectories: &[Trajectory]) -> Result<Vec<u8>> {
    let length = trajectories.first().map_or(0, |t| t.states.len());
    let dt = trajectories.first().map_or(DT, |t| t.dt);
    if trajectories.iter().any(|t| t.states.len() != length || t.dt != dt) {
        return Err(Error::Internal("trajectories in one file must share length and step".into()));
    }
    let desc = format!("count={}\nlength={length}\ndt={dt:?}\n", trajectories.len());
    let mut out = Vec::with_capacity(12 + desc.len() + trajectories.len() * (6 + 3 * length) * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(desc.len() as u32).to_le_bytes());
    out.extend_from_slice(desc.as_bytes());
    for t in trajectories {
        let p = t.params;
        for v in [p.sigma, p.beta, p.rho].iter().chain(&t.x0).chain(t.states.iter().flatten()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn trajectories_from_bytes(bytes: &[u8]) -> Result<Vec<Trajectory>> {
    let bad = |m: &str| Error::load(format!("trajectory file: {m}"));
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
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
    let count: usize = field("count")?.parse().map_err(|_| bad("bad `count`"))?;
    let length: usize = field("length")?.parse().map_err(|_| bad("bad `length`"))?;
    let dt: f64 = field("dt")?.parse().map_err(|_| bad("bad `dt`"))?;
    let body = &bytes[12 + dl..];
    let per = 6 + 3 * length;
    if body.len() != count * per * 8 {
        return Err(bad("array length disagrees with the header"));
    }
    let floats: Vec<f64> = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(floats
        .chunks_exact(per.max(1))
        .take(count)
        .map(|c| Trajectory {
            params: LorenzParams::new(c[0], c[1], c[2]),
            x0: [c[3], c[4], c[5]],
            dt,
            states: c[6..].chunks_exact(3).map(|s| [s[0], s[1], s[2]]).collect(),
        })
        .collect())
}

pub fn save_trajectories(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let bytes = trajectories_to_bytes(trajectories)?;
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&bytes))
        .map_err(|e| Error::io(path, e))
}

pub fn load_trajectories(path: &Path) -> Result<Vec<Trajectory>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    trajectories_from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> DatasetSpec {
        DatasetSpec {
            n_params: 3,
            n_initial_conditions: 4,
            n_test: 5,
            duration: 1.0,
            dt: 0.01,
        }
    }

    #[test]
    fn dataset_shape_and_ranges() {
        let d = generate_lorenz_dataset(7, &tiny()).unwrap();
        assert_eq!(d.train.len(), 12);
        assert_eq!(d.test.len(), 5);
        for t in d.train.iter().chain(&d.test) {
            assert_eq!(t.states.len(), 101);
            assert_eq!(t.states[0], t.x0);
            assert!(t.x0.iter().all(|v| v.abs() <= 10.0));
            assert_eq!(t.params.sigma, 10.0);
            assert!((0.0..=28.0).contains(&t.params.rho));
            assert!((2.0 / 3.0..=8.0 / 3.0).contains(&t.params.beta));
        }
        for t in &d.test {
            assert!(d.train.iter().all(|tr| tr.params != t.params));
        }
        // each parameter draw is shared by consecutive blocks of initial conditions
        assert!(d.train[..4].iter().all(|t| t.params == d.train[0].params));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_lorenz_dataset(3, &tiny()).unwrap(), generate_lorenz_dataset(3, &tiny()).unwrap());
        assert_ne!(
            generate_lorenz_dataset(3, &tiny()).unwrap().train[0],
            generate_lorenz_dataset(4, &tiny()).unwrap().train[0]
        );
    }

    #[test]
    fn file_round_trip() {
        let d = generate_lorenz_dataset(1, &tiny()).unwrap();
        let bytes = trajectories_to_bytes(&d.test).unwrap();
        assert_eq!(trajectories_from_bytes(&bytes).unwrap(), d.test);
        assert!(trajectories_from_bytes(&bytes[..bytes.len() - 8]).is_err());
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(trajectories_from_bytes(&bad).is_err());
    }

    #[test]
    fn pairs_are_consecutive() {
        let d = generate_lorenz_dataset(2, &tiny()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for p in sample_pairs(&d.train, 50, &mut rng) {
            let found = d
                .train
                .iter()
                .filter(|t| t.params == p.params)
                .any(|t| t.states.windows(2).any(|w| w[0] == p.x_prev && w[1] == p.x_next));
            assert!(found);
            assert_eq!(p.dt, 0.01);
        }
        let first = d.train[0].pairs().next().unwrap();
        assert_eq!(first.x_prev, d.train[0].states[0]);
        assert_eq!(first.x_next, d.train[0].states[1]);
    }
}
