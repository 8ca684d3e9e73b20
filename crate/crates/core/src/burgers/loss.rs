use rand::seq::index;
use rand::RngExt;

use super::data::{sample_collocation, BurgersDataset};
use super::{encode_nu, NU_MAX, NU_MIN};
use crate::autodiff::{GradResult, HyperDual};
use crate::error::{Error, Result};
use crate::nets::batched::{value_and_grad, BatchInput, Jets};
use crate::nets::NetArch;
use crate::optim::Evaluation;

/// One training batch: supervised `(t, x, ν, u)` and collocation `(t, x, ν)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgersBatch {
    pub data: Vec<[f64; 4]>,
    pub collocation: Vec<[f64; 3]>,
}

impl BurgersBatch {
    /// Draws `n_data` supervised points (all of them when `n_data` covers the
    /// dataset) with fresh viscosities, and `n_collocation` fresh collocation points.
    pub fn sample(dataset: &BurgersDataset, n_data: usize, n_collocation: usize, rng: &mut impl rand::Rng) -> Self {
        let pts = &dataset.supervised;
        let chosen: Vec<usize> = if n_data >= pts.len() {
            (0..pts.len()).collect()
        } else {
            index::sample(rng, pts.len(), n_data).into_vec()
        };
        let data = chosen
            .into_iter()
            .map(|i| {
                let p = pts[i];
                [p.t, p.x, rng.random_range(NU_MIN..=NU_MAX), p.u]
            })
            .collect();
        let collocation = sample_collocation(n_collocation, rng);
        Self { data, collocation }
    }

    pub fn rows(&self) -> usize {
        self.data.len() + self.collocation.len()
    }

    fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.data
            .iter()
            .map(|p| (p[0], p[1], p[2]))
            .chain(self.collocation.iter().map(|c| (c[0], c[1], c[2])))
    }

    /// Seeded network input for every row, supervised rows first.
    pub fn input(&self, arch: &NetArch) -> BatchInput<4> {
        let rows = self.rows();
        match arch {
            NetArch::Plain(_) => {
                let mut x = Jets::<4>::zeros(rows, 3);
                for (r, (t, xx, nu)) in self.points().enumerate() {
                    x.set_hyperdual(r, 0, HyperDual::seed_t(t));
                    x.set_hyperdual(r, 1, HyperDual::seed_x(xx));
                    x.set_hyperdual(r, 2, HyperDual::constant(encode_nu(nu)));
                }
                BatchInput::Plain(x)
            }
            NetArch::Hyper { .. } => {
                let mut lambda = Jets::<1>::zeros(rows, 1);
                let mut x = Jets::<4>::zeros(rows, 2);
                for (r, (t, xx, nu)) in self.points().enumerate() {
                    lambda.set(r, 0, 0, encode_nu(nu));
                    x.set_hyperdual(r, 0, HyperDual::seed_t(t));
                    x.set_hyperdual(r, 1, HyperDual::seed_x(xx));
                }
                BatchInput::Hyper { lambda, main: x }
            }
        }
    }
}

/// `L_data + α·L_physics` with sums over the batch, and its gradient over the
/// trainable parameters (`θ_h` for a hypernetwork, `θ` for a plain network).
pub fn pinn_loss(arch: &NetArch, theta: &[f64], batch: &BurgersBatch, alpha: f64) -> Result<Evaluation> {
    if batch.data.is_empty() || batch.collocation.is_empty() {
        return Err(Error::config("PINN loss needs non-empty data and collocation batches"));
    }
    let n_data = batch.data.len();
    let ((data_loss, physics_loss), gradient) = value_and_grad(arch, theta, batch.input(arch), |out| {
        let mut adj = Jets::<4>::zeros(out.rows(), 1);
        let mut data_loss = 0.0;
        for (r, p) in batch.data.iter().enumerate() {
            let e = out.get(r, 0, 0) - p[3];
            data_loss += e * e;
            adj.set(r, 0, 0, 2.0 * e);
        }
        let mut physics_loss = 0.0;
        for (i, c) in batch.collocation.iter().enumerate() {
            let r = n_data + i;
            let u = out.hyperdual(r, 0);
            let nu = c[2];
            let res = u.dt + u.val * u.dx - nu * u.dxx;
            physics_loss += res * res;
            let g = 2.0 * alpha * res;
            adj.set_hyperdual(r, 0, HyperDual::new(g * u.dx, g, g * u.val, -g * nu));
        }
        Ok(((data_loss, physics_loss), adj))
    })?;
    Ok(Evaluation {
        grad: GradResult {
            loss_value: data_loss + alpha * physics_loss,
            gradient,
        },
        data_loss,
        physics_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burgers::sample_dataset;
    use crate::models::{architecture, init_model, ModelKind, Problem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alpha_zero_is_pure_data_loss() {
        let net = init_model(Problem::Burgers, ModelKind::SmallBaseline, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let batch = BurgersBatch::sample(&sample_dataset(0), 100, 32, &mut rng);
        let ev = pinn_loss(&net.arch(), net.trainable(), &batch, 0.0).unwrap();
        assert_eq!(ev.grad.loss_value, ev.data_loss);
        assert!(ev.physics_loss > 0.0);
    }

    #[test]
    fn single_point_offset() {
        // zero network predicts 0 everywhere; target 0.5 gives 0.25
        let arch = architecture(Problem::Burgers, ModelKind::SmallBaseline);
        let theta = vec![0.0; arch.trainable_count()];
        let batch = BurgersBatch {
            data: vec![[0.0, 0.3, 0.01, 0.5]],
            collocation: vec![[0.5, 0.5, 0.01]],
        };
        let ev = pinn_loss(&arch, &theta, &batch, 1.0).unwrap();
        assert!((ev.data_loss - 0.25).abs() < 1e-15);
        assert_eq!(ev.physics_loss, 0.0);
    }

    #[test]
    fn exact_fit_has_zero_loss() {
        // constant network u ≡ 0 matches boundary data and has zero residual
        let arch = architecture(Problem::Burgers, ModelKind::HyperPinn);
        let theta = vec![0.0; arch.trainable_count()];
        let batch = BurgersBatch {
            data: vec![[0.3, 1.0, 0.02, 0.0], [0.0, 0.0, 0.05, 0.0]],
            collocation: vec![[0.2, -0.4, 0.003], [0.9, 0.1, 0.07]],
        };
        let ev = pinn_loss(&arch, &theta, &batch, 1.0).unwrap();
        assert_eq!(ev.grad.loss_value, 0.0);
    }

    #[test]
    fn empty_batches_are_config_errors() {
        let arch = architecture(Problem::Burgers, ModelKind::SmallBaseline);
        let theta = vec![0.0; arch.trainable_count()];
        let empty = BurgersBatch {
            data: vec![],
            collocation: vec![[0.1, 0.1, 0.01]],
        };
        assert!(matches!(pinn_loss(&arch, &theta, &empty, 1.0), Err(Error::Config(_))));
        let empty = BurgersBatch {
            data: vec![[0.0, 0.0, 0.01, 0.0]],
            collocation: vec![],
        };
        assert!(matches!(pinn_loss(&arch, &theta, &empty, 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn batch_sampling_uses_all_supervised_points() {
        let ds = sample_dataset(1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = BurgersBatch::sample(&ds, 100, 1024, &mut rng);
        assert_eq!(b.data.len(), 100);
        assert_eq!(b.collocation.len(), 1024);
        assert!(b.data.iter().all(|p| (NU_MIN..=NU_MAX).contains(&p[2])));
        let small = BurgersBatch::sample(&ds, 10, 4, &mut rng);
        assert_eq!(small.data.len(), 10);
    }
}
