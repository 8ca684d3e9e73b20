use std::fmt::Write as _;
use std::path::Path;

use super::reference::ReferenceSolution;
use super::{encode_nu, T_END, X_MAX, X_MIN};
use crate::error::{Error, Result};
use crate::nets::batched::{predict, Jets, RowParams};
use crate::nets::{Net, Parameterization};

/// Held-out viscosities, log-spaced over the training range.
pub const TEST_NUS: [f64; 7] = [0.0017, 0.003, 0.007, 0.015, 0.03, 0.06, 0.09];
/// Viscosity of the shock-regime plot case.
pub const FIGURE_NU: f64 = 0.003;

/// Tensor-product `(t, x)` grid with both endpoints included on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalLattice {
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

impl EvalLattice {
    pub fn new(nt: usize, nx: usize) -> Self {
        Self {
            ts: linspace(0.0, T_END, nt),
            xs: linspace(X_MIN, X_MAX, nx),
        }
    }

    pub fn len(&self) -> usize {
        self.ts.len() * self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn matches(&self, r: &ReferenceSolution) -> bool {
        self.ts == r.ts && self.xs == r.xs
    }
}

impl Default for EvalLattice {
    /// 100 times by 256 positions.
    fn default() -> Self {
        Self::new(100, 256)
    }
}

/// Model output on every lattice point at viscosity `nu`, row-major in `t`.
/// A hypernetwork generates its main network once for `nu`.
pub fn predict_lattice(net: &Net, nu: f64, lattice: &EvalLattice) -> Result<Vec<f64>> {
    let (ts, xs): (Vec<f64>, Vec<f64>) = lattice
        .ts
        .iter()
        .flat_map(|&t| lattice.xs.iter().map(move |&x| (t, x)))
        .unzip();
    predict_points(net, nu, &ts, &xs)
}

/// Model output at the points `(ts[i], xs[i])` for viscosity `nu`.
pub fn predict_points(net: &Net, nu: f64, ts: &[f64], xs: &[f64]) -> Result<Vec<f64>> {
    if ts.len() != xs.len() {
        return Err(Error::config(format!("{} times but {} positions", ts.len(), xs.len())));
    }
    let rows = ts.len();
    match net {
        Net::Hyper(h) => {
            let main = h.generate_main(&Parameterization(vec![encode_nu(nu)]))?;
            if main.spec().input_dim != 2 || main.spec().output_dim != 1 {
                return Err(Error::config(format!("{} is not a Burgers main network", main.spec())));
            }
            let mut x = Jets::<1>::zeros(rows, 2);
            for r in 0..rows {
                x.set(r, 0, 0, ts[r]);
                x.set(r, 0, 1, xs[r]);
            }
            Ok(predict(main.spec(), RowParams::Shared(main.values()), x)?.into_data())
        }
        Net::Plain(p) => {
            if p.spec().input_dim != 3 || p.spec().output_dim != 1 {
                return Err(Error::config(format!("{} is not a Burgers baseline", p.spec())));
            }
            let e = encode_nu(nu);
            let mut x = Jets::<1>::zeros(rows, 3);
            for r in 0..rows {
                x.set(r, 0, 0, ts[r]);
                x.set(r, 0, 1, xs[r]);
                x.set(r, 0, 2, e);
            }
            Ok(predict(p.spec(), RowParams::Shared(p.values()), x)?.into_data())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuErrors {
    pub nu: f64,
    pub mse: f64,
    pub max_error: f64,
}

/// Squared-error statistics of `net` against one reference field.
pub fn lattice_errors(net: &Net, reference: &ReferenceSolution) -> Result<NuErrors> {
    let lattice = EvalLattice {
        ts: reference.ts.clone(),
        xs: reference.xs.clone(),
    };
    let pred = predict_lattice(net, reference.nu, &lattice)?;
    Ok(errors_of(reference, &pred))
}

fn errors_of(reference: &ReferenceSolution, pred: &[f64]) -> NuErrors {
    let (mut sum, mut max) = (0.0, 0.0f64);
    for (p, r) in pred.iter().zip(&reference.values) {
        let e = p - r;
        sum += e * e;
        max = max.max(e.abs());
    }
    NuErrors {
        nu: reference.nu,
        mse: sum / pred.len() as f64,
        max_error: max,
    }
}

/// Per-viscosity errors and their overall mean over `test_nus` and the lattice.
pub fn evaluate_mse(
    net: &Net,
    test_nus: &[f64],
    references: &[ReferenceSolution],
    lattice: &EvalLattice,
) -> Result<(f64, Vec<NuErrors>)> {
    if test_nus.is_empty() {
        return Err(Error::config("no test viscosities given"));
    }
    let mut per_nu = Vec::with_capacity(test_nus.len());
    for &nu in test_nus {
        let reference = references
            .iter()
            .find(|r| r.nu == nu)
            .ok_or_else(|| Error::config(format!("no reference solution for nu = {nu}")))?;
        if !lattice.matches(reference) {
            return Err(Error::config(format!(
                "reference for nu = {nu} is not sampled on the evaluation lattice"
            )));
        }
        per_nu.push(errors_of(reference, &predict_lattice(net, nu, lattice)?));
    }
    let mean = per_nu.iter().map(|e| e.mse).sum::<f64>() / per_nu.len() as f64;
    Ok((mean, per_nu))
}

/// `model,nu,mse` rows for each viscosity plus an `all` row with the mean.
pub fn write_eval_csv(path: &Path, model: &str, mean: f64, per_nu: &[NuErrors]) -> Result<()> {
    let mut s = String::from("model,nu,mse\n");
    for e in per_nu {
        writeln!(s, "{model},{:?},{:e}", e.nu, e.mse).unwrap();
    }
    writeln!(s, "{model},all,{mean:e}").unwrap();
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// `t,x,u_true,u_pred` over the reference lattice.
pub fn write_plot_csv(path: &Path, reference: &ReferenceSolution, pred: &[f64]) -> Result<()> {
    if pred.len() != reference.values.len() {
        return Err(Error::Internal("prediction does not cover the reference lattice".into()));
    }
    let mut s = String::from("t,x,u_true,u_pred\n");
    let mut k = 0;
    for &t in &reference.ts {
        for &x in &reference.xs {
            writeln!(s, "{t:?},{x:?},{:?},{:?}", reference.values[k], pred[k]).unwrap();
            k += 1;
        }
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burgers::reference::cole_hopf_reference;
    use crate::models::{architecture, init_model, ModelKind, Problem};

    #[test]
    fn default_lattice_shape() {
        let l = EvalLattice::default();
        assert_eq!((l.ts.len(), l.xs.len()), (100, 256));
        assert_eq!((l.ts[0], *l.ts.last().unwrap()), (0.0, 1.0));
        assert_eq!((l.xs[0], *l.xs.last().unwrap()), (-1.0, 1.0));
        assert!(TEST_NUS.contains(&FIGURE_NU));
    }

    #[test]
    fn zero_model_mse_is_mean_square_of_reference() {
        let lattice = EvalLattice::new(12, 40);
        let arch = architecture(Problem::Burgers, ModelKind::HyperPinn);
        let zero = Net::from_parts(&arch, vec![0.0; arch.trainable_count()]).unwrap();
        let refs: Vec<_> = [0.01, 0.05].iter().map(|&nu| cole_hopf_reference(nu, &lattice).unwrap()).collect();
        let (mean, per) = evaluate_mse(&zero, &[0.01, 0.05], &refs, &lattice).unwrap();
        for (e, r) in per.iter().zip(&refs) {
            let ms = r.values.iter().map(|v| v * v).sum::<f64>() / r.values.len() as f64;
            assert!((e.mse - ms).abs() < 1e-15);
        }
        assert!((mean - (per[0].mse + per[1].mse) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn missing_reference_is_config_error() {
        let lattice = EvalLattice::new(3, 5);
        let net = init_model(Problem::Burgers, ModelKind::SmallBaseline, 1).unwrap();
        let refs = vec![cole_hopf_reference(0.01, &lattice).unwrap()];
        assert!(matches!(
            evaluate_mse(&net, &[0.02], &refs, &lattice),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn hyper_prediction_matches_scalar_path() {
        let lattice = EvalLattice::new(4, 6);
        let net = init_model(Problem::Burgers, ModelKind::HyperPinn, 3).unwrap();
        let pred = predict_lattice(&net, 0.02, &lattice).unwrap();
        let Net::Hyper(h) = &net else { unreachable!() };
        let main = h.generate_main(&Parameterization(vec![encode_nu(0.02)])).unwrap();
        let mut k = 0;
        for &t in &lattice.ts {
            for &x in &lattice.xs {
                let u = crate::nets::forward(main.spec(), main.values(), &[t, x]).unwrap()[0];
                assert!((u - pred[k]).abs() < 1e-13);
                k += 1;
            }
        }
    }
}
