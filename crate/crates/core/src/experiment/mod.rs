//! Experiment pipeline behind the CLI: data generation, training, evaluation
//! and latency benchmarks, all rooted in one working directory:
//!
//! ```text
//! <workdir>/data/     datasets and reference solutions
//! <workdir>/models/   trained .hpnn files
//! <workdir>/reports/  loss histories, evaluation, rollout, plot and bench CSVs
//! ```

mod bench;
mod config;

pub use bench::{bench_model, hardware_note, time_calls, write_bench_csv, BenchRow, REPS, WARMUP};
pub use config::{ExperimentConfig, LORENZ_BATCH, LORENZ_ITERATIONS};

use std::path::{Path, PathBuf};

use crate::burgers::{
    self, cole_hopf_reference, evaluate_mse, predict_lattice, solve_reference, write_eval_csv, write_plot_csv,
    BurgersBatch, BurgersDataset, EvalLattice, NuErrors, ReferenceMethod, ReferenceSolution, FIGURE_NU, TEST_NUS,
};
use crate::error::{Error, Result};
use crate::lorenz::{
    self, generate_lorenz_dataset, load_trajectories, multistep_loss, rk45_integrate, rollout, rollout_and_score,
    sample_pairs, save_trajectories, write_figure_csv, write_rollout_csv, LearnedDynamics, RolloutReport, Trajectory,
    FIGURE_PARAMS, FIGURE_X0,
};
use crate::models::{architecture, init_model, ModelKind, Problem};
use crate::nets::{ModelFile, Net};
use crate::optim::{train, write_history_csv, TrainOutcome, TrainStatus, TrainingConfig};

/// File locations inside a working directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn data(&self) -> PathBuf {
        self.root.join("data")
    }

    pub fn models(&self) -> PathBuf {
        self.root.join("models")
    }

    pub fn reports(&self) -> PathBuf {
        self.root.join("reports")
    }

    pub fn burgers_dataset(&self, seed: u64) -> PathBuf {
        self.data().join(format!("burgers_dataset_seed{seed}.csv"))
    }

    pub fn burgers_reference(&self, method: ReferenceMethod, nu: f64) -> PathBuf {
        self.data().join(format!("burgers_reference_{}_nu{nu}.hpref", method.tag()))
    }

    pub fn lorenz_train(&self, seed: u64) -> PathBuf {
        self.data().join(format!("lorenz_train_seed{seed}.hptj"))
    }

    pub fn lorenz_test(&self, seed: u64) -> PathBuf {
        self.data().join(format!("lorenz_test_seed{seed}.hptj"))
    }

    fn stem(problem: Problem, model: ModelKind, seed: u64) -> String {
        format!("{problem}_{model}_seed{seed}")
    }

    pub fn model(&self, problem: Problem, model: ModelKind, seed: u64) -> PathBuf {
        self.models().join(format!("{}.hpnn", Self::stem(problem, model, seed)))
    }

    pub fn report(&self, problem: Problem, model: ModelKind, seed: u64, suffix: &str) -> PathBuf {
        self.reports().join(format!("{}_{suffix}.csv", Self::stem(problem, model, seed)))
    }

    pub fn bench(&self, problem: Problem) -> PathBuf {
        self.reports().join(format!("{problem}_bench.csv"))
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn require(path: &Path, config_hint: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingData {
            path: path.to_path_buf(),
            config: config_hint.to_string(),
        })
    }
}

/// Writes datasets (and, for Burgers, reference solutions on the evaluation
/// lattice for every held-out viscosity). Refuses to overwrite existing files
/// unless `force` is set. Returns the written paths.
pub fn generate(cfg: &ExperimentConfig, force: bool) -> Result<Vec<PathBuf>> {
    let layout = Layout::new(&cfg.workdir);
    let seed = cfg.training.seed;
    let targets: Vec<PathBuf> = match cfg.problem {
        Problem::Burgers => std::iter::once(layout.burgers_dataset(seed))
            .chain(TEST_NUS.iter().map(|&nu| layout.burgers_reference(cfg.reference_method, nu)))
            .collect(),
        Problem::Lorenz => vec![layout.lorenz_train(seed), layout.lorenz_test(seed)],
    };
    if !force {
        if let Some(p) = targets.iter().find(|p| p.exists()) {
            return Err(Error::Data(format!(
                "{} already exists; pass --force to overwrite",
                p.display()
            )));
        }
    }
    create_dir(&layout.data())?;
    match cfg.problem {
        Problem::Burgers => {
            burgers::sample_dataset(seed).save(&targets[0])?;
            let lattice = EvalLattice::new(cfg.eval_nt, cfg.eval_nx);
            for (&nu, path) in TEST_NUS.iter().zip(&targets[1..]) {
                reference_for(cfg.reference_method, nu, &lattice)?.save(path)?;
            }
        }
        Problem::Lorenz => {
            let ds = generate_lorenz_dataset(seed, &cfg.lorenz)?;
            save_trajectories(&targets[0], &ds.train)?;
            save_trajectories(&targets[1], &ds.test)?;
        }
    }
    Ok(targets)
}

pub fn reference_for(method: ReferenceMethod, nu: f64, lattice: &EvalLattice) -> Result<ReferenceSolution> {
    match method {
        ReferenceMethod::ColeHopf => cole_hopf_reference(nu, lattice),
        ReferenceMethod::FiniteDifference => {
            solve_reference(nu, burgers::reference::DEFAULT_NT, burgers::reference::DEFAULT_NX, lattice)
        }
    }
}

/// Trains one Burgers model from its seeded initialization.
pub fn train_burgers(kind: ModelKind, cfg: &TrainingConfig, dataset: &BurgersDataset) -> Result<(Net, TrainOutcome)> {
    let net = init_model(Problem::Burgers, kind, cfg.seed)?;
    let arch = net.arch();
    let outcome = train(
        |theta, rng| {
            let batch = BurgersBatch::sample(dataset, cfg.batch_data, cfg.batch_collocation, rng);
            burgers::pinn_loss(&arch, theta, &batch, cfg.alpha)
        },
        net.trainable().to_vec(),
        cfg,
    )?;
    Ok((Net::from_parts(&arch, outcome.theta.clone())?, outcome))
}

/// Trains one Lorenz model on `batch_data` random step pairs per iteration.
pub fn train_lorenz(kind: ModelKind, cfg: &TrainingConfig, trajectories: &[Trajectory]) -> Result<(Net, TrainOutcome)> {
    if trajectories.is_empty() {
        return Err(Error::Data("no training trajectories".into()));
    }
    let net = init_model(Problem::Lorenz, kind, cfg.seed)?;
    let arch = net.arch();
    let outcome = train(
        |theta, rng| multistep_loss(&arch, theta, &sample_pairs(trajectories, cfg.batch_data, rng)),
        net.trainable().to_vec(),
        cfg,
    )?;
    Ok((Net::from_parts(&arch, outcome.theta.clone())?, outcome))
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub evaluated_spec: String,
    pub evaluated_params: usize,
    pub trainable_params: usize,
    pub outcome: TrainOutcome,
    pub model_path: PathBuf,
    pub history_path: PathBuf,
}

/// Trains the configured model and writes its `.hpnn` file and loss history.
/// `config_hint` names the config in the missing-data message.
pub fn train_command(cfg: &ExperimentConfig, config_hint: &str) -> Result<TrainSummary> {
    let layout = Layout::new(&cfg.workdir);
    let seed = cfg.training.seed;
    let arch = architecture(cfg.problem, cfg.model);
    let (net, outcome) = match cfg.problem {
        Problem::Burgers => {
            let path = layout.burgers_dataset(seed);
            require(&path, config_hint)?;
            train_burgers(cfg.model, &cfg.training, &BurgersDataset::load(&path)?)?
        }
        Problem::Lorenz => {
            let path = layout.lorenz_train(seed);
            require(&path, config_hint)?;
            train_lorenz(cfg.model, &cfg.training, &load_trajectories(&path)?)?
        }
    };
    create_dir(&layout.models())?;
    create_dir(&layout.reports())?;
    let model_path = layout.model(cfg.problem, cfg.model, seed);
    let history_path = layout.report(cfg.problem, cfg.model, seed, "history");
    ModelFile {
        problem: cfg.problem.tag().into(),
        model: cfg.model.tag().into(),
        net,
    }
    .save(&model_path)?;
    write_history_csv(&history_path, &outcome.history)?;
    if let TrainStatus::Aborted { iteration, reason } = &outcome.status {
        return Err(Error::Training {
            iteration: *iteration,
            loss: outcome.history.last().map_or(f64::NAN, |r| r.total_loss),
            reason: reason.clone(),
        });
    }
    Ok(TrainSummary {
        evaluated_spec: arch.evaluated_spec().to_string(),
        evaluated_params: arch.evaluated_spec().param_count(),
        trainable_params: arch.trainable_count(),
        outcome,
        model_path,
        history_path,
    })
}

/// Loads a model file and checks it against the expected problem.
pub fn load_model(path: &Path, problem: Problem) -> Result<(ModelKind, Net)> {
    let file = ModelFile::load(path)?;
    if file.problem != problem.tag() {
        return Err(Error::load(format!(
            "{} holds a {} model, expected {problem}",
            path.display(),
            file.problem
        )));
    }
    let kind: ModelKind = file
        .model
        .parse()
        .map_err(|_| Error::load(format!("unknown model tag `{}` in {}", file.model, path.display())))?;
    if file.net.arch() != architecture(problem, kind) {
        return Err(Error::load(format!(
            "{} does not have the {problem}/{kind} architecture",
            path.display()
        )));
    }
    Ok((kind, file.net))
}

#[derive(Debug, Clone)]
pub enum EvalSummary {
    Burgers {
        model: ModelKind,
        mean_mse: f64,
        per_nu: Vec<NuErrors>,
        report: PathBuf,
        plot: PathBuf,
    },
    Lorenz {
        model: ModelKind,
        report: RolloutReport,
        report_path: PathBuf,
        plot: PathBuf,
    },
}

/// Scores a trained model and writes its report and plot-data CSVs.
/// Defaults to the configured model's file when `model_path` is `None`.
pub fn evaluate_command(cfg: &ExperimentConfig, model_path: Option<&Path>, config_hint: &str) -> Result<EvalSummary> {
    let layout = Layout::new(&cfg.workdir);
    let seed = cfg.training.seed;
    let default_path = layout.model(cfg.problem, cfg.model, seed);
    let path = model_path.unwrap_or(&default_path);
    if !path.exists() {
        return Err(Error::Data(format!(
            "model file {} not found; run `hyperpinn train --config {config_hint}` first",
            path.display()
        )));
    }
    let (kind, net) = load_model(path, cfg.problem)?;
    create_dir(&layout.reports())?;
    match cfg.problem {
        Problem::Burgers => {
            let lattice = EvalLattice::new(cfg.eval_nt, cfg.eval_nx);
            let mut refs = Vec::with_capacity(TEST_NUS.len());
            for &nu in &TEST_NUS {
                let p = layout.burgers_reference(cfg.reference_method, nu);
                require(&p, config_hint)?;
                refs.push(ReferenceSolution::load(&p)?);
            }
            let (mean_mse, per_nu) = evaluate_mse(&net, &TEST_NUS, &refs, &lattice)?;
            let report = layout.report(cfg.problem, kind, seed, "eval");
            write_eval_csv(&report, kind.tag(), mean_mse, &per_nu)?;
            let fig_ref = refs.iter().find(|r| r.nu == FIGURE_NU).expect("figure viscosity is a test viscosity");
            let plot = layout.report(cfg.problem, kind, seed, "figure");
            write_plot_csv(&plot, fig_ref, &predict_lattice(&net, FIGURE_NU, &lattice)?)?;
            Ok(EvalSummary::Burgers {
                model: kind,
                mean_mse,
                per_nu,
                report,
                plot,
            })
        }
        Problem::Lorenz => {
            let p = layout.lorenz_test(seed);
            require(&p, config_hint)?;
            let mut test = load_trajectories(&p)?;
            if let Some(limit) = cfg.lorenz_eval_limit {
                test.truncate(limit);
            }
            let report = rollout_and_score(&net, &test)?;
            let report_path = layout.report(cfg.problem, kind, seed, "rollout");
            write_rollout_csv(&report_path, kind.tag(), &report)?;
            let duration = test.first().map_or(lorenz::DURATION, |t| (t.states.len() - 1) as f64 * t.dt);
            let truth = rk45_integrate(FIGURE_X0, FIGURE_PARAMS, duration, lorenz::DT)?;
            let (pred, _) = rollout(&mut LearnedDynamics::new(&net, &FIGURE_PARAMS)?, FIGURE_X0, duration, lorenz::DT)?;
            let plot = layout.report(cfg.problem, kind, seed, "figure");
            write_figure_csv(&plot, &truth, &pred)?;
            Ok(EvalSummary::Lorenz {
                model: kind,
                report,
                report_path,
                plot,
            })
        }
    }
}

/// Benchmarks the given model files, or every trained model of the
/// configured problem and seed when `models` is empty.
pub fn bench_command(cfg: &ExperimentConfig, models: &[PathBuf], config_hint: &str) -> Result<(Vec<BenchRow>, PathBuf)> {
    let layout = Layout::new(&cfg.workdir);
    let paths: Vec<PathBuf> = if models.is_empty() {
        ModelKind::ALL
            .iter()
            .map(|&k| layout.model(cfg.problem, k, cfg.training.seed))
            .filter(|p| p.exists())
            .collect()
    } else {
        models.to_vec()
    };
    if paths.is_empty() {
        return Err(Error::Data(format!(
            "no trained {} models under {}; run `hyperpinn train --config {config_hint}` first",
            cfg.problem,
            layout.models().display()
        )));
    }
    let mut rows = Vec::new();
    for p in &paths {
        if !p.exists() {
            return Err(Error::Data(format!("model file {} not found", p.display())));
        }
        let (kind, net) = load_model(p, cfg.problem)?;
        rows.extend(bench_model(cfg.problem, kind, &net, WARMUP, REPS)?);
    }
    create_dir(&layout.reports())?;
    let out = layout.bench(cfg.problem);
    write_bench_csv(&out, &rows)?;
    Ok((rows, out))
}
