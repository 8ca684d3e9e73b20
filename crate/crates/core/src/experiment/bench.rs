use std::fmt::Write as _;
use std::hint::black_box;
use std::path::Path;
use std::time::Instant;

use crate::burgers::encode_nu;
use crate::error::{Error, Result};
use crate::lorenz::FIGURE_PARAMS;
use crate::models::{ModelKind, Problem};
use crate::nets::batched::{predict, Jets, RowParams};
use crate::nets::{forward_into, Net, Parameterization, Workspace};

pub const WARMUP: usize = 100;
pub const REPS: usize = 1000;
pub const THROUGHPUT_BATCH: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub model: String,
    /// `main` or `hyper` for a hypernetwork, `full` for a baseline.
    pub component: &'static str,
    pub median_us: f64,
    pub p10_us: f64,
    pub p90_us: f64,
    /// Points per second through a batched forward pass (NaN for `hyper`).
    pub throughput_per_s: f64,
    pub reps: usize,
    pub hardware: String,
}

/// CPU model string plus the thread note.
pub fn hardware_note() -> String {
    let cpu = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        })
        .unwrap_or_else(|| std::env::consts::ARCH.to_string());
    format!("{cpu} (single thread)").replace(',', " ")
}

fn quantiles(mut samples: Vec<f64>) -> (f64, f64, f64) {
    samples.sort_by(|a, b| a.total_cmp(b));
    let q = |p: f64| samples[((samples.len() - 1) as f64 * p).round() as usize];
    (q(0.5), q(0.1), q(0.9))
}

/// Times `f` individually `reps` times after `warmup` untimed calls; microseconds.
pub fn time_calls(warmup: usize, reps: usize, mut f: impl FnMut()) -> (f64, f64, f64) {
    for _ in 0..warmup {
        f();
    }
    let samples = (0..reps)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_secs_f64() * 1e6
        })
        .collect();
    quantiles(samples)
}

/// A representative parameterization and query point for `problem`.
fn probe(problem: Problem) -> (Vec<f64>, Vec<f64>) {
    match problem {
        Problem::Burgers => (vec![encode_nu(0.003)], vec![0.5, 0.1]),
        Problem::Lorenz => (FIGURE_PARAMS.encode().to_vec(), vec![0.1, -0.2, 0.9]),
    }
}

fn throughput(spec: &crate::nets::ArchSpec, theta: &[f64], input: &[f64]) -> Result<f64> {
    let mut x = Jets::<1>::zeros(THROUGHPUT_BATCH, input.len());
    for r in 0..THROUGHPUT_BATCH {
        x.row_mut(r).copy_from_slice(input);
    }
    for _ in 0..3 {
        black_box(predict(spec, RowParams::Shared(theta), x.clone())?);
    }
    let rounds = 20;
    let start = Instant::now();
    for _ in 0..rounds {
        black_box(predict(spec, RowParams::Shared(theta), x.clone())?);
    }
    Ok((rounds * THROUGHPUT_BATCH) as f64 / start.elapsed().as_secs_f64())
}

/// Single-prediction latency of one model. A hypernetwork reports its main
/// network (generated once, outside the timed loop) and its generation step
/// separately.
pub fn bench_model(problem: Problem, kind: ModelKind, net: &Net, warmup: usize, reps: usize) -> Result<Vec<BenchRow>> {
    if warmup < WARMUP || reps < REPS {
        return Err(Error::config(format!("bench needs at least {WARMUP} warmup calls and {REPS} repetitions")));
    }
    let hardware = hardware_note();
    let (lambda, point) = probe(problem);
    let row = |component, (median_us, p10_us, p90_us), throughput_per_s| BenchRow {
        model: kind.tag().to_string(),
        component,
        median_us,
        p10_us,
        p90_us,
        throughput_per_s,
        reps,
        hardware: hardware.clone(),
    };
    match net {
        Net::Hyper(h) => {
            let lambda = Parameterization(lambda);
            let main = h.generate_main(&lambda)?;
            let mut ws = Workspace::new(main.spec());
            let mut out = vec![0.0; main.spec().output_dim];
            let main_t = time_calls(warmup, reps, || {
                forward_into(main.values(), black_box(&point), &mut ws, &mut out);
                black_box(&out);
            });
            let tp = throughput(main.spec(), main.values(), &point)?;
            let hyper_t = time_calls(warmup, reps, || {
                black_box(h.generate_main(black_box(&lambda)).unwrap());
            });
            Ok(vec![row("main", main_t, tp), row("hyper", hyper_t, f64::NAN)])
        }
        Net::Plain(p) => {
            let input: Vec<f64> = point.iter().chain(&lambda).copied().collect();
            let mut ws = Workspace::new(p.spec());
            let mut out = vec![0.0; p.spec().output_dim];
            let t = time_calls(warmup, reps, || {
                forward_into(p.values(), black_box(&input), &mut ws, &mut out);
                black_box(&out);
            });
            let tp = throughput(p.spec(), p.values(), &input)?;
            Ok(vec![row("full", t, tp)])
        }
    }
}

/// `model,component,median_us,p10_us,p90_us,throughput_per_s,reps,hardware`.
pub fn write_bench_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut s = String::from("model,component,median_us,p10_us,p90_us,throughput_per_s,reps,hardware\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{:.4},{:.4},{:.4},{:.1},{},{}",
            r.model, r.component, r.median_us, r.p10_us, r.p90_us, r.throughput_per_s, r.reps, r.hardware
        )
        .unwrap();
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
