//! Scaling benchmark: time both gradient methods over a sweep of circuit
//! sizes, then fit `log(runtime)` against `log(P)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{build_ansatz, AnsatzSpec, Family};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::grad::{reference_gradient, reverse_mode_gradient, GradientReport};
use crate::observable::Observable;
use crate::statevec::{StateVector, C64};

pub const DEFAULT_REPETITIONS: usize = 24;

/// Fits need at least this many distinct parameter counts.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Reverse,
    Reference,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Reverse, Method::Reference];

    pub fn gradient(self, circuit: &Circuit, params: &[f64], obs: &Observable, input: &StateVector) -> Result<GradientReport> {
        match self {
            Method::Reverse => reverse_mode_gradient(circuit, params, obs, input),
            Method::Reference => reference_gradient(circuit, params, obs, input),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Reverse => "reverse",
            Method::Reference => "reference",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reverse" => Ok(Method::Reverse),
            "reference" => Ok(Method::Reference),
            _ => Err(Error::Domain(format!("unknown method `{s}` (expected reverse or reference)"))),
        }
    }
}

/// One CSV row. Field order is the column order.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub family: Family,
    pub num_qubits: usize,
    pub num_params: usize,
    pub method: Method,
    pub repetitions: usize,
    pub mean_runtime_seconds: f64,
    pub stddev_runtime_seconds: f64,
    pub gate_applies: u64,
    pub derivative_applies: u64,
    pub clones: u64,
    pub inner_products: u64,
}

pub const CSV_HEADER: [&str; 11] = [
    "family",
    "num_qubits",
    "num_params",
    "method",
    "repetitions",
    "mean_runtime_seconds",
    "stddev_runtime_seconds",
    "gate_applies",
    "derivative_applies",
    "clones",
    "inner_products",
];

pub const FIT_HEADER: [&str; 4] = ["method", "slope", "intercept", "r_squared"];

/// Least-squares line through `(log P, log y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub method: Method,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ln y` on `ln x`, returning
/// `(slope, intercept, r²)`. Needs [`MIN_FIT_POINTS`] distinct `x` values
/// and positive data.
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::Domain(format!(
            "a scaling fit needs {MIN_FIT_POINTS} distinct sizes, got {}",
            xs.len()
        )));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive data".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok((slope, intercept, r_squared))
}

/// Mean and sample standard deviation (zero for a single sample).
pub fn mean_and_stddev(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub family: Family,
    pub num_qubits: usize,
    pub reps: Vec<usize>,
    pub methods: Vec<Method>,
    pub repetitions: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(family: Family, num_qubits: usize, reps: Vec<usize>) -> Self {
        Self {
            family,
            num_qubits,
            reps,
            methods: Method::ALL.to_vec(),
            repetitions: DEFAULT_REPETITIONS,
            seed: 0,
        }
    }
}

/// One timed cell plus the gradient it produced.
#[derive(Debug, Clone)]
pub struct BenchCell {
    pub record: BenchRecord,
    pub gradient: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub cells: Vec<BenchCell>,
    pub fits: Vec<ScalingFit>,
}

impl BenchOutcome {
    pub fn records(&self) -> impl Iterator<Item = &BenchRecord> {
        self.cells.iter().map(|c| &c.record)
    }

    pub fn fit(&self, method: Method) -> Option<&ScalingFit> {
        self.fits.iter().find(|f| f.method == method)
    }
}

/// Uniform angles in `[0, 2π)`. Each repetition count gets its own stream
/// of the seeded generator, so the draw does not depend on the sweep order.
pub fn draw_params(seed: u64, reps: usize, num_params: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(reps as u64);
    (0..num_params)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect()
}

/// Times every `(reps, method)` cell sequentially. Circuit construction is
/// outside the timed region; each timed region is one full gradient call.
pub fn run_bench(config: &BenchConfig) -> Result<BenchOutcome> {
    if config.repetitions == 0 {
        return Err(Error::Domain("repetitions must be at least 1".into()));
    }
    let obs = Observable::hadamard_all(config.num_qubits)?;
    let input = StateVector::basis(config.num_qubits, 0)?;
    let mut cells = Vec::new();

    for &reps in &config.reps {
        let circuit = build_ansatz(&AnsatzSpec::new(config.family, config.num_qubits, reps))?;
        let params = draw_params(config.seed, reps, circuit.num_params());
        for &method in &config.methods {
            let mut times = Vec::with_capacity(config.repetitions);
            let mut last = None;
            for _ in 0..config.repetitions {
                let start = Instant::now();
                let report = method.gradient(&circuit, &params, &obs, &input)?;
                times.push(start.elapsed().as_secs_f64());
                last = Some(report);
            }
            let report = last.expect("at least one repetition");
            let (mean, stddev) = mean_and_stddev(&times);
            cells.push(BenchCell {
                record: BenchRecord {
                    family: config.family,
                    num_qubits: config.num_qubits,
                    num_params: circuit.num_params(),
                    method,
                    repetitions: config.repetitions,
                    mean_runtime_seconds: mean,
                    stddev_runtime_seconds: stddev,
                    gate_applies: report.counters.gate_applies,
                    derivative_applies: report.counters.derivative_applies,
                    clones: report.counters.clones,
                    inner_products: report.counters.inner_products,
                },
                gradient: report.values,
            });
        }
    }

    let mut fits = Vec::new();
    for &method in &config.methods {
        let points: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.record.method == method)
            .map(|c| (c.record.num_params as f64, c.record.mean_runtime_seconds))
            .collect();
        if let Ok((slope, intercept, r_squared)) = fit_log_log(&points) {
            fits.push(ScalingFit {
                method,
                slope,
                intercept,
                r_squared,
            });
        }
    }
    Ok(BenchOutcome { cells, fits })
}

/// Writes the records (header included) followed by a second header and one
/// row per fit. Sections differ in width; LF line endings throughout.
pub fn write_csv<W: Write>(outcome: &BenchOutcome, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Domain(format!("writing CSV: {e}"));
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in outcome.records() {
        w.write_record([
            r.family.to_string(),
            r.num_qubits.to_string(),
            r.num_params.to_string(),
            r.method.to_string(),
            r.repetitions.to_string(),
            format!("{:e}", r.mean_runtime_seconds),
            format!("{:e}", r.stddev_runtime_seconds),
            r.gate_applies.to_string(),
            r.derivative_applies.to_string(),
            r.clones.to_string(),
            r.inner_products.to_string(),
        ])
        .map_err(io)?;
    }
    if !outcome.fits.is_empty() {
        w.write_record(FIT_HEADER).map_err(io)?;
        for f in &outcome.fits {
            w.write_record([
                f.method.to_string(),
                f.slope.to_string(),
                f.intercept.to_string(),
                f.r_squared.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::Domain(format!("writing CSV: {e}")))?;
    Ok(())
}
