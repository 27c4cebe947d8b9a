use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use revgrad::bench::{run_bench, write_csv, BenchConfig, Method, DEFAULT_REPETITIONS};
use revgrad::selftest::{run_selftest, SelftestOptions};
use revgrad::{
    non_hermitian_gradient, parse_circuit, Circuit, Error, Family, GradientReport, Observable, StateVector, C64,
};

/// Exit status for invalid input: parse failures and dimension mismatches.
const EXIT_INPUT: u8 = 2;
const EXIT_NON_INVERTIBLE: u8 = 3;
const EXIT_OUTPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "revgrad", version, about = "Reverse-mode gradients of quantum circuit expectation values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the energy and its gradient for a circuit and observable.
    Grad(GradArgs),
    /// Time both gradient methods over a sweep of ansatz sizes.
    Bench(BenchArgs),
    /// Run the built-in consistency checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct GradArgs {
    /// Circuit file.
    circuit: PathBuf,
    /// Observable file, or one of the built-ins `hadamard_all` and `z_all`.
    observable: String,
    /// Comma-separated parameter values, or a file holding them.
    #[arg(long, short, allow_hyphen_values = true)]
    params: String,
    #[arg(long, default_value = "reverse")]
    method: Method,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "C")]
    family: Family,
    #[arg(long, default_value_t = 4)]
    qubits: usize,
    /// Ansatz repetition counts, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    reps: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "reverse,reference")]
    methods: Vec<Method>,
    /// Timed gradient evaluations per cell.
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    repetitions: usize,
    /// CSV destination; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SelftestArgs {
    /// Multiply every derivative scalar by this factor (negative control).
    #[arg(long, hide = true, default_value_t = 1.0, allow_hyphen_values = true)]
    perturb_derivative: f64,
}

enum Failure {
    Lib(Error),
    Input(String),
    Output(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonInvertible { .. } | Error::Singular => EXIT_NON_INVERTIBLE,
        _ => EXIT_INPUT,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_params(arg: &str) -> Result<Vec<f64>, Failure> {
    let path = Path::new(arg);
    let text = if path.is_file() { read(path)? } else { arg.to_string() };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Failure::Input(format!("invalid parameter value `{s}`"))))
        .collect()
}

fn load_observable(spec: &str, num_qubits: usize) -> Result<Observable, Failure> {
    match Observable::builtin(spec, num_qubits) {
        Some(obs) => Ok(obs?),
        None => Ok(Observable::parse(&read(Path::new(spec))?)?),
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn print_report(out: &mut impl Write, report: &GradientReport) -> io::Result<()> {
    let line = |z: C64| format!("{} {}", fmt(z.re), fmt(z.im));
    writeln!(out, "energy {}", line(report.energy))?;
    for (k, v) in report.values.iter().enumerate() {
        writeln!(out, "p{k} {}", line(*v))?;
    }
    let c = &report.counters;
    writeln!(
        out,
        "counters gate_applies={} derivative_applies={} clones={} inner_products={} observable_applies={}",
        c.gate_applies, c.derivative_applies, c.clones, c.inner_products, c.observable_applies
    )
}

fn gradient(circuit: &Circuit, params: &[f64], obs: &Observable, method: Method) -> Result<GradientReport, Error> {
    let input = StateVector::basis(circuit.num_qubits(), 0)?;
    if method == Method::Reverse && obs.num_qubits() == circuit.num_qubits() && !obs.is_hermitian() {
        return non_hermitian_gradient(circuit, params, obs, &input);
    }
    method.gradient(circuit, params, obs, &input)
}

fn cmd_grad(args: &GradArgs) -> Result<(), Failure> {
    let circuit = parse_circuit(&read(&args.circuit)?)?;
    let obs = load_observable(&args.observable, circuit.num_qubits())?;
    let params = parse_params(&args.params)?;
    let report = gradient(&circuit, &params, &obs, args.method)?;
    print_report(&mut io::stdout().lock(), &report).map_err(|e| Failure::Output(e.to_string()))
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let config = BenchConfig {
        family: args.family,
        num_qubits: args.qubits,
        reps: args.reps.clone(),
        methods: args.methods.clone(),
        repetitions: args.repetitions,
        seed: args.seed,
    };
    let sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(
            File::create(path).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let outcome = run_bench(&config)?;
    let mut sink = BufWriter::new(sink);
    write_csv(&outcome, &mut sink).map_err(|e| Failure::Output(e.to_string()))?;
    sink.flush().map_err(|e| Failure::Output(e.to_string()))?;
    for fit in &outcome.fits {
        eprintln!(
            "{}: slope {:.3}, intercept {:.3}, r^2 {:.4}",
            fit.method, fit.slope, fit.intercept, fit.r_squared
        );
    }
    Ok(())
}

fn cmd_selftest(args: &SelftestArgs) -> Result<bool, Failure> {
    let opts = SelftestOptions {
        derivative_scalar: C64::new(args.perturb_derivative, 0.0),
        ..SelftestOptions::default()
    };
    let outcomes = run_selftest(&opts)?;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    if failed.is_empty() {
        println!("selftest passed");
    } else {
        println!("selftest failed: {}", failed.join(", "));
    }
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Grad(args) => cmd_grad(args).map(|()| true),
        Command::Bench(args) => cmd_bench(args).map(|()| true),
        Command::Selftest(args) => cmd_selftest(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Output(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_OUTPUT)
        }
    }
}
