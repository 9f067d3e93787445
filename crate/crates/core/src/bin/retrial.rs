//! `retrial`: regime classification, rate certificates and bound
//! verification for the constant-retrial-rate queue.
//!
//! Exit codes: 0 success, 2 usage error, 3 regime refusal, 4 numerical
//! failure, 5 bound violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use retrial_ergodicity::ergodicity::{
    classify, erg_intervals, erg_x_star, null_a_interval, null_b_interval, null_b_star, optimize_rate,
    stability_sides, Regime,
};
use retrial_ergodicity::kolmogorov::{
    snapshots_to_csv, stationary, transient, DistributionSnapshot, TransientOptions, DEFAULT_TRUNCATION,
};
use retrial_ergodicity::model::{build_generator, GeneratorKind, QueueState, SystemParams};
use retrial_ergodicity::simulate::{distributions_to_csv, simulate_paths, EmpiricalDistribution, SimConfig};
use retrial_ergodicity::verify::{verify_erg, verify_null};
use retrial_ergodicity::Error;

#[derive(Parser, Debug)]
#[command(name = "retrial", version, about = "Ergodicity analysis of the single-server retrial queue with constant retrial rate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Command {
    /// Classify the regime from the stability inequality mu*mu0 vs lambda*(lambda+mu0).
    Classify(ClassifyArgs),
    /// Optimized convergence-rate certificate as JSON.
    Rate(RateArgs),
    /// Compare the certified bound with the ODE solution over a time grid (CSV).
    Verify(VerifyArgs),
    /// Transient distribution of the truncated forward equations.
    Transient(TransientArgs),
    /// Stationary distribution of the truncated chain.
    Stationary(StationaryArgs),
    /// Monte Carlo estimate of the transient distribution.
    Simulate(SimulateArgs),
    /// Dump a truncated Q, A or B as a coordinate list.
    Generator(GeneratorArgs),
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
struct Rates {
    /// Arrival rate.
    #[arg(long = "lambda", allow_negative_numbers = true)]
    lambda: f64,
    /// Service rate.
    #[arg(long = "mu", allow_negative_numbers = true)]
    mu: f64,
    /// Retrial rate.
    #[arg(long = "mu0", allow_negative_numbers = true)]
    mu0: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file (and a `<out>.manifest.json` sidecar) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
struct TimeGrid {
    /// Last observation time.
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    /// Spacing of the observation grid starting at 0.
    #[arg(long, default_value_t = 1.0)]
    t_step: f64,
}

impl TimeGrid {
    fn times(&self) -> Result<Vec<f64>, Error> {
        if !(self.t_step > 0.0 && self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::Domain("need t-step > 0 and t-max >= 0".into()));
        }
        let n = (self.t_max / self.t_step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| k as f64 * self.t_step).collect())
    }
}

#[derive(Args, Debug, Serialize)]
struct ClassifyArgs {
    #[command(flatten)]
    rates: Rates,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct RateArgs {
    #[command(flatten)]
    rates: Rates,
    /// Write the certificate to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    rates: Rates,
    /// Initial state index (point mass).
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Cutoffs N for the null-regime bound; repeatable or comma-separated.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [5u64, 10, 15])]
    cutoffs: Vec<u64>,
    #[command(flatten)]
    grid: TimeGrid,
    /// Truncation size M (states).
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    /// Local error tolerance of the integrator.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Recorded in the manifest; the verification itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the table to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct TransientArgs {
    #[command(flatten)]
    rates: Rates,
    /// Initial state index (point mass).
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[command(flatten)]
    grid: TimeGrid,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Serialize)]
struct StationaryArgs {
    #[command(flatten)]
    rates: Rates,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    rates: Rates,
    #[command(flatten)]
    grid: TimeGrid,
    /// Number of independent paths.
    #[arg(long, default_value_t = 100_000)]
    paths: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial server occupancy (0 or 1).
    #[arg(long, default_value_t = 0)]
    server: u8,
    /// Initial orbit size.
    #[arg(long, default_value_t = 0)]
    orbit: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Serialize)]
struct GeneratorArgs {
    #[command(flatten)]
    rates: Rates,
    #[arg(long, default_value_t = 20)]
    truncation: usize,
    /// Matrix kind: Q, A or B.
    #[arg(long, default_value = "Q")]
    kind: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Error(Error),
    Violation(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Error(Error::Domain(_)) => 2,
        Failure::Error(Error::Regime { .. } | Error::NoCertificate) => 3,
        Failure::Error(_) | Failure::Io(_) => 4,
        Failure::Violation(_) => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Error(e) => eprintln!("error: {e}"),
                Failure::Violation(msg) => eprintln!("bound violated: {msg}"),
                Failure::Io(msg) => eprintln!("io error: {msg}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}

fn params(r: &Rates) -> Result<SystemParams, Error> {
    SystemParams::new(r.lambda, r.mu, r.mu0)
}

fn run(cmd: &Command) -> Result<(), Failure> {
    match cmd {
        Command::Classify(args) => cmd_classify(args),
        Command::Rate(args) => {
            let p = params(&args.rates)?;
            let body = serde_json::to_string_pretty(&rate_report(&p)?).expect("serializable");
            emit(cmd, args.out.as_deref(), &body, None, None)
        }
        Command::Verify(args) => cmd_verify(cmd, args),
        Command::Transient(args) => {
            let p = params(&args.rates)?;
            let opts = TransientOptions { truncation: args.truncation, tol: args.tol, max_step: None };
            let p0 = DistributionSnapshot::point_mass(args.truncation, args.k)?;
            let snaps = transient(&p, &p0, &args.grid.times()?, &opts)?;
            let body = match args.output.format {
                Format::Csv => snapshots_to_csv(&snaps),
                Format::Json => serde_json::to_string(&snaps).expect("serializable"),
            };
            emit(cmd, args.output.out.as_deref(), &body, None, Some(args.truncation))
        }
        Command::Stationary(args) => {
            let p = params(&args.rates)?;
            let pi = stationary(&p, args.truncation, args.tol)?;
            let body = match args.output.format {
                Format::Csv => snapshots_to_csv(std::slice::from_ref(&pi)),
                Format::Json => serde_json::to_string(&json!({
                    "t": "inf",
                    "leak": pi.leak,
                    "probs": pi.probs,
                }))
                .expect("serializable"),
            };
            emit(cmd, args.output.out.as_deref(), &body, None, Some(pi.probs.len()))
        }
        Command::Simulate(args) => {
            let p = params(&args.rates)?;
            let times = args.grid.times()?;
            let cfg = SimConfig {
                horizon: args.grid.t_max.max(f64::MIN_POSITIVE),
                paths: args.paths,
                seed: args.seed,
                initial: QueueState::new(args.server, args.orbit)?,
            };
            let dists = simulate_paths(&p, &cfg, &times)?;
            let body = match args.output.format {
                Format::Csv => distributions_to_csv(&dists),
                Format::Json => serde_json::to_string(&sim_rows(&dists)).expect("serializable"),
            };
            emit(cmd, args.output.out.as_deref(), &body, Some(args.seed), None)
        }
        Command::Generator(args) => {
            let p = params(&args.rates)?;
            let kind: GeneratorKind = args.kind.parse()?;
            let g = build_generator(&p, args.truncation, kind)?;
            emit(cmd, args.out.as_deref(), &g.to_coo_string(), None, Some(args.truncation))
        }
    }
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), Failure> {
    let p = params(&args.rates)?;
    let regime = classify(&p);
    let (service, load) = stability_sides(&p);
    if args.json {
        let mut v = json!({
            "regime": regime,
            "mu_mu0": service,
            "lambda_lambda_plus_mu0": load,
        });
        match regime {
            Regime::NullErgodic => v["b_star"] = json!(null_b_star(&p)),
            Regime::ExponentiallyErgodic => v["x_star"] = json!(erg_x_star(&p)),
            Regime::Critical => {}
        }
        println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
        return Ok(());
    }
    println!("regime: {regime}");
    let relation = match regime {
        Regime::NullErgodic => "<",
        Regime::ExponentiallyErgodic => ">",
        Regime::Critical => "==",
    };
    println!("mu*mu0 = {service} {relation} lambda*(lambda+mu0) = {load}");
    match regime {
        Regime::NullErgodic => println!("b* = {}", null_b_star(&p)),
        Regime::ExponentiallyErgodic => println!("x* = {}", erg_x_star(&p)),
        Regime::Critical => println!("equality holds: neither rate certificate applies"),
    }
    Ok(())
}

fn rate_report(p: &SystemParams) -> Result<serde_json::Value, Error> {
    let cert = optimize_rate(p)?;
    let mut v = serde_json::to_value(cert).expect("serializable");
    match cert.regime {
        Regime::NullErgodic => {
            let b = null_b_interval(p)?;
            let a = null_a_interval(p, cert.b)?;
            v["b_interval"] = json!([b.lo, b.hi]);
            v["a_interval"] = json!([a.lo, a.hi.min(1.0)]);
        }
        Regime::ExponentiallyErgodic => {
            let iv = erg_intervals(p)?;
            let x = cert.a * cert.b;
            let b = iv.b_given(x)?;
            v["x"] = json!(x);
            v["x_interval"] = json!([iv.x.lo, iv.x.hi]);
            v["b_interval"] = json!([b.lo, b.hi]);
        }
        Regime::Critical => unreachable!("optimize_rate refuses the critical regime"),
    }
    Ok(v)
}

fn cmd_verify(cmd: &Command, args: &VerifyArgs) -> Result<(), Failure> {
    let p = params(&args.rates)?;
    let cert = optimize_rate(&p)?;
    let times = args.grid.times()?;
    let opts = TransientOptions { truncation: args.truncation, tol: args.tol, max_step: None };
    let verification = match cert.regime {
        Regime::NullErgodic => verify_null(&p, &cert, args.k, &args.cutoffs, &times, &opts)?,
        _ => verify_erg(&p, &cert, args.k, &times, &opts)?.verification,
    };
    emit(cmd, args.out.as_deref(), &verification.to_csv(), Some(args.seed), Some(verification.truncation))?;
    if verification.all_hold() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("minimum slack {:e}", verification.min_slack())))
    }
}

#[derive(Serialize)]
struct SimRow {
    t: f64,
    server: u8,
    orbit: u64,
    count: u64,
    probability: f64,
    stderr: f64,
}

fn sim_rows(dists: &[EmpiricalDistribution]) -> Vec<SimRow> {
    dists
        .iter()
        .flat_map(|d| {
            d.counts.iter().map(move |(&s, &count)| SimRow {
                t: d.t,
                server: s.server,
                orbit: s.orbit,
                count,
                probability: d.probability(s),
                stderr: d.stderr(s),
            })
        })
        .collect()
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a Command,
    seed: Option<u64>,
    truncation: Option<usize>,
    tool_version: &'static str,
    timestamp: u64,
}

fn emit(cmd: &Command, out: Option<&Path>, body: &str, seed: Option<u64>, truncation: Option<usize>) -> Result<(), Failure> {
    let Some(path) = out else {
        print!("{body}");
        if !body.ends_with('\n') {
            println!();
        }
        return Ok(());
    };
    fs::write(path, body)?;
    let manifest = Manifest {
        command: cmd,
        seed,
        truncation,
        tool_version: env!("CARGO_PKG_VERSION"),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    };
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".manifest.json");
    fs::write(sidecar, serde_json::to_string_pretty(&manifest).expect("serializable"))?;
    Ok(())
}
