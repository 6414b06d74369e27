//! Command-line harness: qubit example, single-instance sweep, verification
//! campaign and numerical oracle.
//!
//! Exit codes: 0 when everything holds, 1 when a violation or tolerance
//! breach was found, 2 for usage and I/O errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::campaign::{instance, run_instance, run_oracle, run_verify, OracleConfig, VerifyConfig};
use crate::dynamics::{uniform_grid, BoundConfig, BoundReport};
use crate::error::Error;
use crate::qubit_analytic::{worked_example, WorkedExample};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Header of every per-grid-point CSV report.
pub const CSV_HEADER: &str = "phi,lhs,rhs,margin,wysi,cos_hellinger,violated";

#[derive(Parser, Debug)]
#[command(name = "wysi", version, about = "Skew-information speed bound: examples, campaigns and cross-checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form single-qubit example, cross-checked against the numeric pipeline.
    QubitExample(QubitArgs),
    /// Per-grid-point report for one random instance.
    Sweep(RandomArgs),
    /// Randomized bound verification; always prints a JSON summary.
    Verify(RandomArgs),
    /// Spectral vs integral square roots and derivative cross-checks.
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_min: f64,
    #[arg(long, default_value_t = 2.0 * std::f64::consts::PI, allow_negative_numbers = true)]
    pub phi_max: f64,
    #[arg(long, default_value_t = 201)]
    pub phi_steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct QubitArgs {
    #[arg(long, default_value_t = 0.6)]
    pub r0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub azimuth: f64,
    #[arg(long, default_value_t = 1.0)]
    pub varpi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Rotation axis `x,y,z`; normalized before use.
    #[arg(long, default_value = "0,0,1", value_parser = parse_axis, allow_negative_numbers = true)]
    pub axis: [f64; 3],
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct RandomArgs {
    /// One or more dimensions, comma separated; trials cycle through them.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,8")]
    pub dim: Vec<usize>,
    /// State rank; random in 1..=dim per trial when omitted.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    /// State rank; full rank when omitted.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub n_quad: usize,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_axis(s: &str) -> Result<[f64; 3], String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad axis component {p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|p| format!("axis needs 3 components, got {}", p.len()))
}

impl GridArgs {
    fn bound_config(&self) -> Result<BoundConfig, Error> {
        if self.phi_steps < 2 {
            return Err(Error::InvalidArgument("phi-steps must be at least 2".into()));
        }
        let cfg = BoundConfig::default()
            .with_hbar(self.hbar)
            .with_grid(uniform_grid(self.phi_min, self.phi_max, self.phi_steps));
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Rendered output of a subcommand and its exit code.
struct Outcome {
    body: String,
    code: i32,
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CrossCheck(_) | Error::NoConvergence(_) | Error::Quadrature(_) => {
                Failure::Math(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Renders a report as CSV with 17 significant digits.
pub fn report_csv(report: &BoundReport) -> String {
    let mut s = String::with_capacity(64 * (report.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for p in &report.points {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            p.phi, p.lhs, p.rhs, p.margin, p.wysi, p.cos_hellinger, p.violated
        );
    }
    s
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure::Usage(format!("serialization failed: {e}")))
}

fn render_report<T: Serialize>(report: &BoundReport, json: &T, format: Format) -> Result<String, Failure> {
    match format {
        Format::Csv => Ok(report_csv(report)),
        Format::Json => to_json(json),
    }
}

fn qubit_example(a: &QubitArgs) -> Result<Outcome, Failure> {
    let params = WorkedExample {
        r0_mag: a.r0,
        azimuth: a.azimuth,
        varpi: a.varpi,
        alpha: a.alpha,
        hbar: a.grid.hbar,
        axis: a.axis,
    };
    let cfg = a.grid.bound_config()?;
    let report = worked_example(&params, &cfg.phi_grid)?;
    let code = if report.violations() == 0 { EXIT_OK } else { EXIT_VIOLATION };
    let body = render_report(&report, &report, a.output.format)?;
    Ok(Outcome { body, code })
}

fn verify_config(a: &RandomArgs) -> Result<VerifyConfig, Failure> {
    let cfg = VerifyConfig {
        dims: a.dim.clone(),
        rank: a.rank,
        trials: a.trials,
        seed: a.seed,
        generator_scale: 1.0,
        bound: a.grid.bound_config()?,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct SweepJson<'a> {
    instance: crate::campaign::InstanceId,
    report: &'a BoundReport,
}

fn sweep(a: &RandomArgs) -> Result<Outcome, Failure> {
    let cfg = verify_config(a)?;
    let inst = instance(&cfg, 0)?;
    let report = run_instance(&cfg, &inst)?;
    let code = if report.violations() == 0 { EXIT_OK } else { EXIT_VIOLATION };
    let json = SweepJson {
        instance: inst.id,
        report: &report,
    };
    let body = render_report(&report, &json, a.output.format)?;
    Ok(Outcome { body, code })
}

fn verify(a: &RandomArgs) -> Result<Outcome, Failure> {
    let summary = run_verify(&verify_config(a)?)?;
    let code = if summary.violations == 0 { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome {
        body: to_json(&summary)?,
        code,
    })
}

fn oracle(a: &OracleArgs) -> Result<Outcome, Failure> {
    let cfg = OracleConfig {
        dim: a.dim,
        rank: a.rank,
        trials: a.trials,
        seed: a.seed,
        n_quad: a.n_quad,
        bound: BoundConfig::default().with_hbar(a.hbar),
        ..Default::default()
    };
    let summary = run_oracle(&cfg)?;
    let code = if summary.passed() { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome {
        body: to_json(&summary)?,
        code,
    })
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::QubitExample(a) => &a.output,
        Command::Sweep(a) | Command::Verify(a) => &a.output,
        Command::Oracle(a) => &a.output,
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::QubitExample(a) => qubit_example(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Oracle(a) => oracle(a),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let out = output_args(&cli.command).clone();

    let result = match out.threads {
        Some(0) => Err(Failure::Usage("threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Failure::Usage(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(&cli.command),
    };

    match result {
        Ok(Outcome { body, code }) => {
            let written = match &out.out {
                Some(path) => fs::write(path, &body)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout
                    .write_all(body.as_bytes())
                    .map_err(|e| format!("cannot write output: {e}")),
            };
            match written {
                Ok(()) => {
                    if code != EXIT_OK {
                        let _ = writeln!(stderr, "wysi: bound violation or tolerance breach found");
                    }
                    code
                }
                Err(msg) => {
                    let _ = writeln!(stderr, "wysi: {msg}");
                    EXIT_USAGE
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "wysi: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Math(msg)) => {
            let _ = writeln!(stderr, "wysi: {msg}");
            EXIT_VIOLATION
        }
    }
}
