//! `newton-decay analyze | verify`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use newton_decay_core::rational::Rational;
use newton_decay_core::TermSum;
use num_traits::Signed;

use crate::input::{parse_expression, parse_rho, read_input_file, InputError};
use crate::parallel::Pool;
use crate::report::AnalysisReport;
use crate::verify::{self, exit, Suite, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "newton-decay", version, about = "Newton-polygon decay exponents and their numerical checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact analysis: polygon, distance, well-behavedness, decay exponents.
    Analyze(Common),
    /// Numerical checks of the exact predictions.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        suite: Vec<Suite>,
        /// Quadrature tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Largest sampled frequency (at most 1024).
        #[arg(long, default_value_t = 512.0)]
        lambda_max: f64,
        /// Cutoff radius.
        #[arg(long, default_value_t = 0.25)]
        radius: f64,
        /// Seed of the randomized point samples.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record wall-clock runtimes (makes the report run-dependent).
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Expression such as "x1^3 + x2^2" or "|x1|^2 + |x2|^2".
    #[arg(short = 'f', long = "function", conflicts_with = "input")]
    pub function: Option<String>,
    /// JSON file of records {num, den, a, b, abs1, abs2}.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Exponent rho, as p/q or a decimal; repeatable.
    #[arg(long = "rho", allow_hyphen_values = true)]
    pub rho: Vec<String>,
    /// Directory for report.json and CSV files; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn load(common: &Common) -> Result<(TermSum, Vec<Rational>), InputError> {
    let f = match (&common.function, &common.input) {
        (Some(text), None) => parse_expression(text)?,
        (None, Some(path)) => read_input_file(path)?,
        _ => return Err(InputError::NoFunction),
    };
    let rhos = common.rho.iter().map(|r| parse_rho(r)).collect::<Result<Vec<_>, _>>()?;
    Ok((f, rhos))
}

/// Writes `body` to `out/name` or stdout.
fn emit(out: Option<&Path>, name: &str, body: &str) -> std::io::Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), body)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn analyze(common: &Common) -> i32 {
    let (f, rhos) = match load(common) {
        Ok(x) => x,
        Err(e) => return fail(exit::PARSE, e),
    };
    if let Some(r) = rhos.iter().find(|r| !r.is_positive()) {
        return fail(exit::PARSE, format!("rho must be positive, got {r}"));
    }
    let report = match AnalysisReport::new(&f, &rhos) {
        Ok(r) => r,
        Err(e) => return fail(exit::INAPPLICABLE, e),
    };
    let written = match common.format {
        Format::Json => emit(common.out.as_deref(), "report.json", &json(&report)),
        Format::Csv => match report.csv() {
            Ok(body) => emit(common.out.as_deref(), "report.csv", &body),
            Err(e) => return fail(1, e),
        },
    };
    if let Err(e) = written {
        return fail(1, e);
    }
    if report.inapplicable_only() {
        exit::INAPPLICABLE
    } else {
        exit::OK
    }
}

fn verify_cmd(common: &Common, suites: &[Suite], opts: VerifyOptions) -> i32 {
    let (f, rhos) = match load(common) {
        Ok(x) => x,
        Err(e) => return fail(exit::PARSE, e),
    };
    if let Some(r) = rhos.iter().find(|r| !r.is_positive()) {
        return fail(exit::PARSE, format!("rho must be positive, got {r}"));
    }
    if rhos.is_empty() && suites.iter().flat_map(|s| s.expand()).any(Suite::needs_rho) {
        return fail(exit::PARSE, "this suite needs at least one --rho");
    }
    if !(opts.tol > 0.0 && opts.radius > 0.0 && opts.lambda_max > 0.0) {
        return fail(exit::PARSE, "--tol, --radius and --lambda-max must be positive");
    }
    let pool = Pool::from_env();
    let report = verify::run(&f, &rhos, suites, opts, &pool);
    let out = common.out.as_deref();
    let written = match common.format {
        Format::Json => emit(out, "report.json", &json(&report)),
        Format::Csv => match report.csv() {
            Ok(body) => emit(out, "report.csv", &body),
            Err(e) => return fail(1, e),
        },
    };
    let artifacts = match out {
        Some(dir) => report.artifacts.iter().try_for_each(|a| emit(Some(dir), &a.file, &a.content)),
        None => Ok(()),
    };
    if let Err(e) = written.and(artifacts) {
        return fail(1, e);
    }
    report.exit_code()
}

/// Runs the CLI and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::PARSE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match &cli.command {
        Command::Analyze(common) => analyze(common),
        Command::Verify { common, suite, tol, lambda_max, radius, seed, timings } => verify_cmd(
            common,
            suite,
            VerifyOptions { tol: *tol, lambda_max: *lambda_max, radius: *radius, seed: *seed, timings: *timings },
        ),
    }
}
