//! Command-line front end. `run` returns the process exit code:
//! 0 pass, 1 suite failure, 2 input error, 3 hypothesis violation,
//! 4 analytic/oracle inconsistency.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_operator, ClassificationReport, Tolerances};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::operators::{build_operator, CheckOutcome, Conjugation, TOL_ENTRYWISE, TOL_PRODUCT};
use crate::report::{write_matrix_csv, write_values_csv, MatrixHeader};
use crate::series::DEFAULT_TRUNC;
use crate::spectral::{
    diagonal_spectrum, operator_norm_estimate, DiagonalSpectrum, NormAudit, NormEstimate,
};
use crate::suite::{run_suite, Status, SuiteConfig, SuiteReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_SUITE_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "hardy-lab",
    version,
    about = "Weighted composition-differentiation operators on H2"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Matrix truncation N.
    #[arg(long, global = true, default_value_t = DEFAULT_TRUNC)]
    pub trunc: usize,
    #[arg(long, global = true, default_value_t = TOL_ENTRYWISE)]
    pub tol_entrywise: f64,
    #[arg(long, global = true, default_value_t = TOL_PRODUCT)]
    pub tol_product: f64,
    /// Seed for randomized instances and power-iteration restarts.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Add wall-clock timings to the report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Weight u: inline JSON or a path to a JSON file.
    #[arg(long)]
    pub u: Option<String>,
    /// Symbol phi: inline JSON or a path to a JSON file.
    #[arg(long)]
    pub phi: Option<String>,
    /// JSON file holding `{"u": ..., "phi": ...}`; stdin when neither this nor --u/--phi is given.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export the truncated matrix of D^m_{u,phi}.
    Matrix {
        #[command(flatten)]
        spec: SpecArgs,
        /// Derivative order m.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Run the symmetric, self-adjoint, normal and unitary checks.
    Check {
        #[command(flatten)]
        spec: SpecArgs,
        /// Conjugation scalar lambda as "re,im".
        #[arg(long, default_value = "1,0", value_parser = parse_complex)]
        lambda: Complex64,
        /// Conjugation scalar alpha as "re,im".
        #[arg(long, default_value = "1,0", value_parser = parse_complex)]
        alpha: Complex64,
    },
    /// Full classification report with analytic verdicts and extracted parameters.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "1,0", value_parser = parse_complex)]
        lambda: Complex64,
        #[arg(long, default_value = "1,0", value_parser = parse_complex)]
        alpha: Complex64,
    },
    /// Spectrum and norm audit of u = a z, phi = c z.
    Spectrum {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long)]
        c: f64,
    },
    /// Run the regression suite.
    Verify {
        /// Criterion ids or groups to leave out (repeatable or comma-separated).
        #[arg(long, value_delimiter = ',')]
        skip: Vec<String>,
    },
}

pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |t: &str| {
        t.parse::<f64>()
            .map_err(|e| format!("bad number {t:?}: {e}"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub u: FunctionSpec,
    pub phi: FunctionSpec,
}

#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Inputs>,
    pub trunc: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_sup_norm: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, CheckOutcome>,
    pub result: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Serialize)]
pub struct CheckSummary {
    pub consistent: bool,
    pub inconsistent_checks: Vec<String>,
    /// Analytic verdict per check; absent where no closed-form claim applies.
    pub analytic: BTreeMap<String, bool>,
}

#[derive(Debug, Serialize)]
pub struct SpectrumResult {
    pub spectrum: DiagonalSpectrum,
    pub audit: NormAudit,
    pub power_iteration: NormEstimate,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_hypothesis_violation() {
            EXIT_HYPOTHESIS
        } else {
            EXIT_INPUT
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// Parse `args` (program name first) and execute.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
        }
    };
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(&cli, echo, &mut io::stdin().lock()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(
    cli: &Cli,
    echo: Vec<String>,
    stdin: &mut dyn Read,
) -> std::result::Result<i32, Failure> {
    let g = &cli.global;
    if g.trunc == 0 {
        return Err(input_error("--trunc must be positive"));
    }
    let started = Instant::now();
    let report = |result: serde_json::Value,
                  inputs: Option<Inputs>,
                  phi_sup_norm: Option<f64>,
                  checks: BTreeMap<String, CheckOutcome>| RunReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: echo.clone(),
        inputs,
        trunc: g.trunc,
        phi_sup_norm,
        checks,
        result,
        timings: g.timings.then(|| {
            BTreeMap::from([(
                "total_ms".to_string(),
                started.elapsed().as_secs_f64() * 1e3,
            )])
        }),
    };

    match &cli.command {
        Command::Matrix { spec, m } => {
            let inputs = read_inputs(spec, stdin)?;
            let (u, phi) = (inputs.u.series(g.trunc)?, inputs.phi.series(g.trunc)?);
            let op = build_operator(&u, &phi, *m, g.trunc)?;
            let header = MatrixHeader {
                trunc: g.trunc,
                u_spec: inputs.u.clone(),
                phi_spec: inputs.phi.clone(),
                m: *m,
            };
            match g.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_matrix_csv(&mut buf, &header, &op)?;
                    emit(g.out.as_deref(), &buf)?;
                }
                Format::Json => {
                    let e = op.entries();
                    let rows: Vec<Vec<[f64; 2]>> = (0..g.trunc)
                        .map(|r| (0..g.trunc).map(|c| [e[(r, c)].re, e[(r, c)].im]).collect())
                        .collect();
                    let sup = op.meta().map(|p| p.phi_sup_norm);
                    let body = serde_json::json!({ "m": m, "entries": rows });
                    emit_json(
                        g.out.as_deref(),
                        &report(body, Some(inputs), sup, BTreeMap::new()),
                    )?;
                }
            }
            Ok(EXIT_PASS)
        }
        Command::Check {
            spec,
            lambda,
            alpha,
        }
        | Command::Classify {
            spec,
            lambda,
            alpha,
        } => {
            let inputs = read_inputs(spec, stdin)?;
            let conj = Conjugation::new(*lambda, *alpha)?;
            let cls = classify(&inputs, &conj, g)?;
            let checks: BTreeMap<String, CheckOutcome> = [
                ("complex_symmetric", cls.symmetric),
                ("self_adjoint", cls.self_adjoint),
                ("normal", cls.normal),
                ("unitary", cls.unitary),
            ]
            .into_iter()
            .filter_map(|(name, v)| v.map(|v| (name.to_string(), v.oracle)))
            .collect();
            let code = if cls.is_consistent() {
                EXIT_PASS
            } else {
                EXIT_INCONSISTENT
            };
            if code != EXIT_PASS {
                eprintln!(
                    "analytic and oracle verdicts disagree on: {}",
                    cls.inconsistent_checks.join(", ")
                );
            }
            let sup = Some(cls.phi_sup_norm);
            let body = if matches!(cli.command, Command::Check { .. }) {
                let analytic = [
                    ("complex_symmetric", cls.symmetric),
                    ("self_adjoint", cls.self_adjoint),
                    ("normal", cls.normal),
                    ("unitary", cls.unitary),
                ]
                .into_iter()
                .filter_map(|(name, v)| v.and_then(|v| v.analytic).map(|a| (name.to_string(), a)))
                .collect();
                serde_json::to_value(CheckSummary {
                    consistent: cls.is_consistent(),
                    inconsistent_checks: cls.inconsistent_checks.clone(),
                    analytic,
                })
            } else {
                serde_json::to_value(&cls)
            }
            .map_err(Error::from)?;
            emit_json(g.out.as_deref(), &report(body, Some(inputs), sup, checks))?;
            Ok(code)
        }
        Command::Spectrum { a, c } => {
            let spectrum = diagonal_spectrum(*a, *c, g.trunc)?;
            match g.format {
                Format::Csv => {
                    let values: Vec<Complex64> = spectrum
                        .entries
                        .iter()
                        .map(|&x| Complex64::new(x, 0.0))
                        .collect();
                    let mut buf = Vec::new();
                    write_values_csv(&mut buf, &values)?;
                    emit(g.out.as_deref(), &buf)?;
                }
                Format::Json => {
                    let u =
                        crate::series::PowerSeries::monomial(1, Complex64::new(*a, 0.0), g.trunc);
                    let phi =
                        crate::series::PowerSeries::monomial(1, Complex64::new(*c, 0.0), g.trunc);
                    let op = build_operator(&u, &phi, 1, g.trunc)?;
                    let result = SpectrumResult {
                        audit: spectrum.audit(),
                        power_iteration: operator_norm_estimate(&op, 200_000, 1e-15, g.seed),
                        spectrum,
                    };
                    let body = serde_json::to_value(result).map_err(Error::from)?;
                    emit_json(
                        g.out.as_deref(),
                        &report(body, None, Some(*c), BTreeMap::new()),
                    )?;
                }
            }
            Ok(EXIT_PASS)
        }
        Command::Verify { skip } => {
            let cfg = SuiteConfig {
                trunc: g.trunc,
                seed: g.seed,
                tol_entrywise: g.tol_entrywise,
                tol_product: g.tol_product,
                skip: skip.clone(),
            };
            let suite = run_suite(&cfg);
            print_summary(&suite);
            let body = serde_json::to_value(&suite).map_err(Error::from)?;
            emit_json(g.out.as_deref(), &report(body, None, None, BTreeMap::new()))?;
            Ok(if suite.all_passed {
                EXIT_PASS
            } else {
                EXIT_SUITE_FAILURE
            })
        }
    }
}

fn classify(inputs: &Inputs, conj: &Conjugation, g: &GlobalOpts) -> Result<ClassificationReport> {
    let u = inputs.u.series(g.trunc)?;
    let phi = inputs.phi.series(g.trunc)?;
    let mobius = inputs.phi.as_mobius();
    let tols = Tolerances {
        entrywise: g.tol_entrywise,
        product: g.tol_product,
    };
    classify_operator(&u, &phi, mobius.as_ref(), conj, g.trunc, tols)
}

fn print_summary(suite: &SuiteReport) {
    for r in &suite.results {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::TailLimited => "TAIL-LIMITED",
            Status::Error => "ERROR",
        };
        if r.detail.is_empty() {
            eprintln!("{tag:>12} {:<6} {}", r.id, r.title);
        } else {
            eprintln!("{tag:>12} {:<6} {} ({})", r.id, r.title, r.detail);
        }
    }
    if !suite.failing.is_empty() {
        eprintln!("failing: {}", suite.failing.join(", "));
    }
}

fn load_json(arg: &str) -> std::result::Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| input_error(format!("cannot read {arg}: {e}")))
    }
}

fn parse_spec(text: &str, what: &str) -> std::result::Result<FunctionSpec, Failure> {
    let spec: FunctionSpec =
        serde_json::from_str(text).map_err(|e| input_error(format!("invalid {what} spec: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

fn read_inputs(args: &SpecArgs, stdin: &mut dyn Read) -> std::result::Result<Inputs, Failure> {
    let (u, phi) = match (&args.u, &args.phi) {
        (Some(u), Some(phi)) => (
            parse_spec(&load_json(u)?, "u")?,
            parse_spec(&load_json(phi)?, "phi")?,
        ),
        (None, None) => {
            let text = match &args.input {
                Some(path) => fs::read_to_string(path)
                    .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?,
                None => {
                    let mut s = String::new();
                    stdin.read_to_string(&mut s)?;
                    s
                }
            };
            let raw: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| input_error(format!("invalid input JSON: {e}")))?;
            let field = |k: &str| {
                raw.get(k)
                    .map(|v| v.to_string())
                    .ok_or_else(|| input_error(format!("input JSON lacks \"{k}\"")))
            };
            (
                parse_spec(&field("u")?, "u")?,
                parse_spec(&field("phi")?, "phi")?,
            )
        }
        _ => return Err(input_error("give both --u and --phi, or neither")),
    };
    Ok(Inputs { u, phi })
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> std::result::Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    Ok(emit(out, text.as_bytes())?)
}
