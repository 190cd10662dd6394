//! `whitbessel`: coefficient tables, kernel evaluation and verification reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use whitbessel::kernels::{self, EvalConfig, OrderParams};
use whitbessel::lambda::{coeffs_from_recurrence, laguerre_closed_form, CoeffVector};
use whitbessel::oracle::Oracle;
use whitbessel::report::{
    fmt_f64, reports_to_csv, reports_to_value, sort_reports, to_canonical_json, write_text, Format, ResidualReport,
};
use whitbessel::suite::{identity_oracle, is_advisory, run_check, run_suite_with, Check, SuiteOptions, SuiteRanges};
use whitbessel::Error;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "whitbessel", version, about = "Whittaker-Bessel product identity: coefficients, kernels and checks")]
struct Cli {
    /// TOML file with optional `[eval]` and `[suite]` tables.
    #[arg(long, env = "WHITBESSEL_CONFIG", global = true)]
    config: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json", global = true)]
    format: OutFormat,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Also consult the high-precision oracle (slow).
    #[arg(long, global = true)]
    oracle: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the coefficients a_1 .. a_{n+1} of x Lambda(x).
    Coeffs {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.0)]
        k: f64,
    },
    /// Evaluate one kernel on a grid of real arguments.
    Eval {
        #[arg(value_enum)]
        kernel: Kernel,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        x_grid: Vec<f64>,
        #[arg(long)]
        a: Option<Complex64>,
        #[arg(long)]
        b: Option<Complex64>,
        #[arg(long)]
        kappa: Option<Complex64>,
        #[arg(long)]
        mu: Option<Complex64>,
        #[arg(long)]
        nu: Option<Complex64>,
    },
    /// Run a single group of checks for one (n, k).
    Verify {
        #[arg(long)]
        check: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.0)]
        k: f64,
        #[arg(long, value_delimiter = ',')]
        x_grid: Option<Vec<f64>>,
        /// Re-judge every report against this threshold.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run every check over the configured ranges.
    Suite {
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        k_set: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        x_grid: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Kernel {
    KummerM,
    WhittakerM,
    WhittakerW,
    BesselI,
    BesselITilde,
    BesselK,
    BesselKQuad,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    eval: EvalConfig,
    suite: SuiteRanges,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_)
            | Error::Domain { .. }
            | Error::ParameterPole { .. }
            | Error::DegenerateParameter { .. }
            | Error::GammaPole(_) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: FileConfig =
        toml::from_str(&text).map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))?;
    cfg.eval.validate()?;
    Ok(cfg)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => Ok(write_text(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cplx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn coeffs_text(cv: &CoeffVector, format: Format) -> String {
    match format {
        Format::Json => to_canonical_json(&cv.to_value()),
        Format::Csv => {
            let mut s = String::from("m,re,im\n");
            for (j, a) in cv.coeffs().iter().enumerate() {
                s.push_str(&format!("{},{},{}\n", j + 1, fmt_f64(a.re), fmt_f64(a.im)));
            }
            s
        }
    }
}

fn need(name: &str, v: Option<Complex64>) -> Result<Complex64, Failure> {
    v.ok_or_else(|| Failure::usage(format!("--{name} is required for this kernel")))
}

struct KernelArgs {
    a: Option<Complex64>,
    b: Option<Complex64>,
    kappa: Option<Complex64>,
    mu: Option<Complex64>,
    nu: Option<Complex64>,
}

fn eval_kernel(
    kernel: Kernel,
    args: &KernelArgs,
    xs: &[f64],
    cfg: &EvalConfig,
    use_oracle: bool,
    format: Format,
) -> Result<String, Failure> {
    let params: Vec<(&str, Complex64)> = match kernel {
        Kernel::KummerM => vec![("a", need("a", args.a)?), ("b", need("b", args.b)?)],
        Kernel::WhittakerM | Kernel::WhittakerW => {
            vec![("kappa", need("kappa", args.kappa)?), ("mu", need("mu", args.mu)?)]
        }
        _ => vec![("nu", need("nu", args.nu)?)],
    };
    let p = |i: usize| params[i].1;
    let mut oracle = use_oracle.then(Oracle::new);
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let value = match kernel {
            Kernel::KummerM => kernels::kummer_m(p(0), p(1), Complex64::new(x, 0.0), cfg)?,
            Kernel::WhittakerM => kernels::whittaker_m(p(0), p(1), x, cfg)?,
            Kernel::WhittakerW => kernels::whittaker_w(p(0), p(1), x, cfg)?,
            Kernel::BesselI => kernels::bessel_i(p(0), x, cfg)?,
            Kernel::BesselITilde => kernels::bessel_i_tilde(p(0), x, cfg)?,
            Kernel::BesselK => kernels::bessel_k_via_w(p(0), x, cfg)?,
            Kernel::BesselKQuad => kernels::bessel_k_quad(p(0), x, cfg)?,
        };
        let reference = match oracle.as_mut() {
            None => None,
            Some(o) => Some(match kernel {
                Kernel::KummerM => o.kummer_m(p(0), p(1), Complex64::new(x, 0.0)),
                Kernel::WhittakerM => o.whittaker_m(p(0), p(1), x),
                Kernel::WhittakerW => o.whittaker_w(p(0), p(1), x)?,
                Kernel::BesselI => o.bessel_i(p(0), x),
                Kernel::BesselITilde => o.bessel_i_tilde(p(0), x),
                Kernel::BesselK | Kernel::BesselKQuad => o.bessel_k(p(0), x)?,
            }),
        };
        rows.push((x, value, reference));
    }
    let rel = |v: Complex64, r: Complex64| if r.norm() == 0.0 { (v - r).norm() } else { (v - r).norm() / r.norm() };

    Ok(match format {
        Format::Json => {
            let points: Vec<Value> = rows
                .iter()
                .map(|&(x, v, r)| {
                    let mut pt = json!({"x": x, "value": cplx(v)});
                    if let Some(r) = r {
                        pt["oracle"] = cplx(r);
                        pt["rel_diff"] = json!(rel(v, r));
                    }
                    pt
                })
                .collect();
            let mut doc = json!({
                "kernel": kernel.to_possible_value().expect("named").get_name(),
                "points": points,
            });
            for (name, z) in &params {
                doc["params"][*name] = cplx(*z);
            }
            to_canonical_json(&doc)
        }
        Format::Csv => {
            let mut s = String::from(if use_oracle { "x,re,im,oracle_re,oracle_im,rel_diff\n" } else { "x,re,im\n" });
            for &(x, v, r) in &rows {
                s.push_str(&format!("{},{},{}", fmt_f64(x), fmt_f64(v.re), fmt_f64(v.im)));
                if let Some(r) = r {
                    s.push_str(&format!(",{},{},{}", fmt_f64(r.re), fmt_f64(r.im), fmt_f64(rel(v, r))));
                }
                s.push('\n');
            }
            s
        }
    })
}

fn reports_text(reports: &[ResidualReport], format: Format) -> String {
    match format {
        Format::Json => to_canonical_json(&reports_to_value(reports)),
        Format::Csv => reports_to_csv(reports),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = load_config(cli.config.as_deref())?;
    let cfg = file.eval;
    let format: Format = cli.format.into();
    let out = cli.out.as_deref();

    match cli.command {
        Command::Coeffs { n, k } => {
            let params = OrderParams::new(n, k)?;
            if k < 0.0 {
                return Err(Failure::usage("k must be nonnegative"));
            }
            let cv = if cfg.is_k_zero(k) {
                laguerre_closed_form(n)?
            } else {
                coeffs_from_recurrence(params)?
            };
            emit(&coeffs_text(&cv, format), out)?;
            Ok(0)
        }
        Command::Eval {
            kernel,
            x_grid,
            a,
            b,
            kappa,
            mu,
            nu,
        } => {
            let args = KernelArgs { a, b, kappa, mu, nu };
            emit(&eval_kernel(kernel, &args, &x_grid, &cfg, cli.oracle, format)?, out)?;
            Ok(0)
        }
        Command::Verify {
            check,
            n,
            k,
            x_grid,
            tol,
        } => {
            let check: Check = check.parse()?;
            let params = OrderParams::new(n, k)?;
            if let Some(t) = tol {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Failure::usage(format!("--tol must be positive, got {t}")));
                }
            }
            let mut reports = run_check(check, params, x_grid.as_deref(), &cfg)?;
            if cli.oracle && check == Check::Identity {
                let grid = x_grid.unwrap_or_else(|| file.suite.x_grid.clone());
                reports.push(identity_oracle(params, &grid)?);
            }
            if let Some(t) = tol {
                reports = reports.into_iter().map(|r| r.rethreshold(t)).collect();
            }
            sort_reports(&mut reports);
            emit(&reports_text(&reports, format), out)?;
            for r in reports.iter().filter(|r| !r.pass) {
                let kind = if is_advisory(&r.check) { "advisory" } else { "FAILED" };
                log::warn!("{kind}: {} at {} (max residual {:.3e})", r.check, r.params, r.max_residual());
            }
            let failed = reports.iter().any(|r| !r.pass && !is_advisory(&r.check));
            Ok(if failed { EXIT_FAILED } else { 0 })
        }
        Command::Suite { n_max, k_set, x_grid } => {
            let mut ranges = file.suite;
            if let Some(v) = n_max {
                ranges.n_max = v;
            }
            if let Some(v) = k_set {
                ranges.k_set = v;
            }
            if let Some(v) = x_grid {
                ranges.x_grid = v;
            }
            let result = run_suite_with(&cfg, &ranges, SuiteOptions { oracle: cli.oracle })?;
            let text = match format {
                Format::Json => result.to_json(),
                Format::Csv => reports_to_csv(&result.reports),
            };
            emit(&text, out)?;
            for r in result.failed_load_bearing() {
                log::warn!("FAILED: {} at {} (max residual {:.3e})", r.check, r.params, r.max_residual());
            }
            Ok(if result.ok() { 0 } else { EXIT_FAILED })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
