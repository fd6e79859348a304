//! `quatframe`: generate instances, compute K-frame bounds and duals, and run
//! the verification suite.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
//! or I/O errors.

mod human;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use quatframe_core::dual::{approx_deficit, canonical_bound_bracket, canonical_k_dual, is_k_dual};
use quatframe_core::frame::k_frame_bounds_with_tol;
use quatframe_core::io::{parse_instance_file, write_instance_file};
use quatframe_core::tol::{NORM_MARGIN, VERIFY_TOL};
use quatframe_core::verify::{
    gen_instance, run_random_suite, run_suite, BatchReport, Instance, InstanceKind, VerificationReport, MAX_DIM,
};

#[derive(Parser)]
#[command(
    name = "quatframe",
    version,
    about = "K-frames and K-duals in quaternionic Hilbert spaces"
)]
struct Cli {
    /// Verification tolerance.
    #[arg(long, global = true, env = "QUATFRAME_TOL", default_value_t = VERIFY_TOL, value_parser = parse_tol)]
    tol: f64,

    /// Print a table instead of JSON.
    #[arg(long, global = true)]
    human: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance file.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        rank: usize,
        /// exact-dual, approx-dual or non-dual.
        #[arg(long, default_value = "exact-dual")]
        kind: InstanceKind,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Optimal K-frame bounds and classification of F.
    Bounds { file: PathBuf },
    /// Whether G is a K-dual of F.
    CheckDual { file: PathBuf },
    /// Canonical K-dual of the projected family, written as a new instance.
    Canonical {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Approximate-duality deficit ‖K − T_F T_G*‖.
    Approx { file: PathBuf },
    /// Run every check on one instance file or on a seeded random batch.
    Suite {
        #[arg(conflicts_with = "random", required_unless_present = "random")]
        file: Option<PathBuf>,
        /// Number of random instances.
        #[arg(long, requires = "seed")]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "exact-dual")]
        kind: InstanceKind,
        /// Largest dimension drawn for random instances.
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..=MAX_DIM as u64))]
        max_n: u64,
    },
    /// Print a saved suite report.
    Report { file: PathBuf },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
        _ => Err(format!("`{s}` is not a positive tolerance")),
    }
}

/// Failure that maps to exit status 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<bool, UsageError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Instance, UsageError> {
    parse_instance_file(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, value: &Value) {
    let text = if cli.human {
        human::render(value)
    } else {
        serde_json::to_string_pretty(value).expect("JSON value") + "\n"
    };
    // a closed pipe (`| head`) is not an error worth a panic
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

/// `null` for infinite values, as JSON has no infinity.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn run(cli: &Cli) -> Outcome {
    let tol = cli.tol;
    match &cli.command {
        Command::Gen {
            seed,
            n,
            m,
            rank,
            kind,
            output,
        } => {
            let inst = gen_instance(*seed, *n, *m, *rank, *kind)?;
            write_instance_file(output, &inst).map_err(|e| UsageError(format!("{}: {e}", output.display())))?;
            emit(
                cli,
                &json!({ "written": output.display().to_string(), "seed": seed, "n": n, "m": m, "rankK": rank, "kind": kind }),
            );
            Ok(true)
        }
        Command::Bounds { file } => {
            let inst = load(file)?;
            let cert = k_frame_bounds_with_tol(&inst.f, &inst.k, tol)?;
            emit(cli, &serde_json::to_value(&cert)?);
            Ok(cert.is_k_frame)
        }
        Command::CheckDual { file } => {
            let inst = load(file)?;
            let g = inst
                .g
                .as_ref()
                .ok_or_else(|| UsageError(format!("{}: no G family", file.display())))?;
            let check = is_k_dual(&inst.f, g, &inst.k, tol)?;
            let mut v = serde_json::to_value(check)?;
            v["tolerance"] = json!(tol);
            emit(cli, &v);
            Ok(check.is_dual)
        }
        Command::Canonical { file, output } => {
            let inst = load(file)?;
            let canon = canonical_k_dual(&inst.f, &inst.k)?;
            let check = is_k_dual(&canon.projected, &canon.dual, &inst.k, tol)?;
            let bracket = canonical_bound_bracket(&inst.k, &canon)?;
            let lower_ok = bracket.lower_holds(NORM_MARGIN * (1.0 + bracket.lower_limit));
            let upper_ok = bracket.upper_holds(NORM_MARGIN * (1.0 + bracket.upper_limit));
            let out = Instance {
                f: canon.projected.clone(),
                g: Some(canon.dual.clone()),
                kind: InstanceKind::ExactDual,
                ..inst
            };
            write_instance_file(output, &out).map_err(|e| UsageError(format!("{}: {e}", output.display())))?;
            emit(
                cli,
                &json!({
                    "written": output.display().to_string(),
                    "residual": check.residual,
                    "isKDual": check.is_dual,
                    "tolerance": tol,
                    "bounds": {
                        "lowerLimit": num(bracket.lower_limit),
                        "upperLimit": num(bracket.upper_limit),
                        "dualLower": num(bracket.dual_lower),
                        "dualUpper": num(bracket.dual_upper),
                        "lowerHolds": lower_ok,
                        "upperHolds": upper_ok,
                    },
                }),
            );
            Ok(check.is_dual && lower_ok && upper_ok)
        }
        Command::Approx { file } => {
            let inst = load(file)?;
            let g = inst
                .g
                .as_ref()
                .ok_or_else(|| UsageError(format!("{}: no G family", file.display())))?;
            let d = approx_deficit(&inst.f, g, &inst.k)?;
            emit(cli, &serde_json::to_value(d)?);
            Ok(d.is_approximate)
        }
        Command::Suite {
            file,
            random,
            seed,
            kind,
            max_n,
        } => match (file, random) {
            (Some(file), _) => {
                let report = run_suite(&load(file)?, tol);
                emit(cli, &serde_json::to_value(&report)?);
                Ok(report.pass)
            }
            (None, Some(count)) => {
                let batch = run_random_suite(seed.unwrap_or(0), *count, *max_n as usize, *kind, tol);
                emit(cli, &serde_json::to_value(&batch)?);
                Ok(batch.pass)
            }
            (None, None) => Err(UsageError("suite needs FILE or --random COUNT".into())),
        },
        Command::Report { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| UsageError(format!("{}: {e}", file.display())))?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", file.display())))?;
            let pass = if let Ok(r) = serde_json::from_value::<VerificationReport>(value.clone()) {
                r.pass
            } else if let Ok(b) = serde_json::from_value::<BatchReport>(value.clone()) {
                b.pass
            } else {
                return Err(UsageError(format!("{}: not a suite report", file.display())));
            };
            emit(cli, &value);
            Ok(pass)
        }
    }
}
