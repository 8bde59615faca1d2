//! Batch front end: field parsing, zero-cache persistence, identity runs,
//! and report emission. Exit codes are part of the interface:
//! 0 pass, 2 argument/parse error, 3 domain error, 4 count mismatch,
//! 5 identity failure, 6 inapplicable, 1 anything else.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use erh_core::completion::{detect_multiplicity, script_x, xi};
use erh_core::fields::{make_field, FieldDescriptor};
use erh_core::identity::{
    verify_euler_kronecker_on, verify_hadamard_logdd_on, verify_rh_integral, verify_theorem1_on,
    ReportStatus, VerificationReport, DEFAULT_RH_TOL, DEFAULT_TOL_FLOOR,
};
use erh_core::lfun::dedekind_zeta;
use erh_core::zeros::{
    certify, read_ledger, scan_zeros, write_ledger, LedgerStatus, ZeroLedger, REFINE_TOL,
};
use erh_core::{ComplexValue, Error};

/// Height range the --T flag accepts; scan-based commands default to 100,
/// the integral criterion defaults to its own 1000 cutoff when --T is absent.
const FLAG_MIN_T: f64 = 10.0;
const FLAG_MAX_T: f64 = 600.0;
const DEFAULT_SCAN_T: f64 = 100.0;
const DEFAULT_RH_T: f64 = 1000.0;

#[derive(Parser)]
#[command(
    name = "erh",
    version,
    about = "Zero-sum identity checks for Dedekind zeta functions of Q and quadratic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate zeta_K, xi_K, or the deflated completion at one point.
    Eval(EvalArgs),
    /// Scan, certify, and cache critical-line zeros up to height T.
    Zeros(ZerosArgs),
    /// Check one identity for one field and emit a report.
    Verify(VerifyArgs),
    /// Run one identity across every fundamental discriminant up to a bound.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Height cutoff (scan height, or integral cutoff for rh-integral).
    #[arg(long = "T")]
    t: Option<f64>,
    /// Absolute tolerance floor override for verification.
    #[arg(long)]
    tol_abs: Option<f64>,
    /// Directory holding cached zero ledgers.
    #[arg(long, default_value = "./erh-cache")]
    cache_dir: PathBuf,
    /// Report output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for scanning (defaults to the core count).
    #[arg(long)]
    threads: Option<usize>,
    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Field spec: Q, or D=<fundamental discriminant>.
    field: String,
    /// Function to evaluate.
    #[arg(long, value_enum)]
    func: Func,
    /// Evaluation point as re,im.
    #[arg(long)]
    s: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ZerosArgs {
    /// Field spec: Q, or D=<fundamental discriminant>.
    field: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Field spec: Q, or D=<fundamental discriminant>.
    field: String,
    /// Identity to check.
    #[arg(long, value_enum)]
    identity: Identity,
    /// Real expansion point for hadamard-logdd.
    #[arg(long, default_value_t = 2.0)]
    s0: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Include every fundamental discriminant with |D| up to this bound.
    #[arg(long)]
    max_disc: u32,
    /// Identity to check for each field.
    #[arg(long, value_enum)]
    identity: Identity,
    /// Real expansion point for hadamard-logdd.
    #[arg(long, default_value_t = 2.0)]
    s0: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Func {
    Zeta,
    Xi,
    ScriptX,
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    Theorem1,
    EulerKronecker,
    RhIntegral,
    HadamardLogdd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Resolved run parameters shared by the scan-backed commands.
struct RunConfig {
    t: f64,
    tol_floor: f64,
    cache_dir: PathBuf,
    format: Format,
    timestamp: bool,
}

enum CliError {
    /// Argument that clap could not reject on its own (exit 2).
    Parse(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    ExitCode::from(code)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::BadFieldSpec { .. } => 2,
        Error::CannotCertifyMultiplicity(_) => 6,
        Error::CountInstability { .. } => 4,
        _ if e.is_domain() => 3,
        _ => 1,
    }
}

fn dispatch(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Zeros(args) => cmd_zeros(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Core(Error::Domain(
                "--threads must be at least 1".into(),
            )));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Parse(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn resolve_config(common: &CommonArgs, identity: Option<Identity>) -> CliResult<RunConfig> {
    configure_threads(common.threads)?;
    let rh = matches!(identity, Some(Identity::RhIntegral));
    let t = match common.t {
        Some(t) => {
            if !(FLAG_MIN_T..=FLAG_MAX_T).contains(&t) {
                return Err(CliError::Core(Error::Domain(format!(
                    "--T must lie in [{FLAG_MIN_T}, {FLAG_MAX_T}], got {t}"
                ))));
            }
            t
        }
        None if rh => DEFAULT_RH_T,
        None => DEFAULT_SCAN_T,
    };
    let default_floor = if rh { DEFAULT_RH_TOL } else { DEFAULT_TOL_FLOOR };
    let tol_floor = match common.tol_abs {
        Some(tol) => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Core(Error::Domain(format!(
                    "--tol-abs must be positive, got {tol}"
                ))));
            }
            tol
        }
        None => default_floor,
    };
    Ok(RunConfig {
        t,
        tol_floor,
        cache_dir: common.cache_dir.clone(),
        format: common.format,
        timestamp: !common.no_timestamp,
    })
}

fn parse_field(spec: &str) -> CliResult<FieldDescriptor> {
    make_field(spec).map_err(CliError::Core)
}

fn parse_point(text: &str) -> CliResult<ComplexValue> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| CliError::Parse(format!("--s expects re,im, got {text:?}")))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad real part {re:?}")))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad imaginary part {im:?}")))?;
    Ok(ComplexValue::new(re, im))
}

/// Nearest 15-significant-digit value, matching report serialization.
fn sig15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap()
}

fn cmd_eval(args: EvalArgs) -> CliResult<u8> {
    configure_threads(args.common.threads)?;
    let field = parse_field(&args.field)?;
    let s = parse_point(&args.s)?;
    let value = match args.func {
        Func::Zeta => dedekind_zeta(&field, s)?,
        Func::Xi => xi(&field, s)?,
        Func::ScriptX => {
            let multiplicity = detect_multiplicity(&field)?;
            script_x(&field, s, multiplicity)?
        }
    };
    if value.im.abs() <= 1e-12 * (1.0 + value.norm()) {
        println!("{}", sig15(value.re));
    } else if value.im >= 0.0 {
        println!("{}+{}i", sig15(value.re), sig15(value.im));
    } else {
        println!("{}-{}i", sig15(value.re), sig15(-value.im));
    }
    Ok(0)
}

fn ledger_path(cache_dir: &Path, field: &FieldDescriptor) -> PathBuf {
    cache_dir.join(format!("{}.ledger", field.spec()))
}

/// Cached ledger when it covers the request at matching tolerance and is
/// certified; otherwise a fresh scan, persisted for the next run.
fn load_or_scan(field: &FieldDescriptor, t: f64, cache_dir: &Path) -> CliResult<(ZeroLedger, bool)> {
    let path = ledger_path(cache_dir, field);
    if path.exists() {
        if let Ok(cached) = read_ledger(&path) {
            if cached.field().spec() == field.spec()
                && cached.height() >= t
                && cached.refine_tol() == REFINE_TOL
                && cached.status() == LedgerStatus::CertifiedComplete
            {
                eprintln!("cache hit: {}", path.display());
                return Ok((cached, true));
            }
        }
    }
    let fresh = scan_zeros(field, t)?;
    std::fs::create_dir_all(cache_dir).map_err(Error::from)?;
    write_ledger(&fresh, &path)?;
    Ok((fresh, false))
}

fn cmd_zeros(args: ZerosArgs) -> CliResult<u8> {
    let config = resolve_config(&args.common, None)?;
    let field = parse_field(&args.field)?;
    let (ledger, from_cache) = load_or_scan(&field, config.t, &config.cache_dir)?;
    // A cached file may have been edited since it was written, so its
    // stored status is never trusted: re-certify the requested subset.
    let (count, status) = if from_cache {
        let cut = ledger
            .ordinates()
            .partition_point(|&g| g <= config.t);
        let subset = &ledger.ordinates()[..cut];
        (subset.len(), certify(&field, subset, config.t)?)
    } else {
        (ledger.ordinates().len(), ledger.status())
    };
    let plural = if count == 1 { "zero" } else { "zeros" };
    println!("{count} {plural}, {status}");
    Ok(match status {
        LedgerStatus::CertifiedComplete => 0,
        _ => 4,
    })
}

fn status_exit(status: ReportStatus) -> u8 {
    match status {
        ReportStatus::Pass => 0,
        ReportStatus::Fail => 5,
        ReportStatus::Inapplicable => 6,
    }
}

fn stamp(report: VerificationReport, with_time: bool) -> VerificationReport {
    if with_time {
        let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        report.with_timestamp(now)
    } else {
        report
    }
}

fn render_text(report: &VerificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "field: {}", report.field());
    let _ = writeln!(out, "identity: {}", report.identity());
    let _ = writeln!(out, "T: {}", report.t());
    let _ = writeln!(out, "partial_sum: {}", report.partial_sum());
    let _ = writeln!(out, "tail_estimate: {}", report.tail_estimate());
    let _ = writeln!(out, "rhs_value: {}", report.rhs_value());
    let _ = writeln!(out, "discrepancy: {}", report.discrepancy());
    let _ = writeln!(out, "status: {}", report.status());
    let _ = writeln!(out, "tolerance: {}", report.tolerance());
    let _ = write!(out, "ledger_status: {}", report.ledger_status());
    if let Some(ts) = report.timestamp() {
        let _ = write!(out, "\ntimestamp: {ts}");
    }
    out
}

fn emit_report(report: &VerificationReport, format: Format) {
    match format {
        Format::Text => println!("{}", render_text(report)),
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => {
            println!("{}", VerificationReport::csv_header());
            println!("{}", report.to_csv_row());
        }
    }
}

fn run_identity(
    field: &FieldDescriptor,
    identity: Identity,
    s0: f64,
    config: &RunConfig,
) -> CliResult<VerificationReport> {
    let report = match identity {
        Identity::RhIntegral => verify_rh_integral(field, config.t, config.tol_floor)?,
        _ => {
            let (ledger, _) = load_or_scan(field, config.t, &config.cache_dir)?;
            match identity {
                Identity::Theorem1 => verify_theorem1_on(&ledger, config.t, config.tol_floor)?,
                Identity::EulerKronecker => {
                    verify_euler_kronecker_on(&ledger, config.t, config.tol_floor)?
                }
                Identity::HadamardLogdd => {
                    verify_hadamard_logdd_on(&ledger, s0, config.t, config.tol_floor)?
                }
                Identity::RhIntegral => unreachable!(),
            }
        }
    };
    Ok(stamp(report, config.timestamp))
}

fn cmd_verify(args: VerifyArgs) -> CliResult<u8> {
    let config = resolve_config(&args.common, Some(args.identity))?;
    let field = parse_field(&args.field)?;
    let report = run_identity(&field, args.identity, args.s0, &config)?;
    emit_report(&report, config.format);
    Ok(status_exit(report.status()))
}

/// Every fundamental discriminant with 3 <= |D| <= bound, ordered by
/// magnitude with the positive one first; the fields module is the
/// authority on fundamentality.
fn fundamental_discriminants(bound: u32) -> Vec<i64> {
    let mut out = Vec::new();
    for magnitude in 3..=i64::from(bound) {
        for d in [magnitude, -magnitude] {
            if make_field(&format!("D={d}")).is_ok() {
                out.push(d);
            }
        }
    }
    out
}

fn cmd_sweep(args: SweepArgs) -> CliResult<u8> {
    let config = resolve_config(&args.common, Some(args.identity))?;
    let discriminants = fundamental_discriminants(args.max_disc);
    if config.format == Format::Csv {
        println!("{}", VerificationReport::csv_header());
    }
    let mut worst = 0u8;
    let mut bump = |code: u8| {
        // Failure dominates inapplicable dominates pass.
        let rank = |c: u8| match c {
            5 => 2,
            6 => 1,
            0 => 0,
            _ => 3,
        };
        if rank(code) > rank(worst) {
            worst = code;
        }
    };
    for d in discriminants {
        let spec = format!("D={d}");
        let field = match parse_field(&spec) {
            Ok(f) => f,
            Err(CliError::Core(e)) => {
                eprintln!("{spec}: {e}");
                bump(exit_code_for(&e));
                continue;
            }
            Err(CliError::Parse(msg)) => {
                eprintln!("{spec}: {msg}");
                bump(2);
                continue;
            }
        };
        match run_identity(&field, args.identity, args.s0, &config) {
            Ok(report) => {
                match config.format {
                    Format::Text => println!(
                        "{}: {} discrepancy={:e} tolerance={:e}",
                        report.field(),
                        report.status(),
                        report.discrepancy(),
                        report.tolerance()
                    ),
                    Format::Json => println!("{}", report.to_json()),
                    Format::Csv => println!("{}", report.to_csv_row()),
                }
                bump(status_exit(report.status()));
            }
            Err(CliError::Core(e)) => {
                eprintln!("{spec}: {e}");
                bump(exit_code_for(&e));
            }
            Err(CliError::Parse(msg)) => {
                eprintln!("{spec}: {msg}");
                bump(2);
            }
        }
    }
    Ok(worst)
}
