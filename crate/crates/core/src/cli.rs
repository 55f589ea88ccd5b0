//! Command-line front end. [`run`] parses arguments, validates them, runs the
//! command and maps the outcome to an exit code: 0 on success, 2 for invalid
//! input, 3 when the run itself fails.
//!
//! Primary output (`--out`, or stdout) depends only on the arguments. Timing
//! goes to a separate metadata file: `--meta`, or `<out>.meta.json` when
//! `--out` is given.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::ChannelSpec;
use crate::code::{build_coupled, build_regular, design_rate, validate_degrees, ParityCheckCode};
use crate::de::{
    de_closed_form, de_regular_trace, default_coupled_steps, threshold_coupled, threshold_regular,
};
use crate::decoder::DecoderConfig;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::mc::mc_concentration;
use crate::sim::simulate;

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nbldpc", version, about = "Non-binary LDPC codes over subspace-noise channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a regular code, or a spatially-coupled one when --L is given.
    Construct(ConstructArgs),
    /// Density evolution traces and thresholds.
    De {
        #[command(subcommand)]
        mode: DeMode,
    },
    /// Decode the all-zero codeword of a code file over a grid of noise rates.
    Simulate(SimulateArgs),
    /// Empirical dimension concentration of random subspace intersections and sums.
    Concentration(ConcentrationArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long)]
    pub dl: usize,
    #[arg(long)]
    pub dr: usize,
    #[arg(long = "L")]
    pub coupling: Option<usize>,
    #[arg(long = "M")]
    pub lifting: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DeArgs {
    #[arg(long)]
    pub dl: usize,
    #[arg(long)]
    pub dr: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Subcommand, Debug)]
pub enum DeMode {
    /// Iterated regular recursion.
    Trace {
        #[command(flatten)]
        common: DeArgs,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Closed-form regular trace (ε < 1/(dr−1)).
    ClosedForm {
        #[command(flatten)]
        common: DeArgs,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 20)]
        steps: u32,
    },
    /// Regular threshold by bisection.
    Threshold {
        #[command(flatten)]
        common: DeArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Coupled threshold by bisection, for each --L.
    CoupledThreshold {
        #[command(flatten)]
        common: DeArgs,
        #[arg(long = "L", required = true)]
        coupling: Vec<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Step budget per bisection probe; defaults to 10·(L + dl).
        #[arg(long)]
        max_steps: Option<usize>,
    },
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// Noise rate, or an inclusive range `a:b:step`. Repeatable.
    #[arg(long, required = true)]
    pub epsilon: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-trial records as CSV (JSON output always embeds them).
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ConcentrationArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    /// Repeatable; paired with --d2 and --k by position.
    #[arg(long, required = true)]
    pub d1: Vec<usize>,
    #[arg(long, required = true)]
    pub d2: Vec<usize>,
    #[arg(long, required = true)]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses a list of `x` or `a:b:step` items into an ordered grid.
pub fn parse_grid(items: &[String]) -> Result<Vec<f64>> {
    let mut grid = Vec::new();
    for item in items {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("cannot parse '{s}' as a number in '{item}'")))
        };
        match parts.as_slice() {
            [x] => grid.push(num(x)?),
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(step > 0.0) || b < a {
                    return Err(Error::Parameter(format!(
                        "range '{item}' needs a ≤ b and a positive step"
                    )));
                }
                let n = ((b - a) / step + 1e-9).floor() as usize;
                // snap to 12 decimals so 0.1 + 2·0.1 prints as 0.3
                grid.extend((0..=n).map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12));
            }
            _ => {
                return Err(Error::Parameter(format!(
                    "'{item}' is neither a number nor a range a:b:step"
                )))
            }
        }
    }
    for &eps in &grid {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("noise rate {eps} is outside [0, 1]")));
        }
    }
    Ok(grid)
}

fn single_epsilon(item: &str) -> Result<f64> {
    match parse_grid(&[item.to_string()])?.as_slice() {
        [eps] => Ok(*eps),
        _ => Err(Error::Parameter("this command takes a single --epsilon value".into())),
    }
}

fn check_positive(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::Parameter(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn check_de_degrees(dl: usize, dr: usize) -> Result<()> {
    if dl < 2 {
        return Err(Error::Parameter(format!("--dl must be at least 2, got {dl}")));
    }
    validate_degrees(dl, dr)
}

fn warn_rounding(channel: &ChannelSpec) {
    if !channel.is_integral() {
        eprintln!(
            "warning: epsilon·m = {} is not an integer; using noise dimension {}",
            channel.epsilon() * channel.m() as f64,
            channel.noise_dim()
        );
    }
}

struct Output {
    primary: String,
    metadata: Value,
}

fn csv_text<S: Serialize>(rows: &[S], header: &[&str]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).map_err(csv_err)?;
    }
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn json_text(value: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn meta_path(output: &OutputArgs) -> Option<PathBuf> {
    output.meta.clone().or_else(|| {
        output.out.as_ref().map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".meta.json");
            PathBuf::from(s)
        })
    })
}

fn emit(output: &OutputArgs, result: Output, command: &str, started: Instant) -> Result<()> {
    write_text(output.out.as_deref(), &result.primary)?;
    if let Some(path) = meta_path(output) {
        let unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        let mut meta = json!({
            "schema": SCHEMA,
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "finished_unix_s": unix,
            "wall_time_s": started.elapsed().as_secs_f64(),
        });
        if let (Value::Object(dst), Value::Object(src)) = (&mut meta, result.metadata) {
            dst.extend(src);
        }
        std::fs::write(path, json_text(&meta)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TracePoint {
    t: usize,
    xi: f64,
}

fn trace_output(kind: &str, common: &DeArgs, eps: f64, xi: Vec<f64>) -> Result<Output> {
    let rows: Vec<TracePoint> = xi.into_iter().enumerate().map(|(t, xi)| TracePoint { t, xi }).collect();
    let primary = match common.output.format {
        Format::Csv => csv_text(&rows, &["t", "xi"])?,
        Format::Json => json_text(&json!({
            "schema": SCHEMA,
            "kind": kind,
            "dl": common.dl,
            "dr": common.dr,
            "epsilon": eps,
            "trace": rows,
        }))?,
    };
    Ok(Output { primary, metadata: json!({}) })
}

fn run_de(mode: &DeMode) -> Result<(Output, &OutputArgs)> {
    match mode {
        DeMode::Trace { common, epsilon, steps } => {
            check_de_degrees(common.dl, common.dr)?;
            let eps = single_epsilon(epsilon)?;
            let xi = de_regular_trace(common.dl, common.dr, eps, *steps)?;
            Ok((trace_output("trace", common, eps, xi)?, &common.output))
        }
        DeMode::ClosedForm { common, epsilon, steps } => {
            check_de_degrees(common.dl, common.dr)?;
            let eps = single_epsilon(epsilon)?;
            let xi = (0..=*steps)
                .map(|t| de_closed_form(common.dl, common.dr, eps, t))
                .collect::<Result<Vec<_>>>()?;
            Ok((trace_output("closed-form", common, eps, xi)?, &common.output))
        }
        DeMode::Threshold { common, tol } => {
            check_de_degrees(common.dl, common.dr)?;
            let th = threshold_regular(common.dl, common.dr, *tol)?;
            #[derive(Serialize)]
            struct Row {
                dl: usize,
                dr: usize,
                threshold: f64,
            }
            let row = Row { dl: common.dl, dr: common.dr, threshold: th };
            let primary = match common.output.format {
                Format::Csv => csv_text(&[row], &[])?,
                Format::Json => json_text(&json!({
                    "schema": SCHEMA,
                    "kind": "threshold",
                    "dl": common.dl,
                    "dr": common.dr,
                    "tol": tol,
                    "threshold": th,
                }))?,
            };
            Ok((Output { primary, metadata: json!({}) }, &common.output))
        }
        DeMode::CoupledThreshold { common, coupling, tol, max_steps } => {
            check_de_degrees(common.dl, common.dr)?;
            for &l in coupling {
                check_positive("L", l)?;
            }
            if let Some(s) = max_steps {
                check_positive("max-steps", *s)?;
            }
            #[derive(Serialize)]
            struct Row {
                #[serde(rename = "L")]
                coupling: usize,
                threshold: f64,
                design_rate: f64,
                max_steps: usize,
            }
            let mut rows = Vec::new();
            for &l in coupling {
                let steps = max_steps.unwrap_or_else(|| default_coupled_steps(common.dl, l));
                rows.push(Row {
                    coupling: l,
                    threshold: threshold_coupled(common.dl, common.dr, l, *tol, steps)?,
                    design_rate: design_rate(common.dl, common.dr, Some(l))?,
                    max_steps: steps,
                });
            }
            let primary = match common.output.format {
                Format::Csv => csv_text(&rows, &["L", "threshold", "design_rate", "max_steps"])?,
                Format::Json => json_text(&json!({
                    "schema": SCHEMA,
                    "kind": "coupled-threshold",
                    "dl": common.dl,
                    "dr": common.dr,
                    "tol": tol,
                    "thresholds": rows,
                }))?,
            };
            Ok((Output { primary, metadata: json!({}) }, &common.output))
        }
    }
}

fn run_construct(args: &ConstructArgs) -> Result<()> {
    let field = Field::new(args.q)?;
    validate_degrees(args.dl, args.dr)?;
    check_positive("M", args.lifting)?;
    check_positive("m", args.m)?;
    if let Some(l) = args.coupling {
        check_positive("L", l)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let code = match args.coupling {
        Some(l) => build_coupled(args.dl, args.dr, l, args.lifting, args.m, field, &mut rng)?,
        None => build_regular(args.dl, args.dr, args.lifting, args.m, field, &mut rng)?,
    };
    let mut meta = code.meta().clone();
    meta.seed = Some(args.seed);
    write_text(args.out.as_deref(), &code.with_meta(meta).to_json()?)
}

fn run_simulate(args: &SimulateArgs) -> Result<Output> {
    let grid = parse_grid(&args.epsilon)?;
    check_positive("max-iter", args.max_iter)?;
    let code = ParityCheckCode::read(&args.code)?;
    for &eps in &grid {
        warn_rounding(&ChannelSpec::new(code.field(), code.m(), eps)?);
    }
    let cfg = DecoderConfig {
        max_iterations: args.max_iter,
        track_dimensions: false,
    };
    let campaign = simulate(&code, &grid, args.trials, &cfg, args.seed)?;
    if let Some(path) = &args.records {
        let header = [
            "eps_index",
            "trial",
            "epsilon",
            "status",
            "iterations",
            "max_final_dim",
            "truth_violations",
        ];
        std::fs::write(path, csv_text(&campaign.records, &header)?)?;
    }
    let primary = match args.output.format {
        Format::Csv => csv_text(
            &campaign.summaries,
            &["epsilon", "noise_dim", "trials", "errors", "block_error_rate", "wilson_low", "wilson_high"],
        )?,
        Format::Json => json_text(&json!({
            "schema": SCHEMA,
            "kind": "simulate",
            "code": {
                "q": code.field().q(),
                "m": code.m(),
                "n_vars": code.n_vars(),
                "n_checks": code.n_checks(),
                "meta": code.meta(),
            },
            "seed": args.seed,
            "trials": args.trials,
            "max_iter": args.max_iter,
            "records": campaign.records,
            "summary": campaign.summaries,
        }))?,
    };
    let wall: Vec<f64> = campaign.records.iter().map(|r| r.wall_time_s).collect();
    Ok(Output {
        primary,
        metadata: json!({ "trial_wall_time_s": wall }),
    })
}

fn run_concentration(args: &ConcentrationArgs) -> Result<Output> {
    let field = Field::new(args.q)?;
    check_positive("m", args.m)?;
    if args.d1.len() != args.d2.len() || args.d1.len() != args.k.len() {
        return Err(Error::Parameter("--d1, --d2 and --k must be given the same number of times".into()));
    }
    for (&d1, &d2) in args.d1.iter().zip(&args.d2) {
        if d1 > args.m || d2 > args.m {
            return Err(Error::Domain(format!(
                "dimensions ({d1}, {d2}) exceed m = {}",
                args.m
            )));
        }
    }
    let reports = args
        .d1
        .iter()
        .zip(&args.d2)
        .zip(&args.k)
        .map(|((&d1, &d2), &k)| mc_concentration(args.m, field, d1, d2, k, args.trials, args.seed))
        .collect::<Result<Vec<_>>>()?;
    let primary = match args.output.format {
        Format::Csv => csv_text(&reports, &[])?,
        Format::Json => json_text(&json!({
            "schema": SCHEMA,
            "kind": "concentration",
            "seed": args.seed,
            "reports": reports,
        }))?,
    };
    Ok(Output { primary, metadata: json!({}) })
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<()> {
    let started = Instant::now();
    match &cli.command {
        Command::Construct(args) => run_construct(args),
        Command::De { mode } => {
            let (out, output) = run_de(mode)?;
            emit(output, out, "de", started)
        }
        Command::Simulate(args) => {
            let out = run_simulate(args)?;
            emit(&args.output, out, "simulate", started)
        }
        Command::Concentration(args) => {
            let out = run_concentration(args)?;
            emit(&args.output, out, "concentration", started)
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
