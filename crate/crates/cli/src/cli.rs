//! Command-line dispatch.
//!
//! Exit codes: 0 success, 1 I/O, parse or usage errors, 2 violated
//! preconditions, 3 convergence or internal failures, 4 a verification that
//! ran but did not pass. Every failure is also reported as one JSON object on
//! standard error.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rearrange_core::climb;
use rearrange_core::graph_case::solve_graph;
use rearrange_core::pipeline::{densities_partition, partition_theorem1, Options};
use rearrange_core::verify::verify;
use rearrange_core::{Error, ErrorKind, PLCurve, PLFunction, Point, Scalar};
use serde_json::{json, Value};

use crate::batch::{run_batch, BatchConfig, SeedRange};
use crate::format::{self, float_report, recorded_mode, FormatError, Mode, Reader, Writer};
use crate::plot::{self, Figure};

#[derive(Debug, Parser)]
#[command(name = "rearrange", version, about = "Partition plane curves into points with rearranged increments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Acceptance tolerance, as a decimal or `p/q`.
    #[arg(long, default_value = "1e-9")]
    tol: String,
    /// Number format of the output.
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Accept decimal inputs in exact mode, reading each literal exactly.
    #[arg(long)]
    allow_inexact: bool,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Render {
    /// Write an SVG picture of the curve, points and increment staircases.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write `i,dx,dy` rows.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find n interior points on a curve from (0,0) to (1,1), giving n+1
    /// increments whose x-parts are a cyclic shift of their y-parts.
    Partition {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 40)]
        max_iter: usize,
        #[arg(long, default_value_t = 4096)]
        fallback_grid: usize,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        render: Render,
    },
    /// Solve the case of a graph t ↦ (t, f(t)) with f below the identity.
    GraphCase {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        render: Render,
    },
    /// Find g1, g2 with f1∘g1 = f2∘g2.
    Climb {
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
        /// Also write g1 as a function file.
        #[arg(long)]
        g1_out: Option<PathBuf>,
        /// Also write g2 as a function file.
        #[arg(long)]
        g2_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a result or points file; exits 4 when the check fails.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Curve file; defaults to the curve embedded in the input.
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Defaults to the mode recorded in the input, else exact.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long, default_value = "1e-9")]
        tol: String,
        #[arg(long)]
        allow_inexact: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Split [0,1] so interval masses of two densities agree after a shift.
    Densities {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        render: Render,
    },
    /// Run a batch of randomized searches into a JSONL log.
    Explore {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        log: PathBuf,
        /// Run this seed only.
        #[arg(long)]
        seed: Option<u64>,
        /// Record per-trial wall time.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Render any result file.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        render: Render,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed")]
    VerifyFailed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Format(FormatError::Core(e))
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Format(FormatError::Core(e)) => match e.kind() {
                ErrorKind::Parse => 1,
                ErrorKind::Precondition => 2,
                ErrorKind::Convergence | ErrorKind::Internal => 3,
            },
            CliError::Format(_) | CliError::Usage(_) => 1,
            CliError::VerifyFailed => 4,
        }
    }

    fn to_json(&self) -> Value {
        let w = Writer::new(Mode::Exact);
        let (code, details) = match self {
            CliError::Format(FormatError::Core(e)) => {
                let details = match e {
                    Error::NonInteriorCurve { t } | Error::AboveIdentity { t } => json!({ "t": w.scalar(t) }),
                    Error::Precondition { witness: Some(t), .. } => json!({ "witness": w.scalar(t) }),
                    Error::Convergence { iterations, best_residual } => {
                        json!({ "iterations": iterations, "bestResidual": format::float(*best_residual) })
                    }
                    Error::Internal { at: Some(p), .. } => json!({ "at": w.point(p) }),
                    _ => Value::Null,
                };
                (e.code(), details)
            }
            CliError::Format(FormatError::Io { .. }) => ("Io", Value::Null),
            CliError::Format(FormatError::Parse(_)) => ("Parse", Value::Null),
            CliError::Usage(_) => ("Usage", Value::Null),
            CliError::VerifyFailed => ("VerifyFailed", Value::Null),
        };
        let mut err = json!({ "code": code, "message": self.to_string(), "exitCode": self.exit_code() });
        if !details.is_null() {
            err["details"] = details;
        }
        json!({ "error": err })
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return 0;
            }
            return fail(&CliError::Usage(e.to_string().trim_end().to_string()));
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> i32 {
    let _ = writeln!(std::io::stderr(), "{}", e.to_json());
    e.exit_code()
}

fn parse_tol(text: &str) -> CliResult<Scalar> {
    let tol = Scalar::parse(text).map_err(|e| CliError::Usage(format!("--tol: {e}")))?;
    if tol.is_negative() {
        return Err(CliError::Usage("--tol must be non-negative".into()));
    }
    Ok(tol)
}

fn check_n(n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

fn reader(mode: Mode, allow_inexact: bool) -> Reader {
    Reader { allow_decimal: allow_inexact || mode == Mode::Float }
}

fn emit(v: &Value, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => format::write_json(path, v)?,
        None => {
            let text = serde_json::to_string_pretty(v).expect("values serialize");
            // a closed pipe downstream is not a failure of the command
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    Ok(())
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Partition { input, n, max_iter, fallback_grid, common, render } => {
            check_n(n)?;
            let tol = parse_tol(&common.tol)?;
            let curve = reader(common.mode, common.allow_inexact).curve(&format::read_json(&input)?)?;
            let opts = Options { tol: tol.clone(), max_iter, fallback_grid, ..Options::default() };
            let result = partition_theorem1(&curve, n + 1, &opts)?;
            let report = verify(curve.vertices(), &result.points, &tol);
            let v = Writer::new(common.mode).partition(&curve, &result, &report);
            emit(&v, common.output.as_deref())?;
            render_outputs(&v, &render)
        }
        Command::GraphCase { input, n, common, render } => {
            check_n(n)?;
            let f = reader(common.mode, common.allow_inexact).function(&format::read_json(&input)?)?;
            let sol = solve_graph(&f, n)?;
            let v = Writer::new(common.mode).graph(&f, &sol)?;
            emit(&v, common.output.as_deref())?;
            render_outputs(&v, &render)
        }
        Command::Climb { f1, f2, g1_out, g2_out, common } => {
            let r = reader(common.mode, common.allow_inexact);
            let f1 = r.function(&format::read_json(&f1)?)?;
            let f2 = r.function(&format::read_json(&f2)?)?;
            let sol = climb::solve(&f1, &f2)?;
            let w = Writer::new(common.mode);
            if let Some(p) = g1_out {
                format::write_json(&p, &w.function(&sol.g1))?;
            }
            if let Some(p) = g2_out {
                format::write_json(&p, &w.function(&sol.g2))?;
            }
            emit(&w.climb(&f1, &f2, &sol), common.output.as_deref())
        }
        Command::Verify { input, curve, mode, tol, allow_inexact, output } => {
            let doc = format::read_json(&input)?;
            let mode = mode.or_else(|| recorded_mode(&doc)).unwrap_or(Mode::Exact);
            let tol = parse_tol(&tol)?;
            let curve_doc = match &curve {
                Some(p) => Some(format::read_json(p)?),
                None => None,
            };
            let (report, pass) = verify_doc(&doc, curve_doc.as_ref(), mode, &tol, reader(mode, allow_inexact))?;
            emit(&report, output.as_deref())?;
            if pass {
                Ok(())
            } else {
                Err(CliError::VerifyFailed)
            }
        }
        Command::Densities { input, n, common, render } => {
            check_n(n)?;
            let tol = parse_tol(&common.tol)?;
            let doc = format::read_json(&input)?;
            let r = reader(common.mode, common.allow_inexact);
            let (f, g) = (r.density(format::field(&doc, "f")?)?, r.density(format::field(&doc, "g")?)?);
            let opts = Options { tol: tol.clone(), ..Options::default() };
            let part = densities_partition(&f, &g, n + 1, &opts)?;
            let curve = PLCurve::from_components(&f.cumulative()?, &g.cumulative()?)?;
            let report = verify(curve.vertices(), &part.result.points, &tol);
            let w = Writer::new(common.mode);
            let mut v = w.partition(&curve, &part.result, &report);
            v["kind"] = json!("densities");
            v["t"] = w.scalars(&part.t);
            emit(&v, common.output.as_deref())?;
            render_outputs(&v, &render)
        }
        Command::Explore { config, log, seed, timing, threads } => {
            let mut cfg = BatchConfig::from_value(&format::read_json(&config)?)?;
            if let Some(seed) = seed {
                cfg.seeds = SeedRange { start: seed, count: 1 };
            }
            cfg.timing |= timing;
            let report = match threads {
                Some(k) => rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| CliError::Usage(format!("--threads: {e}")))?
                    .install(|| run_batch(&cfg, &log))?,
                None => run_batch(&cfg, &log)?,
            };
            let v = json!({
                "log": log.display().to_string(),
                "appended": report.appended,
                "skipped": report.skipped,
                "summary": report.summary,
            });
            emit(&v, None)
        }
        Command::Plot { input, render } => {
            if render.svg.is_none() && render.csv.is_none() {
                return Err(CliError::Usage("plot needs --svg or --csv".into()));
            }
            render_outputs(&format::read_json(&input)?, &render)
        }
    }
}

/// Returns the report and whether it passes.
fn verify_doc(doc: &Value, curve_doc: Option<&Value>, mode: Mode, tol: &Scalar, r: Reader) -> CliResult<(Value, bool)> {
    if doc.get("g1").is_some() {
        return verify_climb(doc, r);
    }
    let curve_val = match curve_doc {
        Some(c) => c,
        None => doc.get("curve").ok_or_else(|| CliError::Usage("input has no embedded curve; pass --curve".into()))?,
    };
    let points = format::field(doc, "points")?;
    match mode {
        Mode::Exact => {
            let curve = r.curve(curve_val)?;
            let report = verify(curve.vertices(), &r.points(points)?, tol);
            Ok((Writer::new(Mode::Exact).report(&report), report.pass))
        }
        Mode::Float => {
            let curve = r.float_points(format::field(curve_val, "points")?)?;
            let report = verify(&curve, &r.float_points(points)?, &tol.to_f64());
            Ok((float_report(&report), report.pass))
        }
    }
}

fn verify_climb(doc: &Value, r: Reader) -> CliResult<(Value, bool)> {
    let f = |k: &str| -> CliResult<PLFunction> { Ok(r.function(format::field(doc, k)?)?) };
    let (f1, f2, g1, g2) = (f("f1")?, f("f2")?, f("g1")?, f("g2")?);
    let ends = |g: &PLFunction| g.start_value().is_zero() && *g.end_value() == Scalar::one();
    let lhs = PLFunction::compose(&f1, &g1)?;
    let rhs = PLFunction::compose(&f2, &g2)?;
    let distance = lhs.sup_distance(&rhs)?;
    let pass = ends(&g1) && ends(&g2) && lhs == rhs;
    let w = Writer::new(Mode::Exact);
    Ok((json!({ "pass": pass, "endpointsOk": ends(&g1) && ends(&g2), "supDistance": w.scalar(&distance) }), pass))
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn float_list(v: Option<&Value>) -> CliResult<Vec<f64>> {
    match v {
        None => Ok(Vec::new()),
        Some(v) => Ok(Reader::lenient().scalars(v)?.iter().map(Scalar::to_f64).collect()),
    }
}

fn figure(doc: &Value) -> CliResult<Figure> {
    let r = Reader::lenient();
    if doc.get("g1").is_some() {
        // the climbing path (g1(τ), g2(τ))
        let path = PLCurve::from_components(&r.function(&doc["g1"])?, &r.function(&doc["g2"])?)?;
        return Ok(Figure { curve: path.vertices().iter().map(Point::to_f64).collect(), ..Figure::default() });
    }
    let curve = match doc.get("curve") {
        Some(c) => r.float_points(format::field(c, "points")?)?,
        None => r.float_points(format::field(doc, "points")?)?,
    };
    let points = match (doc.get("curve"), doc.get("points")) {
        (Some(_), Some(p)) => r.float_points(p)?,
        _ => Vec::new(),
    };
    Ok(Figure { curve, points, dx: float_list(doc.get("dx"))?, dy: float_list(doc.get("dy"))? })
}

fn render_outputs(doc: &Value, render: &Render) -> CliResult<()> {
    if let Some(path) = &render.svg {
        write_text(path, &plot::svg(&figure(doc)?))?;
    }
    if let Some(path) = &render.csv {
        let list = |k: &str| -> CliResult<Vec<String>> {
            let arr = doc.get(k).and_then(Value::as_array).ok_or_else(|| CliError::Usage(format!("input has no {k:?} to export")))?;
            Ok(arr.iter().map(value_text).collect())
        };
        write_text(path, &plot::csv(&list("dx")?, &list("dy")?))?;
    }
    Ok(())
}
