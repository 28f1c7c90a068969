//! The command-line front end: `analyze`, `construct`, `verify`, and
//! `demo`, wired to the JSON formats in [`crate::json`].
//!
//! Exit codes follow one convention everywhere: `0` when the requested
//! contract is met, `1` when it is violated (a verification mismatch,
//! residuals over tolerance, a failed demo fixture), and `2` for usage
//! errors — unknown flags, unreadable files, malformed JSON (reported with
//! line and column), or inputs that fail validation.
//!
//! Reports go to stdout as JSON; diagnostics go to stderr. For a fixed seed
//! and fixed inputs the bytes on stdout are identical across runs — the
//! only sources of randomness are the seeded samplers. The default seed is
//! [`DEFAULT_SEED`]; `SIGNED_MOMENTS_SEED` overrides it, and `--seed`
//! overrides both.

use crate::analysis::{classify, AnalysisReport};
use crate::construct::{construct_signed_measure, verify_match, MatchProblem, Objective};
use crate::fixtures::{run_all, run_fixture, FixtureOutcome, DEFAULT_SEED};
use crate::json::{
    AnalysisReportFile, MatchReportFile, MeasureFile, MomentSequenceFile, SupportFile,
    VerifyReportFile,
};
use crate::moments::{MomentSequence, SignedAtomicMeasure};
use crate::scalar::Scalar;
use crate::support::SupportSpec;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

type Q = BigRational;

/// Residual ceiling for the float-mode `construct` contract; exact mode
/// owes zero.
const FLOAT_RESIDUAL_CONTRACT: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "signed-moments",
    version,
    about = "Signed representing measures for truncated moment sequences",
    long_about = "Signed representing measures for truncated moment sequences.\n\n\
        Input and output files are JSON; their shapes are documented by the\n\
        schema files shipped under schemas/: support.schema.json,\n\
        moment-sequence.schema.json, measure.schema.json, and the report\n\
        schemas analysis-report, match-report, and verify-report. Exact\n\
        rational values are written as strings like \"2/3\"; float values as\n\
        JSON numbers.\n\n\
        Everything random flows from one seed (default 271828). Set it with\n\
        --seed or the SIGNED_MOMENTS_SEED environment variable; outputs are\n\
        byte-identical across runs for the same seed and inputs."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed driving every sampler [default: 271828, or SIGNED_MOMENTS_SEED]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Progress notes on stderr; stdout is unaffected
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether every moment sequence on a support is representable
    Analyze(AnalyzeArgs),
    /// Build a signed atomic measure matching a target moment sequence
    Construct(ConstructArgs),
    /// Recompute a measure's moments and diff them against a target
    Verify(VerifyArgs),
    /// Run the built-in demonstration fixtures and print a pass/fail table
    Demo(DemoArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Support description (schemas/support.schema.json)
    #[arg(long)]
    support: PathBuf,
    /// Truncation degree N
    #[arg(long)]
    degree: u32,
    /// Write the report here instead of stdout (schemas/analysis-report.schema.json)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write growth traces as CSV: trace,weight,level,ratio,x1,...,xd
    #[arg(long)]
    traces: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    /// Target moments (schemas/moment-sequence.schema.json)
    #[arg(long)]
    moments: PathBuf,
    /// Support description (schemas/support.schema.json)
    #[arg(long)]
    support: PathBuf,
    /// What to ask of the weights
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Any)]
    objective: ObjectiveArg,
    /// Arithmetic: exact rationals or double precision
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Cap on candidate nodes (default: the basis dimension)
    #[arg(long)]
    node_budget: Option<usize>,
    /// Write the measure here (schemas/measure.schema.json); the match
    /// report always goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Measure to check (schemas/measure.schema.json)
    #[arg(long)]
    measure: PathBuf,
    /// Target moments (schemas/moment-sequence.schema.json)
    #[arg(long)]
    moments: PathBuf,
    /// Optional support; atoms are then checked for membership
    #[arg(long)]
    support: Option<PathBuf>,
    /// Arithmetic for the recomputation
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
}

#[derive(Args)]
struct DemoArgs {
    /// A single fixture to run (default: all of them)
    fixture: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Arbitrary-precision rationals; residuals are exactly zero
    Exact,
    /// f64 with least-norm solves; residuals within 1e-9 relative
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    /// Any exact match
    Any,
    /// Minimise total variation among matches on the candidate nodes
    MinTv,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Any => Objective::AnySolution,
            ObjectiveArg::MinTv => Objective::MinimizeTotalVariation,
        }
    }
}

/// A command's way of bailing out: usage problems exit 2, broken contracts
/// exit 1. Reports already written to stdout stay written.
enum Failure {
    Usage(String),
    Contract(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Contract(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Contract(m) => m,
        }
    }
}

fn usage(context: &Path, err: impl Display) -> Failure {
    Failure::Usage(format!("{}: {err}", context.display()))
}

/// Entry point used by `main`; parses `args` (program name first) and runs
/// the subcommand against real stdout/stderr.
pub fn run(args: impl IntoIterator<Item = String>) -> i32 {
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    run_with_io(args, &mut stdout, &mut stderr)
}

/// Same as [`run`] but with caller-supplied streams, so tests can capture
/// output in process.
pub fn run_with_io(
    args: impl IntoIterator<Item = String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not failures.
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    let seed = cli
        .seed
        .or_else(|| {
            std::env::var("SIGNED_MOMENTS_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(DEFAULT_SEED);
    let verbose = cli.verbose;
    let result = match cli.command {
        Command::Analyze(a) => analyze(&a, seed, verbose, out, err),
        Command::Construct(c) => construct(&c, seed, verbose, out, err),
        Command::Verify(v) => verify(&v, out),
        Command::Demo(d) => demo(&d, seed, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(path, e))?;
    // serde_json's message carries the line and column of the offence.
    serde_json::from_str(&text).map_err(|e| usage(path, e))
}

fn write_json(value: &impl Serialize, target: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Contract(format!("serialising report: {e}")))?;
    text.push('\n');
    match target {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| usage(path, e))?;
        }
        None => {
            out.write_all(text.as_bytes())
                .map_err(|e| Failure::Contract(format!("writing report: {e}")))?;
        }
    }
    Ok(())
}

fn load_support(path: &Path) -> Result<SupportSpec, Failure> {
    let file: SupportFile = read_json(path)?;
    file.to_core().map_err(|e| usage(path, e))
}

fn load_moments<S: Scalar>(path: &Path) -> Result<MomentSequence<S>, Failure> {
    let file: MomentSequenceFile = read_json(path)?;
    file.to_core().map_err(|e| usage(path, e))
}

fn load_measure<S: Scalar>(path: &Path) -> Result<SignedAtomicMeasure<S>, Failure> {
    let file: MeasureFile = read_json(path)?;
    file.to_core().map_err(|e| usage(path, e))
}

fn analyze(
    args: &AnalyzeArgs,
    seed: u64,
    verbose: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let support = load_support(&args.support)?;
    if verbose {
        let _ = writeln!(
            err,
            "analyzing {} (dimension {}) at degree {} with seed {seed}",
            support.class_name(),
            support.dimension(),
            args.degree
        );
    }
    let report = classify(&support, args.degree, seed)
        .map_err(|e| Failure::Contract(format!("analysis failed: {e}")))?;
    if let Some(path) = &args.traces {
        write_traces(&report, &support, path)?;
    }
    let file = AnalysisReportFile::from_core(&report, &support);
    write_json(&file, args.out.as_deref(), out)
}

/// One CSV row per growth sample: trace index, weight, level, ratio, then
/// the sample's coordinates.
fn write_traces(
    report: &AnalysisReport,
    support: &SupportSpec,
    path: &Path,
) -> Result<(), Failure> {
    let mut text = String::from("trace,weight,level,ratio");
    for axis in 1..=support.dimension() {
        text.push_str(&format!(",x{axis}"));
    }
    text.push('\n');
    for (i, growth) in report.growth.iter().enumerate() {
        for sample in &growth.trace {
            text.push_str(&format!("{i},{},{},{}", growth.weight, sample.level, sample.ratio));
            for c in &sample.point {
                text.push_str(&format!(",{c}"));
            }
            text.push('\n');
        }
    }
    std::fs::write(path, text).map_err(|e| usage(path, e))
}

fn construct(
    args: &ConstructArgs,
    seed: u64,
    verbose: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let support = load_support(&args.support)?;
    match args.mode {
        ModeArg::Exact => construct_in::<Q>(args, &support, seed, verbose, out, err),
        ModeArg::Float => construct_in::<f64>(args, &support, seed, verbose, out, err),
    }
}

fn construct_in<S: Scalar>(
    args: &ConstructArgs,
    support: &SupportSpec,
    seed: u64,
    verbose: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let target = load_moments::<S>(&args.moments)?;
    let mut problem = MatchProblem::new(&target, support);
    problem.objective = args.objective.into();
    problem.node_budget = args.node_budget;
    problem.seed = seed;
    let result = construct_signed_measure(&problem)
        .map_err(|e| Failure::Contract(format!("construction failed: {e}")))?;
    if verbose {
        let _ = writeln!(
            err,
            "{} nodes, solver {:?}, max relative residual {:e}",
            result.diagnostics.node_count, result.diagnostics.solver, result.max_relative_residual
        );
    }
    if let Some(path) = &args.out {
        write_json(&MeasureFile::from_core(&result.measure), Some(path), out)?;
    }
    write_json(&MatchReportFile::from_core(&result), None, out)?;
    let ceiling = if S::EXACT { 0.0 } else { FLOAT_RESIDUAL_CONTRACT };
    if result.max_relative_residual > ceiling {
        return Err(Failure::Contract(format!(
            "max relative residual {:e} exceeds {:e}",
            result.max_relative_residual, ceiling
        )));
    }
    Ok(())
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let support = args.support.as_deref().map(load_support).transpose()?;
    match args.mode {
        ModeArg::Exact => verify_in::<Q>(args, support.as_ref(), out),
        ModeArg::Float => verify_in::<f64>(args, support.as_ref(), out),
    }
}

fn verify_in<S: Scalar>(
    args: &VerifyArgs,
    support: Option<&SupportSpec>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let measure = load_measure::<S>(&args.measure)?;
    let target = load_moments::<S>(&args.moments)?;
    let report = verify_match(&measure, &target, support)
        .map_err(|e| usage(&args.measure, e))?;
    write_json(&VerifyReportFile::from_core(&report), None, out)?;
    if !report.matched {
        let detail = if report.support_ok == Some(false) {
            "an atom lies outside the support"
        } else {
            "recomputed moments do not match the target"
        };
        return Err(Failure::Contract(detail.into()));
    }
    Ok(())
}

fn demo(args: &DemoArgs, seed: u64, out: &mut dyn Write) -> Result<(), Failure> {
    let outcomes: Vec<FixtureOutcome> = match &args.fixture {
        Some(name) => {
            let outcome = run_fixture(name, seed).ok_or_else(|| {
                Failure::Usage(format!(
                    "unknown fixture '{name}'; pick one of: {}",
                    crate::fixtures::FIXTURE_NAMES.join(", ")
                ))
            })?;
            vec![outcome]
        }
        None => run_all(seed),
    };
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(4).max(4);
    let mut failed = 0usize;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        let _ = writeln!(out, "{:<width$}  {status}  {}", o.name, o.title);
        let _ = writeln!(out, "{:<width$}        {}", "", o.details);
    }
    let _ = writeln!(
        out,
        "{}/{} fixtures passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed > 0 {
        return Err(Failure::Contract(format!("{failed} fixture(s) failed")));
    }
    Ok(())
}
