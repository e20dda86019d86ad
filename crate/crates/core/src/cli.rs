//! Command dispatch for the `crsm` binary.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::closure::{SemigroupClosure, DEFAULT_CLOSURE_LIMIT};
use crate::decompose;
use crate::error::Error;
use crate::machine::Machine;
use crate::report::{self, MachineReport};
use crate::text;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
/// An internal consistency check failed.
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "crsm", version, about = "Closure analysis and decomposition of state machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closure and structure report.
    Analyze(CommonArgs),
    /// Branch/reset/permutation decomposition of a simple closure.
    Decompose(CommonArgs),
    /// Basic-type label of the closure.
    Classify(CommonArgs),
    /// Decompose and check the decomposition by recomposition.
    Verify(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Machine file (text format, or JSON with keys `states` and `inputs`).
    file: PathBuf,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Maximum number of closure elements to enumerate.
    #[arg(long = "max-closure", value_name = "N", default_value_t = DEFAULT_CLOSURE_LIMIT)]
    max_closure: usize,
}

/// Exit status and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            status: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(status: i32, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            status,
            stdout: String::new(),
            stderr,
        }
    }
}

fn status_of(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::NotSimple { .. } => EXIT_PRECONDITION,
        Error::InvalidLimit => EXIT_INPUT,
        Error::InvariantViolation(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn from_error(e: Error) -> Outcome {
    Outcome::fail(status_of(&e), format!("error: {e}"))
}

/// Reads a machine file: JSON when the extension is `.json` or the content starts
/// with `{`, the line format otherwise.
pub fn load_machine(path: &Path) -> Result<Machine, String> {
    let content =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let is_json = path.extension().is_some_and(|ext| ext == "json")
        || content.trim_start().starts_with('{');
    if is_json {
        serde_json::from_str(&content).map_err(|e| format!("{}: {e}", path.display()))
    } else {
        text::parse_machine(&content).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn build_report(args: &CommonArgs) -> Result<MachineReport, Outcome> {
    let machine = load_machine(&args.file).map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: {e}")))?;
    let report = report::decompose_machine(&machine, args.max_closure).map_err(from_error)?;
    if report.simple != report.constant_rank {
        return Err(Outcome::fail(
            EXIT_INTERNAL,
            format!(
                "internal error: simple = {} but constant rank = {}",
                report.simple, report.constant_rank
            ),
        ));
    }
    Ok(report)
}

fn not_simple(report: &MachineReport) -> Outcome {
    Outcome::fail(
        EXIT_PRECONDITION,
        format!("closure is not simple: rank spectrum {}", report.rank_spectrum),
    )
}

fn analyze(args: &CommonArgs) -> Outcome {
    match build_report(args) {
        Ok(report) if args.json => Outcome::ok(to_json(&report)),
        Ok(report) => Outcome::ok(report.render_analysis()),
        Err(outcome) => outcome,
    }
}

fn decompose_cmd(args: &CommonArgs) -> Outcome {
    let report = match build_report(args) {
        Ok(r) => r,
        Err(outcome) => return outcome,
    };
    if report.decomposition.is_none() {
        return not_simple(&report);
    }
    if args.json {
        Outcome::ok(to_json(&report))
    } else {
        let mut out = format!(
            "closure size: {}\nrank spectrum: {}\nsimple: true\n",
            report.closure_size, report.rank_spectrum
        );
        out.push_str(&report.render_decomposition());
        Outcome::ok(out)
    }
}

fn classify(args: &CommonArgs) -> Outcome {
    let machine = match load_machine(&args.file) {
        Ok(m) => m,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}")),
    };
    let s = match SemigroupClosure::generate(&machine, args.max_closure) {
        Ok(s) => s,
        Err(e) => return from_error(e),
    };
    let label = decompose::classify_basic(&s);
    if args.json {
        Outcome::ok(to_json(&json!({
            "basic_type": label,
            "closure_size": s.len(),
        })))
    } else {
        Outcome::ok(format!("{label}\n"))
    }
}

fn verify(args: &CommonArgs) -> Outcome {
    let report = match build_report(args) {
        Ok(r) => r,
        Err(outcome) => return outcome,
    };
    let Some(d) = &report.decomposition else {
        return not_simple(&report);
    };
    let status = if d.verification.passed {
        EXIT_OK
    } else {
        EXIT_INTERNAL
    };
    let stdout = if args.json {
        to_json(&json!({
            "closure_size": report.closure_size,
            "m": d.m,
            "n": d.n,
            "group_order": d.group.order,
            "kind": d.kind,
            "verification": d.verification,
        }))
    } else {
        format!(
            "closure size: {} = {} x {} x {}\nkind: {}\n{}\n",
            report.closure_size,
            d.m,
            d.n,
            d.group.order,
            d.kind,
            report::render_verification(&d.verification)
        )
    };
    Outcome {
        status,
        stdout,
        stderr: String::new(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if status == EXIT_OK {
                Outcome::ok(rendered)
            } else {
                Outcome::fail(status, rendered)
            };
        }
    };
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Decompose(a) => decompose_cmd(a),
        Command::Classify(a) => classify(a),
        Command::Verify(a) => verify(a),
    }
}
