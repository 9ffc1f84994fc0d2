mod commands;
mod demos;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "tcspace", version, about = "Exact transportation cost norms on finite metric spaces")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct ProblemInput {
    /// Problem JSON file: {"values": {"label": "p/q", ...}}
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Problem values in point order, comma separated (alternative to --problem)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "problem")]
    pub values: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyKind {
    Dp,
    Frechet,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the metric axioms and report every violation
    Validate {
        #[arg(long)]
        space: PathBuf,
    },
    /// Optimal transportation cost with plan and dual certificate
    Tc {
        #[arg(long)]
        space: PathBuf,
        #[command(flatten)]
        problem: ProblemInput,
        /// Verify this plan against --certificate instead of solving
        #[arg(long, requires = "certificate")]
        plan: Option<PathBuf>,
        #[arg(long, requires = "plan")]
        certificate: Option<PathBuf>,
    },
    /// Seminorm of a problem under a function family
    Seminorm {
        #[arg(long)]
        space: PathBuf,
        #[command(flatten)]
        problem: ProblemInput,
        /// Family JSON file; defaults to the family selected by --kind
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FamilyKind::Dp)]
        kind: FamilyKind,
    },
    /// Basis of the problems with zero double-point seminorm
    DpKernel {
        #[arg(long)]
        space: PathBuf,
    },
    /// Minimal pair set, min-condition verdict and, on failure, the two-family witness
    MinCondition {
        #[arg(long)]
        space: PathBuf,
    },
    /// Closed-form norms on a weighted tree
    Tree {
        #[arg(long)]
        tree: PathBuf,
        #[command(flatten)]
        problem: ProblemInput,
        /// Re-root the tree at this label
        #[arg(long)]
        root: Option<String>,
    },
    /// Min-metric and representing-set operations
    Special {
        #[command(subcommand)]
        op: commands::SpecialOp,
    },
    /// Run a named self-checking scenario
    Demo {
        /// One of the names printed by `demo --list`
        #[arg(required_unless_present_any = ["all", "list"])]
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        all: bool,
        #[arg(long, conflicts_with_all = ["name", "all"])]
        list: bool,
        #[arg(long, default_value_t = demos::DEFAULT_SEED)]
        seed: u64,
    },
    /// Generate spaces, trees and problems
    Gen {
        #[command(subcommand)]
        kind: commands::GenKind,
    },
}

/// How a command ended, when it did not simply succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or a failed precondition.
    Input(tcspace_core::Error),
    /// The command ran but a checked property does not hold.
    Assertion(serde_json::Value),
}

impl From<tcspace_core::Error> for Failure {
    fn from(e: tcspace_core::Error) -> Self {
        Failure::Input(e)
    }
}

pub type Outcome = Result<serde_json::Value, Failure>;

fn run(cli: Cli) -> Outcome {
    use commands::*;
    match cli.command {
        Command::Validate { space } => validate(&space),
        Command::Tc {
            space,
            problem,
            plan,
            certificate,
        } => tc(&space, &problem, plan.as_deref(), certificate.as_deref()),
        Command::Seminorm {
            space,
            problem,
            family,
            kind,
        } => seminorm(&space, &problem, family.as_deref(), kind),
        Command::DpKernel { space } => dp_kernel(&space),
        Command::MinCondition { space } => min_condition(&space),
        Command::Tree { tree, problem, root } => tree_cmd(&tree, &problem, root.as_deref()),
        Command::Special { op } => special(op),
        Command::Demo { name, all, list, seed } => {
            if list {
                Ok(json!({ "demos": demos::NAMES }))
            } else if all {
                demos::run_all(seed)
            } else {
                demos::run(name.as_deref().unwrap_or_default(), seed)
            }
        }
        Command::Gen { kind } => gen(kind),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let (value, code) = match run(cli) {
        Ok(v) => (Some(v), 0),
        Err(Failure::Assertion(v)) => (Some(v), 1),
        Err(Failure::Input(e)) => {
            let code = if matches!(e, tcspace_core::Error::Invariant(_)) { 1 } else { 2 };
            let report = json!({ "error": { "code": e.code(), "message": e.to_string() } });
            eprintln!("{}", serde_json::to_string(&report).expect("error report serializes"));
            (None, code)
        }
    };
    if let Some(v) = value {
        if let Err(e) = output::emit(&v, format) {
            eprintln!("{}", json!({ "error": { "code": "io", "message": e.to_string() } }));
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
