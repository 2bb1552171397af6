//! Front end for the `abcov` binary.
//!
//! [`run`] parses an argument vector, evaluates one command and writes a
//! report to `out`. Reports are JSON objects with sorted keys and exact
//! rationals rendered as `"p/q"`, so identical inputs give identical bytes.
//!
//! Exit codes: 0 on success, 2 on usage errors (diagnostic on `err`), 3 on
//! domain errors (structured error report on `out`), 1 on I/O failures.

mod batch;
mod commands;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use abcov_core::oracle::DEFAULT_MAX_STATES;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{argv_from_report, canonical, render_text, REPORT_SCHEMA, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Prefix of the environment variables that mirror the global flags.
pub const ENV_PREFIX: &str = "ABCOV_";

#[derive(Parser, Debug)]
#[command(
    name = "abcov",
    version,
    about = "Exact invariants of moduli of abelian covers of elliptic curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Debug, Clone)]
pub(crate) struct GlobalOpts {
    /// Emit JSON (the default; overrides --text and ABCOV_TEXT)
    #[arg(long, global = true)]
    json: bool,
    /// Emit indented plain text instead of JSON
    #[arg(long, global = true, env = "ABCOV_TEXT")]
    text: bool,
    /// Refuse orbit enumerations with more states than this
    #[arg(long, global = true, env = "ABCOV_MAX_STATES", default_value_t = DEFAULT_MAX_STATES)]
    max_states: u64,
    /// Seed for randomized batch families
    #[arg(long, global = true, env = "ABCOV_SEED", default_value_t = 0)]
    seed: u64,
    /// Add wall-clock time to oracle reports (these are then not byte-stable)
    #[arg(long, global = true, env = "ABCOV_TIMING")]
    timing: bool,
}

impl GlobalOpts {
    fn text_output(&self) -> bool {
        self.text && !self.json
    }
}

#[derive(Subcommand, Debug, Clone)]
pub(crate) enum Command {
    /// Describe a finite abelian group
    Group {
        #[arg(long)]
        group: String,
    },
    /// Adapted basis for a minimal generating sequence
    Basis {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
    },
    /// Ramification and étale parts, genus, coefficient matrices
    Covers {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        ram: String,
    },
    /// Irreducible-component catalog
    Classify {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        ram: String,
        /// Cross-check the count against the monodromy orbit oracle
        #[arg(long)]
        oracle: bool,
    },
    /// Boundary basis, lincomb matrix, relation count
    Picard {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        ram: String,
    },
    /// Double covers of genus-one curves with 2g - 2 branch points
    Bielliptic {
        #[arg(long)]
        genus: u64,
        /// List the boundary strata
        #[arg(long)]
        strata: bool,
        /// Picard numbers and orbit counts (the default)
        #[arg(long)]
        picard: bool,
        /// Print strata one JSON object per line instead of a report
        #[arg(long, requires = "strata")]
        stream: bool,
    },
    /// Brute-force cross-checks
    Oracle {
        #[arg(long, value_enum)]
        mode: OracleMode,
        #[arg(long)]
        group: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        ram: Option<String>,
        /// Torsion vector `a_1;...;a_n` summing to zero
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
        /// Largest group order for the exhaustive basis check
        #[arg(long)]
        max_order: Option<u64>,
    },
    /// Evaluate a JSON spec file into JSON lines, one row per datum
    Batch {
        #[arg(long)]
        spec: PathBuf,
        /// Write rows here instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OracleMode {
    Monodromy,
    TorsionLocus,
    Basis,
    Subgroups,
}

impl OracleMode {
    fn name(self) -> &'static str {
        match self {
            OracleMode::Monodromy => "monodromy",
            OracleMode::TorsionLocus => "torsion-locus",
            OracleMode::Basis => "basis",
            OracleMode::Subgroups => "subgroups",
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    let text = cli.global.text_output();
    let written = match &cli.command {
        Command::Batch { spec, output } => return batch::run(spec, output.as_deref(), &cli.global, out, err),
        Command::Bielliptic {
            genus,
            stream: true,
            ..
        } => return commands::stream_strata(*genus, text, out, err),
        command => match commands::evaluate(command, &cli.global) {
            Outcome::Usage(msg) => {
                let _ = writeln!(err, "error: {msg}");
                return EXIT_USAGE;
            }
            Outcome::Done { report, ok } => {
                let body = if text {
                    render_text(&report)
                } else {
                    report::to_json_pretty(&report)
                };
                writeln!(out, "{body}").map(|_| if ok { EXIT_OK } else { EXIT_DOMAIN })
            }
        },
    };
    written.unwrap_or(EXIT_IO)
}

/// Result of evaluating one command.
pub(crate) enum Outcome {
    Done { report: serde_json::Value, ok: bool },
    Usage(String),
}

/// Evaluates a single command from an argument vector without printing;
/// used by the batch runner.
pub(crate) fn evaluate_argv(argv: &[String], global: &GlobalOpts) -> Outcome {
    let mut full = vec!["abcov".to_string()];
    full.extend(argv.iter().cloned());
    match Cli::try_parse_from(&full) {
        Ok(Cli { command: Command::Batch { .. }, .. }) => Outcome::Usage("batch rows cannot nest batch".into()),
        Ok(Cli { command: Command::Bielliptic { stream: true, .. }, .. }) => {
            Outcome::Usage("batch rows cannot stream".into())
        }
        Ok(cli) => {
            let merged = GlobalOpts {
                seed: global.seed,
                timing: global.timing,
                ..cli.global
            };
            commands::evaluate(&cli.command, &merged)
        }
        Err(e) => Outcome::Usage(e.kind().to_string()),
    }
}
