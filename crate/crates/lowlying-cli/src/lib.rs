//! Command-line front end for the `lowlying` library.
//!
//! Every report starts with the full [`RunConfig`] and [`FORMAT_VERSION`]: as
//! a `# ` comment line in CSV, as the `config` field in JSON. Failures print a
//! single JSON [`ErrorRecord`] on stderr and exit nonzero.

pub mod args;
pub mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::{ContextKind, ContextValue, ErrorKind as ClapKind};
use clap::Parser;
use lowlying::modforms::cache::CACHE_DIR_ENV;
use serde::{Deserialize, Serialize};

pub use args::{Cli, Command, Format};
pub use commands::ReportData;

/// Version of the report and error layouts.
pub const FORMAT_VERSION: u32 = 1;

/// Everything that determines a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub cache_dir: PathBuf,
    pub threads: usize,
    pub seed: u64,
}

impl RunConfig {
    /// Fill in defaults: format by subcommand, cache directory from the flag,
    /// then the environment, then the system temporary directory.
    pub fn from_cli(cli: Cli) -> Self {
        let format = cli.format.unwrap_or(match cli.command {
            Command::Nonvanishing(_) => Format::Json,
            _ => Format::Csv,
        });
        let cache_dir = cli
            .cache_dir
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| std::env::temp_dir().join("lowlying-cache"));
        let threads = cli
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        Self {
            command: cli.command,
            format,
            cache_dir,
            threads,
            seed: cli.seed,
        }
    }
}

/// A JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub config: RunConfig,
    pub data: ReportData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    UnknownSubcommand,
    InvalidParameter,
    CacheCorruption,
    Computation,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::UnknownSubcommand | ErrorKind::InvalidParameter => 2,
            ErrorKind::CacheCorruption => 3,
            ErrorKind::Computation => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub format_version: u32,
    pub kind: ErrorKind,
    /// The offending flag, e.g. `--K`, when one can be named.
    pub flag: Option<String>,
    pub message: String,
}

/// Exit status and the two output streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(record: ErrorRecord) -> Self {
        Self {
            status: record.kind.exit_code(),
            stdout: String::new(),
            stderr: serde_json::to_string(&record).expect("error records serialize") + "\n",
        }
    }
}

fn record(kind: ErrorKind, flag: Option<String>, message: impl Into<String>) -> ErrorRecord {
    ErrorRecord {
        format_version: FORMAT_VERSION,
        kind,
        flag,
        message: message.into(),
    }
}

/// `--K <K>` or `--m` from clap's description of an argument.
fn flag_of(err: &clap::Error) -> Option<String> {
    let raw = match err.get(ContextKind::InvalidArg)? {
        ContextValue::String(s) => s.clone(),
        ContextValue::Strings(v) => v.first()?.clone(),
        _ => return None,
    };
    raw.split_whitespace().next().map(|s| s.trim_end_matches('=').to_owned())
}

fn from_clap(err: clap::Error) -> Outcome {
    match err.kind() {
        ClapKind::DisplayHelp | ClapKind::DisplayVersion | ClapKind::DisplayHelpOnMissingArgumentOrSubcommand => Outcome {
            status: 0,
            stdout: err.render().to_string(),
            stderr: String::new(),
        },
        ClapKind::InvalidSubcommand | ClapKind::MissingSubcommand => {
            let name = match err.get(ContextKind::InvalidSubcommand) {
                Some(ContextValue::String(s)) => Some(s.clone()),
                _ => None,
            };
            let msg = name.map_or_else(|| "missing subcommand".to_owned(), |n| format!("unknown subcommand `{n}`"));
            Outcome::failure(record(ErrorKind::UnknownSubcommand, None, msg))
        }
        _ => {
            let flag = flag_of(&err);
            let msg = err.render().to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ").to_owned();
            Outcome::failure(record(ErrorKind::InvalidParameter, flag, first))
        }
    }
}

fn from_library(err: lowlying::Error) -> ErrorRecord {
    use lowlying::Error as E;
    match &err {
        E::Domain { name, .. } => {
            let flag = match *name {
                "count" => "--samples".to_owned(),
                "m, n" => "--m".to_owned(),
                "support" | "grids" => return record(ErrorKind::InvalidParameter, None, err.to_string()),
                n => format!("--{n}"),
            };
            record(ErrorKind::InvalidParameter, Some(flag), err.to_string())
        }
        E::Cache(_) => record(ErrorKind::CacheCorruption, Some("--cache-dir".to_owned()), err.to_string()),
        _ => record(ErrorKind::Computation, None, err.to_string()),
    }
}

/// Produce the report text for a resolved configuration.
pub fn execute(config: &RunConfig) -> Result<String, ErrorRecord> {
    if config.threads == 0 {
        return Err(record(ErrorKind::InvalidParameter, Some("--threads".into()), "need at least one thread"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| record(ErrorKind::Computation, None, e.to_string()))?;
    let data = pool
        .install(|| commands::execute(&config.command, &config.cache_dir, config.seed))
        .map_err(from_library)?;
    let report = Report {
        format_version: FORMAT_VERSION,
        config: config.clone(),
        data,
    };
    Ok(match config.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
        Format::Csv => {
            let head = serde_json::json!({ "format_version": FORMAT_VERSION, "config": config });
            output::render_csv(&format!("lowlying {head}"), &report.data)
        }
    })
}

/// Parse arguments (including the program name) and run.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => return from_clap(e),
    };
    match execute(&RunConfig::from_cli(cli)) {
        Ok(stdout) => Outcome {
            status: 0,
            stdout,
            stderr: String::new(),
        },
        Err(rec) => Outcome::failure(rec),
    }
}
