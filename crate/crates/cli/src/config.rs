use std::path::PathBuf;
use std::time::Duration;

use chrono::{DateTime, Utc};
use clap::{Parser, ValueEnum};
use trailnet::act_trace::CaseStrategy;
use trailnet::alpha::DEFAULT_ALPHABET_LIMIT;
use trailnet::event_log::parse_timestamp;
use trailnet::petri::TraceBounds;

use crate::error::CliError;

pub const ALPHABET_LIMIT_ENV: &str = "TRAILNET_ALPHABET_LIMIT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Review records (JSON lines) -> event-log CSV + metadata
    BuildLog,
    /// Event-log CSV -> footprint CSV
    Footprint,
    /// Event-log CSV -> workflow net JSON/DOT + intermediates JSON
    Mine,
    /// Event-log CSV (handover) or review records (review) -> social graph
    Social,
    /// Net JSON -> event-log CSV of complete firing sequences
    Simulate,
    /// Net JSON -> DOT, canonical JSON or arc-list CSV
    Export,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Artifact,
    Thread,
    Topic,
    Commit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Handover,
    Review,
}

#[derive(Debug, Parser)]
#[command(name = "trailnet", version, about = "Process mining over code-review activity")]
pub struct Args {
    pub command: Command,
    #[arg(long)]
    pub input: PathBuf,
    /// Directory receiving the artifacts (created if missing)
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    /// Period length in seconds for `--strategy commit`
    #[arg(long)]
    pub commit_window: Option<u64>,
    /// Keep records at or after this instant (YYYY-MM-DDThh:mm:ssZ)
    #[arg(long)]
    pub from: Option<String>,
    /// Keep records at or before this instant (YYYY-MM-DDThh:mm:ssZ)
    #[arg(long)]
    pub to: Option<String>,
    #[arg(long)]
    pub max_length: Option<usize>,
    #[arg(long)]
    pub max_traces: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub metric: Option<Metric>,
    /// JSON array of {keyword, verb, level?} rules for build-log
    #[arg(long)]
    pub verbs: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

/// Validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub output: PathBuf,
    pub strategy: Option<CaseStrategy>,
    pub window: Option<Window>,
    pub bounds: TraceBounds,
    pub format: Option<Format>,
    pub metric: Metric,
    pub verbs: Option<PathBuf>,
    pub alphabet_limit: usize,
}

pub const DEFAULT_BOUNDS: TraceBounds = TraceBounds {
    max_length: 32,
    max_traces: 10_000,
};

fn reject(present: bool, flag: &str, command: Command) -> Result<(), CliError> {
    if present {
        let name = command.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
        return Err(CliError::config(format!("{flag} is not accepted by {name}")));
    }
    Ok(())
}

fn instant(flag: &str, value: &Option<String>) -> Result<Option<DateTime<Utc>>, CliError> {
    value
        .as_deref()
        .map(|v| {
            parse_timestamp(v)
                .ok_or_else(|| CliError::config(format!("{flag} `{v}` is not YYYY-MM-DDThh:mm:ssZ")))
        })
        .transpose()
}

impl RunConfig {
    /// Checks flag combinations and paths. `alphabet_limit` is the raw value
    /// of the environment override, if set.
    pub fn from_args(args: Args, alphabet_limit: Option<&str>) -> Result<Self, CliError> {
        let cmd = args.command;
        let is = |c: Command| cmd == c;

        reject(!is(Command::BuildLog) && args.strategy.is_some(), "--strategy", cmd)?;
        reject(!is(Command::BuildLog) && args.commit_window.is_some(), "--commit-window", cmd)?;
        reject(!is(Command::BuildLog) && args.verbs.is_some(), "--verbs", cmd)?;
        reject(!is(Command::BuildLog) && (args.from.is_some() || args.to.is_some()), "--from/--to", cmd)?;
        reject(
            !is(Command::Simulate) && (args.max_length.is_some() || args.max_traces.is_some()),
            "--max-length/--max-traces",
            cmd,
        )?;
        reject(!is(Command::Social) && args.metric.is_some(), "--metric", cmd)?;

        let format_ok = match (cmd, args.format) {
            (_, None) => true,
            (Command::BuildLog | Command::Footprint | Command::Simulate, Some(f)) => f == Format::Csv,
            (Command::Mine | Command::Social, Some(f)) => f != Format::Csv,
            (Command::Export, Some(_)) => true,
        };
        if !format_ok {
            return Err(CliError::config("--format is not available for this command"));
        }
        if is(Command::Export) && args.format.is_none() {
            return Err(CliError::config("export requires --format"));
        }

        let strategy = match (cmd, args.strategy, args.commit_window) {
            (Command::BuildLog, None, _) => {
                return Err(CliError::config("build-log requires --strategy"));
            }
            (Command::BuildLog, Some(StrategyArg::Commit), None) => {
                return Err(CliError::config("--strategy commit requires --commit-window"));
            }
            (Command::BuildLog, Some(StrategyArg::Commit), Some(secs)) => Some(
                CaseStrategy::commit_window(Duration::from_secs(secs))
                    .map_err(|e| CliError::config(e.to_string()))?,
            ),
            (Command::BuildLog, Some(_), Some(_)) => {
                return Err(CliError::config("--commit-window only applies to --strategy commit"));
            }
            (_, Some(StrategyArg::Artifact), None) => Some(CaseStrategy::ByArtifact),
            (_, Some(StrategyArg::Thread), None) => Some(CaseStrategy::ByThread),
            (_, Some(StrategyArg::Topic), None) => Some(CaseStrategy::ByTopic),
            _ => None,
        };

        let from = instant("--from", &args.from)?;
        let to = instant("--to", &args.to)?;
        let window = match (from, to) {
            (None, None) => None,
            (Some(start), Some(end)) => {
                if start > end {
                    return Err(CliError::config("--from is after --to"));
                }
                Some(Window { start, end })
            }
            _ => return Err(CliError::config("--from and --to must be given together")),
        };

        let bounds = TraceBounds::new(
            args.max_length.unwrap_or(DEFAULT_BOUNDS.max_length),
            args.max_traces.unwrap_or(DEFAULT_BOUNDS.max_traces),
        );
        if bounds.max_traces == 0 {
            return Err(CliError::config("--max-traces must be positive"));
        }

        let alphabet_limit = match alphabet_limit {
            None => DEFAULT_ALPHABET_LIMIT,
            Some(raw) => raw.trim().parse().map_err(|_| {
                CliError::config(format!("{ALPHABET_LIMIT_ENV}=`{raw}` is not a non-negative integer"))
            })?,
        };

        if !args.input.is_file() {
            return Err(CliError::config(format!("input `{}` is not a readable file", args.input.display())));
        }
        if args.output.exists() && !args.output.is_dir() {
            return Err(CliError::config(format!("output `{}` exists and is not a directory", args.output.display())));
        }
        if let Some(verbs) = &args.verbs {
            if !verbs.is_file() {
                return Err(CliError::config(format!("verb mapping `{}` is not a readable file", verbs.display())));
            }
        }

        Ok(RunConfig {
            command: cmd,
            input: args.input,
            output: args.output,
            strategy,
            window,
            bounds,
            format: args.format,
            metric: args.metric.unwrap_or(Metric::Handover),
            verbs: args.verbs,
            alphabet_limit,
        })
    }
}
