//! Event-log data model (process → case → event) and the CSV interchange format.
//!
//! One [`EventLog`] corresponds to one process. Each [`Trace`] is a case, i.e. a
//! process instance, holding its events in execution order.
//!
//! The CSV format has the fixed header `case_id,activity,originator,timestamp`.
//! The last two columns may be empty. Timestamps use `YYYY-MM-DDThh:mm:ssZ`.

use std::collections::{BTreeSet, HashMap};
use std::io::Read;

use chrono::{DateTime, NaiveDateTime, Utc};
use thiserror::Error;

/// Exact header line of the CSV event-log format.
pub const CSV_HEADER: [&str; 4] = ["case_id", "activity", "originator", "timestamp"];

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogError {
    #[error("line {line}: malformed CSV row: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("line {line}: expected header `case_id,activity,originator,timestamp`")]
    BadHeader { line: u64 },
    #[error("line {line}: empty {field}")]
    EmptyField { line: u64, field: &'static str },
    #[error("line {line}: unparseable timestamp `{value}` (expected YYYY-MM-DDThh:mm:ssZ)")]
    BadTimestamp { line: u64, value: String },
    #[error("event has an empty {0}")]
    InvalidEvent(&'static str),
    #[error("trace `{0}` has no events")]
    EmptyTrace(String),
    #[error("event for case `{found}` placed in trace `{expected}`")]
    CaseMismatch { expected: String, found: String },
    #[error("duplicate case id `{0}`")]
    DuplicateCase(String),
    #[error("I/O error: {0}")]
    Io(String),
}

/// Formats an instant in the log's canonical second-precision form.
pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

/// Parses `YYYY-MM-DDThh:mm:ssZ`. Returns `None` for anything else.
pub fn parse_timestamp(value: &str) -> Option<DateTime<Utc>> {
    NaiveDateTime::parse_from_str(value, TIMESTAMP_FORMAT)
        .ok()
        .map(|naive| naive.and_utc())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    case_id: String,
    activity: String,
    originator: Option<String>,
    timestamp: Option<DateTime<Utc>>,
}

impl Event {
    pub fn new(
        case_id: impl Into<String>,
        activity: impl Into<String>,
        originator: Option<String>,
        timestamp: Option<DateTime<Utc>>,
    ) -> Result<Self, LogError> {
        let case_id = case_id.into();
        let activity = activity.into();
        if case_id.is_empty() {
            return Err(LogError::InvalidEvent("case_id"));
        }
        if activity.is_empty() {
            return Err(LogError::InvalidEvent("activity"));
        }
        Ok(Self {
            case_id,
            activity,
            // an empty originator column means "no originator"
            originator: originator.filter(|o| !o.is_empty()),
            timestamp: timestamp.map(truncate_to_seconds),
        })
    }

    pub fn case_id(&self) -> &str {
        &self.case_id
    }

    pub fn activity(&self) -> &str {
        &self.activity
    }

    pub fn originator(&self) -> Option<&str> {
        self.originator.as_deref()
    }

    pub fn timestamp(&self) -> Option<DateTime<Utc>> {
        self.timestamp
    }
}

fn truncate_to_seconds(ts: DateTime<Utc>) -> DateTime<Utc> {
    DateTime::from_timestamp(ts.timestamp(), 0).unwrap_or(ts)
}

/// The events of one case, in execution order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    case_id: String,
    events: Vec<Event>,
}

impl Trace {
    /// Builds a trace. When every event carries a timestamp the events are
    /// stably sorted by it; otherwise the given order is kept.
    pub fn new(case_id: impl Into<String>, mut events: Vec<Event>) -> Result<Self, LogError> {
        let case_id = case_id.into();
        if case_id.is_empty() {
            return Err(LogError::InvalidEvent("case_id"));
        }
        if events.is_empty() {
            return Err(LogError::EmptyTrace(case_id));
        }
        if let Some(bad) = events.iter().find(|e| e.case_id != case_id) {
            return Err(LogError::CaseMismatch {
                expected: case_id,
                found: bad.case_id.clone(),
            });
        }
        if events.iter().all(|e| e.timestamp.is_some()) {
            events.sort_by_key(|e| e.timestamp);
        }
        Ok(Self { case_id, events })
    }

    pub fn case_id(&self) -> &str {
        &self.case_id
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn activities(&self) -> impl Iterator<Item = &str> + '_ {
        self.events.iter().map(|e| e.activity.as_str())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// A workflow log over the activity alphabet of its traces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    traces: Vec<Trace>,
    alphabet: BTreeSet<String>,
}

impl EventLog {
    pub fn new(traces: Vec<Trace>) -> Result<Self, LogError> {
        let mut seen = BTreeSet::new();
        for trace in &traces {
            if !seen.insert(trace.case_id.as_str()) {
                return Err(LogError::DuplicateCase(trace.case_id.clone()));
            }
        }
        let alphabet = traces
            .iter()
            .flat_map(|t| t.activities().map(str::to_owned))
            .collect();
        Ok(Self { traces, alphabet })
    }

    /// Builds an untimed log from plain activity sequences. Case ids are
    /// `1`, `2`, … in the given order.
    pub fn from_sequences<I, S, A>(sequences: I) -> Result<Self, LogError>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = A>,
        A: Into<String>,
    {
        let traces = sequences
            .into_iter()
            .enumerate()
            .map(|(idx, seq)| {
                let case_id = (idx + 1).to_string();
                let events = seq
                    .into_iter()
                    .map(|a| Event::new(case_id.clone(), a, None, None))
                    .collect::<Result<Vec<_>, _>>()?;
                Trace::new(case_id, events)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(traces)
    }

    /// Shorthand for single-character activity names: `["ABCD", "AED"]`.
    pub fn from_compact(words: &[&str]) -> Result<Self, LogError> {
        Self::from_sequences(
            words
                .iter()
                .map(|w| w.chars().map(String::from).collect::<Vec<_>>()),
        )
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn event_count(&self) -> usize {
        self.traces.iter().map(Trace::len).sum()
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> + '_ {
        self.traces.iter().flat_map(|t| t.events.iter())
    }
}

/// One activity sequence per trace, in log order. Duplicates are kept.
pub fn simplify(log: &EventLog) -> Vec<Vec<String>> {
    log.traces
        .iter()
        .map(|t| t.activities().map(str::to_owned).collect())
        .collect()
}

/// The set of activities occurring in at least one trace.
pub fn alphabet(log: &EventLog) -> BTreeSet<String> {
    log.alphabet.clone()
}

/// Parses the CSV interchange format.
///
/// Events are grouped by case id in order of first appearance, keeping file
/// order inside a case; cases whose events are all timestamped are then
/// stably sorted by timestamp.
pub fn parse_csv_log<R: Read>(input: R) -> Result<EventLog, LogError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(input);

    let mut order: Vec<String> = Vec::new();
    let mut grouped: HashMap<String, Vec<Event>> = HashMap::new();
    let mut record = csv::StringRecord::new();
    let mut header_seen = false;

    loop {
        let more = reader.read_record(&mut record).map_err(|e| csv_error(&e))?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, csv::Position::line);
        if !header_seen {
            if record.iter().ne(CSV_HEADER.iter().copied()) {
                return Err(LogError::BadHeader { line });
            }
            header_seen = true;
            continue;
        }
        let case_id = &record[0];
        let activity = &record[1];
        if case_id.is_empty() {
            return Err(LogError::EmptyField { line, field: "case_id" });
        }
        if activity.is_empty() {
            return Err(LogError::EmptyField { line, field: "activity" });
        }
        let originator = Some(record[2].to_owned()).filter(|o| !o.is_empty());
        let timestamp = match &record[3] {
            "" => None,
            raw => Some(parse_timestamp(raw).ok_or_else(|| LogError::BadTimestamp {
                line,
                value: raw.to_owned(),
            })?),
        };
        let event = Event::new(case_id, activity, originator, timestamp)?;
        grouped
            .entry(case_id.to_owned())
            .or_insert_with(|| {
                order.push(case_id.to_owned());
                Vec::new()
            })
            .push(event);
    }
    if !header_seen {
        return Err(LogError::BadHeader { line: 1 });
    }

    let traces = order
        .into_iter()
        .map(|case_id| {
            let events = grouped.remove(&case_id).unwrap_or_default();
            Trace::new(case_id, events)
        })
        .collect::<Result<Vec<_>, _>>()?;
    EventLog::new(traces)
}

pub fn parse_csv_str(text: &str) -> Result<EventLog, LogError> {
    parse_csv_log(text.as_bytes())
}

fn csv_error(err: &csv::Error) -> LogError {
    let line = err.position().map_or(0, csv::Position::line);
    match err.kind() {
        csv::ErrorKind::Io(io) => LogError::Io(io.to_string()),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => LogError::MalformedRow {
            line,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        csv::ErrorKind::Utf8 { .. } => LogError::MalformedRow {
            line,
            message: "invalid UTF-8".to_owned(),
        },
        other => LogError::MalformedRow {
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Serializes a log to CSV with `\n` line endings, traces in log order.
pub fn write_csv_log(log: &EventLog) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    // writing into a Vec cannot fail
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for event in log.events() {
        let ts = event.timestamp.as_ref().map(format_timestamp).unwrap_or_default();
        writer
            .write_record([
                event.case_id.as_str(),
                event.activity.as_str(),
                event.originator.as_deref().unwrap_or(""),
                ts.as_str(),
            ])
            .expect("in-memory write");
    }
    let bytes = writer.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("CSV writer emits UTF-8 for UTF-8 input")
}
