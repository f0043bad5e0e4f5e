//! Act-Trace: turning code-review comments into an event log.
//!
//! Each review comment becomes one event. Comments are grouped into cases by
//! a [`CaseStrategy`]; inside a case the reviewer with the earliest comment is
//! the initiator and every other reviewer is a responder. The role is a
//! property of the person within the case, so all comments of the initiator
//! carry the initiator activity.
//!
//! Review input is JSON lines:
//!
//! ```text
//! {"artifact_id":"I42","submitter":"ann","reviewer":"bob","comment":"nit","timestamp":"2012-05-03T10:00:00Z"}
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event_log::{format_timestamp, Event, EventLog, LogError, Trace};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActTraceError {
    #[error("no review records")]
    EmptyInput,
    #[error("record {index}: missing {field} required by the {strategy} strategy")]
    MissingGroupingKey {
        index: usize,
        field: &'static str,
        strategy: String,
    },
    #[error("line {line}: {message}")]
    BadRecord { line: usize, message: String },
    #[error("window start {start} is after end {end}")]
    InvertedWindow { start: String, end: String },
    #[error("commit window must be at least one second")]
    ZeroWindow,
    #[error("unknown case strategy `{0}`")]
    UnknownStrategy(String),
    #[error("case `{0}` has an event without a timestamp")]
    Untimestamped(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Log(#[from] LogError),
}

/// One review comment on a code artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub artifact_id: String,
    #[serde(default)]
    pub submitter: String,
    pub reviewer: String,
    #[serde(default)]
    pub comment: String,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thread_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
}

impl ReviewRecord {
    pub fn new(
        artifact_id: impl Into<String>,
        submitter: impl Into<String>,
        reviewer: impl Into<String>,
        comment: impl Into<String>,
        timestamp: DateTime<Utc>,
    ) -> Self {
        Self {
            artifact_id: artifact_id.into(),
            submitter: submitter.into(),
            reviewer: reviewer.into(),
            comment: comment.into(),
            timestamp,
            thread_id: None,
            topic: None,
        }
    }

    pub fn with_thread(mut self, thread_id: impl Into<String>) -> Self {
        self.thread_id = Some(thread_id.into());
        self
    }

    pub fn with_topic(mut self, topic: impl Into<String>) -> Self {
        self.topic = Some(topic.into());
        self
    }
}

/// Reads JSON-lines review records. Blank lines are skipped. Timestamps are
/// RFC 3339 instants and are normalized to UTC.
pub fn parse_review_records<R: BufRead>(input: R) -> Result<Vec<ReviewRecord>, ActTraceError> {
    let mut records = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| ActTraceError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ReviewRecord =
            serde_json::from_str(&line).map_err(|e| ActTraceError::BadRecord {
                line: line_no,
                message: e.to_string(),
            })?;
        for (field, value) in [("artifact_id", &record.artifact_id), ("reviewer", &record.reviewer)] {
            if value.is_empty() {
                return Err(ActTraceError::BadRecord {
                    line: line_no,
                    message: format!("empty {field}"),
                });
            }
        }
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Initiator,
    Responder,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Initiator => "initiator",
            Role::Responder => "responder",
        }
    }
}

/// How review records are grouped into cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseStrategy {
    /// One case per reviewed file or change.
    ByArtifact,
    /// One case per discussion thread.
    ByThread,
    /// One case per subject line.
    ByTopic,
    /// One case per submitter and fixed-length period; periods are aligned
    /// to the Unix epoch.
    ByCommit { window: Duration },
}

impl CaseStrategy {
    pub fn commit_window(window: Duration) -> Result<Self, ActTraceError> {
        if window.as_secs() == 0 {
            return Err(ActTraceError::ZeroWindow);
        }
        Ok(CaseStrategy::ByCommit { window })
    }

    fn key_field(&self) -> &'static str {
        match self {
            CaseStrategy::ByArtifact => "artifact_id",
            CaseStrategy::ByThread => "thread_id",
            CaseStrategy::ByTopic => "topic",
            CaseStrategy::ByCommit { .. } => "submitter",
        }
    }

    fn case_key(&self, record: &ReviewRecord) -> Option<String> {
        let non_empty = |s: &str| Some(s.to_owned()).filter(|s| !s.is_empty());
        match self {
            CaseStrategy::ByArtifact => non_empty(&record.artifact_id),
            CaseStrategy::ByThread => record.thread_id.as_deref().and_then(non_empty),
            CaseStrategy::ByTopic => record.topic.as_deref().and_then(non_empty),
            CaseStrategy::ByCommit { window } => {
                let submitter = non_empty(&record.submitter)?;
                let secs = window.as_secs().max(1) as i64;
                let start = record.timestamp.timestamp().div_euclid(secs) * secs;
                let start = DateTime::from_timestamp(start, 0)?;
                Some(format!("{submitter}@{}", format_timestamp(&start)))
            }
        }
    }
}

impl fmt::Display for CaseStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseStrategy::ByArtifact => f.write_str("artifact"),
            CaseStrategy::ByThread => f.write_str("thread"),
            CaseStrategy::ByTopic => f.write_str("topic"),
            CaseStrategy::ByCommit { window } => write!(f, "commit:{}s", window.as_secs()),
        }
    }
}

impl FromStr for CaseStrategy {
    type Err = ActTraceError;

    /// Accepts `artifact`, `thread`, `topic` and `commit:<seconds>s`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "artifact" => Ok(CaseStrategy::ByArtifact),
            "thread" => Ok(CaseStrategy::ByThread),
            "topic" => Ok(CaseStrategy::ByTopic),
            other => {
                let secs = other
                    .strip_prefix("commit:")
                    .and_then(|rest| rest.strip_suffix('s'))
                    .and_then(|n| n.parse::<u64>().ok())
                    .ok_or_else(|| ActTraceError::UnknownStrategy(other.to_owned()))?;
                CaseStrategy::commit_window(Duration::from_secs(secs))
            }
        }
    }
}

/// Stage of the collaboration a verb belongs to. Informational only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceabilityLevel {
    Initiation,
    Progression,
    Maturation,
}

/// Renames the action part of an activity when a comment contains `keyword`
/// (ASCII case-insensitive). A comment containing "revert" from a responder
/// becomes `revert:responder` instead of `review:responder`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbRule {
    pub keyword: String,
    pub verb: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<TraceabilityLevel>,
}

/// Ordered keyword rules; the first match wins.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VerbMapping {
    rules: Vec<VerbRule>,
}

impl VerbMapping {
    pub fn new(rules: Vec<VerbRule>) -> Self {
        Self { rules }
    }

    pub fn rules(&self) -> &[VerbRule] {
        &self.rules
    }

    pub fn verb_for(&self, comment: &str) -> &str {
        let lowered = comment.to_ascii_lowercase();
        self.rules
            .iter()
            .find(|r| !r.keyword.is_empty() && lowered.contains(&r.keyword.to_ascii_lowercase()))
            .map_or("review", |r| r.verb.as_str())
    }
}

/// Activity name for a role, e.g. `review:initiator`.
pub fn activity_name(verb: &str, role: Role) -> String {
    format!("{verb}:{}", role.as_str())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimeWindow {
    #[serde(serialize_with = "serialize_instant")]
    pub start: DateTime<Utc>,
    #[serde(serialize_with = "serialize_instant")]
    pub end: DateTime<Utc>,
}

fn serialize_instant<S: serde::Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_timestamp(ts))
}

/// Provenance written next to a built log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceLogMetadata {
    pub strategy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub window: Option<TimeWindow>,
    pub record_count: usize,
}

impl TraceLogMetadata {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("metadata serializes");
        out.push('\n');
        out
    }
}

/// The event log produced by Act-Trace plus its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLog {
    pub log: EventLog,
    pub metadata: TraceLogMetadata,
}

impl TraceLog {
    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.metadata.source = Some(source.into());
        self
    }

    pub fn with_window(mut self, start: DateTime<Utc>, end: DateTime<Utc>) -> Self {
        self.metadata.window = Some(TimeWindow { start, end });
        self
    }
}

/// Act-Trace with an explicit case strategy and optional verb mapping.
#[derive(Debug, Clone)]
pub struct ActTrace {
    strategy: CaseStrategy,
    verbs: VerbMapping,
}

impl ActTrace {
    pub fn new(strategy: CaseStrategy) -> Self {
        Self {
            strategy,
            verbs: VerbMapping::default(),
        }
    }

    pub fn with_verbs(mut self, verbs: VerbMapping) -> Self {
        self.verbs = verbs;
        self
    }

    pub fn build(&self, records: &[ReviewRecord]) -> Result<TraceLog, ActTraceError> {
        if records.is_empty() {
            return Err(ActTraceError::EmptyInput);
        }

        let mut cases: BTreeMap<String, Vec<&ReviewRecord>> = BTreeMap::new();
        for (index, record) in records.iter().enumerate() {
            let key = self
                .strategy
                .case_key(record)
                .ok_or_else(|| ActTraceError::MissingGroupingKey {
                    index,
                    field: self.strategy.key_field(),
                    strategy: self.strategy.to_string(),
                })?;
            cases.entry(key).or_default().push(record);
        }

        let traces = cases
            .into_iter()
            .map(|(case_id, mut group)| {
                group.sort_by_key(|r| r.timestamp);
                let initiator = group[0].reviewer.as_str();
                let events = group
                    .iter()
                    .map(|r| {
                        let role = if r.reviewer == initiator {
                            Role::Initiator
                        } else {
                            Role::Responder
                        };
                        let activity = activity_name(self.verbs.verb_for(&r.comment), role);
                        Event::new(
                            case_id.clone(),
                            activity,
                            Some(r.reviewer.clone()),
                            Some(r.timestamp),
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Trace::new(case_id, events)?)
            })
            .collect::<Result<Vec<_>, ActTraceError>>()?;

        Ok(TraceLog {
            log: EventLog::new(traces)?,
            metadata: TraceLogMetadata {
                strategy: self.strategy.to_string(),
                source: None,
                window: None,
                record_count: records.len(),
            },
        })
    }
}

/// Act-Trace with the core `review:initiator` / `review:responder` vocabulary.
pub fn build_log(records: &[ReviewRecord], strategy: CaseStrategy) -> Result<TraceLog, ActTraceError> {
    ActTrace::new(strategy).build(records)
}

/// Records with `start <= timestamp <= end`, in input order.
pub fn time_window_filter(
    records: &[ReviewRecord],
    start: DateTime<Utc>,
    end: DateTime<Utc>,
) -> Result<Vec<ReviewRecord>, ActTraceError> {
    if start > end {
        return Err(ActTraceError::InvertedWindow {
            start: format_timestamp(&start),
            end: format_timestamp(&end),
        });
    }
    Ok(records
        .iter()
        .filter(|r| (start..=end).contains(&r.timestamp))
        .cloned()
        .collect())
}

/// Gaps between consecutive events of every case.
pub fn durations(log: &EventLog) -> Result<BTreeMap<String, Vec<Duration>>, ActTraceError> {
    log.traces()
        .iter()
        .map(|trace| {
            let stamps = trace
                .events()
                .iter()
                .map(|e| e.timestamp())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| ActTraceError::Untimestamped(trace.case_id().to_owned()))?;
            let gaps = stamps
                .windows(2)
                .map(|w| (w[1] - w[0]).to_std().unwrap_or_default())
                .collect();
            Ok((trace.case_id().to_owned(), gaps))
        })
        .collect()
}

/// Role of each reviewer per case, read back from a built log.
pub fn roles_by_case(log: &EventLog) -> HashMap<String, BTreeMap<String, Role>> {
    log.traces()
        .iter()
        .map(|trace| {
            let roles = trace
                .events()
                .iter()
                .filter_map(|e| {
                    let role = if e.activity().ends_with(":initiator") {
                        Role::Initiator
                    } else if e.activity().ends_with(":responder") {
                        Role::Responder
                    } else {
                        return None;
                    };
                    Some((e.originator()?.to_owned(), role))
                })
                .collect();
            (trace.case_id().to_owned(), roles)
        })
        .collect()
}
