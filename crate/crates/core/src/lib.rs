//! Process mining over code-review activity.
//!
//! The pipeline runs from review records to an event log ([`act_trace`]),
//! through the ordering relations of the log ([`relations`]) to a discovered
//! workflow net ([`alpha`]). Mined nets can be checked with the token game in
//! [`petri`], and [`social`] derives who-works-with-whom graphs from the same
//! inputs.

pub mod act_trace;
pub mod alpha;
pub mod event_log;
pub mod petri;
pub mod relations;
pub mod social;

pub use alpha::{alpha, AlphaError, AlphaIntermediates, AlphaMiner, PlacePair};
pub use event_log::{parse_csv_log, write_csv_log, Event, EventLog, LogError, Trace};
pub use petri::{Marking, NetError, ReplayResult, WorkflowNet};
pub use relations::{direct_succession, footprint, FootprintMatrix, OrderingRelation};
