//! Workflow nets and the token game.
//!
//! Nets are ordinary (all arc weights are 1). A [`WorkflowNet`] has one
//! source place without incoming arcs and one sink place without outgoing
//! arcs. Firing, replay and trace generation all run on [`Marking`] values,
//! which are plain token-count maps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("arc `{0}` -> `{1}` does not connect a place and a transition")]
    NonBipartiteArc(String, String),
    #[error("arc endpoint `{0}` is neither a place nor a transition")]
    UnknownNode(String),
    #[error("`{0}` is both a place and a transition")]
    NameClash(String),
    #[error("source place `{0}` is missing or has incoming arcs")]
    BadSource(String),
    #[error("sink place `{0}` is missing or has outgoing arcs")]
    BadSink(String),
    #[error("source and sink must be distinct places")]
    SourceIsSink,
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("invalid net JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Default)]
struct Neighbourhood {
    inputs: BTreeSet<String>,
    outputs: BTreeSet<String>,
}

/// A workflow net `(P, T, F)` with distinguished source and sink places.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "NetDocument", into = "NetDocument")]
pub struct WorkflowNet {
    places: BTreeSet<String>,
    transitions: BTreeSet<String>,
    arcs: BTreeSet<(String, String)>,
    source: String,
    sink: String,
    // derived from `arcs`
    transition_io: BTreeMap<String, Neighbourhood>,
    place_io: BTreeMap<String, Neighbourhood>,
}

impl PartialEq for WorkflowNet {
    fn eq(&self, other: &Self) -> bool {
        self.places == other.places
            && self.transitions == other.transitions
            && self.arcs == other.arcs
            && self.source == other.source
            && self.sink == other.sink
    }
}

impl Eq for WorkflowNet {}

impl WorkflowNet {
    pub fn new(
        places: BTreeSet<String>,
        transitions: BTreeSet<String>,
        arcs: BTreeSet<(String, String)>,
        source: impl Into<String>,
        sink: impl Into<String>,
    ) -> Result<Self, NetError> {
        let source = source.into();
        let sink = sink.into();
        if let Some(clash) = places.intersection(&transitions).next() {
            return Err(NetError::NameClash(clash.clone()));
        }
        if source == sink {
            return Err(NetError::SourceIsSink);
        }

        let mut transition_io: BTreeMap<String, Neighbourhood> = transitions
            .iter()
            .map(|t| (t.clone(), Neighbourhood::default()))
            .collect();
        let mut place_io: BTreeMap<String, Neighbourhood> = places
            .iter()
            .map(|p| (p.clone(), Neighbourhood::default()))
            .collect();

        for (from, to) in &arcs {
            let from_place = places.contains(from);
            let to_place = places.contains(to);
            for node in [from, to] {
                if !places.contains(node) && !transitions.contains(node) {
                    return Err(NetError::UnknownNode(node.clone()));
                }
            }
            if from_place == to_place {
                return Err(NetError::NonBipartiteArc(from.clone(), to.clone()));
            }
            if from_place {
                transition_io.get_mut(to).expect("checked").inputs.insert(from.clone());
                place_io.get_mut(from).expect("checked").outputs.insert(to.clone());
            } else {
                transition_io.get_mut(from).expect("checked").outputs.insert(to.clone());
                place_io.get_mut(to).expect("checked").inputs.insert(from.clone());
            }
        }

        match place_io.get(&source) {
            Some(io) if io.inputs.is_empty() => {}
            _ => return Err(NetError::BadSource(source)),
        }
        match place_io.get(&sink) {
            Some(io) if io.outputs.is_empty() => {}
            _ => return Err(NetError::BadSink(sink)),
        }

        Ok(Self {
            places,
            transitions,
            arcs,
            source,
            sink,
            transition_io,
            place_io,
        })
    }

    pub fn places(&self) -> &BTreeSet<String> {
        &self.places
    }

    pub fn transitions(&self) -> &BTreeSet<String> {
        &self.transitions
    }

    pub fn arcs(&self) -> &BTreeSet<(String, String)> {
        &self.arcs
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn sink(&self) -> &str {
        &self.sink
    }

    /// Input places of a transition.
    pub fn preset(&self, transition: &str) -> Result<&BTreeSet<String>, NetError> {
        self.transition_io
            .get(transition)
            .map(|io| &io.inputs)
            .ok_or_else(|| NetError::UnknownTransition(transition.to_owned()))
    }

    /// Output places of a transition.
    pub fn postset(&self, transition: &str) -> Result<&BTreeSet<String>, NetError> {
        self.transition_io
            .get(transition)
            .map(|io| &io.outputs)
            .ok_or_else(|| NetError::UnknownTransition(transition.to_owned()))
    }

    /// `(input transitions, output transitions)` of a place.
    pub fn place_signature(&self, place: &str) -> Result<(&BTreeSet<String>, &BTreeSet<String>), NetError> {
        self.place_io
            .get(place)
            .map(|io| (&io.inputs, &io.outputs))
            .ok_or_else(|| NetError::UnknownPlace(place.to_owned()))
    }

    /// Transitions lacking input or output places. Such transitions can fire
    /// freely or swallow tokens, so mined nets containing them deserve a warning.
    pub fn dangling_transitions(&self) -> Vec<&str> {
        self.transition_io
            .iter()
            .filter(|(_, io)| io.inputs.is_empty() || io.outputs.is_empty())
            .map(|(t, _)| t.as_str())
            .collect()
    }

    pub fn initial_marking(&self) -> Marking {
        Marking::single(&self.source)
    }

    pub fn final_marking(&self) -> Marking {
        Marking::single(&self.sink)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&NetDocument::from(self.clone()))
            .expect("net document serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, NetError> {
        serde_json::from_str(text).map_err(|e| NetError::Json(e.to_string()))
    }
}

/// On-disk JSON layout of a net. All arrays are sorted.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetDocument {
    places: Vec<String>,
    transitions: Vec<String>,
    arcs: Vec<[String; 2]>,
    source: String,
    sink: String,
}

impl From<WorkflowNet> for NetDocument {
    fn from(net: WorkflowNet) -> Self {
        NetDocument {
            places: net.places.into_iter().collect(),
            transitions: net.transitions.into_iter().collect(),
            arcs: net.arcs.into_iter().map(|(a, b)| [a, b]).collect(),
            source: net.source,
            sink: net.sink,
        }
    }
}

impl TryFrom<NetDocument> for WorkflowNet {
    type Error = NetError;

    fn try_from(doc: NetDocument) -> Result<Self, Self::Error> {
        WorkflowNet::new(
            doc.places.into_iter().collect(),
            doc.transitions.into_iter().collect(),
            doc.arcs.into_iter().map(|[a, b]| (a, b)).collect(),
            doc.source,
            doc.sink,
        )
    }
}

/// Token counts per place. Places with zero tokens are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking {
    tokens: BTreeMap<String, u32>,
}

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(place: &str) -> Self {
        let mut m = Self::new();
        m.add(place, 1);
        m
    }

    pub fn tokens(&self, place: &str) -> u32 {
        self.tokens.get(place).copied().unwrap_or(0)
    }

    pub fn add(&mut self, place: &str, count: u32) {
        if count > 0 {
            *self.tokens.entry(place.to_owned()).or_insert(0) += count;
        }
    }

    /// Removes one token; returns false (and leaves the marking alone) when
    /// the place is empty.
    pub fn take(&mut self, place: &str) -> bool {
        match self.tokens.get_mut(place) {
            Some(count) => {
                *count -= 1;
                if *count == 0 {
                    self.tokens.remove(place);
                }
                true
            }
            None => false,
        }
    }

    pub fn total(&self) -> u64 {
        self.tokens.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.tokens.iter().map(|(p, &c)| (p.as_str(), c))
    }
}

impl<'a> FromIterator<(&'a str, u32)> for Marking {
    fn from_iter<I: IntoIterator<Item = (&'a str, u32)>>(iter: I) -> Self {
        let mut m = Marking::new();
        for (place, count) in iter {
            m.add(place, count);
        }
        m
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (i, (place, count)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{place}:{count}")?;
        }
        f.write_char('}')
    }
}

fn check_marking(net: &WorkflowNet, marking: &Marking) -> Result<(), NetError> {
    match marking.iter().find(|(p, _)| !net.places.contains(*p)) {
        Some((p, _)) => Err(NetError::UnknownPlace(p.to_owned())),
        None => Ok(()),
    }
}

fn is_enabled(net: &WorkflowNet, marking: &Marking, transition: &str) -> bool {
    net.transition_io[transition]
        .inputs
        .iter()
        .all(|p| marking.tokens(p) > 0)
}

/// Transitions whose every input place holds at least one token.
pub fn enabled(net: &WorkflowNet, marking: &Marking) -> Result<BTreeSet<String>, NetError> {
    check_marking(net, marking)?;
    Ok(net
        .transitions
        .iter()
        .filter(|t| is_enabled(net, marking, t))
        .cloned()
        .collect())
}

pub fn fire(net: &WorkflowNet, marking: &Marking, transition: &str) -> Result<Marking, NetError> {
    check_marking(net, marking)?;
    let io = net
        .transition_io
        .get(transition)
        .ok_or_else(|| NetError::UnknownTransition(transition.to_owned()))?;
    if !is_enabled(net, marking, transition) {
        return Err(NetError::NotEnabled(transition.to_owned()));
    }
    Ok(fire_unchecked(marking, io))
}

fn fire_unchecked(marking: &Marking, io: &Neighbourhood) -> Marking {
    let mut next = marking.clone();
    for p in &io.inputs {
        next.take(p);
    }
    for p in &io.outputs {
        next.add(p, 1);
    }
    next
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayResult {
    pub fits: bool,
    /// Tokens that had to be created so a transition could fire, plus one if
    /// the sink ended up empty.
    pub consumed_missing: u64,
    /// Tokens left anywhere except the sink after the trace.
    pub produced_remaining: u64,
    pub firing_sequence: Vec<String>,
    pub final_marking: Marking,
}

/// Token replay from `{source:1}`. Missing tokens are created and counted
/// instead of aborting.
pub fn replay<S: AsRef<str>>(net: &WorkflowNet, trace: &[S]) -> Result<ReplayResult, NetError> {
    let mut marking = net.initial_marking();
    let mut missing = 0u64;
    let mut firing_sequence = Vec::with_capacity(trace.len());

    for activity in trace {
        let activity = activity.as_ref();
        let io = net
            .transition_io
            .get(activity)
            .ok_or_else(|| NetError::UnknownTransition(activity.to_owned()))?;
        for p in &io.inputs {
            if !marking.take(p) {
                missing += 1;
            }
        }
        for p in &io.outputs {
            marking.add(p, 1);
        }
        firing_sequence.push(activity.to_owned());
    }

    let remaining = marking.total() - u64::from(marking.tokens(&net.sink));
    if marking.tokens(&net.sink) == 0 {
        missing += 1;
    }
    let fits = missing == 0 && remaining == 0 && marking == net.final_marking();
    Ok(ReplayResult {
        fits,
        consumed_missing: missing,
        produced_remaining: remaining,
        firing_sequence,
        final_marking: marking,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceBounds {
    pub max_length: usize,
    pub max_traces: usize,
}

impl TraceBounds {
    pub fn new(max_length: usize, max_traces: usize) -> Self {
        Self { max_length, max_traces }
    }
}

/// How a bounded trace search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// Every complete firing sequence was found within the bounds.
    Exhaustive,
    /// The search space was exhausted without reaching `{sink:1}`.
    NoCompleteSequence,
    /// Some branch still had enabled transitions at `max_length`.
    LengthBoundReached,
    /// `max_traces` sequences were collected before the search finished.
    TraceBoundReached,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Exhaustive => "exhaustive",
            SearchStatus::NoCompleteSequence => "no-complete-sequence",
            SearchStatus::LengthBoundReached => "length-bound-reached",
            SearchStatus::TraceBoundReached => "trace-bound-reached",
        }
    }

    pub fn bounds_exceeded(self) -> bool {
        matches!(self, SearchStatus::LengthBoundReached | SearchStatus::TraceBoundReached)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedTraces {
    pub traces: BTreeSet<Vec<String>>,
    pub status: SearchStatus,
}

/// Depth-first enumeration of complete firing sequences, i.e. those that
/// end in exactly `{sink:1}`.
pub fn generate_traces(net: &WorkflowNet, bounds: TraceBounds) -> GeneratedTraces {
    let mut search = Search {
        net,
        bounds,
        goal: net.final_marking(),
        traces: BTreeSet::new(),
        prefix: Vec::new(),
        cut_by_length: false,
        cut_by_count: false,
    };
    search.visit(&net.initial_marking());

    let status = if search.cut_by_count {
        SearchStatus::TraceBoundReached
    } else if search.cut_by_length {
        SearchStatus::LengthBoundReached
    } else if search.traces.is_empty() {
        SearchStatus::NoCompleteSequence
    } else {
        SearchStatus::Exhaustive
    };
    GeneratedTraces {
        traces: search.traces,
        status,
    }
}

struct Search<'a> {
    net: &'a WorkflowNet,
    bounds: TraceBounds,
    goal: Marking,
    traces: BTreeSet<Vec<String>>,
    prefix: Vec<String>,
    cut_by_length: bool,
    cut_by_count: bool,
}

impl Search<'_> {
    fn visit(&mut self, marking: &Marking) {
        if self.cut_by_count {
            return;
        }
        if *marking == self.goal {
            if self.traces.len() >= self.bounds.max_traces {
                self.cut_by_count = true;
                return;
            }
            self.traces.insert(self.prefix.clone());
            return;
        }
        let net = self.net;
        let mut any_enabled = false;
        for (t, io) in &net.transition_io {
            if !io.inputs.iter().all(|p| marking.tokens(p) > 0) {
                continue;
            }
            any_enabled = true;
            if self.prefix.len() >= self.bounds.max_length {
                break;
            }
            let next = fire_unchecked(marking, io);
            self.prefix.push(t.clone());
            self.visit(&next);
            self.prefix.pop();
            if self.cut_by_count {
                return;
            }
        }
        if any_enabled && self.prefix.len() >= self.bounds.max_length {
            self.cut_by_length = true;
        }
    }
}

/// Structural equality up to place names: same transitions, and the same
/// multiset of place signatures `(input transitions, output transitions)`.
/// The source and sink must also correspond.
pub fn isomorphic(a: &WorkflowNet, b: &WorkflowNet) -> bool {
    type Signature<'n> = (&'n BTreeSet<String>, &'n BTreeSet<String>);

    fn signatures(net: &WorkflowNet) -> BTreeMap<Signature<'_>, usize> {
        let mut counts = BTreeMap::new();
        for io in net.place_io.values() {
            *counts.entry((&io.inputs, &io.outputs)).or_insert(0) += 1;
        }
        counts
    }

    fn endpoint<'n>(net: &'n WorkflowNet, place: &str) -> Signature<'n> {
        let io = &net.place_io[place];
        (&io.inputs, &io.outputs)
    }

    a.transitions == b.transitions
        && a.places.len() == b.places.len()
        && endpoint(a, &a.source) == endpoint(b, &b.source)
        && endpoint(a, &a.sink) == endpoint(b, &b.sink)
        && signatures(a) == signatures(b)
}

fn dot_id(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 2);
    out.push('"');
    for c in name.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering: places as circles, transitions as boxes. The source is
/// filled and the sink drawn with a double border.
pub fn to_dot(net: &WorkflowNet) -> String {
    let mut out = String::new();
    out.push_str("digraph workflow_net {\n");
    out.push_str("    rankdir=LR;\n");
    for place in &net.places {
        let id = dot_id(place);
        let attrs = if *place == net.source {
            format!("shape=circle, label={id}, style=filled, fillcolor=\"#d9ead3\"")
        } else if *place == net.sink {
            format!("shape=circle, label={id}, peripheries=2")
        } else {
            format!("shape=circle, label=\"\", tooltip={id}, width=0.3")
        };
        let _ = writeln!(out, "    {id} [{attrs}];");
    }
    for transition in &net.transitions {
        let id = dot_id(transition);
        let _ = writeln!(out, "    {id} [shape=box, label={id}];");
    }
    for (from, to) in &net.arcs {
        let _ = writeln!(out, "    {} -> {};", dot_id(from), dot_id(to));
    }
    out.push_str("}\n");
    out
}
