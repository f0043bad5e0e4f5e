//! Social graphs over the people in a log.
//!
//! [`handover_of_work`] links consecutive distinct originators inside a case.
//! [`review_relation`] links each reviewer to the submitter whose code they
//! commented on. Both produce raw counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::ser::SerializeStruct;
use serde::Serialize;
use thiserror::Error;

use crate::act_trace::ReviewRecord;
use crate::event_log::EventLog;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SocialError {
    #[error("event {position} of case `{case_id}` has no originator")]
    MissingOriginator { case_id: String, position: usize },
}

/// Weighted directed graph over person names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SocialGraph {
    nodes: BTreeSet<String>,
    edges: BTreeMap<(String, String), u64>,
}

impl SocialGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: &str) {
        if !self.nodes.contains(name) {
            self.nodes.insert(name.to_owned());
        }
    }

    /// Adds `weight` to the edge `from -> to`, creating both nodes. Zero
    /// weights only register the nodes.
    pub fn add_edge(&mut self, from: &str, to: &str, weight: u64) {
        self.add_node(from);
        self.add_node(to);
        if weight > 0 {
            *self.edges.entry((from.to_owned(), to.to_owned())).or_insert(0) += weight;
        }
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<(String, String), u64> {
        &self.edges
    }

    pub fn weight(&self, from: &str, to: &str) -> u64 {
        self.edges
            .get(&(from.to_owned(), to.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Adds every node and edge weight of `other` into `self`.
    pub fn merge(&mut self, other: &SocialGraph) {
        for node in &other.nodes {
            self.add_node(node);
        }
        for ((from, to), w) in &other.edges {
            self.add_edge(from, to, *w);
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("graph serializes");
        out.push('\n');
        out
    }
}

impl Serialize for SocialGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let edges: Vec<(&str, &str, u64)> = self
            .edges
            .iter()
            .map(|((f, t), w)| (f.as_str(), t.as_str(), *w))
            .collect();
        let mut st = serializer.serialize_struct("SocialGraph", 2)?;
        st.serialize_field("nodes", &self.nodes)?;
        st.serialize_field("edges", &edges)?;
        st.end()
    }
}

pub fn handover_of_work(log: &EventLog) -> Result<SocialGraph, SocialError> {
    let mut graph = SocialGraph::new();
    for trace in log.traces() {
        let originators = trace
            .events()
            .iter()
            .enumerate()
            .map(|(position, e)| {
                e.originator().ok_or_else(|| SocialError::MissingOriginator {
                    case_id: trace.case_id().to_owned(),
                    position,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        for who in &originators {
            graph.add_node(who);
        }
        for pair in originators.windows(2) {
            if pair[0] != pair[1] {
                graph.add_edge(pair[0], pair[1], 1);
            }
        }
    }
    Ok(graph)
}

/// Reviewer → submitter edges, one unit per comment. Self-reviews and
/// records without a submitter only add nodes.
pub fn review_relation(records: &[ReviewRecord]) -> SocialGraph {
    let mut graph = SocialGraph::new();
    for r in records {
        graph.add_node(&r.reviewer);
        if r.submitter.is_empty() {
            continue;
        }
        let weight = u64::from(r.reviewer != r.submitter);
        graph.add_edge(&r.reviewer, &r.submitter, weight);
    }
    graph
}

fn quoted(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph with one node per person and edges labelled by weight.
pub fn graph_to_dot(graph: &SocialGraph) -> String {
    let mut out = String::from("digraph social {\n    node [shape=ellipse];\n");
    for node in &graph.nodes {
        let _ = writeln!(out, "    {};", quoted(node));
    }
    for ((from, to), weight) in &graph.edges {
        let _ = writeln!(
            out,
            "    {} -> {} [label=\"{weight}\", weight={weight}];",
            quoted(from),
            quoted(to)
        );
    }
    out.push_str("}\n");
    out
}
