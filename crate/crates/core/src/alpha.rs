//! The α-algorithm.
//!
//! Mining goes through the footprint: initial and final tasks give the arcs
//! out of the source and into the sink, and every maximal pair `(A, B)` of
//! causally connected, internally unrelated activity sets becomes one place
//! `p({A},{B})` with arcs from each `a ∈ A` and to each `b ∈ B`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::event_log::EventLog;
use crate::petri::{NetError, WorkflowNet};
use crate::relations::{footprint, FootprintMatrix, OrderingRelation};

/// Name of the source place of every mined net.
pub const SOURCE_PLACE: &str = "i_W";
/// Name of the sink place of every mined net.
pub const SINK_PLACE: &str = "o_W";
/// Largest alphabet mined unless configured otherwise.
pub const DEFAULT_ALPHABET_LIMIT: usize = 16;

pub type ActivitySet = BTreeSet<String>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphaError {
    #[error("cannot mine an empty log")]
    EmptyLog,
    #[error("alphabet has {size} activities, above the limit of {limit}")]
    AlphabetTooLarge { size: usize, limit: usize },
    #[error("activity `{0}` collides with a place name")]
    NameCollision(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// A candidate place: every activity in `inputs` causes every activity in
/// `outputs`, and neither side contains two activities that follow each other.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlacePair {
    pub inputs: ActivitySet,
    pub outputs: ActivitySet,
}

impl PlacePair {
    pub fn new<I, O, S>(inputs: I, outputs: O) -> Self
    where
        I: IntoIterator<Item = S>,
        O: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            inputs: inputs.into_iter().map(Into::into).collect(),
            outputs: outputs.into_iter().map(Into::into).collect(),
        }
    }

    /// Canonical place name, e.g. `p({A},{B,E})`.
    pub fn place_name(&self) -> String {
        let join = |set: &ActivitySet| set.iter().map(String::as_str).collect::<Vec<_>>().join(",");
        format!("p({{{}}},{{{}}})", join(&self.inputs), join(&self.outputs))
    }

    /// True when both sides of `self` are contained in those of `other`.
    pub fn is_covered_by(&self, other: &PlacePair) -> bool {
        self.inputs.is_subset(&other.inputs) && self.outputs.is_subset(&other.outputs)
    }
}

impl Serialize for PlacePair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.inputs, &self.outputs).serialize(serializer)
    }
}

/// Intermediate sets of a mining run, exposed for inspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaIntermediates {
    #[serde(rename = "T_W")]
    pub t_w: ActivitySet,
    #[serde(rename = "T_I")]
    pub t_i: ActivitySet,
    #[serde(rename = "T_O")]
    pub t_o: ActivitySet,
    #[serde(rename = "X_W")]
    pub x_w: BTreeSet<PlacePair>,
    #[serde(rename = "Y_W")]
    pub y_w: BTreeSet<PlacePair>,
}

impl AlphaIntermediates {
    /// Pretty JSON with keys `T_W`, `T_I`, `T_O`, `X_W`, `Y_W`; all members sorted.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("intermediates serialize");
        out.push('\n');
        out
    }
}

/// First activity of every trace.
pub fn initial_tasks(log: &EventLog) -> Result<ActivitySet, AlphaError> {
    boundary_tasks(log, |t| t.activities().next())
}

/// Last activity of every trace.
pub fn final_tasks(log: &EventLog) -> Result<ActivitySet, AlphaError> {
    boundary_tasks(log, |t| t.activities().last())
}

fn boundary_tasks<'a>(
    log: &'a EventLog,
    pick: impl Fn(&'a crate::event_log::Trace) -> Option<&'a str>,
) -> Result<ActivitySet, AlphaError> {
    if log.is_empty() {
        return Err(AlphaError::EmptyLog);
    }
    // traces are non-empty by construction
    Ok(log.traces().iter().filter_map(pick).map(str::to_owned).collect())
}

/// All pairs `(A, B)` of non-empty activity sets with `a → b` for every
/// `a ∈ A, b ∈ B` and `#` between any two members of the same side
/// (including each member with itself).
///
/// Only activities with an outgoing causal cell can appear in `A`. Each
/// growing `A` narrows the common successor set from which `B` is drawn,
/// and a branch is dropped as soon as that set is empty.
pub fn candidate_pairs(matrix: &FootprintMatrix) -> BTreeSet<PlacePair> {
    let n = matrix.len();
    let unrelated = |i: usize, j: usize| matrix.at(i, j) == OrderingRelation::Unrelated;
    let causal = |i: usize, j: usize| matrix.at(i, j) == OrderingRelation::CausalForward;

    let successors: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| causal(i, j) && unrelated(j, j)).collect())
        .collect();
    let sources: Vec<usize> = (0..n)
        .filter(|&i| unrelated(i, i) && !successors[i].is_empty())
        .collect();

    let mut pairs = BTreeSet::new();
    let mut chosen = Vec::new();
    grow_inputs(matrix, &sources, &successors, 0, &mut chosen, None, &mut pairs);
    pairs
}

fn grow_inputs(
    matrix: &FootprintMatrix,
    sources: &[usize],
    successors: &[Vec<usize>],
    from: usize,
    chosen: &mut Vec<usize>,
    common: Option<&[usize]>,
    out: &mut BTreeSet<PlacePair>,
) {
    for k in from..sources.len() {
        let a = sources[k];
        if chosen
            .iter()
            .any(|&c| matrix.at(c, a) != OrderingRelation::Unrelated)
        {
            continue;
        }
        let narrowed: Vec<usize> = match common {
            None => successors[a].clone(),
            Some(prev) => prev
                .iter()
                .copied()
                .filter(|b| successors[a].contains(b))
                .collect(),
        };
        if narrowed.is_empty() {
            continue;
        }
        chosen.push(a);
        let inputs: ActivitySet = chosen.iter().map(|&i| matrix.alphabet()[i].clone()).collect();
        let mut picked = Vec::new();
        emit_outputs(matrix, &narrowed, 0, &mut picked, &inputs, out);
        grow_inputs(matrix, sources, successors, k + 1, chosen, Some(&narrowed), out);
        chosen.pop();
    }
}

fn emit_outputs(
    matrix: &FootprintMatrix,
    pool: &[usize],
    from: usize,
    picked: &mut Vec<usize>,
    inputs: &ActivitySet,
    out: &mut BTreeSet<PlacePair>,
) {
    for k in from..pool.len() {
        let b = pool[k];
        if picked
            .iter()
            .any(|&c| matrix.at(c, b) != OrderingRelation::Unrelated)
        {
            continue;
        }
        picked.push(b);
        out.insert(PlacePair {
            inputs: inputs.clone(),
            outputs: picked.iter().map(|&i| matrix.alphabet()[i].clone()).collect(),
        });
        emit_outputs(matrix, pool, k + 1, picked, inputs, out);
        picked.pop();
    }
}

/// Keeps the pairs not strictly contained (componentwise) in another pair.
pub fn maximal_pairs(candidates: &BTreeSet<PlacePair>) -> BTreeSet<PlacePair> {
    candidates
        .iter()
        .filter(|pair| {
            !candidates
                .iter()
                .any(|other| other != *pair && pair.is_covered_by(other))
        })
        .cloned()
        .collect()
}

/// Configurable α miner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaMiner {
    alphabet_limit: usize,
}

impl Default for AlphaMiner {
    fn default() -> Self {
        Self {
            alphabet_limit: DEFAULT_ALPHABET_LIMIT,
        }
    }
}

impl AlphaMiner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Logs with more distinct activities than `limit` are refused, since
    /// candidate enumeration is exponential in the alphabet size.
    pub fn with_alphabet_limit(mut self, limit: usize) -> Self {
        self.alphabet_limit = limit;
        self
    }

    pub fn alphabet_limit(&self) -> usize {
        self.alphabet_limit
    }

    pub fn mine(&self, log: &EventLog) -> Result<(WorkflowNet, AlphaIntermediates), AlphaError> {
        if log.is_empty() {
            return Err(AlphaError::EmptyLog);
        }
        let size = log.alphabet().len();
        if size > self.alphabet_limit {
            return Err(AlphaError::AlphabetTooLarge {
                size,
                limit: self.alphabet_limit,
            });
        }

        let t_w = log.alphabet().clone();
        let t_i = initial_tasks(log)?;
        let t_o = final_tasks(log)?;
        let matrix = footprint(log);
        let x_w = candidate_pairs(&matrix);
        let y_w = maximal_pairs(&x_w);

        let mut places = BTreeSet::from([SOURCE_PLACE.to_owned(), SINK_PLACE.to_owned()]);
        let mut arcs = BTreeSet::new();
        for pair in &y_w {
            let place = pair.place_name();
            for a in &pair.inputs {
                arcs.insert((a.clone(), place.clone()));
            }
            for b in &pair.outputs {
                arcs.insert((place.clone(), b.clone()));
            }
            places.insert(place);
        }
        for t in &t_i {
            arcs.insert((SOURCE_PLACE.to_owned(), t.clone()));
        }
        for t in &t_o {
            arcs.insert((t.clone(), SINK_PLACE.to_owned()));
        }
        if let Some(clash) = t_w.iter().find(|t| places.contains(*t)) {
            return Err(AlphaError::NameCollision(clash.clone()));
        }

        let net = WorkflowNet::new(places, t_w.clone(), arcs, SOURCE_PLACE, SINK_PLACE)?;
        Ok((
            net,
            AlphaIntermediates {
                t_w,
                t_i,
                t_o,
                x_w,
                y_w,
            },
        ))
    }
}

/// Mines with the default alphabet limit.
pub fn alpha(log: &EventLog) -> Result<(WorkflowNet, AlphaIntermediates), AlphaError> {
    AlphaMiner::default().mine(log)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_log() -> EventLog {
        EventLog::from_compact(&["ABCD", "ACBD", "AED"]).unwrap()
    }

    fn pair(a: &str, b: &str) -> PlacePair {
        PlacePair::new(
            a.chars().map(String::from).collect::<Vec<_>>(),
            b.chars().map(String::from).collect::<Vec<_>>(),
        )
    }

    fn set(s: &str) -> ActivitySet {
        s.chars().map(String::from).collect()
    }

    #[test]
    fn boundary_tasks() {
        let log = worked_log();
        assert_eq!(initial_tasks(&log).unwrap(), set("A"));
        assert_eq!(final_tasks(&log).unwrap(), set("D"));

        let ab = EventLog::from_compact(&["AB", "BA"]).unwrap();
        assert_eq!(initial_tasks(&ab).unwrap(), set("AB"));
        assert_eq!(final_tasks(&ab).unwrap(), set("AB"));

        let single = EventLog::from_compact(&["A"]).unwrap();
        assert_eq!(initial_tasks(&single).unwrap(), set("A"));
        assert_eq!(final_tasks(&single).unwrap(), set("A"));

        assert_eq!(initial_tasks(&EventLog::default()), Err(AlphaError::EmptyLog));
        assert_eq!(final_tasks(&EventLog::default()), Err(AlphaError::EmptyLog));
    }

    #[test]
    fn candidates_and_maximal_pairs_of_worked_log() {
        let x_w = candidate_pairs(&footprint(&worked_log()));
        // frozen from an exhaustive scan over all 31 x 31 subset pairs
        let expected: BTreeSet<_> = [
            ("A", "B"),
            ("A", "C"),
            ("A", "E"),
            ("B", "D"),
            ("C", "D"),
            ("E", "D"),
            ("A", "BE"),
            ("A", "CE"),
            ("BE", "D"),
            ("CE", "D"),
        ]
        .into_iter()
        .map(|(a, b)| pair(a, b))
        .collect();
        assert_eq!(x_w, expected);

        let y_w = maximal_pairs(&x_w);
        let expected_y: BTreeSet<_> = [("A", "BE"), ("A", "CE"), ("BE", "D"), ("CE", "D")]
            .into_iter()
            .map(|(a, b)| pair(a, b))
            .collect();
        assert_eq!(y_w, expected_y);
    }

    #[test]
    fn candidate_edge_cases() {
        let single = candidate_pairs(&footprint(&EventLog::from_compact(&["AB"]).unwrap()));
        assert_eq!(single, BTreeSet::from([pair("A", "B")]));
        let none = candidate_pairs(&footprint(&EventLog::from_compact(&["A"]).unwrap()));
        assert!(none.is_empty());
        assert!(maximal_pairs(&BTreeSet::new()).is_empty());
        assert_eq!(maximal_pairs(&single), single);
    }

    #[test]
    fn mines_worked_log() {
        let (net, inter) = alpha(&worked_log()).unwrap();
        assert_eq!(net.transitions().len(), 5);
        assert_eq!(net.places().len(), 6);
        assert_eq!(net.arcs().len(), 14);
        assert_eq!(inter.y_w.len(), 4);
        assert!(net.places().contains("p({A},{B,E})"));
        assert!(net.arcs().contains(&("i_W".to_owned(), "A".to_owned())));
        assert!(net.arcs().contains(&("D".to_owned(), "o_W".to_owned())));
        assert!(net.dangling_transitions().is_empty());
    }

    #[test]
    fn mines_small_logs() {
        let (net, _) = alpha(&EventLog::from_compact(&["AB"]).unwrap()).unwrap();
        assert_eq!((net.places().len(), net.transitions().len(), net.arcs().len()), (3, 2, 4));
        let (net, inter) = alpha(&EventLog::from_compact(&["A"]).unwrap()).unwrap();
        assert_eq!((net.places().len(), net.transitions().len(), net.arcs().len()), (2, 1, 2));
        assert!(inter.y_w.is_empty());
    }

    #[test]
    fn intermediates_json_is_sorted() {
        let (_, inter) = alpha(&EventLog::from_compact(&["AB"]).unwrap()).unwrap();
        assert!(inter.to_json().starts_with("{\n  \"T_W\": [\n    \"A\",\n    \"B\"\n  ],"));
        assert_eq!(
            serde_json::to_string(&inter).unwrap(),
            r#"{"T_W":["A","B"],"T_I":["A"],"T_O":["B"],"X_W":[[["A"],["B"]]],"Y_W":[[["A"],["B"]]]}"#
        );
    }

    #[test]
    fn enforces_alphabet_limit() {
        let log = EventLog::from_compact(&["ABCD"]).unwrap();
        let miner = AlphaMiner::new().with_alphabet_limit(3);
        assert_eq!(
            miner.mine(&log).unwrap_err(),
            AlphaError::AlphabetTooLarge { size: 4, limit: 3 }
        );
        assert!(AlphaMiner::new().with_alphabet_limit(4).mine(&log).is_ok());
        assert_eq!(alpha(&EventLog::default()).unwrap_err(), AlphaError::EmptyLog);
    }

    #[test]
    fn rejects_activity_named_like_a_place() {
        let log = EventLog::from_sequences([vec!["i_W", "B"]]).unwrap();
        assert_eq!(alpha(&log).unwrap_err(), AlphaError::NameCollision("i_W".into()));
    }

    #[test]
    fn short_loops_still_mine() {
        // ABA/ABBA style logs are outside what the miner can rediscover but
        // must not error.
        let log = EventLog::from_compact(&["ABBC", "AC"]).unwrap();
        let (net, _) = alpha(&log).unwrap();
        assert!(net.dangling_transitions().contains(&"B"));
    }
}
