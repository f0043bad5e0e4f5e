//! Oracles and generators shared by the integration suites.
//!
//! Everything here works straight from activity sequences and review records,
//! without going through the library's relation or mining code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::DateTime;
use rand::seq::SliceRandom;
use rand::Rng;
use trailnet::act_trace::ReviewRecord;
use trailnet::petri::WorkflowNet;

pub type Seq = Vec<String>;

pub fn words(items: &[&str]) -> Vec<Seq> {
    items
        .iter()
        .map(|w| w.chars().map(String::from).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// relation oracles

/// `a > b` straight from the definition: some trace has `a` at position i and
/// `b` at i + 1.
pub fn naive_follows(traces: &[Seq], a: &str, b: &str) -> bool {
    traces.iter().any(|t| {
        (0..t.len().saturating_sub(1)).any(|i| t[i] == a && t[i + 1] == b)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveRel {
    Causal,
    Inverse,
    Parallel,
    Choice,
}

pub fn naive_relation(traces: &[Seq], a: &str, b: &str) -> NaiveRel {
    let ab = naive_follows(traces, a, b);
    let ba = naive_follows(traces, b, a);
    if ab && !ba {
        NaiveRel::Causal
    } else if ba && !ab {
        NaiveRel::Inverse
    } else if ab && ba {
        NaiveRel::Parallel
    } else {
        NaiveRel::Choice
    }
}

pub fn naive_alphabet(traces: &[Seq]) -> Vec<String> {
    traces
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Exhaustive scan over every pair of non-empty subsets of the alphabet,
/// checking the place-candidate predicate literally.
pub fn brute_force_candidates(traces: &[Seq]) -> BTreeSet<(BTreeSet<String>, BTreeSet<String>)> {
    let alphabet = naive_alphabet(traces);
    let n = alphabet.len();
    assert!(n <= 12, "oracle is exponential");
    let subset = |mask: u32| -> Vec<&String> {
        (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &alphabet[i]).collect()
    };
    let mut out = BTreeSet::new();
    for a_mask in 1u32..(1 << n) {
        let a_side = subset(a_mask);
        let a_ok = a_side.iter().all(|x| {
            a_side
                .iter()
                .all(|y| naive_relation(traces, x, y) == NaiveRel::Choice)
        });
        if !a_ok {
            continue;
        }
        for b_mask in 1u32..(1 << n) {
            let b_side = subset(b_mask);
            let ok = a_side
                .iter()
                .all(|x| b_side.iter().all(|y| naive_relation(traces, x, y) == NaiveRel::Causal))
                && b_side.iter().all(|x| {
                    b_side
                        .iter()
                        .all(|y| naive_relation(traces, x, y) == NaiveRel::Choice)
                });
            if ok {
                out.insert((
                    a_side.iter().map(|s| s.to_string()).collect(),
                    b_side.iter().map(|s| s.to_string()).collect(),
                ));
            }
        }
    }
    out
}

pub fn brute_force_maximal(
    x: &BTreeSet<(BTreeSet<String>, BTreeSet<String>)>,
) -> BTreeSet<(BTreeSet<String>, BTreeSet<String>)> {
    x.iter()
        .filter(|(a, b)| {
            !x.iter()
                .any(|(a2, b2)| !(a2 == a && b2 == b) && a.is_subset(a2) && b.is_subset(b2))
        })
        .cloned()
        .collect()
}

pub fn random_log<R: Rng>(rng: &mut R, max_alphabet: usize, max_traces: usize, max_len: usize) -> Vec<Seq> {
    let size = rng.gen_range(1..=max_alphabet);
    let letters: Vec<String> = (0..size).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let count = rng.gen_range(1..=max_traces);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len).map(|_| letters.choose(rng).unwrap().clone()).collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// structured workflow nets

/// Block-structured process without loops or silent steps.
#[derive(Debug, Clone)]
pub enum Block {
    Task(String),
    Seq(Vec<Block>),
    Xor(Vec<Block>),
    And(Vec<Block>),
}

type TaskSet = BTreeSet<String>;

/// Entry and exit "port" sets of a block plus its internal places. A block
/// consumes one token per entry set; each set lists the transitions that may
/// take that token.
struct Ports {
    entries: Vec<TaskSet>,
    exits: Vec<TaskSet>,
    places: Vec<(TaskSet, TaskSet)>,
}

fn cross_union(lists: impl Iterator<Item = Vec<TaskSet>>) -> Vec<TaskSet> {
    lists.fold(vec![TaskSet::new()], |acc, next| {
        acc.iter()
            .flat_map(|a| next.iter().map(move |b| a.union(b).cloned().collect()))
            .collect()
    })
}

fn ports(block: &Block) -> Ports {
    match block {
        Block::Task(t) => Ports {
            entries: vec![TaskSet::from([t.clone()])],
            exits: vec![TaskSet::from([t.clone()])],
            places: Vec::new(),
        },
        Block::Seq(children) => {
            let parts: Vec<Ports> = children.iter().map(ports).collect();
            let mut places: Vec<_> = parts.iter().flat_map(|p| p.places.clone()).collect();
            for pair in parts.windows(2) {
                for x in &pair[0].exits {
                    for y in &pair[1].entries {
                        places.push((x.clone(), y.clone()));
                    }
                }
            }
            Ports {
                entries: parts.first().unwrap().entries.clone(),
                exits: parts.last().unwrap().exits.clone(),
                places,
            }
        }
        Block::Xor(children) => {
            let parts: Vec<Ports> = children.iter().map(ports).collect();
            Ports {
                entries: cross_union(parts.iter().map(|p| p.entries.clone())),
                exits: cross_union(parts.iter().map(|p| p.exits.clone())),
                places: parts.iter().flat_map(|p| p.places.clone()).collect(),
            }
        }
        Block::And(children) => {
            let parts: Vec<Ports> = children.iter().map(ports).collect();
            Ports {
                entries: parts.iter().flat_map(|p| p.entries.clone()).collect(),
                exits: parts.iter().flat_map(|p| p.exits.clone()).collect(),
                places: parts.iter().flat_map(|p| p.places.clone()).collect(),
            }
        }
    }
}

pub fn labels(block: &Block) -> Vec<String> {
    match block {
        Block::Task(t) => vec![t.clone()],
        Block::Seq(c) | Block::Xor(c) | Block::And(c) => c.iter().flat_map(labels).collect(),
    }
}

/// Builds the workflow net of `Seq[first, body.., last]`. Places get opaque
/// names so that comparisons against mined nets are purely structural.
pub fn block_net(root: &Block) -> WorkflowNet {
    let p = ports(root);
    assert_eq!(p.entries.len(), 1, "root must start with a single task set");
    assert_eq!(p.exits.len(), 1, "root must end with a single task set");

    let mut places = BTreeSet::from(["start".to_owned(), "end".to_owned()]);
    let mut arcs = BTreeSet::new();
    for t in &p.entries[0] {
        arcs.insert(("start".to_owned(), t.clone()));
    }
    for t in &p.exits[0] {
        arcs.insert((t.clone(), "end".to_owned()));
    }
    for (i, (ins, outs)) in p.places.iter().enumerate() {
        let name = format!("q{i}");
        for t in ins {
            arcs.insert((t.clone(), name.clone()));
        }
        for t in outs {
            arcs.insert((name.clone(), t.clone()));
        }
        places.insert(name);
    }
    let transitions = labels(root).into_iter().collect();
    WorkflowNet::new(places, transitions, arcs, "start", "end").expect("block nets are well formed")
}

fn random_body<R: Rng>(rng: &mut R, names: &mut impl Iterator<Item = String>, size: usize) -> Block {
    if size == 1 {
        return Block::Task(names.next().unwrap());
    }
    let parts = rng.gen_range(2..=size.min(3));
    // split `size` into `parts` positive summands
    let mut cuts: Vec<usize> = (1..size).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(size)) {
        sizes.push(c - prev);
        prev = c;
    }
    let children = sizes.into_iter().map(|s| random_body(rng, names, s)).collect();
    match rng.gen_range(0..3) {
        0 => Block::Seq(children),
        1 => Block::Xor(children),
        _ => Block::And(children),
    }
}

/// Random `Seq[first, body, last]` with at most `max_transitions` distinct labels.
pub fn random_structured_process<R: Rng>(rng: &mut R, max_transitions: usize) -> Block {
    assert!(max_transitions >= 2);
    let mut names = (0..max_transitions).map(|i| format!("t{i}"));
    let first = Block::Task(names.next().unwrap());
    let body_size = rng.gen_range(0..=max_transitions - 2);
    let mut parts = vec![first];
    if body_size > 0 {
        parts.push(random_body(rng, &mut names, body_size));
    }
    parts.push(Block::Task(names.next().unwrap()));
    Block::Seq(parts)
}

// ---------------------------------------------------------------------------
// review corpora

pub const REVIEWERS: [&str; 6] = ["ann", "bob", "cy", "dee", "eve", "fay"];

/// `cases` artifacts with 1..=max_per_case comments each, shuffled together.
/// Timestamps are drawn from a small range so ties occur.
pub fn random_corpus<R: Rng>(rng: &mut R, cases: usize, max_per_case: usize) -> Vec<ReviewRecord> {
    let mut records = Vec::new();
    for c in 0..cases {
        let artifact = format!("change-{c:03}");
        let submitter = *REVIEWERS.choose(rng).unwrap();
        for _ in 0..rng.gen_range(1..=max_per_case) {
            let reviewer = *REVIEWERS.choose(rng).unwrap();
            let ts = DateTime::from_timestamp(1_336_003_200 + rng.gen_range(0..40) * 60, 0).unwrap();
            records.push(ReviewRecord::new(artifact.clone(), submitter, reviewer, "comment", ts));
        }
    }
    records.shuffle(rng);
    records
}

/// Expected initiator per artifact: the reviewer of the earliest record,
/// earlier input position winning ties.
pub fn expected_initiators(records: &[ReviewRecord]) -> BTreeMap<String, String> {
    let mut best: BTreeMap<String, (chrono::DateTime<chrono::Utc>, usize, String)> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let candidate = (r.timestamp, i, r.reviewer.clone());
        best.entry(r.artifact_id.clone())
            .and_modify(|cur| {
                if (candidate.0, candidate.1) < (cur.0, cur.1) {
                    *cur = candidate.clone();
                }
            })
            .or_insert(candidate);
    }
    best.into_iter().map(|(k, (_, _, who))| (k, who)).collect()
}
