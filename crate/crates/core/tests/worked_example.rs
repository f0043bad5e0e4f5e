//! Token game on the net mined from {ABCD, ACBD, AED}.

use std::collections::BTreeSet;

use trailnet::act_trace::{build_log, CaseStrategy, ReviewRecord};
use trailnet::alpha::alpha;
use trailnet::event_log::{parse_csv_str, simplify, EventLog};
use trailnet::petri::{enabled, fire, replay, to_dot, Marking, NetError, WorkflowNet};

const WORKED_CSV: &str = "case_id,activity,originator,timestamp
1,A,,
1,B,,
1,C,,
1,D,,
2,A,,
2,C,,
2,B,,
2,D,,
3,A,,
3,E,,
3,D,,
";

fn mined() -> WorkflowNet {
    alpha(&parse_csv_str(WORKED_CSV).unwrap()).unwrap().0
}

fn names(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn parsed_log_simplifies_to_worked_log() {
    let log = parse_csv_str(WORKED_CSV).unwrap();
    let words: Vec<String> = simplify(&log).into_iter().map(|t| t.concat()).collect();
    assert_eq!(words, ["ABCD", "ACBD", "AED"]);
}

#[test]
fn enabled_and_fire() {
    let net = mined();
    let m0 = net.initial_marking();
    assert_eq!(enabled(&net, &m0).unwrap(), names(&["A"]));

    let m1 = fire(&net, &m0, "A").unwrap();
    let expected: Marking = [("p({A},{B,E})", 1), ("p({A},{C,E})", 1)].into_iter().collect();
    assert_eq!(m1, expected);
    assert_eq!(enabled(&net, &m1).unwrap(), names(&["B", "C", "E"]));

    let m2 = fire(&net, &m1, "E").unwrap();
    let expected: Marking = [("p({B,E},{D})", 1), ("p({C,E},{D})", 1)].into_iter().collect();
    assert_eq!(m2, expected);

    assert_eq!(fire(&net, &m0, "D").unwrap_err(), NetError::NotEnabled("D".into()));
    assert!(enabled(&net, &Marking::new()).unwrap().is_empty());
}

#[test]
fn replay_fitting_and_unfitting_traces() {
    let net = mined();
    for trace in [["A", "E", "D"].as_slice(), &["A", "B", "C", "D"], &["A", "C", "B", "D"]] {
        let r = replay(&net, trace).unwrap();
        assert!(r.fits, "{trace:?}: {r:?}");
        assert_eq!(r.final_marking, net.final_marking());
    }
    let r = replay(&net, &["A", "B", "D"]).unwrap();
    assert!(!r.fits);
    assert!(r.consumed_missing >= 1);
    // p({A},{C,E}) is never consumed
    assert_eq!(r.produced_remaining, 1);
    assert_eq!(r.firing_sequence, ["A", "B", "D"]);

    assert_eq!(
        replay(&net, &["A", "Z"]).unwrap_err(),
        NetError::UnknownTransition("Z".into())
    );
}

#[test]
fn dot_rendering_counts() {
    let net = mined();
    let dot = to_dot(&net);
    assert_eq!(dot.matches("shape=circle").count(), 6);
    assert_eq!(dot.matches("shape=box").count(), 5);
    assert_eq!(dot.matches(" -> ").count(), 14);
    assert_eq!(dot, to_dot(&mined()));

    let single = alpha(&EventLog::from_compact(&["A"]).unwrap()).unwrap().0;
    let dot = to_dot(&single);
    assert_eq!(
        dot,
        "digraph workflow_net {
    rankdir=LR;
    \"i_W\" [shape=circle, label=\"i_W\", style=filled, fillcolor=\"#d9ead3\"];
    \"o_W\" [shape=circle, label=\"o_W\", peripheries=2];
    \"A\" [shape=box, label=\"A\"];
    \"A\" -> \"o_W\";
    \"i_W\" -> \"A\";
}
"
    );
}

#[test]
fn act_trace_output_mines_to_a_sequence() {
    let t = |s| chrono::DateTime::from_timestamp(s, 0).unwrap();
    let records = [
        ReviewRecord::new("X", "sub", "R1", "please fix", t(1)),
        ReviewRecord::new("X", "sub", "R2", "agreed", t(2)),
    ];
    let built = build_log(&records, CaseStrategy::ByArtifact).unwrap();
    let (net, inter) = alpha(&built.log).unwrap();
    assert_eq!(inter.y_w.len(), 1);
    assert_eq!(
        *net.arcs(),
        [
            ("i_W", "review:initiator"),
            ("review:initiator", "p({review:initiator},{review:responder})"),
            ("p({review:initiator},{review:responder})", "review:responder"),
            ("review:responder", "o_W"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
    );
}
