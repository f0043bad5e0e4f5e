use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Serialize;
use trailnet::act_trace::{parse_review_records, time_window_filter, ActTrace, VerbMapping};
use trailnet::alpha::{AlphaError, AlphaMiner};
use trailnet::event_log::{parse_csv_log, write_csv_log, EventLog};
use trailnet::petri::{generate_traces, to_dot, WorkflowNet};
use trailnet::relations::footprint;
use trailnet::social::{graph_to_dot, handover_of_work, review_relation, SocialGraph};

use crate::config::{Command, Format, Metric, RunConfig};
use crate::error::{CliError, ErrorKind};

/// Named file contents produced by a command.
pub type Artifact = (&'static str, String);

pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let artifacts = match config.command {
        Command::BuildLog => build_log(config)?,
        Command::Footprint => {
            let log = read_log(&config.input)?;
            vec![("footprint.csv", footprint(&log).to_csv())]
        }
        Command::Mine => mine(config)?,
        Command::Social => social(config)?,
        Command::Simulate => simulate(config)?,
        Command::Export => export(config)?,
    };

    fs::create_dir_all(&config.output).map_err(|e| CliError::io(&config.output, e))?;
    let mut written = Vec::with_capacity(artifacts.len());
    for (name, contents) in artifacts {
        let path = config.output.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn read_log(path: &Path) -> Result<EventLog, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_csv_log(BufReader::new(file)).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn read_net(path: &Path) -> Result<WorkflowNet, CliError> {
    WorkflowNet::from_json(&read_text(path)?).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn build_log(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let file = fs::File::open(&config.input).map_err(|e| CliError::io(&config.input, e))?;
    let mut records = parse_review_records(BufReader::new(file))
        .map_err(|e| CliError::parse(format!("{}: {e}", config.input.display())))?;
    if let Some(window) = &config.window {
        records = time_window_filter(&records, window.start, window.end).map_err(|e| CliError::config(e.to_string()))?;
    }

    let strategy = config.strategy.expect("validated: build-log has a strategy");
    let mut act_trace = ActTrace::new(strategy);
    if let Some(path) = &config.verbs {
        let verbs: VerbMapping = serde_json::from_str(&read_text(path)?)
            .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        act_trace = act_trace.with_verbs(verbs);
    }

    let mut built = act_trace.build(&records).map_err(CliError::parse)?;
    built = built.with_source(config.input.display().to_string());
    if let Some(window) = &config.window {
        built = built.with_window(window.start, window.end);
    }
    Ok(vec![
        ("log.csv", write_csv_log(&built.log)),
        ("log.meta.json", built.metadata.to_json()),
    ])
}

fn mine(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let log = read_log(&config.input)?;
    let miner = AlphaMiner::new().with_alphabet_limit(config.alphabet_limit);
    let (net, intermediates) = miner.mine(&log).map_err(|e| match e {
        AlphaError::AlphabetTooLarge { .. } => CliError::new(ErrorKind::AlphabetLimit, e.to_string()),
        other => CliError::parse(other),
    })?;
    let dangling = net.dangling_transitions();
    if !dangling.is_empty() {
        eprintln!("warning: transitions without input or output places: {}", dangling.join(", "));
    }

    let mut out = Vec::new();
    if config.format != Some(Format::Dot) {
        out.push(("net.json", net.to_json()));
    }
    if config.format != Some(Format::Json) {
        out.push(("net.dot", to_dot(&net)));
    }
    out.push(("intermediates.json", intermediates.to_json()));
    Ok(out)
}

fn social(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let graph: SocialGraph = match config.metric {
        Metric::Handover => handover_of_work(&read_log(&config.input)?).map_err(CliError::parse)?,
        Metric::Review => {
            let file = fs::File::open(&config.input).map_err(|e| CliError::io(&config.input, e))?;
            let records = parse_review_records(BufReader::new(file))
                .map_err(|e| CliError::parse(format!("{}: {e}", config.input.display())))?;
            review_relation(&records)
        }
    };
    let mut out = Vec::new();
    if config.format != Some(Format::Dot) {
        out.push(("social.json", graph.to_json()));
    }
    if config.format != Some(Format::Json) {
        out.push(("social.dot", graph_to_dot(&graph)));
    }
    Ok(out)
}

#[derive(Serialize)]
struct SimulationSummary {
    status: &'static str,
    trace_count: usize,
    max_length: usize,
    max_traces: usize,
}

fn simulate(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let net = read_net(&config.input)?;
    let generated = generate_traces(&net, config.bounds);
    if generated.status.bounds_exceeded() {
        eprintln!("warning: trace search stopped early ({})", generated.status.as_str());
    }
    let summary = SimulationSummary {
        status: generated.status.as_str(),
        trace_count: generated.traces.len(),
        max_length: config.bounds.max_length,
        max_traces: config.bounds.max_traces,
    };
    let log = EventLog::from_sequences(generated.traces).map_err(CliError::parse)?;
    let mut meta = serde_json::to_string_pretty(&summary).expect("summary serializes");
    meta.push('\n');
    Ok(vec![("traces.csv", write_csv_log(&log)), ("traces.meta.json", meta)])
}

fn export(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let net = read_net(&config.input)?;
    Ok(match config.format.expect("validated: export has a format") {
        Format::Dot => vec![("net.dot", to_dot(&net))],
        Format::Json => vec![("net.json", net.to_json())],
        Format::Csv => vec![("arcs.csv", arcs_csv(&net))],
    })
}

fn arcs_csv(net: &WorkflowNet) -> String {
    let mut out = String::from("from,to\n");
    for (from, to) in net.arcs() {
        out.push_str(&csv_field(from));
        out.push(',');
        out.push_str(&csv_field(to));
        out.push('\n');
    }
    out
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_owned()
    }
}
