//! Log-based ordering relations and the footprint matrix.
//!
//! `a > b` holds when `b` directly follows `a` somewhere in the log. From it:
//! `a → b` iff `a > b` and not `b > a`; `a || b` iff both; `a # b` iff neither.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::event_log::EventLog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderingRelation {
    /// `a → b`
    CausalForward,
    /// `b → a`
    CausalBackward,
    /// `a # b`
    Unrelated,
    /// `a || b`
    Parallel,
}

impl OrderingRelation {
    pub fn symbol(self) -> &'static str {
        match self {
            OrderingRelation::CausalForward => "->",
            OrderingRelation::CausalBackward => "<-",
            OrderingRelation::Unrelated => "#",
            OrderingRelation::Parallel => "||",
        }
    }

    /// The relation seen from the other side of the pair.
    pub fn mirror(self) -> Self {
        match self {
            OrderingRelation::CausalForward => OrderingRelation::CausalBackward,
            OrderingRelation::CausalBackward => OrderingRelation::CausalForward,
            other => other,
        }
    }

    /// Classifies a pair from the two direct-succession facts.
    pub fn classify(a_then_b: bool, b_then_a: bool) -> Self {
        match (a_then_b, b_then_a) {
            (true, false) => OrderingRelation::CausalForward,
            (false, true) => OrderingRelation::CausalBackward,
            (true, true) => OrderingRelation::Parallel,
            (false, false) => OrderingRelation::Unrelated,
        }
    }
}

impl fmt::Display for OrderingRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("unknown activity `{0}`")]
    UnknownActivity(String),
}

/// All pairs `(a, b)` where `b` immediately follows `a` in some trace.
pub fn direct_succession(log: &EventLog) -> BTreeSet<(String, String)> {
    let mut pairs = BTreeSet::new();
    for trace in log.traces() {
        for window in trace.events().windows(2) {
            pairs.insert((window[0].activity().to_owned(), window[1].activity().to_owned()));
        }
    }
    pairs
}

/// Pairwise ordering relation over a lexicographically ordered alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FootprintMatrix {
    alphabet: Vec<String>,
    index: BTreeMap<String, usize>,
    cells: Vec<OrderingRelation>,
}

impl FootprintMatrix {
    /// Builds the matrix from an alphabet and a direct-succession set.
    /// Succession pairs mentioning activities outside the alphabet are ignored.
    pub fn from_succession<'a>(
        alphabet: impl IntoIterator<Item = &'a String>,
        succession: &BTreeSet<(String, String)>,
    ) -> Self {
        let alphabet: Vec<String> = alphabet
            .into_iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<String, usize> = alphabet
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let n = alphabet.len();
        let mut follows = vec![false; n * n];
        for (a, b) in succession {
            if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
                follows[i * n + j] = true;
            }
        }
        let cells = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                OrderingRelation::classify(follows[i * n + j], follows[j * n + i])
            })
            .collect();
        Self { alphabet, index, cells }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    fn position(&self, activity: &str) -> Result<usize, RelationError> {
        self.index
            .get(activity)
            .copied()
            .ok_or_else(|| RelationError::UnknownActivity(activity.to_owned()))
    }

    pub fn relation(&self, a: &str, b: &str) -> Result<OrderingRelation, RelationError> {
        let (i, j) = (self.position(a)?, self.position(b)?);
        Ok(self.cells[i * self.len() + j])
    }

    /// Cell lookup by alphabet position.
    pub fn at(&self, i: usize, j: usize) -> OrderingRelation {
        self.cells[i * self.len() + j]
    }

    /// All `(a, b)` with `a → b`, in lexicographic order.
    pub fn causal_pairs(&self) -> Vec<(&str, &str)> {
        self.pairs_with(OrderingRelation::CausalForward)
    }

    pub fn pairs_with(&self, rel: OrderingRelation) -> Vec<(&str, &str)> {
        let n = self.len();
        (0..n * n)
            .filter(|k| self.cells[*k] == rel)
            .map(|k| (self.alphabet[k / n].as_str(), self.alphabet[k % n].as_str()))
            .collect()
    }

    /// CSV grid: a header row of activities (after an empty corner cell),
    /// then one row per activity with the cell symbols.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let header = std::iter::once("").chain(self.alphabet.iter().map(String::as_str));
        writer.write_record(header).expect("in-memory write");
        for (i, a) in self.alphabet.iter().enumerate() {
            let row = std::iter::once(a.as_str())
                .chain((0..self.len()).map(|j| self.at(i, j).symbol()));
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("UTF-8")
    }
}

pub fn footprint(log: &EventLog) -> FootprintMatrix {
    FootprintMatrix::from_succession(log.alphabet(), &direct_succession(log))
}

/// Cell lookup; errors on activities outside the matrix alphabet.
pub fn relation(matrix: &FootprintMatrix, a: &str, b: &str) -> Result<OrderingRelation, RelationError> {
    matrix.relation(a, b)
}
