//! States, traces, concatenation, the prefix order, and test satisfaction.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value as Json};

use crate::expr::Expr;

/// A declared variable with its inclusive integer range.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarDomain {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

impl VarDomain {
    pub fn new(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        VarDomain {
            name: name.into(),
            lo,
            hi,
        }
    }

    pub fn contains(&self, v: i128) -> bool {
        (self.lo as i128..=self.hi as i128).contains(&v)
    }

    /// Number of values (0 for an empty range).
    pub fn size(&self) -> u128 {
        if self.lo > self.hi {
            0
        } else {
            (self.hi as i128 - self.lo as i128) as u128 + 1
        }
    }
}

/// Values of the declared variables, in declaration order.
///
/// Equality is on bindings only; program locations live on trace annotations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(Arc<[i64]>);

impl State {
    pub fn new(values: Vec<i64>) -> Self {
        State(values.into())
    }

    pub fn get(&self, index: usize) -> i64 {
        self.0[index]
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    /// A copy with slot `index` replaced.
    pub fn with(&self, index: usize, value: i64) -> Self {
        let mut v = self.0.to_vec();
        v[index] = value;
        State::new(v)
    }

    pub fn to_json(&self, names: &[String]) -> Json {
        let mut m = Map::new();
        for (name, v) in names.iter().zip(self.0.iter()) {
            m.insert(name.clone(), json!(v));
        }
        Json::Object(m)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            [v] => write!(f, "{v}"),
            vs => {
                f.write_str("(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Identifies the atomic instruction that produced a step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepLabel(Arc<str>);

impl StepLabel {
    pub fn new(s: impl AsRef<str>) -> Self {
        StepLabel(Arc::from(s.as_ref()))
    }

    /// The label given to an unlabelled instruction at a source position.
    pub fn at(line: usize, col: usize) -> Self {
        StepLabel::new(format!("L{line}_{col}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite, non-empty sequence of states. `labels[j]` annotates the step
/// from `states[j]` to `states[j + 1]`.
///
/// The derived order is lexicographic on states, then labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace {
    states: Vec<State>,
    labels: Vec<Option<StepLabel>>,
}

impl Trace {
    /// `⟨s⟩`, the empty execution from `s`.
    pub fn stationary(s: State) -> Self {
        Trace {
            states: vec![s],
            labels: Vec::new(),
        }
    }

    /// Returns `None` unless `states` is non-empty and there is one label per step.
    pub fn new(states: Vec<State>, labels: Vec<Option<StepLabel>>) -> Option<Self> {
        if states.is_empty() || labels.len() + 1 != states.len() {
            return None;
        }
        Some(Trace { states, labels })
    }

    /// Unlabelled trace over the given states.
    pub fn unlabelled(states: Vec<State>) -> Option<Self> {
        let n = states.len().saturating_sub(1);
        Trace::new(states, vec![None; n])
    }

    /// One-step trace `⟨from, to⟩` annotated with `label`.
    pub fn step(from: State, to: State, label: Option<StepLabel>) -> Self {
        Trace {
            states: vec![from, to],
            labels: vec![label],
        }
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn labels(&self) -> &[Option<StepLabel>] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &State {
        &self.states[0]
    }

    pub fn last(&self) -> &State {
        &self.states[self.states.len() - 1]
    }

    pub fn is_stationary(&self) -> bool {
        self.states.len() == 1
    }

    /// `z` with `z = self + other`, or `None` when the border states differ.
    pub fn concat(&self, other: &Trace) -> Option<Trace> {
        if self.last() != other.first() {
            return None;
        }
        let mut states = Vec::with_capacity(self.states.len() + other.states.len() - 1);
        states.extend_from_slice(&self.states);
        states.extend_from_slice(&other.states[1..]);
        let mut labels = Vec::with_capacity(self.labels.len() + other.labels.len());
        labels.extend_from_slice(&self.labels);
        labels.extend_from_slice(&other.labels);
        Some(Trace { states, labels })
    }

    /// `self ≤ z`: some `y` has `z = self + y`.
    pub fn is_prefix_of(&self, z: &Trace) -> bool {
        let n = self.states.len();
        n <= z.states.len()
            && self.states[..] == z.states[..n]
            && self.labels[..] == z.labels[..n - 1]
    }

    /// `self < z`: prefix with a non-stationary remainder.
    pub fn is_proper_prefix_of(&self, z: &Trace) -> bool {
        self.states.len() < z.states.len() && self.is_prefix_of(z)
    }

    pub fn satisfies(&self, t: &TestSpec) -> bool {
        match &t.anchor {
            None => self.states.iter().any(|s| t.predicate.holds(s)),
            Some(anchor) => self
                .labels
                .iter()
                .zip(&self.states[1..])
                .any(|(l, s)| l.as_ref() == Some(anchor) && t.predicate.holds(s)),
        }
    }

    pub fn to_json(&self, names: &[String]) -> Json {
        json!({
            "states": self.states.iter().map(|s| s.to_json(names)).collect::<Vec<_>>(),
            "labels": self.labels.iter().map(|l| l.as_ref().map(|l| l.as_str())).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}", self.states[0])?;
        for (label, s) in self.labels.iter().zip(&self.states[1..]) {
            match label {
                Some(l) => write!(f, " -{l}-> {s}")?,
                None => write!(f, ",{s}")?,
            }
        }
        f.write_str(">")
    }
}

/// A condition on states, optionally only checked at states produced by the
/// step labelled `anchor`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestSpec {
    pub predicate: Expr,
    pub anchor: Option<StepLabel>,
}

impl TestSpec {
    pub fn new(predicate: Expr) -> Self {
        TestSpec {
            predicate,
            anchor: None,
        }
    }

    pub fn anchored(anchor: StepLabel, predicate: Expr) -> Self {
        TestSpec {
            predicate,
            anchor: Some(anchor),
        }
    }
}

impl fmt::Display for TestSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.anchor {
            Some(a) => write!(f, "at {a}: {}", self.predicate),
            None => write!(f, "{}", self.predicate),
        }
    }
}
