//! Trace sets and their operators: skip, fail, `;`, `∪`, `/`, `\`, power,
//! the set-level prefix order and set-level testing.

use std::collections::btree_set;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::error::ResourceError;
use crate::expr::Expr;
use crate::trace::{State, TestSpec, Trace, VarDomain};

pub const DEFAULT_STATE_CAP: usize = 4096;

/// Every state permitted by a list of declarations, in lexicographic order
/// (first declared variable most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateUniverse {
    decls: Vec<VarDomain>,
    states: Vec<State>,
}

impl StateUniverse {
    /// Enumerates the cartesian product of the domains. Fails with the product
    /// size when it exceeds `cap`.
    pub fn new(decls: &[VarDomain], cap: usize) -> Result<Self, ResourceError> {
        let size = decls
            .iter()
            .try_fold(1u128, |acc, d| acc.checked_mul(d.size()))
            .unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(ResourceError::StateCap { size, cap });
        }
        let mut states: Vec<Vec<i64>> = vec![Vec::with_capacity(decls.len())];
        for d in decls {
            states = states
                .into_iter()
                .flat_map(|prefix| {
                    (d.lo..=d.hi).map(move |v| {
                        let mut s = prefix.clone();
                        s.push(v);
                        s
                    })
                })
                .collect();
        }
        Ok(StateUniverse {
            decls: decls.to_vec(),
            states: states.into_iter().map(State::new).collect(),
        })
    }

    /// Universe of a single variable `x` ranging over `0..size`.
    pub fn single(name: &str, size: usize) -> Self {
        Self::new(&[VarDomain::new(name, 0, size as i64 - 1)], usize::MAX)
            .expect("uncapped universe")
    }

    pub fn decls(&self) -> &[VarDomain] {
        &self.decls
    }

    pub fn names(&self) -> Vec<String> {
        self.decls.iter().map(|d| d.name.clone()).collect()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Whether a trace set is the full denotation or a fuel-bounded under-approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    Truncated { fuel: u32 },
}

impl Exactness {
    /// Truncation is contagious; of two truncations the smaller fuel wins.
    pub fn combine(self, other: Exactness) -> Exactness {
        match (self, other) {
            (Exactness::Exact, e) | (e, Exactness::Exact) => e,
            (Exactness::Truncated { fuel: a }, Exactness::Truncated { fuel: b }) => {
                Exactness::Truncated { fuel: a.min(b) }
            }
        }
    }

    pub fn is_exact(self) -> bool {
        self == Exactness::Exact
    }
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exactness::Exact => f.write_str("exact"),
            Exactness::Truncated { fuel } => write!(f, "truncated({fuel})"),
        }
    }
}

/// A finite set of traces. Iteration follows the canonical trace order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceSet {
    traces: BTreeSet<Trace>,
    exactness: Exactness,
}

impl Default for TraceSet {
    fn default() -> Self {
        TraceSet::fail()
    }
}

impl FromIterator<Trace> for TraceSet {
    fn from_iter<I: IntoIterator<Item = Trace>>(iter: I) -> Self {
        TraceSet {
            traces: iter.into_iter().collect(),
            exactness: Exactness::Exact,
        }
    }
}

impl<'a> IntoIterator for &'a TraceSet {
    type Item = &'a Trace;
    type IntoIter = btree_set::Iter<'a, Trace>;

    fn into_iter(self) -> Self::IntoIter {
        self.traces.iter()
    }
}

impl TraceSet {
    /// The empty set.
    pub fn fail() -> Self {
        TraceSet {
            traces: BTreeSet::new(),
            exactness: Exactness::Exact,
        }
    }

    /// All stationary traces over the universe.
    pub fn skip(universe: &StateUniverse) -> Self {
        universe
            .states()
            .iter()
            .cloned()
            .map(Trace::stationary)
            .collect()
    }

    pub fn with_exactness(mut self, exactness: Exactness) -> Self {
        self.exactness = exactness;
        self
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Trace> {
        self.traces.iter()
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn contains(&self, x: &Trace) -> bool {
        self.traces.contains(x)
    }

    pub fn insert(&mut self, x: Trace) -> bool {
        self.traces.insert(x)
    }

    /// `A ; B`, failing once the result would exceed `cap` traces.
    pub fn try_seq(&self, other: &TraceSet, cap: usize) -> Result<TraceSet, ResourceError> {
        let mut by_first: BTreeMap<&State, Vec<&Trace>> = BTreeMap::new();
        for y in &other.traces {
            by_first.entry(y.first()).or_default().push(y);
        }
        let mut out = BTreeSet::new();
        for x in &self.traces {
            if let Some(ys) = by_first.get(x.last()) {
                for y in ys {
                    out.insert(x.concat(y).expect("borders match"));
                    if out.len() > cap {
                        return Err(ResourceError::TraceSetCap { cap });
                    }
                }
            }
        }
        Ok(TraceSet {
            traces: out,
            exactness: self.exactness.combine(other.exactness),
        })
    }

    /// `A ; B`: all concatenations of a trace of `A` with a trace of `B`.
    pub fn seq(&self, other: &TraceSet) -> TraceSet {
        self.try_seq(other, usize::MAX).expect("uncapped")
    }

    pub fn union(&self, other: &TraceSet) -> TraceSet {
        TraceSet {
            traces: self.traces.union(&other.traces).cloned().collect(),
            exactness: self.exactness.combine(other.exactness),
        }
    }

    /// `c / A`: traces whose first state satisfies `c`.
    pub fn restrict(&self, c: &Expr) -> TraceSet {
        self.filter(|x| c.holds(x.first()))
    }

    /// `A \ c`: traces whose last state satisfies `c`.
    pub fn corestrict(&self, c: &Expr) -> TraceSet {
        self.filter(|x| c.holds(x.last()))
    }

    fn filter(&self, keep: impl Fn(&Trace) -> bool) -> TraceSet {
        TraceSet {
            traces: self.traces.iter().filter(|x| keep(x)).cloned().collect(),
            exactness: self.exactness,
        }
    }

    /// `A^i`, with `A^0 = skip` and `A^(i+1) = A ; A^i`.
    pub fn power(&self, i: u32, universe: &StateUniverse) -> TraceSet {
        let mut acc = TraceSet::skip(universe);
        for _ in 0..i {
            acc = self.seq(&acc);
        }
        let exactness = acc.exactness.combine(self.exactness);
        acc.with_exactness(exactness)
    }

    pub fn difference(&self, other: &TraceSet) -> TraceSet {
        TraceSet {
            traces: self.traces.difference(&other.traces).cloned().collect(),
            exactness: self.exactness.combine(other.exactness),
        }
    }

    /// Same traces; exactness flags are not compared.
    pub fn set_eq(&self, other: &TraceSet) -> bool {
        self.traces == other.traces
    }

    pub fn is_subset(&self, other: &TraceSet) -> bool {
        self.traces.is_subset(&other.traces)
    }

    /// `A ≤ B`: every trace of `A` is a prefix of some trace of `B`.
    pub fn prefix_le(&self, other: &TraceSet) -> bool {
        self.traces
            .iter()
            .all(|x| other.traces.iter().any(|y| x.is_prefix_of(y)))
    }

    /// `A < B` with the trace-level strict order.
    pub fn prefix_lt(&self, other: &TraceSet) -> bool {
        self.traces
            .iter()
            .all(|x| other.traces.iter().any(|y| x.is_proper_prefix_of(y)))
    }

    /// `A` tests `t`: some trace of `A` satisfies `t`.
    pub fn tests(&self, t: &TestSpec) -> bool {
        self.traces.iter().any(|x| x.satisfies(t))
    }

    /// Canonical JSON: traces in canonical order plus the exactness flag.
    pub fn to_json(&self, names: &[String]) -> Json {
        json!({
            "exactness": self.exactness,
            "traces": self.traces.iter().map(|x| x.to_json(names)).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for TraceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.traces.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")?;
        if let Exactness::Truncated { fuel } = self.exactness {
            write!(f, " (truncated at fuel {fuel})")?;
        }
        Ok(())
    }
}

/// The primitive operators, as a trait so that checks written against it can
/// be run on deliberately broken implementations.
///
/// [`Standard`] delegates to [`Trace`] and [`TraceSet`].
pub trait Algebra: Sync {
    fn skip(&self, universe: &StateUniverse) -> TraceSet {
        TraceSet::skip(universe)
    }

    fn try_seq(&self, a: &TraceSet, b: &TraceSet, cap: usize) -> Result<TraceSet, ResourceError> {
        a.try_seq(b, cap)
    }

    fn seq(&self, a: &TraceSet, b: &TraceSet) -> TraceSet {
        self.try_seq(a, b, usize::MAX).expect("uncapped")
    }

    fn union(&self, a: &TraceSet, b: &TraceSet) -> TraceSet {
        a.union(b)
    }

    fn restrict(&self, c: &Expr, a: &TraceSet) -> TraceSet {
        a.restrict(c)
    }

    fn corestrict(&self, a: &TraceSet, c: &Expr) -> TraceSet {
        a.corestrict(c)
    }

    fn power(&self, a: &TraceSet, i: u32, universe: &StateUniverse) -> TraceSet {
        let mut acc = self.skip(universe);
        for _ in 0..i {
            acc = self.seq(a, &acc);
        }
        acc
    }

    fn set_eq(&self, a: &TraceSet, b: &TraceSet) -> bool {
        a.set_eq(b)
    }

    fn subset(&self, a: &TraceSet, b: &TraceSet) -> bool {
        a.is_subset(b)
    }

    fn concat(&self, x: &Trace, y: &Trace) -> Option<Trace> {
        x.concat(y)
    }

    fn is_prefix(&self, x: &Trace, z: &Trace) -> bool {
        x.is_prefix_of(z)
    }

    fn satisfies(&self, x: &Trace, t: &TestSpec) -> bool {
        x.satisfies(t)
    }

    fn tests(&self, a: &TraceSet, t: &TestSpec) -> bool {
        a.iter().any(|x| self.satisfies(x, t))
    }

    fn prefix_le(&self, a: &TraceSet, b: &TraceSet) -> bool {
        a.iter().all(|x| b.iter().any(|y| self.is_prefix(x, y)))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Standard;

impl Algebra for Standard {}
