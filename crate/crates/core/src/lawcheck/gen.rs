//! Operand generation: exhaustive pools at the smallest scale, seeded random
//! generation above it.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::trace::{State, StepLabel, TestSpec, Trace};
use crate::traceset::{StateUniverse, TraceSet};

/// Variable name used by generated universes.
pub const VAR: &str = "x";
/// Labels attached to generated steps.
pub const LABELS: [&str; 2] = ["a", "b"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenConfig {
    pub universe_size: usize,
    pub max_len: usize,
    pub max_card: usize,
    /// Randomized cases per law.
    pub cases: usize,
    pub seed: u64,
    /// Attach random step labels to generated traces.
    pub labels: bool,
    /// Loop-power bound for the corpus laws.
    pub fuel: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            universe_size: 3,
            max_len: 3,
            max_card: 8,
            cases: 1000,
            seed: 0,
            labels: true,
            fuel: 8,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("universe size", self.universe_size),
            ("max trace length", self.max_len),
            ("max set cardinality", self.max_card),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{what} must be at least 1")));
            }
        }
        Ok(())
    }

    pub fn universe(&self) -> StateUniverse {
        StateUniverse::single(VAR, self.universe_size)
    }
}

/// Every unlabelled trace of length `1..=max_len` over `universe`, shortest first.
pub fn all_traces(universe: &StateUniverse, max_len: usize) -> Vec<Trace> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<State>> = universe.states().iter().map(|s| vec![s.clone()]).collect();
    for _ in 0..max_len {
        out.extend(layer.iter().map(|v| Trace::unlabelled(v.clone()).unwrap()));
        layer = layer
            .iter()
            .flat_map(|prefix| {
                universe.states().iter().map(move |s| {
                    let mut v = prefix.clone();
                    v.push(s.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Every subset of `traces` (2^n sets).
pub fn all_subsets(traces: &[Trace]) -> Vec<TraceSet> {
    assert!(traces.len() < 16, "subset enumeration is for tiny pools");
    (0u32..1 << traces.len())
        .map(|mask| {
            traces
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, t)| t.clone())
                .collect()
        })
        .collect()
}

/// True, False, `x = k` for each state, and the pairwise conjunctions and
/// disjunctions of those indicators.
pub fn predicate_pool(universe_size: usize) -> Vec<Expr> {
    let is = |k: usize| Expr::eq(Expr::var(VAR, 0), Expr::int(k as i64));
    let mut out = vec![Expr::truth(true), Expr::truth(false)];
    out.extend((0..universe_size).map(is));
    for a in 0..universe_size {
        for b in a + 1..universe_size {
            out.push(Expr::and(is(a), is(b)));
            out.push(Expr::or(is(a), is(b)));
        }
    }
    out
}

pub fn random_trace<R: Rng>(cfg: &GenConfig, universe: &StateUniverse, rng: &mut R) -> Trace {
    let len = rng.gen_range(1..=cfg.max_len);
    let states: Vec<State> = (0..len)
        .map(|_| universe.states().choose(rng).unwrap().clone())
        .collect();
    let labels = (1..len)
        .map(|_| {
            if cfg.labels {
                match rng.gen_range(0..3) {
                    0 => None,
                    k => Some(StepLabel::new(LABELS[k - 1])),
                }
            } else {
                None
            }
        })
        .collect();
    Trace::new(states, labels).unwrap()
}

/// A random set of at most `max_card` traces.
pub fn gen_trace_set<R: Rng>(cfg: &GenConfig, universe: &StateUniverse, rng: &mut R) -> TraceSet {
    let card = rng.gen_range(0..=cfg.max_card);
    (0..card)
        .map(|_| random_trace(cfg, universe, rng))
        .collect()
}

pub fn random_test<R: Rng>(cfg: &GenConfig, preds: &[Expr], rng: &mut R) -> TestSpec {
    let predicate = preds.choose(rng).unwrap().clone();
    if cfg.labels && rng.gen_bool(0.5) {
        TestSpec::anchored(StepLabel::new(LABELS.choose(rng).unwrap()), predicate)
    } else {
        TestSpec::new(predicate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn exhaustive_pool_sizes() {
        let u = StateUniverse::single(VAR, 2);
        let traces = all_traces(&u, 2);
        assert_eq!(traces.len(), 6);
        let sets = all_subsets(&traces);
        assert_eq!(sets.len(), 64);
        let distinct: BTreeSet<Vec<Trace>> =
            sets.iter().map(|s| s.iter().cloned().collect()).collect();
        assert_eq!(distinct.len(), 64);
        assert_eq!(all_traces(&u, 3).len(), 14);
        assert_eq!(predicate_pool(2).len(), 6);
    }

    #[test]
    fn config_bounds() {
        let bad = GenConfig {
            max_card: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let one = GenConfig {
            max_card: 1,
            ..Default::default()
        };
        assert!(one.validate().is_ok());
        let u = one.universe();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert!(gen_trace_set(&one, &u, &mut rng).len() <= 1);
        }
    }

    #[test]
    fn generation_respects_bounds_and_seed() {
        let cfg = GenConfig::default();
        let u = cfg.universe();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| gen_trace_set(&cfg, &u, &mut rng))
                .collect::<Vec<_>>()
        };
        let a = draw(7);
        assert_eq!(a, draw(7));
        assert_ne!(a, draw(8));
        for set in &a {
            assert!(set.len() <= cfg.max_card);
            assert!(set.iter().all(|t| t.len() <= cfg.max_len));
        }
    }
}
