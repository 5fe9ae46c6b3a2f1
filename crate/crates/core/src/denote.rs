//! Compositional evaluation of instructions into trace sets.
//!
//! Loops are the only construct whose denotation is an infinite union; it is
//! cut off after `fuel` powers of the restricted body. The result is flagged
//! exact when some power of the restricted body is already empty, since every
//! later power is then empty too.

use serde::Serialize;

use crate::error::{Error, ResourceError, Result};
use crate::expr::Expr;
use crate::syntax::Instr;
use crate::trace::{State, StepLabel, Trace};
use crate::traceset::{Algebra, Exactness, StateUniverse, TraceSet, DEFAULT_STATE_CAP};

pub const DEFAULT_FUEL: u32 = 8;
pub const DEFAULT_TRACESET_CAP: usize = 250_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalConfig {
    /// Number of loop-body powers included in a loop's denotation.
    pub fuel: u32,
    pub state_cap: usize,
    pub traceset_cap: usize,
    /// Out-of-domain assignments are an error instead of being dropped.
    pub strict_domain: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            fuel: DEFAULT_FUEL,
            state_cap: DEFAULT_STATE_CAP,
            traceset_cap: DEFAULT_TRACESET_CAP,
            strict_domain: false,
        }
    }
}

impl EvalConfig {
    pub fn with_fuel(fuel: u32) -> Self {
        EvalConfig {
            fuel,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopOutcome {
    /// The `index`-th power of the restricted body is empty.
    Saturated {
        index: u32,
    },
    Truncated {
        fuel: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopRecord {
    pub site: String,
    pub outcome: LoopOutcome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EvalDiagnostics {
    pub dropped_out_of_domain: u64,
    pub loops: Vec<LoopRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Denotation {
    pub traces: TraceSet,
    pub diagnostics: EvalDiagnostics,
}

/// `Traces(i)` over the universe.
pub fn denote(i: &Instr, universe: &StateUniverse, cfg: &EvalConfig) -> Result<Denotation> {
    let mut ev = Evaluator::new(universe, cfg);
    let traces = ev.instr(i)?;
    Ok(Denotation {
        traces,
        diagnostics: ev.diagnostics,
    })
}

/// Denotation of `until exit loop body end`.
pub fn denote_loop(
    exit: &Expr,
    body: &Instr,
    universe: &StateUniverse,
    cfg: &EvalConfig,
) -> Result<Denotation> {
    let mut ev = Evaluator::new(universe, cfg);
    let traces = ev.until(exit, body, &StepLabel::new("loop"))?;
    Ok(Denotation {
        traces,
        diagnostics: ev.diagnostics,
    })
}

pub(crate) fn check_cap(set: TraceSet, cap: usize) -> Result<TraceSet, ResourceError> {
    if set.len() > cap {
        Err(ResourceError::TraceSetCap { cap })
    } else {
        Ok(set)
    }
}

/// Successive powers `R^0 = skip`, `R^(k+1) = R ; R^k` of a trace set.
pub struct Powers<'a, A: Algebra + ?Sized> {
    alg: &'a A,
    base: TraceSet,
    skip: Option<TraceSet>,
    last: Option<TraceSet>,
    cap: usize,
}

impl<'a, A: Algebra + ?Sized> Powers<'a, A> {
    pub fn new(alg: &'a A, base: TraceSet, universe: &StateUniverse, cap: usize) -> Self {
        Powers {
            alg,
            base,
            skip: Some(alg.skip(universe)),
            last: None,
            cap,
        }
    }
}

impl<A: Algebra + ?Sized> Iterator for Powers<'_, A> {
    type Item = Result<TraceSet, ResourceError>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = match (self.skip.take(), &self.last) {
            (Some(skip), _) => skip,
            (None, Some(prev)) => match self.alg.try_seq(&self.base, prev, self.cap) {
                Ok(p) => p,
                Err(e) => return Some(Err(e)),
            },
            (None, None) => unreachable!(),
        };
        self.last = Some(current.clone());
        Some(Ok(current))
    }
}

/// Result of the bounded loop union: `⋃_{j < fuel} (¬e/B)^j \ e`.
pub(crate) struct BoundedLoop {
    pub traces: TraceSet,
    pub outcome: LoopOutcome,
}

/// Computes the bounded loop union from the body's denotation.
pub(crate) fn bounded_loop<A: Algebra + ?Sized>(
    alg: &A,
    exit: &Expr,
    body: &TraceSet,
    universe: &StateUniverse,
    fuel: u32,
    cap: usize,
) -> Result<BoundedLoop, ResourceError> {
    let step = alg.restrict(&Expr::negate(exit.clone()), body);
    let mut acc = TraceSet::fail();
    let mut outcome = LoopOutcome::Truncated { fuel };
    for (j, power) in Powers::new(alg, step, universe, cap).enumerate() {
        let j = j as u32;
        let power = power?;
        if power.is_empty() {
            outcome = LoopOutcome::Saturated { index: j };
            break;
        }
        if j == fuel {
            break;
        }
        acc = check_cap(alg.union(&acc, &alg.corestrict(&power, exit)), cap)?;
    }
    let exactness = match outcome {
        LoopOutcome::Saturated { .. } => body.exactness(),
        LoopOutcome::Truncated { fuel } => body.exactness().combine(Exactness::Truncated { fuel }),
    };
    Ok(BoundedLoop {
        traces: acc.with_exactness(exactness),
        outcome,
    })
}

struct Evaluator<'a> {
    universe: &'a StateUniverse,
    cfg: &'a EvalConfig,
    skip: TraceSet,
    diagnostics: EvalDiagnostics,
}

impl<'a> Evaluator<'a> {
    fn new(universe: &'a StateUniverse, cfg: &'a EvalConfig) -> Self {
        Evaluator {
            universe,
            cfg,
            skip: TraceSet::skip(universe),
            diagnostics: EvalDiagnostics::default(),
        }
    }

    fn capped(&self, set: TraceSet) -> Result<TraceSet> {
        Ok(check_cap(set, self.cfg.traceset_cap)?)
    }

    fn instr(&mut self, i: &Instr) -> Result<TraceSet> {
        match i {
            Instr::Skip => Ok(self.skip.clone()),
            Instr::Fail => Ok(TraceSet::fail()),
            Instr::Check(p) => Ok(self.skip.restrict(p)),
            Instr::Assign {
                target,
                value,
                label,
                ..
            } => {
                let domain = &self.universe.decls()[target.index];
                let mut out = TraceSet::fail();
                for s in self.universe.states() {
                    let v = value.int_value(s);
                    if domain.contains(v) {
                        let next = s.with(target.index, v as i64);
                        out.insert(Trace::step(s.clone(), next, Some(label.clone())));
                    } else if self.cfg.strict_domain {
                        return Err(Error::OutOfDomain {
                            target: target.name.clone(),
                            value: value.to_string(),
                            label: label.to_string(),
                            state: describe_state(self.universe, s),
                        });
                    } else {
                        self.diagnostics.dropped_out_of_domain += 1;
                    }
                }
                Ok(out)
            }
            Instr::Seq(items) => {
                let mut acc = self.skip.clone();
                for item in items {
                    let next = self.instr(item)?;
                    acc = acc.try_seq(&next, self.cfg.traceset_cap)?;
                }
                Ok(acc)
            }
            Instr::If {
                cond,
                then,
                otherwise,
            } => {
                let not_cond = Expr::negate(cond.clone());
                let taken = self.instr(then)?.restrict(cond);
                let skipped = match otherwise {
                    Some(o) => self.instr(o)?.restrict(&not_cond),
                    None => self.skip.restrict(&not_cond),
                };
                self.capped(skipped.union(&taken))
            }
            Instr::Choice(a, b) => {
                let a = self.instr(a)?;
                let b = self.instr(b)?;
                self.capped(a.union(&b))
            }
            Instr::Until { exit, body, site } => self.until(exit, body, site),
            Instr::RepeatUntil { body, exit, site } => {
                let first = self.instr(body)?;
                let rest = self.until(exit, body, site)?;
                Ok(first.try_seq(&rest, self.cfg.traceset_cap)?)
            }
        }
    }

    fn until(&mut self, exit: &Expr, body: &Instr, site: &StepLabel) -> Result<TraceSet> {
        let body = self.instr(body)?;
        let result = bounded_loop(
            &crate::traceset::Standard,
            exit,
            &body,
            self.universe,
            self.cfg.fuel,
            self.cfg.traceset_cap,
        )?;
        self.diagnostics.loops.push(LoopRecord {
            site: site.to_string(),
            outcome: result.outcome,
        });
        Ok(result.traces)
    }
}

fn describe_state(universe: &StateUniverse, s: &State) -> String {
    s.to_json(&universe.names()).to_string()
}
