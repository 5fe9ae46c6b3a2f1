//! A direct operational simulator used as an independent oracle.
//!
//! It runs a program from each start state, enumerating every execution,
//! and builds traces step by step. Loops are iterated explicitly, with the
//! number of body runs bounded per loop site. Nothing here goes through the
//! trace-set operators.

#![allow(dead_code)]

use std::collections::BTreeSet;

use unrollsem::expr::BinOp;
use unrollsem::syntax::Instr;
use unrollsem::{Expr, State, StepLabel, Trace, TraceSet, VarDomain};

/// A raw execution: visited states and the label of each step.
pub type Run = (Vec<Vec<i64>>, Vec<Option<String>>);

fn int(e: &Expr, s: &[i64]) -> i128 {
    match e {
        Expr::Int(n) => *n as i128,
        Expr::Var(v) => s[v.index] as i128,
        Expr::Neg(a) => -int(a, s),
        Expr::Binary(op, a, b) => {
            let (a, b) = (int(a, s), int(b, s));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                _ => panic!("not an integer expression"),
            }
        }
        _ => panic!("not an integer expression"),
    }
}

pub fn truth(e: &Expr, s: &[i64]) -> bool {
    match e {
        Expr::Bool(b) => *b,
        Expr::Not(a) => !truth(a, s),
        Expr::Binary(BinOp::And, a, b) => truth(a, s) && truth(b, s),
        Expr::Binary(BinOp::Or, a, b) => truth(a, s) || truth(b, s),
        Expr::Binary(op, a, b) => {
            let (a, b) = (int(a, s), int(b, s));
            match op {
                BinOp::Eq => a == b,
                BinOp::Ne => a != b,
                BinOp::Lt => a < b,
                BinOp::Le => a <= b,
                BinOp::Gt => a > b,
                BinOp::Ge => a >= b,
                _ => panic!("not a condition"),
            }
        }
        _ => panic!("not a condition"),
    }
}

pub struct Oracle<'a> {
    pub decls: &'a [VarDomain],
    /// Maximum number of body runs for a loop, by loop site.
    pub runs: &'a dyn Fn(&str) -> usize,
}

impl Oracle<'_> {
    /// All executions of `i` from `s`, as continuations of `prefix`.
    pub fn exec(&self, i: &Instr, prefix: Run) -> Vec<Run> {
        let s = prefix.0.last().unwrap().clone();
        match i {
            Instr::Skip => vec![prefix],
            Instr::Fail => vec![],
            Instr::Check(p) => {
                if truth(p, &s) {
                    vec![prefix]
                } else {
                    vec![]
                }
            }
            Instr::Assign {
                target,
                value,
                label,
                ..
            } => {
                let v = int(value, &s);
                let d = &self.decls[target.index];
                if v < d.lo as i128 || v > d.hi as i128 {
                    return vec![];
                }
                let mut next = s.clone();
                next[target.index] = v as i64;
                let (mut states, mut labels) = prefix;
                states.push(next);
                labels.push(Some(label.as_str().to_string()));
                vec![(states, labels)]
            }
            Instr::Seq(items) => {
                let mut runs = vec![prefix];
                for item in items {
                    runs = runs.into_iter().flat_map(|r| self.exec(item, r)).collect();
                }
                runs
            }
            Instr::If {
                cond,
                then,
                otherwise,
            } => {
                if truth(cond, &s) {
                    self.exec(then, prefix)
                } else if let Some(o) = otherwise {
                    self.exec(o, prefix)
                } else {
                    vec![prefix]
                }
            }
            Instr::Choice(a, b) => {
                let mut out = self.exec(a, prefix.clone());
                out.extend(self.exec(b, prefix));
                out
            }
            Instr::Until { exit, body, site } => {
                self.iterate(exit, body, (self.runs)(site.as_str()), prefix)
            }
            Instr::RepeatUntil { body, exit, site } => {
                let limit = (self.runs)(site.as_str());
                self.exec(body, prefix)
                    .into_iter()
                    .flat_map(|r| self.iterate(exit, body, limit, r))
                    .collect()
            }
        }
    }

    /// Executions of `until exit loop body end` with at most `limit` body runs.
    pub fn iterate(&self, exit: &Expr, body: &Instr, limit: usize, prefix: Run) -> Vec<Run> {
        let s = prefix.0.last().unwrap();
        if truth(exit, s) {
            return vec![prefix];
        }
        if limit == 0 {
            return vec![];
        }
        self.exec(body, prefix)
            .into_iter()
            .flat_map(|r| self.iterate(exit, body, limit - 1, r))
            .collect()
    }

    /// Every execution from every start state.
    pub fn all(&self, i: &Instr) -> BTreeSet<Trace> {
        starts(self.decls)
            .into_iter()
            .flat_map(|s| self.exec(i, (vec![s], vec![])))
            .map(to_trace)
            .collect()
    }
}

pub fn starts(decls: &[VarDomain]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for d in decls {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (d.lo..=d.hi).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn to_trace((states, labels): Run) -> Trace {
    Trace::new(
        states.into_iter().map(State::new).collect(),
        labels.into_iter().map(|l| l.map(StepLabel::new)).collect(),
    )
    .unwrap()
}

/// `L_i` of a loop: executions with fewer than `i` body runs; inner loops
/// get `inner` runs at most.
pub fn loop_level(
    decls: &[VarDomain],
    exit: &Expr,
    body: &Instr,
    i: usize,
    inner: usize,
) -> BTreeSet<Trace> {
    if i == 0 {
        return BTreeSet::new();
    }
    let runs = move |_: &str| inner;
    let o = Oracle { decls, runs: &runs };
    starts(decls)
        .into_iter()
        .flat_map(|s| o.iterate(exit, body, i - 1, (vec![s], vec![])))
        .map(to_trace)
        .collect()
}

/// First `k` such that no sequence of `k` body runs, each starting where
/// `exit` fails, exists; `None` if sequences of `cap` runs still exist.
pub fn saturation_index(
    decls: &[VarDomain],
    exit: &Expr,
    body: &Instr,
    inner: usize,
    cap: usize,
) -> Option<usize> {
    let runs = move |_: &str| inner;
    let o = Oracle { decls, runs: &runs };
    let mut reach: BTreeSet<Vec<i64>> = starts(decls).into_iter().collect();
    for k in 0..=cap {
        if reach.is_empty() {
            return Some(k);
        }
        reach = reach
            .iter()
            .filter(|s| !truth(exit, s))
            .flat_map(|s| o.exec(body, (vec![s.clone()], vec![])))
            .map(|(states, _)| states.last().unwrap().clone())
            .collect();
    }
    None
}

/// Satisfaction, computed on raw executions.
pub fn satisfies(t: &Trace, predicate: &Expr, anchor: Option<&str>) -> bool {
    let states = t.states();
    match anchor {
        None => states.iter().any(|s| truth(predicate, s.values())),
        Some(a) => t.labels().iter().enumerate().any(|(k, l)| {
            l.as_ref().map(|l| l.as_str()) == Some(a) && truth(predicate, states[k + 1].values())
        }),
    }
}

pub fn as_set(traces: &TraceSet) -> BTreeSet<Trace> {
    traces.iter().cloned().collect()
}
