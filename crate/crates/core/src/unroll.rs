//! The two approximation sequences of a loop `until e loop B end`:
//!
//! * `L_i = ⋃_{j < i} (¬e/B)^j \ e`, built incrementally as
//!   `L_{i+1} = L_i ∪ ((¬e/B)^i \ e)`;
//! * the i-unrolling `U_0 = fail`, `U_{i+1} = (e/skip) ∪ ¬e/(B ; U_i)`,
//!   i.e. `if not e then B; U_i end`.
//!
//! plus their equivalence check, the syntactic unroller, the minimal
//! unrolling level of a test, and bug matrices.

use std::collections::HashSet;

use serde::Serialize;

use crate::denote::{bounded_loop, check_cap, denote, EvalConfig, Powers};
use crate::error::{Error, ResourceError, Result, StaticError};
use crate::expr::Expr;
use crate::syntax::{parse_test, pretty_instr, Instr, LabelMode};
use crate::trace::{TestSpec, VarDomain};
use crate::traceset::{Algebra, Exactness, Standard, StateUniverse, TraceSet};

/// A loop with its body already denoted.
#[derive(Debug, Clone)]
pub struct LoopSemantics<'u> {
    exit: Expr,
    body: TraceSet,
    universe: &'u StateUniverse,
    cap: usize,
}

impl<'u> LoopSemantics<'u> {
    pub fn new(
        exit: &Expr,
        body: &Instr,
        universe: &'u StateUniverse,
        cfg: &EvalConfig,
    ) -> Result<Self> {
        let body = denote(body, universe, cfg)?.traces;
        Ok(Self::from_body(exit, body, universe, cfg.traceset_cap))
    }

    pub fn from_body(exit: &Expr, body: TraceSet, universe: &'u StateUniverse, cap: usize) -> Self {
        LoopSemantics {
            exit: exit.clone(),
            body,
            universe,
            cap,
        }
    }

    pub fn body(&self) -> &TraceSet {
        &self.body
    }

    pub fn universe(&self) -> &StateUniverse {
        self.universe
    }

    /// `L_0 ..= L_max` in the given algebra.
    pub fn approximants_in<A: Algebra + ?Sized>(
        &self,
        alg: &A,
        max: u32,
    ) -> Result<Vec<TraceSet>, ResourceError> {
        let step = alg.restrict(&Expr::negate(self.exit.clone()), &self.body);
        let mut out = Vec::with_capacity(max as usize + 1);
        let mut acc = TraceSet::fail().with_exactness(self.body.exactness());
        out.push(acc.clone());
        for power in Powers::new(alg, step, self.universe, self.cap).take(max as usize) {
            acc = check_cap(
                alg.union(&acc, &alg.corestrict(&power?, &self.exit)),
                self.cap,
            )?;
            out.push(acc.clone());
        }
        Ok(out)
    }

    /// `U_0 ..= U_max` in the given algebra.
    pub fn unrollings_in<A: Algebra + ?Sized>(
        &self,
        alg: &A,
        max: u32,
    ) -> Result<Vec<TraceSet>, ResourceError> {
        let not_exit = Expr::negate(self.exit.clone());
        let stop = alg.restrict(&self.exit, &alg.skip(self.universe));
        let mut current = TraceSet::fail().with_exactness(self.body.exactness());
        let mut out = vec![current.clone()];
        for _ in 0..max {
            let continued = alg.restrict(&not_exit, &alg.try_seq(&self.body, &current, self.cap)?);
            current = check_cap(alg.union(&stop, &continued), self.cap)?;
            out.push(current.clone());
        }
        Ok(out)
    }

    pub fn approximants(&self, max: u32) -> Result<Vec<TraceSet>, ResourceError> {
        self.approximants_in(&Standard, max)
    }

    pub fn unrollings(&self, max: u32) -> Result<Vec<TraceSet>, ResourceError> {
        self.unrollings_in(&Standard, max)
    }

    /// `L_i`: executions reaching `e` after fewer than `i` body runs.
    pub fn approximant(&self, i: u32) -> Result<TraceSet, ResourceError> {
        Ok(self.approximants(i)?.pop().expect("non-empty"))
    }

    /// The i-unrolling.
    pub fn unrolling(&self, i: u32) -> Result<TraceSet, ResourceError> {
        Ok(self.unrollings(i)?.pop().expect("non-empty"))
    }

    /// The loop's bounded denotation at `fuel`, and the first index whose
    /// restricted-body power is empty, if within `fuel`.
    pub fn bounded(&self, fuel: u32) -> Result<(TraceSet, Option<u32>), ResourceError> {
        let r = bounded_loop(
            &Standard,
            &self.exit,
            &self.body,
            self.universe,
            fuel,
            self.cap,
        )?;
        let saturation = match r.outcome {
            crate::denote::LoopOutcome::Saturated { index } => Some(index),
            crate::denote::LoopOutcome::Truncated { .. } => None,
        };
        Ok((r.traces, saturation))
    }
}

/// `L_i` for the loop `until exit loop body end`.
pub fn approximant(
    exit: &Expr,
    body: &Instr,
    universe: &StateUniverse,
    i: u32,
    cfg: &EvalConfig,
) -> Result<TraceSet> {
    Ok(LoopSemantics::new(exit, body, universe, cfg)?.approximant(i)?)
}

/// The i-unrolling of `until exit loop body end`.
pub fn unrolling(
    exit: &Expr,
    body: &Instr,
    universe: &StateUniverse,
    i: u32,
    cfg: &EvalConfig,
) -> Result<TraceSet> {
    Ok(LoopSemantics::new(exit, body, universe, cfg)?.unrolling(i)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelVerdict {
    pub level: u32,
    pub equal: bool,
}

/// Compares `L_i` with the i-unrolling for every `i ≤ max`. Inequality is a
/// finding, reported per level.
pub fn check_equivalence(
    exit: &Expr,
    body: &Instr,
    universe: &StateUniverse,
    max: u32,
    cfg: &EvalConfig,
) -> Result<Vec<LevelVerdict>> {
    let sem = LoopSemantics::new(exit, body, universe, cfg)?;
    let power = sem.approximants(max)?;
    let fix = sem.unrollings(max)?;
    Ok(power
        .iter()
        .zip(&fix)
        .enumerate()
        .map(|(i, (p, f))| LevelVerdict {
            level: i as u32,
            equal: p.set_eq(f),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelRecord {
    pub level: u32,
    pub cardinality: usize,
    pub exactness: Exactness,
    /// Traces in `L_i` but not in `L_(i-1)`.
    pub added: usize,
    /// `L_i` equals the i-unrolling.
    pub equivalent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnrollReport {
    pub levels: Vec<LevelRecord>,
    /// Level from which the sequence is constant, if reached.
    pub saturation: Option<u32>,
    pub all_equivalent: bool,
}

pub fn unroll_report(
    exit: &Expr,
    body: &Instr,
    universe: &StateUniverse,
    max: u32,
    cfg: &EvalConfig,
) -> Result<UnrollReport> {
    let sem = LoopSemantics::new(exit, body, universe, cfg)?;
    let power = sem.approximants(max)?;
    let fix = sem.unrollings(max)?;
    let (_, saturation) = sem.bounded(max)?;
    let mut levels = Vec::with_capacity(power.len());
    for (i, (p, f)) in power.iter().zip(&fix).enumerate() {
        let added = match i {
            0 => p.len(),
            _ => p.difference(&power[i - 1]).len(),
        };
        levels.push(LevelRecord {
            level: i as u32,
            cardinality: p.len(),
            exactness: p.exactness(),
            added,
            equivalent: p.set_eq(f),
        });
    }
    let all_equivalent = levels.iter().all(|l| l.equivalent);
    Ok(UnrollReport {
        levels,
        saturation,
        all_equivalent,
    })
}

/// The i-unrolling as an instruction: `i` nested `if not e then B; … end`
/// around `check False end`.
pub fn unrolled_loop(exit: &Expr, body: &Instr, i: u32) -> Instr {
    let not_exit = Expr::negate(exit.clone());
    let mut acc = Instr::Check(Expr::Bool(false));
    for _ in 0..i {
        let mut items = match body {
            Instr::Seq(items) => items.clone(),
            other => vec![other.clone()],
        };
        items.push(acc);
        acc = Instr::if_then(not_exit.clone(), Instr::seq(items));
    }
    acc
}

/// Source text of the i-unrolling of a loop node (`until` or `repeat`).
/// Loops nested in the body are kept as loops.
pub fn emit_unrolled(node: &Instr, i: u32, labels: LabelMode) -> Option<String> {
    let unrolled = match node {
        Instr::Until { exit, body, .. } => unrolled_loop(exit, body, i),
        Instr::RepeatUntil { body, exit, .. } => {
            Instr::seq(vec![(**body).clone(), unrolled_loop(exit, body, i)])
        }
        _ => return None,
    };
    Some(pretty_instr(&unrolled, labels))
}

/// Replaces every loop, at any depth, by its `level`-unrolling.
pub fn unroll_program(i: &Instr, level: u32) -> Instr {
    match i {
        Instr::Skip | Instr::Fail | Instr::Check(_) | Instr::Assign { .. } => i.clone(),
        Instr::Seq(items) => Instr::Seq(items.iter().map(|i| unroll_program(i, level)).collect()),
        Instr::If {
            cond,
            then,
            otherwise,
        } => Instr::If {
            cond: cond.clone(),
            then: Box::new(unroll_program(then, level)),
            otherwise: otherwise
                .as_ref()
                .map(|o| Box::new(unroll_program(o, level))),
        },
        Instr::Choice(a, b) => Instr::choice(unroll_program(a, level), unroll_program(b, level)),
        Instr::Until { exit, body, .. } => unrolled_loop(exit, &unroll_program(body, level), level),
        Instr::RepeatUntil { body, exit, .. } => {
            let body = unroll_program(body, level);
            let rest = unrolled_loop(exit, &body, level);
            Instr::seq(vec![body, rest])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinLevel {
    Found {
        level: u32,
    },
    /// No level up to `fuel` tests the condition. With an exact loop
    /// denotation, no level ever will.
    NotFound {
        fuel: u32,
        exactness: Exactness,
    },
}

/// Smallest `i ≤ fuel` such that `L_i`, restricted to `init`, tests `t`.
pub fn min_unroll_level(
    exit: &Expr,
    body: &Instr,
    universe: &StateUniverse,
    t: &TestSpec,
    cfg: &EvalConfig,
    init: Option<&Expr>,
) -> Result<MinLevel> {
    let sem = LoopSemantics::new(exit, body, universe, cfg)?;
    let levels = sem.approximants(cfg.fuel)?;
    for (i, set) in levels.iter().enumerate() {
        let set = match init {
            Some(c) => set.restrict(c),
            None => set.clone(),
        };
        if set.tests(t) {
            return Ok(MinLevel::Found { level: i as u32 });
        }
    }
    let (loop_set, _) = sem.bounded(cfg.fuel)?;
    Ok(MinLevel::NotFound {
        fuel: cfg.fuel,
        exactness: loop_set.exactness(),
    })
}

/// A named incorrectness condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BugSpec {
    pub name: String,
    pub test: TestSpec,
}

impl BugSpec {
    /// Reads a bug suite: one `name: test` per line, blank lines and `--`
    /// comments ignored.
    pub fn parse_suite(decls: &[VarDomain], text: &str) -> Result<Vec<BugSpec>, StaticError> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let content = line.split("--").next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((name, test)) = content.split_once(':') else {
                return Err(StaticError::Syntax {
                    line: line_no,
                    col: 1,
                    message: "expected `name: test`".into(),
                });
            };
            let name = name.trim().to_string();
            if name.is_empty() || !seen.insert(name.clone()) {
                return Err(StaticError::Syntax {
                    line: line_no,
                    col: 1,
                    message: format!("bug name `{name}` is empty or repeated"),
                });
            }
            let test = parse_test(decls, test).map_err(|e| match e {
                StaticError::Syntax { col, message, .. } => StaticError::Syntax {
                    line: line_no,
                    col,
                    message,
                },
                other => other,
            })?;
            out.push(BugSpec { name, test });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BugRow {
    pub name: String,
    pub found: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BugMatrix {
    pub levels: Vec<u32>,
    pub rows: Vec<BugRow>,
}

/// Which bugs the program, with every loop unrolled to each level, tests.
/// Rows must be non-decreasing in the level; a decrease is reported as a
/// consistency error.
pub fn bug_matrix(
    body: &Instr,
    universe: &StateUniverse,
    bugs: &[BugSpec],
    levels: &[u32],
    cfg: &EvalConfig,
    init: Option<&Expr>,
) -> Result<BugMatrix> {
    if !body.has_loop() {
        return Err(Error::NoLoop);
    }
    let mut denotations = Vec::with_capacity(levels.len());
    for &level in levels {
        let d = denote(&unroll_program(body, level), universe, cfg)?.traces;
        denotations.push(match init {
            Some(c) => d.restrict(c),
            None => d,
        });
    }
    let rows: Vec<BugRow> = bugs
        .iter()
        .map(|b| BugRow {
            name: b.name.clone(),
            found: denotations.iter().map(|d| d.tests(&b.test)).collect(),
        })
        .collect();
    let mut order: Vec<usize> = (0..levels.len()).collect();
    order.sort_by_key(|&k| levels[k]);
    for row in &rows {
        for pair in order.windows(2) {
            if row.found[pair[0]] && !row.found[pair[1]] {
                return Err(Error::Consistency(format!(
                    "bug `{}` is found at level {} but not at level {}",
                    row.name, levels[pair[0]], levels[pair[1]]
                )));
            }
        }
    }
    Ok(BugMatrix {
        levels: levels.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_instr, Program};

    const COUNTDOWN: &str = "var x: 0..3; until x = 0 loop x := x - 1 end";

    fn setup(src: &str) -> (Program, StateUniverse) {
        let p = parse(src).unwrap();
        let u = StateUniverse::new(&p.decls, 4096).unwrap();
        (p, u)
    }

    fn xs(set: &TraceSet) -> Vec<Vec<i64>> {
        set.iter()
            .map(|t| t.states().iter().map(|s| s.get(0)).collect())
            .collect()
    }

    fn the_loop(p: &Program) -> (&Expr, &Instr) {
        let l = p.body.loops()[0];
        (l.exit, l.body)
    }

    fn x_is(v: i64) -> TestSpec {
        TestSpec::new(Expr::eq(Expr::var("x", 0), Expr::int(v)))
    }

    #[test]
    fn first_levels() {
        let (p, u) = setup(COUNTDOWN);
        let (e, b) = the_loop(&p);
        let cfg = EvalConfig::default();
        assert!(approximant(e, b, &u, 0, &cfg).unwrap().is_empty());
        assert!(unrolling(e, b, &u, 0, &cfg).unwrap().is_empty());
        let skip = TraceSet::skip(&u);
        assert_eq!(approximant(e, b, &u, 1, &cfg).unwrap(), skip.restrict(e));
        assert_eq!(approximant(e, b, &u, 1, &cfg).unwrap(), skip.corestrict(e));
        assert_eq!(unrolling(e, b, &u, 1, &cfg).unwrap(), skip.restrict(e));
    }

    #[test]
    fn countdown_levels() {
        let (p, u) = setup(COUNTDOWN);
        let (e, b) = the_loop(&p);
        let cfg = EvalConfig::default();
        let l4 = approximant(e, b, &u, 4, &cfg).unwrap();
        assert_eq!(
            xs(&l4),
            vec![vec![0], vec![1, 0], vec![2, 1, 0], vec![3, 2, 1, 0]]
        );
        let l3 = approximant(e, b, &u, 3, &cfg).unwrap();
        assert_eq!(xs(&l3), vec![vec![0], vec![1, 0], vec![2, 1, 0]]);
        assert_eq!(unrolling(e, b, &u, 4, &cfg).unwrap(), l4);
        let l2 = approximant(e, b, &u, 2, &cfg).unwrap();
        let l1 = approximant(e, b, &u, 1, &cfg).unwrap();
        assert_eq!(xs(&l2.difference(&l1)), vec![vec![1, 0]]);
    }

    #[test]
    fn equivalence_on_deterministic_and_nondeterministic_bodies() {
        for src in [
            COUNTDOWN,
            "var x: 0..3; until x = 0 loop x := x - 1 | x := 0 end",
        ] {
            let (p, u) = setup(src);
            let (e, b) = the_loop(&p);
            let verdicts = check_equivalence(e, b, &u, 8, &EvalConfig::default()).unwrap();
            assert_eq!(verdicts.len(), 9);
            assert!(verdicts.iter().all(|v| v.equal), "{src}: {verdicts:?}");
        }
    }

    #[test]
    fn report_records_growth_and_saturation() {
        let (p, u) = setup(COUNTDOWN);
        let (e, b) = the_loop(&p);
        let r = unroll_report(e, b, &u, 6, &EvalConfig::default()).unwrap();
        let cards: Vec<usize> = r.levels.iter().map(|l| l.cardinality).collect();
        assert_eq!(cards, vec![0, 1, 2, 3, 4, 4, 4]);
        let added: Vec<usize> = r.levels.iter().map(|l| l.added).collect();
        assert_eq!(added, vec![0, 1, 1, 1, 1, 0, 0]);
        assert_eq!(r.saturation, Some(4));
        assert!(r.all_equivalent);
    }

    #[test]
    fn emitted_text() {
        let (p, _) = setup(COUNTDOWN);
        assert_eq!(
            emit_unrolled(&p.body, 0, LabelMode::None).unwrap(),
            "check False end"
        );
        assert_eq!(
            emit_unrolled(&p.body, 1, LabelMode::None).unwrap(),
            "if not (x = 0) then x := x - 1; check False end end"
        );
        let two = emit_unrolled(&p.body, 2, LabelMode::None).unwrap();
        assert_eq!(two.matches("x := x - 1").count(), 2);
        assert_eq!(two.matches("if not (x = 0) then").count(), 2);
        assert_eq!(
            emit_unrolled(&p.body, 1, LabelMode::All).unwrap(),
            "if not (x = 0) then L1_31: x := x - 1; check False end end"
        );
        assert_eq!(emit_unrolled(&Instr::Skip, 1, LabelMode::All), None);
    }

    #[test]
    fn emitted_source_denotes_the_unrolling() {
        let (p, u) = setup(COUNTDOWN);
        let (e, b) = the_loop(&p);
        let cfg = EvalConfig::default();
        for i in 0..=5 {
            let text = emit_unrolled(&p.body, i, LabelMode::All).unwrap();
            let parsed = parse_instr(&p.decls, &text).unwrap();
            let d = denote(&parsed, &u, &cfg).unwrap().traces;
            assert_eq!(d, unrolling(e, b, &u, i, &cfg).unwrap(), "level {i}");
        }
    }

    #[test]
    fn minimal_levels() {
        let (p, u) = setup(COUNTDOWN);
        let (e, b) = the_loop(&p);
        let cfg = EvalConfig::default();
        let init = Expr::eq(Expr::var("x", 0), Expr::int(3));
        let min = |t: &TestSpec, init: Option<&Expr>, cfg: &EvalConfig| {
            min_unroll_level(e, b, &u, t, cfg, init).unwrap()
        };
        assert_eq!(min(&x_is(0), None, &cfg), MinLevel::Found { level: 1 });
        assert_eq!(min(&x_is(2), None, &cfg), MinLevel::Found { level: 3 });
        assert_eq!(
            min(&x_is(0), Some(&init), &cfg),
            MinLevel::Found { level: 4 }
        );
        assert_eq!(
            min(&x_is(0), Some(&init), &EvalConfig::with_fuel(3)),
            MinLevel::NotFound {
                fuel: 3,
                exactness: Exactness::Truncated { fuel: 3 }
            }
        );
        assert_eq!(
            min(&x_is(7), None, &cfg),
            MinLevel::NotFound {
                fuel: 8,
                exactness: Exactness::Exact
            }
        );
    }

    #[test]
    fn bug_matrix_rows() {
        let (p, u) = setup(COUNTDOWN);
        let cfg = EvalConfig::default();
        let bugs = BugSpec::parse_suite(&p.decls, "reaches0: x = 0\n-- comment\n\nnever: x = 5\n")
            .unwrap();
        let m = bug_matrix(&p.body, &u, &bugs, &[0, 1, 4], &cfg, None).unwrap();
        assert_eq!(m.rows[0].found, vec![false, true, true]);
        assert_eq!(m.rows[1].found, vec![false, false, false]);
    }

    #[test]
    fn bug_matrix_requires_a_loop() {
        let (p, u) = setup("var x: 0..1; x := 1");
        let r = bug_matrix(&p.body, &u, &[], &[1], &EvalConfig::default(), None);
        assert_eq!(r, Err(Error::NoLoop));
    }

    #[test]
    fn bug_suite_errors() {
        let decls = [VarDomain::new("x", 0, 3)];
        assert!(BugSpec::parse_suite(&decls, "a: x = 0\na: x = 1").is_err());
        assert!(BugSpec::parse_suite(&decls, "no colon here").is_err());
        let err = BugSpec::parse_suite(&decls, "a: x = 0\nb: x +").unwrap_err();
        assert!(matches!(err, StaticError::Syntax { line: 2, .. }), "{err}");
        let anchored = BugSpec::parse_suite(&decls, "a: at L1_31: x = 0").unwrap();
        assert!(anchored[0].test.anchor.is_some());
    }

    #[test]
    fn unroll_program_replaces_nested_loops() {
        let (p, _) = setup(
            "var x: 0..2; var y: 0..2; until x = 0 loop x := x - 1; y := 2; until y = 0 loop y := y - 1 end end",
        );
        let flat = unroll_program(&p.body, 3);
        assert!(!flat.has_loop());
    }
}
