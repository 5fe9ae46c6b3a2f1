//! Exhaustive and randomized checking of the algebraic laws.
//!
//! Each law is first checked on every operand combination drawn from the
//! smallest scale (2 states, traces of length at most 2), then on seeded
//! random operands at the configured scale. Loop laws run over the program
//! corpus. Laws are checked in parallel; results are merged in registry
//! order, so a report depends only on the configuration.

pub mod gen;
pub mod laws;
pub mod mutants;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::trace::{StepLabel, TestSpec, Trace};
use crate::traceset::{Algebra, Standard, StateUniverse, TraceSet};
use gen::GenConfig;
pub use laws::{lookup, Arity, CorpusLoop, Law, LawKind, Mismatch, Operands, REGISTRY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub phase: &'static str,
    pub operands: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub name: &'static str,
    pub statement: &'static str,
    pub control: bool,
    pub exhaustive_cases: u64,
    pub random_cases: u64,
    /// `pass` iff no counterexample was found.
    pub verdict: Verdict,
    /// The verdict is the expected one: `pass` for laws, `fail` for controls.
    pub expected: bool,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub config: GenConfig,
    pub laws: Vec<LawResult>,
    pub passed: bool,
}

/// Fixed operand pools for the exhaustive phase.
pub struct Pools {
    pub universe: StateUniverse,
    pub sets: Vec<TraceSet>,
    pub preds: Vec<Expr>,
    pub traces: Vec<Trace>,
    pub tests: Vec<TestSpec>,
}

impl Pools {
    /// 2 states, all 64 sets of traces of length at most 2, the predicate
    /// pool, and traces of length at most 2 with steps unlabelled or labelled `a`.
    pub fn smallest() -> Self {
        let universe = StateUniverse::single(gen::VAR, 2);
        let plain = gen::all_traces(&universe, 2);
        let sets = gen::all_subsets(&plain);
        let preds = gen::predicate_pool(2);
        let mut traces = plain.clone();
        traces.extend(plain.iter().filter(|t| t.len() == 2).map(|t| {
            Trace::step(
                t.first().clone(),
                t.last().clone(),
                Some(StepLabel::new(gen::LABELS[0])),
            )
        }));
        let tests = preds
            .iter()
            .flat_map(|p| {
                [
                    TestSpec::new(p.clone()),
                    TestSpec::anchored(StepLabel::new(gen::LABELS[0]), p.clone()),
                ]
            })
            .collect();
        Pools {
            universe,
            sets,
            preds,
            traces,
            tests,
        }
    }

    fn case_count(&self, a: Arity) -> u64 {
        [
            (self.sets.len(), a.sets),
            (self.preds.len(), a.preds),
            (self.traces.len(), a.traces),
            (self.tests.len(), a.tests),
        ]
        .iter()
        .map(|&(n, k)| (n as u64).pow(k as u32))
        .product()
    }

    /// Decodes a mixed-radix case index into operand indices.
    fn decode(&self, a: Arity, mut k: u64) -> [Vec<usize>; 4] {
        let mut take = |n: usize, count: usize| {
            (0..count)
                .map(|_| {
                    let i = (k % n as u64) as usize;
                    k /= n as u64;
                    i
                })
                .collect::<Vec<_>>()
        };
        [
            take(self.sets.len(), a.sets),
            take(self.preds.len(), a.preds),
            take(self.traces.len(), a.traces),
            take(self.tests.len(), a.tests),
        ]
    }
}

/// Owned operands of one law instance.
#[derive(Debug, Clone, Default)]
pub struct Instance {
    pub sets: Vec<TraceSet>,
    pub preds: Vec<Expr>,
    pub traces: Vec<Trace>,
    pub tests: Vec<TestSpec>,
}

impl Instance {
    pub fn check(
        &self,
        check: laws::AlgebraicCheck,
        alg: &dyn Algebra,
        universe: &StateUniverse,
    ) -> std::result::Result<(), Counterexample> {
        let sets: Vec<&TraceSet> = self.sets.iter().collect();
        let preds: Vec<&Expr> = self.preds.iter().collect();
        let traces: Vec<&Trace> = self.traces.iter().collect();
        let tests: Vec<&TestSpec> = self.tests.iter().collect();
        let ops = Operands {
            sets: &sets,
            preds: &preds,
            traces: &traces,
            tests: &tests,
        };
        run_check(check, alg, universe, &ops)
    }
}

fn run_check(
    check: laws::AlgebraicCheck,
    alg: &dyn Algebra,
    universe: &StateUniverse,
    ops: &Operands,
) -> std::result::Result<(), Counterexample> {
    check(alg, universe, ops).map_err(|m| Counterexample {
        phase: "",
        operands: ops.describe(),
        lhs: m.lhs,
        rhs: m.rhs,
    })
}

/// Checks one named law on the given operands with the standard operators.
pub fn check_law(name: &str, instance: &Instance, universe: &StateUniverse) -> Result<LawResult> {
    let law = lookup(name).ok_or_else(|| Error::Config(format!("unknown law `{name}`")))?;
    let LawKind::Algebraic { arity, check } = law.kind else {
        return Err(Error::Config(format!(
            "`{name}` is checked over the program corpus"
        )));
    };
    let given = Arity {
        sets: instance.sets.len(),
        preds: instance.preds.len(),
        traces: instance.traces.len(),
        tests: instance.tests.len(),
    };
    if given != arity {
        return Err(Error::Config(format!(
            "`{name}` takes {} sets, {} predicates, {} traces and {} tests",
            arity.sets, arity.preds, arity.traces, arity.tests
        )));
    }
    let counterexample = instance
        .check(check, &Standard, universe)
        .err()
        .map(|mut c| {
            c.phase = "given";
            c
        });
    Ok(finish(law, 1, 0, counterexample))
}

fn finish(
    law: &Law,
    exhaustive: u64,
    random: u64,
    counterexample: Option<Counterexample>,
) -> LawResult {
    let verdict = if counterexample.is_some() {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    LawResult {
        name: law.name,
        statement: law.statement,
        control: law.control,
        exhaustive_cases: exhaustive,
        random_cases: random,
        verdict,
        expected: (verdict == Verdict::Fail) == law.control,
        counterexample,
    }
}

fn exhaustive(
    check: laws::AlgebraicCheck,
    arity: Arity,
    alg: &dyn Algebra,
    pools: &Pools,
) -> (u64, Option<Counterexample>) {
    let total = pools.case_count(arity);
    let found = (0..total).into_par_iter().find_map_first(|k| {
        let [s, p, t, x] = pools.decode(arity, k);
        let sets: Vec<&TraceSet> = s.iter().map(|&i| &pools.sets[i]).collect();
        let preds: Vec<&Expr> = p.iter().map(|&i| &pools.preds[i]).collect();
        let traces: Vec<&Trace> = t.iter().map(|&i| &pools.traces[i]).collect();
        let tests: Vec<&TestSpec> = x.iter().map(|&i| &pools.tests[i]).collect();
        let ops = Operands {
            sets: &sets,
            preds: &preds,
            traces: &traces,
            tests: &tests,
        };
        run_check(check, alg, &pools.universe, &ops)
            .err()
            .map(|c| (k, c))
    });
    match found {
        Some((k, mut c)) => {
            c.phase = "exhaustive";
            (k + 1, Some(c))
        }
        None => (total, None),
    }
}

fn randomized(
    check: laws::AlgebraicCheck,
    arity: Arity,
    alg: &dyn Algebra,
    cfg: &GenConfig,
    stream: u64,
) -> (u64, Option<Counterexample>) {
    let universe = cfg.universe();
    let preds = gen::predicate_pool(cfg.universe_size);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let instances: Vec<Instance> = (0..cfg.cases)
        .map(|_| Instance {
            sets: (0..arity.sets)
                .map(|_| gen::gen_trace_set(cfg, &universe, &mut rng))
                .collect(),
            preds: (0..arity.preds)
                .map(|_| preds[rand::Rng::gen_range(&mut rng, 0..preds.len())].clone())
                .collect(),
            traces: (0..arity.traces)
                .map(|_| gen::random_trace(cfg, &universe, &mut rng))
                .collect(),
            tests: (0..arity.tests)
                .map(|_| gen::random_test(cfg, &preds, &mut rng))
                .collect(),
        })
        .collect();
    let found = instances
        .par_iter()
        .enumerate()
        .find_map_first(|(k, inst)| inst.check(check, alg, &universe).err().map(|c| (k, c)));
    match found {
        Some((k, mut c)) => {
            c.phase = "random";
            (k as u64 + 1, Some(c))
        }
        None => (cfg.cases as u64, None),
    }
}

fn over_corpus(
    check: laws::LoopCheck,
    alg: &dyn Algebra,
    loops: &[CorpusLoop],
    fuel: u32,
) -> (u64, Option<Counterexample>) {
    let mut cases = 0;
    for l in loops {
        match check(alg, l, fuel) {
            Ok(n) => cases += n,
            Err((level, m)) => {
                let c = Counterexample {
                    phase: "corpus",
                    operands: vec![format!("loop = {}", l.name), format!("level = {level}")],
                    lhs: m.lhs,
                    rhs: m.rhs,
                };
                return (cases + 1, Some(c));
            }
        }
    }
    (cases, None)
}

/// Runs one law in full with the given operators.
pub fn run_law(
    law: &Law,
    alg: &dyn Algebra,
    cfg: &GenConfig,
    pools: &Pools,
    loops: &[CorpusLoop],
) -> LawResult {
    let stream = REGISTRY
        .iter()
        .position(|l| l.name == law.name)
        .unwrap_or(REGISTRY.len()) as u64;
    match law.kind {
        LawKind::Algebraic { arity, check } => {
            let (ex, found) = exhaustive(check, arity, alg, pools);
            if found.is_some() {
                return finish(law, ex, 0, found);
            }
            let (rnd, found) = randomized(check, arity, alg, cfg, stream);
            finish(law, ex, rnd, found)
        }
        LawKind::Loop(check) => {
            let (n, found) = over_corpus(check, alg, loops, cfg.fuel);
            finish(law, n, 0, found)
        }
    }
}

/// The full registry with the standard operators.
pub fn run_all(cfg: &GenConfig) -> Result<Report> {
    run_all_with(&Standard, cfg)
}

pub fn run_all_with(alg: &dyn Algebra, cfg: &GenConfig) -> Result<Report> {
    run_selected(alg, cfg, REGISTRY)
}

pub fn run_selected(alg: &dyn Algebra, cfg: &GenConfig, selected: &[Law]) -> Result<Report> {
    cfg.validate()?;
    let pools = Pools::smallest();
    let loops = corpus::loops()?;
    let laws: Vec<LawResult> = selected
        .par_iter()
        .map(|law| run_law(law, alg, cfg, &pools, &loops))
        .collect();
    let passed = laws.iter().all(|r| r.expected);
    Ok(Report {
        config: cfg.clone(),
        laws,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::State;

    fn x_is(k: i64) -> Expr {
        Expr::eq(Expr::var(gen::VAR, 0), Expr::int(k))
    }

    #[test]
    fn pools_have_the_expected_sizes() {
        let p = Pools::smallest();
        assert_eq!(p.sets.len(), 64);
        assert_eq!(p.preds.len(), 6);
        assert_eq!(p.traces.len(), 10);
        assert_eq!(p.tests.len(), 12);
        let a = Arity {
            sets: 2,
            preds: 1,
            traces: 0,
            tests: 0,
        };
        assert_eq!(p.case_count(a), 64 * 64 * 6);
        let last = p.decode(a, p.case_count(a) - 1);
        assert_eq!(last, [vec![63, 63], vec![5], vec![], vec![]]);
    }

    #[test]
    fn check_law_on_given_operands() {
        let u = StateUniverse::single(gen::VAR, 3);
        let s = |v: &[i64]| {
            Trace::unlabelled(v.iter().map(|&k| State::new(vec![k])).collect()).unwrap()
        };
        let a: TraceSet = [s(&[1, 0]), s(&[2])].into_iter().collect();
        let b: TraceSet = [s(&[0, 2]), s(&[2, 2, 1])].into_iter().collect();
        let move1 = Instance {
            sets: vec![a.clone(), b.clone()],
            preds: vec![x_is(1)],
            ..Default::default()
        };
        let r = check_law("MOVE1", &move1, &u).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let skip = Instance {
            sets: vec![a.clone()],
            ..Default::default()
        };
        assert_eq!(
            check_law("SKIP_NEUTRAL", &skip, &u).unwrap().verdict,
            Verdict::Pass
        );

        let literal = Instance {
            sets: vec![
                [s(&[0])].into_iter().collect(),
                [s(&[1])].into_iter().collect(),
                TraceSet::skip(&u),
            ],
            ..Default::default()
        };
        let r = check_law("DIST3_LITERAL", &literal, &u).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.expected);
        assert!(r.counterexample.is_some());

        assert!(check_law("NO_SUCH_LAW", &skip, &u).is_err());
        assert!(check_law("MOVE1", &skip, &u).is_err());
        assert!(check_law("LOOP_2", &skip, &u).is_err());
    }

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<_> = REGISTRY.iter().map(|l| l.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), REGISTRY.len());
        assert_eq!(REGISTRY.iter().filter(|l| l.control).count(), 1);
    }
}
