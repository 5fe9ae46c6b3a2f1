//! Acceptance criteria, one pass/fail line each.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use unrollsem::corpus::PROGRAMS;
use unrollsem::denote::{denote_loop, LoopOutcome, DEFAULT_FUEL};
use unrollsem::lawcheck::gen::GenConfig;
use unrollsem::lawcheck::{run_all, LawKind, Report, Verdict, REGISTRY};
use unrollsem::syntax::{
    parse, parse_bindings, parse_instr, parse_test, state_space, Instr, LabelMode,
};
use unrollsem::traceset::DEFAULT_STATE_CAP;
use unrollsem::unroll::{
    bug_matrix, emit_unrolled, min_unroll_level, BugSpec, LoopSemantics, MinLevel,
};
use unrollsem::{denote, EvalConfig, Exactness, State, StepLabel, Trace};

const COUNTDOWN: &str = "var x: 0..3; until x = 0 loop x := x - 1 end";

static LAW_RUN: OnceLock<(Report, Duration)> = OnceLock::new();

fn law_run() -> &'static (Report, Duration) {
    LAW_RUN.get_or_init(|| {
        let start = Instant::now();
        let report = run_all(&GenConfig::with_seed(42)).expect("valid configuration");
        (report, start.elapsed())
    })
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn law_suite() -> Result<String, String> {
    let (report, elapsed) = law_run();
    let required = [
        "SEQ_FAIL",
        "SKIP_NEUTRAL",
        "RESTRICT_FALSE",
        "RESTRICT_TRUE",
        "CORESTRICT_FALSE",
        "CORESTRICT_TRUE",
        "RESTRICT_COMPOSE",
        "CORESTRICT_COMPOSE",
        "CUT",
        "FILTERED_SEQ_SUBSET",
        "COMBINE",
        "MOVE1",
        "MOVE2",
        "DIST1",
        "DIST2",
        "DIST3",
        "DIST3_LEFT",
        "SEQ_ASSOC",
        "SATISFACTION_EXTENSION",
        "TEST_MONOTONE",
    ];
    for name in required {
        let r = report
            .laws
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| format!("{name} missing from the report"))?;
        let law = REGISTRY.iter().find(|l| l.name == name).unwrap();
        ensure(r.verdict == Verdict::Pass, || {
            format!("{name} has a counterexample: {:?}", r.counterexample)
        })?;
        let LawKind::Algebraic { arity, .. } = law.kind else {
            return Err(format!("{name} is not an algebraic law"));
        };
        let full = 64u64.pow(arity.sets as u32)
            * 6u64.pow(arity.preds as u32)
            * 10u64.pow(arity.traces as u32)
            * 12u64.pow(arity.tests as u32);
        ensure(r.exhaustive_cases == full, || {
            format!(
                "{name}: {} exhaustive cases, expected {full}",
                r.exhaustive_cases
            )
        })?;
        ensure(r.random_cases >= 1000, || {
            format!("{name}: only {} random cases", r.random_cases)
        })?;
    }
    for r in report.laws.iter().filter(|r| !r.control) {
        ensure(r.verdict == Verdict::Pass, || {
            format!("{} failed: {:?}", r.name, r.counterexample)
        })?;
    }
    let cfg = &report.config;
    ensure(
        cfg.universe_size == 3 && cfg.max_len == 3 && cfg.max_card == 8 && cfg.cases >= 1000,
        || format!("unexpected random-phase configuration {cfg:?}"),
    )?;
    ensure(*elapsed < Duration::from_secs(120), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} laws, 0 counterexamples, {:.1}s",
        report.laws.iter().filter(|r| !r.control).count(),
        elapsed.as_secs_f64()
    ))
}

/// Every loop of the corpus with its program's declarations.
fn corpus_loops() -> Vec<(String, unrollsem::Program, usize)> {
    let mut out = Vec::new();
    for e in PROGRAMS {
        let p = parse(e.source).unwrap();
        let n = p.body.loops().len();
        for k in 0..n {
            out.push((format!("{}#{k}", e.name), p.clone(), k));
        }
    }
    out
}

fn equivalence() -> Result<String, String> {
    let cfg = EvalConfig::default();
    let loops = corpus_loops();
    ensure(loops.len() >= 10, || {
        format!("only {} corpus loops", loops.len())
    })?;
    for required in [
        "nondet_body",
        "nested#1",
        "always_true",
        "never_terminating",
    ] {
        ensure(loops.iter().any(|(n, ..)| n.starts_with(required)), || {
            format!("corpus lacks {required}")
        })?;
    }
    let mut checked = 0;
    for (name, p, k) in &loops {
        let u = state_space(&p.decls, DEFAULT_STATE_CAP).unwrap();
        let l = p.body.loops()[*k];
        let sem = LoopSemantics::new(l.exit, l.body, &u, &cfg).map_err(|e| e.to_string())?;
        let power = sem.approximants(8).map_err(|e| e.to_string())?;
        let fix = sem.unrollings(8).map_err(|e| e.to_string())?;
        for i in 0..=8usize {
            ensure(power[i].set_eq(&fix[i]), || {
                format!("{name}: L_{i} differs from the {i}-unrolling")
            })?;
            let oracle = common::loop_level(&p.decls, l.exit, l.body, i, DEFAULT_FUEL as usize - 1);
            ensure(common::as_set(&power[i]) == oracle, || {
                format!("{name}: L_{i} differs from the simulator")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "{} loops, {checked} levels, 0 mismatches",
        loops.len()
    ))
}

fn countdown() -> Result<String, String> {
    let p = parse(COUNTDOWN).unwrap();
    let u = state_space(&p.decls, DEFAULT_STATE_CAP).unwrap();
    let dec = StepLabel::new("L1_31");
    let trace = |vs: &[i64]| {
        Trace::new(
            vs.iter().map(|&v| State::new(vec![v])).collect(),
            vec![Some(dec.clone()); vs.len() - 1],
        )
        .unwrap()
    };
    let expected: BTreeSet<Trace> = [
        trace(&[0]),
        trace(&[1, 0]),
        trace(&[2, 1, 0]),
        trace(&[3, 2, 1, 0]),
    ]
    .into();
    let Instr::Until { exit, body, .. } = &p.body else {
        return Err("countdown is not a loop".into());
    };
    ensure(
        common::saturation_index(&p.decls, exit, body, 0, 16) == Some(4),
        || "simulator saturation index is not 4".into(),
    )?;
    for fuel in 4..=10 {
        let d = denote(&p.body, &u, &EvalConfig::with_fuel(fuel)).map_err(|e| e.to_string())?;
        ensure(common::as_set(&d.traces) == expected, || {
            format!("fuel {fuel}: {}", d.traces)
        })?;
        let simulated = common::loop_level(&p.decls, exit, body, fuel as usize, 0);
        ensure(simulated == expected, || {
            format!("simulator disagrees at fuel {fuel}")
        })?;
        ensure(d.traces.exactness() == Exactness::Exact, || {
            format!("fuel {fuel}: not exact")
        })?;
        ensure(
            d.diagnostics.loops[0].outcome == LoopOutcome::Saturated { index: 4 },
            || format!("fuel {fuel}: {:?}", d.diagnostics.loops),
        )?;
    }
    let d = denote(&p.body, &u, &EvalConfig::with_fuel(3)).map_err(|e| e.to_string())?;
    ensure(
        d.traces.exactness() == Exactness::Truncated { fuel: 3 },
        || format!("fuel 3 flag is {}", d.traces.exactness()),
    )?;
    ensure(!d.traces.contains(&trace(&[3, 2, 1, 0])), || {
        "fuel 3 contains <3,2,1,0>".into()
    })?;
    ensure(
        common::as_set(&d.traces) == common::loop_level(&p.decls, exit, body, 3, 0),
        || "fuel 3 differs from the simulator".into(),
    )?;
    Ok("4 traces, exact, saturated at 4; truncated(3) without <3,2,1,0> at fuel 3".into())
}

fn min_levels() -> Result<String, String> {
    let p = parse(COUNTDOWN).unwrap();
    let u = state_space(&p.decls, DEFAULT_STATE_CAP).unwrap();
    let Instr::Until { exit, body, .. } = &p.body else {
        return Err("countdown is not a loop".into());
    };
    let cases: [(&str, Option<&str>, u32, MinLevel); 4] = [
        ("x = 0", None, 8, MinLevel::Found { level: 1 }),
        ("x = 2", None, 8, MinLevel::Found { level: 3 }),
        ("x = 0", Some("x=3"), 8, MinLevel::Found { level: 4 }),
        (
            "x = 0",
            Some("x=3"),
            3,
            MinLevel::NotFound {
                fuel: 3,
                exactness: Exactness::Truncated { fuel: 3 },
            },
        ),
    ];
    let mut shown = Vec::new();
    for (test, init, fuel, want) in cases {
        let t = parse_test(&p.decls, test).unwrap();
        let c = init.map(|s| parse_bindings(&p.decls, s).unwrap());
        let got = min_unroll_level(exit, body, &u, &t, &EvalConfig::with_fuel(fuel), c.as_ref())
            .map_err(|e| e.to_string())?;
        ensure(got == want, || {
            format!("{test} / {init:?} / fuel {fuel}: {got:?}")
        })?;
        let simulated = (0..=fuel as usize).find(|&i| {
            common::loop_level(&p.decls, exit, body, i, 0)
                .iter()
                .any(|x| {
                    c.as_ref()
                        .is_none_or(|c| common::truth(c, x.first().values()))
                        && common::satisfies(x, &t.predicate, None)
                })
        });
        let agrees = match (want, simulated) {
            (MinLevel::Found { level }, Some(i)) => level as usize == i,
            (MinLevel::NotFound { .. }, None) => true,
            _ => false,
        };
        ensure(agrees, || format!("{test}: simulator finds {simulated:?}"))?;
        shown.push(match got {
            MinLevel::Found { level } => level.to_string(),
            MinLevel::NotFound { fuel, .. } => format!("not-found({fuel})"),
        });
    }
    Ok(shown.join(", "))
}

fn emitter() -> Result<String, String> {
    let cfg = EvalConfig::default();
    let mut checked = 0;
    for (name, p, k) in corpus_loops() {
        let u = state_space(&p.decls, DEFAULT_STATE_CAP).unwrap();
        let l = p.body.loops()[k];
        let sem = LoopSemantics::new(l.exit, l.body, &u, &cfg).map_err(|e| e.to_string())?;
        let fix = sem.unrollings(5).map_err(|e| e.to_string())?;
        for i in 0..=5u32 {
            let src = emit_unrolled(l.node, i, LabelMode::All).unwrap();
            let reparsed =
                parse_instr(&p.decls, &src).map_err(|e| format!("{name} level {i}: {e}: {src}"))?;
            let got = denote(&reparsed, &u, &cfg)
                .map_err(|e| e.to_string())?
                .traces;
            let want = match l.node {
                Instr::RepeatUntil { .. } => sem.body().seq(&fix[i as usize]),
                _ => fix[i as usize].clone(),
            };
            ensure(got.set_eq(&want), || format!("{name} level {i}: {src}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} emitted unrollings, 0 mismatches"))
}

fn monotonicity() -> Result<String, String> {
    let fuel = DEFAULT_FUEL;
    let cfg = EvalConfig::with_fuel(fuel);
    let mut loops = 0;
    for (name, p, k) in corpus_loops() {
        let u = state_space(&p.decls, DEFAULT_STATE_CAP).unwrap();
        let l = p.body.loops()[k];
        let sem = LoopSemantics::new(l.exit, l.body, &u, &cfg).map_err(|e| e.to_string())?;
        let levels = sem.approximants(fuel + 1).map_err(|e| e.to_string())?;
        let whole = denote_loop(l.exit, l.body, &u, &EvalConfig::with_fuel(fuel + 1))
            .map_err(|e| e.to_string())?
            .traces;
        for i in 0..=fuel as usize {
            ensure(levels[i].is_subset(&levels[i + 1]), || {
                format!("{name}: L_{i} ⊄ L_{}", i + 1)
            })?;
            ensure(levels[i + 1].is_subset(&whole), || {
                format!("{name}: L_{} ⊄ L", i + 1)
            })?;
        }
        loops += 1;
    }
    let levels: Vec<u32> = (0..=6).collect();
    let mut rows = 0;
    for e in PROGRAMS {
        let p = parse(e.source).unwrap();
        let u = state_space(&p.decls, DEFAULT_STATE_CAP).unwrap();
        let mut suite = String::new();
        for d in &p.decls {
            for v in d.lo..=d.hi {
                suite.push_str(&format!("{0}_is_{1}: {0} = {1}\n", d.name, v));
            }
        }
        let bugs = BugSpec::parse_suite(&p.decls, &suite).unwrap();
        let m = bug_matrix(&p.body, &u, &bugs, &levels, &EvalConfig::default(), None)
            .map_err(|err| format!("{}: {err}", e.name))?;
        for row in &m.rows {
            ensure(row.found.windows(2).all(|w| w[0] <= w[1]), || {
                format!("{}: row {} decreases", e.name, row.name)
            })?;
            rows += 1;
        }
    }
    Ok(format!(
        "{loops} loops with monotone chains, {rows} monotone bug rows"
    ))
}

fn negative_control() -> Result<String, String> {
    let (report, _) = law_run();
    let find = |n: &str| {
        report
            .laws
            .iter()
            .find(|r| r.name == n)
            .ok_or(format!("{n} missing"))
    };
    let literal = find("DIST3_LITERAL")?;
    ensure(literal.control, || {
        "DIST3_LITERAL is not marked as a control".into()
    })?;
    ensure(literal.verdict == Verdict::Fail, || {
        "the literal line was not refuted".into()
    })?;
    let c = literal
        .counterexample
        .as_ref()
        .ok_or("no counterexample recorded")?;
    let left = find("DIST3_LEFT")?;
    ensure(left.verdict == Verdict::Pass, || {
        "left distributivity failed".into()
    })?;
    Ok(format!(
        "literal line refuted by {}; left distributivity holds",
        c.operands.join(", ")
    ))
}

fn determinism() -> Result<String, String> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_unrollsem"))
            .args(["laws", "--seed", "42", "--json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.code() == Some(0), || {
        format!("first run exited with {:?}", a.status)
    })?;
    ensure(b.status.code() == Some(0), || {
        format!("second run exited with {:?}", b.status)
    })?;
    ensure(!a.stdout.is_empty(), || "empty output".into())?;
    ensure(a.stdout == b.stdout, || "outputs differ".into())?;
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    ensure(v["result"]["passed"] == true, || {
        "report does not pass".into()
    })?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

type Criterion = (&'static str, fn() -> Result<String, String>);

fn main() {
    let criteria: [Criterion; 8] = [
        ("law suite", law_suite),
        ("approximation/unrolling equivalence", equivalence),
        ("countdown oracle", countdown),
        ("minimal levels", min_levels),
        ("emitter agreement", emitter),
        ("monotonicity", monotonicity),
        ("negative control", negative_control),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", n + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
