//! The law registry.

use std::fmt::Display;

use crate::denote::bounded_loop;
use crate::expr::Expr;
use crate::trace::{TestSpec, Trace};
use crate::traceset::{Algebra, Exactness, StateUniverse, TraceSet};
use crate::unroll::LoopSemantics;

/// Operands of one law instance.
#[derive(Debug, Clone, Copy)]
pub struct Operands<'a> {
    pub sets: &'a [&'a TraceSet],
    pub preds: &'a [&'a Expr],
    pub traces: &'a [&'a Trace],
    pub tests: &'a [&'a TestSpec],
}

impl Operands<'_> {
    pub fn describe(&self) -> Vec<String> {
        const SETS: [&str; 3] = ["A", "B", "C"];
        const PREDS: [&str; 2] = ["c", "d"];
        const TRACES: [&str; 3] = ["x", "y", "z"];
        let mut out = Vec::new();
        for (n, s) in SETS.iter().zip(self.sets) {
            out.push(format!("{n} = {s}"));
        }
        for (n, p) in PREDS.iter().zip(self.preds) {
            out.push(format!("{n} = {p}"));
        }
        for (n, t) in TRACES.iter().zip(self.traces) {
            out.push(format!("{n} = {t}"));
        }
        for t in self.tests {
            out.push(format!("t = {t}"));
        }
        out
    }
}

/// The two sides of a failed law instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub lhs: String,
    pub rhs: String,
}

pub type Outcome = Result<(), Mismatch>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Arity {
    pub sets: usize,
    pub preds: usize,
    pub traces: usize,
    pub tests: usize,
}

const fn sets(sets: usize, preds: usize) -> Arity {
    Arity {
        sets,
        preds,
        traces: 0,
        tests: 0,
    }
}

const fn traces(traces: usize, tests: usize) -> Arity {
    Arity {
        sets: 0,
        preds: 0,
        traces,
        tests,
    }
}

pub type AlgebraicCheck = fn(&dyn Algebra, &StateUniverse, &Operands) -> Outcome;

/// A loop drawn from the program corpus.
pub struct CorpusLoop {
    pub name: String,
    pub exit: Expr,
    pub body: TraceSet,
    pub universe: StateUniverse,
}

/// Checks a loop law at every level up to `fuel`; returns the number of
/// instances checked or the failing level with its mismatch.
pub type LoopCheck = fn(&dyn Algebra, &CorpusLoop, u32) -> Result<u64, (u32, Mismatch)>;

#[derive(Clone, Copy)]
pub enum LawKind {
    Algebraic { arity: Arity, check: AlgebraicCheck },
    Loop(LoopCheck),
}

#[derive(Clone, Copy)]
pub struct Law {
    pub name: &'static str,
    pub statement: &'static str,
    /// Expected to be refuted: a negative control for the harness.
    pub control: bool,
    pub kind: LawKind,
}

const fn algebraic(
    name: &'static str,
    statement: &'static str,
    arity: Arity,
    check: AlgebraicCheck,
) -> Law {
    Law {
        name,
        statement,
        control: false,
        kind: LawKind::Algebraic { arity, check },
    }
}

const fn on_loops(name: &'static str, statement: &'static str, check: LoopCheck) -> Law {
    Law {
        name,
        statement,
        control: false,
        kind: LawKind::Loop(check),
    }
}

fn same(lhs: &TraceSet, rhs: &TraceSet) -> Outcome {
    if lhs.set_eq(rhs) {
        Ok(())
    } else {
        Err(Mismatch {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        })
    }
}

fn holds(ok: bool, lhs: impl Display, rhs: impl Display) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Mismatch {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        })
    }
}

fn not(e: &Expr) -> Expr {
    Expr::negate(e.clone())
}

fn and(c: &Expr, d: &Expr) -> Expr {
    Expr::and(c.clone(), d.clone())
}

pub static REGISTRY: &[Law] = &[
    algebraic(
        "SEQ_FAIL",
        "(A ; fail) = (fail ; A) = fail",
        sets(1, 0),
        |alg, _, o| {
            let fail = TraceSet::fail();
            same(&alg.seq(o.sets[0], &fail), &fail)?;
            same(&alg.seq(&fail, o.sets[0]), &fail)
        },
    ),
    algebraic(
        "SKIP_NEUTRAL",
        "(A ; skip) = (skip ; A) = A",
        sets(1, 0),
        |alg, u, o| {
            let skip = alg.skip(u);
            same(&alg.seq(o.sets[0], &skip), o.sets[0])?;
            same(&alg.seq(&skip, o.sets[0]), o.sets[0])
        },
    ),
    algebraic(
        "RESTRICT_FALSE",
        "False / A = fail",
        sets(1, 0),
        |alg, _, o| {
            same(
                &alg.restrict(&Expr::truth(false), o.sets[0]),
                &TraceSet::fail(),
            )
        },
    ),
    algebraic("RESTRICT_TRUE", "True / A = A", sets(1, 0), |alg, _, o| {
        same(&alg.restrict(&Expr::truth(true), o.sets[0]), o.sets[0])
    }),
    algebraic(
        "CORESTRICT_FALSE",
        "A \\ False = fail",
        sets(1, 0),
        |alg, _, o| {
            same(
                &alg.corestrict(o.sets[0], &Expr::truth(false)),
                &TraceSet::fail(),
            )
        },
    ),
    algebraic(
        "CORESTRICT_TRUE",
        "A \\ True = A",
        sets(1, 0),
        |alg, _, o| same(&alg.corestrict(o.sets[0], &Expr::truth(true)), o.sets[0]),
    ),
    algebraic(
        "RESTRICT_COMPOSE",
        "c / (d / A) = (c and d) / A",
        sets(1, 2),
        |alg, _, o| {
            let (a, c, d) = (o.sets[0], o.preds[0], o.preds[1]);
            same(
                &alg.restrict(c, &alg.restrict(d, a)),
                &alg.restrict(&and(c, d), a),
            )
        },
    ),
    algebraic(
        "CORESTRICT_COMPOSE",
        "(A \\ c) \\ d = A \\ (c and d)",
        sets(1, 2),
        |alg, _, o| {
            let (a, c, d) = (o.sets[0], o.preds[0], o.preds[1]);
            same(
                &alg.corestrict(&alg.corestrict(a, c), d),
                &alg.corestrict(a, &and(c, d)),
            )
        },
    ),
    algebraic(
        "CUT",
        "(A \\ c) ; (not c / B) = fail",
        sets(2, 1),
        |alg, _, o| {
            let (a, b, c) = (o.sets[0], o.sets[1], o.preds[0]);
            let lhs = alg.seq(&alg.corestrict(a, c), &alg.restrict(&not(c), b));
            same(&lhs, &TraceSet::fail())
        },
    ),
    algebraic(
        "FILTERED_SEQ_SUBSET",
        "(A \\ c) ; (d / B) ⊆ A ; B",
        sets(2, 2),
        |alg, _, o| {
            let (a, b, c, d) = (o.sets[0], o.sets[1], o.preds[0], o.preds[1]);
            let lhs = alg.seq(&alg.corestrict(a, c), &alg.restrict(d, b));
            let rhs = alg.seq(a, b);
            holds(
                alg.subset(&lhs, &rhs),
                lhs,
                format!("not a superset: {rhs}"),
            )
        },
    ),
    algebraic(
        "COMBINE",
        "(A \\ c) ; (c / B) = (A \\ c) ; B = A ; (c / B)",
        sets(2, 1),
        |alg, _, o| {
            let (a, b, c) = (o.sets[0], o.sets[1], o.preds[0]);
            let both = alg.seq(&alg.corestrict(a, c), &alg.restrict(c, b));
            let left = alg.seq(&alg.corestrict(a, c), b);
            let right = alg.seq(a, &alg.restrict(c, b));
            same(&both, &left)?;
            same(&left, &right)
        },
    ),
    algebraic(
        "MOVE1",
        "(v / A) ; B = v / (A ; B)",
        sets(2, 1),
        |alg, _, o| {
            let (a, b, v) = (o.sets[0], o.sets[1], o.preds[0]);
            same(
                &alg.seq(&alg.restrict(v, a), b),
                &alg.restrict(v, &alg.seq(a, b)),
            )
        },
    ),
    algebraic(
        "MOVE2",
        "A ; (B \\ v) = (A ; B) \\ v",
        sets(2, 1),
        |alg, _, o| {
            let (a, b, v) = (o.sets[0], o.sets[1], o.preds[0]);
            same(
                &alg.seq(a, &alg.corestrict(b, v)),
                &alg.corestrict(&alg.seq(a, b), v),
            )
        },
    ),
    algebraic(
        "DIST1",
        "v / (A ∪ B) = (v / A) ∪ (v / B)",
        sets(2, 1),
        |alg, _, o| {
            let (a, b, v) = (o.sets[0], o.sets[1], o.preds[0]);
            same(
                &alg.restrict(v, &alg.union(a, b)),
                &alg.union(&alg.restrict(v, a), &alg.restrict(v, b)),
            )
        },
    ),
    algebraic(
        "DIST2",
        "(A ∪ B) \\ v = (A \\ v) ∪ (B \\ v)",
        sets(2, 1),
        |alg, _, o| {
            let (a, b, v) = (o.sets[0], o.sets[1], o.preds[0]);
            same(
                &alg.corestrict(&alg.union(a, b), v),
                &alg.union(&alg.corestrict(a, v), &alg.corestrict(b, v)),
            )
        },
    ),
    algebraic(
        "DIST3",
        "A ; (B ∪ C) = (A ; B) ∪ (A ; C)",
        sets(3, 0),
        |alg, _, o| {
            let (a, b, c) = (o.sets[0], o.sets[1], o.sets[2]);
            same(
                &alg.seq(a, &alg.union(b, c)),
                &alg.union(&alg.seq(a, b), &alg.seq(a, c)),
            )
        },
    ),
    algebraic(
        "DIST3_LEFT",
        "(A ∪ B) ; C = (A ; C) ∪ (B ; C)",
        sets(3, 0),
        |alg, _, o| {
            let (a, b, c) = (o.sets[0], o.sets[1], o.sets[2]);
            same(
                &alg.seq(&alg.union(a, b), c),
                &alg.union(&alg.seq(a, c), &alg.seq(b, c)),
            )
        },
    ),
    algebraic(
        "SEQ_ASSOC",
        "(A ; B) ; C = A ; (B ; C)",
        sets(3, 0),
        |alg, _, o| {
            let (a, b, c) = (o.sets[0], o.sets[1], o.sets[2]);
            same(&alg.seq(&alg.seq(a, b), c), &alg.seq(a, &alg.seq(b, c)))
        },
    ),
    algebraic(
        "TEST_MONOTONE",
        "if A tests t and A ≤ B then B tests t",
        Arity {
            sets: 2,
            preds: 0,
            traces: 0,
            tests: 1,
        },
        |alg, _, o| {
            let (a, b, t) = (o.sets[0], o.sets[1], o.tests[0]);
            let premise = alg.tests(a, t) && alg.prefix_le(a, b);
            holds(
                !premise || alg.tests(b, t),
                "A tests t and A ≤ B",
                "B does not test t",
            )
        },
    ),
    algebraic(
        "EXACTNESS_PROPAGATION",
        "an operation yields a truncated set iff an operand is truncated",
        sets(2, 1),
        |alg, _, o| {
            let (a, b, c) = (o.sets[0], o.sets[1], o.preds[0]);
            let cut = a.clone().with_exactness(Exactness::Truncated { fuel: 2 });
            let results = [
                ("A' ; B", alg.seq(&cut, b), false),
                ("B ; A'", alg.seq(b, &cut), false),
                ("A' ∪ B", alg.union(&cut, b), false),
                ("c / A'", alg.restrict(c, &cut), false),
                ("A' \\ c", alg.corestrict(&cut, c), false),
                ("A ; B", alg.seq(a, b), true),
                ("A ∪ B", alg.union(a, b), true),
            ];
            for (what, set, exact) in results {
                if set.exactness().is_exact() != exact {
                    return Err(Mismatch {
                        lhs: format!("{what} is {}", set.exactness()),
                        rhs: format!("expected {}", if exact { "exact" } else { "truncated" }),
                    });
                }
            }
            Ok(())
        },
    ),
    algebraic(
        "SATISFACTION_EXTENSION",
        "if x satisfies t and x ≤ z then z satisfies t",
        traces(2, 1),
        |alg, _, o| {
            let (x, z, t) = (o.traces[0], o.traces[1], o.tests[0]);
            let premise = alg.satisfies(x, t) && alg.is_prefix(x, z);
            holds(
                !premise || alg.satisfies(z, t),
                "x satisfies t and x ≤ z",
                "z does not satisfy t",
            )
        },
    ),
    algebraic(
        "CONCAT_ASSOC",
        "(x + y) + z = x + (y + z), each side defined iff the other is",
        traces(3, 0),
        |alg, _, o| {
            let (x, y, z) = (o.traces[0], o.traces[1], o.traces[2]);
            let lhs = alg.concat(x, y).and_then(|xy| alg.concat(&xy, z));
            let rhs = alg.concat(y, z).and_then(|yz| alg.concat(x, &yz));
            let show = |t: &Option<Trace>| {
                t.as_ref()
                    .map_or("undefined".to_string(), |t| t.to_string())
            };
            holds(lhs == rhs, show(&lhs), show(&rhs))
        },
    ),
    algebraic(
        "STATIONARY_NEUTRAL",
        "<x_1> + x = x = x + <x_L>",
        traces(1, 0),
        |alg, _, o| {
            let x = o.traces[0];
            let front = alg.concat(&Trace::stationary(x.first().clone()), x);
            let back = alg.concat(x, &Trace::stationary(x.last().clone()));
            let show = |t: &Option<Trace>| {
                t.as_ref()
                    .map_or("undefined".to_string(), |t| t.to_string())
            };
            holds(front.as_ref() == Some(x), show(&front), x)?;
            holds(back.as_ref() == Some(x), show(&back), x)
        },
    ),
    algebraic(
        "PREFIX_PARTIAL_ORDER",
        "≤ on traces is reflexive, antisymmetric and transitive",
        traces(3, 0),
        |alg, _, o| {
            let (x, y, z) = (o.traces[0], o.traces[1], o.traces[2]);
            holds(alg.is_prefix(x, x), "x ≤ x", "false")?;
            let antisym = !(alg.is_prefix(x, y) && alg.is_prefix(y, x)) || x == y;
            holds(antisym, "x ≤ y and y ≤ x", "x ≠ y")?;
            let trans = !(alg.is_prefix(x, y) && alg.is_prefix(y, z)) || alg.is_prefix(x, z);
            holds(trans, "x ≤ y and y ≤ z", "not x ≤ z")
        },
    ),
    algebraic(
        "PREFIX_OF_CONCAT",
        "if z = x + y then x ≤ z, and x < z iff y is not stationary",
        traces(2, 0),
        |alg, _, o| {
            let (x, y) = (o.traces[0], o.traces[1]);
            if let Some(z) = alg.concat(x, y) {
                holds(
                    alg.is_prefix(x, &z),
                    format!("x + y = {z}"),
                    "x is not a prefix",
                )?;
                let proper = alg.is_prefix(x, &z) && x != &z;
                holds(
                    proper == !y.is_stationary(),
                    format!("x + y = {z}"),
                    "properness disagrees with y",
                )?;
            }
            Ok(())
        },
    ),
    on_loops("LOOP_SKIP1", "L_1 = skip \\ e = e / skip", |alg, l, _| {
        let sem = LoopSemantics::from_body(&l.exit, l.body.clone(), &l.universe, usize::MAX);
        let l1 = sem
            .approximants_in(alg, 1)
            .expect("uncapped")
            .pop()
            .unwrap();
        let skip = alg.skip(&l.universe);
        same(&l1, &alg.corestrict(&skip, &l.exit)).map_err(|m| (1, m))?;
        same(&l1, &alg.restrict(&l.exit, &skip)).map_err(|m| (1, m))?;
        Ok(1)
    }),
    on_loops(
        "LOOP_2",
        "the bounded loop equals ⋃_{i ≤ fuel} L_i, with L_i = ⋃_{j < i} (not e / B)^j \\ e",
        |alg, l, fuel| {
            let step = alg.restrict(&Expr::negate(l.exit.clone()), &l.body);
            let direct = |i: u32| {
                (0..i).fold(TraceSet::fail(), |acc, j| {
                    alg.union(
                        &acc,
                        &alg.corestrict(&alg.power(&step, j, &l.universe), &l.exit),
                    )
                })
            };
            let sem = LoopSemantics::from_body(&l.exit, l.body.clone(), &l.universe, usize::MAX);
            let incremental = sem.approximants_in(alg, fuel).expect("uncapped");
            let mut union = TraceSet::fail();
            for i in 0..=fuel {
                let li = direct(i);
                same(&li, &incremental[i as usize]).map_err(|m| (i, m))?;
                union = alg.union(&union, &li);
            }
            let bounded = bounded_loop(alg, &l.exit, &l.body, &l.universe, fuel, usize::MAX)
                .expect("uncapped");
            same(&bounded.traces, &union).map_err(|m| (fuel, m))?;
            Ok(fuel as u64 + 2)
        },
    ),
    on_loops(
        "UNROLL_EQUIV",
        "L_i equals the i-unrolling (if not e then B; U_(i-1) end) for every i",
        |alg, l, fuel| {
            let sem = LoopSemantics::from_body(&l.exit, l.body.clone(), &l.universe, usize::MAX);
            let power = sem.approximants_in(alg, fuel).expect("uncapped");
            let fix = sem.unrollings_in(alg, fuel).expect("uncapped");
            for (i, (p, f)) in power.iter().zip(&fix).enumerate() {
                same(p, f).map_err(|m| (i as u32, m))?;
            }
            Ok(fuel as u64 + 1)
        },
    ),
    on_loops("LOOP_MONOTONE", "L_i ⊆ L_(i+1) ⊆ L", |alg, l, fuel| {
        let sem = LoopSemantics::from_body(&l.exit, l.body.clone(), &l.universe, usize::MAX);
        let levels = sem.approximants_in(alg, fuel + 1).expect("uncapped");
        let whole = bounded_loop(alg, &l.exit, &l.body, &l.universe, fuel + 1, usize::MAX)
            .expect("uncapped")
            .traces;
        for i in 0..=fuel as usize {
            let (a, b) = (&levels[i], &levels[i + 1]);
            holds(alg.subset(a, b), a, format!("not a subset of {b}"))
                .map_err(|m| (i as u32, m))?;
            holds(alg.subset(b, &whole), b, format!("not a subset of {whole}"))
                .map_err(|m| (i as u32 + 1, m))?;
        }
        Ok(fuel as u64 + 1)
    }),
    Law {
        name: "DIST3_LITERAL",
        statement: "(A ; B) ; C = (A ; C) ∪ (B ; C)",
        control: true,
        kind: LawKind::Algebraic {
            arity: sets(3, 0),
            check: |alg, _, o| {
                let (a, b, c) = (o.sets[0], o.sets[1], o.sets[2]);
                same(
                    &alg.seq(&alg.seq(a, b), c),
                    &alg.union(&alg.seq(a, c), &alg.seq(b, c)),
                )
            },
        },
    },
];

pub fn lookup(name: &str) -> Option<&'static Law> {
    REGISTRY.iter().find(|l| l.name == name)
}
