//! Deliberately broken operator sets, used to show that every law can fail.

use crate::error::ResourceError;
use crate::expr::Expr;
use crate::trace::{TestSpec, Trace};
use crate::traceset::{Algebra, Exactness, StateUniverse, TraceSet};

/// `A ; B` built pairwise from `alg.concat`.
fn seq_by<A: Algebra + ?Sized>(
    alg: &A,
    a: &TraceSet,
    b: &TraceSet,
    cap: usize,
) -> Result<TraceSet, ResourceError> {
    let mut out = TraceSet::fail();
    for x in a {
        for y in b {
            if let Some(z) = alg.concat(x, y) {
                out.insert(z);
                if out.len() > cap {
                    return Err(ResourceError::TraceSetCap { cap });
                }
            }
        }
    }
    Ok(out.with_exactness(a.exactness().combine(b.exactness())))
}

fn keep(a: &TraceSet, f: impl Fn(&Trace) -> bool) -> TraceSet {
    a.iter()
        .filter(|x| f(x))
        .cloned()
        .collect::<TraceSet>()
        .with_exactness(a.exactness())
}

/// Concatenation keeps both copies of the shared border state.
pub struct BorderKept;

impl Algebra for BorderKept {
    fn try_seq(&self, a: &TraceSet, b: &TraceSet, cap: usize) -> Result<TraceSet, ResourceError> {
        seq_by(self, a, b, cap)
    }

    fn concat(&self, x: &Trace, y: &Trace) -> Option<Trace> {
        if x.last() != y.first() {
            return None;
        }
        let states = x.states().iter().chain(y.states()).cloned().collect();
        let labels = x
            .labels()
            .iter()
            .cloned()
            .chain([None])
            .chain(y.labels().iter().cloned())
            .collect();
        Trace::new(states, labels)
    }
}

/// Concatenation is undefined whenever the left trace has three or more states.
pub struct ConcatFailsLong;

impl Algebra for ConcatFailsLong {
    fn try_seq(&self, a: &TraceSet, b: &TraceSet, cap: usize) -> Result<TraceSet, ResourceError> {
        seq_by(self, a, b, cap)
    }

    fn concat(&self, x: &Trace, y: &Trace) -> Option<Trace> {
        if x.len() >= 3 {
            None
        } else {
            x.concat(y)
        }
    }
}

/// `A ; B` also keeps the traces of `A` that have no partner in `B`.
pub struct SeqKeepsUnmatched;

impl Algebra for SeqKeepsUnmatched {
    fn try_seq(&self, a: &TraceSet, b: &TraceSet, cap: usize) -> Result<TraceSet, ResourceError> {
        let mut out = a.try_seq(b, cap)?;
        for x in a {
            if !b.iter().any(|y| y.first() == x.last()) {
                out.insert(x.clone());
            }
        }
        Ok(out)
    }
}

/// Restriction filters on the last state.
pub struct RestrictLast;

impl Algebra for RestrictLast {
    fn restrict(&self, c: &Expr, a: &TraceSet) -> TraceSet {
        a.corestrict(c)
    }
}

/// Corestriction filters on the first state.
pub struct CorestrictFirst;

impl Algebra for CorestrictFirst {
    fn corestrict(&self, a: &TraceSet, c: &Expr) -> TraceSet {
        a.restrict(c)
    }
}

/// Restriction keeps the traces whose first state fails the condition.
pub struct RestrictNegates;

impl Algebra for RestrictNegates {
    fn restrict(&self, c: &Expr, a: &TraceSet) -> TraceSet {
        a.restrict(&Expr::negate(c.clone()))
    }
}

pub struct CorestrictNegates;

impl Algebra for CorestrictNegates {
    fn corestrict(&self, a: &TraceSet, c: &Expr) -> TraceSet {
        a.corestrict(&Expr::negate(c.clone()))
    }
}

/// Restriction keeps the whole set if any trace starts in `c`, else nothing.
pub struct RestrictWholesale;

impl Algebra for RestrictWholesale {
    fn restrict(&self, c: &Expr, a: &TraceSet) -> TraceSet {
        let any = a.iter().any(|x| c.holds(x.first()));
        keep(a, |_| any)
    }
}

pub struct CorestrictWholesale;

impl Algebra for CorestrictWholesale {
    fn corestrict(&self, a: &TraceSet, c: &Expr) -> TraceSet {
        let any = a.iter().any(|x| c.holds(x.last()));
        keep(a, |_| any)
    }
}

/// Corestriction returns its operand unchanged.
pub struct CorestrictIgnores;

impl Algebra for CorestrictIgnores {
    fn corestrict(&self, a: &TraceSet, _: &Expr) -> TraceSet {
        a.clone()
    }
}

/// Restriction also adds the stationary trace of each retained first state.
pub struct RestrictInventsStationary;

impl Algebra for RestrictInventsStationary {
    fn restrict(&self, c: &Expr, a: &TraceSet) -> TraceSet {
        let mut out = a.restrict(c);
        for x in a.restrict(c).iter() {
            out.insert(Trace::stationary(x.first().clone()));
        }
        out
    }
}

/// Union is symmetric difference.
pub struct UnionSymmetricDifference;

impl Algebra for UnionSymmetricDifference {
    fn union(&self, a: &TraceSet, b: &TraceSet) -> TraceSet {
        a.difference(b).union(&b.difference(a))
    }
}

/// Sequencing always reports an exact result.
pub struct ExactnessDropped;

impl Algebra for ExactnessDropped {
    fn try_seq(&self, a: &TraceSet, b: &TraceSet, cap: usize) -> Result<TraceSet, ResourceError> {
        Ok(a.try_seq(b, cap)?.with_exactness(Exactness::Exact))
    }
}

/// A trace satisfies a test iff its last state meets the predicate.
pub struct SatisfiesLastOnly;

impl Algebra for SatisfiesLastOnly {
    fn satisfies(&self, x: &Trace, t: &TestSpec) -> bool {
        t.predicate.holds(x.last())
    }
}

/// `x ≤ z` iff the two traces start in the same state.
pub struct PrefixFirstState;

impl Algebra for PrefixFirstState {
    fn is_prefix(&self, x: &Trace, z: &Trace) -> bool {
        x.first() == z.first()
    }
}

/// A set tests `t` iff every one of its traces satisfies `t`.
pub struct TestsAll;

impl Algebra for TestsAll {
    fn tests(&self, a: &TraceSet, t: &TestSpec) -> bool {
        a.iter().all(|x| self.satisfies(x, t))
    }
}

/// Subset is proper subset.
pub struct SubsetStrict;

impl Algebra for SubsetStrict {
    fn subset(&self, a: &TraceSet, b: &TraceSet) -> bool {
        a.is_subset(b) && !a.set_eq(b)
    }
}

/// `A^i` is computed as `A^(i+1)`.
pub struct PowerOffByOne;

impl Algebra for PowerOffByOne {
    fn power(&self, a: &TraceSet, i: u32, universe: &StateUniverse) -> TraceSet {
        a.power(i + 1, universe)
    }
}

pub static MUTANTS: &[(&str, &dyn Algebra)] = &[
    ("border_kept", &BorderKept),
    ("concat_fails_long", &ConcatFailsLong),
    ("seq_keeps_unmatched", &SeqKeepsUnmatched),
    ("restrict_last", &RestrictLast),
    ("corestrict_first", &CorestrictFirst),
    ("restrict_negates", &RestrictNegates),
    ("corestrict_negates", &CorestrictNegates),
    ("restrict_wholesale", &RestrictWholesale),
    ("corestrict_wholesale", &CorestrictWholesale),
    ("corestrict_ignores", &CorestrictIgnores),
    ("restrict_invents_stationary", &RestrictInventsStationary),
    ("union_symmetric_difference", &UnionSymmetricDifference),
    ("exactness_dropped", &ExactnessDropped),
    ("satisfies_last_only", &SatisfiesLastOnly),
    ("prefix_first_state", &PrefixFirstState),
    ("tests_all", &TestsAll),
    ("subset_strict", &SubsetStrict),
    ("power_off_by_one", &PowerOffByOne),
];
