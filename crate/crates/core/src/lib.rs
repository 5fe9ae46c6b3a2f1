//! Trace-set semantics for a small imperative language with `until` loops.
//!
//! Programs denote sets of traces. A loop is approximated by the sets `L_i`
//! of executions that exit after fewer than `i` body runs, which coincide
//! with the denotations of its syntactic i-unrollings. The crate evaluates
//! programs, unrolls loops, finds the minimal level at which a test is
//! witnessed, and checks the algebraic laws of the operators.

pub mod cli;
pub mod corpus;
pub mod denote;
pub mod error;
pub mod expr;
pub mod lawcheck;
pub mod syntax;
pub mod trace;
pub mod traceset;
pub mod unroll;

pub use denote::{denote, denote_loop, Denotation, EvalConfig};
pub use error::{Error, ResourceError, Result, StaticError};
pub use expr::{Expr, Type};
pub use syntax::{parse, Instr, Program};
pub use trace::{State, StepLabel, TestSpec, Trace, VarDomain};
pub use traceset::{Algebra, Exactness, Standard, StateUniverse, TraceSet};
