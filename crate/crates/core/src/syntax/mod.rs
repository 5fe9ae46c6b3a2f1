//! Concrete syntax of the loop language: AST, parser, pretty-printer.

mod ast;
mod lexer;
mod parser;
mod pretty;

pub use ast::{Instr, LoopRef, Program};
pub use parser::{parse, parse_bindings, parse_expr, parse_instr, parse_test};
pub use pretty::{pretty, pretty_instr, pretty_with, LabelMode};

use crate::error::ResourceError;
use crate::trace::VarDomain;
use crate::traceset::StateUniverse;

/// The universe of all states of the declared variables, capped at `cap` states.
pub fn state_space(decls: &[VarDomain], cap: usize) -> Result<StateUniverse, ResourceError> {
    StateUniverse::new(decls, cap)
}
