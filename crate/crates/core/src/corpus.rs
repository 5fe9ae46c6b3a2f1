//! The bundled example programs.

use crate::denote::{denote, EvalConfig};
use crate::error::Result;
use crate::lawcheck::CorpusLoop;
use crate::syntax::{parse, state_space, Program};
use crate::traceset::DEFAULT_STATE_CAP;

#[derive(Debug, Clone, Copy)]
pub struct Example {
    pub name: &'static str,
    pub source: &'static str,
}

macro_rules! examples {
    ($($name:literal),* $(,)?) => {
        &[$(Example {
            name: $name,
            source: include_str!(concat!("../corpus/", $name, ".prog")),
        }),*]
    };
}

pub static PROGRAMS: &[Example] = examples![
    "countdown",
    "nondet_body",
    "nested",
    "always_true",
    "never_terminating",
    "repeat",
    "two_vars",
    "check_body",
    "if_body",
    "dropping_choice",
    "count_up",
    "labelled",
    "gcd",
    "stutter",
];

/// Bug suites, keyed by program name.
pub static BUG_SUITES: &[(&str, &str)] = &[
    ("countdown", include_str!("../corpus/countdown.bugs")),
    ("nondet_body", include_str!("../corpus/nondet_body.bugs")),
];

pub fn get(name: &str) -> Option<&'static Example> {
    PROGRAMS.iter().find(|e| e.name == name)
}

pub fn program(name: &str) -> Option<Program> {
    get(name).map(|e| parse(e.source).expect("bundled programs parse"))
}

/// Every loop of every bundled program, with its body denoted at the
/// default configuration. Loops are named `program#k` in pre-order.
pub fn loops() -> Result<Vec<CorpusLoop>> {
    let cfg = EvalConfig::default();
    let mut out = Vec::new();
    for e in PROGRAMS {
        let p = parse(e.source)?;
        let universe = state_space(&p.decls, DEFAULT_STATE_CAP)?;
        for (k, l) in p.body.loops().into_iter().enumerate() {
            let body = denote(l.body, &universe, &cfg)?.traces;
            out.push(CorpusLoop {
                name: format!("{}#{k}", e.name),
                exit: l.exit.clone(),
                body,
                universe: universe.clone(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_program_parses_and_has_a_loop() {
        assert!(PROGRAMS.len() >= 10);
        for e in PROGRAMS {
            let p = parse(e.source).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert!(p.body.has_loop(), "{}", e.name);
        }
        assert!(program("nested").unwrap().body.loops().len() == 2);
    }

    #[test]
    fn bug_suites_parse() {
        for (name, text) in BUG_SUITES {
            let p = program(name).unwrap();
            crate::unroll::BugSpec::parse_suite(&p.decls, text).unwrap();
        }
    }
}
